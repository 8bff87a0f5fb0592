#include "irap/triple_view.hpp"

namespace irap {

GraphIndex::GraphIndex(const Graph& g) : graph_(&g) {
  for (const Triple& t : g) {
    by_s_[t.subject].push_back(&t);
    by_p_[t.predicate].push_back(&t);
    by_o_[t.object].push_back(&t);
  }
}

bool GraphIndex::scan(const Term* s, const Term* p, const Term* o, Visitor visit) const {
  if ((s && s->is_literal()) || (p && !p->is_iri())) return true;
  if (s && p && o) {
    Triple probe(*s, *p, *o);
    return !graph_->contains(probe) || visit(probe);
  }
  static const std::vector<const Triple*> kEmpty;
  const std::vector<const Triple*>* best = nullptr;
  auto narrow = [&](const Postings& idx, const Term* key) {
    if (!key) return;
    auto it = idx.find(*key);
    const auto* list = it == idx.end() ? &kEmpty : &it->second;
    if (!best || list->size() < best->size()) best = list;
  };
  narrow(by_s_, s);
  narrow(by_p_, p);
  narrow(by_o_, o);
  if (!best) {
    for (const Triple& t : *graph_) {
      if (!visit(t)) return false;
    }
    return true;
  }
  for (const Triple* t : *best) {
    if (s && t->subject != *s) continue;
    if (p && t->predicate != *p) continue;
    if (o && t->object != *o) continue;
    if (!visit(*t)) return false;
  }
  return true;
}

bool UnionView::scan(const Term* s, const Term* p, const Term* o, Visitor visit) const {
  if (!a_.scan(s, p, o, visit)) return false;
  return b_.scan(s, p, o, [&](const Triple& t) { return a_.contains(t) || visit(t); });
}

bool ExcludingView::scan(const Term* s, const Term* p, const Term* o, Visitor visit) const {
  return base_.scan(s, p, o, [&](const Triple& t) { return excluded_.contains(t) || visit(t); });
}

}  // namespace irap
