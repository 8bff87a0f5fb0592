#pragma once

#include <unordered_map>
#include <vector>

#include <absl/functional/function_ref.h>

#include "irap/rdf.hpp"

namespace irap {

/// Read-only pattern access to a set of triples.
class TripleView {
 public:
  /// Return false to stop the scan.
  using Visitor = absl::FunctionRef<bool(const Triple&)>;

  virtual ~TripleView() = default;

  /// Visits every triple whose positions equal the non-null arguments.
  /// Returns false if the visitor stopped the scan.
  virtual bool scan(const Term* s, const Term* p, const Term* o, Visitor visit) const = 0;
  virtual bool contains(const Triple& t) const = 0;
};

/// Hash index over a Graph. The graph must outlive the index and stay unmodified.
class GraphIndex final : public TripleView {
 public:
  explicit GraphIndex(const Graph& g);

  bool scan(const Term* s, const Term* p, const Term* o, Visitor visit) const override;
  bool contains(const Triple& t) const override { return graph_->contains(t); }
  const Graph& graph() const { return *graph_; }

 private:
  using Postings = std::unordered_map<Term, std::vector<const Triple*>>;

  const Graph* graph_;
  Postings by_s_;
  Postings by_p_;
  Postings by_o_;
};

/// a ∪ b
class UnionView final : public TripleView {
 public:
  UnionView(const TripleView& a, const TripleView& b) : a_(a), b_(b) {}

  bool scan(const Term* s, const Term* p, const Term* o, Visitor visit) const override;
  bool contains(const Triple& t) const override { return a_.contains(t) || b_.contains(t); }

 private:
  const TripleView& a_;
  const TripleView& b_;
};

/// base ∖ excluded
class ExcludingView final : public TripleView {
 public:
  ExcludingView(const TripleView& base, const Graph& excluded) : base_(base), excluded_(excluded) {}

  bool scan(const Term* s, const Term* p, const Term* o, Visitor visit) const override;
  bool contains(const Triple& t) const override { return !excluded_.contains(t) && base_.contains(t); }

 private:
  const TripleView& base_;
  const Graph& excluded_;
};

}  // namespace irap
