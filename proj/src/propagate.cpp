#include "irap/propagate.hpp"

#include <chrono>
#include <cstdio>

namespace irap {

std::string PropagationReport::to_line() const {
  char ms[32];
  std::snprintf(ms, sizeof ms, "%.3f", wall_ms);
  return interest + "\t" + changeset + "\t" + std::to_string(removed_interesting) + "\t" +
         std::to_string(added_interesting) + "\t" + std::to_string(pi_removed) + "\t" + std::to_string(pi_added) +
         "\t" + ms;
}

PropagationReport propagate(const InterestExpression& i, const Changeset& cs, StorePair& stores,
                            const std::string& changeset_id, const MatchLimits& limits,
                            InterestingChangeset* interesting) {
  auto start = std::chrono::steady_clock::now();
  PropagationReport report;
  report.interest = i.id;
  report.changeset = changeset_id;
  report.total_removed = cs.removed.size();
  report.total_added = cs.added.size();

  Evaluation e;
  {
    auto target_lock = stores.target().read_lock();
    auto pi_lock = stores.pi().read_lock();
    e = evaluate_interest(i, cs, stores.target(), stores.pi().snapshot(), limits);
  }
  auto applied = stores.commit({e.interesting.removed, e.interesting.added}, {e.pi.removed, e.pi.added});

  if (interesting) *interesting = e.interesting;
  report.removed_interesting = applied.target.removed;
  report.added_interesting = applied.target.added;
  report.pi_removed = applied.pi.removed;
  report.pi_added = applied.pi.added;
  report.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  return report;
}

}  // namespace irap
