#pragma once

#include <cstddef>
#include <string>

#include "irap/evaluator.hpp"
#include "irap/store.hpp"

namespace irap {

struct PropagationReport {
  std::string interest;
  std::string changeset;
  // Effects actually applied to the stores.
  std::size_t removed_interesting = 0;
  std::size_t added_interesting = 0;
  std::size_t pi_removed = 0;
  std::size_t pi_added = 0;
  double wall_ms = 0;
  // Size of the source changeset.
  std::size_t total_removed = 0;
  std::size_t total_added = 0;

  /// interest, changeset, the four counts and milliseconds, tab separated.
  std::string to_line() const;
};

inline std::string export_update_stream(const InterestingChangeset& ic) {
  return export_update_stream(Changeset{ic.removed, ic.added});
}

/// Evaluates `cs` for `i` against the stores and commits both deltas together.
/// The computed interesting changeset is copied to `interesting` if given.
PropagationReport propagate(const InterestExpression& i, const Changeset& cs, StorePair& stores,
                            const std::string& changeset_id = {}, const MatchLimits& limits = {},
                            InterestingChangeset* interesting = nullptr);

}  // namespace irap
