#pragma once

#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "irap/pattern.hpp"
#include "irap/rdf.hpp"

namespace irap::oracle {

/// Folds apply_changeset over the sequence.
Graph mirror_apply(const Graph& dump, const std::vector<Changeset>& changesets);

/// Brute-force slice: naive backtracking over every triple for every pattern.
Graph slice(const InterestExpression& i, const Graph& v);

struct CompareReport {
  Graph missing;  // expected ∖ target
  Graph extra;    // target ∖ expected
  bool equal() const { return missing.empty() && extra.empty(); }
};

CompareReport compare(const Graph& target, const Graph& expected);

/// Exhaustive counterpart of generate_candidates: every connected pattern
/// subset against every binding witnessed by `m`.
struct Classification {
  std::vector<Graph> c;
  Graph c_op;
  friend bool operator==(const Classification&, const Classification&) = default;
};

Classification classify(const InterestExpression& i, const Graph& m);

struct WorkloadParams {
  int entities = 40;
  int teams = 6;
  int changesets = 20;
  int max_changeset_ops = 6;
  double noise_ratio = 0.5;  // share of operations that touch only noise triples
  int noise_predicates = 8;
  int interests = 1;
};

struct Workload {
  std::uint64_t seed = 0;
  WorkloadParams params;
  Graph dump;
  std::vector<Changeset> changesets;
  std::vector<InterestExpression> interests;
};

/// Deterministic in (seed, params). Interest shapes are stars or chains with
/// 2–4 BGP patterns, 0–1 OGP pattern and 0–1 filter. The dump is pruned so
/// that every pattern-matching triple lies in the slice of each interest.
Workload generate_workload(std::uint64_t seed, const WorkloadParams& params = {});

/// Random interest over the workload vocabulary.
InterestExpression random_interest(std::mt19937_64& rng, const std::string& id);

/// Small random graph and connected BGP over a tiny vocabulary, for
/// exhaustive comparisons.
struct SmallCase {
  InterestExpression interest;
  Graph graph;
};
SmallCase random_small_case(std::mt19937_64& rng, int max_triples = 50, int max_patterns = 4);

/// Random graph over a tiny vocabulary.
Graph random_graph(std::mt19937_64& rng, int max_triples);

/// Writes the changesets as ROOT/YYYY/MM/DD/HH/NNNNNN.{removed,added}.nt
/// starting at 2015-01-01 00h, ten serials per hour; an empty side is not
/// written. Returns the keys written.
std::vector<std::string> export_changesets(const std::vector<Changeset>& changesets,
                                           const std::filesystem::path& root);

/// Vocabulary namespace of generated data.
inline constexpr const char* kEx = "http://example.org/";

}  // namespace irap::oracle
