#pragma once

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>

#include "irap/ntriples.hpp"
#include "irap/pattern.hpp"

namespace irap::testing {

/// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  TempDir() {
    std::random_device rd;
    path_ = std::filesystem::temp_directory_path() / ("irap-test-" + std::to_string(rd()) + std::to_string(rd()));
    std::filesystem::create_directories(path_);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& rel) const { return path_ / rel; }

 private:
  std::filesystem::path path_;
};

inline std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_file(const std::filesystem::path& p, const std::string& content) {
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
  std::ofstream(p, std::ios::binary) << content;
}

inline std::string fixture_path(const std::string& rel) { return std::string(IRAP_FIXTURE_DIR) + "/" + rel; }

inline std::string read_fixture(const std::string& rel) {
  std::ifstream in(fixture_path(rel), std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline Graph load_graph(const std::string& rel) { return parse_ntriples(read_fixture(rel)).graph; }

struct RunningExample {
  InterestExpression interest = parse_interest(read_fixture("running_example/athlete.rq"), {.id = "athlete"});
  Graph removed = load_graph("running_example/changesets/2015/02/06/17/000001.removed.nt");
  Graph added = load_graph("running_example/changesets/2015/02/06/17/000001.added.nt");
  Graph target_t0 = load_graph("running_example/target_t0.nt");
  Graph expected_target = load_graph("running_example/expected_target.nt");
  Graph expected_pi = load_graph("running_example/expected_pi.nt");
};

inline constexpr const char* kDbr = "http://dbpedia.org/resource/";
inline constexpr const char* kDbo = "http://dbpedia.org/ontology/";
inline constexpr const char* kDbp = "http://dbpedia.org/property/";
inline constexpr const char* kFoaf = "http://xmlns.com/foaf/0.1/";

inline Term dbr(const std::string& local) { return Term::iri(kDbr + local); }
inline Term integer(const std::string& v) { return Term::typed_literal(v, vocab::kXsdInteger); }

inline Triple athlete(const std::string& who) {
  return Triple(dbr(who), Term::iri(vocab::kRdfType), Term::iri(std::string(kDbo) + "Athlete"));
}
inline Triple goals(const std::string& who, const std::string& n) {
  return Triple(dbr(who), Term::iri(std::string(kDbp) + "goals"), integer(n));
}
inline Triple homepage(const std::string& who, const std::string& url) {
  return Triple(dbr(who), Term::iri(std::string(kFoaf) + "homepage"), Term::literal(url));
}

}  // namespace irap::testing
