#include <gtest/gtest.h>

#include <cstdlib>
#include <sstream>
#include <thread>

#include "fixture_util.hpp"
#include "irap/changeset_io.hpp"
#include "irap/cli.hpp"
#include "irap/ntriples.hpp"
#include "irap/store.hpp"

namespace irap {
namespace {

namespace fs = std::filesystem;
using namespace irap::testing;
using namespace irap::cli;

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    set_verbosity(0);
    fs::copy(fixture_path("running_example/changesets"), dir / "changesets", fs::copy_options::recursive);
    fs::copy(fixture_path("running_example/athlete.rq"), dir / "athlete.rq");
    write_file(dir / "dump.nt", "# sequence-key: 2015-02-06-17-000000\n" + read_fixture("running_example/target_t0.nt"));
  }

  fs::path config() const { return dir / "irap.json"; }
  Config load() const { return Config::load(config()); }

  std::vector<std::string> run_once(int* rc = nullptr) {
    std::ostringstream out;
    int status = cmd_run(config(), RunMode::kOnce, out);
    if (rc) *rc = status;
    std::vector<std::string> lines;
    std::istringstream in(out.str());
    for (std::string line; std::getline(in, line);) lines.push_back(line);
    return lines;
  }

  StorePair stores(const std::string& id) {
    Config c = load();
    return StorePair(c.target_dir(*c.find(id)), c.pi_dir(*c.find(id)));
  }

  TempDir dir;
};

TEST_F(CliTest, RegisterAddsOneEntryAndCreatesPartition) {
  ASSERT_EQ(cmd_register(config(), dir / "athlete.rq"), 0);
  Config c = load();
  ASSERT_EQ(c.interests.size(), 1u);
  EXPECT_EQ(c.interests[0].id, "athlete");
  EXPECT_EQ(c.interests[0].file, "athlete.rq");
  EXPECT_TRUE(fs::is_directory(c.pi_dir(c.interests[0])));
  EXPECT_TRUE(fs::is_directory(c.target_dir(c.interests[0])));
}

TEST_F(CliTest, RegisterRejectsDuplicateId) {
  ASSERT_EQ(cmd_register(config(), dir / "athlete.rq"), 0);
  EXPECT_NE(cmd_register(config(), dir / "athlete.rq"), 0);
  EXPECT_EQ(load().interests.size(), 1u);
}

TEST_F(CliTest, RegisterRejectsDisjointBgp) {
  write_file(dir / "split.rq", "PREFIX e: <http://e/>\nSELECT * WHERE { ?a e:p ?b . ?c e:q ?d . }\n");
  EXPECT_NE(cmd_register(config(), dir / "split.rq"), 0);
  EXPECT_FALSE(fs::exists(config()));
}

TEST_F(CliTest, RegisterRejectsSyntaxErrors) {
  write_file(dir / "bad.rq", "SELECT * WHERE { ?a ?b }\n");
  EXPECT_NE(cmd_register(config(), dir / "bad.rq"), 0);
}

TEST_F(CliTest, ConfigRoundTripIsStable) {
  ASSERT_EQ(cmd_register(config(), dir / "athlete.rq", {.id = "x", .target = "http://example.org/sparql",
                                                        .export_dir = "exports"}),
            0);
  std::string first = load().dump();
  write_file(dir / "copy.json", first);
  EXPECT_EQ(Config::load(dir / "copy.json").dump(), first);
  EXPECT_EQ(read_file(config()), first);
}

TEST_F(CliTest, EnvironmentOverridesConfigKeys) {
  ASSERT_EQ(cmd_register(config(), dir / "athlete.rq"), 0);
  setenv("IRAP_SOURCE_POLL_INTERVAL_SECONDS", "3", 1);
  setenv("IRAP_STORES_PI_PATH", "/elsewhere", 1);
  setenv("IRAP_SOURCE_CLEANUP", "yes", 1);
  Config c = load();
  unsetenv("IRAP_SOURCE_POLL_INTERVAL_SECONDS");
  unsetenv("IRAP_STORES_PI_PATH");
  unsetenv("IRAP_SOURCE_CLEANUP");
  EXPECT_EQ(c.poll_interval_seconds, 3);
  EXPECT_EQ(c.pi_path, "/elsewhere");
  EXPECT_TRUE(c.cleanup);
  EXPECT_EQ(c.pi_dir(c.interests[0]), fs::path("/elsewhere/athlete"));
  setenv("IRAP_SOURCE_CLEANUP", "maybe", 1);
  EXPECT_THROW(load(), ConfigError);
  unsetenv("IRAP_SOURCE_CLEANUP");
}

TEST_F(CliTest, MalformedConfigIsRejected) {
  write_file(config(), "{\"source\": {\"poll_interval_seconds\": \"soon\"}}");
  EXPECT_THROW(load(), ConfigError);
  write_file(config(), "not json");
  EXPECT_THROW(load(), ConfigError);
  EXPECT_NE(cmd_stats(config(), std::cout), 0);
}

TEST_F(CliTest, InitSliceBuildsTargetAndCheckpoint) {
  ASSERT_EQ(cmd_register(config(), dir / "athlete.rq"), 0);
  ASSERT_EQ(cmd_init_slice(config(), "athlete", dir / "dump.nt"), 0);
  EXPECT_EQ(stores("athlete").target().snapshot(), load_graph("running_example/target_t0.nt"));
  EXPECT_EQ(Checkpoint::read(load().checkpoint_file()).get("athlete")->to_string(), "2015-02-06-17-000000");
}

TEST_F(CliTest, InitSliceFiltersDump) {
  ASSERT_EQ(cmd_register(config(), dir / "athlete.rq"), 0);
  write_file(dir / "mixed.nt", read_fixture("running_example/target_t0.nt") +
                                   "<http://x/a> <http://x/b> <http://x/c> .\n" +
                                   "<http://dbpedia.org/resource/Lonely> <http://dbpedia.org/property/goals> \"3\" .\n");
  ASSERT_EQ(cmd_init_slice(config(), "athlete", dir / "mixed.nt", "2015-01-01-00-000001"), 0);
  EXPECT_EQ(stores("athlete").target().size(), 5u);
}

TEST_F(CliTest, InitSliceEmptyDump) {
  ASSERT_EQ(cmd_register(config(), dir / "athlete.rq"), 0);
  write_file(dir / "empty.nt", "");
  EXPECT_EQ(cmd_init_slice(config(), "athlete", dir / "empty.nt"), 0);
  EXPECT_EQ(stores("athlete").target().size(), 0u);
  EXPECT_FALSE(Checkpoint::read(load().checkpoint_file()).get("athlete"));
}

TEST_F(CliTest, InitSliceFailures) {
  ASSERT_EQ(cmd_register(config(), dir / "athlete.rq"), 0);
  EXPECT_NE(cmd_init_slice(config(), "athlete", dir / "missing.nt"), 0);
  EXPECT_NE(cmd_init_slice(config(), "nobody", dir / "dump.nt"), 0);
  EXPECT_NE(cmd_init_slice(config(), "athlete", dir / "dump.nt", "yesterday"), 0);
}

TEST_F(CliTest, RunFixtureReproducesGoldenStores) {
  ASSERT_EQ(cmd_register(config(), dir / "athlete.rq"), 0);
  ASSERT_EQ(cmd_init_slice(config(), "athlete", dir / "dump.nt"), 0);
  int rc = -1;
  auto lines = run_once(&rc);
  EXPECT_EQ(rc, 0);
  ASSERT_EQ(lines.size(), 1u);
  EXPECT_TRUE(lines[0].starts_with("athlete\t2015-02-06-17-000001\t5\t5\t0\t3\t")) << lines[0];
  auto s = stores("athlete");
  EXPECT_EQ(s.target().snapshot(), load_graph("running_example/expected_target.nt"));
  EXPECT_EQ(s.pi().snapshot(), load_graph("running_example/expected_pi.nt"));

  EXPECT_TRUE(run_once(&rc).empty());
  EXPECT_EQ(rc, 0);
}

TEST_F(CliTest, RunOnEmptyTree) {
  fs::remove_all(dir / "changesets");
  fs::create_directories(dir / "changesets");
  ASSERT_EQ(cmd_register(config(), dir / "athlete.rq"), 0);
  int rc = -1;
  EXPECT_TRUE(run_once(&rc).empty());
  EXPECT_EQ(rc, 0);
}

TEST_F(CliTest, RunWithMissingRootFails) {
  fs::remove_all(dir / "changesets");
  ASSERT_EQ(cmd_register(config(), dir / "athlete.rq"), 0);
  int rc = 0;
  run_once(&rc);
  EXPECT_NE(rc, 0);
}

TEST_F(CliTest, RunExportsUpdateDocuments) {
  ASSERT_EQ(cmd_register(config(), dir / "athlete.rq", {.export_dir = "updates"}), 0);
  ASSERT_EQ(cmd_init_slice(config(), "athlete", dir / "dump.nt"), 0);
  run_once();
  std::string doc = read_file(dir / "updates" / "2015-02-06-17-000001.ru");
  Changeset update = parse_update_stream(doc);
  EXPECT_EQ(apply_changeset(load_graph("running_example/target_t0.nt"), update),
            load_graph("running_example/expected_target.nt"));
}

TEST_F(CliTest, CleanupRemovesProcessedFiles) {
  ASSERT_EQ(cmd_register(config(), dir / "athlete.rq"), 0);
  Config c = load();
  c.cleanup = true;
  c.save(config());
  run_once();
  EXPECT_TRUE(scan_changesets(dir / "changesets").refs.empty());
}

TEST_F(CliTest, StatsFreshInstallShowsZeroRow) {
  ASSERT_EQ(cmd_register(config(), dir / "athlete.rq"), 0);
  std::ostringstream out;
  ASSERT_EQ(cmd_stats(config(), out), 0);
  std::istringstream in(out.str());
  std::string header, row;
  std::getline(in, header);
  std::getline(in, row);
  std::istringstream fields(row);
  std::string id;
  fields >> id;
  EXPECT_EQ(id, "athlete");
  for (std::string f; fields >> f;) EXPECT_EQ(std::stod(f), 0.0) << row;
}

TEST_F(CliTest, StatsMatchReportTotals) {
  ASSERT_EQ(cmd_register(config(), dir / "athlete.rq"), 0);
  ASSERT_EQ(cmd_init_slice(config(), "athlete", dir / "dump.nt"), 0);
  run_once();
  auto table = read_stats(load().stats_file());
  const auto& s = table.at("athlete");
  EXPECT_EQ(s.changesets, 1u);
  EXPECT_EQ(s.removed_interesting, 5u);
  EXPECT_EQ(s.added_interesting, 5u);
  EXPECT_EQ(s.pi_removed, 0u);
  EXPECT_EQ(s.pi_added, 3u);
  EXPECT_EQ(s.total_removed, 4u);
  EXPECT_EQ(s.total_added, 7u);

  std::ostringstream out;
  ASSERT_EQ(cmd_stats(config(), out), 0);
  std::istringstream in(out.str());
  std::string header, row;
  std::getline(in, header);
  std::getline(in, row);
  std::istringstream fields(row);
  std::vector<std::string> cols;
  for (std::string f; fields >> f;) cols.push_back(f);
  ASSERT_EQ(cols.size(), 13u);
  EXPECT_EQ(cols[1], "1");
  EXPECT_EQ(cols[3], "5");
  EXPECT_EQ(cols[6], "5");
  EXPECT_EQ(cols[9], "3");
  EXPECT_EQ(cols[11], "5");
  EXPECT_EQ(cols[12], "3");
}

TEST_F(CliTest, StatsRowsSortedById) {
  ASSERT_EQ(cmd_register(config(), dir / "athlete.rq", {.id = "zeta"}), 0);
  ASSERT_EQ(cmd_register(config(), dir / "athlete.rq", {.id = "alpha"}), 0);
  std::ostringstream out;
  ASSERT_EQ(cmd_stats(config(), out), 0);
  std::istringstream in(out.str());
  std::vector<std::string> ids;
  for (std::string line; std::getline(in, line);) ids.push_back(line.substr(0, line.find(' ')));
  EXPECT_EQ(ids, (std::vector<std::string>{"interest", "alpha", "zeta"}));
}

TEST_F(CliTest, StatsFileRoundTrip) {
  StatsTable t;
  t["a"] = InterestStats{"2015-01-01-00-000001", 1, 2, 3, 4, 5, 6, 7, 8.5};
  t["b"] = InterestStats{};
  write_stats(dir / "stats.tsv", t);
  EXPECT_EQ(read_stats(dir / "stats.tsv"), t);
}

TEST_F(CliTest, ExportUpdatesWritesSnapshotsAndDiff) {
  ASSERT_EQ(cmd_register(config(), dir / "athlete.rq"), 0);
  ASSERT_EQ(cmd_init_slice(config(), "athlete", dir / "dump.nt"), 0);
  run_once();
  ASSERT_EQ(cmd_export_updates(config(), "athlete", dir / "out", dir / "dump.nt"), 0);
  EXPECT_EQ(parse_ntriples(read_file(dir / "out" / "target.nt")).graph,
            load_graph("running_example/expected_target.nt"));
  EXPECT_EQ(parse_ntriples(read_file(dir / "out" / "pi.nt")).graph, load_graph("running_example/expected_pi.nt"));
  Changeset update = parse_update_stream(read_file(dir / "out" / "update.ru"));
  EXPECT_EQ(apply_changeset(load_graph("running_example/target_t0.nt"), update),
            load_graph("running_example/expected_target.nt"));
  EXPECT_NE(cmd_export_updates(config(), "nobody", dir / "out", std::nullopt), 0);
}

TEST_F(CliTest, DaemonPicksUpNewChangesetsAndStops) {
  ASSERT_EQ(cmd_register(config(), dir / "athlete.rq"), 0);
  ASSERT_EQ(cmd_init_slice(config(), "athlete", dir / "dump.nt"), 0);
  Config c = load();
  c.poll_interval_seconds = 0;
  c.save(config());

  std::atomic<bool> stop{false};
  std::ostringstream out;
  int rc = -1;
  std::thread daemon([&] { rc = cmd_run(config(), RunMode::kDaemon, out, &stop); });
  auto wait_for = [&](const fs::path& file, const std::string& key) {
    for (int k = 0; k < 200; ++k) {
      auto got = Checkpoint::read(file).get("athlete");
      if (got && got->to_string() == key) return true;
      std::this_thread::sleep_for(std::chrono::milliseconds(20));
    }
    return false;
  };
  EXPECT_TRUE(wait_for(c.checkpoint_file(), "2015-02-06-17-000001"));
  write_file(dir / "changesets/2015/02/06/17/000002.added.nt",
             "<http://dbpedia.org/resource/Arvid_Smit> <http://dbpedia.org/property/goals> "
             "\"7\"^^<http://www.w3.org/2001/XMLSchema#integer> .\n");
  EXPECT_TRUE(wait_for(c.checkpoint_file(), "2015-02-06-17-000002"));
  stop = true;
  daemon.join();
  EXPECT_EQ(rc, 0);
  EXPECT_TRUE(stores("athlete").target().contains(athlete("Arvid_Smit")));
}

}  // namespace
}  // namespace irap
