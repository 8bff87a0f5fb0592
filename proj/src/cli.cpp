#include "irap/cli.hpp"

#include <nlohmann/json.hpp>
#include <spdlog/fmt/fmt.h>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <fstream>
#include <memory>
#include <sstream>
#include <thread>

#include "irap/changeset_io.hpp"
#include "irap/evaluator.hpp"
#include "irap/fault.hpp"
#include "irap/ntriples.hpp"
#include "irap/propagate.hpp"
#include "irap/store.hpp"

namespace irap::cli {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace {

spdlog::logger& log() {
  static std::shared_ptr<spdlog::logger> logger = [] {
    auto l = spdlog::stderr_color_mt("irap");
    l->set_pattern("%Y-%m-%dT%H:%M:%S.%e %^%l%$ %v");
    return l;
  }();
  return *logger;
}

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

template <typename T>
void read_field(const json& section, const char* key, T& out, const std::string& where) {
  if (!section.contains(key)) return;
  try {
    out = section.at(key).get<T>();
  } catch (const json::exception&) {
    throw ConfigError("config: " + where + "." + key + " has the wrong type");
  }
}

bool parse_bool(const std::string& name, const std::string& v) {
  if (v == "1" || v == "true" || v == "yes" || v == "on") return true;
  if (v == "0" || v == "false" || v == "no" || v == "off") return false;
  throw ConfigError(name + ": expected a boolean, got '" + v + "'");
}

void apply_env(Config& c) {
  auto env = [](const char* name) -> std::optional<std::string> {
    const char* v = std::getenv(name);
    if (!v) return std::nullopt;
    return std::string(v);
  };
  if (auto v = env("IRAP_SOURCE_CHANGESETS_ROOT")) c.changesets_root = *v;
  if (auto v = env("IRAP_SOURCE_POLL_INTERVAL_SECONDS")) {
    try {
      std::size_t used = 0;
      c.poll_interval_seconds = std::stoi(*v, &used);
      if (used != v->size()) throw std::invalid_argument(*v);
    } catch (const std::exception&) {
      throw ConfigError("IRAP_SOURCE_POLL_INTERVAL_SECONDS: expected an integer, got '" + *v + "'");
    }
  }
  if (auto v = env("IRAP_SOURCE_CLEANUP")) c.cleanup = parse_bool("IRAP_SOURCE_CLEANUP", *v);
  if (auto v = env("IRAP_STORES_TARGET_PATH")) c.target_path = *v;
  if (auto v = env("IRAP_STORES_PI_PATH")) c.pi_path = *v;
  if (auto v = env("IRAP_STORES_CHECKPOINT_PATH")) c.checkpoint_path = *v;
}

void validate(const Config& c) {
  if (c.poll_interval_seconds < 0) throw ConfigError("config: source.poll_interval_seconds must be >= 0");
  std::vector<std::string> ids;
  for (const auto& e : c.interests) {
    if (e.id.empty() || e.id.find_first_of(" \t\n/\\") != std::string::npos) {
      throw ConfigError("config: invalid interest id '" + e.id + "'");
    }
    if (e.file.empty()) throw ConfigError("config: interest '" + e.id + "' has no file");
    if (std::find(ids.begin(), ids.end(), e.id) != ids.end()) {
      throw ConfigError("config: duplicate interest id '" + e.id + "'");
    }
    ids.push_back(e.id);
  }
}

bool is_iri_target(const std::string& t) {
  auto colon = t.find("://");
  return colon != std::string::npos && colon > 0 && t.find_first_of("/\\") > colon;
}

struct LoadedInterest {
  const InterestEntry* entry;
  InterestExpression expression;
  std::unique_ptr<StorePair> stores;
};

InterestExpression load_expression(const Config& c, const InterestEntry& e) {
  return parse_interest(read_text(c.resolve(e.file)), InterestMeta{e.id, c.changesets_root, e.target});
}

}  // namespace

void set_verbosity(int level) {
  log().set_level(level <= 0 ? spdlog::level::warn : level == 1 ? spdlog::level::info : spdlog::level::debug);
}

// ---------------------------------------------------------------------------
// Config

Config Config::load(const fs::path& path, bool env) {
  json doc;
  try {
    doc = json::parse(read_text(path));
  } catch (const json::exception& e) {
    throw ConfigError("config " + path.string() + ": " + e.what());
  }
  if (!doc.is_object()) throw ConfigError("config " + path.string() + ": expected a JSON object");
  Config c;
  c.base_dir = fs::absolute(path).parent_path();
  if (doc.contains("source")) {
    const auto& s = doc["source"];
    read_field(s, "changesets_root", c.changesets_root, "source");
    read_field(s, "poll_interval_seconds", c.poll_interval_seconds, "source");
    read_field(s, "cleanup", c.cleanup, "source");
  }
  if (doc.contains("stores")) {
    const auto& s = doc["stores"];
    read_field(s, "target_path", c.target_path, "stores");
    read_field(s, "pi_path", c.pi_path, "stores");
    read_field(s, "checkpoint_path", c.checkpoint_path, "stores");
  }
  if (doc.contains("interest")) {
    if (!doc["interest"].is_array()) throw ConfigError("config: interest must be an array");
    for (const auto& item : doc["interest"]) {
      InterestEntry e;
      read_field(item, "id", e.id, "interest");
      read_field(item, "file", e.file, "interest");
      read_field(item, "target", e.target, "interest");
      read_field(item, "export_dir", e.export_dir, "interest");
      c.interests.push_back(std::move(e));
    }
  }
  if (env) apply_env(c);
  validate(c);
  return c;
}

Config Config::load_or_default(const fs::path& path, bool env) {
  if (fs::exists(path)) return load(path, env);
  Config c;
  c.base_dir = fs::absolute(path).parent_path();
  if (env) apply_env(c);
  return c;
}

std::string Config::dump() const {
  json doc;
  doc["source"] = {{"changesets_root", changesets_root},
                   {"poll_interval_seconds", poll_interval_seconds},
                   {"cleanup", cleanup}};
  doc["stores"] = {{"target_path", target_path}, {"pi_path", pi_path}, {"checkpoint_path", checkpoint_path}};
  doc["interest"] = json::array();
  for (const auto& e : interests) {
    json item = {{"id", e.id}, {"file", e.file}};
    if (!e.target.empty()) item["target"] = e.target;
    if (!e.export_dir.empty()) item["export_dir"] = e.export_dir;
    doc["interest"].push_back(std::move(item));
  }
  return doc.dump(2) + "\n";
}

void Config::save(const fs::path& path) const {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  write_file_durably(path, dump());
}

fs::path Config::resolve(const std::string& p) const {
  fs::path path(p);
  return path.is_absolute() ? path : base_dir / path;
}

const InterestEntry* Config::find(const std::string& id) const {
  for (const auto& e : interests) {
    if (e.id == id) return &e;
  }
  return nullptr;
}

fs::path Config::target_dir(const InterestEntry& e) const {
  if (!e.target.empty() && !is_iri_target(e.target)) return resolve(e.target);
  return resolve(target_path) / e.id;
}

fs::path Config::pi_dir(const InterestEntry& e) const { return resolve(pi_path) / e.id; }
fs::path Config::checkpoint_file() const { return resolve(checkpoint_path) / "lastPublished"; }
fs::path Config::stats_file() const { return resolve(checkpoint_path) / "stats.tsv"; }

// ---------------------------------------------------------------------------
// Stats

namespace {
constexpr const char* kStatsHeader =
    "# id\tlast\tchangesets\ttotal_removed\ttotal_added\tremoved_interesting\tadded_interesting\tpi_removed\t"
    "pi_added\telapsed_ms";
}

StatsTable read_stats(const fs::path& path) {
  StatsTable table;
  std::ifstream in(path);
  if (!in) return table;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    std::istringstream fields(line);
    std::string id;
    InterestStats s;
    if (!(fields >> id >> s.last >> s.changesets >> s.total_removed >> s.total_added >> s.removed_interesting >>
          s.added_interesting >> s.pi_removed >> s.pi_added >> s.elapsed_ms)) {
      throw Error("corrupt stats file " + path.string() + " at line " + std::to_string(line_no));
    }
    if (s.last == "-") s.last.clear();
    table[id] = s;
  }
  return table;
}

void write_stats(const fs::path& path, const StatsTable& stats) {
  std::string text = std::string(kStatsHeader) + "\n";
  for (const auto& [id, s] : stats) {
    text += fmt::format("{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{:.3f}\n", id, s.last.empty() ? "-" : s.last,
                        s.changesets, s.total_removed, s.total_added, s.removed_interesting, s.added_interesting,
                        s.pi_removed, s.pi_added, s.elapsed_ms);
  }
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  write_file_durably(path, text);
}

// ---------------------------------------------------------------------------
// Commands

namespace {

template <typename Fn>
int guarded(const char* verb, Fn&& fn) {
  try {
    return fn();
  } catch (const fault::SimulatedCrash&) {
    throw;
  } catch (const std::exception& e) {
    log().error("{}: {}", verb, e.what());
    return 1;
  }
}

}  // namespace

int cmd_register(const fs::path& config_path, const fs::path& interest_file, const RegisterOptions& options) {
  return guarded("register", [&] {
    Config c = Config::load_or_default(config_path, false);
    std::string id = options.id.empty() ? interest_file.stem().string() : options.id;
    if (c.find(id)) {
      log().error("register: interest id '{}' is already registered", id);
      return 1;
    }
    fs::path abs_file = fs::absolute(interest_file);
    InterestEntry entry{id, fs::proximate(abs_file, c.base_dir).string(), options.target, options.export_dir};
    try {
      parse_interest(read_text(abs_file), InterestMeta{id, c.changesets_root, options.target});
    } catch (const ValidationError& e) {
      log().error("register: {}: {}", interest_file.string(), e.what());
      return 1;
    } catch (const InterestSyntaxError& e) {
      log().error("register: {}: {}", interest_file.string(), e.what());
      return 1;
    }
    c.interests.push_back(entry);
    validate(c);
    {
      Config effective = c;
      apply_env(effective);
      StorePair stores(effective.target_dir(entry), effective.pi_dir(entry));
    }
    c.save(config_path);
    log().info("registered interest '{}'", id);
    return 0;
  });
}

int cmd_init_slice(const fs::path& config_path, const std::string& id, const fs::path& dump_path,
                   const std::optional<std::string>& sequence) {
  return guarded("init-slice", [&] {
    Config c = Config::load(config_path);
    const InterestEntry* entry = c.find(id);
    if (!entry) {
      log().error("init-slice: unknown interest '{}'", id);
      return 1;
    }
    InterestExpression interest = load_expression(c, *entry);

    std::string text = read_maybe_gzipped(dump_path);
    std::optional<std::string> declared = sequence;
    if (!declared) {
      std::istringstream lines(text);
      std::string line;
      while (std::getline(lines, line) && line.starts_with("#")) {
        constexpr std::string_view kTag = "# sequence-key:";
        if (line.starts_with(kTag)) {
          auto value = line.substr(kTag.size());
          value.erase(0, value.find_first_not_of(" \t"));
          value.erase(value.find_last_not_of(" \t\r") + 1);
          declared = value;
        }
      }
    }
    std::optional<SequenceKey> key;
    if (declared) {
      key = SequenceKey::parse(*declared);
      if (!key) {
        log().error("init-slice: invalid sequence key '{}'", *declared);
        return 1;
      }
    }

    auto parsed = parse_ntriples(text, {.mode = ParseMode::kLenient, .doc_id = {}});
    if (parsed.skipped > 0) log().warn("init-slice: skipped {} malformed dump lines", parsed.skipped);
    Graph slice = init_slice(interest, parsed.graph);

    StorePair stores(c.target_dir(*entry), c.pi_dir(*entry));
    stores.reset(slice, {});
    Checkpoint cp = Checkpoint::read(c.checkpoint_file());
    cp.reset(id, key);
    cp.save(c.checkpoint_file());
    StatsTable stats = read_stats(c.stats_file());
    stats[id] = InterestStats{};
    if (key) stats[id].last = key->to_string();
    write_stats(c.stats_file(), stats);
    log().info("init-slice: '{}' target holds {} of {} dump triples{}", id, slice.size(), parsed.graph.size(),
               key ? ", checkpoint " + key->to_string() : std::string());
    return 0;
  });
}

namespace {

// Processes every pending changeset once. Returns false on an error-level
// event; `retryable` is set when the failure may clear up on a later poll.
bool run_pass(const Config& c, std::vector<LoadedInterest>& interests, std::ostream& out,
              const std::atomic<bool>* stop, bool& retryable) {
  retryable = false;
  Checkpoint cp = Checkpoint::read(c.checkpoint_file());
  StatsTable stats = read_stats(c.stats_file());

  std::optional<SequenceKey> after;
  bool all_checkpointed = true;
  for (const auto& li : interests) {
    auto k = cp.get(li.entry->id);
    if (!k) {
      all_checkpointed = false;
    } else if (!after || *k < *after) {
      after = k;
    }
  }
  if (!all_checkpointed) after.reset();

  ScanResult scan;
  try {
    scan = scan_changesets(c.resolve(c.changesets_root), after);
  } catch (const RetryableError& e) {
    log().error("scan: {}", e.what());
    retryable = true;
    return false;
  }
  for (const auto& w : scan.warnings) log().warn("scan: {}", w);

  for (const auto& ref : scan.refs) {
    if (stop && stop->load()) return true;
    std::string key = ref.key.to_string();
    std::optional<Changeset> cs;
    for (auto& li : interests) {
      const std::string& id = li.entry->id;
      if (auto done = cp.get(id); done && ref.key <= *done) continue;
      if (!cs) {
        try {
          std::size_t skipped = 0;
          cs = load_changeset(ref, &skipped);
          if (skipped > 0) log().warn("changeset {}: skipped {} malformed lines", key, skipped);
        } catch (const RetryableError& e) {
          log().error("changeset {}: {}", key, e.what());
          retryable = true;
          return false;
        }
      }
      InterestingChangeset interesting;
      PropagationReport report = propagate(li.expression, *cs, *li.stores, key, {}, &interesting);
      if (!li.entry->export_dir.empty()) {
        fs::path dir = c.resolve(li.entry->export_dir);
        fs::create_directories(dir);
        write_file_durably(dir / (key + ".ru"), export_update_stream(interesting));
      }
      fault::point("propagated");

      InterestStats& s = stats[id];
      if (s.last.empty() || s.last < key) {
        s.last = key;
        s.changesets += 1;
        s.total_removed += report.total_removed;
        s.total_added += report.total_added;
        s.removed_interesting += report.removed_interesting;
        s.added_interesting += report.added_interesting;
        s.pi_removed += report.pi_removed;
        s.pi_added += report.pi_added;
        s.elapsed_ms += report.wall_ms;
        write_stats(c.stats_file(), stats);
      }
      fault::point("stats-written");

      out << report.to_line() << '\n' << std::flush;
      cp.advance(id, ref.key);
      cp.save(c.checkpoint_file());
      fault::point("checkpoint-written");
    }
    if (c.cleanup) {
      std::error_code ec;
      if (ref.removed_path) fs::remove(*ref.removed_path, ec);
      if (ref.added_path) fs::remove(*ref.added_path, ec);
    }
  }
  return true;
}

}  // namespace

int cmd_run(const fs::path& config_path, RunMode mode, std::ostream& out, const std::atomic<bool>* stop) {
  return guarded("run", [&] {
    Config c = Config::load(config_path);
    std::vector<LoadedInterest> interests;
    std::vector<const InterestEntry*> entries;
    for (const auto& e : c.interests) entries.push_back(&e);
    std::sort(entries.begin(), entries.end(), [](auto* a, auto* b) { return a->id < b->id; });
    for (const auto* e : entries) {
      interests.push_back(LoadedInterest{e, load_expression(c, *e),
                                         std::make_unique<StorePair>(c.target_dir(*e), c.pi_dir(*e))});
    }
    if (interests.empty()) log().warn("run: no interests registered");

    while (true) {
      bool retryable = false;
      bool ok = run_pass(c, interests, out, stop, retryable);
      if (mode == RunMode::kOnce) return ok ? 0 : 1;
      if (!ok && !retryable) return 1;
      if (!ok) log().warn("run: retrying in {} s", c.poll_interval_seconds);
      auto wake = std::chrono::steady_clock::now() + std::chrono::seconds(c.poll_interval_seconds);
      while (std::chrono::steady_clock::now() < wake) {
        if (stop && stop->load()) return 0;
        std::this_thread::sleep_for(std::chrono::milliseconds(100));
      }
      if (stop && stop->load()) return 0;
    }
  });
}

int cmd_stats(const fs::path& config_path, std::ostream& out) {
  return guarded("stats", [&] {
    Config c = Config::load(config_path);
    StatsTable stats = read_stats(c.stats_file());
    std::vector<const InterestEntry*> entries;
    for (const auto& e : c.interests) entries.push_back(&e);
    std::sort(entries.begin(), entries.end(), [](auto* a, auto* b) { return a->id < b->id; });

    auto pct = [](std::size_t part, std::size_t whole) {
      return whole == 0 ? 0.0 : 100.0 * static_cast<double>(part) / static_cast<double>(whole);
    };
    std::string row_format = "{:<16} {:>10} {:>12} {:>12} {:>8} {:>12} {:>12} {:>8} {:>10} {:>10} {:>10} {:>12} {:>10}\n";
    out << fmt::format(fmt::runtime(row_format), "interest", "changesets", "removed", "int_removed", "int_rem%",
                       "added", "int_added", "int_add%", "pi_removed", "pi_added", "elapsed_s", "target_size",
                       "pi_size");
    for (const auto* e : entries) {
      InterestStats s;
      if (auto it = stats.find(e->id); it != stats.end()) s = it->second;
      StorePair stores(c.target_dir(*e), c.pi_dir(*e));
      out << fmt::format(fmt::runtime(row_format), e->id, s.changesets, s.total_removed, s.removed_interesting,
                         fmt::format("{:.3f}", pct(s.removed_interesting, s.total_removed)), s.total_added,
                         s.added_interesting, fmt::format("{:.3f}", pct(s.added_interesting, s.total_added)),
                         s.pi_removed, s.pi_added, fmt::format("{:.3f}", s.elapsed_ms / 1000.0),
                         stores.target().size(), stores.pi().size());
    }
    return 0;
  });
}

int cmd_export_updates(const fs::path& config_path, const std::string& id, const fs::path& out_dir,
                       const std::optional<fs::path>& since) {
  return guarded("export-updates", [&] {
    Config c = Config::load(config_path);
    const InterestEntry* entry = c.find(id);
    if (!entry) {
      log().error("export-updates: unknown interest '{}'", id);
      return 1;
    }
    StorePair stores(c.target_dir(*entry), c.pi_dir(*entry));
    Graph target = stores.target().snapshot();
    fs::create_directories(out_dir);
    write_file_durably(out_dir / "target.nt", serialize_ntriples(target));
    write_file_durably(out_dir / "pi.nt", serialize_ntriples(stores.pi().snapshot()));
    if (since) {
      Graph before = parse_ntriples(read_maybe_gzipped(*since)).graph;
      write_file_durably(out_dir / "update.ru", export_update_stream(graph_diff(before, target)));
    }
    log().info("export-updates: wrote {} target triples to {}", target.size(), out_dir.string());
    return 0;
  });
}

}  // namespace irap::cli
