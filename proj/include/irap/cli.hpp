#pragma once

#include <atomic>
#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "irap/error.hpp"

namespace irap::cli {

class ConfigError : public Error {
 public:
  using Error::Error;
};

struct InterestEntry {
  std::string id;
  std::string file;
  // Embedded store directory, or an IRI recorded for export. Empty means
  // <stores.target_path>/<id>.
  std::string target;
  // Directory receiving one update document per applied changeset.
  std::string export_dir;

  friend bool operator==(const InterestEntry&, const InterestEntry&) = default;
};

struct Config {
  std::string changesets_root = "changesets";
  int poll_interval_seconds = 10;
  bool cleanup = false;
  std::string target_path = "stores/target";
  std::string pi_path = "stores/pi";
  std::string checkpoint_path = "state";
  std::vector<InterestEntry> interests;

  // Relative paths resolve against this directory.
  std::filesystem::path base_dir;

  /// Reads the JSON document, then applies IRAP_<SECTION>_<KEY> environment
  /// overrides when `apply_env` is set.
  static Config load(const std::filesystem::path& path, bool apply_env = true);
  /// Like load, but a missing file yields the defaults.
  static Config load_or_default(const std::filesystem::path& path, bool apply_env = true);

  std::string dump() const;
  void save(const std::filesystem::path& path) const;

  std::filesystem::path resolve(const std::string& p) const;
  const InterestEntry* find(const std::string& id) const;
  std::filesystem::path target_dir(const InterestEntry& e) const;
  std::filesystem::path pi_dir(const InterestEntry& e) const;
  std::filesystem::path checkpoint_file() const;
  std::filesystem::path stats_file() const;
};

/// Cumulative per-interest counters kept next to the checkpoint.
struct InterestStats {
  std::string last;  // sequence key of the last counted changeset
  std::size_t changesets = 0;
  std::size_t total_removed = 0;
  std::size_t total_added = 0;
  std::size_t removed_interesting = 0;
  std::size_t added_interesting = 0;
  std::size_t pi_removed = 0;
  std::size_t pi_added = 0;
  double elapsed_ms = 0;

  friend bool operator==(const InterestStats&, const InterestStats&) = default;
};

using StatsTable = std::map<std::string, InterestStats>;

StatsTable read_stats(const std::filesystem::path& path);
void write_stats(const std::filesystem::path& path, const StatsTable& stats);

struct RegisterOptions {
  std::string id;  // defaults to the file stem
  std::string target;
  std::string export_dir;
};

enum class RunMode { kOnce, kDaemon };

// Commands return the process exit status: 0 on success, 1 on any
// error-level event. Reports go to `out`, diagnostics to the log on stderr.
int cmd_register(const std::filesystem::path& config, const std::filesystem::path& interest_file,
                 const RegisterOptions& options = {});
int cmd_init_slice(const std::filesystem::path& config, const std::string& id, const std::filesystem::path& dump,
                   const std::optional<std::string>& sequence = std::nullopt);
int cmd_run(const std::filesystem::path& config, RunMode mode, std::ostream& out,
            const std::atomic<bool>* stop = nullptr);
int cmd_stats(const std::filesystem::path& config, std::ostream& out);
int cmd_export_updates(const std::filesystem::path& config, const std::string& id,
                       const std::filesystem::path& out_dir, const std::optional<std::filesystem::path>& since);

/// Sets the log level: 0 warnings, 1 info, 2 debug.
void set_verbosity(int level);

}  // namespace irap::cli
