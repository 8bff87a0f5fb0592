#include <CLI11.hpp>
#include <spdlog/spdlog.h>

#include <atomic>
#include <csignal>
#include <cstdlib>
#include <iostream>

#include "irap/cli.hpp"
#include "irap/fault.hpp"

namespace {

std::atomic<bool> g_stop{false};

extern "C" void on_signal(int) { g_stop.store(true); }

}  // namespace

int main(int argc, char** argv) {
  using namespace irap;
  namespace fs = std::filesystem;

  CLI::App app{"Interest-based RDF update propagation"};
  app.require_subcommand(1);
  fs::path config = "irap.json";
  int verbosity = 1;
  app.add_option("-c,--config", config, "Configuration file")->envname("IRAP_CONFIG");
  app.add_flag_callback("-q,--quiet", [&] { verbosity = 0; }, "Warnings and errors only");
  app.add_flag_callback("-v,--verbose", [&] { verbosity = 2; }, "Debug output");

  auto* reg = app.add_subcommand("register", "Validate and register an interest expression");
  fs::path interest_file;
  cli::RegisterOptions reg_options;
  reg->add_option("file", interest_file, "Interest expression file")->required()->check(CLI::ExistingFile);
  reg->add_option("--id", reg_options.id, "Interest id (default: file stem)");
  reg->add_option("--target", reg_options.target, "Target store directory or IRI");
  reg->add_option("--export-dir", reg_options.export_dir, "Write an update document per changeset here");

  auto* init = app.add_subcommand("init-slice", "Initialise a target store from a dump");
  std::string init_id;
  fs::path dump;
  std::string sequence;
  init->add_option("-i,--interest", init_id, "Interest id")->required();
  init->add_option("dump", dump, "N-Triples dump (.nt or .nt.gz)")->required();
  init->add_option("--sequence", sequence, "Sequence key of the dump, YYYY-MM-DD-HH-NNNNNN");

  auto* run = app.add_subcommand("run", "Propagate pending changesets");
  bool once = false;
  bool daemon = false;
  auto* once_flag = run->add_flag("--once", once, "Process pending changesets and exit");
  run->add_flag("--daemon", daemon, "Poll for changesets until interrupted")->excludes(once_flag);

  auto* stats = app.add_subcommand("stats", "Print cumulative per-interest counts");

  auto* exp = app.add_subcommand("export-updates", "Export the stores of an interest");
  std::string exp_id;
  fs::path out_dir;
  fs::path since;
  exp->add_option("-i,--interest", exp_id, "Interest id")->required();
  exp->add_option("-o,--out", out_dir, "Output directory")->required();
  exp->add_option("--since", since, "Earlier target snapshot; writes update.ru bringing it up to date");

  CLI11_PARSE(app, argc, argv);
  cli::set_verbosity(verbosity);

  if (const char* crash = std::getenv("IRAP_CRASH_AT"); crash && *crash) fault::set_hook(fault::exit_at(crash));

  if (reg->parsed()) return cli::cmd_register(config, interest_file, reg_options);
  if (init->parsed()) {
    return cli::cmd_init_slice(config, init_id, dump, sequence.empty() ? std::nullopt : std::optional(sequence));
  }
  if (run->parsed()) {
    if (!once && !daemon) {
      std::cerr << "run: one of --once or --daemon is required\n";
      return 2;
    }
    std::signal(SIGINT, on_signal);
    std::signal(SIGTERM, on_signal);
    return cli::cmd_run(config, once ? cli::RunMode::kOnce : cli::RunMode::kDaemon, std::cout, &g_stop);
  }
  if (stats->parsed()) return cli::cmd_stats(config, std::cout);
  if (exp->parsed()) {
    return cli::cmd_export_updates(config, exp_id, out_dir, since.empty() ? std::nullopt : std::optional(since));
  }
  return 2;
}
