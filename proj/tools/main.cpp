#include <iostream>

#include <CLI11.hpp>
#include <json.hpp>

#include "ea/parallel.hpp"
#include "experiments.hpp"

namespace {

void error_record(const std::string& kind, const std::string& message) {
  nlohmann::json j = {{"error", kind}, {"message", message}};
  std::cerr << j.dump() << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  using namespace eatool;
  CLI::App app{"Exact ground states and spectral experiments for the 2D Edwards-Anderson model"};
  app.require_subcommand(1);
  app.set_version_flag("--version", tool_version());

  std::string config_path;
  std::string seed;
  std::string out_dir;
  int threads = ea::default_threads();
  std::string metadata_path;

  for (const auto& name : experiment_names()) {
    CLI::App* sub = app.add_subcommand(name, "run the " + name + " experiment");
    sub->add_option("--config", config_path, "flat key = value config file");
    sub->add_option("--seed", seed, "master seed (u64, decimal)");
    sub->add_option("--out", out_dir, "output directory");
    sub->add_option("--threads", threads, "worker threads")->check(CLI::PositiveNumber);
  }
  CLI::App* rep = app.add_subcommand("replay", "re-run a recorded experiment and compare");
  rep->add_option("metadata", metadata_path, "metadata.json of a previous run")->required();
  rep->add_option("--seed", seed, "override the recorded seed");
  rep->add_option("--out", out_dir, "directory for the replayed artifacts");
  rep->add_option("--threads", threads, "worker threads")->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (rep->parsed()) return replay(metadata_path, out_dir, threads, seed);

    RunContext ctx;
    ctx.experiment = app.get_subcommands().front()->get_name();
    if (!config_path.empty()) ctx.cfg = Config::load(config_path);
    if (!seed.empty()) ctx.cfg.set("seed", seed);
    if (out_dir.empty()) out_dir = ctx.cfg.has("out") ? ctx.cfg.raw().at("out") : "out";
    if (ctx.cfg.has("threads") && threads == ea::default_threads()) {
      threads = std::stoi(ctx.cfg.raw().at("threads"));
      if (threads < 1) throw ConfigError("threads must be positive");
    }
    ctx.out = out_dir;
    ctx.threads = threads;
    // out and threads never reach the artifacts.
    Config echo = ctx.cfg;
    ctx.cfg = Config();
    for (const auto& [k, v] : echo.raw()) {
      if (k != "out" && k != "threads") ctx.cfg.set(k, v);
    }
    const int status = run_experiment(ctx);
    for (const auto& key : ctx.cfg.unused()) {
      std::cerr << "warning: config key '" << key << "' was not used\n";
    }
    return status;
  } catch (const ConfigError& e) {
    error_record("config", e.what());
    return kExitConfig;
  } catch (const IoError& e) {
    error_record("io", e.what());
    return kExitIo;
  } catch (const std::invalid_argument& e) {
    error_record("config", e.what());
    return kExitConfig;
  } catch (const std::exception& e) {
    error_record("internal", e.what());
    return 1;
  }
}
