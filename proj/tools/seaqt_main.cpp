#include <CLI11.hpp>
#include <iostream>

#include "seaqt/io.hpp"

namespace {

seaqt::RunConfig load_config(const std::string& config_path, const std::string& scenario,
                             const std::string& out_dir, bool backward, long long seed,
                             const std::string& threads) {
  seaqt::RunConfig cfg;
  if (!config_path.empty()) cfg = seaqt::RunConfig::from_file(config_path);
  if (!scenario.empty()) cfg.scenario = scenario;
  if (!out_dir.empty()) cfg.output_dir = out_dir;
  if (backward) cfg.backward = true;
  if (seed >= 0) cfg.seed = static_cast<std::uint64_t>(seed);
  if (!threads.empty()) cfg.threads = threads;
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"seaqt: steepest-entropy-ascent quantum thermodynamics toolkit"};
  app.require_subcommand(1);

  std::string config_path, scenario, out_dir, threads;
  bool backward = false;
  long long seed = -1;

  auto add_common = [&](CLI::App* cmd, bool with_backward) {
    cmd->add_option("--config", config_path, "run configuration file (flat key = value)");
    cmd->add_option("--scenario", scenario, "named scenario (see scenario-list)");
    cmd->add_option("--out", out_dir, "output directory");
    cmd->add_option("--seed", seed, "random seed override");
    cmd->add_option("--threads", threads, "auto|serial|N");
    if (with_backward) {
      cmd->add_flag("--backward", backward, "integrate backward from the anchor state");
    }
  };

  CLI::App* sim = app.add_subcommand("simulate", "integrate a scenario and write trajectory/report files");
  add_common(sim, true);
  CLI::App* verify = app.add_subcommand("verify", "run the inequality suite over a random state corpus");
  add_common(verify, false);
  CLI::App* contrast = app.add_subcommand("contrast", "Pauli master equation vs SEA repopulation contrast");
  add_common(contrast, false);
  app.add_subcommand("scenario-list", "list named scenarios");

  CLI11_PARSE(app, argc, argv);

  try {
    if (app.got_subcommand("scenario-list")) {
      for (const auto& name : seaqt::scenario_names()) std::cout << name << "\n";
      return seaqt::kExitOk;
    }
    const seaqt::RunConfig cfg = load_config(config_path, scenario, out_dir, backward, seed, threads);
    if (app.got_subcommand("simulate")) return seaqt::cmd_simulate(cfg);
    if (app.got_subcommand("verify")) return seaqt::cmd_verify(cfg);
    if (app.got_subcommand("contrast")) return seaqt::cmd_contrast(cfg);
  } catch (const seaqt::ConfigError& err) {
    std::cerr << "config error: " << err.what() << "\n";
    return seaqt::kExitConfigError;
  } catch (const seaqt::ValidationError& err) {
    std::cerr << "validation error: " << err.what() << "\n";
    return seaqt::kExitConfigError;
  } catch (const seaqt::IntegrationError& err) {
    std::cerr << "numerical failure: " << err.what() << " (last good time "
              << seaqt::format_double(err.last_good_time()) << ")\n";
    return seaqt::kExitNumericalError;
  } catch (const std::exception& err) {
    std::cerr << "error: " << err.what() << "\n";
    return seaqt::kExitConfigError;
  }
  return seaqt::kExitOk;
}
