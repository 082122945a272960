// cavreg: run experiments, fit calibration values, validate configs.
//
// Exit status: 0 ok, 1 runtime error, 2 invalid config / missing calibration,
// 3 a run finished but one of its checks failed, 4 stale outputs found.

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "cavreg/calibration.hpp"
#include "cavreg/config.hpp"
#include "cavreg/error.hpp"
#include "cavreg/experiments.hpp"
#include "cavreg/output.hpp"
#include "cavreg/seeding.hpp"

namespace {

constexpr int kRuntimeError = 1;
constexpr int kInvalid = 2;
constexpr int kCheckFailed = 3;
constexpr int kStale = 4;

struct RunArgs {
  std::string experiment;
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out;
  std::optional<std::size_t> trials;
  std::optional<std::size_t> clicks;
  int threads = 0;
};

cavreg::ExperimentConfig load_with_overrides(const RunArgs& a) {
  auto cfg = cavreg::load_config(a.config);
  if (a.seed) cfg.set_seed(*a.seed);
  if (a.trials) cfg.set_trials(*a.trials);
  if (a.clicks) cfg.set_clicks(*a.clicks);
  return cfg;
}

std::filesystem::path output_dir(const std::string& flag) {
  if (!flag.empty()) return flag;
  if (const char* env = std::getenv("CAVREG_OUT_DIR"); env && *env) return env;
  cavreg::fail(cavreg::ErrorKind::config_invalid,
               "no output directory: pass --out or set CAVREG_OUT_DIR");
}

int cmd_run(const RunArgs& a) {
  if (a.threads > 0) cavreg::set_worker_count(a.threads);
  const auto cfg = load_with_overrides(a);
  const auto dir = output_dir(a.out);
  const auto result = cavreg::run_experiment(a.experiment, cfg);
  for (const auto& path : result.write(dir)) std::cout << "wrote " << path.string() << "\n";
  for (const auto& c : result.checks())
    std::printf("%s %s = %.6g (expected [%.6g, %.6g])\n", c.passed ? "PASS" : "FAIL",
                c.name.c_str(), c.value, c.low, c.high);
  return result.all_checks_passed() ? 0 : kCheckFailed;
}

int cmd_validate(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    std::cerr << "cannot read " << path << "\n";
    return kInvalid;
  }
  std::stringstream buf;
  buf << in.rdbuf();
  const auto result = cavreg::validate_config(buf.str(), std::filesystem::path(path).parent_path());
  if (!result.config) {
    for (const auto& e : result.errors) std::cerr << path << ": " << e << "\n";
    return kInvalid;
  }
  std::cout << path << ": ok (digest " << result.config->digest() << ")\n";
  return 0;
}

int cmd_calibrate(const std::string& target, const RunArgs& a) {
  using namespace cavreg;
  if (a.threads > 0) set_worker_count(a.threads);
  const auto cfg = load_with_overrides(a);
  Calibration cal = cfg.calibration;
  const CalibrationTargets targets;
  const bool all = target == "all";
  bool known = all;

  if (all || target == "efficiency") {
    known = true;
    cal.register_xi = calibrate_register_xi(cfg.cavity, targets.single_atom_efficiency);
    std::printf("register_xi = %.6f\n", *cal.register_xi);
  }
  if (all || target == "envelope") {
    known = true;
    const auto fit = calibrate_envelope(cfg.budget.larmor_frequency, cfg.detection_window,
                                        targets.chirp_fidelity, targets.window_acceptance);
    cal.envelope_rise = fit.rise;
    cal.envelope_decay = fit.decay;
    std::printf("envelope rise = %.6g s, decay = %.6g s (chirp fidelity %.5f, acceptance %.5f)\n",
                fit.rise, fit.decay, fit.chirp_fidelity, fit.acceptance);
  }
  if (all || target == "readout-overhead") {
    known = true;
    const auto envelope = PhotonEnvelope::front_peaked(
        require_calibrated(cal.envelope_rise, "envelope_rise_s"),
        require_calibrated(cal.envelope_decay, "envelope_decay_s"), cfg.detection_window);
    CalibrationTargets t = targets;
    t.max_register = cfg.max_atoms;
    t.register_pitch = cfg.register_pitch;
    cal.readout_overhead = calibrate_readout_overhead(cfg.cavity, cfg.budget, envelope, t);
    std::printf("readout_overhead = %.6g s\n", *cal.readout_overhead);
  }
  if (all || target == "preparation") {
    known = true;
    const auto grid = TweezerGrid::rectangular(cfg.grid.rows, cfg.grid.cols, cfg.grid.spacing, 0.5);
    const auto fit = calibrate_preparation(grid, cfg.prep, targets, cfg.master_seed);
    cal.fill_probability = fit.fill_probability;
    cal.per_move_survival = fit.per_move_survival;
    std::printf("fill_probability = %.6f, per_move_survival = %.6f (success %.4f / %.4f)\n",
                fit.fill_probability, fit.per_move_survival, fit.success_small,
                fit.success_large);
  }
  if (!known)
    fail(ErrorKind::invalid_parameters,
         "unknown calibration target " + target +
             " (efficiency, envelope, readout-overhead, preparation, all)");
  cal.save(cfg.calibration_file);
  std::cout << "wrote " << cfg.calibration_file.string() << "\n";
  return 0;
}

int cmd_check(const RunArgs& a) {
  const auto cfg = load_with_overrides(a);
  const auto dir = output_dir(a.out);
  const auto stale = cavreg::find_stale_outputs(dir, cfg.digest());
  for (const auto& s : stale)
    std::cout << "stale " << s.path.string() << " (digest "
              << (s.recorded_digest.empty() ? "missing" : s.recorded_digest) << ")\n";
  if (stale.empty()) std::cout << dir.string() << ": up to date\n";
  return stale.empty() ? 0 : kStale;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Cavity-coupled atom register simulator"};
  app.require_subcommand(1);

  RunArgs run_args;
  auto* run = app.add_subcommand("run", "Run one experiment and write its tables");
  run->add_option("experiment", run_args.experiment, "Experiment name")
      ->required()
      ->check(CLI::IsMember(cavreg::experiment_names()));
  run->add_option("--config", run_args.config, "Config file")->required();
  run->add_option("--seed", run_args.seed, "Master seed (overrides the config)");
  run->add_option("--out", run_args.out, "Output directory (else $CAVREG_OUT_DIR)");
  run->add_option("--trials", run_args.trials, "Monte-Carlo trials");
  run->add_option("--clicks", run_args.clicks, "Clicks per tomography basis");
  run->add_option("--threads", run_args.threads, "OpenMP worker count");

  std::string target;
  RunArgs cal_args;
  auto* calibrate = app.add_subcommand("calibrate", "Fit calibration values into the calibration file");
  calibrate->add_option("target", target, "efficiency | envelope | readout-overhead | preparation | all")
      ->required();
  calibrate->add_option("--config", cal_args.config, "Config file")->default_val("config/default.json");
  calibrate->add_option("--seed", cal_args.seed, "Master seed for Monte-Carlo fits");
  calibrate->add_option("--threads", cal_args.threads, "OpenMP worker count");

  std::string validate_path;
  auto* validate = app.add_subcommand("validate", "Check a config file and report every problem");
  validate->add_option("--config", validate_path, "Config file")->required();

  RunArgs check_args;
  auto* check = app.add_subcommand("check", "Flag output files written under a different config");
  check->add_option("--config", check_args.config, "Config file")->required();
  check->add_option("--out", check_args.out, "Output directory (else $CAVREG_OUT_DIR)");
  check->add_option("--seed", check_args.seed, "Seed used for the run");
  check->add_option("--trials", check_args.trials, "Trials used for the run");
  check->add_option("--clicks", check_args.clicks, "Clicks used for the run");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) return cmd_run(run_args);
    if (*calibrate) return cmd_calibrate(target, cal_args);
    if (*validate) return cmd_validate(validate_path);
    if (*check) return cmd_check(check_args);
  } catch (const cavreg::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    switch (e.kind()) {
      case cavreg::ErrorKind::config_invalid:
      case cavreg::ErrorKind::calibration_missing:
      case cavreg::ErrorKind::invalid_parameters:
        return kInvalid;
      default:
        return kRuntimeError;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kRuntimeError;
  }
  return 0;
}
