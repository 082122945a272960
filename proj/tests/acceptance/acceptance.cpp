// Acceptance suite: one PASS/FAIL line per criterion, run against the
// shipped config and calibration file.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "cavreg/array_prep.hpp"
#include "cavreg/assignment.hpp"
#include "cavreg/cavity_model.hpp"
#include "cavreg/config.hpp"
#include "cavreg/error.hpp"
#include "cavreg/multiplex.hpp"
#include "cavreg/seeding.hpp"
#include "cavreg/tomography.hpp"
#include "cavreg/units.hpp"

namespace fs = std::filesystem;
using namespace cavreg;

namespace {

struct Outcome {
  bool passed;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

bool within(double v, double centre, double tol) { return std::abs(v - centre) <= tol; }

const ExperimentConfig& config() {
  static const ExperimentConfig cfg = load_config(fs::path(CAVREG_CONFIG_DIR) / "default.json");
  return cfg;
}

Outcome intrinsic_probability() {
  const double p = intrinsic_photon_probability(config().cavity, config().cavity.g0);
  return {within(p, 0.708, 0.005), fmt("P = %.5f", p)};
}

Outcome expected_efficiency() {
  const auto& cav = config().cavity;
  const double a = detection_efficiency_at(cav, 0.512, AtomPosition{});
  const double b = detection_efficiency_at(cav, 0.486, AtomPosition{});
  return {within(a, 0.36, 0.01) && within(b, 0.344, 0.005),
          fmt("eta(xi=0.512) = %.5f, eta(xi=0.486) = %.5f", a, b)};
}

Outcome chirp_fidelity() {
  const double w = config().budget.larmor_frequency;
  const double tau = 1.25 * units::us;
  const double uniform = 0.5 * (1.0 + chirp_visibility(PhotonEnvelope::uniform(tau), w));
  const double x = w * tau;  // pi/4
  const double analytic = 0.5 * (1.0 + std::sin(x) / x);
  const double preset =
      0.5 * (1.0 + chirp_visibility(config().calibrated_envelope(), w));
  return {std::abs(uniform - analytic) <= 1e-6 && within(preset, 0.962, 0.002),
          fmt("uniform %.8f vs analytic %.8f, calibrated preset %.5f", uniform, analytic, preset)};
}

Outcome single_atom_fidelity() {
  const auto& cfg = config();
  const double f = fidelity_with_bell(apply_error_channels(
      ideal_bell_state(), cfg.calibrated_budget(), cfg.calibrated_envelope(), SequenceSlot{0, 1}));
  return {within(f, 0.866, 0.015), fmt("F = %.5f", f)};
}

// The ~96% figure is quoted to the whole percent; its unrounded value under
// the same decay model is 0.964, which is what the 0.3 pp band is taken around.
Outcome coherence_scaling() {
  const double t = 99.0 * 15.0 * units::us;
  const double f20 = coherence_fidelity(t, 20 * units::ms);
  const double f100 = coherence_fidelity(t, 100 * units::ms);
  const bool rounds_to_96 = std::lround(f20 * 100.0) == 96;
  const bool ok = rounds_to_96 && within(f20, 0.964, 0.003) && within(f100, 0.992, 0.003);
  return {ok, fmt("F(T2=20ms) = %.5f (%.2f pp from 0.96), F(T2=100ms) = %.5f", f20,
                  100.0 * (f20 - 0.96), f100)};
}

Outcome tomography_consistency_check() {
  std::vector<TwoQubitState> states;
  for (std::uint64_t k = 0; k < 100; ++k) {
    Rng rng = make_rng(config().master_seed, "acceptance-states", k);
    states.push_back(random_physical_state(rng));
  }
  const auto cases =
      tomography_consistency(states, 3000, config().calibrated_envelope(), config().master_seed);
  std::size_t good = 0;
  double worst = 0.0;
  for (const auto& c : cases) {
    const double z = std::abs(c.estimate.fidelity - c.exact_fidelity) / c.estimate.std_error;
    worst = std::max(worst, z);
    if (z < 4.0) ++good;
  }
  return {good >= 99, fmt("%zu/100 within 4 sigma, worst %.2f sigma", good, worst)};
}

std::vector<double> six_atom_etas() {
  const auto& cfg = config();
  const auto layout = RegisterLayout::centered_row(6, 5.5 * units::um);
  std::vector<double> etas;
  for (const auto& a : layout.atoms)
    etas.push_back(detection_efficiency_at(cfg.cavity, cfg.calibrated_xi(), a.position));
  return etas;
}

Outcome multiplexing() {
  const auto etas = six_atom_etas();
  const double eta = multiplex_efficiency(etas);
  const double ref = multiplex_efficiency_log_reference(etas);
  const double nbar = expected_photon_number(etas);

  const std::size_t attempts = 1'000'000;
  const auto mc = simulate_attempts(etas, attempts, derive_seed(config().master_seed, "acceptance-mc", 0));
  double var = 0.0;
  for (double e : etas) var += e * (1.0 - e);
  const double n_sigma = std::sqrt(var / attempts);
  const double s_sigma = std::sqrt(eta * (1.0 - eta) / attempts);
  const bool mc_ok = std::abs(mc.mean_photons - nbar) <= 3.0 * n_sigma &&
                     std::abs(mc.success_fraction - eta) <= 3.0 * s_sigma;
  const bool ok = within(eta, 0.886, 0.02) && within(nbar, 1.88, 0.1) &&
                  std::abs(eta - ref) <= 1e-15 && mc_ok;
  return {ok, fmt("eta(6) = %.5f, nbar = %.4f, |eta - log ref| = %.1e, MC eta %.5f nbar %.4f", eta,
                  nbar, std::abs(eta - ref), mc.success_fraction, mc.mean_photons)};
}

Outcome fiber_efficiency() {
  const auto& cfg = config();
  const double p = cfg.link.propagation_detection;
  const double xi = cfg.calibrated_xi();
  const double eta1 = detection_efficiency_at(cfg.cavity, xi, AtomPosition{});
  const double f1 = infer_fiber_efficiency(eta1, p, 1).aggregate;
  const double f6 = infer_fiber_efficiency(multiplex_efficiency(six_atom_etas()), p, 6).aggregate;
  return {within(f1, 0.48, 0.03) && within(f6, 0.974, 0.01),
          fmt("p = %.2f, eta_fiber(1) = %.4f, eta_fiber(6) = %.4f", p, f1, f6)};
}

Outcome rearrangement_optimality() {
  const PrepConfig prep = config().calibrated_prep();
  std::size_t planned = 0, optimal = 0, unroutable = 0, draws = 0;
  while (planned < 500) {
    Rng rng = make_rng(config().master_seed, "acceptance-assign", draws++);
    const std::size_t rows = 1 + rng() % 3;
    const std::size_t cols = 6 + rng() % 5;
    auto grid = TweezerGrid::rectangular(rows, cols, 5.5 * units::um, 0.0);
    // Place 1..6 atoms on distinct random sites.
    const std::size_t atoms = 1 + rng() % 6;
    std::size_t placed = 0;
    while (placed < atoms) {
      auto site = rng() % grid.occupancy.size();
      if (!grid.occupancy[site]) {
        grid.occupancy[site] = true;
        ++placed;
      }
    }
    const std::size_t n = 1 + rng() % atoms;
    const auto target = TargetPattern::centered_row(grid, n, rng() % rows);

    std::vector<AtomPosition> pos;
    for (std::size_t i = 0; i < grid.occupancy.size(); ++i)
      if (grid.occupancy[i]) pos.push_back(grid.site_positions[i]);
    std::vector<double> cost(n * pos.size());
    for (std::size_t r = 0; r < n; ++r)
      for (std::size_t c = 0; c < pos.size(); ++c)
        cost[r * pos.size() + c] = distance(target.target_sites[r], pos[c]);

    // Exhaustive minimum over injective maps.
    std::vector<std::size_t> perm(pos.size());
    for (std::size_t i = 0; i < perm.size(); ++i) perm[i] = i;
    double best = INFINITY;
    do {
      double s = 0.0;
      for (std::size_t r = 0; r < n; ++r) s += cost[r * pos.size() + perm[r]];
      best = std::min(best, s);
    } while (std::next_permutation(perm.begin(), perm.end()));

    MovePlan plan;
    try {
      plan = plan_rearrangement(grid, target, prep);
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::unroutable) throw;
      ++unroutable;
      continue;
    }
    ++planned;
    if (std::abs(plan.assignment_cost - best) <= 1e-12 * best) ++optimal;
  }
  return {optimal == planned,
          fmt("%zu/%zu plans optimal (%zu unroutable draws skipped)", optimal, planned, unroutable)};
}

Outcome preparation_statistics() {
  const auto& cfg = config();
  const auto start = std::chrono::steady_clock::now();
  const TweezerGrid grid = cfg.tweezer_grid();
  const PrepConfig prep = cfg.calibrated_prep();
  const std::size_t trials = 100'000;
  const auto two = simulate_preparation(grid, TargetPattern::centered_row(grid, 2), prep, trials,
                                        derive_seed(cfg.master_seed, "acceptance-prep", 2));
  const auto base3 = simulate_baseline(3, prep, trials, derive_seed(cfg.master_seed, "acceptance-base", 3));
  const auto six = improvement_factor(6, grid, prep, trials, derive_seed(cfg.master_seed, "acceptance-prep", 6));
  const double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  const bool ok = within(two.success_probability, 0.90, 0.05) &&
                  within(six.rearranged.success_probability, 0.20, 0.05) &&
                  base3.success_probability < 0.005 && six.ratio >= 1e3 && seconds < 60.0;
  return {ok, fmt("n2 %.4f, n6 %.4f, baseline n3 %.5f, improvement n6 %s%.0f, %.1f s at 1e5 trials",
                  two.success_probability, six.rearranged.success_probability,
                  base3.success_probability, six.lower_bound_only ? ">= " : "", six.ratio, seconds)};
}

Outcome phase_scan_period() {
  const auto& cfg = config();
  const TwoQubitState state = apply_error_channels(
      ideal_bell_state(), cfg.calibrated_budget(), cfg.calibrated_envelope(), SequenceSlot{0, 1});
  const SweepSpec sweep{cfg.phase_scan.t_start, cfg.phase_scan.t_stop, cfg.phase_scan.points};
  const double w = 2.0 * std::numbers::pi * 100e3;
  const auto r = phase_scan(state, sweep.values(), w, cfg.phase_scan.clicks_per_point,
                            derive_seed(cfg.master_seed, "acceptance-phase", 0), Axis::X);
  const double period = r.fit.period() / units::us;
  return {within(period, 5.00, 0.05), fmt("period %.4f us (%zu clicks per point)", period,
                                          cfg.phase_scan.clicks_per_point)};
}

Outcome flat_fidelity() {
  const auto& cfg = config();
  double lo = INFINITY, hi = -INFINITY;
  std::string values;
  for (std::size_t n = 1; n <= 6; ++n) {
    const auto r = register_report(RegisterLayout::centered_row(n, cfg.register_pitch), cfg.cavity,
                                   cfg.calibrated_xi(), cfg.calibrated_budget(),
                                   cfg.calibrated_envelope());
    lo = std::min(lo, r.mean_fidelity);
    hi = std::max(hi, r.mean_fidelity);
    values += fmt(" %.4f", r.mean_fidelity);
  }
  return {hi - lo < 0.015, fmt("spread %.2f pp; mean F for n=1..6:%s", 100.0 * (hi - lo), values.c_str())};
}

std::map<std::string, std::string> snapshot(const fs::path& dir) {
  std::map<std::string, std::string> files;
  for (const auto& e : fs::directory_iterator(dir)) {
    std::ifstream in(e.path(), std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    files[e.path().filename().string()] = ss.str();
  }
  return files;
}

Outcome determinism() {
  const fs::path root = fs::temp_directory_path() / "cavreg_acceptance_determinism";
  fs::remove_all(root);
  const std::string cfg = (fs::path(CAVREG_CONFIG_DIR) / "default.json").string();
  const std::vector<std::pair<std::string, std::string>> runs{
      {"tomography", ""}, {"prepare", "--trials 20000"}, {"multiplex", "--trials 200000"},
      {"phase-scan", ""}};
  std::size_t compared = 0;
  for (const auto& [exp, extra] : runs) {
    std::vector<std::map<std::string, std::string>> outs;
    for (const auto& [tag, threads] :
         {std::pair{"a", "1"}, std::pair{"b", "1"}, std::pair{"c", "3"}}) {
      const fs::path dir = root / (exp + "_" + tag);
      const std::string cmd = std::string(CAVREG_CLI) + " run " + exp + " --config " + cfg +
                              " --out " + dir.string() + " --threads " + threads + " " + extra +
                              " > /dev/null 2>&1";
      if (std::system(cmd.c_str()) != 0) return {false, "cli run failed: " + exp};
      outs.push_back(snapshot(dir));
    }
    if (outs[0].empty() || outs[0] != outs[1] || outs[0] != outs[2])
      return {false, "outputs differ for " + exp};
    compared += outs[0].size();
  }
  fs::remove_all(root);
  return {true, fmt("%zu files byte-identical across repeat runs and 1 vs 3 workers", compared)};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"intrinsic photon probability", intrinsic_probability},
      {"expected efficiency at mode centre", expected_efficiency},
      {"chirp-only fidelity", chirp_fidelity},
      {"single-atom fidelity", single_atom_fidelity},
      {"coherence scaling to 100 atoms", coherence_scaling},
      {"tomography consistency", tomography_consistency_check},
      {"multiplexed efficiency and photon number", multiplexing},
      {"inferred fiber efficiency", fiber_efficiency},
      {"rearrangement optimality", rearrangement_optimality},
      {"preparation statistics", preparation_statistics},
      {"phase-scan period", phase_scan_period},
      {"flat register fidelity", flat_fidelity},
      {"determinism", determinism},
  };
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("threw: ") + e.what()};
    }
    if (!o.passed) ++failures;
    std::printf("%s [%2zu] %s: %s\n", o.passed ? "PASS" : "FAIL", i + 1, criteria[i].first.c_str(),
                o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria failed\n", failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
