#include "cavreg/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "cavreg/error.hpp"
#include "cavreg/multiplex.hpp"
#include "cavreg/tomography.hpp"
#include "cavreg/units.hpp"

namespace cavreg {

namespace {

using units::um;
using units::us;
using units::km;

std::string num(double v) { return format_number(v); }
std::string num(std::size_t v) { return std::to_string(v); }

constexpr double kInf = std::numeric_limits<double>::infinity();

// Reference values the runs are checked against.
constexpr double kSingleAtomEfficiency = 0.332;
constexpr double kSingleAtomFidelity = 0.866;
constexpr double kSixAtomEfficiency = 0.886;
constexpr double kSixAtomPhotonNumber = 1.88;
constexpr double kFiberEfficiencySingle = 0.48;
constexpr double kFiberEfficiencySix = 0.974;

void add_calibration(RunOutput& out, const ExperimentConfig& cfg) {
  const auto& c = cfg.calibration;
  if (c.per_move_survival) out.add_calibration_value("per_move_survival", *c.per_move_survival);
  if (c.fill_probability) out.add_calibration_value("fill_probability", *c.fill_probability);
  if (c.readout_overhead) out.add_calibration_value("readout_overhead_s", *c.readout_overhead);
  if (c.envelope_rise) out.add_calibration_value("envelope_rise_s", *c.envelope_rise);
  if (c.envelope_decay) out.add_calibration_value("envelope_decay_s", *c.envelope_decay);
  if (c.register_xi) out.add_calibration_value("register_xi", *c.register_xi);
}

TwoQubitState single_atom_state(const ExperimentConfig& cfg) {
  return apply_error_channels(ideal_bell_state(), cfg.calibrated_budget(),
                              cfg.calibrated_envelope(), SequenceSlot{0, 1});
}

void run_prepare(const ExperimentConfig& cfg, RunOutput& out) {
  const TweezerGrid grid = cfg.tweezer_grid();
  const PrepConfig prep = cfg.calibrated_prep();
  const std::uint64_t seed = cfg.master_seed;

  Table stats{{"n", "success_probability", "ci_low", "ci_high", "mean_duration_s",
               "baseline_probability", "improvement_ratio", "improvement_lower_bound_only"},
              {}};
  for (std::size_t n = 1; n <= cfg.max_atoms; ++n) {
    const ImprovementFactor f = improvement_factor(n, grid, prep, cfg.trials, seed);
    const PrepStats& s = f.rearranged;
    stats.add_row({num(n), num(s.success_probability), num(s.confidence.low),
                   num(s.confidence.high), num(s.mean_duration),
                   num(f.baseline.success_probability), num(f.ratio),
                   f.lower_bound_only ? "1" : "0"});
    if (n == 2) out.add_check(make_check("prepare_success_n2", s.success_probability, 0.85, 0.95));
    if (n == 3)
      out.add_check(make_check("baseline_success_n3", f.baseline.success_probability, 0.0, 0.005));
    if (n == 6) {
      out.add_check(make_check("prepare_success_n6", s.success_probability, 0.15, 0.25));
      out.add_check(make_check("improvement_n6", f.ratio, 1e3, kInf));
    }
  }
  out.add_csv("prepare.csv", stats);

  // One example plan for the largest register, from the first loading
  // with enough atoms.
  const TargetPattern target = TargetPattern::centered_row(grid, cfg.max_atoms);
  Table plan{{"from_x_um", "from_y_um", "to_x_um", "to_y_um", "start_time_s", "to_staging"}, {}};
  for (std::uint64_t attempt = 0; attempt < 1000; ++attempt) {
    Rng rng = make_rng(seed, "prepare-plan", attempt);
    const TweezerGrid loaded = load_stochastic(grid, rng);
    if (loaded.occupied_count() < target.target_sites.size()) continue;
    MovePlan p;
    try {
      p = plan_rearrangement(loaded, target, prep);
    } catch (const Error& e) {
      if (e.kind() == ErrorKind::unroutable) continue;
      throw;
    }
    for (const auto& m : p.moves)
      plan.add_row({num(m.from.x / um), num(m.from.y / um), num(m.to.x / um), num(m.to.y / um),
                    num(m.start_time), m.to_staging ? "1" : "0"});
    break;
  }
  out.add_csv("plan.csv", plan);

  const RegisterLayout layout = RegisterLayout::centered_row(cfg.max_atoms, cfg.register_pitch);
  const auto hops = simulate_hopping(layout, cfg.hop_duration, prep, seed);
  Table hop{{"time_s", "atom", "new_y_nm"}, {}};
  for (const auto& h : hops) hop.add_row({num(h.time), num(h.atom_index), num(h.new_position.y / units::nm)});
  out.add_csv("hopping.csv", hop);
  out.add_check(make_check("stale_address_fraction",
                           stale_address_fraction(hops, layout.size(), cfg.hop_duration,
                                                  prep.tracking_rate),
                           0.0, 1.0));
}

void run_entangle(const ExperimentConfig& cfg, RunOutput& out) {
  const ErrorBudget budget = cfg.calibrated_budget();
  const PhotonEnvelope envelope = cfg.calibrated_envelope();
  const TwoQubitState bell = ideal_bell_state();
  const double v = chirp_visibility(envelope, budget.larmor_frequency);

  Table t{{"n", "atom", "storage_time_us", "chirp_visibility", "fidelity"}, {}};
  for (std::size_t n = 1; n <= cfg.max_atoms; ++n)
    for (std::size_t i = 0; i < n; ++i) {
      const SequenceSlot slot{i, n};
      const double f = fidelity_with_bell(apply_error_channels(bell, budget, envelope, slot));
      t.add_row({num(n), num(i), num(storage_time(budget, slot) / us), num(v), num(f)});
    }
  out.add_csv("entangle.csv", t);

  const TwoQubitState state = apply_error_channels(bell, budget, envelope, SequenceSlot{0, 1});
  out.add_text("rho.txt", state.to_text());
  out.add_check(make_check("single_atom_fidelity", fidelity_with_bell(state),
                           kSingleAtomFidelity - 0.015, kSingleAtomFidelity + 0.015));
  out.add_check(make_check("chirp_only_fidelity", 0.5 * (1.0 + v), 0.960, 0.964));
}

void run_tomography(const ExperimentConfig& cfg, RunOutput& out) {
  const TwoQubitState state = single_atom_state(cfg);
  const PhotonEnvelope envelope = cfg.calibrated_envelope();

  std::vector<ClickRecord> clicks;
  for (std::size_t b = 0; b < matched_bases.size(); ++b) {
    auto part = sample_clicks(state, matched_bases[b], 1.0, cfg.clicks_per_basis, envelope,
                              derive_seed(cfg.master_seed, "tomography", 0, b));
    clicks.insert(clicks.end(), part.begin(), part.end());
  }
  std::string body = "atom_index,basis,signal,readout,time_ns,trial_id\n";
  for (const auto& c : clicks) body += to_csv_row(c) + "\n";
  out.add_text("clicks.csv", body);

  const TomographyResult r = estimate(clicks);
  const double exact = fidelity_with_bell(state);
  Table t{{"quantity", "value"}, {}};
  t.add_row({"S_xx", num(r.stokes[0])});
  t.add_row({"S_yy", num(r.stokes[1])});
  t.add_row({"S_zz", num(r.stokes[2])});
  t.add_row({"fidelity_estimate", num(r.fidelity)});
  t.add_row({"std_error", num(r.std_error)});
  t.add_row({"fidelity_exact", num(exact)});
  out.add_csv("tomography.csv", t);
  out.add_text("rho.txt", state.to_text());
  out.add_check(make_check("estimate_within_4_sigma", std::abs(r.fidelity - exact) / r.std_error,
                           0.0, 4.0));
}

void run_scan_x(const ExperimentConfig& cfg, RunOutput& out) {
  const double xi = cfg.calibrated_xi();
  Table t{{"x_um", "coupling_ratio", "eta"}, {}};
  for (double x : cfg.scan_x.values()) {
    const AtomPosition p{x, 0.0};
    t.add_row({num(x / um), num(coupling_at(cfg.cavity, p) / cfg.cavity.g0),
               num(detection_efficiency_at(cfg.cavity, xi, p))});
  }
  out.add_csv("fig3b.csv", t);
  out.add_check(make_check("center_efficiency",
                           detection_efficiency_at(cfg.cavity, xi, AtomPosition{}),
                           kSingleAtomEfficiency - 0.02, kSingleAtomEfficiency + 0.02));
}

void run_scan_distance(const ExperimentConfig& cfg, RunOutput& out) {
  const double xi = cfg.calibrated_xi();
  const ErrorBudget budget = cfg.calibrated_budget();
  const PhotonEnvelope envelope = cfg.calibrated_envelope();
  Table t{{"dx_um", "eta_first", "eta_second", "fidelity_first", "fidelity_second", "mean_fidelity"}, {}};
  double lo = kInf;
  double hi = -kInf;
  for (double dx : cfg.scan_distance.values()) {
    const auto layout = RegisterLayout::from_positions({{-0.5 * dx, 0.0}, {0.5 * dx, 0.0}});
    const RegisterReport r = register_report(layout, cfg.cavity, xi, budget, envelope);
    const auto& e = r.layout.per_atom_efficiency;
    const auto& f = r.layout.per_atom_fidelity;
    t.add_row({num(dx / um), num(e[0]), num(e[1]), num(f[0]), num(f[1]), num(r.mean_fidelity)});
    lo = std::min(lo, r.mean_fidelity);
    hi = std::max(hi, r.mean_fidelity);
  }
  out.add_csv("fig3c.csv", t);
  out.add_check(make_check("fidelity_spread_vs_distance", hi - lo, 0.0, 0.004));
}

void run_phase_scan(const ExperimentConfig& cfg, RunOutput& out) {
  const TwoQubitState state = single_atom_state(cfg);
  const auto& ps = cfg.phase_scan;
  const SweepSpec sweep{ps.t_start, ps.t_stop, ps.points};
  const auto T = sweep.values();
  const double w = cfg.budget.larmor_frequency;
  const auto x = phase_scan(state, T, w, ps.clicks_per_point, derive_seed(cfg.master_seed, "phase-scan-x", 0), Axis::X);
  const auto y = phase_scan(state, T, w, ps.clicks_per_point, derive_seed(cfg.master_seed, "phase-scan-y", 0), Axis::Y);

  Table t{{"T_us", "p_H_given_L", "p_V_given_L", "p_D_given_L", "p_A_given_L"}, {}};
  for (std::size_t k = 0; k < T.size(); ++k)
    t.add_row({num(T[k] / us), num(x.points[k].p_plus_given_L), num(x.points[k].p_minus_given_L),
               num(y.points[k].p_plus_given_L), num(y.points[k].p_minus_given_L)});
  out.add_csv("figS4.csv", t);

  Table fits{{"signal_basis", "period_us", "amplitude", "offset", "T_opt_us", "rms_residual"}, {}};
  for (const auto& [label, r] : {std::pair{"X", &x}, std::pair{"Y", &y}})
    fits.add_row({label, num(r->fit.period() / us), num(r->fit.amplitude), num(r->fit.offset),
                  num(r->T_opt / us), num(r->fit.rms_residual)});
  out.add_csv("phase_scan_fit.csv", fits);

  const double expected = std::numbers::pi / w;
  out.add_check(make_check("phase_scan_period_us", x.fit.period() / us,
                           0.99 * expected / us, 1.01 * expected / us));
}

void run_multiplex(const ExperimentConfig& cfg, RunOutput& out) {
  const double xi = cfg.calibrated_xi();
  const ErrorBudget budget = cfg.calibrated_budget();
  const PhotonEnvelope envelope = cfg.calibrated_envelope();
  const double p = cfg.link.propagation_detection;

  Table fig3a{{"n", "mean_fidelity", "min_fidelity", "max_fidelity"}, {}};
  Table fig5a{{"n", "eta_overall", "eta_fiber", "eta_fiber_per_atom"}, {}};
  Table fig5b{{"n", "mean_photon_number", "mc_photon_number", "mc_success_fraction"}, {}};
  std::vector<std::vector<double>> etas;
  double f_lo = kInf;
  double f_hi = -kInf;
  for (std::size_t n = 1; n <= cfg.max_atoms; ++n) {
    const auto r = register_report(RegisterLayout::centered_row(n, cfg.register_pitch),
                                   cfg.cavity, xi, budget, envelope);
    const auto& fid = r.layout.per_atom_fidelity;
    const auto& eta = r.layout.per_atom_efficiency;
    const auto [mn, mx] = std::minmax_element(fid.begin(), fid.end());
    fig3a.add_row({num(n), num(r.mean_fidelity), num(*mn), num(*mx)});

    const FiberEfficiency fe = infer_fiber_efficiency(r.eta_overall, p, n);
    fig5a.add_row({num(n), num(r.eta_overall), num(fe.aggregate), num(fe.per_atom)});

    const AttemptStats mc = simulate_attempts(eta, cfg.trials, derive_seed(cfg.master_seed, "multiplex", n));
    fig5b.add_row({num(n), num(r.mean_photon_number), num(mc.mean_photons), num(mc.success_fraction)});

    f_lo = std::min(f_lo, r.mean_fidelity);
    f_hi = std::max(f_hi, r.mean_fidelity);
    if (n == 1) {
      out.add_check(make_check("eta_overall_n1", r.eta_overall, kSingleAtomEfficiency - 0.02,
                               kSingleAtomEfficiency + 0.02));
      out.add_check(make_check("eta_fiber_n1", fe.aggregate, kFiberEfficiencySingle - 0.03,
                               kFiberEfficiencySingle + 0.03));
    }
    if (n == 6) {
      out.add_check(make_check("eta_overall_n6", r.eta_overall, kSixAtomEfficiency - 0.02,
                               kSixAtomEfficiency + 0.02));
      out.add_check(make_check("photon_number_n6", r.mean_photon_number,
                               kSixAtomPhotonNumber - 0.1, kSixAtomPhotonNumber + 0.1));
      out.add_check(make_check("eta_fiber_n6", fe.aggregate, kFiberEfficiencySix - 0.01,
                               kFiberEfficiencySix + 0.01));
    }
    etas.push_back(eta);
  }
  out.add_check(make_check("mean_fidelity_spread", f_hi - f_lo, 0.0, 0.015));
  out.add_csv("fig3a.csv", fig3a);
  out.add_csv("fig5a.csv", fig5a);
  out.add_csv("fig5b.csv", fig5b);

  Table rate{{"distance_km", "rate_n1_hz", "rate_nmax_hz"}, {}};
  for (double L : cfg.link_distances) {
    LinkConfig link = cfg.link;
    link.distance = L;
    rate.add_row({num(L / km), num(distribution_rate(link, etas.front())),
                  num(distribution_rate(link, etas.back()))});
  }
  out.add_csv("rate.csv", rate);
}

void run_coherence_scaling(const ExperimentConfig& cfg, RunOutput& out) {
  const double slot = cfg.budget.time_per_atom;
  Table t{{"n", "t_us"}, {}};
  for (double T2 : cfg.coherence_times) t.columns.push_back("F_T2_" + num(T2 / units::ms) + "ms");
  for (std::size_t n = 1; n <= cfg.coherence_max_atoms; ++n) {
    const double time = static_cast<double>(n - 1) * slot;
    std::vector<std::string> row{num(n), num(time / us)};
    for (double T2 : cfg.coherence_times) row.push_back(num(coherence_fidelity(time, T2)));
    t.add_row(row);
  }
  out.add_csv("coherence.csv", t);
  const double t99 = 99.0 * slot;
  out.add_check(make_check("first_atom_fidelity_100_atoms_T2_20ms",
                           coherence_fidelity(t99, 20e-3), 0.961, 0.967));
  out.add_check(make_check("first_atom_fidelity_100_atoms_T2_100ms",
                           coherence_fidelity(t99, 100e-3), 0.989, 0.995));
}

}  // namespace

const std::vector<std::string>& experiment_names() {
  static const std::vector<std::string> names{"prepare",     "entangle",  "tomography",
                                              "scan-x",      "scan-distance", "phase-scan",
                                              "multiplex",   "coherence-scaling"};
  return names;
}

RunOutput run_experiment(const std::string& name, const ExperimentConfig& cfg) {
  RunOutput out(name, cfg.digest(), cfg.master_seed);
  add_calibration(out, cfg);
  if (name == "prepare")
    run_prepare(cfg, out);
  else if (name == "entangle")
    run_entangle(cfg, out);
  else if (name == "tomography")
    run_tomography(cfg, out);
  else if (name == "scan-x")
    run_scan_x(cfg, out);
  else if (name == "scan-distance")
    run_scan_distance(cfg, out);
  else if (name == "phase-scan")
    run_phase_scan(cfg, out);
  else if (name == "multiplex")
    run_multiplex(cfg, out);
  else if (name == "coherence-scaling")
    run_coherence_scaling(cfg, out);
  else
    fail(ErrorKind::invalid_parameters, "unknown experiment: " + name);
  return out;
}

}  // namespace cavreg
