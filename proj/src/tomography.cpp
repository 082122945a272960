#include "cavreg/tomography.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdio>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>

#include "cavreg/error.hpp"

namespace cavreg {

namespace {

using cd = std::complex<double>;
using Vector2c = Eigen::Vector2cd;

const double kHalfRoot = 1.0 / std::sqrt(2.0);

// Eigenvectors in (up, down).
Vector2c atom_eigenvector(Axis axis, bool plus) {
  const cd s = plus ? 1.0 : -1.0;
  switch (axis) {
    case Axis::X: return Vector2c(kHalfRoot, s * kHalfRoot);
    case Axis::Y: return Vector2c(kHalfRoot, s * cd(0.0, kHalfRoot));
    case Axis::Z: return plus ? Vector2c(1.0, 0.0) : Vector2c(0.0, 1.0);
  }
  return {};
}

// Eigenvectors in (R, L): X+ = H, Y+ = D = (R - iL)/sqrt2, Z+ = L.
Vector2c photon_eigenvector(Axis axis, bool plus) {
  const cd s = plus ? 1.0 : -1.0;
  switch (axis) {
    case Axis::X: return Vector2c(kHalfRoot, s * kHalfRoot);
    case Axis::Y: return Vector2c(kHalfRoot, -s * cd(0.0, kHalfRoot));
    case Axis::Z: return plus ? Vector2c(0.0, 1.0) : Vector2c(1.0, 0.0);
  }
  return {};
}

Vector4c product_state(const Vector2c& atom, const Vector2c& photon) {
  Vector4c v;
  v << atom(0) * photon(0), atom(0) * photon(1), atom(1) * photon(0), atom(1) * photon(1);
  return v;
}

double expectation(const Matrix4c& rho, const Vector4c& v) {
  return std::max(0.0, (v.adjoint() * rho * v)(0, 0).real());
}

JointProbabilities born(const Matrix4c& rho, const Vector2c& atom_plus, const Vector2c& atom_minus,
                        const Vector2c& photon_plus, const Vector2c& photon_minus) {
  JointProbabilities p{expectation(rho, product_state(atom_plus, photon_plus)),
                       expectation(rho, product_state(atom_plus, photon_minus)),
                       expectation(rho, product_state(atom_minus, photon_plus)),
                       expectation(rho, product_state(atom_minus, photon_minus))};
  const double total = p[0] + p[1] + p[2] + p[3];
  for (double& x : p) x /= total;
  return p;
}

char axis_char(Axis a) { return a == Axis::X ? 'X' : a == Axis::Y ? 'Y' : 'Z'; }

std::size_t basis_slot(const BasisPair& b) { return static_cast<std::size_t>(b.photon); }

}  // namespace

std::string BasisPair::label() const { return {axis_char(photon), axis_char(atom)}; }

std::optional<BasisPair> BasisPair::parse(const std::string& label) {
  if (label.size() != 2) return std::nullopt;
  auto axis = [](char c) -> std::optional<Axis> {
    switch (c) {
      case 'X': return Axis::X;
      case 'Y': return Axis::Y;
      case 'Z': return Axis::Z;
      default: return std::nullopt;
    }
  };
  auto p = axis(label[0]);
  auto a = axis(label[1]);
  if (!p || !a) return std::nullopt;
  return BasisPair{*p, *a};
}

char photon_label(Axis axis, bool plus) noexcept {
  switch (axis) {
    case Axis::X: return plus ? 'H' : 'V';
    case Axis::Y: return plus ? 'D' : 'A';
    case Axis::Z: return plus ? 'L' : 'R';
  }
  return '?';
}

char readout_label(bool atom_plus) noexcept { return atom_plus ? 'L' : 'R'; }

JointProbabilities joint_probabilities(const TwoQubitState& state, BasisPair basis) {
  if (!basis.matched())
    fail(ErrorKind::unmatched_basis, "basis " + basis.label() + " is not a matched pair");
  return born(state.rho(), atom_eigenvector(basis.atom, true), atom_eigenvector(basis.atom, false),
              photon_eigenvector(basis.photon, true), photon_eigenvector(basis.photon, false));
}

double correlation(const JointProbabilities& p) noexcept { return p[0] - p[1] - p[2] + p[3]; }

std::vector<ClickRecord> sample_clicks(const TwoQubitState& state, BasisPair basis,
                                       double efficiency, std::size_t attempts,
                                       const PhotonEnvelope& envelope, std::uint64_t seed,
                                       std::size_t atom_index) {
  if (!(efficiency >= 0.0 && efficiency <= 1.0))
    fail(ErrorKind::invalid_parameters, "efficiency must be in [0,1]");
  envelope.validate();
  const JointProbabilities p = joint_probabilities(state, basis);

  Rng rng(seed);
  std::bernoulli_distribution click(efficiency);
  std::discrete_distribution<int> outcome(p.begin(), p.end());
  std::piecewise_linear_distribution<double> when(envelope.times.begin(), envelope.times.end(),
                                                  envelope.density.begin());
  std::vector<ClickRecord> out;
  for (std::size_t k = 0; k < attempts; ++k) {
    if (!click(rng)) continue;
    const int o = outcome(rng);
    ClickRecord r;
    r.atom_index = atom_index;
    r.basis = basis;
    r.readout_plus = o < 2;
    r.signal_plus = (o % 2) == 0;
    r.detection_time = std::clamp(when(rng), 0.0, envelope.window);
    r.trial_id = k;
    out.push_back(r);
  }
  return out;
}

double fidelity_from_stokes(const std::array<double, 3>& s) noexcept {
  return 0.25 * (1.0 + s[0] + s[1] - s[2]);
}

TomographyResult estimate(const std::vector<ClickRecord>& records) {
  std::array<std::array<std::size_t, 4>, 3> counts{};
  for (const auto& r : records) {
    if (!r.basis.matched())
      fail(ErrorKind::unmatched_basis, "record in unmatched basis " + r.basis.label());
    const std::size_t cell = (r.readout_plus ? 0 : 2) + (r.signal_plus ? 0 : 1);
    ++counts[basis_slot(r.basis)][cell];
  }

  TomographyResult out;
  double variance = 0.0;
  for (std::size_t b = 0; b < 3; ++b) {
    const auto& c = counts[b];
    const std::size_t n = c[0] + c[1] + c[2] + c[3];
    if (n == 0)
      fail(ErrorKind::missing_basis, "no clicks in basis " + matched_bases[b].label());
    const double nn = static_cast<double>(n);
    JointProbabilities p{};
    double var_s = 0.0;
    for (std::size_t k = 0; k < 4; ++k) {
      p[k] = static_cast<double>(c[k]) / nn;
      var_s += p[k] * (1.0 - p[k]) / nn;
    }
    out.stokes[b] = correlation(p);
    out.clicks_per_basis[b] = n;
    variance += var_s;
  }
  out.fidelity = fidelity_from_stokes(out.stokes);
  out.std_error = 0.25 * std::sqrt(variance);
  return out;
}

std::string to_csv_row(const ClickRecord& r) {
  char time_ns[32];
  std::snprintf(time_ns, sizeof time_ns, "%.3f", r.detection_time * 1e9);
  std::string row = std::to_string(r.atom_index);
  row += ',';
  row += r.basis.label();
  row += ',';
  row += photon_label(r.basis.photon, r.signal_plus);
  row += ',';
  row += readout_label(r.readout_plus);
  row += ',';
  row += time_ns;
  row += ',';
  row += std::to_string(r.trial_id);
  return row;
}

ClickRecord parse_csv_row(const std::string& row) {
  std::vector<std::string> f;
  std::stringstream ss(row);
  for (std::string item; std::getline(ss, item, ',');) f.push_back(item);
  if (f.size() != 6) fail(ErrorKind::io, "click row needs 6 fields: " + row);
  ClickRecord r;
  try {
    r.atom_index = std::stoull(f[0]);
    auto basis = BasisPair::parse(f[1]);
    if (!basis) fail(ErrorKind::io, "bad basis in click row: " + row);
    r.basis = *basis;
    if (f[2].size() != 1 || f[3].size() != 1) fail(ErrorKind::io, "bad outcome in click row: " + row);
    if (f[2][0] == photon_label(r.basis.photon, true))
      r.signal_plus = true;
    else if (f[2][0] == photon_label(r.basis.photon, false))
      r.signal_plus = false;
    else
      fail(ErrorKind::io, "signal label does not match basis: " + row);
    if (f[3][0] != 'L' && f[3][0] != 'R') fail(ErrorKind::io, "readout must be L or R: " + row);
    r.readout_plus = f[3][0] == 'L';
    r.detection_time = std::stod(f[4]) * 1e-9;
    r.trial_id = std::stoull(f[5]);
  } catch (const std::logic_error&) {
    fail(ErrorKind::io, "unparsable click row: " + row);
  }
  return r;
}

namespace {

template <bool Parallel>
std::vector<ConsistencyCase> consistency_impl(const std::vector<TwoQubitState>& states,
                                              std::size_t clicks_per_basis,
                                              const PhotonEnvelope& envelope, std::uint64_t seed) {
  envelope.validate();
  std::vector<ConsistencyCase> out(states.size());
  const auto n = static_cast<std::int64_t>(states.size());
  auto one = [&](std::int64_t s) {
    const auto idx = static_cast<std::size_t>(s);
    std::vector<ClickRecord> clicks;
    for (std::size_t b = 0; b < matched_bases.size(); ++b) {
      auto part = sample_clicks(states[idx], matched_bases[b], 1.0, clicks_per_basis, envelope,
                                derive_seed(seed, "tomography", idx, b), idx);
      clicks.insert(clicks.end(), part.begin(), part.end());
    }
    out[idx] = {fidelity_with_bell(states[idx]), estimate(clicks)};
  };
  if constexpr (Parallel) {
#pragma omp parallel for schedule(dynamic, 1)
    for (std::int64_t s = 0; s < n; ++s) one(s);
  } else {
    for (std::int64_t s = 0; s < n; ++s) one(s);
  }
  return out;
}

}  // namespace

std::vector<ConsistencyCase> tomography_consistency(const std::vector<TwoQubitState>& states,
                                                    std::size_t clicks_per_basis,
                                                    const PhotonEnvelope& envelope,
                                                    std::uint64_t seed) {
  return consistency_impl<true>(states, clicks_per_basis, envelope, seed);
}

namespace serial {
std::vector<ConsistencyCase> tomography_consistency(const std::vector<TwoQubitState>& states,
                                                    std::size_t clicks_per_basis,
                                                    const PhotonEnvelope& envelope,
                                                    std::uint64_t seed) {
  return consistency_impl<false>(states, clicks_per_basis, envelope, seed);
}
}  // namespace serial

double SinusoidFit::period() const { return 2.0 * std::numbers::pi / angular_frequency; }

namespace {

struct LinearFit {
  Eigen::Vector3d coeffs;
  double ss;
};

LinearFit fit_at(double w, const std::vector<double>& t, const std::vector<double>& y) {
  const auto n = static_cast<Eigen::Index>(t.size());
  Eigen::MatrixXd a(n, 3);
  Eigen::VectorXd b(n);
  for (Eigen::Index k = 0; k < n; ++k) {
    const auto i = static_cast<std::size_t>(k);
    a(k, 0) = 1.0;
    a(k, 1) = std::cos(w * t[i]);
    a(k, 2) = std::sin(w * t[i]);
    b(k) = y[i];
  }
  LinearFit f;
  f.coeffs = a.colPivHouseholderQr().solve(b);
  f.ss = (a * f.coeffs - b).squaredNorm();
  return f;
}

}  // namespace

SinusoidFit fit_sinusoid(const std::vector<double>& t, const std::vector<double>& y) {
  if (t.size() != y.size() || t.size() < 4)
    fail(ErrorKind::degenerate_fit, "sinusoid fit needs >= 4 points");
  std::vector<double> sorted = t;
  std::sort(sorted.begin(), sorted.end());
  const double span = sorted.back() - sorted.front();
  double step = std::numeric_limits<double>::infinity();
  for (std::size_t k = 1; k < sorted.size(); ++k)
    if (sorted[k] > sorted[k - 1]) step = std::min(step, sorted[k] - sorted[k - 1]);
  if (!(span > 0.0) || !std::isfinite(step)) fail(ErrorKind::degenerate_fit, "T values must vary");

  // Periods from twice the span down to the Nyquist limit.
  const double w_lo = std::numbers::pi / span;
  const double w_hi = std::numbers::pi / step;
  constexpr int grid = 2048;
  int best = 0;
  double best_ss = std::numeric_limits<double>::infinity();
  auto w_at = [&](int k) { return w_lo + (w_hi - w_lo) * k / (grid - 1); };
  for (int k = 0; k < grid; ++k) {
    const double ss = fit_at(w_at(k), t, y).ss;
    if (ss < best_ss) {
      best_ss = ss;
      best = k;
    }
  }

  // Golden-section refinement around the best grid cell.
  double lo = w_at(std::max(0, best - 1));
  double hi = w_at(std::min(grid - 1, best + 1));
  const double g = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = hi - g * (hi - lo);
  double d = lo + g * (hi - lo);
  double fc = fit_at(c, t, y).ss;
  double fd = fit_at(d, t, y).ss;
  for (int it = 0; it < 200 && (hi - lo) > 1e-13 * hi; ++it) {
    if (fc < fd) {
      hi = d;
      d = c;
      fd = fc;
      c = hi - g * (hi - lo);
      fc = fit_at(c, t, y).ss;
    } else {
      lo = c;
      c = d;
      fc = fd;
      d = lo + g * (hi - lo);
      fd = fit_at(d, t, y).ss;
    }
  }
  const double w = 0.5 * (lo + hi);
  const LinearFit f = fit_at(w, t, y);

  SinusoidFit out;
  out.angular_frequency = w;
  out.offset = f.coeffs(0);
  out.amplitude = std::hypot(f.coeffs(1), f.coeffs(2));
  out.phase = std::atan2(f.coeffs(2), f.coeffs(1));
  out.rms_residual = std::sqrt(f.ss / static_cast<double>(t.size()));
  return out;
}

PhaseScanResult phase_scan(const TwoQubitState& state, const std::vector<double>& T_range,
                           double omega_L, std::size_t clicks_per_point, std::uint64_t seed,
                           Axis signal_axis) {
  if (T_range.empty()) fail(ErrorKind::invalid_parameters, "phase scan needs T values");
  if (signal_axis == Axis::Z)
    fail(ErrorKind::unmatched_basis, "phase scan signal basis must be X or Y");

  PhaseScanResult out;
  for (std::size_t k = 0; k < T_range.size(); ++k) {
    const double T = T_range[k];
    const cd phase = std::polar(1.0, 2.0 * omega_L * T);
    // Rotation with phase theta maps (up + e^{i theta} down)/sqrt2 onto the
    // "+" (L) readout.
    const Vector2c atom_plus(kHalfRoot, kHalfRoot * phase);
    const Vector2c atom_minus(kHalfRoot, -kHalfRoot * phase);
    const JointProbabilities p =
        born(state.rho(), atom_plus, atom_minus, photon_eigenvector(signal_axis, true),
             photon_eigenvector(signal_axis, false));

    double plus_given_L;
    if (clicks_per_point == 0) {
      plus_given_L = p[0] / (p[0] + p[1]);
    } else {
      Rng rng(derive_seed(seed, "phase-scan", k));
      std::discrete_distribution<int> outcome(p.begin(), p.end());
      std::size_t n_plus = 0;
      std::size_t n_L = 0;
      for (std::size_t c = 0; c < clicks_per_point; ++c) {
        const int o = outcome(rng);
        if (o < 2) {
          ++n_L;
          n_plus += (o == 0) ? 1 : 0;
        }
      }
      plus_given_L = n_L ? static_cast<double>(n_plus) / static_cast<double>(n_L) : 0.5;
    }
    out.points.push_back({T, plus_given_L, 1.0 - plus_given_L});
  }

  if (T_range.size() >= 4) {
    std::vector<double> ts, ys;
    for (const auto& pt : out.points) {
      ts.push_back(pt.T);
      ys.push_back(pt.p_plus_given_L);
    }
    out.fit = fit_sinusoid(ts, ys);
    const double period = out.fit.period();
    const double t0 = *std::min_element(ts.begin(), ts.end());
    double t_opt = out.fit.phase / out.fit.angular_frequency;
    t_opt = t0 + std::fmod(std::fmod(t_opt - t0, period) + period, period);
    out.T_opt = t_opt;
  } else {
    auto best = std::max_element(out.points.begin(), out.points.end(),
                                 [](const auto& a, const auto& b) {
                                   return a.p_plus_given_L < b.p_plus_given_L;
                                 });
    out.T_opt = best->T;
  }
  return out;
}

std::vector<BasisSetting> basis_switch_schedule(std::size_t n_atoms, Axis signal_basis,
                                                const ScheduleTiming& timing) {
  if (n_atoms == 0) fail(ErrorKind::invalid_parameters, "schedule needs n >= 1");
  std::vector<BasisSetting> out;
  for (std::size_t i = 0; i < n_atoms; ++i)
    out.push_back({static_cast<double>(i) * timing.slot, i, WindowKind::signal, signal_basis});
  const double readout_start = static_cast<double>(n_atoms) * timing.slot + timing.rotation_gap;
  for (std::size_t i = 0; i < n_atoms; ++i)
    out.push_back({readout_start + static_cast<double>(i) * timing.slot, i, WindowKind::readout,
                   Axis::Z});
  return out;
}

double min_switch_gap(const std::vector<BasisSetting>& schedule, double window) {
  double gap = std::numeric_limits<double>::infinity();
  for (std::size_t k = 1; k < schedule.size(); ++k)
    if (schedule[k].photon_basis != schedule[k - 1].photon_basis)
      gap = std::min(gap, schedule[k].time - (schedule[k - 1].time + window));
  return gap;
}

}  // namespace cavreg
