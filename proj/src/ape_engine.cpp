#include "cavreg/ape_engine.hpp"

#include <cmath>
#include <complex>
#include <iomanip>
#include <random>
#include <sstream>

#include "cavreg/error.hpp"

namespace cavreg {

namespace {

using cd = std::complex<double>;

double trapezoid(const std::vector<double>& x, const std::vector<double>& y) {
  double s = 0.0;
  for (std::size_t k = 1; k < x.size(); ++k) s += 0.5 * (y[k] + y[k - 1]) * (x[k] - x[k - 1]);
  return s;
}

void require(bool ok, const char* what) {
  if (!ok) fail(ErrorKind::invalid_parameters, what);
}

}  // namespace

TwoQubitState::TwoQubitState(const Matrix4c& rho) : rho_(rho) {
  if (auto why = check(rho); !why.empty()) fail(ErrorKind::invalid_parameters, why);
}

std::string TwoQubitState::check(const Matrix4c& rho) {
  if (!rho.allFinite()) return "density matrix has non-finite entries";
  if ((rho - rho.adjoint()).cwiseAbs().maxCoeff() > hermiticity_tolerance)
    return "density matrix is not Hermitian";
  if (std::abs(rho.trace() - cd(1.0, 0.0)) > trace_tolerance) return "trace is not 1";
  const Eigen::SelfAdjointEigenSolver<Matrix4c> eig(rho, Eigen::EigenvaluesOnly);
  if (eig.eigenvalues().minCoeff() < -psd_tolerance) return "density matrix is not PSD";
  return {};
}

TwoQubitState TwoQubitState::maximally_mixed() {
  return TwoQubitState(Matrix4c::Identity() / 4.0, Unchecked{});
}

TwoQubitState TwoQubitState::pure(const Vector4c& psi) {
  const double norm = psi.norm();
  require(norm > 0.0, "state vector must be nonzero");
  const Vector4c v = psi / norm;
  return TwoQubitState(v * v.adjoint());
}

std::string TwoQubitState::to_text() const {
  std::ostringstream os;
  os << std::setprecision(17);
  for (int r = 0; r < 4; ++r) {
    for (int c = 0; c < 4; ++c) {
      if (c) os << ' ';
      os << rho_(r, c).real() << ' ' << rho_(r, c).imag();
    }
    os << '\n';
  }
  return os.str();
}

TwoQubitState ideal_bell_state() {
  Vector4c psi = Vector4c::Zero();
  psi(up_R) = 1.0;
  psi(down_L) = 1.0;
  return TwoQubitState::pure(psi);
}

double fidelity_with_bell(const TwoQubitState& state) {
  const double h = 1.0 / std::sqrt(2.0);
  const Matrix4c& r = state.rho();
  // <psi|rho|psi> with psi = (|up R> + |down L>)/sqrt2
  const cd f = h * h * (r(up_R, up_R) + r(up_R, down_L) + r(down_L, up_R) + r(down_L, down_L));
  return f.real();
}

TwoQubitState random_physical_state(Rng& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Matrix4c g;
  for (int r = 0; r < 4; ++r)
    for (int c = 0; c < 4; ++c) g(r, c) = cd(normal(rng), normal(rng));
  Matrix4c rho = g * g.adjoint();
  rho /= rho.trace().real();
  rho = 0.5 * (rho + rho.adjoint());
  return TwoQubitState(rho);
}

void PhotonEnvelope::validate() const {
  if (times.size() < 2 || times.size() != density.size())
    fail(ErrorKind::empty_envelope, "envelope needs >= 2 (time, density) samples");
  require(window > 0.0, "acceptance window must be > 0");
  require(total_acceptance > 0.0 && total_acceptance <= 1.0, "total_acceptance must be in (0,1]");
  for (std::size_t k = 0; k < times.size(); ++k) {
    require(density[k] >= 0.0, "envelope density must be >= 0");
    require(times[k] >= 0.0 && times[k] <= window * (1.0 + 1e-12), "envelope sample outside window");
    if (k > 0) require(times[k] > times[k - 1], "envelope times must increase");
  }
  const double area = trapezoid(times, density);
  if (area <= 0.0) fail(ErrorKind::empty_envelope, "envelope has zero weight");
  require(std::abs(area - total_acceptance) < 1e-9 * std::max(1.0, total_acceptance),
          "envelope integral must equal total_acceptance");
}

PhotonEnvelope PhotonEnvelope::uniform(double window, std::size_t samples) {
  require(window > 0.0 && samples >= 2, "uniform envelope needs window > 0 and >= 2 samples");
  PhotonEnvelope e;
  e.window = window;
  e.total_acceptance = 1.0;
  for (std::size_t k = 0; k < samples; ++k) {
    e.times.push_back(window * static_cast<double>(k) / static_cast<double>(samples - 1));
    e.density.push_back(1.0 / window);
  }
  return e;
}

double PhotonEnvelope::front_peaked_acceptance(double rise, double decay, double window) {
  require(rise > 0.0 && decay > 0.0 && window > 0.0, "envelope times must be > 0");
  const double combined = 1.0 / (1.0 / rise + 1.0 / decay);
  const double inside = decay * (1.0 - std::exp(-window / decay)) -
                        combined * (1.0 - std::exp(-window / combined));
  return inside / (decay - combined);
}

PhotonEnvelope PhotonEnvelope::front_peaked(double rise, double decay, double window,
                                            std::size_t samples) {
  require(samples >= 2, "envelope needs >= 2 samples");
  PhotonEnvelope e;
  e.window = window;
  e.total_acceptance = front_peaked_acceptance(rise, decay, window);
  for (std::size_t k = 0; k < samples; ++k) {
    const double t = window * static_cast<double>(k) / static_cast<double>(samples - 1);
    e.times.push_back(t);
    e.density.push_back((1.0 - std::exp(-t / rise)) * std::exp(-t / decay));
  }
  const double scale = e.total_acceptance / trapezoid(e.times, e.density);
  for (double& d : e.density) d *= scale;
  return e;
}

double chirp_visibility(const PhotonEnvelope& envelope, double omega_L) {
  envelope.validate();
  const auto& t = envelope.times;
  const auto& p = envelope.density;
  cd acc = 0.0;
  double norm = 0.0;
  for (std::size_t k = 1; k < t.size(); ++k) {
    const double h = 0.5 * (t[k] - t[k - 1]);
    acc += h * (p[k] * std::polar(1.0, -2.0 * omega_L * t[k]) +
                p[k - 1] * std::polar(1.0, -2.0 * omega_L * t[k - 1]));
    norm += h * (p[k] + p[k - 1]);
  }
  return std::min(1.0, std::abs(acc) / norm);
}

void ErrorBudget::validate() const {
  // Admixture weight 4/3 * eps must stay <= 1.
  auto infidelity_ok = [](double e) { return e >= 0.0 && e <= 0.75; };
  require(larmor_frequency >= 0.0, "larmor_frequency must be >= 0");
  require(infidelity_ok(spam_infidelity), "spam_infidelity must be in [0,0.75]");
  require(infidelity_ok(rotation_infidelity), "rotation_infidelity must be in [0,0.75]");
  require(infidelity_ok(polarization_infidelity), "polarization_infidelity must be in [0,0.75]");
  require(coherence_time > 0.0, "coherence_time must be > 0");
  require(time_per_atom >= 0.0, "time_per_atom must be >= 0");
  require(readout_overhead >= 0.0, "readout_overhead must be >= 0");
}

double storage_time(const ErrorBudget& budget, SequenceSlot slot) {
  if (slot.index >= slot.total)
    fail(ErrorKind::invalid_slot, "slot index " + std::to_string(slot.index) +
                                      " >= register size " + std::to_string(slot.total));
  return static_cast<double>(slot.total - slot.index) * budget.time_per_atom +
         budget.readout_overhead;
}

TwoQubitState dephase_atom(const TwoQubitState& state, double visibility) {
  require(visibility >= 0.0 && visibility <= 1.0, "visibility must be in [0,1]");
  Matrix4c rho = state.rho();
  rho.topRightCorner<2, 2>() *= visibility;
  rho.bottomLeftCorner<2, 2>() *= visibility;
  return TwoQubitState(rho);
}

TwoQubitState depolarize(const TwoQubitState& state, double infidelity) {
  const double p = 4.0 / 3.0 * infidelity;
  require(p >= 0.0 && p <= 1.0, "depolarizing weight must be in [0,1]");
  const Matrix4c rho = (1.0 - p) * state.rho() + p * Matrix4c::Identity() / 4.0;
  return TwoQubitState(rho);
}

TwoQubitState apply_error_channels(const TwoQubitState& state, const ErrorBudget& budget,
                                   const PhotonEnvelope& envelope, SequenceSlot slot) {
  budget.validate();
  const double stored = storage_time(budget, slot);
  TwoQubitState out = dephase_atom(state, chirp_visibility(envelope, budget.larmor_frequency));
  out = dephase_atom(out, std::exp(-stored / budget.coherence_time));
  out = depolarize(out, budget.spam_infidelity);
  out = depolarize(out, budget.rotation_infidelity);
  out = depolarize(out, budget.polarization_infidelity);
  return out;
}

double coherence_fidelity(double t, double coherence_time) {
  require(t >= 0.0, "storage time must be >= 0");
  require(coherence_time > 0.0, "coherence time must be > 0");
  return 0.5 * (1.0 + std::exp(-t / coherence_time));
}

}  // namespace cavreg
