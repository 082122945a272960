#include "cavreg/multiplex.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "cavreg/error.hpp"
#include "cavreg/seeding.hpp"

namespace cavreg {

namespace {

void check_probabilities(std::span<const double> etas) {
  for (double e : etas)
    if (!(e >= 0.0 && e <= 1.0)) fail(ErrorKind::invalid_parameters, "eta must be in [0,1]");
}

}  // namespace

double multiplex_efficiency(std::span<const double> etas) {
  check_probabilities(etas);
  double miss = 1.0;
  for (double e : etas) miss *= 1.0 - e;
  return 1.0 - miss;
}

double multiplex_efficiency_log_reference(std::span<const double> etas) {
  check_probabilities(etas);
  double log_miss = 0.0;
  for (double e : etas) {
    if (e == 1.0) return 1.0;
    log_miss += std::log1p(-e);
  }
  return -std::expm1(log_miss);
}

double expected_photon_number(std::span<const double> etas) {
  check_probabilities(etas);
  return std::accumulate(etas.begin(), etas.end(), 0.0);
}

FiberEfficiency infer_fiber_efficiency(double eta_overall, double p, std::size_t n) {
  if (!(p > 0.0 && p <= 1.0))
    fail(ErrorKind::invalid_parameters, "propagation_detection must be in (0,1]");
  if (!(eta_overall >= 0.0 && eta_overall <= 1.0))
    fail(ErrorKind::invalid_parameters, "eta_overall must be in [0,1]");
  if (n == 0) fail(ErrorKind::invalid_parameters, "need at least one atom");
  const double nn = static_cast<double>(n);
  const double per_atom_detected = -std::expm1(std::log1p(-eta_overall) / nn);
  const double per_atom = per_atom_detected / p;
  if (per_atom > 1.0 + 1e-12)
    fail(ErrorKind::out_of_range, "no fiber efficiency in [0,1] reproduces eta_overall");
  const double clamped = std::min(per_atom, 1.0);
  return {clamped, -std::expm1(nn * std::log1p(-clamped))};
}

void LinkConfig::validate() const {
  if (!(distance >= 0.0)) fail(ErrorKind::invalid_parameters, "link distance must be >= 0");
  if (!(signal_velocity > 0.0))
    fail(ErrorKind::invalid_parameters, "signal_velocity must be > 0");
  if (!(attempt_slot > 0.0)) fail(ErrorKind::invalid_parameters, "attempt_slot must be > 0");
  if (!(propagation_detection >= 0.0 && propagation_detection <= 1.0))
    fail(ErrorKind::invalid_parameters, "propagation_detection must be in [0,1]");
}

double distribution_rate(const LinkConfig& link, std::span<const double> etas) {
  link.validate();
  if (etas.empty()) return 0.0;
  const double round = std::max(link.distance / link.signal_velocity,
                                static_cast<double>(etas.size()) * link.attempt_slot);
  return expected_photon_number(etas) / round;
}

RegisterReport register_report(const RegisterLayout& layout, const CavityParams& cavity,
                               double xi, const ErrorBudget& budget,
                               const PhotonEnvelope& envelope) {
  layout.validate();
  cavity.validate();
  budget.validate();
  if (layout.size() == 0) fail(ErrorKind::invalid_parameters, "register is empty");

  RegisterReport out;
  out.layout = layout;
  auto& eta = out.layout.per_atom_efficiency;
  auto& fid = out.layout.per_atom_fidelity;
  eta.clear();
  fid.clear();
  const TwoQubitState bell = ideal_bell_state();
  for (std::size_t i = 0; i < layout.size(); ++i) {
    eta.push_back(detection_efficiency_at(cavity, xi, layout.atoms[i].position));
    fid.push_back(fidelity_with_bell(
        apply_error_channels(bell, budget, envelope, SequenceSlot{i, layout.size()})));
  }
  out.eta_overall = multiplex_efficiency(eta);
  out.mean_photon_number = expected_photon_number(eta);
  out.mean_fidelity = std::accumulate(fid.begin(), fid.end(), 0.0) / static_cast<double>(fid.size());
  return out;
}

namespace {

template <bool Parallel>
AttemptStats attempts_impl(std::span<const double> etas, std::size_t attempts,
                           std::uint64_t seed) {
  check_probabilities(etas);
  std::size_t heralded = 0;
  std::size_t photons = 0;
  const auto n = static_cast<std::int64_t>(attempts);
  auto one = [&](std::int64_t a, std::size_t& h, std::size_t& ph) {
    Rng rng = make_rng(seed, "multiplex", static_cast<std::uint64_t>(a));
    std::size_t count = 0;
    for (double e : etas) count += std::bernoulli_distribution(e)(rng) ? 1 : 0;
    ph += count;
    h += count > 0 ? 1 : 0;
  };
  if constexpr (Parallel) {
#pragma omp parallel for schedule(static) reduction(+ : heralded, photons)
    for (std::int64_t a = 0; a < n; ++a) one(a, heralded, photons);
  } else {
    for (std::int64_t a = 0; a < n; ++a) one(a, heralded, photons);
  }
  AttemptStats s;
  s.attempts = attempts;
  s.heralded = heralded;
  s.photons = photons;
  if (attempts > 0) {
    s.success_fraction = static_cast<double>(heralded) / static_cast<double>(attempts);
    s.mean_photons = static_cast<double>(photons) / static_cast<double>(attempts);
  }
  return s;
}

}  // namespace

AttemptStats simulate_attempts(std::span<const double> etas, std::size_t attempts,
                               std::uint64_t seed) {
  return attempts_impl<true>(etas, attempts, seed);
}

namespace serial {
AttemptStats simulate_attempts(std::span<const double> etas, std::size_t attempts,
                               std::uint64_t seed) {
  return attempts_impl<false>(etas, attempts, seed);
}
}  // namespace serial

}  // namespace cavreg
