#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "cavreg/ape_engine.hpp"
#include "cavreg/cavity_model.hpp"
#include "cavreg/register_layout.hpp"

namespace cavreg {

// Probability that at least one of the atoms yields a detected photon.
double multiplex_efficiency(std::span<const double> etas);
// Same quantity through log1p/expm1, used as an independent reference.
double multiplex_efficiency_log_reference(std::span<const double> etas);

double expected_photon_number(std::span<const double> etas);

struct FiberEfficiency {
  double per_atom;   // eta_fiber of each atom under a homogeneous correction
  double aggregate;  // 1 - (1 - per_atom)^n, comparable to the reported value
};

// Solves 1 - eta_overall = (1 - p * eta_fiber)^n for eta_fiber.
FiberEfficiency infer_fiber_efficiency(double eta_overall, double propagation_detection,
                                       std::size_t n_atoms = 1);

struct LinkConfig {
  double distance = 0.0;
  double signal_velocity = 2e8;
  double attempt_slot = 15e-6;
  double propagation_detection = 0.70;

  void validate() const;
};

// Heralded pairs per second: sum(eta) / max(L/c, n * slot).
double distribution_rate(const LinkConfig& link, std::span<const double> etas);

struct RegisterReport {
  RegisterLayout layout;  // with per-atom efficiency and fidelity filled in
  double eta_overall = 0.0;
  double mean_photon_number = 0.0;
  double mean_fidelity = 0.0;
};

RegisterReport register_report(const RegisterLayout& layout, const CavityParams& cavity,
                               double xi, const ErrorBudget& budget,
                               const PhotonEnvelope& envelope);

struct AttemptStats {
  std::size_t attempts = 0;
  std::size_t heralded = 0;       // attempts with at least one photon
  std::size_t photons = 0;
  double success_fraction = 0.0;
  double mean_photons = 0.0;
};

// Per-attempt Bernoulli photon events for every atom.
AttemptStats simulate_attempts(std::span<const double> etas, std::size_t attempts,
                               std::uint64_t seed);

namespace serial {
AttemptStats simulate_attempts(std::span<const double> etas, std::size_t attempts,
                               std::uint64_t seed);
}

}  // namespace cavreg
