#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "cavreg/seeding.hpp"

namespace cavreg {

using Matrix4c = Eigen::Matrix4cd;
using Vector4c = Eigen::Vector4cd;

// Basis order: atom (up, down) outer, photon (R, L) inner.
enum BasisState : int { up_R = 0, up_L = 1, down_R = 2, down_L = 3 };

// Atom-spin (x) photon-polarization density matrix. Construction checks the
// physical invariants; use unchecked() only for intermediate algebra.
class TwoQubitState {
 public:
  static constexpr double hermiticity_tolerance = 1e-12;
  static constexpr double trace_tolerance = 1e-12;
  static constexpr double psd_tolerance = 1e-10;

  explicit TwoQubitState(const Matrix4c& rho);

  static TwoQubitState maximally_mixed();
  static TwoQubitState pure(const Vector4c& psi);

  const Matrix4c& rho() const noexcept { return rho_; }

  // Returns an empty string when physical, otherwise the violated invariant.
  static std::string check(const Matrix4c& rho);

  // 16 complex entries, row-major, "re im" pairs, one matrix row per line.
  std::string to_text() const;

 private:
  struct Unchecked {};
  TwoQubitState(const Matrix4c& rho, Unchecked) : rho_(rho) {}
  Matrix4c rho_;
};

TwoQubitState ideal_bell_state();
double fidelity_with_bell(const TwoQubitState& state);

// Ginibre-distributed mixed state, for property tests and consistency runs.
TwoQubitState random_physical_state(Rng& rng);

// Detection-time density on [0, window]. density integrates (trapezoid) to
// total_acceptance, the fraction of the whole photon inside the window.
struct PhotonEnvelope {
  std::vector<double> times;
  std::vector<double> density;
  double window = 1.25e-6;
  double total_acceptance = 1.0;

  void validate() const;

  static PhotonEnvelope uniform(double window, std::size_t samples = 4001);
  // (1 - exp(-t/rise)) * exp(-t/decay), truncated to the window.
  static PhotonEnvelope front_peaked(double rise, double decay, double window,
                                     std::size_t samples = 4001);
  // Fraction of the untruncated front_peaked photon that lands in [0, window].
  static double front_peaked_acceptance(double rise, double decay, double window);
};

// |integral p(t) exp(-2i omega_L t) dt| for the normalized detection density.
double chirp_visibility(const PhotonEnvelope& envelope, double omega_L);

struct ErrorBudget {
  double larmor_frequency = 6.283185307179586e5;  // 2 pi x 100 kHz
  double spam_infidelity = 0.027;
  double rotation_infidelity = 0.025;
  double polarization_infidelity = 0.008;
  double coherence_time = 1.1e-3;
  double time_per_atom = 15e-6;
  // Placeholder until calibrated: time from the last emission to the global
  // basis rotation.
  double readout_overhead = 30e-6;

  void validate() const;
};

struct SequenceSlot {
  std::size_t index;  // addressing order, 0-based
  std::size_t total;
};

double storage_time(const ErrorBudget& budget, SequenceSlot slot);

// Atom-qubit dephasing: scales the up/down coherences by `visibility`.
TwoQubitState dephase_atom(const TwoQubitState& state, double visibility);
// White-noise admixture of weight 4/3 * infidelity (lowers Bell fidelity of
// a pure Bell state by exactly `infidelity`).
TwoQubitState depolarize(const TwoQubitState& state, double infidelity);

TwoQubitState apply_error_channels(const TwoQubitState& state, const ErrorBudget& budget,
                                   const PhotonEnvelope& envelope, SequenceSlot slot);

double coherence_fidelity(double t, double coherence_time);

}  // namespace cavreg
