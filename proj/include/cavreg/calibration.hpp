#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "cavreg/ape_engine.hpp"
#include "cavreg/array_prep.hpp"
#include "cavreg/cavity_model.hpp"

namespace cavreg {

// Fitted values. Absent entries mean "not calibrated yet"; experiments that
// need one fail with calibration-missing rather than fall back to a guess.
struct Calibration {
  std::optional<double> per_move_survival;
  std::optional<double> fill_probability;
  std::optional<double> readout_overhead;  // s
  std::optional<double> envelope_rise;     // s
  std::optional<double> envelope_decay;    // s
  std::optional<double> register_xi;

  static Calibration load(const std::filesystem::path& path);  // missing file -> empty
  void save(const std::filesystem::path& path) const;
  std::string to_json_text() const;
};

// Throws calibration-missing naming `what` when the value is absent.
double require_calibrated(const std::optional<double>& value, const std::string& what);

struct CalibrationTargets {
  double single_atom_efficiency = 0.332;
  double chirp_fidelity = 0.962;
  double window_acceptance = 0.85;
  double mean_register_fidelity = 0.855;
  std::size_t max_register = 6;
  double register_pitch = 5.5e-6;
  double prep_success_small = 0.90;  // n = prep_small_n
  double prep_success_large = 0.20;  // n = prep_large_n
  std::size_t prep_small_n = 2;
  std::size_t prep_large_n = 6;
  std::size_t prep_trials = 20000;
};

// xi such that the atom at the mode centre reaches the target efficiency.
double calibrate_register_xi(const CavityParams& cavity, double target_efficiency);

struct EnvelopeFit {
  double rise;
  double decay;
  double chirp_fidelity;
  double acceptance;
};

// Front-peaked envelope whose chirp-only fidelity and in-window fraction both
// match their targets.
EnvelopeFit calibrate_envelope(double omega_L, double window, double target_fidelity,
                               double target_acceptance);

// Readout overhead that sets the average of the register mean fidelities
// over n = 1..max_register (centred rows) to the target.
double calibrate_readout_overhead(const CavityParams& cavity, const ErrorBudget& budget,
                                  const PhotonEnvelope& envelope,
                                  const CalibrationTargets& targets);

double mean_fidelity_over_sizes(const CavityParams& cavity, const ErrorBudget& budget,
                                const PhotonEnvelope& envelope, std::size_t max_register,
                                double pitch);

struct PrepFit {
  double fill_probability;
  double per_move_survival;
  double success_small;
  double success_large;
};

// Joint fit of the per-site fill probability and per-move survival to the
// two preparation success targets on the given grid geometry.
PrepFit calibrate_preparation(const TweezerGrid& grid, const PrepConfig& config,
                              const CalibrationTargets& targets, std::uint64_t seed);

}  // namespace cavreg
