#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "cavreg/ape_engine.hpp"
#include "cavreg/array_prep.hpp"
#include "cavreg/calibration.hpp"
#include "cavreg/cavity_model.hpp"
#include "cavreg/multiplex.hpp"

namespace cavreg {

struct GridSpec {
  std::size_t rows = 2;
  std::size_t cols = 8;
  double spacing = 5.5e-6;
};

struct PhaseScanSpec {
  double t_start = 0.0;
  double t_stop = 15e-6;
  std::size_t points = 61;
  std::size_t clicks_per_point = 3000;
};

struct SweepSpec {
  double start = 0.0;
  double stop = 0.0;
  std::size_t points = 0;

  std::vector<double> values() const;
};

struct ExperimentConfig {
  CavityParams cavity = CavityParams::defaults();
  EfficiencyFactors factors;
  GridSpec grid;
  PrepConfig prep;
  double hop_duration = 100.0;
  ErrorBudget budget;
  double detection_window = 1.25e-6;
  double register_pitch = 5.5e-6;
  std::size_t max_atoms = 6;
  LinkConfig link;
  std::vector<double> link_distances;
  PhaseScanSpec phase_scan;
  SweepSpec scan_x{-20e-6, 20e-6, 41};
  SweepSpec scan_distance{3.5e-6, 16.5e-6, 14};
  std::size_t coherence_max_atoms = 100;
  std::vector<double> coherence_times;
  std::size_t trials = 100000;
  std::size_t clicks_per_basis = 3000;
  std::uint64_t master_seed = 0;

  std::filesystem::path calibration_file;
  Calibration calibration;

  // Canonical dump of the parsed document, with command-line overrides
  // applied; the digest covers it and the calibration values.
  std::string canonical;

  std::string digest() const;

  // Overrides re-validate the affected fields.
  void set_seed(std::uint64_t seed);
  void set_trials(std::size_t trials);
  void set_clicks(std::size_t clicks);

  TweezerGrid tweezer_grid() const;  // fill from calibration
  PrepConfig calibrated_prep() const;
  ErrorBudget calibrated_budget() const;
  PhotonEnvelope calibrated_envelope() const;
  double calibrated_xi() const;
};

struct ConfigResult {
  std::optional<ExperimentConfig> config;
  std::vector<std::string> errors;  // every violation, with field paths
};

// Parses and validates the whole document. Relative calibration paths are
// resolved against base_dir.
ConfigResult validate_config(const std::string& text, const std::filesystem::path& base_dir);

// Reads and validates; throws config-invalid listing every error.
ExperimentConfig load_config(const std::filesystem::path& path);

}  // namespace cavreg
