#pragma once

#include <string>
#include <vector>

#include "cavreg/config.hpp"
#include "cavreg/output.hpp"

namespace cavreg {

const std::vector<std::string>& experiment_names();

// Runs one experiment entirely in memory. Throws invalid-parameters for an
// unknown name and calibration-missing before any work if a calibrated
// value the experiment needs is absent.
RunOutput run_experiment(const std::string& name, const ExperimentConfig& config);

}  // namespace cavreg
