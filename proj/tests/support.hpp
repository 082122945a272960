#pragma once

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include "cavreg/config.hpp"

namespace testing {

// Minimum over every injective row -> column map, by exhaustive search.
inline double brute_force_assignment(const std::vector<double>& cost, std::size_t rows,
                                     std::size_t cols) {
  std::vector<bool> used(cols, false);
  double best = std::numeric_limits<double>::infinity();
  auto rec = [&](auto&& self, std::size_t r, double acc) -> void {
    if (acc >= best) return;
    if (r == rows) {
      best = acc;
      return;
    }
    for (std::size_t c = 0; c < cols; ++c) {
      if (used[c]) continue;
      used[c] = true;
      self(self, r + 1, acc + cost[r * cols + c]);
      used[c] = false;
    }
  };
  rec(rec, 0, 0.0);
  return best;
}

inline std::filesystem::path config_dir() { return CAVREG_CONFIG_DIR; }

inline cavreg::ExperimentConfig default_config() {
  return cavreg::load_config(config_dir() / "default.json");
}

inline std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline std::filesystem::path scratch_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("cavreg_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

// Binomial 3-sigma band around the expected count.
inline bool within_binomial(std::size_t hits, std::size_t n, double p, double sigmas = 3.0) {
  const double mean = static_cast<double>(n) * p;
  const double sd = std::sqrt(static_cast<double>(n) * p * (1.0 - p));
  return std::abs(static_cast<double>(hits) - mean) <= sigmas * sd + 1e-9;
}

}  // namespace testing
