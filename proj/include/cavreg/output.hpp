#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

namespace cavreg {

inline constexpr const char* tool_version = "0.1.0";

std::string sha256_hex(const std::string& bytes);

// Shortest round-trippable text for tables; identical across runs.
std::string format_number(double value);

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;

  void add_row(std::vector<std::string> row);
};

struct Check {
  std::string name;
  double value = 0.0;
  double low = 0.0;
  double high = 0.0;
  bool passed = false;
};

Check make_check(std::string name, double value, double low, double high);

// Assembles every output of one run in memory, then writes it in one go so
// a failed run leaves no partial files behind.
class RunOutput {
 public:
  RunOutput(std::string experiment, std::string config_digest, std::uint64_t seed);

  void add_csv(const std::string& name, const Table& table);
  void add_text(const std::string& name, const std::string& body);
  void add_check(Check check);
  void add_calibration_value(const std::string& key, double value);

  const std::vector<Check>& checks() const noexcept { return checks_; }
  bool all_checks_passed() const noexcept;

  // Writes the data files and manifest.json; returns the written paths.
  std::vector<std::filesystem::path> write(const std::filesystem::path& dir) const;

 private:
  std::string header() const;

  std::string experiment_;
  std::string digest_;
  std::uint64_t seed_;
  std::vector<std::pair<std::string, std::string>> files_;
  std::vector<Check> checks_;
  std::vector<std::pair<std::string, double>> calibration_;
};

struct StaleFile {
  std::filesystem::path path;
  std::string recorded_digest;  // empty if the header carries none
};

// Data files in `dir` whose header digest differs from `expected_digest`.
std::vector<StaleFile> find_stale_outputs(const std::filesystem::path& dir,
                                          const std::string& expected_digest);

}  // namespace cavreg
