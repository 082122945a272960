#include "cavreg/output.hpp"

#include <algorithm>
#include <array>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>
#include <openssl/evp.h>

#include "cavreg/error.hpp"

namespace cavreg {

namespace {

constexpr const char* kDigestTag = "# config_digest: ";

std::string csv_text(const Table& t) {
  std::string out;
  for (std::size_t c = 0; c < t.columns.size(); ++c) {
    if (c) out += ',';
    out += t.columns[c];
  }
  out += '\n';
  for (const auto& row : t.rows) {
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (c) out += ',';
      out += row[c];
    }
    out += '\n';
  }
  return out;
}

}  // namespace

std::string sha256_hex(const std::string& bytes) {
  std::array<unsigned char, EVP_MAX_MD_SIZE> md{};
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), md.data(), &len, EVP_sha256(), nullptr) != 1)
    fail(ErrorKind::io, "sha256 failed");
  static const char* hex = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out += hex[md[i] >> 4];
    out += hex[md[i] & 0xf];
  }
  return out;
}

std::string format_number(double value) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.10g", value);
  return buf;
}

void Table::add_row(std::vector<std::string> row) {
  if (row.size() != columns.size()) fail(ErrorKind::io, "row width does not match header");
  rows.push_back(std::move(row));
}

Check make_check(std::string name, double value, double low, double high) {
  return {std::move(name), value, low, high, value >= low && value <= high};
}

RunOutput::RunOutput(std::string experiment, std::string config_digest, std::uint64_t seed)
    : experiment_(std::move(experiment)), digest_(std::move(config_digest)), seed_(seed) {}

std::string RunOutput::header() const {
  std::string h = "# cavreg " + std::string(tool_version) + " " + experiment_ + "\n";
  h += kDigestTag + digest_ + "\n";
  h += "# seed: " + std::to_string(seed_) + "\n";
  return h;
}

void RunOutput::add_csv(const std::string& name, const Table& table) {
  files_.emplace_back(name, header() + csv_text(table));
}

void RunOutput::add_text(const std::string& name, const std::string& body) {
  files_.emplace_back(name, header() + body);
}

void RunOutput::add_check(Check check) { checks_.push_back(std::move(check)); }

void RunOutput::add_calibration_value(const std::string& key, double value) {
  calibration_.emplace_back(key, value);
}

bool RunOutput::all_checks_passed() const noexcept {
  for (const auto& c : checks_)
    if (!c.passed) return false;
  return true;
}

std::vector<std::filesystem::path> RunOutput::write(const std::filesystem::path& dir) const {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) fail(ErrorKind::io, "cannot create " + dir.string() + ": " + ec.message());

  nlohmann::ordered_json manifest;
  manifest["tool"] = "cavreg";
  manifest["version"] = tool_version;
  manifest["experiment"] = experiment_;
  manifest["config_digest"] = digest_;
  manifest["seed"] = seed_;
  manifest["calibration"] = nlohmann::ordered_json::object();
  for (const auto& [k, v] : calibration_) manifest["calibration"][k] = v;
  manifest["files"] = nlohmann::ordered_json::array();

  std::vector<std::filesystem::path> written;
  for (const auto& [name, body] : files_) {
    const auto path = dir / name;
    std::ofstream out(path, std::ios::binary);
    if (!out) fail(ErrorKind::io, "cannot write " + path.string());
    out << body;
    manifest["files"].push_back({{"name", name}, {"sha256", sha256_hex(body)}});
    written.push_back(path);
  }
  manifest["checks"] = nlohmann::ordered_json::array();
  for (const auto& c : checks_)
    manifest["checks"].push_back(
        {{"name", c.name}, {"value", c.value}, {"low", c.low}, {"high", c.high}, {"passed", c.passed}});

  const auto path = dir / "manifest.json";
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorKind::io, "cannot write " + path.string());
  out << manifest.dump(2) << '\n';
  written.push_back(path);
  return written;
}

std::vector<StaleFile> find_stale_outputs(const std::filesystem::path& dir,
                                          const std::string& expected_digest) {
  std::vector<StaleFile> stale;
  if (!std::filesystem::is_directory(dir)) return stale;
  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    const auto ext = entry.path().extension();
    if (entry.is_regular_file() && (ext == ".csv" || ext == ".txt")) files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  for (const auto& path : files) {
    std::ifstream in(path);
    std::string recorded;
    for (std::string line; std::getline(in, line) && line.rfind('#', 0) == 0;) {
      if (line.rfind(kDigestTag, 0) == 0) {
        recorded = line.substr(std::string(kDigestTag).size());
        break;
      }
    }
    if (recorded != expected_digest) stale.push_back({path, recorded});
  }

  const auto manifest_path = dir / "manifest.json";
  if (std::filesystem::exists(manifest_path)) {
    std::ifstream in(manifest_path);
    std::string recorded;
    try {
      recorded = nlohmann::json::parse(in).value("config_digest", "");
    } catch (const nlohmann::json::exception&) {
    }
    if (recorded != expected_digest) stale.push_back({manifest_path, recorded});
  }
  return stale;
}

}  // namespace cavreg
