#include "cavreg/config.hpp"

#include <cmath>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>

#include <json.hpp>

#include "cavreg/error.hpp"
#include "cavreg/output.hpp"
#include "cavreg/units.hpp"

namespace cavreg {

namespace {

using json = nlohmann::json;

enum class Range { any, positive, nonnegative, probability };

const char* describe(Range r) {
  switch (r) {
    case Range::positive: return "must be > 0";
    case Range::nonnegative: return "must be >= 0";
    case Range::probability: return "must be in [0,1]";
    case Range::any: break;
  }
  return "";
}

bool in_range(double v, Range r) {
  if (!std::isfinite(v)) return false;
  switch (r) {
    case Range::positive: return v > 0.0;
    case Range::nonnegative: return v >= 0.0;
    case Range::probability: return v >= 0.0 && v <= 1.0;
    case Range::any: break;
  }
  return true;
}

// One JSON object being read; collects errors instead of throwing and
// reports keys nobody asked for.
class Section {
 public:
  Section(const json* obj, std::string path, std::vector<std::string>& errors)
      : obj_(obj), path_(std::move(path)), errors_(errors) {}

  Section child(const std::string& key) {
    seen_.insert(key);
    const std::string p = qualify(key);
    if (!obj_ || !obj_->contains(key)) return Section(nullptr, p, errors_);
    const json& v = obj_->at(key);
    if (!v.is_object()) {
      errors_.push_back(p + ": expected an object");
      return Section(nullptr, p, errors_);
    }
    return Section(&v, p, errors_);
  }

  double number(const std::string& key, double fallback, Range range, double scale = 1.0) {
    const json* v = find(key);
    if (!v) return fallback * scale;
    if (!v->is_number()) {
      errors_.push_back(qualify(key) + ": expected a number");
      return fallback * scale;
    }
    const double x = v->get<double>();
    if (!in_range(x, range)) {
      errors_.push_back(qualify(key) + ": " + describe(range));
      return fallback * scale;
    }
    return x * scale;
  }

  std::size_t count(const std::string& key, std::size_t fallback, std::size_t minimum) {
    const json* v = find(key);
    if (!v) return fallback;
    if (!v->is_number_integer()) {
      errors_.push_back(qualify(key) + ": expected an integer");
      return fallback;
    }
    if (v->is_number_unsigned() ? v->get<std::uint64_t>() < minimum
                                : v->get<std::int64_t>() < static_cast<std::int64_t>(minimum)) {
      errors_.push_back(qualify(key) + ": must be >= " + std::to_string(minimum));
      return fallback;
    }
    return v->get<std::size_t>();
  }

  std::uint64_t seed(const std::string& key, std::uint64_t fallback) {
    const json* v = find(key);
    if (!v) return fallback;
    if (v->is_number_unsigned()) return v->get<std::uint64_t>();
    if (v->is_number_integer())
      errors_.push_back(qualify(key) + ": must be a non-negative 64-bit integer");
    else
      errors_.push_back(qualify(key) + ": expected an integer");
    return fallback;
  }

  std::vector<double> numbers(const std::string& key, std::vector<double> fallback, Range range,
                              double scale = 1.0) {
    const json* v = find(key);
    for (double& f : fallback) f *= scale;
    if (!v) return fallback;
    if (!v->is_array() || v->empty()) {
      errors_.push_back(qualify(key) + ": expected a non-empty array of numbers");
      return fallback;
    }
    std::vector<double> out;
    for (std::size_t i = 0; i < v->size(); ++i) {
      const json& e = (*v)[i];
      const std::string p = qualify(key) + "[" + std::to_string(i) + "]";
      if (!e.is_number()) {
        errors_.push_back(p + ": expected a number");
        continue;
      }
      if (!in_range(e.get<double>(), range)) {
        errors_.push_back(p + ": " + describe(range));
        continue;
      }
      out.push_back(e.get<double>() * scale);
    }
    return out;
  }

  std::string text(const std::string& key, std::string fallback) {
    const json* v = find(key);
    if (!v) return fallback;
    if (!v->is_string()) {
      errors_.push_back(qualify(key) + ": expected a string");
      return fallback;
    }
    return v->get<std::string>();
  }

  void finish() {
    if (!obj_) return;
    for (const auto& [key, value] : obj_->items())
      if (!seen_.count(key)) errors_.push_back(qualify(key) + ": unknown key");
  }

  // Runs a module's own validation and records its message under this path.
  void check(const std::function<void()>& validate) {
    try {
      validate();
    } catch (const Error& e) {
      errors_.push_back((path_.empty() ? std::string("config") : path_) + ": " + e.what());
    }
  }

  void require(bool ok, const std::string& message) {
    if (!ok) errors_.push_back((path_.empty() ? std::string("config") : path_) + ": " + message);
  }

 private:
  std::string qualify(const std::string& key) const {
    return path_.empty() ? key : path_ + "." + key;
  }

  const json* find(const std::string& key) {
    seen_.insert(key);
    if (!obj_ || !obj_->contains(key)) return nullptr;
    return &obj_->at(key);
  }

  const json* obj_;
  std::string path_;
  std::vector<std::string>& errors_;
  std::set<std::string> seen_;
};

std::string position_of(const std::string& text, std::size_t byte) {
  std::size_t line = 1;
  std::size_t column = 1;
  for (std::size_t i = 0; i + 1 < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      column = 1;
    } else {
      ++column;
    }
  }
  return "line " + std::to_string(line) + ", column " + std::to_string(column);
}

std::string override_canonical(const std::string& canonical, const char* key, std::uint64_t v) {
  json doc = json::parse(canonical);
  doc[key] = v;
  return doc.dump();
}

}  // namespace

std::vector<double> SweepSpec::values() const {
  std::vector<double> out;
  if (points == 1) return {start};
  for (std::size_t k = 0; k < points; ++k)
    out.push_back(start + (stop - start) * static_cast<double>(k) / static_cast<double>(points - 1));
  return out;
}

std::string ExperimentConfig::digest() const {
  return sha256_hex(canonical + "\n" + calibration.to_json_text());
}

void ExperimentConfig::set_seed(std::uint64_t seed) {
  master_seed = seed;
  canonical = override_canonical(canonical, "master_seed", seed);
}

void ExperimentConfig::set_trials(std::size_t n) {
  if (n == 0) fail(ErrorKind::config_invalid, "trials: must be >= 1");
  trials = n;
  canonical = override_canonical(canonical, "trials", n);
}

void ExperimentConfig::set_clicks(std::size_t n) {
  if (n == 0) fail(ErrorKind::config_invalid, "clicks_per_basis: must be >= 1");
  clicks_per_basis = n;
  canonical = override_canonical(canonical, "clicks_per_basis", n);
}

TweezerGrid ExperimentConfig::tweezer_grid() const {
  return TweezerGrid::rectangular(grid.rows, grid.cols, grid.spacing,
                                  require_calibrated(calibration.fill_probability,
                                                     "fill_probability"));
}

PrepConfig ExperimentConfig::calibrated_prep() const {
  PrepConfig p = prep;
  p.per_move_survival = require_calibrated(calibration.per_move_survival, "per_move_survival");
  return p;
}

ErrorBudget ExperimentConfig::calibrated_budget() const {
  ErrorBudget b = budget;
  b.readout_overhead = require_calibrated(calibration.readout_overhead, "readout_overhead_s");
  return b;
}

PhotonEnvelope ExperimentConfig::calibrated_envelope() const {
  return PhotonEnvelope::front_peaked(
      require_calibrated(calibration.envelope_rise, "envelope_rise_s"),
      require_calibrated(calibration.envelope_decay, "envelope_decay_s"), detection_window);
}

double ExperimentConfig::calibrated_xi() const {
  return require_calibrated(calibration.register_xi, "register_xi");
}

ConfigResult validate_config(const std::string& text, const std::filesystem::path& base_dir) {
  using namespace units;
  ConfigResult result;
  auto& errors = result.errors;

  json doc;
  try {
    doc = json::parse(text, nullptr, true, true);
  } catch (const json::parse_error& e) {
    errors.push_back("parse error at " + position_of(text, e.byte) + ": " + e.what());
    return result;
  }
  if (!doc.is_object()) {
    errors.push_back("config: top level must be an object");
    return result;
  }

  ExperimentConfig cfg;
  Section root(&doc, "", errors);

  {
    Section s = root.child("cavity");
    auto& c = cfg.cavity;
    c.g0 = s.number("g0_mhz", c.g0 / angular_mhz(1.0), Range::positive, angular_mhz(1.0));
    c.kappa = s.number("kappa_mhz", c.kappa / angular_mhz(1.0), Range::positive, angular_mhz(1.0));
    c.kappa_out = s.number("kappa_out_mhz", c.kappa_out / angular_mhz(1.0), Range::positive,
                           angular_mhz(1.0));
    c.gamma = s.number("gamma_mhz", c.gamma / angular_mhz(1.0), Range::positive, angular_mhz(1.0));
    c.waist_radius = s.number("waist_um", c.waist_radius / um, Range::positive, um);
    c.beat_length = s.number("beat_length_um", c.beat_length / um, Range::positive, um);
    c.cavity_length = s.number("length_um", c.cavity_length / um, Range::positive, um);
    c.finesse = s.number("finesse", c.finesse, Range::positive);
    c.mirror_transmission_ppm_in = s.number("mirror_in_ppm", c.mirror_transmission_ppm_in, Range::nonnegative);
    c.mirror_transmission_ppm_out = s.number("mirror_out_ppm", c.mirror_transmission_ppm_out, Range::nonnegative);
    s.finish();
    s.require(c.kappa_out <= c.kappa, "kappa_out_mhz must not exceed kappa_mhz");
  }
  {
    Section s = root.child("efficiency");
    auto& f = cfg.factors;
    f.init_efficiency = s.number("init_efficiency", f.init_efficiency, Range::probability);
    f.transmission_detection = s.number("transmission_detection", f.transmission_detection, Range::probability);
    f.window_acceptance = s.number("window_acceptance", f.window_acceptance, Range::probability);
    s.finish();
  }
  {
    Section s = root.child("preparation");
    auto& p = cfg.prep;
    cfg.grid.rows = s.count("grid_rows", cfg.grid.rows, 1);
    cfg.grid.cols = s.count("grid_cols", cfg.grid.cols, 1);
    cfg.grid.spacing = s.number("grid_spacing_um", cfg.grid.spacing / um, Range::positive, um);
    p.move_speed = s.number("move_speed_um_per_ms", p.move_speed / (um / ms), Range::positive, um / ms);
    p.hop_rate = s.number("hop_rate_hz", p.hop_rate, Range::nonnegative);
    p.tracking_rate = s.number("tracking_rate_hz", p.tracking_rate, Range::positive);
    p.tweezer_waist = s.number("tweezer_waist_um", p.tweezer_waist / um, Range::positive, um);
    p.arrangement_overhead = s.number("arrangement_overhead_s", p.arrangement_overhead, Range::nonnegative);
    p.baseline_fill_probability = s.number("baseline_fill_probability", p.baseline_fill_probability, Range::probability);
    p.lattice_period = s.number("lattice_period_nm", p.lattice_period / nm, Range::positive, nm);
    cfg.hop_duration = s.number("hop_duration_s", cfg.hop_duration, Range::positive);
    s.finish();
    s.check([&] { p.validate(); });
  }
  {
    Section s = root.child("budget");
    auto& b = cfg.budget;
    b.larmor_frequency = s.number("larmor_khz", b.larmor_frequency / angular_khz(1.0), Range::nonnegative, angular_khz(1.0));
    b.spam_infidelity = s.number("spam_infidelity", b.spam_infidelity, Range::probability);
    b.rotation_infidelity = s.number("rotation_infidelity", b.rotation_infidelity, Range::probability);
    b.polarization_infidelity = s.number("polarization_infidelity", b.polarization_infidelity, Range::probability);
    b.coherence_time = s.number("coherence_time_ms", b.coherence_time / ms, Range::positive, ms);
    b.time_per_atom = s.number("time_per_atom_us", b.time_per_atom / us, Range::nonnegative, us);
    s.finish();
    s.check([&] { b.validate(); });
  }
  {
    Section s = root.child("envelope");
    cfg.detection_window = s.number("window_us", cfg.detection_window / us, Range::positive, us);
    s.finish();
  }
  {
    Section s = root.child("register");
    cfg.register_pitch = s.number("pitch_um", cfg.register_pitch / um, Range::positive, um);
    cfg.max_atoms = s.count("max_atoms", cfg.max_atoms, 1);
    s.finish();
    s.require(cfg.max_atoms <= cfg.grid.rows * cfg.grid.cols,
              "max_atoms must fit on the preparation grid");
    s.require(cfg.max_atoms <= cfg.grid.cols, "max_atoms must fit in one grid row");
  }
  {
    Section s = root.child("link");
    auto& l = cfg.link;
    l.propagation_detection = s.number("propagation_detection", l.propagation_detection, Range::probability);
    l.signal_velocity = s.number("signal_velocity_m_per_s", l.signal_velocity, Range::positive);
    l.attempt_slot = s.number("attempt_slot_us", l.attempt_slot / us, Range::positive, us);
    cfg.link_distances = s.numbers("distances_km", {0.0, 1.0, 10.0, 50.0, 100.0, 200.0}, Range::nonnegative, km);
    s.finish();
    s.require(l.propagation_detection > 0.0, "propagation_detection must be > 0");
  }
  {
    Section s = root.child("phase_scan");
    auto& p = cfg.phase_scan;
    p.t_start = s.number("t_start_us", p.t_start / us, Range::nonnegative, us);
    p.t_stop = s.number("t_stop_us", p.t_stop / us, Range::positive, us);
    p.points = s.count("points", p.points, 4);
    p.clicks_per_point = s.count("clicks_per_point", p.clicks_per_point, 0);
    s.finish();
    s.require(p.t_stop > p.t_start, "t_stop_us must exceed t_start_us");
  }
  for (auto [key, spec] : {std::pair{"scan_x", &cfg.scan_x}, std::pair{"scan_distance", &cfg.scan_distance}}) {
    Section s = root.child(key);
    spec->start = s.number("start_um", spec->start / um, Range::any, um);
    spec->stop = s.number("stop_um", spec->stop / um, Range::any, um);
    spec->points = s.count("points", spec->points, 1);
    s.finish();
  }
  {
    Section s = root.child("coherence");
    cfg.coherence_max_atoms = s.count("max_atoms", cfg.coherence_max_atoms, 1);
    cfg.coherence_times = s.numbers("coherence_times_ms", {1.1, 20.0, 100.0}, Range::positive, ms);
    s.finish();
  }

  cfg.trials = root.count("trials", cfg.trials, 1);
  cfg.clicks_per_basis = root.count("clicks_per_basis", cfg.clicks_per_basis, 1);
  cfg.master_seed = root.seed("master_seed", cfg.master_seed);
  const std::string cal = root.text("calibration_file", "calibration.json");
  root.finish();

  if (!errors.empty()) return result;

  cfg.calibration_file = std::filesystem::path(cal).is_absolute() ? std::filesystem::path(cal)
                                                                   : base_dir / cal;
  try {
    cfg.calibration = Calibration::load(cfg.calibration_file);
  } catch (const Error& e) {
    errors.push_back(std::string("calibration_file: ") + e.what());
    return result;
  }
  cfg.canonical = doc.dump();
  result.config = std::move(cfg);
  return result;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::config_invalid, "cannot read config " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  auto result = validate_config(buf.str(), path.parent_path());
  if (!result.config) {
    std::string message;
    for (const auto& e : result.errors) message += "\n  " + e;
    fail(ErrorKind::config_invalid, path.string() + ":" + message);
  }
  return std::move(*result.config);
}

}  // namespace cavreg
