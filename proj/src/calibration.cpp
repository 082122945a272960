#include "cavreg/calibration.hpp"

#include <cmath>
#include <fstream>
#include <functional>
#include <sstream>

#include <json.hpp>

#include "cavreg/error.hpp"
#include "cavreg/multiplex.hpp"
#include "cavreg/register_layout.hpp"

namespace cavreg {

namespace {

using json = nlohmann::ordered_json;

struct Field {
  const char* key;
  std::optional<double> Calibration::*member;
};

constexpr Field kFields[] = {
    {"per_move_survival", &Calibration::per_move_survival},
    {"fill_probability", &Calibration::fill_probability},
    {"readout_overhead_s", &Calibration::readout_overhead},
    {"envelope_rise_s", &Calibration::envelope_rise},
    {"envelope_decay_s", &Calibration::envelope_decay},
    {"register_xi", &Calibration::register_xi},
};

// Root of a monotone function on [lo, hi] by bisection; f(lo) and f(hi) must
// bracket zero.
double bisect(const std::function<double(double)>& f, double lo, double hi, int iterations,
              const char* what) {
  double flo = f(lo);
  const double fhi = f(hi);
  if (flo * fhi > 0.0)
    fail(ErrorKind::out_of_range, std::string("calibration target for ") + what +
                                      " is not bracketed by the search interval");
  for (int i = 0; i < iterations; ++i) {
    const double mid = 0.5 * (lo + hi);
    const double fm = f(mid);
    if ((fm < 0.0) == (flo < 0.0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace

Calibration Calibration::load(const std::filesystem::path& path) {
  Calibration c;
  std::ifstream in(path);
  if (!in) return c;
  json doc;
  try {
    doc = json::parse(in, nullptr, true, true);
  } catch (const json::parse_error& e) {
    fail(ErrorKind::config_invalid, path.string() + ": " + e.what());
  }
  if (!doc.is_object()) fail(ErrorKind::config_invalid, path.string() + ": expected an object");
  for (const auto& [key, value] : doc.items()) {
    bool known = false;
    for (const auto& f : kFields) {
      if (key != f.key) continue;
      known = true;
      if (value.is_null()) break;
      if (!value.is_number())
        fail(ErrorKind::config_invalid, path.string() + ": " + key + " must be a number");
      c.*(f.member) = value.get<double>();
    }
    if (!known) fail(ErrorKind::config_invalid, path.string() + ": unknown key " + key);
  }
  return c;
}

std::string Calibration::to_json_text() const {
  json doc = json::object();
  for (const auto& f : kFields) {
    const auto& v = this->*(f.member);
    doc[f.key] = v ? json(*v) : json(nullptr);
  }
  return doc.dump(2) + "\n";
}

void Calibration::save(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorKind::io, "cannot write " + path.string());
  out << to_json_text();
}

double require_calibrated(const std::optional<double>& value, const std::string& what) {
  if (!value)
    fail(ErrorKind::calibration_missing,
         what + " is not calibrated; run `cavreg calibrate` first");
  return *value;
}

double calibrate_register_xi(const CavityParams& cavity, double target_efficiency) {
  const double p = detection_efficiency_at(cavity, 1.0, AtomPosition{});
  const double xi = target_efficiency / p;
  if (!(xi > 0.0 && xi <= 1.0))
    fail(ErrorKind::out_of_range, "target efficiency exceeds the intrinsic probability");
  return xi;
}

EnvelopeFit calibrate_envelope(double omega_L, double window, double target_fidelity,
                               double target_acceptance) {
  auto fidelity = [&](double rise, double decay) {
    const auto e = PhotonEnvelope::front_peaked(rise, decay, window);
    return 0.5 * (1.0 + chirp_visibility(e, omega_L));
  };
  // For a given rise, the decay that hits the fidelity target (longer decay
  // spreads the photon and lowers fidelity).
  auto decay_for = [&](double rise) {
    return bisect([&](double d) { return fidelity(rise, d) - target_fidelity; }, 1e-3 * window,
                  1e3 * window, 80, "envelope decay");
  };
  const double rise = bisect(
      [&](double r) {
        return PhotonEnvelope::front_peaked_acceptance(r, decay_for(r), window) -
               target_acceptance;
      },
      1e-3 * window, 0.15 * window, 60, "envelope rise");
  const double decay = decay_for(rise);
  return {rise, decay, fidelity(rise, decay),
          PhotonEnvelope::front_peaked_acceptance(rise, decay, window)};
}

double mean_fidelity_over_sizes(const CavityParams& cavity, const ErrorBudget& budget,
                                const PhotonEnvelope& envelope, std::size_t max_register,
                                double pitch) {
  double sum = 0.0;
  for (std::size_t n = 1; n <= max_register; ++n)
    sum += register_report(RegisterLayout::centered_row(n, pitch), cavity, 1.0, budget, envelope)
               .mean_fidelity;
  return sum / static_cast<double>(max_register);
}

double calibrate_readout_overhead(const CavityParams& cavity, const ErrorBudget& budget,
                                  const PhotonEnvelope& envelope,
                                  const CalibrationTargets& targets) {
  if (targets.max_register == 0) fail(ErrorKind::invalid_parameters, "max_register must be >= 1");
  return bisect(
      [&](double o) {
        ErrorBudget b = budget;
        b.readout_overhead = o;
        return mean_fidelity_over_sizes(cavity, b, envelope, targets.max_register,
                                        targets.register_pitch) -
               targets.mean_register_fidelity;
      },
      0.0, 10.0 * budget.coherence_time, 60, "readout overhead");
}

PrepFit calibrate_preparation(const TweezerGrid& grid, const PrepConfig& config,
                              const CalibrationTargets& targets, std::uint64_t seed) {
  auto success = [&](double fill, double survival, std::size_t n) {
    TweezerGrid g = grid;
    g.fill_probability = fill;
    PrepConfig c = config;
    c.per_move_survival = survival;
    return simulate_preparation(g, TargetPattern::centered_row(g, n), c, targets.prep_trials,
                                seed)
        .success_probability;
  };
  // Inner: survival that gives the small-register target at this fill.
  // Outer: fill that then gives the large-register target.
  auto survival_for = [&](double fill) {
    auto f = [&](double s) { return success(fill, s, targets.prep_small_n) - targets.prep_success_small; };
    if (f(1.0) < 0.0) return 1.0;
    if (f(1e-3) > 0.0) return 1e-3;
    return bisect(f, 1e-3, 1.0, 20, "per-move survival");
  };
  const double fill = bisect(
      [&](double fill) {
        return success(fill, survival_for(fill), targets.prep_large_n) - targets.prep_success_large;
      },
      0.15, 0.95, 16, "fill probability");
  const double survival = survival_for(fill);
  return {fill, survival, success(fill, survival, targets.prep_small_n),
          success(fill, survival, targets.prep_large_n)};
}

}  // namespace cavreg
