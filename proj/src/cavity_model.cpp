#include "cavreg/cavity_model.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "cavreg/error.hpp"
#include "cavreg/units.hpp"

namespace cavreg {

namespace {

void require(bool ok, const char* what) {
  if (!ok) fail(ErrorKind::invalid_parameters, what);
}

void require_probability(double p, const char* what) {
  require(std::isfinite(p) && p >= 0.0 && p <= 1.0, what);
}

}  // namespace

CavityParams CavityParams::defaults() {
  using namespace units;
  return CavityParams{
      .g0 = angular_mhz(5.0),
      .kappa = angular_mhz(2.5),
      .kappa_out = angular_mhz(2.3),
      .gamma = angular_mhz(3.0),
      .waist_radius = 30.0 * um,
      .beat_length = 32.0 * um,
      .cavity_length = 485.0 * um,
  };
}

void CavityParams::validate() const {
  require(g0 > 0.0, "g0 must be > 0");
  require(kappa > 0.0, "kappa must be > 0");
  require(kappa_out > 0.0, "kappa_out must be > 0");
  require(gamma > 0.0, "gamma must be > 0");
  require(kappa_out <= kappa, "kappa_out must not exceed kappa");
  require(waist_radius > 0.0, "waist_radius must be > 0");
  require(beat_length > 0.0, "beat_length must be > 0");
  require(cavity_length > 0.0, "cavity_length must be > 0");
}

double distance(const AtomPosition& a, const AtomPosition& b) noexcept {
  return std::hypot(a.x - b.x, a.y - b.y);
}

void EfficiencyFactors::validate() const {
  require_probability(init_efficiency, "init_efficiency must be in [0,1]");
  require_probability(transmission_detection, "transmission_detection must be in [0,1]");
  require_probability(window_acceptance, "window_acceptance must be in [0,1]");
}

EfficiencyFactors EfficiencyFactors::measured() { return {}; }

EfficiencyFactors EfficiencyFactors::fitted() { return with_xi(fitted_xi); }

EfficiencyFactors EfficiencyFactors::with_xi(double xi) {
  EfficiencyFactors f;
  require_probability(xi, "xi must be in [0,1]");
  require(xi <= f.init_efficiency, "xi cannot exceed init_efficiency");
  f.transmission_detection = xi / f.init_efficiency;
  return f;
}

double cooperativity(const CavityParams& params, double g) {
  params.validate();
  require(g >= 0.0, "coupling g must be >= 0");
  return g * g / (2.0 * params.kappa * params.gamma);
}

double intrinsic_photon_probability(const CavityParams& params, double g) {
  const double c = cooperativity(params, g);
  return (params.kappa_out / params.kappa) * (2.0 * c / (2.0 * c + 1.0));
}

double coupling_at(const CavityParams& params, const AtomPosition& pos) {
  params.validate();
  const double r = pos.x / params.waist_radius;
  const double axial = std::abs(std::cos(std::numbers::pi * pos.y / params.beat_length));
  return params.g0 * std::exp(-r * r) * axial;
}

double detection_efficiency_at(const CavityParams& params, double xi, const AtomPosition& pos) {
  require_probability(xi, "xi must be in [0,1]");
  return xi * intrinsic_photon_probability(params, coupling_at(params, pos));
}

double detection_efficiency_at(const CavityParams& params, const EfficiencyFactors& factors,
                               const AtomPosition& pos) {
  factors.validate();
  return detection_efficiency_at(params, factors.xi(), pos);
}

XiFit fit_xi_to_profile(std::span<const std::pair<double, double>> measurements,
                        const CavityParams& params) {
  if (measurements.empty()) fail(ErrorKind::degenerate_fit, "no measurements");

  double sum_em = 0.0;
  double sum_mm = 0.0;
  bool any_signal = false;
  for (const auto& [x, eta] : measurements) {
    const double shape = intrinsic_photon_probability(params, coupling_at(params, {x, 0.0}));
    sum_em += eta * shape;
    sum_mm += shape * shape;
    any_signal = any_signal || eta != 0.0;
  }
  if (!any_signal) fail(ErrorKind::degenerate_fit, "all efficiencies are zero");
  if (sum_mm <= 0.0) fail(ErrorKind::degenerate_fit, "model shape vanishes at every x");

  const double xi = sum_em / sum_mm;
  double ss = 0.0;
  for (const auto& [x, eta] : measurements) {
    const double shape = intrinsic_photon_probability(params, coupling_at(params, {x, 0.0}));
    const double r = eta - xi * shape;
    ss += r * r;
  }
  return {xi, std::sqrt(ss / static_cast<double>(measurements.size()))};
}

}  // namespace cavreg
