#pragma once

#include <compare>
#include <span>
#include <utility>

namespace cavreg {

// Atom-cavity rates are angular frequencies (rad/s); lengths in metres.
struct CavityParams {
  double g0;             // coupling at the mode centre
  double kappa;          // total cavity field decay
  double kappa_out;      // decay through the outcoupling mirror
  double gamma;          // atomic polarization decay
  double waist_radius;   // transverse mode waist w0
  double beat_length;    // period of the axial trap/mode beat
  double cavity_length;

  // Metadata only; not used by any formula.
  double finesse = 61e3;
  double mirror_transmission_ppm_in = 4.0;
  double mirror_transmission_ppm_out = 92.0;

  static CavityParams defaults();

  // Throws Error(invalid_parameters) naming the first violated invariant.
  void validate() const;
};

struct AtomPosition {
  double x = 0.0;  // transverse to the cavity axis
  double y = 0.0;  // along the cavity axis

  friend auto operator<=>(const AtomPosition&, const AtomPosition&) = default;
};

double distance(const AtomPosition& a, const AtomPosition& b) noexcept;

struct EfficiencyFactors {
  double init_efficiency = 0.80;
  double transmission_detection = 0.64;
  double window_acceptance = 0.85;

  // Composite efficiency xi = init * transmission/detection.
  double xi() const noexcept { return init_efficiency * transmission_detection; }

  void validate() const;

  static EfficiencyFactors measured();  // xi = 0.512
  static EfficiencyFactors fitted();    // xi = 0.486 (transverse profile fit)
  // Keeps init_efficiency and rescales transmission so that xi() == xi.
  static EfficiencyFactors with_xi(double xi);
};

inline constexpr double fitted_xi = 0.486;

double cooperativity(const CavityParams& params, double g);
double intrinsic_photon_probability(const CavityParams& params, double g);
double coupling_at(const CavityParams& params, const AtomPosition& pos);

double detection_efficiency_at(const CavityParams& params, double xi, const AtomPosition& pos);
double detection_efficiency_at(const CavityParams& params, const EfficiencyFactors& factors,
                               const AtomPosition& pos);

struct XiFit {
  double xi;
  double residual;  // RMS misfit of eta
};

// Least-squares xi for the fixed transverse shape eta(x) = xi * P(g(x, 0)).
XiFit fit_xi_to_profile(std::span<const std::pair<double, double>> measurements,
                        const CavityParams& params);

}  // namespace cavreg
