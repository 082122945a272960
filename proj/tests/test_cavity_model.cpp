#include <doctest.h>

#include <cmath>
#include <utility>
#include <vector>

#include "cavreg/cavity_model.hpp"
#include "cavreg/error.hpp"
#include "cavreg/units.hpp"

using namespace cavreg;
using units::um;

TEST_SUITE("cavity_model") {

TEST_CASE("cooperativity and photon probability at the default rates") {
  const auto p = CavityParams::defaults();
  // Rates in 2 pi MHz: C = 5^2 / (2 * 2.5 * 3) = 5/3.
  CHECK(cooperativity(p, p.g0) == doctest::Approx(5.0 / 3.0).epsilon(1e-12));
  // (2.3/2.5) * (10/3) / (13/3)
  CHECK(intrinsic_photon_probability(p, p.g0) == doctest::Approx(0.92 * 10.0 / 13.0).epsilon(1e-12));
  CHECK(intrinsic_photon_probability(p, 0.0) == 0.0);
}

TEST_CASE("centre efficiency for measured and fitted xi") {
  const auto p = CavityParams::defaults();
  const double P = 0.92 * 10.0 / 13.0;
  CHECK(detection_efficiency_at(p, EfficiencyFactors::measured(), {}) ==
        doctest::Approx(0.512 * P).epsilon(1e-12));
  CHECK(detection_efficiency_at(p, EfficiencyFactors::fitted(), {}) ==
        doctest::Approx(0.486 * P).epsilon(1e-12));
  CHECK(EfficiencyFactors::measured().xi() == doctest::Approx(0.512));
  CHECK(EfficiencyFactors::with_xi(0.3).xi() == doctest::Approx(0.3));
}

TEST_CASE("coupling follows the gaussian waist and the axial beat") {
  const auto p = CavityParams::defaults();
  CHECK(coupling_at(p, {30 * um, 0}) == doctest::Approx(p.g0 / std::exp(1.0)).epsilon(1e-12));
  CHECK(coupling_at(p, {0, 16 * um}) / p.g0 < 1e-12);
  CHECK(coupling_at(p, {0, 32 * um}) == doctest::Approx(p.g0).epsilon(1e-12));
  CHECK(coupling_at(p, {0, 8 * um}) == doctest::Approx(p.g0 * std::sqrt(0.5)).epsilon(1e-12));
}

TEST_CASE("efficiency is symmetric and falls off away from the centre") {
  const auto p = CavityParams::defaults();
  double prev = detection_efficiency_at(p, 0.5, {});
  for (double x = 1 * um; x <= 40 * um; x += 1 * um) {
    const double e = detection_efficiency_at(p, 0.5, {x, 0});
    CHECK(e < prev);
    CHECK(e == doctest::Approx(detection_efficiency_at(p, 0.5, {-x, 0})));
    prev = e;
  }
}

TEST_CASE("xi fit recovers the generating value") {
  const auto p = CavityParams::defaults();
  std::vector<std::pair<double, double>> data;
  for (double x : {-15.0, -8.0, 0.0, 5.5, 11.0, 20.0})
    data.emplace_back(x * um, detection_efficiency_at(p, 0.486, {x * um, 0}));
  const auto fit = fit_xi_to_profile(data, p);
  CHECK(fit.xi == doctest::Approx(0.486).epsilon(1e-12));
  CHECK(fit.residual < 1e-12);

  const std::vector<std::pair<double, double>> one{{0.0, 0.3623}};
  CHECK(fit_xi_to_profile(one, p).xi == doctest::Approx(0.3623 / (0.92 * 10.0 / 13.0)));
}

TEST_CASE("xi fit rejects degenerate data") {
  const auto p = CavityParams::defaults();
  const std::vector<std::pair<double, double>> empty;
  const std::vector<std::pair<double, double>> zeros{{0.0, 0.0}, {1e-6, 0.0}};
  for (const auto* d : {&empty, &zeros}) {
    try {
      fit_xi_to_profile(*d, p);
      FAIL("expected degenerate_fit");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::degenerate_fit);
    }
  }
}

TEST_CASE("parameter validation") {
  auto p = CavityParams::defaults();
  p.kappa_out = 2.0 * p.kappa;
  CHECK_THROWS_AS(p.validate(), Error);
  auto q = CavityParams::defaults();
  q.gamma = 0.0;
  CHECK_THROWS_AS(q.validate(), Error);
  EfficiencyFactors f;
  f.init_efficiency = 1.5;
  CHECK_THROWS_AS(f.validate(), Error);
}

}
