#include <doctest.h>

#include <cmath>
#include <random>

#include "cavreg/error.hpp"
#include "cavreg/multiplex.hpp"
#include "support.hpp"

using namespace cavreg;

TEST_SUITE("multiplex") {

TEST_CASE("multiplex efficiency examples") {
  const std::vector<double> one{0.332};
  CHECK(multiplex_efficiency(one) == doctest::Approx(0.332));
  const std::vector<double> six(6, 0.332);
  CHECK(multiplex_efficiency(six) == doctest::Approx(1.0 - std::pow(0.668, 6)));
  CHECK(multiplex_efficiency(six) == doctest::Approx(0.911).epsilon(1e-3));
  const std::vector<double> zeros(4, 0.0);
  CHECK(multiplex_efficiency(zeros) == 0.0);
  CHECK(multiplex_efficiency(std::vector<double>{}) == 0.0);
  CHECK_THROWS_AS(multiplex_efficiency(std::vector<double>{1.2}), Error);
}

TEST_CASE("appending an atom never lowers the efficiency") {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int k = 0; k < 500; ++k) {
    std::vector<double> etas;
    double prev = 0.0;
    for (int n = 0; n < 8; ++n) {
      etas.push_back(k % 5 == 0 ? 0.0 : u(rng));
      const double e = multiplex_efficiency(etas);
      CHECK(e >= prev);
      prev = e;
    }
  }
}

TEST_CASE("product form agrees with the log-domain reference to 1e-15") {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int k = 0; k < 2000; ++k) {
    std::vector<double> etas(1 + k % 6);
    for (double& e : etas) e = u(rng);
    CHECK(std::abs(multiplex_efficiency(etas) - multiplex_efficiency_log_reference(etas)) <= 1e-15);
  }
}

TEST_CASE("photon number") {
  CHECK(expected_photon_number(std::vector<double>{0.332}) == doctest::Approx(0.332));
  CHECK(expected_photon_number(std::vector<double>{}) == 0.0);
  CHECK(expected_photon_number(std::vector<double>{0.1, 0.2, 0.3}) == doctest::Approx(0.6));
}

TEST_CASE("fiber efficiency inversion") {
  const auto one = infer_fiber_efficiency(0.332, 0.70, 1);
  CHECK(one.per_atom == doctest::Approx(0.332 / 0.70));
  CHECK(one.aggregate == doctest::Approx(0.332 / 0.70));
  const auto ident = infer_fiber_efficiency(0.886, 1.0, 6);
  CHECK(ident.aggregate == doctest::Approx(0.886));
  // Forward model round trip.
  const auto six = infer_fiber_efficiency(0.886, 0.70, 6);
  CHECK(1.0 - std::pow(1.0 - 0.70 * six.per_atom, 6) == doctest::Approx(0.886));
  CHECK(six.aggregate == doctest::Approx(0.974).epsilon(0.01));
  try {
    infer_fiber_efficiency(0.9, 0.5, 1);
    FAIL("expected out_of_range");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::out_of_range);
  }
  CHECK_THROWS_AS(infer_fiber_efficiency(0.5, 0.0, 1), Error);
}

TEST_CASE("distribution rate") {
  LinkConfig link;
  link.distance = 100e3;
  const std::vector<double> one{0.332};
  CHECK(distribution_rate(link, one) == doctest::Approx(664.0));
  const std::vector<double> three(3, 0.3);
  const std::vector<double> six(6, 0.3);
  CHECK(distribution_rate(link, six) == doctest::Approx(2.0 * distribution_rate(link, three)));
  link.distance = 0.0;
  CHECK(distribution_rate(link, six) == doctest::Approx(1.8 / (6 * 15e-6)));
  link.signal_velocity = 0.0;
  CHECK_THROWS_AS(distribution_rate(link, six), Error);
}

TEST_CASE("Monte-Carlo attempts agree within 3 sigma") {
  const std::vector<double> etas{0.20, 0.27, 0.31, 0.33, 0.31, 0.27};
  const std::size_t n = 100000;
  const auto mc = simulate_attempts(etas, n, 4);
  const double p = multiplex_efficiency(etas);
  CHECK(testing::within_binomial(mc.heralded, n, p));
  double var = 0.0;
  for (double e : etas) var += e * (1.0 - e);
  CHECK(std::abs(mc.mean_photons - expected_photon_number(etas)) <= 3.0 * std::sqrt(var / n));

  const auto serial_mc = serial::simulate_attempts(etas, n, 4);
  CHECK(serial_mc.heralded == mc.heralded);
  CHECK(serial_mc.photons == mc.photons);
}

TEST_CASE("register report") {
  const auto cavity = CavityParams::defaults();
  ErrorBudget b;
  b.readout_overhead = 100e-6;
  const auto env = PhotonEnvelope::front_peaked(0.1e-6, 0.6e-6, 1.25e-6);

  const auto single = register_report(RegisterLayout::centered_row(1, 5.5e-6), cavity, 0.5, b, env);
  CHECK(single.eta_overall == doctest::Approx(0.5 * intrinsic_photon_probability(cavity, cavity.g0)));
  CHECK(single.mean_photon_number == doctest::Approx(single.eta_overall));

  const auto row = register_report(RegisterLayout::centered_row(6, 5.5e-6), cavity, 0.5, b, env);
  const auto& e = row.layout.per_atom_efficiency;
  CHECK(e[0] == doctest::Approx(e[5]));
  CHECK(e[0] < e[1]);
  CHECK(e[1] < e[2]);
  CHECK(row.eta_overall == doctest::Approx(multiplex_efficiency(e)));
}

TEST_CASE("square register: displaced atoms lose efficiency, not fidelity") {
  const auto cavity = CavityParams::defaults();
  ErrorBudget b;
  b.readout_overhead = 100e-6;
  const auto env = PhotonEnvelope::front_peaked(0.1e-6, 0.6e-6, 1.25e-6);
  // Corner atoms of a 2x2 square, 5.5 um in x and 8 um along the cavity axis.
  const auto square = RegisterLayout::from_positions(
      {{0.0, 0.0}, {5.5e-6, 0.0}, {0.0, 8e-6}, {5.5e-6, 8e-6}});
  const auto r = register_report(square, cavity, 0.5, b, env);
  const auto& e = r.layout.per_atom_efficiency;
  CHECK(e[1] < e[0]);
  CHECK(e[2] < e[0]);
  CHECK(e[3] < e[1]);
  CHECK(e[3] < e[2]);

  const auto line = register_report(RegisterLayout::centered_row(4, 5.5e-6), cavity, 0.5, b, env);
  CHECK(std::abs(r.mean_fidelity - line.mean_fidelity) < 0.01);
  for (std::size_t i = 0; i < 4; ++i)
    CHECK(r.layout.per_atom_fidelity[i] == doctest::Approx(line.layout.per_atom_fidelity[i]));
}

TEST_CASE("calibrated register: flat mean fidelity across sizes") {
  const auto cfg = testing::default_config();
  double lo = 1.0, hi = 0.0;
  for (std::size_t n = 1; n <= 6; ++n) {
    const auto r = register_report(RegisterLayout::centered_row(n, cfg.register_pitch), cfg.cavity,
                                   cfg.calibrated_xi(), cfg.calibrated_budget(),
                                   cfg.calibrated_envelope());
    lo = std::min(lo, r.mean_fidelity);
    hi = std::max(hi, r.mean_fidelity);
  }
  CHECK(hi - lo < 0.015);
}

}
