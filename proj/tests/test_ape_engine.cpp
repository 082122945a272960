#include <doctest.h>

#include <cmath>
#include <numbers>

#include "cavreg/ape_engine.hpp"
#include "cavreg/error.hpp"

using namespace cavreg;

namespace {

const double kOmegaL = 2.0 * std::numbers::pi * 1e5;

ErrorBudget zero_budget() {
  ErrorBudget b;
  b.larmor_frequency = 0.0;
  b.spam_infidelity = 0.0;
  b.rotation_infidelity = 0.0;
  b.polarization_infidelity = 0.0;
  b.time_per_atom = 0.0;
  b.readout_overhead = 0.0;
  return b;
}

void check_physical(const TwoQubitState& s) {
  CHECK(TwoQubitState::check(s.rho()).empty());
  CHECK(s.rho().trace().real() == doctest::Approx(1.0).epsilon(1e-12));
}

}  // namespace

TEST_SUITE("ape_engine") {

TEST_CASE("ideal Bell state") {
  const auto bell = ideal_bell_state();
  CHECK(fidelity_with_bell(bell) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(std::abs(bell.rho()(up_R, down_L) - 0.5) < 1e-15);
  CHECK(fidelity_with_bell(TwoQubitState::maximally_mixed()) == doctest::Approx(0.25));
}

TEST_CASE("unphysical matrices are rejected") {
  Matrix4c m = Matrix4c::Identity() / 4.0;
  m(0, 1) = 0.1;  // not Hermitian
  CHECK_THROWS_AS(TwoQubitState{m}, Error);

  Matrix4c t = Matrix4c::Identity() / 2.0;  // trace 2
  CHECK_THROWS_AS(TwoQubitState{t}, Error);

  Matrix4c neg = Matrix4c::Zero();
  neg(0, 0) = 1.2;
  neg(1, 1) = -0.2;  // negative eigenvalue
  CHECK_THROWS_AS(TwoQubitState{neg}, Error);
}

TEST_CASE("uniform envelope chirp matches the sinc integral") {
  // |1/tau int_0^tau exp(-2i w t) dt| = |sin(w tau) / (w tau)|, w tau = pi/4.
  const double tau = 1.25e-6;
  const double v = chirp_visibility(PhotonEnvelope::uniform(tau), kOmegaL);
  const double x = kOmegaL * tau;
  CHECK(std::abs(v - std::sin(x) / x) < 1e-7);
  const double f = 0.5 * (1.0 + std::sin(std::numbers::pi / 4) / (std::numbers::pi / 4));
  CHECK(std::abs(0.5 * (1.0 + v) - f) < 1e-6);
  CHECK(f == doctest::Approx(0.9502).epsilon(1e-4));
}

TEST_CASE("front-peaked acceptance agrees with direct integration") {
  const double rise = 0.1e-6;
  const double decay = 0.6e-6;
  // Integrate the untruncated shape over 40 decay times by trapezoid.
  auto integrate = [&](double upper) {
    const int n = 200000;
    double s = 0.0;
    for (int k = 0; k <= n; ++k) {
      const double t = upper * k / n;
      const double w = (k == 0 || k == n) ? 0.5 : 1.0;
      s += w * (1.0 - std::exp(-t / rise)) * std::exp(-t / decay);
    }
    return s * upper / n;
  };
  const double expected = integrate(1.25e-6) / integrate(40 * decay);
  CHECK(PhotonEnvelope::front_peaked_acceptance(rise, decay, 1.25e-6) ==
        doctest::Approx(expected).epsilon(1e-6));
}

TEST_CASE("dephasing and depolarizing act as advertised on the Bell state") {
  const auto bell = ideal_bell_state();
  for (double v : {0.0, 0.3, 0.9003, 1.0})
    CHECK(fidelity_with_bell(dephase_atom(bell, v)) == doctest::Approx(0.5 * (1.0 + v)));
  for (double eps : {0.0, 0.008, 0.025, 0.2})
    CHECK(fidelity_with_bell(depolarize(bell, eps)) == doctest::Approx(1.0 - eps).epsilon(1e-14));
}

TEST_CASE("an all-zero budget leaves the state unchanged") {
  Rng rng(3);
  const auto s = random_physical_state(rng);
  const auto out = apply_error_channels(s, zero_budget(), PhotonEnvelope::uniform(1.25e-6),
                                        SequenceSlot{0, 1});
  CHECK((out.rho() - s.rho()).norm() < 1e-14);
}

TEST_CASE("storage time and slot checks") {
  ErrorBudget b;
  b.readout_overhead = 100e-6;
  CHECK(storage_time(b, {0, 6}) == doctest::Approx(6 * 15e-6 + 100e-6));
  CHECK(storage_time(b, {5, 6}) == doctest::Approx(15e-6 + 100e-6));
  try {
    storage_time(b, {6, 6});
    FAIL("expected invalid_slot");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::invalid_slot);
  }
}

TEST_CASE("earlier slots decohere more") {
  ErrorBudget b;
  b.readout_overhead = 100e-6;
  const auto env = PhotonEnvelope::front_peaked(0.1e-6, 0.6e-6, 1.25e-6);
  double prev = 0.0;
  for (std::size_t i = 0; i < 6; ++i) {
    const double f = fidelity_with_bell(apply_error_channels(ideal_bell_state(), b, env, {i, 6}));
    CHECK(f > prev);
    prev = f;
  }
}

TEST_CASE("error channels keep random states physical") {
  Rng rng(17);
  ErrorBudget b;
  b.readout_overhead = 100e-6;
  const auto env = PhotonEnvelope::front_peaked(0.1e-6, 0.6e-6, 1.25e-6);
  for (int k = 0; k < 200; ++k) {
    const auto s = random_physical_state(rng);
    check_physical(s);
    const auto out = apply_error_channels(s, b, env, {static_cast<std::size_t>(k % 6), 6});
    check_physical(out);
  }
}

TEST_CASE("coherence fidelity") {
  CHECK(coherence_fidelity(0.0, 1e-3) == 1.0);
  CHECK(coherence_fidelity(99 * 15e-6, 20e-3) == doctest::Approx(0.5 * (1 + std::exp(-1.485 / 20))));
  CHECK(coherence_fidelity(99 * 15e-6, 100e-3) == doctest::Approx(0.9926).epsilon(1e-4));
  CHECK_THROWS_AS(coherence_fidelity(-1.0, 1e-3), Error);
}

TEST_CASE("budget validation") {
  ErrorBudget b;
  b.spam_infidelity = 0.9;
  CHECK_THROWS_AS(b.validate(), Error);
  ErrorBudget c;
  c.coherence_time = 0.0;
  CHECK_THROWS_AS(c.validate(), Error);
}

TEST_CASE("text form has one matrix row per line") {
  const auto text = ideal_bell_state().to_text();
  CHECK(std::count(text.begin(), text.end(), '\n') == 4);
}

}
