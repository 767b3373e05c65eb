#include <doctest.h>

#include <cmath>

#include "eap/ap_kernels.hpp"
#include "eap/rng.hpp"
#include "oracles.hpp"

using namespace eap;

TEST_CASE("temporal message hand cases, gamma=2 omega=1") {
  // consensus column, v = 0: linear branch, omega + v = 1
  CHECK(temporal_message(0.0, 2.0, 1.0, true) == doctest::Approx(1.0));
  // consensus column, v = -5: low saturation at -gamma+omega = -1
  CHECK(temporal_message(-5.0, 2.0, 1.0, true) == doctest::Approx(-1.0));
  // data column, v = 5: high saturation at gamma-omega = 1
  CHECK(temporal_message(5.0, 2.0, 1.0, false) == doctest::Approx(1.0));
}

TEST_CASE("gamma=omega=0 collapses the message to zero") {
  SplitMix64 rng(3);
  for (int k = 0; k < 1000; ++k) {
    double v = 50.0 * (rng.uniform01() - 0.5);
    CHECK(temporal_message(v, 0.0, 0.0, false) == 0.0);
    CHECK(temporal_message(v, 0.0, 0.0, true) == 0.0);
  }
}

TEST_CASE("four-branch value equals the un-simplified two-state max-sum") {
  SplitMix64 rng(11);
  int checked = 0;
  for (int k = 0; k < 100000; ++k) {
    double gamma = 4.0 * rng.uniform01();
    double omega = gamma * rng.uniform01();
    double u0 = 30.0 * (rng.uniform01() - 0.5);
    // mix of near-boundary and wide-range v
    double v = (k % 3 == 0) ? (rng.uniform01() - 0.5) * 2.2 * gamma
                            : 60.0 * (rng.uniform01() - 0.5);
    double u1 = u0 + v;
    bool in_c = rng.next() & 1;
    double expect = oracle::two_state_temporal(gamma, omega, u0, u1, in_c);
    double got = temporal_message(v, gamma, omega, in_c);
    CHECK(std::abs(expect - got) <= 1e-12);
    ++checked;
  }
  CHECK(checked == 100000);
}

TEST_CASE("clamp reformulation matches on random tuples") {
  SplitMix64 rng(12);
  for (int k = 0; k < 10000; ++k) {
    double gamma = 4.0 * rng.uniform01();
    double omega = gamma * rng.uniform01();
    double v = 40.0 * (rng.uniform01() - 0.5);
    bool in_c = rng.next() & 1;
    CHECK(std::abs(oracle::clamped_temporal(gamma, omega, v, in_c) -
                   temporal_message(v, gamma, omega, in_c)) <= 1e-12);
  }
}

TEST_CASE("the (not d1, d2) branch never fires for gamma >= omega >= 0") {
  SplitMix64 rng(13);
  long fired = 0;
  for (long k = 0; k < 1000000; ++k) {
    double gamma = 4.0 * rng.uniform01();
    double omega = gamma * rng.uniform01();
    double v = (k % 2) ? 60.0 * (rng.uniform01() - 0.5)
                       : (rng.uniform01() - 0.5) * 2.2 * gamma;
    bool in_c = rng.next() & 1;
    if (temporal_branch(v, gamma, omega, in_c) == 2) ++fired;
  }
  CHECK(fired == 0);
}

TEST_CASE("message stays within its saturation bounds") {
  SplitMix64 rng(14);
  for (int k = 0; k < 20000; ++k) {
    double gamma = 3.0 * rng.uniform01();
    double omega = gamma * rng.uniform01();
    double v = 50.0 * (rng.uniform01() - 0.5);
    bool in_c = rng.next() & 1;
    double m = temporal_message(v, gamma, omega, in_c);
    CHECK(m >= -gamma + omega - 1e-15);
    CHECK(m <= gamma - (in_c ? 0.0 : omega) + 1e-15);
  }
}
