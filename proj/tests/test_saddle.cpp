#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "casimir/constants.hpp"
#include "casimir/error.hpp"
#include "casimir/saddle.hpp"
#include "test_util.hpp"

using namespace casimir;
using testutil::rel;

TEST_SUITE("saddle") {
  TEST_CASE("matrix structure") {
    const auto m1 = build_m_r(1, 0.3);
    CHECK(m1(0, 0) == 1.0);
    CHECK(m1(0, 1) == -1.0);
    CHECK(m1(1, 0) == -1.0);
    CHECK(m1(1, 1) == 1.0);

    const auto m2 = build_m_r(2, 0.3);
    REQUIRE(m2.size() == 4);
    for (int i = 0; i < 4; ++i) {
      CHECK(m2(i, i) == 1.0);
      const double right = m2(i, (i + 1) % 4);
      const double left = m2(i, (i + 3) % 4);
      CHECK(((right == doctest::Approx(-0.7) && left == doctest::Approx(-0.3)) ||
             (right == doctest::Approx(-0.3) && left == doctest::Approx(-0.7))));
      CHECK(m2(i, (i + 2) % 4) == 0.0);
    }
    CHECK(m2(0, 1) != m2(1, 2));  // couplings alternate

    for (int r = 1; r <= 8; ++r) {
      for (double mu : {0.0, 0.1, 0.3, 0.5}) {
        const auto m = build_m_r(r, mu);
        for (int i = 0; i < m.size(); ++i) {
          double sum = 0.0;
          for (int j = 0; j < m.size(); ++j) {
            sum += m(i, j);
            CHECK(m(i, j) == m(j, i));
          }
          CHECK(std::abs(sum) < 1e-15);
        }
      }
    }
    CHECK_THROWS_AS(build_m_r(0, 0.3), Error);
    CHECK_THROWS_AS(build_m_r(2, 0.6), Error);
    CHECK_THROWS_AS(build_m_r(2, -0.1), Error);
  }

  TEST_CASE("eigenvalue examples") {
    const auto e1 = eigenvalues(1, 0.2);
    REQUIRE(e1.size() == 2);
    CHECK(std::abs(e1[0]) < 1e-15);
    CHECK(e1[1] == doctest::Approx(2.0));
    auto e2 = eigenvalues(2, 0.5);
    REQUIRE(e2.size() == 4);
    CHECK(std::abs(e2[0]) < 1e-15);
    CHECK(e2[1] == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(e2[2] == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(e2[3] == doctest::Approx(2.0).epsilon(1e-15));
  }

  TEST_CASE("eigenvalues match numeric diagonalization") {
    double worst = 0.0;
    for (int r = 1; r <= 8; ++r) {
      for (double mu : {0.0, 0.1, 0.3, 0.5}) {
        const auto m = build_m_r(r, mu);
        const auto numeric = symmetric_eigenvalues(m.entries, m.size());
        const auto closed = eigenvalues(r, mu);
        REQUIRE(numeric.size() == closed.size());
        for (size_t i = 0; i < closed.size(); ++i) worst = std::max(worst, std::abs(numeric[i] - closed[i]));
        CHECK(std::abs(closed[0]) < 1e-15);
        // one zero mode per block for mu in (0, 1/2]
        if (mu > 0.0 && r > 1) CHECK(closed[1] > 1e-3);
      }
    }
    CHECK(worst < 1e-12);
  }

  TEST_CASE("plane-sphere limit of the small eigenvalues") {
    // (R1 + R2) lambda_-^(j) -> 2 R1 sin^2(pi j / r) as mu -> 0
    const int r = 5;
    const double R1 = 1.0;
    for (double mu : {1e-4, 1e-6}) {
      const double R2 = R1 * (1.0 - mu) / mu;
      auto ev = eigenvalues(r, mu);
      std::vector<double> expect;
      for (int j = 0; j < r; ++j) {
        const double s = std::sin(constants::pi * j / r);
        expect.push_back(2.0 * R1 * s * s);
      }
      std::sort(expect.begin(), expect.end());
      for (int j = 0; j < r; ++j) CHECK(std::abs((R1 + R2) * ev[j] - expect[j]) < 10.0 * mu);
    }
  }

  TEST_CASE("sine product") {
    CHECK(sine_product(1) == 1.0);
    CHECK(sine_product(3) == doctest::Approx(0.75).epsilon(1e-15));
    CHECK(sine_product(6) == doctest::Approx(0.1875).epsilon(1e-15));
    CHECK(sine_product_direct(3) == doctest::Approx(0.75).epsilon(1e-15));
    for (int r = 1; r <= 30; ++r) CHECK(rel(sine_product(r), sine_product_direct(r)) < 1e-14);
    CHECK_THROWS_AS(sine_product(0), Error);
  }

  TEST_CASE("hessian product") {
    const double k = 3e6;
    const double kappa = 4e6;
    double worst = 0.0;
    for (int r = 1; r <= 5; ++r) {
      for (double mu : {0.1, 0.3, 0.5}) {
        const double R1 = 1e-5;
        const double R2 = R1 * (1.0 - mu) / mu;
        const double closed = hessian_nonzero_product(r, mu, R1, R2, k, kappa);
        const double numeric = hessian_nonzero_product_numeric(r, mu, R1, R2, k, kappa);
        worst = std::max(worst, rel(closed, numeric));
        // the radii cancel against (R1 R2)^r / R_eff
        const double reff = R1 * R2 / (R1 + R2);
        const double scaled = closed * std::pow(R1 * R2, r) / reff;
        const double expect = (1.0 / (4.0 * r * r)) * (k / kappa) * std::pow(4.0 * kappa * kappa / (k * k), r);
        CHECK(rel(scaled, expect) < 1e-13);
      }
    }
    CHECK(worst < 1e-12);
    CHECK_THROWS_AS(hessian_nonzero_product(2, 0.3, 1.0, 2.0, 0.0, 1.0), Error);
  }
}
