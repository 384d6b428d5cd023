#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "linesol/closed_form.hpp"
#include "linesol/quadrature.hpp"
#include "linesol/special_functions.hpp"

using namespace linesol;

namespace {
const std::vector<double> kPowers = {1.5, 2.0, 3.0, 5.0};
const std::vector<double> kOmegas = {0.1, 0.3, 1.0, 2.5};
}  // namespace

TEST_CASE("omega_p closed form") {
  CHECK(omega_p(3.0) == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
  CHECK(omega_p(2.0) == 0.8);
  CHECK(omega_p(5.0) == 0.125);
  CHECK_THROWS_AS(omega_p(1.0), std::domain_error);
  CHECK_THROWS_AS(omega_p(0.5), std::domain_error);
  CHECK_THROWS_AS(SolitonParams(3.0, 0.0), std::domain_error);
  CHECK_THROWS_AS(SolitonParams(1.0, 1.0), std::domain_error);
}

TEST_CASE("gamma and sech integrals against tabulated values") {
  CHECK(std::fabs(gamma_fn(0.5) - std::sqrt(std::numbers::pi)) < 1e-14);
  CHECK(std::fabs(gamma_fn(5.0) - 24.0) < 1e-12);
  CHECK(std::fabs(gamma_fn(0.1) - 9.513507698668731836) < 1e-12);
  CHECK(std::fabs(sech_power_integral(2.0) - 2.0) < 1e-12);
  CHECK(std::fabs(sech_power_integral(4.0) - 4.0 / 3.0) < 1e-12);
  CHECK(std::fabs(sech_power_integral(1.0) - std::numbers::pi) < 1e-12);
  CHECK(std::fabs(sech_power_integral(3.0) - std::numbers::pi / 2.0) < 1e-12);
  CHECK(std::fabs(sech_power_integral(5.0) - 3.0 * std::numbers::pi / 8.0) < 1e-12);
  CHECK_THROWS_AS(sech_power_integral(0.0), std::domain_error);
}

TEST_CASE("sech integral matches quadrature for fractional exponents") {
  for (double s : {0.7, 1.3, 2.5, 6.25}) {
    const double quad = integrate_even([s](double t) { return sech_pow(t, s); }, 80.0 / s);
    CHECK(std::fabs(quad - sech_power_integral(s)) < 1e-12 * sech_power_integral(s));
  }
}

TEST_CASE("soliton spot values") {
  CHECK(std::fabs(soliton_value({3.0, 1.0}, 0.0) - std::sqrt(2.0)) < 1e-15);
  CHECK(std::fabs(soliton_value({2.0, 1.0}, 0.0) - 1.5) < 1e-15);
  CHECK(soliton_value({3.0, 1.0}, 40.0) < 1e-16);
  CHECK(soliton_value({3.0, 1.0}, -40.0) < 1e-16);
  const auto d = soliton_derivatives({3.0, 1.0}, 0.0);
  CHECK(d.dR_dx == 0.0);
  CHECK(std::fabs(d.dR_domega - std::sqrt(2.0) / 2.0) < 1e-15);
}

TEST_CASE("scaling form agrees with the explicit profile") {
  for (double p : kPowers) {
    for (double w : kOmegas) {
      const SolitonParams sp(p, w);
      const double r0 = soliton_value(sp, 0.0);
      for (double x = -30.0; x <= 30.0; x += 0.37) {
        CHECK(std::fabs(soliton_value(sp, x) - soliton_value_scaled(sp, x)) < 1e-13 * r0);
      }
    }
  }
}

TEST_CASE("profile is even, positive, decreasing and inside the envelopes") {
  for (double p : kPowers) {
    for (double w : kOmegas) {
      const SolitonParams sp(p, w);
      const double lo_c = std::pow(w, 1.0 / (p - 1.0));
      const double hi_c = std::pow(2.0 * (p + 1.0) * w, 1.0 / (p - 1.0));
      const double xmax = 40.0 / std::sqrt(w);
      double prev = soliton_value(sp, 0.0);
      for (int i = 1; i <= 2000; ++i) {
        const double x = xmax * i / 2000.0;
        const double r = soliton_value(sp, x);
        CHECK(r == soliton_value(sp, -x));
        CHECK(r > 0.0);
        CHECK(r < prev);
        const double env = std::exp(-std::sqrt(w) * x);
        CHECK(r >= lo_c * env);
        CHECK(r <= hi_c * env * (1 + 1e-12));  // asymptotically sharp
        prev = r;
      }
    }
  }
}

TEST_CASE("ODE residual with analytic second derivative") {
  for (double p : kPowers) {
    for (double w : kOmegas) {
      const SolitonParams sp(p, w);
      const double r0 = soliton_value(sp, 0.0);
      for (double x = -35.0; x <= 35.0; x += 0.11) {
        const double r = soliton_value(sp, x);
        const double res = -soliton_second_derivative(sp, x) + w * r - std::pow(r, p);
        CHECK(std::fabs(res) < 1e-10 * r0);
      }
    }
  }
}

TEST_CASE("derivatives match finite differences") {
  for (double p : kPowers) {
    for (double w : kOmegas) {
      const SolitonParams sp(p, w);
      const double h = 1e-5 * w;
      for (double x : {0.0, 0.3, 1.7, 4.0, -2.2}) {
        const double fd = (soliton_value({p, w + h}, x) - soliton_value({p, w - h}, x)) / (2 * h);
        const double an = soliton_derivatives(sp, x).dR_domega;
        CHECK(std::fabs(fd - an) <= 1e-8 * std::max(std::fabs(an), soliton_value(sp, x)));
        const double hx = 1e-5;
        const double fdx = (soliton_value(sp, x + hx) - soliton_value(sp, x - hx)) / (2 * hx);
        CHECK(std::fabs(fdx - soliton_derivatives(sp, x).dR_dx) < 1e-8 * soliton_value(sp, 0.0));
      }
    }
  }
}

TEST_CASE("psi normalization and envelope") {
  for (double p : kPowers) {
    for (double w : kOmegas) {
      const SolitonParams sp(p, w);
      const double n = integrate_even(
          [&](double x) { return psi_value(sp, x) * psi_value(sp, x); }, 40.0 / std::sqrt(w));
      CHECK(std::fabs(n * std::numbers::pi - 1.0) < 1e-12);
      const double rate = 0.5 * (p + 1.0) * std::sqrt(w);
      const double k = psi_value(sp, 0.0) * std::pow(2.0, 2.0 / (p - 1.0) * 0.5 * (p + 1.0));
      for (double x = 0.0; x < 30.0; x += 0.5) {
        CHECK(psi_value(sp, x) <= k * std::exp(-rate * x) * (1 + 1e-11));
      }
    }
  }
  const SolitonParams sp(3.0, 1.0 / 3.0);
  CHECK(std::fabs(soliton_power_integral(sp, 4.0) - 16.0 / (9.0 * std::sqrt(3.0))) < 1e-13);
}

TEST_CASE("integral identities") {
  const auto spot = identity_residuals({3.0, 1.0}, 3.0, 2.0);
  CHECK(std::fabs(spot.rhs_q - 2.0) < 1e-13);
  CHECK(std::fabs(spot.lhs_q - 2.0) < 1e-10);
  CHECK(spot.res_q < 1e-10);
  CHECK(spot.res_r < 1e-10);
  const SolitonParams s3(3.0, 1.0);
  CHECK(std::fabs(soliton_power_integral(s3, 5.0) / soliton_power_integral(s3, 3.0) - 1.5) < 1e-13);
  CHECK(identity_residuals({2.0, 0.7}, 1.0, 1.5).res_q < 1e-9);

  for (double p : kPowers) {
    for (double w : kOmegas) {
      for (double q : {1.0, 1.5, 3.0}) {
        for (double r : {1.25, 2.0, 4.0}) {
          const auto res = identity_residuals({p, w}, q, r);
          CHECK(res.res_q < 1e-9);
          CHECK(res.res_r < 1e-9);
        }
      }
    }
  }
  CHECK_THROWS_AS(identity_residuals({3.0, 1.0}, 0.5, 2.0), std::domain_error);
  CHECK_THROWS_AS(identity_residuals({3.0, 1.0}, 1.0, 1.0), std::domain_error);
}
