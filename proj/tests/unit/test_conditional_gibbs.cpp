#include <doctest.h>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <vector>

#include "edp/conditional_gibbs.hpp"
#include "edp/error.hpp"
#include "edp/tilted_calculus.hpp"

using namespace edp;

TEST_CASE("growth condition increases with a_n for Weibull k=2") {
  const DensitySpec w = weibull(2.0);
  double prev = 0.0;
  for (double a : {2.0, 4.0, 8.0}) {
    const double g = growth_condition(w, 100, a);
    CHECK(g > prev);
    prev = g;
  }
  CHECK(make_point(w, 100, 8.0).growth_warning);
  CHECK_FALSE(make_point(w, 100, 1.0).growth_warning);
}

TEST_CASE("two-summand oracle against direct quadrature") {
  const DensitySpec w = weibull(2.0);
  const double a = 2.0;
  auto p = [&](double y) { return y > 0.0 ? std::exp(log_density(w, y)) : 0.0; };
  const double f2 = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(
      [&](double y) { return p(y) * p(2 * a - y); }, 0.0, 2 * a, 15, 1e-13);
  // The grid sum for f_2 carries the endpoint term dx^2/12 (F'(2a) - F'(0))
  // of F(y) = p(y) p(2a - y), which is -dx^2 p(2a) / 3 since p'(0) = 2.
  OracleOptions o;
  o.dx = 0.005;
  const ConditionalOracle oracle(w, 2, a, o);
  const double f2_grid = f2 - o.dx * o.dx * p(2 * a) / 3.0;
  for (double y : {0.3, 1.0, 2.0, 3.3}) {
    const double y1[] = {y};
    const double expected = std::log(p(y) * p(2 * a - y) / f2_grid);
    CHECK(oracle.log_conditional(y1) == doctest::Approx(expected).epsilon(1e-8));
  }
}

TEST_CASE("conditional law is invariant under tilting the base") {
  const DensitySpec w = weibull(2.0);
  const int n = 8;
  const double a = 3.0;
  OracleOptions o;
  o.base = OracleBase::AsGiven;
  o.method = ConvolutionMethod::Direct;
  o.dx = 0.01;
  const ConditionalOracle plain(w, n, a, o);
  for (double alpha : {a, 2 * a}) {
    const DensitySpec tilted = tilt_spec(w, solve_tilt(w, alpha).t);
    const ConditionalOracle other(tilted, n, a, o);
    for (double y : {1.0, 2.5, 3.0, 4.2}) {
      const double y2[] = {y, 3.1};
      CHECK(other.log_conditional(y2) == doctest::Approx(plain.log_conditional(y2)).epsilon(1e-8));
    }
  }
}

TEST_CASE("sequential tilts: residual means and errors") {
  const DensitySpec w = weibull(2.0);
  const ConditioningPoint pt = make_point(w, 10, 3.0, 3);
  const std::vector<double> y{2.5, 3.5, 3.0};
  const SequentialTilts s = sequential_tilts(w, pt, y);
  REQUIRE(s.m_list.size() == 3);
  CHECK(s.m_list[0] == doctest::Approx(3.0));
  CHECK(s.m_list[1] == doctest::Approx((30.0 - 2.5) / 9.0));
  for (std::size_t i = 0; i < s.t_list.size(); ++i) {
    CHECK(moments(w, s.t_list[i]).m == doctest::Approx(s.m_list[i]).epsilon(1e-8));
  }
  const std::vector<double> huge{29.0, 0.5};
  try {
    sequential_tilts(w, make_point(w, 10, 3.0, 2), huge);
    FAIL("expected sub-mean residual");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::SubMeanResidual);
  }
}

TEST_CASE("fixed Gibbs density is the product of tilted densities") {
  const DensitySpec w = weibull(2.0);
  const ConditioningPoint pt = make_point(w, 16, 3.0, 2);
  const std::vector<double> y{2.0, 3.5};
  const double expected = tilted_log_density(w, pt.t, 2.0) + tilted_log_density(w, pt.t, 3.5);
  CHECK(gibbs_fixed(w, pt, y) == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("oracle marginal is a density and TV shrinks with n") {
  const DensitySpec w = weibull(2.0);
  double prev = 1.0;
  for (int n : {8, 16}) {
    const ConditionalReport r = tv_distance(w, make_point(w, n, 3.0));
    CHECK(r.exact_mass == doctest::Approx(1.0).epsilon(1e-8));
    CHECK(r.tv_fixed < prev);
    CHECK(r.tv_fixed > 0.0);
    prev = r.tv_fixed;
  }
}

TEST_CASE("oracle regime limits") {
  const DensitySpec w = weibull(2.0);
  CHECK_THROWS_AS(ConditionalOracle(w, 65, 3.0), Error);
  const ConditionalOracle o(w, 4, 3.0);
  try {
    o.log_fold(2, 1e3);
    FAIL("expected incompatible condition");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::IncompatibleCondition);
  }
}

TEST_CASE("concentration of the tilted law") {
  const DensitySpec w = weibull(2.0);
  const auto rows = concentration_check(w, {2.0, 8.0}, {-3.0, -1.0, 0.0, 1.0, 3.0});
  REQUIRE(rows.size() == 2);
  CHECK(rows[1].tail_mass_3s <= 0.05);
  CHECK(rows[1].max_ratio_deviation < rows[0].max_ratio_deviation);
}

TEST_CASE("Gaussian baseline is a normalised grid density") {
  const DensitySpec w = weibull(2.0);
  const ConditionalReport r = tv_distance(w, make_point(w, 8, 3.0));
  CHECK(r.gaussian_baseline.mass == doctest::Approx(1.0).epsilon(1e-8));
  CHECK(r.tv_gaussian >= 0.0);
  CHECK(r.tv_gaussian <= 1.0);
}
