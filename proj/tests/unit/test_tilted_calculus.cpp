#include <doctest.h>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <cmath>
#include <cstring>
#include <random>

#include "edp/error.hpp"
#include "edp/tilted_calculus.hpp"

using namespace edp;

namespace {

// log int e^{tx} p(x) dx, shifted by the maximiser of the integrand.
double oracle_log_mgf(const DensitySpec& spec, double t) {
  const LaplaceCentre c = laplace_centre(spec, t);
  const double shift = t * c.centre + log_density(spec, std::max(c.centre, 1e-6));
  const double lo = std::max(0.0, c.centre - 60.0 * c.scale);
  const double hi = c.centre + 60.0 * c.scale;
  boost::math::quadrature::tanh_sinh<double> integrator;
  const double v = integrator.integrate(
      [&](double x) { return x <= 0.0 ? 0.0 : std::exp(t * x + log_density(spec, x) - shift); }, lo, hi);
  return shift + std::log(v);
}

bool same_bits(const TiltRecord& a, const TiltRecord& b) {
  return std::memcmp(&a.log_phi, &b.log_phi, sizeof(double)) == 0 &&
         std::memcmp(&a.m, &b.m, sizeof(double)) == 0 && std::memcmp(&a.s2, &b.s2, sizeof(double)) == 0;
}

}  // namespace

TEST_CASE("untilted moments of Weibull k=2") {
  const TiltRecord r = moments(weibull(2.0), 0.0);
  CHECK(r.log_phi == 0.0);
  CHECK(r.m == doctest::Approx(std::sqrt(M_PI) / 2.0).epsilon(1e-12));
  CHECK(r.s2 == doctest::Approx(1.0 - M_PI / 4.0).epsilon(1e-11));
}

TEST_CASE("log mgf against tanh-sinh quadrature") {
  for (const DensitySpec& spec : {weibull(2.0), double_exponential()}) {
    for (double t : {-2.0, 0.5, 5.0, 40.0, 300.0}) {
      INFO(spec.family() << " t=" << t);
      CHECK(log_mgf(spec, t) == doctest::Approx(oracle_log_mgf(spec, t)).epsilon(1e-10));
    }
  }
}

TEST_CASE("m and s2 are derivatives of log Phi") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> pick(0.2, 60.0);
  for (const DensitySpec& spec : {weibull(2.0), double_exponential()}) {
    for (int i = 0; i < 10; ++i) {
      const double t = pick(rng);
      const double h = 1e-4 * std::max(1.0, t);
      const double dm = (log_mgf(spec, t + h) - log_mgf(spec, t - h)) / (2 * h);
      const double ds = (moments(spec, t + h).m - moments(spec, t - h).m) / (2 * h);
      const TiltRecord r = moments(spec, t);
      CHECK(r.m == doctest::Approx(dm).epsilon(1e-7));
      CHECK(r.s2 == doctest::Approx(ds).epsilon(1e-6));
      CHECK(r.s2 > 0.0);
    }
  }
}

TEST_CASE("tilted mean is increasing in t") {
  for (const DensitySpec& spec : {weibull(2.0), double_exponential()}) {
    double prev = -1.0;
    for (double t = 0.0; t < 200.0; t += 7.3) {
      const double m = moments(spec, t).m;
      CHECK(m > prev);
      prev = m;
    }
  }
}

TEST_CASE("solve_tilt hits the target and is memoised bitwise") {
  const DensitySpec w = weibull(2.0);
  const TiltRecord r = solve_tilt(w, 3.0);
  CHECK(r.m == doctest::Approx(3.0).epsilon(1e-8));
  CHECK(same_bits(r, solve_tilt(w, 3.0)));
  CHECK(same_bits(r, moments(w, r.t)));

  const DensitySpec d = double_exponential();
  for (double a : {1.5, 4.0, 12.0}) CHECK(solve_tilt(d, a).m == doctest::Approx(a).epsilon(1e-8));
}

TEST_CASE("solve_tilt below the mean") {
  try {
    solve_tilt(weibull(2.0), 0.5);
    FAIL("expected sub-mean target");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::SubMeanTarget);
  }
}

TEST_CASE("first order asymptotics for m and s2") {
  for (const DensitySpec& spec : {weibull(2.0), double_exponential()}) {
    const MomentComparison c = asymptotic_moments(spec, 1000.0);
    CHECK(c.ratios_order1.m == doctest::Approx(1.0).epsilon(1e-3));
    CHECK(c.ratios_order1.s2 == doctest::Approx(1.0).epsilon(5e-3));
    // the third cumulant tracks psi'' itself
    CHECK(c.quadrature.mu3 / c.psi_second == doctest::Approx(1.0).epsilon(0.05));
  }
}

TEST_CASE("skewness ratio against direct central moments") {
  using GK = boost::math::quadrature::gauss_kronrod<double, 61>;
  for (const DensitySpec& spec : {weibull(2.0), double_exponential()}) {
    for (double t : {1.0, 10.0, 100.0}) {
      const TiltRecord r = moments(spec, t);
      const double s = std::sqrt(r.s2);
      const double shift = log_density(spec, r.m) + t * r.m;
      auto f = [&](double x, int k) { return std::pow(x - r.m, k) * std::exp(log_density(spec, x) + t * x - shift); };
      const double lo = std::max(spec.support_left(), r.m - 60 * s);
      const double hi = r.m + 60 * s;
      const double m0 = GK::integrate([&](double x) { return f(x, 0); }, lo, hi, 20, 1e-13);
      const double m2 = GK::integrate([&](double x) { return f(x, 2); }, lo, hi, 20, 1e-13) / m0;
      const double m3 = GK::integrate([&](double x) { return f(x, 3); }, lo, hi, 20, 1e-13) / m0;
      CHECK(skewness_ratio(spec, t) == doctest::Approx(m3 / std::pow(m2, 1.5)).epsilon(1e-6));
    }
  }
}

TEST_CASE("skewness shrinks along t") {
  double prev = 1e300;
  for (double t : {1.0, 10.0, 100.0, 1000.0}) {
    const double s = std::fabs(skewness_ratio(weibull(2.0), t));
    CHECK(s < prev);
    prev = s;
  }
  // the double exponential changes sign between t = 1 and t = 10, so |ratio|
  // only shrinks once the tilt is past the sign change
  const DensitySpec d = double_exponential();
  CHECK(skewness_ratio(d, 1.0) > 0.0);
  CHECK(skewness_ratio(d, 10.0) < 0.0);
  prev = 1e300;
  for (double t : {10.0, 100.0, 1000.0}) {
    const double s = std::fabs(skewness_ratio(d, t));
    CHECK(s < prev);
    prev = s;
  }
}

TEST_CASE("tilt_spec is the normalised tilted law") {
  const DensitySpec w = weibull(2.0);
  const double t = solve_tilt(w, 3.0).t;
  const DensitySpec tw = tilt_spec(w, t);
  const TiltRecord r = moments(tw, 0.0);
  CHECK(r.m == doctest::Approx(3.0).epsilon(1e-8));
  CHECK(r.s2 == doctest::Approx(solve_tilt(w, 3.0).s2).epsilon(1e-8));
  CHECK(tilted_log_density(w, t, 2.5) == doctest::Approx(log_density(tw, 2.5)).epsilon(1e-12));
}

TEST_CASE("Laplace expansion of Psi(t, alpha)") {
  const DensitySpec w = weibull(2.0);
  for (int alpha = 0; alpha <= 2; alpha += 2) {
    const PsiExpansion e = laplace_psi_expansion(w, 1000.0, alpha, default_slowly_varying(1000.0));
    CHECK(e.exact.sign == e.expansion.sign);
    CHECK(std::exp(e.exact.log_abs - e.expansion.log_abs) == doctest::Approx(1.0).epsilon(0.02));
  }
}

TEST_CASE("asymptotic record approximates the quadrature record") {
  const DensitySpec d = double_exponential();
  const TiltRecord a = asymptotic_record(d, 1e4);
  const TiltRecord q = moments(d, 1e4);
  CHECK(a.method == TiltRecord::Method::Asymptotic);
  CHECK(a.m == doctest::Approx(q.m).epsilon(1e-3));
  CHECK(a.s2 == doctest::Approx(q.s2).epsilon(1e-2));
}
