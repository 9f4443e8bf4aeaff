#include <doctest.h>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <limits>

#include "edp/conditional_gibbs.hpp"
#include "edp/error.hpp"
#include "edp/exceedance_tail.hpp"
#include "edp/rng.hpp"
#include "edp/sampling.hpp"
#include "edp/tilted_calculus.hpp"

using namespace edp;

namespace {

// One-sample KS statistic.
template <class Cdf>
double ks_statistic(std::vector<double> xs, Cdf cdf) {
  std::sort(xs.begin(), xs.end());
  const double n = static_cast<double>(xs.size());
  double d = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double f = cdf(xs[i]);
    d = std::max({d, (i + 1) / n - f, f - i / n});
  }
  return d;
}

double ks_two_sample(std::vector<double> a, std::vector<double> b) {
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    const double x = std::min(a[i], b[j]);
    while (i < a.size() && a[i] <= x) ++i;
    while (j < b.size() && b[j] <= x) ++j;
    d = std::max(d, std::fabs(static_cast<double>(i) / a.size() - static_cast<double>(j) / b.size()));
  }
  return d;
}

// Histogram TV between draws and a density, over equal-width bins in [lo, hi].
template <class Density>
double histogram_tv(const std::vector<double>& xs, Density f, double lo, double hi, int bins) {
  std::vector<double> count(bins, 0.0);
  double outside = 0.0;
  for (double x : xs) {
    const int b = static_cast<int>(std::floor((x - lo) / (hi - lo) * bins));
    if (b < 0 || b >= bins) {
      outside += 1.0;
    } else {
      count[b] += 1.0;
    }
  }
  const double w = (hi - lo) / bins;
  double tv = outside / xs.size();
  double inside_mass = 0.0;
  for (int b = 0; b < bins; ++b) {
    double mass = 0.0;
    for (int k = 0; k < 16; ++k) mass += f(lo + (b + (k + 0.5) / 16.0) * w) * w / 16.0;
    inside_mass += mass;
    tv += std::fabs(count[b] / xs.size() - mass);
  }
  tv += std::max(0.0, 1.0 - inside_mass);
  return 0.5 * tv;
}

}  // namespace

TEST_CASE("Philox4x32-10 known answers") {
  CHECK(philox4x32_10({0, 0, 0, 0}, {0, 0}) ==
        PhiloxCounter{0x6627e8d5u, 0xe169c58du, 0xbc57ac4cu, 0x9b00dbd8u});
  CHECK(philox4x32_10({0xffffffffu, 0xffffffffu, 0xffffffffu, 0xffffffffu}, {0xffffffffu, 0xffffffffu}) ==
        PhiloxCounter{0x408f276du, 0x41c83b0eu, 0xa20bc7c6u, 0x6d5451fdu});
  CHECK(philox4x32_10({0x243f6a88u, 0x85a308d3u, 0x13198a2eu, 0x03707344u}, {0xa4093822u, 0x299f31d0u}) ==
        PhiloxCounter{0xd16cfe09u, 0x94fdccebu, 0x5001e420u, 0x24126ea1u});
}

TEST_CASE("uniforms lie strictly inside (0, 1) and streams differ") {
  RandomStream a(1, 1, 0);
  RandomStream b(1, 1, 1);
  RandomStream c(1, 2, 0);
  double sum = 0.0;
  for (int i = 0; i < 10000; ++i) {
    const double u = a.uniform();
    CHECK(u > 0.0);
    CHECK(u < 1.0);
    sum += u;
  }
  CHECK(sum / 10000 == doctest::Approx(0.5).epsilon(0.02));
  CHECK(b.next_u32() != c.next_u32());
}

TEST_CASE("parallel_chunks covers every chunk and rethrows the lowest failure") {
  std::vector<int> hit(100, 0);
  parallel_chunks(100, [&](std::size_t c) { hit[c] += 1; }, 4);
  for (int h : hit) CHECK(h == 1);
  try {
    parallel_chunks(
        10,
        [](std::size_t c) {
          if (c == 3 || c == 7) throw std::runtime_error(std::to_string(c));
        },
        3);
    FAIL("expected a rethrow");
  } catch (const std::runtime_error& e) {
    CHECK(std::string(e.what()) == "3");
  }
}

TEST_CASE("tilted sampler: inverse of its own CDF") {
  const DensitySpec w = weibull(2.0);
  const TiltedSampler s(w, solve_tilt(w, 3.0).t);
  for (double u : {1e-6, 0.01, 0.3, 0.5, 0.9, 0.999999}) {
    CHECK(s.cdf(s.quantile(u)) == doctest::Approx(u).epsilon(1e-9));
  }
  CHECK_THROWS_AS(s.quantile(0.0), Error);
}

TEST_CASE("untilted draws follow the Weibull CDF (KS, 1% level)") {
  const DensitySpec w = weibull(2.0);
  const std::vector<double> xs = sample_tilted(w, 0.0, 10000, 2024);
  const double d = ks_statistic(xs, [](double x) { return 1.0 - std::exp(-x * x); });
  CHECK(d < 1.628 / std::sqrt(10000.0));
}

TEST_CASE("tilted draws: mean within the CLT band") {
  const DensitySpec w = weibull(2.0);
  const TiltRecord r = solve_tilt(w, 3.0);
  const std::vector<double> xs = sample_tilted(w, r.t, 1000000, 99);
  double mean = 0.0;
  for (double x : xs) mean += x;
  mean /= xs.size();
  CHECK(std::fabs(mean - 3.0) <= 4.0 * std::sqrt(r.s2) * 1e-3);
}

TEST_CASE("tilted draws do not depend on the thread count") {
  const DensitySpec w = weibull(2.0);
  setenv("EDP_THREADS", "1", 1);
  const auto a = sample_tilted(w, 2.0, 20000, 5);
  setenv("EDP_THREADS", "4", 1);
  const auto b = sample_tilted(w, 2.0, 20000, 5);
  unsetenv("EDP_THREADS");
  CHECK(a == b);
  CHECK(a != sample_tilted(w, 2.0, 20000, 6));
}

TEST_CASE("conditional point sampler: exact sums and exchangeability") {
  const DensitySpec w = weibull(2.0);
  const auto v = sample_conditional_point(w, 8, 3.0, 10000, 31);
  std::vector<double> x1, x2;
  for (const auto& row : v) {
    double s = 0.0;
    for (double y : row) s += y;
    CHECK(std::fabs(s - 24.0) < 1e-8);
    x1.push_back(row[0]);
    x2.push_back(row[1]);
  }
  // two-sample KS at the 1% level
  CHECK(ks_two_sample(x1, x2) < 1.628 * std::sqrt(2.0 / 10000.0));
}

TEST_CASE("conditional point marginal is close to the tilted law") {
  const DensitySpec w = weibull(2.0);
  const int n = 16;
  const double a = 3.0;
  const auto v = sample_conditional_point(w, n, a, 10000, 41);
  std::vector<double> x1;
  for (const auto& row : v) x1.push_back(row[0]);
  const double t = solve_tilt(w, a).t;
  const double s = std::sqrt(solve_tilt(w, a).s2);
  const double empirical = histogram_tv(
      x1, [&](double y) { return y > 0.0 ? std::exp(tilted_log_density(w, t, y)) : 0.0; }, a - 4 * s,
      a + 4 * s, 24);
  const double analytic = tv_distance(w, make_point(w, n, a)).tv_fixed;
  MESSAGE("empirical TV " << empirical << ", analytic " << analytic);
  CHECK(empirical <= 2.0 * analytic);
  CHECK(empirical >= 0.5 * analytic);
}

TEST_CASE("exceedance sampler: constraint and marginal") {
  const DensitySpec w = weibull(2.0);
  const ExceedanceSample s = sample_conditional_exceedance(w, 16, 2.0, 10000, 8);
  REQUIRE(s.vectors.size() == 10000);
  std::vector<double> x1;
  for (const auto& row : s.vectors) {
    double sum = 0.0;
    for (double y : row) sum += y;
    CHECK(sum >= 32.0);
    x1.push_back(row[0]);
  }
  const ExceedanceMixture mix(w, 16, 2.0);
  const double tv = histogram_tv(
      x1, [&](double y) { return std::exp(mix.log_density(y)); }, 0.0, 5.0, 40);
  CHECK(tv <= 0.15);
  CHECK(s.effective_size > 1000.0);

  const ExceedanceSample again = sample_conditional_exceedance(w, 16, 2.0, 10000, 8);
  CHECK(again.vectors == s.vectors);
}

TEST_CASE("democracy demo edge cases") {
  const DensitySpec w = weibull(2.0);
  const double inf = std::numeric_limits<double>::infinity();
  CHECK(democracy_demo(w, 8, 3.0, inf, 2000, 1).probability == 1.0);
  CHECK(democracy_demo(w, 8, 3.0, 0.0, 2000, 1).probability == 0.0);
}
