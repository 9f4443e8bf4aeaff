#pragma once

// Small numerical toolkit shared by the modules: log-domain helpers,
// composite Gauss-Legendre integration of vector-valued integrands, and a
// safeguarded Newton/bisection root finder for monotone functions.

#include <array>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <span>
#include <vector>

namespace edp::num {

inline constexpr double kInf = std::numeric_limits<double>::infinity();
inline constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
inline constexpr double kLogSqrt2Pi = 0.91893853320467274178;  // log(sqrt(2 pi))
inline constexpr double kInvSqrt2Pi = 0.39894228040143267794;

inline double standard_normal_pdf(double x) { return kInvSqrt2Pi * std::exp(-0.5 * x * x); }

// log(exp(a) + exp(b)) without overflow.
inline double log_add(double a, double b) {
  if (a == -kInf) return b;
  if (b == -kInf) return a;
  return a > b ? a + std::log1p(std::exp(b - a)) : b + std::log1p(std::exp(a - b));
}

double log_sum_exp(std::span<const double> values);

// A real number stored as sign * exp(log_abs); zero is sign 0.
struct SignedLog {
  double log_abs = -kInf;
  int sign = 0;

  static SignedLog from(double v) {
    if (v == 0.0) return {};
    return {std::log(std::fabs(v)), v > 0 ? 1 : -1};
  }
  double value() const { return sign == 0 ? 0.0 : sign * std::exp(log_abs); }
};

// Nodes and weights of the n-point Gauss-Legendre rule on [-1, 1]; n in
// {16, 20, 32, 64}.
struct GaussRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};
const GaussRule& gauss_legendre(int points);

// Integrates the K-vector valued integrand f over [a, b] with `panels` equal
// panels of a 20-point Gauss-Legendre rule. The integrand writes into out.
template <std::size_t K, class F>
std::array<double, K> integrate_panels(F&& f, double a, double b, int panels) {
  const GaussRule& rule = gauss_legendre(20);
  std::array<double, K> acc{};
  std::array<double, K> vals{};
  const double width = (b - a) / panels;
  for (int p = 0; p < panels; ++p) {
    const double lo = a + p * width;
    const double half = 0.5 * width;
    const double mid = lo + half;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
      f(mid + half * rule.nodes[i], vals);
      for (std::size_t k = 0; k < K; ++k) acc[k] += half * rule.weights[i] * vals[k];
    }
  }
  return acc;
}

// Integral of a scalar function over [a, b] by composite Gauss-Legendre.
double integrate(const std::function<double(double)>& f, double a, double b, int panels = 16);

struct RootOptions {
  double abs_tol = 0.0;      // stop when |f(x)| <= abs_tol
  double x_rel_tol = 4e-16;  // or when the bracket width is below this (relative)
  int max_iter = 200;
};

// Root of an increasing function f on [lo, hi] with f(lo) <= 0 <= f(hi).
// df may be empty; when given, Newton steps are tried first and rejected
// whenever they leave the current bracket.
double solve_increasing(const std::function<double(double)>& f,
                        const std::function<double(double)>& df, double lo, double hi,
                        const RootOptions& options);

// Trapezoid integral of samples spaced by dx.
double trapezoid(std::span<const double> values, double dx);

}  // namespace edp::num
