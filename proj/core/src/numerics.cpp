#include "edp/numerics.hpp"

#include <algorithm>
#include <boost/math/quadrature/gauss.hpp>

#include "edp/error.hpp"

namespace edp::num {

double log_sum_exp(std::span<const double> values) {
  double top = -kInf;
  for (double v : values) top = std::max(top, v);
  if (top == -kInf || !std::isfinite(top)) return top;
  double acc = 0.0;
  for (double v : values) acc += std::exp(v - top);
  return top + std::log(acc);
}

namespace {

template <unsigned N>
GaussRule make_rule() {
  using Rule = boost::math::quadrature::gauss<double, N>;
  const auto& abscissa = Rule::abscissa();
  const auto& weights = Rule::weights();
  GaussRule rule;
  for (std::size_t i = 0; i < abscissa.size(); ++i) {
    if (abscissa[i] == 0.0) {
      rule.nodes.push_back(0.0);
      rule.weights.push_back(weights[i]);
      continue;
    }
    rule.nodes.push_back(-abscissa[i]);
    rule.weights.push_back(weights[i]);
    rule.nodes.push_back(abscissa[i]);
    rule.weights.push_back(weights[i]);
  }
  return rule;
}

}  // namespace

const GaussRule& gauss_legendre(int points) {
  static const GaussRule r16 = make_rule<16>();
  static const GaussRule r20 = make_rule<20>();
  static const GaussRule r32 = make_rule<32>();
  static const GaussRule r64 = make_rule<64>();
  switch (points) {
    case 16: return r16;
    case 20: return r20;
    case 32: return r32;
    case 64: return r64;
    default: throw Error(ErrorKind::Precondition, "unsupported Gauss-Legendre order");
  }
}

double integrate(const std::function<double(double)>& f, double a, double b, int panels) {
  auto acc = integrate_panels<1>([&](double x, std::array<double, 1>& out) { out[0] = f(x); },
                                 a, b, panels);
  return acc[0];
}

double solve_increasing(const std::function<double(double)>& f,
                        const std::function<double(double)>& df, double lo, double hi,
                        const RootOptions& options) {
  double f_lo = f(lo);
  double f_hi = f(hi);
  if (f_lo > 0.0 || f_hi < 0.0) {
    throw Error(ErrorKind::Precondition, "solve_increasing: root not bracketed");
  }
  if (f_lo == 0.0) return lo;
  if (f_hi == 0.0) return hi;

  double x = 0.5 * (lo + hi);
  for (int iter = 0; iter < options.max_iter; ++iter) {
    const double fx = f(x);
    if (!std::isfinite(fx)) {
      throw Error(ErrorKind::EvaluationOverflow, "solve_increasing: non-finite value");
    }
    if (std::fabs(fx) <= options.abs_tol) return x;
    if (fx < 0.0) {
      lo = x;
    } else {
      hi = x;
    }
    if (hi - lo <= options.x_rel_tol * std::max(1.0, std::fabs(x))) return x;

    double next = 0.5 * (lo + hi);
    if (df) {
      const double slope = df(x);
      if (slope > 0.0 && std::isfinite(slope)) {
        const double newton = x - fx / slope;
        if (newton > lo && newton < hi) next = newton;
      }
    }
    if (next == x) return x;
    x = next;
  }
  return x;
}

double trapezoid(std::span<const double> values, double dx) {
  if (values.size() < 2) return 0.0;
  double acc = 0.5 * (values.front() + values.back());
  for (std::size_t i = 1; i + 1 < values.size(); ++i) acc += values[i];
  return acc * dx;
}

}  // namespace edp::num
