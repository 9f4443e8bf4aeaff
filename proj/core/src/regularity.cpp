#include <algorithm>
#include <cmath>
#include <sstream>

#include "edp/density_model.hpp"
#include "edp/error.hpp"
#include "edp/numerics.hpp"

namespace edp {

namespace {

constexpr double kLogStep = 1e-3;  // step in log x for derivatives of eps

// x eps'(x) and x^2 eps''(x) from central differences in log x.
EpsilonSample differentiate(double x, const std::function<double(double)>& eps) {
  const double e0 = eps(x);
  const double ep = eps(x * std::exp(kLogStep));
  const double em = eps(x * std::exp(-kLogStep));
  const double d1 = (ep - em) / (2.0 * kLogStep);
  const double d2 = (ep - 2.0 * e0 + em) / (kLogStep * kLogStep);
  return {x, e0, d1, d2 - d1};
}

std::pair<std::vector<double>, std::vector<double>> split_half(const std::vector<double>& v) {
  const std::size_t mid = v.size() / 2;
  return {std::vector<double>(v.begin(), v.begin() + mid), std::vector<double>(v.begin() + mid, v.end())};
}

double max_abs(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::fabs(x));
  return m;
}

void check_grid(const DensitySpec& spec, const std::vector<double>& grid) {
  if (grid.size() < 2) throw Error(ErrorKind::Precondition, "grid needs at least two points");
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (!(grid[i] > spec.support_left())) {
      throw Error(ErrorKind::Precondition, "grid point outside the support interior");
    }
    if (i > 0 && !(grid[i] > grid[i - 1])) {
      throw Error(ErrorKind::Precondition, "grid must be strictly increasing");
    }
  }
}

std::vector<EpsilonSample> beta_profile(const DensitySpec& spec, double beta,
                                        const std::vector<double>& grid) {
  auto eps = [&](double x) {
    const HazardValues hv = hazard_and_derivatives(spec, x);
    return x * hv.h1 / hv.h - beta;
  };
  std::vector<EpsilonSample> out;
  for (double x : grid) out.push_back(differentiate(x, eps));
  return out;
}

std::vector<EpsilonSample> infinity_profile(const DensitySpec& spec,
                                            const std::vector<double>& grid) {
  auto eps = [&](double u) {
    const double x = psi_inverse(spec, u);
    return u / (hazard_and_derivatives(spec, x).h1 * x);
  };
  std::vector<EpsilonSample> out;
  for (double u : grid) out.push_back(differentiate(u, eps));
  return out;
}

ConditionFlag bounded_derivatives_flag(const std::vector<EpsilonSample>& samples,
                                       const std::vector<double>& grid) {
  std::vector<double> d1, d2;
  for (const auto& s : samples) {
    d1.push_back(std::fabs(s.x_deps));
    d2.push_back(std::fabs(s.x2_d2eps));
  }
  auto [lo1, hi1] = split_half(d1);
  auto [lo2, hi2] = split_half(d2);
  const double margin = std::min(max_abs(lo1) - max_abs(hi1), max_abs(lo2) - max_abs(hi2));
  ConditionFlag flag;
  flag.rule =
      "max of |x eps'| and |x^2 eps''| over the upper half of the grid does not exceed the "
      "lower-half max";
  flag.grid = grid;
  flag.values = d1;
  flag.values.insert(flag.values.end(), d2.begin(), d2.end());
  flag.margin = margin;
  flag.pass = margin >= -1e-12;
  return flag;
}

ConditionFlag slow_variation_flag(const std::vector<EpsilonSample>& samples,
                                  const std::vector<double>& grid) {
  std::vector<double> r1, r2;
  for (const auto& s : samples) {
    r1.push_back(std::fabs(s.x_deps / s.eps));
    r2.push_back(std::fabs(s.x2_d2eps / s.eps));
  }
  const std::size_t mid = samples.size() / 2;
  const bool trend = r1.back() < r1[mid] && r2.back() < r2[mid];
  ConditionFlag flag;
  flag.rule =
      "|x eps'/eps| and |x^2 eps''/eps| fall from the grid midpoint to the last point and end "
      "below 0.5";
  flag.grid = grid;
  flag.values = r1;
  flag.values.insert(flag.values.end(), r2.begin(), r2.end());
  flag.margin = 0.5 - std::max(r1.back(), r2.back());
  flag.pass = trend && flag.margin > 0.0;
  return flag;
}

ConditionFlag polynomial_floor_flag(const std::vector<EpsilonSample>& samples,
                                    const std::vector<double>& grid) {
  ConditionFlag flag;
  flag.grid = grid;
  flag.rule = "no exponent eta in {0.05,0.1,0.15,0.2,0.24} keeps x^eta eps non-decreasing";
  flag.margin = -num::kInf;
  const std::size_t mid = samples.size() / 2;
  for (double eta : {0.05, 0.1, 0.15, 0.2, 0.24}) {
    std::vector<double> v;
    for (const auto& s : samples) v.push_back(std::pow(s.x, eta) * s.eps);
    bool rising = v[mid] > 0.0;
    for (std::size_t i = mid + 1; i < v.size(); ++i) rising = rising && v[i] >= v[i - 1];
    if (rising) {
      std::ostringstream os;
      os << "x^eta eps positive and non-decreasing over the upper half of the grid, eta=" << eta;
      flag.rule = os.str();
      flag.values = v;
      flag.margin = *std::min_element(v.begin() + mid, v.end());
      flag.pass = true;
      return flag;
    }
    flag.values = v;
  }
  return flag;
}

// Abscissas in x for a grid: R_inf grids are read as arguments u of psi.
std::vector<double> x_points(const DensitySpec& spec, const std::vector<double>& grid) {
  if (spec.class_hint().kind != ClassHint::Kind::RInfinity) return grid;
  std::vector<double> xs;
  for (double u : grid) xs.push_back(psi_inverse(spec, u));
  return xs;
}

}  // namespace

RegularityReport epsilon_profile(const DensitySpec& spec, const std::vector<double>& grid) {
  check_grid(spec, grid);
  RegularityReport report;
  const ClassHint hint = spec.class_hint();
  const double x_last = x_points(spec, {grid.back()}).front();
  const HazardValues last = hazard_and_derivatives(spec, x_last);
  report.beta_estimate = x_last * last.h1 / last.h;

  switch (hint.kind) {
    case ClassHint::Kind::RBeta:
      report.epsilon_beta = beta_profile(spec, hint.beta, grid);
      report.condition_flags["eps_derivatives_bounded"] =
          bounded_derivatives_flag(report.epsilon_beta, grid);
      break;
    case ClassHint::Kind::RInfinity:
      report.epsilon_infinity = infinity_profile(spec, grid);
      report.condition_flags["eps_slow_variation"] =
          slow_variation_flag(report.epsilon_infinity, grid);
      report.condition_flags["eps_polynomial_floor"] =
          polynomial_floor_flag(report.epsilon_infinity, grid);
      break;
    case ClassHint::Kind::Unknown:
      report.epsilon_beta = beta_profile(spec, report.beta_estimate, grid);
      report.epsilon_infinity = infinity_profile(spec, grid);
      break;
  }
  return report;
}

QBoundCheck check_q_bound(const DensitySpec& spec, double x, double theta) {
  if (!(theta > 0.0 && theta < 1.0)) {
    throw Error(ErrorKind::Precondition, "check_q_bound: theta must lie in (0, 1)");
  }
  const double hx = spec.h(x);
  if (!(hx > 0.0)) throw Error(ErrorKind::Precondition, "check_q_bound: needs h(x) > 0");
  QBoundCheck out;
  out.bound = 1.0 / std::sqrt(x * hx);
  if (spec.has_q()) {
    const double lo = x - theta * x;
    const double hi = x + theta * x;
    for (int i = 0; i <= 200; ++i) {
      const double v = spec.q(lo + (hi - lo) * i / 200.0);
      if (!std::isfinite(v)) throw Error(ErrorKind::EvaluationOverflow, "q is not finite");
      out.sup_q = std::max(out.sup_q, std::fabs(v));
    }
  }
  out.pass = out.sup_q <= out.bound;
  return out;
}

RegularityReport regularity_report(const DensitySpec& spec, const std::vector<double>& grid,
                                   double theta) {
  RegularityReport report = epsilon_profile(spec, grid);
  const std::vector<double> xs = x_points(spec, grid);

  ConditionFlag qflag;
  qflag.rule = "sup |q| over (x - theta x, x + theta x) <= (x h(x))^{-1/2} at every grid point";
  qflag.grid = xs;
  qflag.margin = num::kInf;
  qflag.pass = true;
  for (double x : xs) {
    const QBoundCheck c = check_q_bound(spec, x, theta);
    qflag.values.push_back(c.sup_q);
    qflag.margin = std::min(qflag.margin, c.bound - c.sup_q);
    qflag.pass = qflag.pass && c.pass;
  }
  report.condition_flags["q_bound"] = qflag;

  std::vector<double> hazard, g_over_x, index;
  for (double x : xs) {
    const HazardValues hv = hazard_and_derivatives(spec, x);
    hazard.push_back(hv.h);
    g_over_x.push_back(spec.g(x) / x);
    index.push_back(x * hv.h1 / hv.h);
  }
  report.diagnostic_curves["hazard"] = hazard;
  report.diagnostic_curves["g_over_x"] = g_over_x;
  report.diagnostic_curves["local_index"] = index;

  ConditionFlag mono;
  mono.rule = "h(x_{j+1}) >= h(x_j) - 1e-12 along the grid";
  mono.grid = xs;
  mono.values = hazard;
  mono.margin = num::kInf;
  for (std::size_t i = 1; i < hazard.size(); ++i) {
    mono.margin = std::min(mono.margin, hazard[i] - hazard[i - 1]);
  }
  mono.pass = mono.margin >= -1e-12;
  report.condition_flags["hazard_monotone"] = mono;

  ConditionFlag growth;
  growth.rule = "g(x)/x strictly increasing over the upper half of the grid";
  growth.grid = xs;
  growth.values = g_over_x;
  growth.margin = num::kInf;
  for (std::size_t i = xs.size() / 2 + 1; i < xs.size(); ++i) {
    growth.margin = std::min(growth.margin, g_over_x[i] - g_over_x[i - 1]);
  }
  growth.pass = growth.margin > 0.0;
  report.condition_flags["g_over_x_increasing"] = growth;

  const ClassHint hint = spec.class_hint();
  auto passed = [&](const char* name) { return report.condition_flags.at(name).pass; };
  if (hint.kind == ClassHint::Kind::RBeta) {
    const double first_gap = std::fabs(index.front() - hint.beta);
    const double last_gap = std::fabs(index.back() - hint.beta);
    const bool index_converges = last_gap < first_gap || last_gap <= 0.05;
    if (passed("eps_derivatives_bounded") && passed("g_over_x_increasing") && index_converges) {
      report.verdict = ClassHint::Kind::RBeta;
    }
  } else if (hint.kind == ClassHint::Kind::RInfinity) {
    if (passed("eps_slow_variation") && passed("eps_polynomial_floor") &&
        passed("g_over_x_increasing")) {
      report.verdict = ClassHint::Kind::RInfinity;
    }
  }
  return report;
}

double default_slowly_varying(double t) {
  const double v = std::log1p(t);
  return v * v * v;
}

double integrated_psi(const DensitySpec& spec, double t) {
  auto K_hat = [&](double u) {
    const double x = psi_inverse(spec, u);
    return u * x - spec.g(x);
  };
  return K_hat(t) - K_hat(1.0);
}

std::vector<double> DecayDiagnostics::series(double DecayRow::*member) const {
  std::vector<double> out;
  for (const auto& r : rows) out.push_back(r.*member);
  return out;
}

bool DecayDiagnostics::strictly_decreasing(double DecayRow::*member) const {
  for (std::size_t i = 1; i < rows.size(); ++i) {
    if (!(rows[i].*member < rows[i - 1].*member)) return false;
  }
  return true;
}

DecayDiagnostics laplace_remainder_diagnostics(const DensitySpec& spec,
                                            const std::vector<double>& t_grid, const RealFn& l) {
  for (std::size_t i = 1; i < t_grid.size(); ++i) {
    if (!(t_grid[i] > t_grid[i - 1])) {
      throw Error(ErrorKind::Precondition, "t grid must be increasing");
    }
  }
  DecayDiagnostics out;
  for (double t : t_grid) {
    DecayRow row;
    row.t = t;
    row.x_hat = psi_inverse(spec, t);
    const HazardValues hv = hazard_and_derivatives(spec, row.x_hat);
    if (!(hv.h1 > 0.0)) throw Error(ErrorKind::NonConcave, "h'(x_hat) <= 0");
    row.sigma = 1.0 / std::sqrt(hv.h1);
    row.l = l(t);
    row.log_sigma_ratio = std::fabs(std::log(row.sigma)) / integrated_psi(spec, t);

    const double reach = row.sigma * row.l;
    const double left = spec.support_left();
    double lo = row.x_hat - reach;
    const double hi = row.x_hat + reach;
    row.window_clipped = lo <= left;
    if (row.window_clipped) lo = left + (hi - left) / 400.0;
    double sup_h3 = 0.0;
    double sup_q = 0.0;
    for (int i = 0; i <= 400; ++i) {
      const double x = lo + (hi - lo) * i / 400.0;
      sup_h3 = std::max(sup_h3, std::fabs(hazard_and_derivatives(spec, x).h3));
      if (spec.has_q()) sup_q = std::max(sup_q, std::fabs(spec.q(x)));
    }
    const double s4 = std::pow(row.sigma, 4);
    row.h3_window = sup_h3 * s4 * std::pow(row.l, 4);
    row.h2_sigma3_l = std::fabs(hv.h2) * std::pow(row.sigma, 3) * row.l;
    const double denom = std::fabs(hv.h2) * std::pow(row.sigma, 3);
    row.xi_ratio = (sup_h3 * std::pow(reach, 4) / 24.0 + sup_q) / denom;
    out.rows.push_back(row);
  }
  return out;
}

}  // namespace edp
