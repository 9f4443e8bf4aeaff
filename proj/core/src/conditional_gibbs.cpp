#include "edp/conditional_gibbs.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "edp/edgeworth.hpp"
#include "edp/error.hpp"
#include "edp/numerics.hpp"
#include "edp/tilted_calculus.hpp"

namespace edp {

namespace {

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

double log_normal_pdf(double mean, double var, double y) {
  const double d = y - mean;
  return -num::kLogSqrt2Pi - 0.5 * std::log(var) - 0.5 * d * d / var;
}

bool inside(const DensitySpec& spec, double y) {
  const double left = spec.support_left();
  return spec.singular_at_boundary() ? y > left : y >= left;
}

}  // namespace

double growth_condition(const DensitySpec& spec, int n, double a_n) {
  if (n < 1) throw Error(ErrorKind::Precondition, "growth condition needs n >= 1");
  const TiltRecord r = solve_tilt(spec, a_n);
  const double psi = psi_inverse(spec, r.t);
  const double dpsi = 1.0 / hazard_and_derivatives(spec, psi).h1;
  return psi * psi / std::sqrt(n * dpsi);
}

ConditioningPoint make_point(const DensitySpec& spec, int n, double a_n, int k) {
  if (n < 2) throw Error(ErrorKind::Precondition, "conditioning needs n >= 2");
  if (k < 1 || k >= n) throw Error(ErrorKind::Precondition, "conditioning needs 1 <= k < n");
  ConditioningPoint p;
  p.n = n;
  p.a_n = a_n;
  p.k = k;
  p.t = solve_tilt(spec, a_n).t;
  try {
    p.growth_value = growth_condition(spec, n, a_n);
  } catch (const Error& e) {
    // psi(t) need not exist for tiny tilts; the regime warning is then moot
    if (e.kind() != ErrorKind::Precondition) throw;
    p.growth_value = 0.0;
  }
  p.growth_warning = p.growth_value > 1.0;
  return p;
}

SequentialTilts sequential_tilts(const DensitySpec& spec, const ConditioningPoint& point,
                                 std::span<const double> y) {
  const int k = static_cast<int>(y.size());
  if (k < 1 || k >= point.n) throw Error(ErrorKind::Precondition, "need 1 <= k < n");
  const double m0 = moments(spec, 0.0).m;
  SequentialTilts out;
  out.y.assign(y.begin(), y.end());
  double partial = 0.0;
  for (int i = 0; i < k; ++i) {
    const double m_i = (point.n * point.a_n - partial) / (point.n - i);
    if (m_i < m0) {
      throw Error(ErrorKind::SubMeanResidual, "residual mean " + fmt(m_i) + " at index " +
                                                  std::to_string(i) + " is below m(0)");
    }
    const TiltRecord r = solve_tilt(spec, m_i);
    const double s = std::sqrt(r.s2);
    const double z = (m_i - y[i]) / (s * std::sqrt(static_cast<double>(point.n - i - 1)));
    out.m_list.push_back(m_i);
    out.t_list.push_back(r.t);
    out.s_list.push_back(s);
    out.z_list.push_back(z);
    out.sqrt_n_z2.push_back(std::sqrt(static_cast<double>(point.n)) * z * z);
    partial += y[i];
  }
  return out;
}

double gibbs_adaptive(const DensitySpec& spec, const ConditioningPoint& point,
                      std::span<const double> y) {
  const SequentialTilts st = sequential_tilts(spec, point, y);
  double acc = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) acc += tilted_log_density(spec, st.t_list[i], y[i]);
  return acc;
}

double gibbs_fixed(const DensitySpec& spec, const ConditioningPoint& point,
                   std::span<const double> y) {
  const double t = solve_tilt(spec, point.a_n).t;
  const double lphi = log_mgf(spec, t);
  double acc = -static_cast<double>(y.size()) * lphi;
  for (double v : y) acc += t * v + log_density(spec, v);
  return acc;
}

ConditionalOracle::ConditionalOracle(const DensitySpec& spec, int n, double a_n,
                                     const OracleOptions& options)
    : spec_(spec), work_(spec), n_(n), a_n_(a_n), target_(n * a_n), options_(options) {
  if (n < 2 || n > 64) throw Error(ErrorKind::Precondition, "exact oracle needs 2 <= n <= 64");
  const double left = spec.support_left();
  if (!(target_ > n * left)) {
    throw Error(ErrorKind::IncompatibleCondition, "target n a_n outside the support of S_n");
  }
  if (options.base == OracleBase::NaturalTilt) {
    work_ = tilt_spec(spec, solve_tilt(spec, a_n).t);
  }
  const double span = target_ - n * left;
  std::size_t m_nodes = 0;
  if (options.dx > 0.0) {
    m_nodes = static_cast<std::size_t>(std::max(1.0, std::round(span / options.dx)));
  } else {
    const double s = std::sqrt(moments(work_, 0.0).s2);
    m_nodes = static_cast<std::size_t>(std::ceil(span / (s / 32.0)));
  }
  dx_ = span / static_cast<double>(m_nodes);
  points_ = m_nodes + 1 + options.margin_nodes;

  GridDensity base = tabulate(
      [this](double x) {
        const double l = log_working_density(x);
        return l == -num::kInf ? 0.0 : std::exp(l);
      },
      left, dx_, points_, GridDensity::Origin::Tabulated, 1.0);
  folds_.reserve(n);
  folds_.push_back(base);
  for (int j = 2; j <= n; ++j) {
    GridDensity next = convolve(folds_.back(), base, options.method, points_);
    next.origin_param = j;
    folds_.push_back(std::move(next));
  }
}

double ConditionalOracle::log_working_density(double x) const {
  if (!inside(work_, x)) return -num::kInf;
  return log_density(work_, x);
}

const GridDensity& ConditionalOracle::fold(int j) const {
  if (j < 1 || j > n_) throw Error(ErrorKind::Precondition, "fold index out of range");
  return folds_[j - 1];
}

double ConditionalOracle::log_fold(int j, double x) const {
  const GridDensity& g = fold(j);
  if (j == 1) return log_working_density(x);
  if (x < g.x0) return -num::kInf;
  double u = (x - g.x0) / g.dx;
  const double r = std::round(u);
  if (std::fabs(u - r) < 1e-9) u = r;
  if (u > static_cast<double>(g.size() - 1)) {
    throw Error(ErrorKind::IncompatibleCondition,
                "x=" + fmt(x) + " beyond the convolution grid of f_" + std::to_string(j));
  }
  return g.log_at(g.x0 + u * g.dx);
}

double ConditionalOracle::log_step(int remaining, double residual, double y) const {
  if (remaining < 2 || remaining > n_) throw Error(ErrorKind::Precondition, "remaining out of range");
  const double ly = log_working_density(y);
  if (ly == -num::kInf) return ly;
  const double rest = log_fold(remaining - 1, residual - y);
  if (rest == -num::kInf) return rest;
  const double norm = log_fold(remaining, residual);
  if (norm == -num::kInf) {
    throw Error(ErrorKind::IncompatibleCondition, "residual " + fmt(residual) + " has zero density");
  }
  return ly + rest - norm;
}

double ConditionalOracle::log_conditional(std::span<const double> y) const {
  const int k = static_cast<int>(y.size());
  if (k < 1 || k >= n_) throw Error(ErrorKind::Precondition, "need 1 <= k < n");
  double sum = 0.0;
  double acc = 0.0;
  for (double v : y) {
    sum += v;
    acc += log_working_density(v);
  }
  const double residual = target_ - sum;
  if (residual < (n_ - k) * spec_.support_left()) {
    throw Error(ErrorKind::IncompatibleCondition,
                "n a_n - sum y = " + fmt(residual) + " outside the support of f_" +
                    std::to_string(n_ - k));
  }
  const double norm = log_fold(n_, target_);
  if (norm == -num::kInf) {
    throw Error(ErrorKind::IncompatibleCondition, "f_n(n a_n) vanishes on the grid");
  }
  return acc + log_fold(n_ - k, residual) - norm;
}

GridDensity ConditionalOracle::marginal() const {
  const double left = spec_.support_left();
  const std::size_t count = points_ - options_.margin_nodes;
  GridDensity g;
  g.x0 = left;
  g.dx = dx_;
  g.values.resize(count);
  for (std::size_t i = 0; i < count; ++i) {
    const double l = log_step(n_, target_, g.x(i));
    g.values[i] = l == -num::kInf ? 0.0 : std::exp(l);
  }
  g.update_mass();
  return g;
}

double exact_conditional_density(const DensitySpec& spec, const ConditioningPoint& point,
                                 std::span<const double> y, const OracleOptions& options) {
  ConditionalOracle oracle(spec, point.n, point.a_n, options);
  return oracle.log_conditional(y);
}

namespace {

double baseline_log_unnormalised(const DensitySpec& spec, const ConditioningPoint& point,
                                 double y, BaselineForm form, double t, double s2) {
  const double lp = form == BaselineForm::Tilted ? tilted_log_density(spec, t, y)
                                                 : log_density(spec, y);
  return lp + log_normal_pdf(point.a_n, s2 * (point.n - 1), y);
}

}  // namespace

GridDensity gaussian_baseline_grid(const DensitySpec& spec, const ConditioningPoint& point,
                                   const GridDensity& grid, BaselineForm form) {
  const TiltRecord r = solve_tilt(spec, point.a_n);
  GridDensity g = grid;
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double y = g.x(i);
    g.values[i] = inside(spec, y)
                      ? std::exp(baseline_log_unnormalised(spec, point, y, form, r.t, r.s2))
                      : 0.0;
  }
  g.renormalize();
  return g;
}

double gaussian_baseline(const DensitySpec& spec, const ConditioningPoint& point, double y,
                         BaselineForm form) {
  if (point.n < 2) throw Error(ErrorKind::Precondition, "baseline needs n >= 2");
  const TiltRecord r = solve_tilt(spec, point.a_n);
  const TiltRecord w = form == BaselineForm::Tilted ? r : moments(spec, 0.0);
  const double lo = std::max(w.window.lo, spec.support_left());
  auto f = [&](double v) {
    if (!inside(spec, v)) return 0.0;
    return std::exp(baseline_log_unnormalised(spec, point, v, form, r.t, r.s2));
  };
  const double z = num::integrate(f, lo, w.window.hi, 400);
  return baseline_log_unnormalised(spec, point, y, form, r.t, r.s2) - std::log(z);
}

double total_variation(const GridDensity& a, const GridDensity& b) {
  if (a.size() != b.size() || std::fabs(a.x0 - b.x0) > 1e-12 * std::max(1.0, std::fabs(a.x0)) ||
      std::fabs(a.dx - b.dx) > 1e-12 * a.dx) {
    throw Error(ErrorKind::Precondition, "total variation needs grids with shared geometry");
  }
  std::vector<double> d(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) d[i] = std::fabs(a.values[i] - b.values[i]);
  return 0.5 * num::trapezoid(d, a.dx);
}

ConditionalReport tv_distance(const DensitySpec& spec, const ConditioningPoint& point,
                              const OracleOptions& options) {
  if (point.k != 1) throw Error(ErrorKind::Precondition, "tv_distance is defined for k = 1");
  ConditionalOracle oracle(spec, point.n, point.a_n, options);
  ConditionalReport rep;
  rep.point = point;
  rep.exact = oracle.marginal();
  rep.exact_mass = rep.exact.mass;

  const TiltRecord r = solve_tilt(spec, point.a_n);
  rep.approx_fixed = rep.exact;
  for (std::size_t i = 0; i < rep.exact.size(); ++i) {
    const double y = rep.exact.x(i);
    rep.approx_fixed.values[i] = inside(spec, y) ? std::exp(tilted_log_density(spec, r.t, y)) : 0.0;
  }
  rep.approx_fixed.origin = GridDensity::Origin::Tilted;
  rep.approx_fixed.origin_param = r.t;
  rep.approx_fixed.update_mass();
  rep.tv_fixed = total_variation(rep.exact, rep.approx_fixed);

  rep.gaussian_baseline = gaussian_baseline_grid(spec, point, rep.exact, BaselineForm::Tilted);
  rep.tv_gaussian = total_variation(rep.exact, rep.gaussian_baseline);

  // ratio band over the central 99% of the exact mass
  std::vector<double> cdf(rep.exact.size(), 0.0);
  for (std::size_t i = 1; i < cdf.size(); ++i) {
    cdf[i] = cdf[i - 1] + 0.5 * rep.exact.dx * (rep.exact.values[i] + rep.exact.values[i - 1]);
  }
  const double total = cdf.back();
  rep.ratio_min = num::kInf;
  rep.ratio_max = 0.0;
  for (std::size_t i = 0; i < cdf.size(); ++i) {
    if (cdf[i] < 0.005 * total || cdf[i] > 0.995 * total) continue;
    if (!(rep.approx_fixed.values[i] > 0.0)) continue;
    const double q = rep.exact.values[i] / rep.approx_fixed.values[i];
    rep.ratio_min = std::min(rep.ratio_min, q);
    rep.ratio_max = std::max(rep.ratio_max, q);
  }

  const double s = std::sqrt(r.s2);
  for (double u : {-2.0, -1.0, 0.0, 1.0, 2.0}) {
    const double y = point.a_n + u * s;
    if (!inside(spec, y)) continue;
    rep.probe_y.push_back(y);
    const double yy[1] = {y};
    rep.approx_adaptive_log.push_back(gibbs_adaptive(spec, point, yy));
  }
  return rep;
}

std::vector<ConcentrationRow> concentration_check(const DensitySpec& spec,
                                                  const std::vector<double>& a_n_list,
                                                  const std::vector<double>& u_grid) {
  std::vector<ConcentrationRow> out;
  for (double a : a_n_list) {
    ConcentrationRow row;
    row.a_n = a;
    const TiltRecord r = solve_tilt(spec, a);
    row.t = r.t;
    row.s = std::sqrt(r.s2);
    for (double u : u_grid) {
      const double s2u = u == 0.0 ? r.s2 : moments(spec, r.t + u / row.s).s2;
      row.max_ratio_deviation = std::max(row.max_ratio_deviation, std::fabs(s2u / r.s2 - 1.0));
    }
    const GridDensity g = normalized_tilted_grid(spec, a, {-12.0, 12.0}, 4097);
    for (std::size_t i = 0; i < g.size(); ++i) {
      row.sup_distance_to_normal = std::max(
          row.sup_distance_to_normal, std::fabs(g.values[i] - num::standard_normal_pdf(g.x(i))));
    }
    const double lo = std::max(spec.support_left(), a - 3.0 * row.s);
    const double inner = num::integrate(
        [&](double y) { return inside(spec, y) ? std::exp(tilted_log_density(spec, r.t, y)) : 0.0; },
        lo, a + 3.0 * row.s, 64);
    row.tail_mass_3s = std::max(0.0, 1.0 - inner);
    out.push_back(row);
  }
  return out;
}

}  // namespace edp
