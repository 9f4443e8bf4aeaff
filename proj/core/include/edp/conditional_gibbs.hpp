#pragma once

// Conditional laws of the first k summands given S_n = n a_n: the sequential
// tilt approximation, the fixed-tilt approximation pi^{a_n}, an exact grid
// convolution oracle, total variation comparisons, the Gaussian pseudo-prior
// baseline and the concentration of pi^{a_n} around a_n.

#include <map>
#include <span>
#include <vector>

#include "edp/density_model.hpp"
#include "edp/grid_density.hpp"

namespace edp {

// psi(t)^2 / sqrt(n psi'(t)) with m(t) = a_n.
double growth_condition(const DensitySpec& spec, int n, double a_n);

struct ConditioningPoint {
  int n = 0;
  double a_n = 0.0;
  int k = 1;
  double t = 0.0;
  double growth_value = 0.0;
  bool growth_warning = false;  // growth_value > 1
};

ConditioningPoint make_point(const DensitySpec& spec, int n, double a_n, int k = 1);

struct SequentialTilts {
  std::vector<double> y;
  std::vector<double> m_list;
  std::vector<double> t_list;
  std::vector<double> s_list;
  std::vector<double> z_list;
  std::vector<double> sqrt_n_z2;  // sqrt(n) z_i^2
};

// m_i = (n a_n - (y_1 + ... + y_i)) / (n - i), t_i = m^{-1}(m_i),
// z_i = (m_i - y_{i+1}) / (s_i sqrt(n - i - 1)).
SequentialTilts sequential_tilts(const DensitySpec& spec, const ConditioningPoint& point,
                                 std::span<const double> y);

// log prod_i pi^{m_i}(y_{i+1}).
double gibbs_adaptive(const DensitySpec& spec, const ConditioningPoint& point,
                      std::span<const double> y);
// log prod_i pi^{a_n}(y_i).
double gibbs_fixed(const DensitySpec& spec, const ConditioningPoint& point,
                   std::span<const double> y);

enum class OracleBase {
  NaturalTilt,  // convolve pi^{a_n}; the conditional law does not depend on the tilt
  AsGiven,      // convolve the spec's own density
};

struct OracleOptions {
  OracleBase base = OracleBase::NaturalTilt;
  ConvolutionMethod method = ConvolutionMethod::Fft;
  // Grid step; 0 picks about s/32 for the convolved density. The target
  // n a_n always falls on a node.
  double dx = 0.0;
  // Nodes beyond the target kept for interpolation margin.
  std::size_t margin_nodes = 16;
};

// Exact conditional densities given S_n = n a_n through
//   p(y_1..y_k | S_n = n a_n) = prod p(y_i) f_{n-k}(n a_n - sum y) / f_n(n a_n),
// with f_j the j-fold convolution of the working density on a grid starting
// at the support boundary. All folds up to n are built by the constructor;
// grids are never renormalised so the tilt invariance of the ratio is exact.
class ConditionalOracle {
 public:
  ConditionalOracle(const DensitySpec& spec, int n, double a_n, const OracleOptions& options = {});

  int n() const { return n_; }
  double a_n() const { return a_n_; }
  double target() const { return target_; }
  double dx() const { return dx_; }
  std::size_t points() const { return points_; }
  // Density actually convolved (pi^{a_n} under NaturalTilt).
  const DensitySpec& working_spec() const { return work_; }

  // log f_j(x) of the working density; j = 1 is evaluated in closed form.
  // Beyond the last node throws IncompatibleCondition.
  double log_fold(int j, double x) const;
  const GridDensity& fold(int j) const;

  // log p(X_1^k = y | S_n = n a_n), k = y.size() < n.
  double log_conditional(std::span<const double> y) const;

  // log density of one summand y given that `remaining` summands add up to
  // `residual`: log p(y) + log f_{r-1}(residual - y) - log f_r(residual).
  // Returns -inf when residual - y leaves the support.
  double log_step(int remaining, double residual, double y) const;

  // Marginal of X_1 on the oracle nodes in [support_left, target].
  GridDensity marginal() const;

 private:
  double log_working_density(double x) const;

  DensitySpec spec_;
  DensitySpec work_;
  int n_;
  double a_n_;
  double target_;
  double dx_ = 0.0;
  std::size_t points_ = 0;
  OracleOptions options_;
  std::vector<GridDensity> folds_;  // folds_[j - 1] = f_j
};

// log p(X_1^k = y | S_n = n a_n) from a fresh oracle (n <= 64).
double exact_conditional_density(const DensitySpec& spec, const ConditioningPoint& point,
                                 std::span<const double> y, const OracleOptions& options = {});

enum class BaselineForm {
  Tilted,   // C pi^{a_n}(y) n(a_n, s^2 (n - 1); y)
  Literal,  // C p(y) n(a_n, s^2 (n - 1); y)
};

// Gaussian pseudo-prior baseline on the nodes of `grid`, normalised there.
GridDensity gaussian_baseline_grid(const DensitySpec& spec, const ConditioningPoint& point,
                                   const GridDensity& grid, BaselineForm form = BaselineForm::Tilted);

// log of the baseline at y, with C fixed by quadrature over the support.
double gaussian_baseline(const DensitySpec& spec, const ConditioningPoint& point, double y,
                         BaselineForm form = BaselineForm::Tilted);

struct ConditionalReport {
  ConditioningPoint point;
  GridDensity exact;              // p(X_1 = y | S_n = n a_n)
  GridDensity approx_fixed;       // pi^{a_n}
  GridDensity gaussian_baseline;  // tilted form
  std::vector<double> probe_y;
  std::vector<double> approx_adaptive_log;  // log g_m at the probes (k = 1)
  double tv_fixed = 0.0;
  double tv_gaussian = 0.0;
  double ratio_min = 0.0;  // exact / pi^{a_n} over the central 99% of exact mass
  double ratio_max = 0.0;
  double exact_mass = 0.0;
};

ConditionalReport tv_distance(const DensitySpec& spec, const ConditioningPoint& point,
                              const OracleOptions& options = {});

// (1/2) int |a - b| over shared nodes (trapezoid).
double total_variation(const GridDensity& a, const GridDensity& b);

struct ConcentrationRow {
  double a_n = 0.0;
  double t = 0.0;
  double s = 0.0;
  double max_ratio_deviation = 0.0;  // max_u |s^2(t + u/s)/s^2(t) - 1|
  double sup_distance_to_normal = 0.0;
  double tail_mass_3s = 0.0;         // pi^{a_n}(|X - a_n| > 3 s)
};

std::vector<ConcentrationRow> concentration_check(const DensitySpec& spec,
                                                  const std::vector<double>& a_n_list,
                                                  const std::vector<double>& u_grid);

}  // namespace edp
