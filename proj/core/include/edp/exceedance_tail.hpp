#pragma once

// Large-deviation tail quantities for S_n >= n a_n: the rate function, the
// sharp tail formula, the point-density envelope H_n, the exceedance
// conditional density of X_1 and an importance-sampling cross-check.
// Everything is carried in log scale.

#include <cstdint>
#include <functional>
#include <vector>

#include "edp/density_model.hpp"
#include "edp/grid_density.hpp"

namespace edp {

struct RatePoint {
  double x = 0.0;
  double t_x = 0.0;  // m^{-1}(x)
  double I = 0.0;
  double I_prime = 0.0;
  double s_tx = 0.0;
};

RatePoint rate_I(const DensitySpec& spec, double x);

struct TailApprox {
  double log_p = 0.0;
  double t_n = 0.0;
  double s_tn = 0.0;
  double rate = 0.0;          // n I(a_n)
  double growth_value = 0.0;  // psi(t_n)^2 / (sqrt(n) psi'(t_n))
  bool growth_warning = false;
  double lambda_sq = 0.0;     // t_n^2 s^2(t_n)
};

// log P(S_n >= n a_n) ~ -n I(a_n) - log(sqrt(2 pi n) t_n s(t_n)).
TailApprox tail_approx(const DensitySpec& spec, int n, double a_n);
double tail_prob_approx(const DensitySpec& spec, int n, double a_n);

// log H_n(u) = log(sqrt(n) exp(-n I(u)) / (sqrt(2 pi) s(t_u))).
double point_density_H(const DensitySpec& spec, int n, double u);

// eta_n = (log n)^2 / (n h(a_n)).
double eta_schedule(const DensitySpec& spec, int n, double a_n);

// log of the integral of exp(logf) over [a, b], composite GL20 with the given
// panel count; robust to integrands far outside double range.
double log_integrate(const std::function<double(double)>& logf, double a, double b, int panels);

// Mixture of tilted densities pi^tau over tau in [a_n, a_n + eta_n] with
// weights n t_n s(t_n) e^{n I(a_n)} e^{-n I(tau)} / s(t_tau), discretised by
// Gauss-Legendre nodes. The raw weights integrate to raw_log_mass(); log_density
// returns the renormalised density.
class ExceedanceMixture {
 public:
  ExceedanceMixture(const DensitySpec& spec, int n, double a_n, double eta = 0.0, int nodes = 64);

  int n() const { return n_; }
  double a_n() const { return a_n_; }
  double eta() const { return eta_; }
  double raw_log_mass() const { return log_mass_; }
  double log_raw(double y) const;
  double log_density(double y) const { return log_raw(y) - log_mass_; }
  const std::vector<double>& taus() const { return tau_; }
  const std::vector<double>& tilts() const { return t_; }

 private:
  DensitySpec spec_;
  int n_;
  double a_n_;
  double eta_;
  double log_mass_ = 0.0;
  std::vector<double> tau_;
  std::vector<double> t_;
  std::vector<double> log_coef_;
};

double exceedance_density(const DensitySpec& spec, int n, double a_n, double y);

// Exact density of X_1 given S_n >= n a_n, on a grid whose nodes include
// n a_n - (n - 1) x_left. Built from the (n-1)-fold convolution of pi^{t_n}:
// p(y | A) is proportional to pi^{t_n}(y) G(n a_n - y) with
// G(r) = integral over s >= r of exp(-t_n (s - r)) f_{n-1}(s).
GridDensity exact_exceedance_marginal(const DensitySpec& spec, int n, double a_n, double dx = 0.0);

struct ExceedanceReport {
  int n = 0;
  double a_n = 0.0;
  double eta = 0.0;
  double raw_log_mass = 0.0;
  double grid_integral = 0.0;  // integral of the renormalised density on the grid
  double tv_exact = 0.0;
  bool decreasing_after_mode = false;
  GridDensity exact;
  std::vector<double> approx;  // exceedance_density on the exact grid nodes
};

ExceedanceReport exceedance_report(const DensitySpec& spec, int n, double a_n);

struct MassRatio {
  double log_p1 = 0.0;  // log of H_n mass on [a_n, a_n + eta_n]
  double log_p2 = 0.0;  // log of H_n mass on [a_n + eta_n, inf)
  double log_ratio = 0.0;
};

MassRatio exceedance_mass_ratio(const DensitySpec& spec, int n, double a_n);

struct TailEstimate {
  int n = 0;
  double a_n = 0.0;
  double log_p_analytic = 0.0;
  double log_p_mc = 0.0;
  double mc_std_err = 0.0;  // standard error of log_p_mc
  std::size_t mc_samples = 0;
  std::uint64_t seed = 0;
  std::size_t hits = 0;
};

// Importance sampling under pi^{t_n}: each draw contributes
// exp(n log Phi(t_n) - t_n S) 1{S >= n a_n}.
TailEstimate mc_tail_estimate(const DensitySpec& spec, int n, double a_n, std::size_t samples,
                              std::uint64_t seed);

}  // namespace edp
