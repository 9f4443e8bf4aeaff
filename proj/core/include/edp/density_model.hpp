#pragma once

// Light-tailed densities on [support_left, inf) written as
//
//   p(x) = c * exp(-g(x) + q(x)),   h = g',
//
// together with the regularity diagnostics used to place h in the
// regularly varying class R_beta or the rapidly varying class R_inf.

#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace edp {

using RealFn = std::function<double(double)>;

namespace detail {
struct SpecState;
class TiltMemo;
}  // namespace detail

struct ClassHint {
  enum class Kind { RBeta, RInfinity, Unknown };

  Kind kind = Kind::Unknown;
  double beta = 0.0;  // meaningful for RBeta only

  static ClassHint r_beta(double beta) { return {Kind::RBeta, beta}; }
  static ClassHint r_infinity() { return {Kind::RInfinity, 0.0}; }
  static ClassHint unknown() { return {}; }
};

std::string to_string(ClassHint hint);

// g and h are required. h1..h3 are the first three derivatives of h; when
// absent they are obtained by central differences. An empty q means q == 0.
struct DensityClosures {
  RealFn g;
  RealFn h;
  RealFn h1;
  RealFn h2;
  RealFn h3;
  RealFn q;
};

// Immutable description of a density. Copies share state, including the
// lazily computed normalizing constant and the tilt memo table, so a spec can
// be handed to several threads at once.
class DensitySpec {
 public:
  DensitySpec(std::string family, DensityClosures closures, double support_left, ClassHint hint,
              std::optional<double> log_c = std::nullopt, bool singular_at_boundary = false);

  const std::string& family() const;
  // Family parameters used for serialization (e.g. {"k": 2}).
  const std::map<std::string, double>& params() const;
  DensitySpec with_params(std::map<std::string, double> params) const;

  double support_left() const;
  ClassHint class_hint() const;
  // True when g diverges at support_left, so the density must be evaluated
  // on the open interval.
  bool singular_at_boundary() const;
  bool has_q() const;
  bool has_analytic_derivatives() const;

  // log c; computed by quadrature on first use when not supplied.
  double log_c() const;
  bool log_c_supplied() const;

  double g(double x) const;
  double h(double x) const;
  double q(double x) const;
  // log_c - g(x) + q(x) without domain checks; used in quadrature loops.
  double log_density_unchecked(double x) const;

  const DensityClosures& closures() const;
  detail::TiltMemo& tilt_memo() const;

 private:
  std::shared_ptr<detail::SpecState> state_;
};

// Weibull with shape k > 1 and unit scale: g = x^k - (k-1) log x, c = k.
DensitySpec weibull(double k);
// p(x) = c exp(-e^{x-1}) on [0, inf); c from quadrature.
DensitySpec double_exponential();
// Same g and class as `base` with the perturbation q added; log c is
// recomputed on first use.
DensitySpec with_perturbation(const DensitySpec& base, RealFn q);

double log_density(const DensitySpec& spec, double x);

struct HazardValues {
  double h = 0.0;
  double h1 = 0.0;
  double h2 = 0.0;
  double h3 = 0.0;
};

HazardValues hazard_and_derivatives(const DensitySpec& spec, double x);
// Central differences of h only, ignoring any analytic closures.
HazardValues hazard_finite_difference(const DensitySpec& spec, double x);

struct PsiOptions {
  double cap = 1e12;  // largest x tried by the doubling search
};

// psi(u) = inf{x : h(x) >= u}.
double psi_inverse(const DensitySpec& spec, double u, const PsiOptions& options = {});
// psi'(u) = 1 / h'(psi(u)).
double psi_prime(const DensitySpec& spec, double u);
// psi''(u) = -h''(x) / h'(x)^3 at x = psi(u).
double psi_second(const DensitySpec& spec, double u);

// Laplace centre of K(x, t) + q(x) = t x - g(x) + q(x): the interior
// maximiser psi(t) when h reaches t inside the support, otherwise the left
// boundary. `scale` is the curvature scale (h'(centre))^{-1/2} or an
// exponential decay length at the boundary.
struct LaplaceCentre {
  double centre = 0.0;
  double scale = 1.0;
  bool interior = true;
};
LaplaceCentre laplace_centre(const DensitySpec& spec, double t);

// --- regularity diagnostics -------------------------------------------------

struct EpsilonSample {
  double x = 0.0;
  double eps = 0.0;
  double x_deps = 0.0;     // x * eps'(x)
  double x2_d2eps = 0.0;   // x^2 * eps''(x)
};

struct ConditionFlag {
  bool pass = false;
  double margin = 0.0;
  std::string rule;           // how the limit statement was operationalised
  std::vector<double> grid;   // grid the verdict was taken on
  std::vector<double> values; // the sequence the rule inspected
};

struct RegularityReport {
  ClassHint::Kind verdict = ClassHint::Kind::Unknown;
  double beta_estimate = 0.0;  // local index x h'(x)/h(x) at the last grid point
  // eps of l(x) = h(x)/x^beta (R_beta reading)
  std::vector<EpsilonSample> epsilon_beta;
  // eps of psi (R_inf reading)
  std::vector<EpsilonSample> epsilon_infinity;
  std::map<std::string, ConditionFlag> condition_flags;
  std::map<std::string, std::vector<double>> diagnostic_curves;
};

// Epsilon representation on `grid` for the spec's class hint plus the limit
// conditions that go with it. With an Unknown hint both readings are
// computed and no condition is flagged.
RegularityReport epsilon_profile(const DensitySpec& spec, const std::vector<double>& grid);

// Full report: epsilon profile, the q-bound condition, monotone hazard, the
// g(x)/x growth check and a class verdict.
RegularityReport regularity_report(const DensitySpec& spec, const std::vector<double>& grid,
                                   double theta = 0.5);

struct QBoundCheck {
  double bound = 0.0;
  double sup_q = 0.0;
  bool pass = false;
};

// sup of |q| over 201 points of [x - theta x, x + theta x] against
// (x h(x))^{-1/2}.
QBoundCheck check_q_bound(const DensitySpec& spec, double x, double theta);

struct DecayRow {
  double t = 0.0;
  double x_hat = 0.0;
  double sigma = 0.0;
  double l = 0.0;
  double log_sigma_ratio = 0.0;   // |log sigma| / int_1^t psi(u) du
  double h3_window = 0.0;         // sup_{|x|<=sigma l} |h'''(x_hat + x)| sigma^4 l^4
  double h2_sigma3_l = 0.0;       // |h''(x_hat)| sigma^3 l
  double xi_ratio = 0.0;          // sup_{|y|<=l} |xi(sigma y + x_hat, t)| / (|h''(x_hat)| sigma^3)
  bool window_clipped = false;    // x_hat - sigma l fell outside the support
};

struct DecayDiagnostics {
  std::vector<DecayRow> rows;

  std::vector<double> series(double DecayRow::*member) const;
  bool strictly_decreasing(double DecayRow::*member) const;
};

// Default slowly varying witness (log(1 + t))^3.
double default_slowly_varying(double t);

DecayDiagnostics laplace_remainder_diagnostics(const DensitySpec& spec,
                                            const std::vector<double>& t_grid,
                                            const RealFn& l = default_slowly_varying);

// int_1^t psi(u) du through K(psi(t), t) - K(psi(1), 1).
double integrated_psi(const DensitySpec& spec, double t);

}  // namespace edp
