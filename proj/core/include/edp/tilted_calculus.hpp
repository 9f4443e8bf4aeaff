#pragma once

// Exponential tilting of a DensitySpec: log Phi(t), the tilted density
// pi^t(x) = e^{tx} p(x) / Phi(t), its first three cumulants by Laplace-window
// quadrature, the inverse problem m(t) = a, and the large-t asymptotic forms
// of the cumulants.

#include "edp/density_model.hpp"
#include "edp/numerics.hpp"
#include "edp/tilt_record.hpp"

namespace edp {

// Sixth moment of the standard normal.
inline constexpr double kM6 = 15.0;

// E[Z^{2j}] for a standard normal by the recursion M_{2j} = (2j - 1) M_{2j-2}.
double normal_even_moment(int two_j);

// log Phi(t). Negative t is accepted as long as Phi(t) is finite, which it
// always is on a support bounded on the left.
double log_mgf(const DensitySpec& spec, double t);

double tilted_log_density(const DensitySpec& spec, double t, double x);

// m, s^2, mu_3 of pi^t as centred moment integrals over the Laplace window.
// Records are memoised per spec.
TiltRecord moments(const DensitySpec& spec, double t);

struct SolveOptions {
  double rel_tol = 1e-8;  // on |m(t) - a| / max(1, a)
  double t_cap = 1e9;     // doubling search gives up here
};

// t with m(t) = a; a == m(0) returns t = 0.
TiltRecord solve_tilt(const DensitySpec& spec, double a, const SolveOptions& options = {});

// Leading-order Laplace approximation of the record at large t:
// log Phi = log c + log sqrt(2 pi) + log sigma + K(x_hat, t) and the refined
// cumulant expansions below.
TiltRecord asymptotic_record(const DensitySpec& spec, double t);

struct MomentTriple {
  double m = 0.0;
  double s2 = 0.0;
  double mu3 = 0.0;
};

struct MomentComparison {
  double t = 0.0;
  MomentTriple quadrature;
  // (psi, psi', ((M6 - 3)/2) psi'')
  MomentTriple asymptotic_order1;
  // x_hat - h''s^4/2, s^2 - (h''s^4)^2/4, ((3 - M6)/2) h''s^6 - (h''s^4)^3/4
  MomentTriple asymptotic_refined;
  MomentTriple ratios_order1;   // quadrature / order1
  MomentTriple ratios_refined;  // quadrature / refined
  double psi_second = 0.0;      // psi''(t)
};

MomentComparison asymptotic_moments(const DensitySpec& spec, double t);

// mu_3(t) / s(t)^3.
double skewness_ratio(const DensitySpec& spec, double t);

struct PsiExpansion {
  num::SignedLog exact;      // int (x - x_hat)^alpha e^{tx} p(x) dx
  num::SignedLog expansion;  // c sigma^{alpha+1} e^{K(x_hat,t)} T_1(t, alpha)
  double log_phi = 0.0;      // log Phi(t), for normalised comparisons
  double sigma = 0.0;
};

// alpha in {0, 1, 2, 3}; T_1 is integrated over |y| <= l^{1/3}/sqrt(2).
PsiExpansion laplace_psi_expansion(const DensitySpec& spec, double t, int alpha, double l);

// pi^t written as a DensitySpec: g - t x, same q, log c - log Phi(t).
DensitySpec tilt_spec(const DensitySpec& spec, double t);

}  // namespace edp
