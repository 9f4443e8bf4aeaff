#include "edp/tilted_calculus.hpp"

#include <cmath>
#include <sstream>

#include "edp/detail/tilt_memo.hpp"
#include "edp/detail/window.hpp"
#include "edp/error.hpp"

namespace edp {

namespace {

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

TiltRecord compute_record(const DensitySpec& spec, double t) {
  if (!std::isfinite(t)) throw Error(ErrorKind::Precondition, "tilt must be finite");
  const detail::WindowSums w = detail::integrate_tilted_window(spec, t);
  const double s0 = w.sums[0];
  const double d1 = w.sums[1] / s0;
  const double d2 = w.sums[2] / s0;
  const double d3 = w.sums[3] / s0;

  TiltRecord r;
  r.t = t;
  r.log_phi = t == 0.0 ? 0.0 : spec.log_c() + w.log_ref + std::log(s0);
  r.m = w.centre + d1;
  r.s2 = d2 - d1 * d1;
  r.mu3 = d3 - 3.0 * d1 * d2 + 2.0 * d1 * d1 * d1;
  r.method = TiltRecord::Method::Quadrature;
  r.window = {w.centre, w.sigma, w.half_width, w.lo, w.hi};
  if (!(r.s2 > 0.0) || !std::isfinite(r.log_phi)) {
    throw Error(ErrorKind::EvaluationOverflow, "degenerate tilted moments at t=" + fmt(t));
  }
  return r;
}

}  // namespace

double normal_even_moment(int two_j) {
  if (two_j < 0 || two_j % 2 != 0) throw Error(ErrorKind::Precondition, "even order expected");
  double m = 1.0;
  for (int k = 2; k <= two_j; k += 2) m *= (k - 1);
  return m;
}

TiltRecord moments(const DensitySpec& spec, double t) {
  auto& memo = spec.tilt_memo();
  if (auto hit = memo.find_record(t)) return *hit;
  TiltRecord r = compute_record(spec, t);
  memo.store_record(r);
  return r;
}

double log_mgf(const DensitySpec& spec, double t) { return moments(spec, t).log_phi; }

double tilted_log_density(const DensitySpec& spec, double t, double x) {
  const double lp = log_density(spec, x);
  if (t == 0.0) return lp;
  return t * x - log_mgf(spec, t) + lp;
}

TiltRecord solve_tilt(const DensitySpec& spec, double a, const SolveOptions& options) {
  auto& memo = spec.tilt_memo();
  if (auto hit = memo.find_tilt(a)) return moments(spec, *hit);

  const TiltRecord base = moments(spec, 0.0);
  if (a == base.m) {
    memo.store_tilt(a, 0.0);
    return base;
  }
  if (!(a > base.m)) {
    throw Error(ErrorKind::SubMeanTarget,
                "target " + fmt(a) + " is below the mean m(0)=" + fmt(base.m));
  }

  auto m_of = [&](double t) { return compute_record(spec, t).m - a; };
  // m(t) ~ psi(t) suggests t ~ h(a)
  double guess = spec.h(a);
  if (!(guess > 1e-6) || !std::isfinite(guess)) guess = 1.0;
  double lo = 0.0;
  double hi = guess;
  while (m_of(hi) < 0.0) {
    lo = hi;
    if (hi >= options.t_cap) {
      throw Error(ErrorKind::Unreachable,
                  "no tilt below " + fmt(options.t_cap) + " reaches mean " + fmt(a));
    }
    hi = std::min(2.0 * hi, options.t_cap);
  }
  if (lo == 0.0) {
    for (int i = 0; i < 8 && m_of(0.5 * hi) > 0.0; ++i) hi *= 0.5;
    if (m_of(0.5 * hi) < 0.0) lo = 0.5 * hi;
  }

  num::RootOptions ro;
  ro.abs_tol = 0.1 * options.rel_tol * std::max(1.0, std::fabs(a));
  const double t = num::solve_increasing(
      m_of, [&](double tt) { return compute_record(spec, tt).s2; }, lo, hi, ro);
  TiltRecord r = moments(spec, t);
  if (std::fabs(r.m - a) > options.rel_tol * std::max(1.0, std::fabs(a))) {
    throw Error(ErrorKind::Unreachable, "tilt solve stalled for target " + fmt(a));
  }
  memo.store_tilt(a, t);
  return r;
}

TiltRecord asymptotic_record(const DensitySpec& spec, double t) {
  const double x = psi_inverse(spec, t);
  const HazardValues hv = hazard_and_derivatives(spec, x);
  if (!(hv.h1 > 0.0)) throw Error(ErrorKind::NonConcave, "h'(x_hat) <= 0");
  const double s2 = 1.0 / hv.h1;
  const double sigma = std::sqrt(s2);
  const double b = hv.h2 * s2 * s2;  // h'' sigma^4
  TiltRecord r;
  r.t = t;
  r.log_phi = spec.log_c() + num::kLogSqrt2Pi + std::log(sigma) + t * x - spec.g(x);
  r.m = x - 0.5 * b;
  r.s2 = s2 - 0.25 * b * b;
  r.mu3 = 0.5 * (3.0 - kM6) * hv.h2 * s2 * s2 * s2 - 0.25 * b * b * b;
  r.method = TiltRecord::Method::Asymptotic;
  r.window = {x, sigma, 12.0 * sigma, x - 12.0 * sigma, x + 12.0 * sigma};
  return r;
}

MomentComparison asymptotic_moments(const DensitySpec& spec, double t) {
  MomentComparison out;
  out.t = t;
  const TiltRecord q = moments(spec, t);
  out.quadrature = {q.m, q.s2, q.mu3};

  const double x = psi_inverse(spec, t);
  const HazardValues hv = hazard_and_derivatives(spec, x);
  if (!(hv.h1 > 0.0)) throw Error(ErrorKind::NonConcave, "h'(x_hat) <= 0");
  out.psi_second = -hv.h2 / (hv.h1 * hv.h1 * hv.h1);
  out.asymptotic_order1 = {x, 1.0 / hv.h1, 0.5 * (kM6 - 3.0) * out.psi_second};

  const TiltRecord ref = asymptotic_record(spec, t);
  out.asymptotic_refined = {ref.m, ref.s2, ref.mu3};

  auto ratio = [](const MomentTriple& a, const MomentTriple& b) {
    return MomentTriple{a.m / b.m, a.s2 / b.s2, a.mu3 / b.mu3};
  };
  out.ratios_order1 = ratio(out.quadrature, out.asymptotic_order1);
  out.ratios_refined = ratio(out.quadrature, out.asymptotic_refined);
  return out;
}

double skewness_ratio(const DensitySpec& spec, double t) {
  const TiltRecord r = moments(spec, t);
  return r.mu3 / (r.s2 * std::sqrt(r.s2));
}

PsiExpansion laplace_psi_expansion(const DensitySpec& spec, double t, int alpha, double l) {
  if (alpha < 0 || alpha > 3) throw Error(ErrorKind::Precondition, "alpha must be in 0..3");
  if (!(l > 1.0)) throw Error(ErrorKind::Precondition, "l must exceed 1");
  const LaplaceCentre lc = laplace_centre(spec, t);
  if (!lc.interior) {
    throw Error(ErrorKind::Precondition, "no interior Laplace centre at t=" + fmt(t));
  }
  const detail::WindowSums w = detail::integrate_tilted_window(spec, t);

  PsiExpansion out;
  out.sigma = lc.scale;
  out.log_phi = spec.log_c() + w.log_ref + std::log(w.sums[0]);
  const double sa = w.sums[alpha];
  out.exact = num::SignedLog::from(sa);
  out.exact.log_abs += spec.log_c() + w.log_ref;

  const double x = lc.centre;
  const HazardValues hv = hazard_and_derivatives(spec, x);
  const double sigma = lc.scale;
  const double L = std::cbrt(l) / std::sqrt(2.0);
  auto moment = [L](int p) {
    return num::integrate([p](double y) { return std::pow(y, p) * std::exp(-0.5 * y * y); }, -L,
                          L, 32);
  };
  const double t1 = moment(alpha) - hv.h2 * sigma * sigma * sigma / 6.0 * moment(3 + alpha);
  out.expansion = num::SignedLog::from(t1);
  out.expansion.log_abs += spec.log_c() + (alpha + 1) * std::log(sigma) + t * x - spec.g(x);
  return out;
}

DensitySpec tilt_spec(const DensitySpec& spec, double t) {
  DensityClosures f = spec.closures();
  RealFn g = f.g;
  RealFn h = f.h;
  f.g = [g, t](double x) { return g(x) - t * x; };
  f.h = [h, t](double x) { return h(x) - t; };
  const double log_c = spec.log_c() - log_mgf(spec, t);
  DensitySpec out(spec.family(), std::move(f), spec.support_left(), spec.class_hint(), log_c,
                  spec.singular_at_boundary());
  auto params = spec.params();
  params["tilt"] = params.count("tilt") ? params["tilt"] + t : t;
  return out.with_params(std::move(params));
}

}  // namespace edp
