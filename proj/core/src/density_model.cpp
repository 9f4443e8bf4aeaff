#include "edp/density_model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <mutex>
#include <sstream>

#include "edp/detail/tilt_memo.hpp"
#include "edp/detail/window.hpp"
#include "edp/error.hpp"
#include "edp/numerics.hpp"

namespace edp {

namespace detail {

struct SpecState {
  std::string family;
  std::map<std::string, double> params;
  DensityClosures closures;
  double support_left = 0.0;
  ClassHint hint;
  bool singular = false;
  std::optional<double> supplied_log_c;

  std::once_flag log_c_once;
  double log_c_value = 0.0;

  TiltMemo memo;
};

}  // namespace detail

namespace {

std::string format_x(double x) {
  std::ostringstream os;
  os.precision(17);
  os << x;
  return os.str();
}

// Smallest abscissa at which a singular-boundary spec may be evaluated.
double inner_left(const DensitySpec& spec) {
  const double left = spec.support_left();
  if (!spec.singular_at_boundary()) return left;
  return left + 1e-12 * std::max(1.0, std::fabs(left));
}

void check_domain(const DensitySpec& spec, double x, const char* what) {
  const double left = spec.support_left();
  if (std::isnan(x) || x < left || (spec.singular_at_boundary() && x <= left)) {
    throw Error(ErrorKind::Boundary, std::string(what) + " at x=" + format_x(x) +
                                         " outside the support interior");
  }
}

}  // namespace

std::string to_string(ClassHint hint) {
  switch (hint.kind) {
    case ClassHint::Kind::RBeta: {
      std::ostringstream os;
      os << "R_beta(" << hint.beta << ")";
      return os.str();
    }
    case ClassHint::Kind::RInfinity: return "R_inf";
    case ClassHint::Kind::Unknown: break;
  }
  return "unknown";
}

DensitySpec::DensitySpec(std::string family, DensityClosures closures, double support_left,
                         ClassHint hint, std::optional<double> log_c, bool singular_at_boundary)
    : state_(std::make_shared<detail::SpecState>()) {
  if (!closures.g || !closures.h) {
    throw Error(ErrorKind::Precondition, "density spec needs g and h");
  }
  if (!(support_left >= 0.0) || !std::isfinite(support_left)) {
    throw Error(ErrorKind::Precondition, "support_left must be finite and >= 0");
  }
  state_->family = std::move(family);
  state_->closures = std::move(closures);
  state_->support_left = support_left;
  state_->hint = hint;
  state_->singular = singular_at_boundary;
  state_->supplied_log_c = log_c;
}

const std::string& DensitySpec::family() const { return state_->family; }
const std::map<std::string, double>& DensitySpec::params() const { return state_->params; }

DensitySpec DensitySpec::with_params(std::map<std::string, double> params) const {
  DensitySpec copy(state_->family, state_->closures, state_->support_left, state_->hint,
                   state_->supplied_log_c, state_->singular);
  copy.state_->params = std::move(params);
  return copy;
}

double DensitySpec::support_left() const { return state_->support_left; }
ClassHint DensitySpec::class_hint() const { return state_->hint; }
bool DensitySpec::singular_at_boundary() const { return state_->singular; }
bool DensitySpec::has_q() const { return static_cast<bool>(state_->closures.q); }
bool DensitySpec::has_analytic_derivatives() const {
  const auto& c = state_->closures;
  return c.h1 && c.h2 && c.h3;
}

double DensitySpec::log_c() const {
  if (state_->supplied_log_c) return *state_->supplied_log_c;
  std::call_once(state_->log_c_once, [this] {
    const detail::WindowSums w = detail::integrate_tilted_window(*this, 0.0);
    state_->log_c_value = -(w.log_ref + std::log(w.sums[0]));
  });
  return state_->log_c_value;
}

bool DensitySpec::log_c_supplied() const { return state_->supplied_log_c.has_value(); }

double DensitySpec::g(double x) const { return state_->closures.g(x); }
double DensitySpec::h(double x) const { return state_->closures.h(x); }
double DensitySpec::q(double x) const {
  return state_->closures.q ? state_->closures.q(x) : 0.0;
}

double DensitySpec::log_density_unchecked(double x) const { return log_c() - g(x) + q(x); }

const DensityClosures& DensitySpec::closures() const { return state_->closures; }
detail::TiltMemo& DensitySpec::tilt_memo() const { return state_->memo; }

DensitySpec weibull(double k) {
  if (!(k > 1.0) || !std::isfinite(k)) {
    throw Error(ErrorKind::Precondition, "weibull shape k must be > 1");
  }
  const double k1 = k - 1.0;
  DensityClosures f;
  f.g = [k, k1](double x) { return std::pow(x, k) - k1 * std::log(x); };
  f.h = [k, k1](double x) { return k * std::pow(x, k1) - k1 / x; };
  f.h1 = [k, k1](double x) { return k * k1 * std::pow(x, k - 2.0) + k1 / (x * x); };
  f.h2 = [k, k1](double x) {
    return k * k1 * (k - 2.0) * std::pow(x, k - 3.0) - 2.0 * k1 / (x * x * x);
  };
  f.h3 = [k, k1](double x) {
    const double x2 = x * x;
    return k * k1 * (k - 2.0) * (k - 3.0) * std::pow(x, k - 4.0) + 6.0 * k1 / (x2 * x2);
  };
  DensitySpec spec("weibull", std::move(f), 0.0, ClassHint::r_beta(k1), std::log(k), true);
  return spec.with_params({{"k", k}});
}

DensitySpec double_exponential() {
  DensityClosures f;
  auto e = [](double x) { return std::exp(x - 1.0); };
  f.g = e;
  f.h = e;
  f.h1 = e;
  f.h2 = e;
  f.h3 = e;
  return DensitySpec("doubleexp", std::move(f), 0.0, ClassHint::r_infinity());
}

DensitySpec with_perturbation(const DensitySpec& base, RealFn q) {
  DensityClosures f = base.closures();
  f.q = std::move(q);
  DensitySpec spec(base.family(), std::move(f), base.support_left(), base.class_hint(),
                   std::nullopt, base.singular_at_boundary());
  return spec.with_params(base.params());
}

double log_density(const DensitySpec& spec, double x) {
  check_domain(spec, x, "log_density");
  const double v = spec.log_density_unchecked(x);
  if (std::isnan(v) || v == num::kInf) {
    throw Error(ErrorKind::EvaluationOverflow, "log_density at x=" + format_x(x));
  }
  return v;
}

HazardValues hazard_finite_difference(const DensitySpec& spec, double x) {
  check_domain(spec, x, "hazard");
  const double eps = std::numeric_limits<double>::epsilon();
  const double scale = std::max(1.0, std::fabs(x));
  // keep every stencil point strictly inside the support
  const double room = (x - spec.support_left()) / 2.5;
  auto step = [&](double root) {
    double d = root * scale;
    if (spec.singular_at_boundary() || x - 2.0 * d < spec.support_left()) d = std::min(d, room);
    return d;
  };
  const auto& h = spec.closures().h;
  HazardValues out;
  out.h = h(x);
  const double d1 = step(std::cbrt(eps));
  out.h1 = (h(x + d1) - h(x - d1)) / (2.0 * d1);
  const double d2 = step(std::pow(eps, 0.25));
  out.h2 = (h(x + d2) - 2.0 * out.h + h(x - d2)) / (d2 * d2);
  const double d3 = step(std::pow(eps, 0.2));
  out.h3 = (h(x + 2.0 * d3) - 2.0 * h(x + d3) + 2.0 * h(x - d3) - h(x - 2.0 * d3)) /
           (2.0 * d3 * d3 * d3);
  return out;
}

HazardValues hazard_and_derivatives(const DensitySpec& spec, double x) {
  check_domain(spec, x, "hazard");
  const auto& c = spec.closures();
  HazardValues out;
  if (spec.has_analytic_derivatives()) {
    out = {c.h(x), c.h1(x), c.h2(x), c.h3(x)};
  } else {
    out = hazard_finite_difference(spec, x);
    if (c.h1) out.h1 = c.h1(x);
    if (c.h2) out.h2 = c.h2(x);
    if (c.h3) out.h3 = c.h3(x);
  }
  if (!std::isfinite(out.h) || !std::isfinite(out.h1) || !std::isfinite(out.h2) ||
      !std::isfinite(out.h3)) {
    throw Error(ErrorKind::EvaluationOverflow, "hazard derivatives at x=" + format_x(x));
  }
  return out;
}

double psi_inverse(const DensitySpec& spec, double u, const PsiOptions& options) {
  if (!std::isfinite(u)) throw Error(ErrorKind::Precondition, "psi_inverse: non-finite u");
  const double lo = inner_left(spec);
  const double h_lo = spec.h(lo);
  if (!(h_lo < u)) {
    throw Error(ErrorKind::Precondition,
                "psi_inverse: u=" + format_x(u) + " not above h at the support boundary");
  }
  double hi = std::max(1.0, 2.0 * lo);
  double h_hi = spec.h(hi);
  while (!(h_hi >= u)) {
    if (std::isnan(h_hi)) {
      throw Error(ErrorKind::EvaluationOverflow, "psi_inverse: h(" + format_x(hi) + ") is NaN");
    }
    if (hi >= options.cap) {
      throw Error(ErrorKind::Unreachable, "psi_inverse: h stays below u=" + format_x(u) +
                                              " up to x=" + format_x(options.cap));
    }
    hi = std::min(2.0 * hi, options.cap);
    h_hi = spec.h(hi);
  }
  const double blo = hi > 1.0 ? std::max(lo, 0.5 * hi) : lo;
  const double start = spec.h(blo) < u ? blo : lo;
  const auto& c = spec.closures();
  std::function<double(double)> df;
  if (c.h1) df = c.h1;
  num::RootOptions ro;
  return num::solve_increasing([&](double x) { return spec.h(x) - u; }, df, start, hi, ro);
}

double psi_prime(const DensitySpec& spec, double u) {
  return 1.0 / hazard_and_derivatives(spec, psi_inverse(spec, u)).h1;
}

double psi_second(const DensitySpec& spec, double u) {
  const HazardValues hv = hazard_and_derivatives(spec, psi_inverse(spec, u));
  return -hv.h2 / (hv.h1 * hv.h1 * hv.h1);
}

LaplaceCentre laplace_centre(const DensitySpec& spec, double t) {
  const double lo = inner_left(spec);
  const double h_lo = spec.h(lo);
  if (h_lo >= t) {
    // K(., t) is decreasing on the whole support: the mass sits at the boundary
    double scale = h_lo > t ? 1.0 / (h_lo - t) : num::kInf;
    const HazardValues hv = hazard_and_derivatives(spec, lo);
    if (hv.h1 > 0.0) scale = std::min(scale, 1.0 / std::sqrt(hv.h1));
    if (!std::isfinite(scale)) scale = 1.0;
    return {lo, scale, false};
  }
  const double x = psi_inverse(spec, t);
  const HazardValues hv = hazard_and_derivatives(spec, x);
  if (!(hv.h1 > 0.0)) {
    throw Error(ErrorKind::NonConcave, "h'(x_hat) <= 0 at x_hat=" + format_x(x));
  }
  return {x, 1.0 / std::sqrt(hv.h1), true};
}

namespace detail {

WindowSums integrate_tilted_window(const DensitySpec& spec, double t) {
  const LaplaceCentre lc = laplace_centre(spec, t);
  const double left = spec.support_left();
  const double c = lc.centre;
  const double sigma = lc.scale;
  const double half = 12.0 * sigma;
  auto K = [&](double x) { return t * x - spec.g(x) + spec.q(x); };

  WindowSums out;
  out.centre = c;
  out.sigma = sigma;
  out.half_width = half;
  out.log_ref = K(c);
  if (!std::isfinite(out.log_ref)) out.log_ref = K(c + 1e-3 * sigma);
  if (!std::isfinite(out.log_ref)) {
    throw Error(ErrorKind::EvaluationOverflow, "tilted integrand at x=" + format_x(c));
  }

  auto piece = [&](double a, double b) {
    const int panels = std::max(1, static_cast<int>(std::ceil((b - a) / (0.5 * sigma))));
    return num::integrate_panels<4>(
        [&](double x, std::array<double, 4>& v) {
          const double e = K(x) - out.log_ref;
          if (std::isnan(e) || e > 700.0) {
            throw Error(ErrorKind::EvaluationOverflow, "tilted integrand at x=" + format_x(x));
          }
          const double w = std::exp(e);
          const double d = x - c;
          v[0] = w;
          v[1] = w * d;
          v[2] = w * d * d;
          v[3] = w * d * d * d;
        },
        a, b, panels);
  };
  auto add = [&](const std::array<double, 4>& p) {
    for (int j = 0; j < 4; ++j) out.sums[j] += p[j];
  };

  out.lo = std::max(left, c - half);
  out.hi = c + half;
  add(piece(out.lo, out.hi));

  constexpr double kTailStop = 1e-14;
  constexpr int kMaxPieces = 400;
  double width = half;
  for (int i = 0; i < kMaxPieces; ++i) {
    const auto p = piece(out.hi, out.hi + width);
    add(p);
    out.hi += width;
    if (p[0] <= kTailStop * out.sums[0]) break;
    if (i >= 8) width *= 2.0;
  }
  width = half;
  for (int i = 0; i < kMaxPieces && out.lo > left; ++i) {
    const double a = std::max(left, out.lo - width);
    const auto p = piece(a, out.lo);
    add(p);
    out.lo = a;
    if (p[0] <= kTailStop * out.sums[0]) break;
    if (i >= 8) width *= 2.0;
  }
  if (!(out.sums[0] > 0.0) || !std::isfinite(out.sums[0])) {
    throw Error(ErrorKind::EvaluationOverflow, "tilted window mass at t=" + format_x(t));
  }
  return out;
}

}  // namespace detail

}  // namespace edp
