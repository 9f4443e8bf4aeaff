#include "edp/exceedance_tail.hpp"

#include <algorithm>
#include <cmath>

#include "edp/conditional_gibbs.hpp"
#include "edp/error.hpp"
#include "edp/numerics.hpp"
#include "edp/rng.hpp"
#include "edp/sampling.hpp"
#include "edp/tilted_calculus.hpp"

namespace edp {

namespace {

bool inside(const DensitySpec& spec, double y) {
  const double left = spec.support_left();
  return spec.singular_at_boundary() ? y > left : y >= left;
}

double safe_tilted_log_density(const DensitySpec& spec, double t, double y) {
  if (!inside(spec, y)) return -num::kInf;
  return tilted_log_density(spec, t, y);
}

}  // namespace

RatePoint rate_I(const DensitySpec& spec, double x) {
  const TiltRecord r = solve_tilt(spec, x);
  RatePoint p;
  p.x = x;
  p.t_x = r.t;
  p.I = r.t == 0.0 ? 0.0 : x * r.t - r.log_phi;
  p.I_prime = r.t;
  p.s_tx = std::sqrt(r.s2);
  return p;
}

TailApprox tail_approx(const DensitySpec& spec, int n, double a_n) {
  if (n < 1) throw Error(ErrorKind::Precondition, "tail approximation needs n >= 1");
  const RatePoint r = rate_I(spec, a_n);
  if (!(r.t_x > 0.0)) {
    throw Error(ErrorKind::DegenerateSaddlepoint, "a_n at the mean gives t_n = 0; the formula needs t_n > 0");
  }
  TailApprox out;
  out.t_n = r.t_x;
  out.s_tn = r.s_tx;
  out.rate = n * r.I;
  out.log_p = -out.rate - (num::kLogSqrt2Pi + 0.5 * std::log(static_cast<double>(n)) +
                           std::log(r.t_x) + std::log(r.s_tx));
  out.lambda_sq = r.t_x * r.t_x * r.s_tx * r.s_tx;
  try {
    const double psi = psi_inverse(spec, r.t_x);
    const double dpsi = 1.0 / hazard_and_derivatives(spec, psi).h1;
    out.growth_value = psi * psi / (std::sqrt(static_cast<double>(n)) * dpsi);
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::Precondition) throw;
  }
  out.growth_warning = out.growth_value > 1.0;
  return out;
}

double tail_prob_approx(const DensitySpec& spec, int n, double a_n) {
  return tail_approx(spec, n, a_n).log_p;
}

double point_density_H(const DensitySpec& spec, int n, double u) {
  if (n < 1) throw Error(ErrorKind::Precondition, "point density needs n >= 1");
  const RatePoint r = rate_I(spec, u);
  return 0.5 * std::log(static_cast<double>(n)) - n * r.I - num::kLogSqrt2Pi - std::log(r.s_tx);
}

double eta_schedule(const DensitySpec& spec, int n, double a_n) {
  if (n < 2) throw Error(ErrorKind::Precondition, "eta schedule needs n >= 2");
  const double ln = std::log(static_cast<double>(n));
  return ln * ln / (n * spec.h(a_n));
}

double log_integrate(const std::function<double(double)>& logf, double a, double b, int panels) {
  if (panels < 1) throw Error(ErrorKind::Precondition, "log_integrate needs panels >= 1");
  const auto& rule = num::gauss_legendre(20);
  std::vector<double> terms;
  terms.reserve(static_cast<std::size_t>(panels) * rule.nodes.size());
  const double width = (b - a) / panels;
  for (int p = 0; p < panels; ++p) {
    const double half = 0.5 * width;
    const double mid = a + (p + 0.5) * width;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
      terms.push_back(std::log(half * rule.weights[i]) + logf(mid + half * rule.nodes[i]));
    }
  }
  return num::log_sum_exp(terms);
}

ExceedanceMixture::ExceedanceMixture(const DensitySpec& spec, int n, double a_n, double eta,
                                     int nodes)
    : spec_(spec), n_(n), a_n_(a_n), eta_(eta) {
  if (n < 1) throw Error(ErrorKind::Precondition, "exceedance density needs n >= 1");
  if (eta_ <= 0.0) eta_ = eta_schedule(spec, n, a_n);
  const RatePoint base = rate_I(spec, a_n);
  if (!(base.t_x > 0.0)) {
    throw Error(ErrorKind::DegenerateSaddlepoint, "a_n at the mean gives t_n = 0");
  }
  const double lead = std::log(n * base.t_x * base.s_tx) + n * base.I;
  const auto& rule = num::gauss_legendre(nodes);
  const double half = 0.5 * eta_;
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
    const double tau = a_n + half * (1.0 + rule.nodes[i]);
    RatePoint r;
    try {
      r = rate_I(spec, tau);
    } catch (const Error& e) {
      throw Error(e.kind(), "mixture node tau=" + std::to_string(tau) + ": " + e.what());
    }
    tau_.push_back(tau);
    t_.push_back(r.t_x);
    log_coef_.push_back(lead + std::log(half * rule.weights[i]) - n * r.I - std::log(r.s_tx));
  }
  log_mass_ = num::log_sum_exp(log_coef_);
}

double ExceedanceMixture::log_raw(double y) const {
  if (!inside(spec_, y)) return -num::kInf;
  std::vector<double> terms(tau_.size());
  for (std::size_t k = 0; k < tau_.size(); ++k) {
    terms[k] = log_coef_[k] + tilted_log_density(spec_, t_[k], y);
  }
  return num::log_sum_exp(terms);
}

double exceedance_density(const DensitySpec& spec, int n, double a_n, double y) {
  return ExceedanceMixture(spec, n, a_n).log_density(y);
}

GridDensity exact_exceedance_marginal(const DensitySpec& spec, int n, double a_n, double dx) {
  if (n < 2 || n > 64) throw Error(ErrorKind::Precondition, "exact exceedance oracle needs 2 <= n <= 64");
  const TiltRecord rec = solve_tilt(spec, a_n);
  const double t = rec.t;
  const double left = spec.support_left();
  const double span = n * a_n - n * left;
  if (!(span > 0.0)) throw Error(ErrorKind::IncompatibleCondition, "n a_n outside the support of S_n");
  const std::size_t m_nodes = static_cast<std::size_t>(
      dx > 0.0 ? std::max(1.0, std::round(span / dx)) : std::ceil(span / (std::sqrt(rec.s2) / 64.0)));
  const double h = span / static_cast<double>(m_nodes);
  const double hi = std::max(rec.window.hi, a_n + 1.0);
  const std::size_t base_points = static_cast<std::size_t>(std::ceil((hi - left) / h)) + 1;

  std::vector<double> py(base_points);
  for (std::size_t i = 0; i < base_points; ++i) {
    const double l = safe_tilted_log_density(spec, t, left + h * static_cast<double>(i));
    py[i] = l == -num::kInf ? 0.0 : std::exp(l);
  }
  GridDensity base;
  base.x0 = left;
  base.dx = h;
  base.values = py;
  base.origin = GridDensity::Origin::Tilted;
  base.origin_param = t;
  base.update_mass();
  const GridDensity f = n_fold_convolution(base, n - 1);

  // G on the nodes of f, accumulated from the right
  const double decay = std::exp(-t * h);
  std::vector<double> G(f.size(), 0.0);
  for (std::size_t j = f.size() - 1; j-- > 0;) {
    G[j] = 0.5 * h * (f.values[j] + decay * f.values[j + 1]) + decay * G[j + 1];
  }

  GridDensity out;
  out.x0 = left;
  out.dx = h;
  out.values.resize(base_points);
  for (std::size_t i = 0; i < base_points; ++i) {
    const long j = static_cast<long>(m_nodes) - static_cast<long>(i);
    double g = 0.0;
    if (j >= 0) {
      g = static_cast<std::size_t>(j) < G.size() ? G[static_cast<std::size_t>(j)] : 0.0;
    } else {
      g = std::exp(t * h * static_cast<double>(j)) * G[0];
    }
    out.values[i] = py[i] * g;
  }
  out.origin = GridDensity::Origin::Normalized;
  out.origin_param = n;
  out.update_mass();
  out.renormalize();
  return out;
}

ExceedanceReport exceedance_report(const DensitySpec& spec, int n, double a_n) {
  ExceedanceReport rep;
  rep.n = n;
  rep.a_n = a_n;
  const ExceedanceMixture mix(spec, n, a_n);
  rep.eta = mix.eta();
  rep.raw_log_mass = mix.raw_log_mass();
  rep.exact = exact_exceedance_marginal(spec, n, a_n);

  const double left = spec.support_left();
  const double hi = moments(spec, mix.tilts().back()).window.hi;
  rep.grid_integral = num::integrate(
      [&](double y) {
        const double l = mix.log_density(y);
        return l == -num::kInf ? 0.0 : std::exp(l);
      },
      left, hi, 400);

  rep.approx.resize(rep.exact.size());
  std::size_t mode = 0;
  for (std::size_t i = 0; i < rep.exact.size(); ++i) {
    const double l = mix.log_density(rep.exact.x(i));
    rep.approx[i] = l == -num::kInf ? 0.0 : std::exp(l);
    if (rep.approx[i] > rep.approx[mode]) mode = i;
  }
  rep.decreasing_after_mode = true;
  for (std::size_t i = mode + 1; i < rep.approx.size(); ++i) {
    if (rep.approx[i] > rep.approx[i - 1]) rep.decreasing_after_mode = false;
  }
  std::vector<double> diff(rep.exact.size());
  for (std::size_t i = 0; i < diff.size(); ++i) diff[i] = std::fabs(rep.exact.values[i] - rep.approx[i]);
  rep.tv_exact = 0.5 * num::trapezoid(diff, rep.exact.dx);
  return rep;
}

MassRatio exceedance_mass_ratio(const DensitySpec& spec, int n, double a_n) {
  const double eta = eta_schedule(spec, n, a_n);
  const double t = solve_tilt(spec, a_n).t;
  if (!(t > 0.0)) throw Error(ErrorKind::DegenerateSaddlepoint, "a_n at the mean gives t_n = 0");
  // H_n decays like exp(-n t (u - a_n)); panels no wider than 2 / (n t)
  const double scale = 2.0 / (n * t);
  auto logH = [&](double u) { return point_density_H(spec, n, u); };
  MassRatio out;
  out.log_p1 = log_integrate(logH, a_n, a_n + eta,
                             std::max(4, static_cast<int>(std::ceil(eta / scale))));
  const double tail = 40.0 * scale;
  out.log_p2 = log_integrate(logH, a_n + eta, a_n + eta + tail, 40);
  out.log_ratio = out.log_p2 - out.log_p1;
  return out;
}

TailEstimate mc_tail_estimate(const DensitySpec& spec, int n, double a_n, std::size_t samples,
                              std::uint64_t seed) {
  if (n < 1) throw Error(ErrorKind::Precondition, "tail estimate needs n >= 1");
  if (samples < 10000) throw Error(ErrorKind::Precondition, "tail estimate needs at least 1e4 samples");
  const double t = solve_tilt(spec, a_n).t;
  const double level = n * a_n;
  const TiltedSampler sampler(spec, t);

  constexpr std::size_t kChunk = 4096;
  const std::size_t chunks = (samples + kChunk - 1) / kChunk;
  struct Partial {
    double sum = 0.0;
    double sum_sq = 0.0;
    std::size_t hits = 0;
  };
  std::vector<Partial> parts(chunks);
  // scaled weights exp(-t (S - n a_n)) lie in (0, 1]
  parallel_chunks(chunks, [&](std::size_t c) {
    Partial p;
    const std::size_t end = std::min(samples, (c + 1) * kChunk);
    for (std::size_t i = c * kChunk; i < end; ++i) {
      RandomStream rs(seed, static_cast<std::uint32_t>(StreamId::TailEstimate), i);
      double s = 0.0;
      for (int j = 0; j < n; ++j) s += sampler.draw(rs);
      if (s >= level) {
        const double w = std::exp(-t * (s - level));
        p.sum += w;
        p.sum_sq += w * w;
        ++p.hits;
      }
    }
    parts[c] = p;
  });
  Partial total;
  for (const auto& p : parts) {
    total.sum += p.sum;
    total.sum_sq += p.sum_sq;
    total.hits += p.hits;
  }
  if (total.hits == 0) {
    throw Error(ErrorKind::DegenerateEstimate, "no draw reached n a_n; increase samples");
  }
  const double N = static_cast<double>(samples);
  const double mean = total.sum / N;
  const double var = std::max(0.0, total.sum_sq / N - mean * mean) * N / (N - 1.0);

  TailEstimate out;
  out.n = n;
  out.a_n = a_n;
  out.mc_samples = samples;
  out.seed = seed;
  out.hits = total.hits;
  out.log_p_mc = n * log_mgf(spec, t) - t * level + std::log(mean);
  out.mc_std_err = std::sqrt(var / N) / mean;
  try {
    out.log_p_analytic = tail_prob_approx(spec, n, a_n);
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::DegenerateSaddlepoint) throw;
    out.log_p_analytic = num::kNaN;
  }
  return out;
}

}  // namespace edp
