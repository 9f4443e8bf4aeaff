#include "edp/sampling.hpp"

#include <algorithm>
#include <cmath>

#include "edp/conditional_gibbs.hpp"
#include "edp/error.hpp"
#include "edp/numerics.hpp"
#include "edp/tilted_calculus.hpp"

namespace edp {

namespace {

constexpr std::size_t kChunk = 4096;

std::size_t chunk_count(std::size_t count, std::size_t chunk) { return (count + chunk - 1) / chunk; }

}  // namespace

TiltedSampler::TiltedSampler(const DensitySpec& spec, double t, std::size_t cells) : t_(t) {
  if (cells < 16) throw Error(ErrorKind::Precondition, "sampler needs at least 16 cells");
  const TiltRecord r = moments(spec, t);
  const double left = spec.support_left();
  const double lo = std::max(left, r.window.lo);
  const double hi = r.window.hi;
  auto density = [&](double x) {
    if (x < left || (spec.singular_at_boundary() && x <= left)) return 0.0;
    return std::exp(tilted_log_density(spec, t, x));
  };

  x_.resize(cells + 1);
  F_.assign(cells + 1, 0.0);
  slope_.resize(cells + 1);
  const double h = (hi - lo) / static_cast<double>(cells);
  for (std::size_t i = 0; i <= cells; ++i) {
    x_[i] = lo + h * static_cast<double>(i);
    slope_[i] = density(x_[i]);
  }
  x_.back() = hi;
  for (std::size_t i = 0; i < cells; ++i) {
    F_[i + 1] = F_[i] + num::integrate(density, x_[i], x_[i + 1], 1);
  }
  const double total = F_.back();
  for (std::size_t i = 0; i <= cells; ++i) {
    F_[i] /= total;
    slope_[i] /= total;
  }
  F_.back() = 1.0;

  // Fritsch-Carlson limiting keeps every cell monotone
  for (std::size_t i = 0; i < cells; ++i) {
    const double delta = (F_[i + 1] - F_[i]) / (x_[i + 1] - x_[i]);
    if (delta <= 0.0) {
      slope_[i] = 0.0;
      slope_[i + 1] = 0.0;
      continue;
    }
    const double a = slope_[i] / delta;
    const double b = slope_[i + 1] / delta;
    const double r2 = a * a + b * b;
    if (r2 > 9.0) {
      const double tau = 3.0 / std::sqrt(r2);
      slope_[i] = tau * a * delta;
      slope_[i + 1] = tau * b * delta;
    }
  }
}

double TiltedSampler::cell_value(std::size_t i, double s) const {
  const double h = x_[i + 1] - x_[i];
  const double s2 = s * s;
  const double s3 = s2 * s;
  return (2 * s3 - 3 * s2 + 1) * F_[i] + (s3 - 2 * s2 + s) * h * slope_[i] +
         (-2 * s3 + 3 * s2) * F_[i + 1] + (s3 - s2) * h * slope_[i + 1];
}

double TiltedSampler::cdf(double x) const {
  if (x <= x_.front()) return 0.0;
  if (x >= x_.back()) return 1.0;
  const std::size_t i = static_cast<std::size_t>(std::upper_bound(x_.begin(), x_.end(), x) - x_.begin()) - 1;
  return cell_value(i, (x - x_[i]) / (x_[i + 1] - x_[i]));
}

double TiltedSampler::quantile(double u) const {
  if (!(u > 0.0 && u < 1.0)) throw Error(ErrorKind::Precondition, "quantile needs u in (0, 1)");
  std::size_t i = static_cast<std::size_t>(std::upper_bound(F_.begin(), F_.end(), u) - F_.begin());
  i = std::clamp<std::size_t>(i, 1, F_.size() - 1) - 1;
  const double h = x_[i + 1] - x_[i];
  double lo = 0.0;
  double hi = 1.0;
  double s = F_[i + 1] > F_[i] ? (u - F_[i]) / (F_[i + 1] - F_[i]) : 0.5;
  for (int it = 0; it < 60; ++it) {
    const double f = cell_value(i, s) - u;
    if (f < 0.0) {
      lo = s;
    } else {
      hi = s;
    }
    if (hi - lo < 1e-15) break;
    const double s2 = s * s;
    const double d = (6 * s2 - 6 * s) * F_[i] + (3 * s2 - 4 * s + 1) * h * slope_[i] +
                     (-6 * s2 + 6 * s) * F_[i + 1] + (3 * s2 - 2 * s) * h * slope_[i + 1];
    double next = d > 0.0 ? s - f / d : 0.5 * (lo + hi);
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (std::fabs(next - s) < 1e-15) {
      s = next;
      break;
    }
    s = next;
  }
  return x_[i] + s * h;
}

std::vector<double> sample_tilted(const DensitySpec& spec, double t, std::size_t count,
                                  std::uint64_t seed) {
  if (count < 1) throw Error(ErrorKind::Precondition, "sample count must be >= 1");
  const TiltedSampler sampler(spec, t);
  std::vector<double> out(count);
  parallel_chunks(chunk_count(count, kChunk), [&](std::size_t c) {
    const std::size_t end = std::min(count, (c + 1) * kChunk);
    for (std::size_t i = c * kChunk; i < end; ++i) {
      RandomStream rs(seed, static_cast<std::uint32_t>(StreamId::Tilted), i);
      out[i] = sampler.draw(rs);
    }
  });
  return out;
}

namespace {

// Draws one coordinate from the log density `logf` supported on [lo, hi].
// The mass is located by successive zooms of a coarse scan, then sampled from
// the piecewise linear interpolant on a fine grid.
template <class LogF>
double draw_from_log_density(const LogF& logf, double lo, double hi, RandomStream& rs) {
  constexpr int kCoarse = 96;
  constexpr int kFine = 384;
  for (int pass = 0; pass < 3; ++pass) {
    const double h = (hi - lo) / kCoarse;
    double top = -num::kInf;
    std::vector<double> v(kCoarse + 1);
    for (int i = 0; i <= kCoarse; ++i) {
      v[i] = logf(lo + h * i);
      top = std::max(top, v[i]);
    }
    if (top == -num::kInf) throw Error(ErrorKind::DegenerateEstimate, "conditional step has no mass");
    int first = kCoarse;
    int last = 0;
    for (int i = 0; i <= kCoarse; ++i) {
      if (v[i] >= top - 36.0) {
        first = std::min(first, i);
        last = std::max(last, i);
      }
    }
    const double new_lo = lo + h * std::max(0, first - 1);
    const double new_hi = lo + h * std::min(kCoarse, last + 1);
    const bool narrow = last - first + 2 < kCoarse / 4;
    lo = new_lo;
    hi = new_hi;
    if (!narrow) break;
  }
  const double h = (hi - lo) / kFine;
  std::vector<double> lv(kFine + 1);
  double top = -num::kInf;
  for (int i = 0; i <= kFine; ++i) {
    lv[i] = logf(lo + h * i);
    top = std::max(top, lv[i]);
  }
  std::vector<double> f(kFine + 1);
  for (int i = 0; i <= kFine; ++i) f[i] = std::exp(lv[i] - top);
  std::vector<double> cum(kFine + 1, 0.0);
  for (int i = 0; i < kFine; ++i) cum[i + 1] = cum[i] + 0.5 * h * (f[i] + f[i + 1]);
  const double target = rs.uniform() * cum.back();
  int i = static_cast<int>(std::upper_bound(cum.begin(), cum.end(), target) - cum.begin()) - 1;
  i = std::clamp(i, 0, kFine - 1);
  // invert f0 d + (f1 - f0) d^2 / (2h) = rem on [0, h]
  const double rem = target - cum[i];
  const double f0 = f[i];
  const double slope = (f[i + 1] - f[i]) / h;
  double d;
  if (std::fabs(slope) * h < 1e-12 * std::max(f0, 1e-300)) {
    d = f0 > 0.0 ? rem / f0 : 0.5 * h;
  } else {
    const double disc = std::max(0.0, f0 * f0 + 2.0 * slope * rem);
    d = 2.0 * rem / (f0 + std::sqrt(disc));
  }
  return lo + h * i + std::clamp(d, 0.0, h);
}

}  // namespace

std::vector<std::vector<double>> sample_conditional_point(const DensitySpec& spec, int n,
                                                          double a_n, std::size_t count,
                                                          std::uint64_t seed) {
  if (n < 2 || n > 16) throw Error(ErrorKind::Precondition, "conditional sampler needs 2 <= n <= 16");
  if (count < 1) throw Error(ErrorKind::Precondition, "sample count must be >= 1");
  const ConditionalOracle oracle(spec, n, a_n);
  const double left = spec.support_left();
  std::vector<std::vector<double>> out(count);
  parallel_chunks(chunk_count(count, 256), [&](std::size_t c) {
    const std::size_t end = std::min(count, (c + 1) * 256);
    for (std::size_t d = c * 256; d < end; ++d) {
      RandomStream rs(seed, static_cast<std::uint32_t>(StreamId::ConditionalPoint), d);
      std::vector<double> x(n);
      double residual = oracle.target();
      for (int i = 0; i < n - 1; ++i) {
        const int remaining = n - i;
        const double hi = residual - (remaining - 1) * left;
        auto logf = [&](double y) { return oracle.log_step(remaining, residual, y); };
        x[i] = draw_from_log_density(logf, left, hi, rs);
        residual -= x[i];
      }
      x[n - 1] = residual;
      out[d] = std::move(x);
    }
  });
  return out;
}

ExceedanceSample sample_conditional_exceedance(const DensitySpec& spec, int n, double a_n,
                                               std::size_t count, std::uint64_t seed,
                                               const ExceedanceOptions& options) {
  if (n < 1) throw Error(ErrorKind::Precondition, "exceedance sampler needs n >= 1");
  if (count < 1) throw Error(ErrorKind::Precondition, "sample count must be >= 1");
  const double t = solve_tilt(spec, a_n).t;
  const TiltedSampler sampler(spec, t);
  const double level = n * a_n;

  struct Proposal {
    std::vector<double> x;
    double weight;
  };
  auto propose = [&](std::size_t i, Proposal& p) {
    RandomStream rs(seed, static_cast<std::uint32_t>(StreamId::ExceedanceProposal), i);
    p.x.resize(n);
    double sum = 0.0;
    for (int j = 0; j < n; ++j) {
      p.x[j] = sampler.draw(rs);
      sum += p.x[j];
    }
    if (sum < level) return false;
    p.weight = std::exp(-t * (sum - level));
    return true;
  };

  const std::size_t total = std::max(options.pilot, options.pool_factor * count);
  const std::size_t chunk = 1024;
  std::vector<std::vector<Proposal>> accepted(chunk_count(total, chunk));
  parallel_chunks(accepted.size(), [&](std::size_t c) {
    const std::size_t end = std::min(total, (c + 1) * chunk);
    Proposal p;
    for (std::size_t i = c * chunk; i < end; ++i) {
      if (propose(i, p)) accepted[c].push_back(p);
    }
  });

  // acceptance over the pilot prefix decides starvation before anything is used
  std::size_t pilot_hits = 0;
  {
    std::size_t seen = 0;
    for (std::size_t c = 0; c < accepted.size() && seen < options.pilot; ++c) {
      const std::size_t in_chunk = std::min(chunk, options.pilot - seen);
      if (in_chunk == chunk) {
        pilot_hits += accepted[c].size();
      } else {
        // partial chunk: recount the pilot proposals directly
        Proposal p;
        for (std::size_t i = c * chunk; i < c * chunk + in_chunk; ++i) pilot_hits += propose(i, p);
      }
      seen += in_chunk;
    }
  }
  const double pilot_rate = static_cast<double>(pilot_hits) / static_cast<double>(options.pilot);
  if (pilot_rate < options.min_acceptance) {
    throw Error(ErrorKind::AcceptanceStarvation,
                "acceptance rate " + std::to_string(pilot_rate) +
                    " under the tilted proposal; use a larger tilt or fewer summands");
  }

  std::vector<const Proposal*> pool;
  for (const auto& c : accepted) {
    for (const auto& p : c) pool.push_back(&p);
  }
  if (pool.empty()) throw Error(ErrorKind::AcceptanceStarvation, "no proposal reached n a_n");

  ExceedanceSample out;
  out.proposals = total;
  out.acceptance_rate = static_cast<double>(pool.size()) / static_cast<double>(total);
  double sw = 0.0;
  double sw2 = 0.0;
  for (const auto* p : pool) {
    sw += p->weight;
    sw2 += p->weight * p->weight;
  }
  out.effective_size = sw * sw / sw2;

  // systematic resampling
  RandomStream rs(seed, static_cast<std::uint32_t>(StreamId::ExceedanceResample), 0);
  const double u0 = rs.uniform();
  out.vectors.reserve(count);
  double cum = 0.0;
  std::size_t j = 0;
  for (std::size_t k = 0; k < count; ++k) {
    const double target = (u0 + static_cast<double>(k)) / static_cast<double>(count) * sw;
    while (j + 1 < pool.size() && cum + pool[j]->weight < target) {
      cum += pool[j]->weight;
      ++j;
    }
    out.vectors.push_back(pool[j]->x);
  }
  return out;
}

DemocracyEstimate democracy_demo(const DensitySpec& spec, int n, double a_n, double epsilon,
                                 std::size_t count, std::uint64_t seed,
                                 const ExceedanceOptions& options) {
  if (!(epsilon >= 0.0)) throw Error(ErrorKind::Precondition, "epsilon must be >= 0");
  const ExceedanceSample s = sample_conditional_exceedance(spec, n, a_n, count, seed, options);
  std::size_t hits = 0;
  for (const auto& v : s.vectors) {
    bool all = true;
    for (double x : v) all = all && std::fabs(x - a_n) < epsilon;
    hits += all;
  }
  DemocracyEstimate out;
  out.draws = s.vectors.size();
  out.probability = static_cast<double>(hits) / static_cast<double>(out.draws);
  out.std_err = std::sqrt(out.probability * (1.0 - out.probability) / static_cast<double>(out.draws));
  return out;
}

}  // namespace edp
