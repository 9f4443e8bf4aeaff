#include "edp/grid_density.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <mutex>

#include "edp/error.hpp"
#include "edp/numerics.hpp"

namespace edp {

double GridDensity::mean() const {
  std::vector<double> w(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) w[i] = x(i) * values[i];
  return num::trapezoid(w, dx) / num::trapezoid(values, dx);
}

double GridDensity::variance() const {
  const double mu = mean();
  std::vector<double> w(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    const double d = x(i) - mu;
    w[i] = d * d * values[i];
  }
  return num::trapezoid(w, dx) / num::trapezoid(values, dx);
}

double GridDensity::at(double xq) const {
  if (values.empty()) return 0.0;
  const double u = (xq - x0) / dx;
  if (!(u >= 0.0) || u > static_cast<double>(values.size() - 1)) return 0.0;
  const std::size_t i = std::min(static_cast<std::size_t>(u), values.size() - 2);
  const double f = u - static_cast<double>(i);
  return values[i] + f * (values[i + 1] - values[i]);
}

double GridDensity::log_at(double xq) const {
  if (values.size() < 2) return -num::kInf;
  const double u = (xq - x0) / dx;
  if (!(u >= 0.0) || u > static_cast<double>(values.size() - 1)) return -num::kInf;
  const std::size_t i = std::min(static_cast<std::size_t>(u), values.size() - 2);
  const double f = u - static_cast<double>(i);
  if (f == 0.0) return std::log(values[i]);
  if (f == 1.0) return std::log(values[i + 1]);
  if (!(values[i] > 0.0) || !(values[i + 1] > 0.0)) return -num::kInf;
  const double l0 = std::log(values[i]);
  const double l1 = std::log(values[i + 1]);
  return l0 + f * (l1 - l0);
}

void GridDensity::update_mass() { mass = num::trapezoid(values, dx); }

void GridDensity::renormalize() {
  update_mass();
  if (!(mass > 0.0) || !std::isfinite(mass)) {
    throw Error(ErrorKind::EvaluationOverflow, "grid density has no finite positive mass");
  }
  mass_drift = mass - 1.0;
  for (double& v : values) v /= mass;
  mass = 1.0;
}

GridDensity tabulate(const std::function<double(double)>& f, double x0, double dx,
                     std::size_t points, GridDensity::Origin origin, double origin_param) {
  if (points < 2 || !(dx > 0.0)) throw Error(ErrorKind::Precondition, "grid needs dx > 0, N >= 2");
  GridDensity g;
  g.x0 = x0;
  g.dx = dx;
  g.origin = origin;
  g.origin_param = origin_param;
  g.values.resize(points);
  for (std::size_t i = 0; i < points; ++i) {
    const double v = f(g.x(i));
    if (!std::isfinite(v) || v < 0.0) {
      throw Error(ErrorKind::EvaluationOverflow, "tabulated density not finite and >= 0");
    }
    g.values[i] = v;
  }
  g.update_mass();
  return g;
}

namespace {

std::mutex& plan_mutex() {
  static std::mutex m;
  return m;
}

// Real-to-complex transform pair of a fixed length; planning is serialised
// because the FFTW planner is not thread safe.
class FftPair {
 public:
  explicit FftPair(std::size_t length) : n_(length) {
    real_ = fftw_alloc_real(n_);
    spec_ = fftw_alloc_complex(n_ / 2 + 1);
    std::lock_guard lock(plan_mutex());
    const int len = static_cast<int>(n_);
    forward_ = fftw_plan_dft_r2c_1d(len, real_, spec_, FFTW_ESTIMATE);
    inverse_ = fftw_plan_dft_c2r_1d(len, spec_, real_, FFTW_ESTIMATE);
  }
  ~FftPair() {
    {
      std::lock_guard lock(plan_mutex());
      fftw_destroy_plan(forward_);
      fftw_destroy_plan(inverse_);
    }
    fftw_free(real_);
    fftw_free(spec_);
  }
  FftPair(const FftPair&) = delete;
  FftPair& operator=(const FftPair&) = delete;

  std::size_t bins() const { return n_ / 2 + 1; }

  // Spectrum of values (zero padded to the transform length).
  std::vector<std::complex<double>> forward(const std::vector<double>& values) {
    std::fill(real_, real_ + n_, 0.0);
    std::copy(values.begin(), values.end(), real_);
    fftw_execute(forward_);
    std::vector<std::complex<double>> out(bins());
    for (std::size_t k = 0; k < bins(); ++k) out[k] = {spec_[k][0], spec_[k][1]};
    return out;
  }

  // First `keep` samples of the inverse transform, divided by the length.
  std::vector<double> inverse(const std::vector<std::complex<double>>& spectrum, std::size_t keep) {
    for (std::size_t k = 0; k < bins(); ++k) {
      spec_[k][0] = spectrum[k].real();
      spec_[k][1] = spectrum[k].imag();
    }
    fftw_execute(inverse_);
    std::vector<double> out(keep);
    const double scale = 1.0 / static_cast<double>(n_);
    for (std::size_t i = 0; i < keep; ++i) out[i] = std::max(0.0, real_[i] * scale);
    return out;
  }

 private:
  std::size_t n_;
  double* real_ = nullptr;
  fftw_complex* spec_ = nullptr;
  fftw_plan forward_ = nullptr;
  fftw_plan inverse_ = nullptr;
};

std::size_t next_pow2(std::size_t n) {
  std::size_t p = 1;
  while (p < n) p <<= 1;
  return p;
}

GridDensity make_result(const GridDensity& a, const GridDensity& b, std::vector<double> values) {
  GridDensity out;
  out.x0 = a.x0 + b.x0;
  out.dx = a.dx;
  out.values = std::move(values);
  out.origin = GridDensity::Origin::Convolved;
  out.update_mass();
  return out;
}

void check_same_step(const GridDensity& a, const GridDensity& b) {
  if (a.size() < 2 || b.size() < 2) throw Error(ErrorKind::Precondition, "empty grid density");
  if (std::fabs(a.dx - b.dx) > 1e-12 * a.dx) {
    throw Error(ErrorKind::Precondition, "convolution needs grids with equal steps");
  }
}

}  // namespace

GridDensity convolve(const GridDensity& a, const GridDensity& b, ConvolutionMethod method,
                     std::size_t keep) {
  check_same_step(a, b);
  const std::size_t full = a.size() + b.size() - 1;
  if (keep == 0 || keep > full) keep = full;
  const double dx = a.dx;

  if (method == ConvolutionMethod::Direct) {
    std::vector<double> out(keep, 0.0);
    const std::size_t na = a.size();
    const std::size_t nb = b.size();
    for (std::size_t k = 0; k < keep; ++k) {
      const std::size_t lo = k >= nb ? k - (nb - 1) : 0;
      const std::size_t hi = std::min(k, na - 1);
      double acc = 0.0;
      for (std::size_t i = lo; i <= hi; ++i) acc += a.values[i] * b.values[k - i];
      out[k] = acc * dx;
    }
    return make_result(a, b, std::move(out));
  }

  // values beyond `keep` cannot influence the kept nodes
  std::vector<double> va(a.values.begin(), a.values.begin() + std::min(a.size(), keep));
  std::vector<double> vb(b.values.begin(), b.values.begin() + std::min(b.size(), keep));
  FftPair fft(next_pow2(va.size() + vb.size() - 1));
  auto fa = fft.forward(va);
  const auto fb = fft.forward(vb);
  for (std::size_t k = 0; k < fa.size(); ++k) fa[k] *= fb[k] * dx;
  return make_result(a, b, fft.inverse(fa, keep));
}

GridDensity n_fold_convolution(const GridDensity& base, int n, const ConvolutionOptions& options) {
  if (n < 1) throw Error(ErrorKind::Precondition, "n_fold_convolution needs n >= 1");
  if (base.size() < 2) throw Error(ErrorKind::Precondition, "empty grid density");
  const std::size_t nn = static_cast<std::size_t>(n);
  const std::size_t full = nn * (base.size() - 1) + 1;

  GridDensity result;
  if (n == 1) {
    result = base;
  } else if (!options.truncate && options.method == ConvolutionMethod::Fft) {
    std::size_t length = options.padded_points;
    if (length == 0) {
      length = next_pow2(full);
    } else if (length < full) {
      throw Error(ErrorKind::WrapAroundRisk,
                  "transform length " + std::to_string(length) + " is shorter than the " +
                      std::to_string(full) + " nodes of the " + std::to_string(n) + "-fold sum");
    }
    FftPair fft(length);
    std::vector<double> scaled(base.values);
    for (double& v : scaled) v *= base.dx;
    const auto f = fft.forward(scaled);
    std::vector<std::complex<double>> power(f.size(), 1.0);
    // power = f^n by binary exponentiation, bin by bin
    for (std::size_t k = 0; k < f.size(); ++k) {
      std::complex<double> acc = 1.0;
      std::complex<double> sq = f[k];
      for (int e = n; e > 0; e >>= 1) {
        if (e & 1) acc *= sq;
        sq *= sq;
      }
      power[k] = acc;
    }
    std::vector<double> values = fft.inverse(power, full);
    for (double& v : values) v /= base.dx;
    result.x0 = n * base.x0;
    result.dx = base.dx;
    result.values = std::move(values);
    result.update_mass();
  } else {
    const std::size_t keep = options.truncate ? base.size() : 0;
    GridDensity acc;
    bool have = false;
    GridDensity sq = base;
    for (int e = n; e > 0; e >>= 1) {
      if (e & 1) {
        acc = have ? convolve(acc, sq, options.method, keep) : sq;
        have = true;
      }
      if (e > 1) sq = convolve(sq, sq, options.method, keep);
    }
    result = std::move(acc);
  }
  result.origin = GridDensity::Origin::Convolved;
  result.origin_param = n;
  if (options.renormalize) {
    result.renormalize();
  } else {
    result.update_mass();
  }
  return result;
}

GridDensity rescale_sum(const GridDensity& sum, int n) {
  const double r = std::sqrt(static_cast<double>(n));
  GridDensity out = sum;
  out.x0 = sum.x0 / r;
  out.dx = sum.dx / r;
  for (double& v : out.values) v *= r;
  out.origin = GridDensity::Origin::Normalized;
  out.update_mass();
  return out;
}

}  // namespace edp
