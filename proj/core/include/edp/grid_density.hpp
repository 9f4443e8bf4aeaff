#pragma once

// Densities sampled on uniform grids and their convolution powers.

#include <cstddef>
#include <functional>
#include <vector>

namespace edp {

struct GridDensity {
  enum class Origin { Tabulated, Tilted, Convolved, Normalized };

  double x0 = 0.0;
  double dx = 1.0;
  std::vector<double> values;
  double mass = 0.0;  // trapezoid integral of values
  Origin origin = Origin::Tabulated;
  double origin_param = 0.0;  // tilt t, fold count n, ...
  double mass_drift = 0.0;    // mass - 1 before the last renormalisation

  std::size_t size() const { return values.size(); }
  double x(std::size_t i) const { return x0 + dx * static_cast<double>(i); }
  double x_max() const { return x(values.size() - 1); }

  double mean() const;
  double variance() const;
  // Linear interpolation; zero outside the grid.
  double at(double x) const;
  // Linear interpolation of log values; -inf outside the grid or where a
  // neighbouring node is zero.
  double log_at(double x) const;

  void update_mass();
  void renormalize();
};

// Samples f at `points` nodes x0, x0 + dx, ...
GridDensity tabulate(const std::function<double(double)>& f, double x0, double dx,
                     std::size_t points, GridDensity::Origin origin = GridDensity::Origin::Tabulated,
                     double origin_param = 0.0);

enum class ConvolutionMethod {
  Fft,     // absolute accuracy relative to the peak, O(N log N)
  Direct,  // sums of positive terms, relative accuracy everywhere, O(N^2)
};

// Riemann-sum convolution (a * b)(x) = dx sum_i a_i b_{k-i} on the combined
// grid starting at a.x0 + b.x0. Grids must share dx. With keep > 0 only the
// first `keep` output nodes are produced.
GridDensity convolve(const GridDensity& a, const GridDensity& b, ConvolutionMethod method,
                     std::size_t keep = 0);

struct ConvolutionOptions {
  ConvolutionMethod method = ConvolutionMethod::Fft;
  // Keep only the first base.size() nodes of every power. Exact when the
  // base vanishes left of its grid, which is the case for densities on
  // [0, inf).
  bool truncate = false;
  bool renormalize = true;
  // Transform length for the untruncated FFT path; 0 picks the next power of
  // two above n * (N - 1) + 1. A shorter explicit length is rejected.
  std::size_t padded_points = 0;
};

// Density of the sum of n independent copies.
GridDensity n_fold_convolution(const GridDensity& base, int n, const ConvolutionOptions& options = {});

// rho_n(x) = sqrt(n) f(sqrt(n) x) for the density f of a sum of n
// standardised summands.
GridDensity rescale_sum(const GridDensity& sum, int n);

}  // namespace edp
