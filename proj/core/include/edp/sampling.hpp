#pragma once

// Seeded samplers: tilted laws by numeric inverse CDF, exact conditional
// vectors given S_n = n a_n, vectors conditioned on S_n >= n a_n by
// importance resampling, and the all-coordinates-near-a_n demonstration.

#include <cstdint>
#include <vector>

#include "edp/density_model.hpp"
#include "edp/rng.hpp"

namespace edp {

// Stream families; part of every Philox counter so experiments never share
// random numbers.
enum class StreamId : std::uint32_t {
  Tilted = 1,
  ConditionalPoint = 2,
  ExceedanceProposal = 3,
  ExceedanceResample = 4,
  TailEstimate = 5,
};

// Inverse-CDF sampler for pi^t. The CDF is tabulated on the Laplace window
// of the tilt and interpolated by a monotone cubic whose node slopes are the
// density values, limited where needed to keep each cell monotone.
class TiltedSampler {
 public:
  TiltedSampler(const DensitySpec& spec, double t, std::size_t cells = 2048);

  double t() const { return t_; }
  double quantile(double u) const;
  double cdf(double x) const;
  double draw(RandomStream& stream) const { return quantile(stream.uniform()); }

 private:
  double cell_value(std::size_t i, double s) const;

  double t_;
  std::vector<double> x_;
  std::vector<double> F_;
  std::vector<double> slope_;  // dF/dx at the nodes after limiting
};

std::vector<double> sample_tilted(const DensitySpec& spec, double t, std::size_t count,
                                  std::uint64_t seed);

// Exact sequential sampling given S_n = n a_n (n <= 16): X_1 from the
// convolution-ratio marginal, then the same for the remaining summands and
// residual; the last coordinate closes the sum.
std::vector<std::vector<double>> sample_conditional_point(const DensitySpec& spec, int n,
                                                          double a_n, std::size_t count,
                                                          std::uint64_t seed);

struct ExceedanceSample {
  std::vector<std::vector<double>> vectors;
  double acceptance_rate = 0.0;    // proposals with sum >= n a_n
  double effective_size = 0.0;     // Kish effective size of the weighted pool
  std::size_t proposals = 0;
};

struct ExceedanceOptions {
  std::size_t pool_factor = 32;  // proposals per requested draw
  std::size_t pilot = 4096;      // proposals used to estimate acceptance first
  double min_acceptance = 1e-4;
};

// Proposals are n-vectors from pi^{t_n}; those with sum >= n a_n are kept
// with weight exp(-t_n (sum - n a_n)) and resampled to `count` draws.
ExceedanceSample sample_conditional_exceedance(const DensitySpec& spec, int n, double a_n,
                                               std::size_t count, std::uint64_t seed,
                                               const ExceedanceOptions& options = {});

struct DemocracyEstimate {
  double probability = 0.0;
  double std_err = 0.0;
  std::size_t draws = 0;
};

// Fraction of exceedance-conditioned vectors with every |X_i - a_n| < epsilon.
DemocracyEstimate democracy_demo(const DensitySpec& spec, int n, double a_n, double epsilon,
                                 std::size_t count, std::uint64_t seed,
                                 const ExceedanceOptions& options = {});

}  // namespace edp
