#pragma once

#include "fedens/grid.hpp"

#include <Eigen/Core>

#include <cstdint>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace fedens {

//! Standard normal CDF Phi(x).
double normal_cdf(double x);

//! Phi^{-1}(p) for p in (0, 1), accurate to a few ulp (rational start plus
//! one Halley step on erfc).
double normal_quantile(double p);

//! Counter-based uniform stream: draw k is SplitMix64's k-th output for a
//! state seeded from `seed`. Any draw can be computed independently, so a
//! sample set of size m1 is a prefix of one of size m2 > m1.
class CounterRng
{
public:
  explicit CounterRng(std::uint64_t seed);

  //! Raw 64-bit output for draw `counter`.
  std::uint64_t bits(std::uint64_t counter) const;

  //! Uniform in the open interval (0, 1), 53-bit resolution.
  double uniform(std::uint64_t counter) const;

private:
  std::uint64_t key_;
};

struct TruncatedGaussian
{
  double mean = 0.0;
  double sd = 1.0;
  double lo = -5.5;
  double hi = 5.5;
};

struct Uniform
{
  double lo = -1.0;
  double hi = 1.0;
};

struct TruncatedLaplace
{
  double location = 0.0;
  double scale = 1.5;
  double lo = -5.5;
  double hi = 5.5;
};

//! One axis of a product-form distribution, truncated to [lower, upper].
class AxisDistribution
{
public:
  using Kind = std::variant<TruncatedGaussian, Uniform, TruncatedLaplace>;

  explicit AxisDistribution(Kind kind);

  const Kind& kind() const { return kind_; }
  double lower() const;
  double upper() const;
  //! Probability mass of the untruncated law inside [lower, upper].
  double normalization() const { return norm_; }

  //! Density including the truncation constant; 0 outside the support.
  double pdf(double y) const;
  double cdf(double y) const;
  //! Inverse CDF; the result always lies in [lower, upper].
  double quantile(double u) const;
  //! Mini-language form, e.g. "tgauss:0,1,-5.5,5.5".
  std::string describe() const;

private:
  Kind kind_;
  double norm_ = 1.0;
  double lower_tail_ = 0.0; // untruncated CDF at lower()
  double upper_tail_ = 0.0; // untruncated survival function at upper()
};

//! Product of independent axis distributions.
class DistributionSpec
{
public:
  explicit DistributionSpec(std::vector<AxisDistribution> axes);

  //! Parses a preset (tgauss1d, tgauss2d, tgauss3d, laplace1d, uniform1d,
  //! mixed2d) or a '*'-separated product of axis terms:
  //!   tgauss:mean,sd,lo,hi   uniform:lo,hi   laplace:location,scale,lo,hi
  //! An axis term may carry a "^N" suffix to repeat it N times.
  //! Throws std::invalid_argument on malformed text.
  static DistributionSpec parse(std::string_view text);

  Index dim() const { return static_cast<Index>(axes_.size()); }
  const std::vector<AxisDistribution>& axes() const { return axes_; }
  Eigen::VectorXd lower() const;
  Eigen::VectorXd upper() const;
  std::string describe() const;

private:
  std::vector<AxisDistribution> axes_;
};

//! Joint density at `point`; 0 outside the support box.
double exact_pdf(const DistributionSpec& spec, const Eigen::Ref<const Eigen::VectorXd>& point);

//! Draws [first, first + count) of the i.i.d. sequence for `seed`, one
//! column per sample. Coordinate n of draw i uses stream counter
//! i * dim + n.
Eigen::MatrixXd sample_range(const DistributionSpec& spec,
                             Index first,
                             Index count,
                             std::uint64_t seed,
                             int threads = 1);

//! The first m draws of the sequence for `seed`.
Eigen::MatrixXd sample(const DistributionSpec& spec, Index m, std::uint64_t seed, int threads = 1);

} // namespace fedens
