#pragma once

#include "fedens/sampling.hpp"

#include <Eigen/Core>

#include <cmath>
#include <cstdint>

namespace fedens::qoi {

//! Stand-in for a PDE output of interest: a smooth, skewed scalar function
//! of two independent standard Gaussian inputs,
//!
//!   Y = (Z1 - 0.3 Z2^2 + 0.3) / sqrt(1.18),
//!
//! standardized with the exact mean 0.3 and variance 1 + 2 * 0.3^2 of the
//! untruncated map. Inputs are truncated to [-4, 4], which keeps every
//! output inside domain_lower..domain_upper.
inline constexpr double domain_lower = -8.0;
inline constexpr double domain_upper = 4.0;

inline DistributionSpec
input_distribution()
{
  return DistributionSpec::parse("tgauss:0,1,-4,4^2");
}

//! The first m outputs for `seed`; nested in m like every sample stream.
inline Eigen::MatrixXd
samples(Eigen::Index m, std::uint64_t seed, int threads = 1)
{
  const Eigen::MatrixXd z = sample(input_distribution(), m, seed, threads);
  const double scale = 1.0 / std::sqrt(1.18);
  Eigen::MatrixXd y(1, m);
  for (Eigen::Index i = 0; i < m; ++i) {
    y(0, i) = (z(0, i) - 0.3 * z(1, i) * z(1, i) + 0.3) * scale;
  }
  return y;
}

} // namespace fedens::qoi
