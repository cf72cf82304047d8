#pragma once

#include "fedens/errors.hpp"
#include "fedens/grid.hpp"

#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace fedens {

//! Piecewise-constant density, one value per bin (flat bin order).
template<typename Scalar>
class Histogram
{
public:
  using Vector = VectorX<Scalar>;

  Histogram(TensorGrid<Scalar> grid, Vector values, Index sample_count)
    : grid_(std::move(grid))
    , values_(std::move(values))
    , sample_count_(sample_count)
  {
    if (values_.size() != grid_.num_bins()) {
      throw std::invalid_argument("expected " + std::to_string(grid_.num_bins()) +
                                  " bin values, got " +
                                  std::to_string(values_.size()));
    }
    if (sample_count_ < 1) {
      throw std::invalid_argument("sample count must be positive");
    }
  }

  const TensorGrid<Scalar>& grid() const { return grid_; }
  const Vector& values() const { return values_; }
  Index sample_count() const { return sample_count_; }

private:
  TensorGrid<Scalar> grid_;
  Vector values_;
  Index sample_count_;
};

//! values_l = count(samples in bin l) / (M * bin volume), binning with
//! locate_bin's tie rule.
template<typename Scalar, typename Derived>
Histogram<Scalar>
fit_histogram(const TensorGrid<Scalar>& grid, const Eigen::MatrixBase<Derived>& samples)
{
  const Index m = samples.cols();
  if (m == 0) {
    throw EmptySampleSet();
  }
  grid.check_point_dim(samples.rows());
  VectorX<Scalar> counts = VectorX<Scalar>::Zero(grid.num_bins());
  for (Index i = 0; i < m; ++i) {
    Index flat = 0;
    for (Index n = 0; n < grid.dim(); ++n) {
      const Scalar y = samples(n, i);
      Index b = 0;
      try {
        b = grid.locate_axis(n, y);
      } catch (const OutOfDomain& e) {
        throw SampleOutOfDomain(i, e.axis(), e.value());
      }
      flat += b * grid.bin_stride(n);
    }
    counts[flat] += Scalar(1);
  }
  counts /= static_cast<Scalar>(m) * grid.bin_volume();
  return Histogram<Scalar>(grid, std::move(counts), m);
}

template<typename Scalar, typename Derived>
Scalar
eval_histogram(const Histogram<Scalar>& h, const Eigen::MatrixBase<Derived>& point)
{
  return h.values()[h.grid().bin_flat(locate_bin(h.grid(), point))];
}

enum class Kernel
{
  triangular,
  gaussian
};

//! Naive product-kernel KDE: a kernel, a bandwidth and the retained samples
//! (one per column).
template<typename Scalar>
class KdeSpec
{
public:
  KdeSpec(Kernel kernel, Scalar bandwidth, SampleMatrix<Scalar> samples)
    : kernel_(kernel)
    , bandwidth_(bandwidth)
    , samples_(std::move(samples))
  {
    if (!(bandwidth_ > Scalar(0))) {
      throw NonpositiveBandwidth(static_cast<double>(bandwidth_));
    }
    if (samples_.cols() == 0) {
      throw EmptySampleSet();
    }
  }

  Kernel kernel() const { return kernel_; }
  Scalar bandwidth() const { return bandwidth_; }
  const SampleMatrix<Scalar>& samples() const { return samples_; }

private:
  Kernel kernel_;
  Scalar bandwidth_;
  SampleMatrix<Scalar> samples_;
};

template<typename Scalar>
Scalar
kernel_value(Kernel kernel, Scalar u)
{
  switch (kernel) {
    case Kernel::triangular:
      return std::max(Scalar(0), Scalar(1) - std::abs(u));
    case Kernel::gaussian:
      return std::exp(-u * u / Scalar(2)) /
             std::sqrt(Scalar(2) * std::numbers::pi_v<Scalar>);
  }
  return Scalar(0);
}

//! (1 / (b^dim M)) sum_m prod_n K((y_n - Y_mn) / b). O(M) per call, with no
//! boundary correction.
template<typename Scalar, typename Derived>
Scalar
eval_kde(const KdeSpec<Scalar>& spec, const Eigen::MatrixBase<Derived>& point)
{
  const auto& s = spec.samples();
  if (point.size() != s.rows()) {
    throw std::invalid_argument("point dimension does not match samples");
  }
  const Scalar b = spec.bandwidth();
  Scalar sum(0);
  for (Index m = 0; m < s.cols(); ++m) {
    Scalar k(1);
    for (Index n = 0; n < s.rows() && k != Scalar(0); ++n) {
      k *= kernel_value(spec.kernel(), (static_cast<Scalar>(point[n]) - s(n, m)) / b);
    }
    sum += k;
  }
  return sum / (std::pow(b, static_cast<Scalar>(s.rows())) *
                static_cast<Scalar>(s.cols()));
}

} // namespace fedens
