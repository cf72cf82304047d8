#pragma once

#include "fedens/errors.hpp"
#include "fedens/grid.hpp"
#include "fedens/parallel.hpp"

#include <Eigen/Core>

#include <stdexcept>
#include <string>

namespace fedens {

//! Piecewise N-linear density f(y) = sum_j F_j phi_j(y) on a TensorGrid.
//! Coefficients are stored densely, one per node in flat order.
template<typename Scalar>
class PiecewiseLinearPdf
{
public:
  using Vector = VectorX<Scalar>;

  PiecewiseLinearPdf(TensorGrid<Scalar> grid, Vector coefficients, Index sample_count)
    : grid_(std::move(grid))
    , coefficients_(std::move(coefficients))
    , sample_count_(sample_count)
  {
    if (coefficients_.size() != grid_.num_nodes()) {
      throw std::invalid_argument("expected " + std::to_string(grid_.num_nodes()) +
                                  " coefficients, got " +
                                  std::to_string(coefficients_.size()));
    }
    if (sample_count_ < 1) {
      throw std::invalid_argument("sample count must be positive");
    }
    for (Index j = 0; j < coefficients_.size(); ++j) {
      if (!(coefficients_[j] >= Scalar(0))) {
        throw std::invalid_argument("coefficient " + std::to_string(j) +
                                    " is negative or NaN");
      }
    }
  }

  const TensorGrid<Scalar>& grid() const { return grid_; }
  const Vector& coefficients() const { return coefficients_; }
  Index sample_count() const { return sample_count_; }

private:
  TensorGrid<Scalar> grid_;
  Vector coefficients_;
  Index sample_count_;
};

using LinearPdf = PiecewiseLinearPdf<double>;

struct FitOptions
{
  //! Worker threads; samples are split into contiguous chunks and the
  //! per-chunk node sums are added in chunk order.
  int threads = 1;
  //! Kahan-compensated per-node accumulation.
  bool compensated = false;
};

namespace detail {

template<typename Scalar>
struct NodeAccumulator
{
  explicit NodeAccumulator(Index nodes, bool compensated)
    : sum(VectorX<Scalar>::Zero(nodes))
    , carry(compensated ? VectorX<Scalar>::Zero(nodes) : VectorX<Scalar>())
  {}

  void add(Index j, Scalar w)
  {
    if (carry.size() == 0) {
      sum[j] += w;
      return;
    }
    const Scalar y = w - carry[j];
    const Scalar t = sum[j] + y;
    carry[j] = (t - sum[j]) - y;
    sum[j] = t;
  }

  VectorX<Scalar> sum;
  VectorX<Scalar> carry;
};

} // namespace detail

//! Fits F_j = (1 / (M C_j)) sum_m phi_j(Y_m) in one pass over the samples
//! (one column per sample). Each sample only touches the 2^dim vertices of
//! its bin.
//!
//! Throws EmptySampleSet, or SampleOutOfDomain for the first sample
//! outside the grid.
template<typename Scalar, typename Derived>
PiecewiseLinearPdf<Scalar>
fit(const TensorGrid<Scalar>& grid,
    const Eigen::MatrixBase<Derived>& samples,
    const FitOptions& options = {})
{
  const Index m = samples.cols();
  if (m == 0) {
    throw EmptySampleSet();
  }
  if (samples.rows() != grid.dim()) {
    throw std::invalid_argument("samples have dimension " +
                                std::to_string(samples.rows()) + ", grid has " +
                                std::to_string(grid.dim()));
  }
  const Index nodes = grid.num_nodes();
  const int threads = std::max(1, options.threads);
  const Index chunks = std::max<Index>(1, std::min<Index>(threads, m));
  std::vector<detail::NodeAccumulator<Scalar>> partial(
    static_cast<std::size_t>(chunks),
    detail::NodeAccumulator<Scalar>(nodes, options.compensated));

  parallel_chunks(m, threads, [&](Index chunk, Index begin, Index end) {
    auto& acc = partial[static_cast<std::size_t>(chunk)];
    Index i = begin;
    try {
      for (; i < end; ++i) {
        detail::visit_vertices(grid, samples.col(i), [&](Index j, Scalar w) {
          acc.add(j, w);
        });
      }
    } catch (const OutOfDomain& e) {
      throw SampleOutOfDomain(i, e.axis(), e.value());
    }
  });

  VectorX<Scalar> sums = std::move(partial.front().sum);
  for (std::size_t c = 1; c < partial.size(); ++c) {
    sums += partial[c].sum;
  }
  const VectorX<Scalar> c = basis_integrals(grid);
  VectorX<Scalar> coefficients =
    (sums.array() / (static_cast<Scalar>(m) * c.array())).matrix();
  return PiecewiseLinearPdf<Scalar>(grid, std::move(coefficients), m);
}

//! f(point); continuous across bin faces, exactly F_j at node j.
template<typename Scalar, typename Derived>
Scalar
evaluate(const PiecewiseLinearPdf<Scalar>& pdf, const Eigen::MatrixBase<Derived>& point)
{
  pdf.grid().check_point_dim(point.size());
  const auto& f = pdf.coefficients();
  Scalar value(0);
  detail::visit_vertices(pdf.grid(), point, [&](Index j, Scalar w) {
    value += f[j] * w;
  });
  return value;
}

//! evaluate() over every column of `points`. Throws SampleOutOfDomain
//! naming the first offending column.
template<typename Scalar, typename Derived>
VectorX<Scalar>
evaluate_batch(const PiecewiseLinearPdf<Scalar>& pdf,
               const Eigen::MatrixBase<Derived>& points)
{
  VectorX<Scalar> out(points.cols());
  if (points.cols() == 0) {
    return out;
  }
  pdf.grid().check_point_dim(points.rows());
  Index i = 0;
  try {
    for (; i < points.cols(); ++i) {
      out[i] = evaluate(pdf, points.col(i));
    }
  } catch (const OutOfDomain& e) {
    throw SampleOutOfDomain(i, e.axis(), e.value());
  }
  return out;
}

//! sum_j F_j C_j; one for every fitted pdf.
template<typename Scalar>
Scalar
integral(const PiecewiseLinearPdf<Scalar>& pdf)
{
  return pdf.coefficients().dot(basis_integrals(pdf.grid()));
}

} // namespace fedens
