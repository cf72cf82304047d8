#pragma once

#include "fedens/errors.hpp"

#include <Eigen/Core>

#include <array>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

namespace fedens {

using Index = Eigen::Index;

//! Per-axis integer index; used both for bins and for nodes.
using MultiIndex = Eigen::Matrix<Index, Eigen::Dynamic, 1>;

template<typename Scalar>
using VectorX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

//! Sample sets are stored one sample per column (dim x M).
template<typename Scalar>
using SampleMatrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

//! Largest supported number of axes. Fitting touches 2^dim nodes per sample.
inline constexpr Index max_dim = 10;

//! Axis-aligned box [a, b] split into congruent hyper-rectangular bins,
//! N_n bins along axis n. Nodes are the bin vertices.
//!
//! Flat indices fold multi-indices in row-major order (last axis fastest).
//! Bins are half-open [node_i, node_{i+1}) along each axis except the last
//! one, which also contains the upper bound. Immutable after construction.
template<typename Scalar>
class TensorGrid
{
public:
  using Vector = VectorX<Scalar>;

  TensorGrid(Vector lower, Vector upper, MultiIndex n_delta)
    : lower_(std::move(lower))
    , upper_(std::move(upper))
    , n_delta_(std::move(n_delta))
  {
    const Index d = lower_.size();
    if (d < 1 || d > max_dim) {
      throw std::invalid_argument("grid dimension must be in [1, " +
                                  std::to_string(max_dim) + "]");
    }
    if (upper_.size() != d || n_delta_.size() != d) {
      throw std::invalid_argument("lower, upper and n_delta differ in length");
    }
    width_.resize(d);
    node_strides_.resize(d);
    bin_strides_.resize(d);
    for (Index n = 0; n < d; ++n) {
      if (!(lower_[n] < upper_[n]) || !std::isfinite(lower_[n]) ||
          !std::isfinite(upper_[n])) {
        throw std::invalid_argument("axis " + std::to_string(n) +
                                    ": need finite lower < upper");
      }
      if (n_delta_[n] < 1) {
        throw std::invalid_argument("axis " + std::to_string(n) +
                                    ": subdivision count must be >= 1");
      }
      width_[n] = (upper_[n] - lower_[n]) / static_cast<Scalar>(n_delta_[n]);
      if (!(width_[n] > Scalar(0))) {
        throw std::invalid_argument("axis " + std::to_string(n) +
                                    ": bin width underflows");
      }
    }
    Index node_stride = 1;
    Index bin_stride = 1;
    for (Index n = d - 1; n >= 0; --n) {
      node_strides_[n] = node_stride;
      bin_strides_[n] = bin_stride;
      node_stride *= n_delta_[n] + 1;
      bin_stride *= n_delta_[n];
    }
    num_nodes_ = node_stride;
    num_bins_ = bin_stride;
  }

  //! [a, b]^dim with n bins per axis.
  static TensorGrid cube(Index dim, Scalar a, Scalar b, Index n)
  {
    return TensorGrid(Vector::Constant(dim, a), Vector::Constant(dim, b),
                      MultiIndex::Constant(dim, n));
  }

  Index dim() const { return lower_.size(); }
  const Vector& lower() const { return lower_; }
  const Vector& upper() const { return upper_; }
  const MultiIndex& n_delta() const { return n_delta_; }
  //! Per-axis bin width delta_n.
  const Vector& width() const { return width_; }
  Index num_bins() const { return num_bins_; }
  Index num_nodes() const { return num_nodes_; }
  Scalar bin_volume() const { return width_.prod(); }
  Scalar volume() const { return (upper_ - lower_).prod(); }
  Index node_stride(Index axis) const { return node_strides_[axis]; }
  Index bin_stride(Index axis) const { return bin_strides_[axis]; }

  //! a_n + i * delta_n; the last node is pinned to b_n exactly.
  Scalar node_coordinate(Index axis, Index i) const
  {
    if (i == n_delta_[axis]) {
      return upper_[axis];
    }
    return lower_[axis] + static_cast<Scalar>(i) * width_[axis];
  }

  //! Bin index along one axis. Exact with respect to node_coordinate():
  //! the result i satisfies node(i) <= y < node(i+1), or y == b in the
  //! last bin.
  Index locate_axis(Index axis, Scalar y) const
  {
    if (!(y >= lower_[axis] && y <= upper_[axis])) {
      throw OutOfDomain(axis, static_cast<double>(y));
    }
    const Index last = n_delta_[axis] - 1;
    auto i = static_cast<Index>(std::floor((y - lower_[axis]) / width_[axis]));
    i = i < 0 ? 0 : (i > last ? last : i);
    // floor() can be one off within an ulp of a face
    if (y < node_coordinate(axis, i)) {
      --i;
    } else if (i < last && y >= node_coordinate(axis, i + 1)) {
      ++i;
    }
    return i;
  }

  template<typename Derived>
  bool contains(const Eigen::MatrixBase<Derived>& point) const
  {
    check_point_dim(point.size());
    for (Index n = 0; n < dim(); ++n) {
      if (!(point[n] >= lower_[n] && point[n] <= upper_[n])) {
        return false;
      }
    }
    return true;
  }

  Index node_flat(const MultiIndex& node) const
  {
    check_node(node);
    return node.dot(node_strides_);
  }

  MultiIndex node_multi(Index flat) const
  {
    if (flat < 0 || flat >= num_nodes_) {
      throw IndexOutOfRange("flat node index " + std::to_string(flat) +
                            " out of range");
    }
    MultiIndex out(dim());
    for (Index n = 0; n < dim(); ++n) {
      out[n] = flat / node_strides_[n];
      flat %= node_strides_[n];
    }
    return out;
  }

  Index bin_flat(const MultiIndex& bin) const
  {
    check_bin(bin);
    return bin.dot(bin_strides_);
  }

  MultiIndex bin_multi(Index flat) const
  {
    if (flat < 0 || flat >= num_bins_) {
      throw IndexOutOfRange("flat bin index " + std::to_string(flat) +
                            " out of range");
    }
    MultiIndex out(dim());
    for (Index n = 0; n < dim(); ++n) {
      out[n] = flat / bin_strides_[n];
      flat %= bin_strides_[n];
    }
    return out;
  }

  void check_node(const MultiIndex& node) const
  {
    if (node.size() != dim()) {
      throw IndexOutOfRange("node index has wrong dimension");
    }
    for (Index n = 0; n < dim(); ++n) {
      if (node[n] < 0 || node[n] > n_delta_[n]) {
        throw IndexOutOfRange("node index " + std::to_string(node[n]) +
                              " out of range on axis " + std::to_string(n));
      }
    }
  }

  void check_bin(const MultiIndex& bin) const
  {
    if (bin.size() != dim()) {
      throw IndexOutOfRange("bin index has wrong dimension");
    }
    for (Index n = 0; n < dim(); ++n) {
      if (bin[n] < 0 || bin[n] >= n_delta_[n]) {
        throw IndexOutOfRange("bin index " + std::to_string(bin[n]) +
                              " out of range on axis " + std::to_string(n));
      }
    }
  }

  void check_point_dim(Index size) const
  {
    if (size != dim()) {
      throw std::invalid_argument("point has dimension " +
                                  std::to_string(size) + ", grid has " +
                                  std::to_string(dim()));
    }
  }

  friend bool operator==(const TensorGrid& a, const TensorGrid& b)
  {
    return a.lower_ == b.lower_ && a.upper_ == b.upper_ &&
           a.n_delta_ == b.n_delta_;
  }

private:
  Vector lower_;
  Vector upper_;
  MultiIndex n_delta_;
  Vector width_;
  MultiIndex node_strides_;
  MultiIndex bin_strides_;
  Index num_nodes_ = 0;
  Index num_bins_ = 0;
};

using Grid = TensorGrid<double>;

namespace detail {

//! Calls visit(flat_node, weight) for the 2^dim vertices of the bin
//! containing `point`, in lexicographic offset order (bit n of the corner
//! counter selects the upper node on axis n). Weights are the N-linear hat
//! values and sum to one.
template<typename Scalar, typename Derived, typename Visitor>
inline void
visit_vertices(const TensorGrid<Scalar>& grid,
               const Eigen::MatrixBase<Derived>& point,
               Visitor&& visit)
{
  const Index d = grid.dim();
  std::array<Scalar, max_dim> t{};
  std::array<Index, max_dim> stride{};
  Index base = 0;
  for (Index n = 0; n < d; ++n) {
    const Scalar y = point[n];
    const Index i = grid.locate_axis(n, y);
    const Scalar lo = grid.node_coordinate(n, i);
    const Scalar hi = grid.node_coordinate(n, i + 1);
    t[n] = (y - lo) / (hi - lo);
    stride[n] = grid.node_stride(n);
    base += i * stride[n];
  }
  const Index corners = Index(1) << d;
  for (Index c = 0; c < corners; ++c) {
    Scalar w(1);
    Index node = base;
    for (Index n = 0; n < d; ++n) {
      if ((c >> n) & 1) {
        w *= t[n];
        node += stride[n];
      } else {
        w *= Scalar(1) - t[n];
      }
    }
    visit(node, w);
  }
}

} // namespace detail

//! Bin containing `point`. Faces belong to the higher-index bin; the upper
//! boundary b_n is clamped into the last bin.
template<typename Scalar, typename Derived>
MultiIndex
locate_bin(const TensorGrid<Scalar>& grid, const Eigen::MatrixBase<Derived>& point)
{
  grid.check_point_dim(point.size());
  MultiIndex bin(grid.dim());
  for (Index n = 0; n < grid.dim(); ++n) {
    bin[n] = grid.locate_axis(n, static_cast<Scalar>(point[n]));
  }
  return bin;
}

template<typename Scalar>
VectorX<Scalar>
node_coords(const TensorGrid<Scalar>& grid, const MultiIndex& node)
{
  grid.check_node(node);
  VectorX<Scalar> y(grid.dim());
  for (Index n = 0; n < grid.dim(); ++n) {
    y[n] = grid.node_coordinate(n, node[n]);
  }
  return y;
}

//! Tensor-product hat phi_j(point) = prod_n max(0, 1 - |y_n - Y_jn| / delta_n).
//!
//! Evaluated through the local coordinate of the containing bin, so the
//! Kronecker property phi_j(Y_j') = [j == j'] holds exactly.
template<typename Scalar, typename Derived>
Scalar
basis_eval(const TensorGrid<Scalar>& grid,
           const MultiIndex& node,
           const Eigen::MatrixBase<Derived>& point)
{
  grid.check_node(node);
  grid.check_point_dim(point.size());
  Scalar value(1);
  for (Index n = 0; n < grid.dim(); ++n) {
    const Scalar y = point[n];
    const Index i = grid.locate_axis(n, y);
    if (node[n] != i && node[n] != i + 1) {
      return Scalar(0);
    }
    const Scalar lo = grid.node_coordinate(n, i);
    const Scalar hi = grid.node_coordinate(n, i + 1);
    const Scalar t = (y - lo) / (hi - lo);
    value *= node[n] == i ? Scalar(1) - t : t;
  }
  return value;
}

//! C_j: integral of phi_j over the domain. Per axis the hat integrates to
//! delta_n at interior coordinates and delta_n / 2 on the boundary.
template<typename Scalar>
Scalar
basis_integral(const TensorGrid<Scalar>& grid, const MultiIndex& node)
{
  grid.check_node(node);
  Scalar c(1);
  for (Index n = 0; n < grid.dim(); ++n) {
    const bool boundary = node[n] == 0 || node[n] == grid.n_delta()[n];
    c *= boundary ? grid.width()[n] / Scalar(2) : grid.width()[n];
  }
  return c;
}

//! All C_j in flat node order.
template<typename Scalar>
VectorX<Scalar>
basis_integrals(const TensorGrid<Scalar>& grid)
{
  VectorX<Scalar> c(grid.num_nodes());
  MultiIndex node = MultiIndex::Zero(grid.dim());
  for (Index j = 0; j < grid.num_nodes(); ++j) {
    Scalar value(1);
    for (Index n = 0; n < grid.dim(); ++n) {
      const bool boundary = node[n] == 0 || node[n] == grid.n_delta()[n];
      value *= boundary ? grid.width()[n] / Scalar(2) : grid.width()[n];
    }
    c[j] = value;
    // row-major increment
    for (Index n = grid.dim() - 1; n >= 0; --n) {
      if (++node[n] <= grid.n_delta()[n]) {
        break;
      }
      node[n] = 0;
    }
  }
  return c;
}

//! The 2^dim corner nodes of a bin, lexicographic in the offset (axis 0
//! offset varies fastest).
template<typename Scalar>
std::vector<MultiIndex>
bin_vertices(const TensorGrid<Scalar>& grid, const MultiIndex& bin)
{
  grid.check_bin(bin);
  const Index corners = Index(1) << grid.dim();
  std::vector<MultiIndex> out;
  out.reserve(static_cast<std::size_t>(corners));
  for (Index c = 0; c < corners; ++c) {
    MultiIndex node = bin;
    for (Index n = 0; n < grid.dim(); ++n) {
      node[n] += (c >> n) & 1;
    }
    out.push_back(std::move(node));
  }
  return out;
}

} // namespace fedens
