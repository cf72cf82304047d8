#pragma once

#include "fedens/baselines.hpp"
#include "fedens/errors.hpp"
#include "fedens/estimator.hpp"
#include "fedens/grid.hpp"
#include "fedens/parallel.hpp"
#include "fedens/sampling.hpp"

#include <Eigen/Core>

#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace fedens {

using PointRef = Eigen::Ref<const Eigen::VectorXd>;

namespace detail {

//! Root mean square of diff(point) over the columns of `samples`. Partial
//! sums are formed per contiguous chunk and added in chunk order.
template<typename Diff>
double
chunked_rms(const Eigen::Ref<const Eigen::MatrixXd>& samples, int threads, Diff&& diff)
{
  const Index m = samples.cols();
  if (m == 0) {
    throw EmptySampleSet();
  }
  const Index chunks = std::max<Index>(1, std::min<Index>(std::max(1, threads), m));
  std::vector<double> partial(static_cast<std::size_t>(chunks), 0.0);
  parallel_chunks(m, threads, [&](Index chunk, Index begin, Index end) {
    double sum = 0.0;
    Index i = begin;
    try {
      for (; i < end; ++i) {
        const double e = diff(samples.col(i));
        sum += e * e;
      }
    } catch (const SampleOutOfDomain&) {
      throw;
    } catch (const OutOfDomain& e) {
      throw SampleOutOfDomain(i, e.axis(), e.value());
    }
    partial[static_cast<std::size_t>(chunk)] = sum;
  });
  double total = 0.0;
  for (double p : partial) {
    total += p;
  }
  return std::sqrt(total / static_cast<double>(m));
}

} // namespace detail

//! (1/M sum_m (f(Y_m) - approx(Y_m))^2)^(1/2) over the given samples, with f
//! the exact density. Samples outside the exact support raise
//! SampleOutOfDomain.
template<typename Eval>
double
rmse_vs_exact(Eval&& approx,
              const DistributionSpec& exact,
              const Eigen::Ref<const Eigen::MatrixXd>& samples,
              int threads = 1)
{
  if (samples.cols() > 0 && samples.rows() != exact.dim()) {
    throw std::invalid_argument("sample dimension does not match distribution");
  }
  const Eigen::VectorXd lo = exact.lower();
  const Eigen::VectorXd hi = exact.upper();
  return detail::chunked_rms(samples, threads, [&](const PointRef& y) {
    for (Index n = 0; n < y.size(); ++n) {
      if (!(y[n] >= lo[n] && y[n] <= hi[n])) {
        throw OutOfDomain(n, y[n]);
      }
    }
    return exact_pdf(exact, y) - approx(y);
  });
}

//! Same metric with a fine histogram standing in for the unknown density.
template<typename Eval>
double
rmse_vs_histogram(Eval&& approx,
                  const Histogram<double>& reference,
                  const Eigen::Ref<const Eigen::MatrixXd>& samples,
                  int threads = 1)
{
  return detail::chunked_rms(samples, threads, [&](const PointRef& y) {
    return eval_histogram(reference, y) - approx(y);
  });
}

//! Non-empty when the reference is not finer than an approximation built
//! from m samples at bin size delta (needs M_ref > m and delta_ref < delta).
std::optional<std::string>
surrogate_resolution_warning(const Histogram<double>& reference, Index m, double delta);

struct CouplingRule
{
  int r = 2;  //!< expected convergence order in the bin size
  int k = 1;  //!< refinement level
  double a = -5.5;
  double b = 5.5;
  //! Scales M, e.g. by the variance of a wide density. 1 leaves M = N^(2r).
  double variance_multiplier = 1.0;
};

struct Coupling
{
  Index n_delta = 0;
  double delta = 0.0;
  Index m = 0;
};

//! N_delta = 2^((3-r)k), delta = (b-a)/N_delta, M = N_delta^(2r).
//! Throws UnsupportedOrder unless r is 1 or 2.
Coupling coupling(const CouplingRule& rule);

struct Box
{
  Eigen::VectorXd lower;
  Eigen::VectorXd upper;
};

//! Componentwise sample extremes. Throws DegenerateSupport when they
//! coincide on some axis.
Box estimate_support(const Eigen::Ref<const Eigen::MatrixXd>& samples);

struct RatePoint
{
  double x = 0.0;
  double error = 0.0;
};

//! Least-squares slope of log(error) against log(x).
double fit_rate(std::span<const RatePoint> points);

enum class StudyMode
{
  fixed_m,     //!< M fixed, N_delta = 2^k
  fixed_delta, //!< N_delta fixed, M = 10^k
  coupled      //!< coupling rule of order r at level k
};

enum class DomainMode
{
  distribution, //!< the distribution's support box
  given,        //!< StudyConfig::lower / upper
  estimated     //!< sample extremes of each level's sample set
};

struct StudyConfig
{
  DistributionSpec distribution;
  StudyMode mode = StudyMode::coupled;
  int order = 2;
  std::vector<int> levels;
  std::vector<std::uint64_t> seeds{ 1 };
  Index fixed_m = 10'000'000;
  Index fixed_n_delta = 256;
  DomainMode domain = DomainMode::distribution;
  Eigen::VectorXd lower;
  Eigen::VectorXd upper;
  double variance_multiplier = 1.0;
  //! Measure the error on draws [M, 2M) instead of the fitted draws.
  bool holdout = false;
  int threads = 1;
  bool compensated = false;
};

struct StudyRow
{
  int k = 0;
  Index n_delta = 0;
  double delta = 0.0; //!< largest per-axis bin width, averaged over seeds
  Index m = 0;
  double error = 0.0;   //!< mean over seeds
  double seconds = 0.0; //!< mean fit wall time over seeds
  std::vector<double> seed_errors;
  std::vector<Box> seed_domains;
};

struct StudyResult
{
  std::vector<StudyRow> rows; //!< by decreasing delta, then increasing M
  double rate_delta = std::nan("");
  double rate_m = std::nan("");
};

//! Runs one fit per (level, seed): draws the first M samples of the seed's
//! stream (so levels are nested), fits on the level's grid, and measures
//! rmse_vs_exact. Rates are NaN when the corresponding axis does not vary.
StudyResult convergence_study(const StudyConfig& config);

//! Approximation compared against a histogram surrogate.
struct SurrogateCandidate
{
  struct FiniteElement
  {};
  struct HistogramFit
  {};
  struct Kde
  {
    double bandwidth = 0.0;
  };
  struct Model
  {
    const LinearPdf* pdf = nullptr;
  };

  std::string label;
  std::variant<FiniteElement, HistogramFit, Kde, Model> kind;
};

struct SurrogateRow
{
  std::string estimator;
  Index m = 0;
  double delta = 0.0;
  double rmse = 0.0;
};

//! Fits each candidate on `samples` over `grid` (a loaded model is used
//! as is) and measures rmse_vs_histogram at those samples.
std::vector<SurrogateRow> compare_to_histogram(const Histogram<double>& reference,
                                               const Eigen::Ref<const Eigen::MatrixXd>& samples,
                                               const Grid& grid,
                                               const std::vector<SurrogateCandidate>& candidates,
                                               int threads = 1);

} // namespace fedens
