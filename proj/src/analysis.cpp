#include "fedens/analysis.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace fedens {

std::optional<std::string>
surrogate_resolution_warning(const Histogram<double>& reference, Index m, double delta)
{
  const double ref_delta = reference.grid().width().maxCoeff();
  std::string msg;
  if (reference.sample_count() <= m) {
    msg += "reference uses " + std::to_string(reference.sample_count()) +
           " samples, not more than the approximation's " + std::to_string(m);
  }
  if (!(ref_delta < delta)) {
    if (!msg.empty()) {
      msg += "; ";
    }
    msg += "reference bin width " + std::to_string(ref_delta) +
           " is not finer than " + std::to_string(delta);
  }
  if (msg.empty()) {
    return std::nullopt;
  }
  return msg;
}

Coupling
coupling(const CouplingRule& rule)
{
  if (rule.r != 1 && rule.r != 2) {
    throw UnsupportedOrder(rule.r);
  }
  if (rule.k < 1) {
    throw std::invalid_argument("refinement level k must be >= 1");
  }
  if (!(rule.a < rule.b)) {
    throw std::invalid_argument("coupling needs a < b");
  }
  if (!(rule.variance_multiplier > 0.0)) {
    throw std::invalid_argument("variance multiplier must be positive");
  }
  // M = 2^(2r(3-r)k) = 16^k for both admissible orders.
  const int n_exp = (3 - rule.r) * rule.k;
  const int m_exp = 2 * rule.r * n_exp;
  if (m_exp > 62) {
    throw std::invalid_argument("coupling level k=" + std::to_string(rule.k) +
                                " overflows the sample count");
  }
  Coupling out;
  out.n_delta = Index(1) << n_exp;
  out.delta = (rule.b - rule.a) / static_cast<double>(out.n_delta);
  out.m = Index(1) << m_exp;
  if (rule.variance_multiplier != 1.0) {
    const double scaled = std::ceil(rule.variance_multiplier * static_cast<double>(out.m));
    if (!(scaled < 0x1.0p62)) {
      throw std::invalid_argument("scaled sample count overflows");
    }
    out.m = std::max<Index>(1, static_cast<Index>(scaled));
  }
  return out;
}

Box
estimate_support(const Eigen::Ref<const Eigen::MatrixXd>& samples)
{
  if (samples.cols() == 0) {
    throw EmptySampleSet();
  }
  Box box{ samples.rowwise().minCoeff(), samples.rowwise().maxCoeff() };
  for (Index n = 0; n < box.lower.size(); ++n) {
    if (!(box.lower[n] < box.upper[n])) {
      throw DegenerateSupport(n);
    }
  }
  return box;
}

double
fit_rate(std::span<const RatePoint> points)
{
  if (points.size() < 2) {
    throw TooFewPoints("rate fit needs at least two points");
  }
  double sx = 0.0;
  double sy = 0.0;
  for (const auto& p : points) {
    if (!(p.x > 0.0) || !(p.error > 0.0)) {
      throw NonpositiveValue("rate fit needs positive x and error values");
    }
    sx += std::log(p.x);
    sy += std::log(p.error);
  }
  const double n = static_cast<double>(points.size());
  const double mx = sx / n;
  const double my = sy / n;
  double sxx = 0.0;
  double sxy = 0.0;
  for (const auto& p : points) {
    const double dx = std::log(p.x) - mx;
    sxx += dx * dx;
    sxy += dx * (std::log(p.error) - my);
  }
  if (sxx == 0.0) {
    throw TooFewPoints("rate fit needs at least two distinct x values");
  }
  return sxy / sxx;
}

namespace {

struct LevelPlan
{
  int k = 0;
  Index n_delta = 0;
  Index m = 0;
};

LevelPlan
plan_level(const StudyConfig& cfg, int k, double a, double b)
{
  switch (cfg.mode) {
    case StudyMode::fixed_m:
      if (k < 0 || k > 30) {
        throw std::invalid_argument("fixed_m level out of range");
      }
      return { k, Index(1) << k, cfg.fixed_m };
    case StudyMode::fixed_delta: {
      if (k < 0 || k > 18) {
        throw std::invalid_argument("fixed_delta level out of range");
      }
      Index m = 1;
      for (int i = 0; i < k; ++i) {
        m *= 10;
      }
      return { k, cfg.fixed_n_delta, m };
    }
    case StudyMode::coupled: {
      const Coupling c =
        coupling(CouplingRule{ cfg.order, k, a, b, cfg.variance_multiplier });
      return { k, c.n_delta, c.m };
    }
  }
  throw std::logic_error("unknown study mode");
}

double
rate_or_nan(const std::vector<RatePoint>& pts)
{
  for (std::size_t i = 1; i < pts.size(); ++i) {
    if (pts[i].x != pts[0].x) {
      return fit_rate(pts);
    }
  }
  return std::nan("");
}

} // namespace

StudyResult
convergence_study(const StudyConfig& cfg)
{
  if (cfg.levels.empty()) {
    throw std::invalid_argument("study needs at least one level");
  }
  if (!std::is_sorted(cfg.levels.begin(), cfg.levels.end())) {
    throw std::invalid_argument("study levels must be ascending");
  }
  if (cfg.seeds.empty()) {
    throw std::invalid_argument("study needs at least one seed");
  }
  const Index d = cfg.distribution.dim();
  Eigen::VectorXd base_lower = cfg.distribution.lower();
  Eigen::VectorXd base_upper = cfg.distribution.upper();
  if (cfg.domain == DomainMode::given) {
    if (cfg.lower.size() != d || cfg.upper.size() != d) {
      throw std::invalid_argument("given study domain has wrong dimension");
    }
    base_lower = cfg.lower;
    base_upper = cfg.upper;
  }

  std::vector<LevelPlan> plans;
  Index max_m = 0;
  for (int k : cfg.levels) {
    plans.push_back(plan_level(cfg, k, base_lower[0], base_upper[0]));
    max_m = std::max(max_m, plans.back().m);
  }

  StudyResult result;
  result.rows.resize(plans.size());
  for (std::size_t l = 0; l < plans.size(); ++l) {
    auto& row = result.rows[l];
    row.k = plans[l].k;
    row.n_delta = plans[l].n_delta;
    row.m = plans[l].m;
  }

  const FitOptions fit_opts{ cfg.threads, cfg.compensated };
  for (std::uint64_t seed : cfg.seeds) {
    const Eigen::MatrixXd all = sample(cfg.distribution, max_m, seed, cfg.threads);
    for (std::size_t l = 0; l < plans.size(); ++l) {
      const LevelPlan& plan = plans[l];
      auto& row = result.rows[l];
      const auto fitted = all.leftCols(plan.m);

      Box domain{ base_lower, base_upper };
      if (cfg.domain == DomainMode::estimated) {
        domain = estimate_support(fitted);
      }
      const Grid grid(domain.lower, domain.upper, MultiIndex::Constant(d, plan.n_delta));

      const auto start = std::chrono::steady_clock::now();
      const LinearPdf pdf = fit(grid, fitted, fit_opts);
      const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - start;

      auto approx = [&](const PointRef& y) { return evaluate(pdf, y); };
      double error = 0.0;
      if (cfg.holdout) {
        const Eigen::MatrixXd held =
          sample_range(cfg.distribution, plan.m, plan.m, seed, cfg.threads);
        // held-out draws may fall outside an estimated support; clip them
        // into the grid as a diagnostic
        Eigen::MatrixXd clipped = held;
        for (Index n = 0; n < d; ++n) {
          clipped.row(n) = clipped.row(n).cwiseMax(domain.lower[n]).cwiseMin(domain.upper[n]);
        }
        error = rmse_vs_exact(approx, cfg.distribution, clipped, cfg.threads);
      } else {
        error = rmse_vs_exact(approx, cfg.distribution, fitted, cfg.threads);
      }

      row.seed_errors.push_back(error);
      row.seed_domains.push_back(domain);
      row.error += error / static_cast<double>(cfg.seeds.size());
      row.seconds += elapsed.count() / static_cast<double>(cfg.seeds.size());
      row.delta += grid.width().maxCoeff() / static_cast<double>(cfg.seeds.size());
    }
  }

  std::stable_sort(result.rows.begin(), result.rows.end(), [](const StudyRow& a, const StudyRow& b) {
    if (a.delta != b.delta) {
      return a.delta > b.delta;
    }
    return a.m < b.m;
  });

  std::vector<RatePoint> by_delta;
  std::vector<RatePoint> by_m;
  for (const auto& row : result.rows) {
    by_delta.push_back({ row.delta, row.error });
    by_m.push_back({ static_cast<double>(row.m), row.error });
  }
  result.rate_delta = rate_or_nan(by_delta);
  result.rate_m = rate_or_nan(by_m);
  return result;
}

std::vector<SurrogateRow>
compare_to_histogram(const Histogram<double>& reference,
                     const Eigen::Ref<const Eigen::MatrixXd>& samples,
                     const Grid& grid,
                     const std::vector<SurrogateCandidate>& candidates,
                     int threads)
{
  std::vector<SurrogateRow> rows;
  const double delta = grid.width().maxCoeff();
  for (const auto& cand : candidates) {
    SurrogateRow row{ cand.label, samples.cols(), delta, 0.0 };
    std::visit(
      [&](const auto& kind) {
        using K = std::decay_t<decltype(kind)>;
        if constexpr (std::is_same_v<K, SurrogateCandidate::FiniteElement>) {
          const LinearPdf pdf = fit(grid, samples, FitOptions{ threads, false });
          row.rmse = rmse_vs_histogram([&](const PointRef& y) { return evaluate(pdf, y); },
                                       reference, samples, threads);
        } else if constexpr (std::is_same_v<K, SurrogateCandidate::HistogramFit>) {
          const Histogram<double> h = fit_histogram(grid, samples);
          row.rmse = rmse_vs_histogram([&](const PointRef& y) { return eval_histogram(h, y); },
                                       reference, samples, threads);
        } else if constexpr (std::is_same_v<K, SurrogateCandidate::Kde>) {
          const KdeSpec<double> kde(Kernel::gaussian, kind.bandwidth, samples);
          row.rmse = rmse_vs_histogram([&](const PointRef& y) { return eval_kde(kde, y); },
                                       reference, samples, threads);
          row.delta = kind.bandwidth;
        } else {
          if (kind.pdf == nullptr) {
            throw std::invalid_argument("model candidate without a pdf");
          }
          row.m = kind.pdf->sample_count();
          row.delta = kind.pdf->grid().width().maxCoeff();
          row.rmse = rmse_vs_histogram([&](const PointRef& y) { return evaluate(*kind.pdf, y); },
                                       reference, samples, threads);
        }
      },
      cand.kind);
    rows.push_back(std::move(row));
  }
  return rows;
}

} // namespace fedens
