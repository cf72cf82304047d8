#include "fedens/sampling.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

using namespace fedens;

namespace {

// Phi^{-1} by bisection on erfc, in whichever tail keeps the target small.
double
bisect_quantile(double p)
{
  const bool upper = p > 0.5;
  const double target = upper ? 1.0 - p : p;
  double lo = -40.0, hi = 0.0;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double tail = 0.5 * std::erfc(-mid / std::numbers::sqrt2);
    (tail < target ? lo : hi) = mid;
  }
  const double x = 0.5 * (lo + hi);
  return upper ? -x : x;
}

double
simpson(const std::function<double(double)>& f, double a, double b, int n)
{
  const double h = (b - a) / n;
  double s = f(a) + f(b);
  for (int i = 1; i < n; ++i) {
    s += f(a + i * h) * (i % 2 ? 4.0 : 2.0);
  }
  return s * h / 3.0;
}

// One-sample Kolmogorov-Smirnov statistic.
double
ks_statistic(std::vector<double> x, const AxisDistribution& law)
{
  std::sort(x.begin(), x.end());
  const double n = static_cast<double>(x.size());
  double d = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double f = law.cdf(x[i]);
    d = std::max({ d, f - static_cast<double>(i) / n, static_cast<double>(i + 1) / n - f });
  }
  return d;
}

} // namespace

TEST(NormalQuantile, MatchesBisection)
{
  for (double p : { 1e-300, 1e-200, 1e-30, 1e-10, 1e-5, 0.001, 0.02425, 0.1, 0.3, 0.5, 0.7,
                    0.97575, 0.999, 1.0 - 1e-10 }) {
    const double x = normal_quantile(p);
    const double ref = bisect_quantile(p);
    EXPECT_NEAR(x, ref, 1e-12 * std::max(1.0, std::abs(ref))) << "p=" << p;
  }
  EXPECT_EQ(normal_quantile(0.5), 0.0);
  EXPECT_THROW(normal_quantile(0.0), std::invalid_argument);
  EXPECT_THROW(normal_quantile(1.0), std::invalid_argument);
}

TEST(NormalQuantile, InvertsCdf)
{
  for (int i = 1; i < 1000; ++i) {
    const double p = i / 1000.0;
    EXPECT_NEAR(normal_cdf(normal_quantile(p)), p, 1e-15);
  }
}

TEST(CounterRng, OpenUnitInterval)
{
  const CounterRng rng(99);
  double lo = 1.0, hi = 0.0;
  for (std::uint64_t k = 0; k < 100000; ++k) {
    const double u = rng.uniform(k);
    lo = std::min(lo, u);
    hi = std::max(hi, u);
  }
  EXPECT_GT(lo, 0.0);
  EXPECT_LT(hi, 1.0);
  EXPECT_NE(CounterRng(1).bits(0), CounterRng(2).bits(0));
}

TEST(ExactPdf, KnownValues)
{
  EXPECT_DOUBLE_EQ(exact_pdf(DistributionSpec::parse("uniform1d"), Eigen::VectorXd::Zero(1)), 0.5);

  const double cg = 0.5 * (std::erf(5.5 / std::numbers::sqrt2) - std::erf(-5.5 / std::numbers::sqrt2));
  EXPECT_LT(std::abs(1.0 - cg), 1e-7);
  const double g0 = 1.0 / (std::sqrt(2.0 * std::numbers::pi) * cg);
  EXPECT_NEAR(exact_pdf(DistributionSpec::parse("tgauss1d"), Eigen::VectorXd::Zero(1)), g0, 1e-15);
  EXPECT_NEAR(g0, 0.3989423, 1e-7);

  const double cl = 1.0 - std::exp(-5.5 / 1.5);
  EXPECT_NEAR(exact_pdf(DistributionSpec::parse("laplace1d"), Eigen::VectorXd::Zero(1)),
              1.0 / (3.0 * cl), 1e-15);

  const double cg2 = 0.5 * (std::erf(2.75 / std::numbers::sqrt2) - std::erf(-2.75 / std::numbers::sqrt2));
  const double mixed = 1.0 / (std::sqrt(8.0 * std::numbers::pi) * cg2) * g0;
  EXPECT_NEAR(exact_pdf(DistributionSpec::parse("mixed2d"), Eigen::VectorXd::Zero(2)), mixed, 1e-15);
}

TEST(ExactPdf, ZeroOutsideSupport)
{
  const auto spec = DistributionSpec::parse("tgauss2d");
  Eigen::VectorXd y(2);
  y << 0.0, 5.6;
  EXPECT_EQ(exact_pdf(spec, y), 0.0);
  EXPECT_THROW(exact_pdf(spec, Eigen::VectorXd::Zero(1)), std::invalid_argument);
}

TEST(ExactPdf, IntegratesToOne)
{
  for (const char* text : { "tgauss1d", "laplace1d", "uniform1d", "tgauss:1,0.5,-0.2,3",
                            "laplace:0.3,0.7,-1,2", "tgauss:0,2,-5.5,5.5" }) {
    const auto spec = DistributionSpec::parse(text);
    const auto& law = spec.axes()[0];
    // split at the location so the Laplace kink sits on a panel edge
    double mid = 0.5 * (law.lower() + law.upper());
    if (const auto* l = std::get_if<TruncatedLaplace>(&law.kind())) {
      mid = l->location;
    }
    auto f = [&](double y) { return law.pdf(y); };
    const double total = simpson(f, law.lower(), mid, 20000) + simpson(f, mid, law.upper(), 20000);
    EXPECT_NEAR(total, 1.0, 1e-8) << text;
  }
}

TEST(ExactPdf, ProductOfAxes)
{
  const auto spec = DistributionSpec::parse("tgauss:0,2,-5.5,5.5*laplace:0,1.5,-5.5,5.5*uniform:-1,1");
  ASSERT_EQ(spec.dim(), 3);
  Eigen::VectorXd y(3);
  y << 0.3, -1.2, 0.5;
  const double expect = spec.axes()[0].pdf(0.3) * spec.axes()[1].pdf(-1.2) * 0.5;
  EXPECT_DOUBLE_EQ(exact_pdf(spec, y), expect);
  EXPECT_EQ(spec.lower()[2], -1.0);
  EXPECT_EQ(spec.upper()[1], 5.5);
}

TEST(Parse, Presets)
{
  EXPECT_EQ(DistributionSpec::parse("tgauss3d").dim(), 3);
  EXPECT_EQ(DistributionSpec::parse("tgauss:0,1,-5.5,5.5^4").dim(), 4);
  EXPECT_EQ(DistributionSpec::parse("mixed2d").describe(),
            "tgauss:0,2,-5.5,5.5*tgauss:0,1,-5.5,5.5");
  const auto round = DistributionSpec::parse(DistributionSpec::parse("laplace:0.25,1.5,-2,3").describe());
  EXPECT_EQ(round.describe(), "laplace:0.25,1.5,-2,3");
}

TEST(Parse, Rejects)
{
  for (const char* text : { "", "gauss:0,1", "tgauss:0,1,-5", "tgauss:0,-1,-5,5", "uniform:1,0",
                            "tgauss:0,1,5,-5", "uniform:a,b", "tgauss1d^0", "tgauss:0,1,50,60",
                            "tgauss:0,1,-5,5^11", "uniform:0,1*" }) {
    EXPECT_THROW(DistributionSpec::parse(text), std::invalid_argument) << text;
  }
}

TEST(Sample, DeterministicAndNested)
{
  const auto spec = DistributionSpec::parse("mixed2d");
  const Eigen::MatrixXd a = sample(spec, 1000, 17);
  EXPECT_EQ(a, sample(spec, 1000, 17));
  const Eigen::MatrixXd b = sample(spec, 10000, 17);
  EXPECT_EQ(a, b.leftCols(1000));
  EXPECT_EQ(b, sample(spec, 10000, 17, 4));
  EXPECT_EQ(b.middleCols(2500, 300), sample_range(spec, 2500, 300, 17));
  EXPECT_NE(a, sample(spec, 1000, 18));
  EXPECT_THROW(sample(spec, 0, 1), std::invalid_argument);
}

TEST(Sample, WithinSupport)
{
  const auto spec = DistributionSpec::parse("tgauss:0,1,-0.5,0.5*laplace:2,3,-1,1*uniform:3,4");
  const Eigen::MatrixXd s = sample(spec, 50000, 5);
  for (Index n = 0; n < 3; ++n) {
    EXPECT_GE(s.row(n).minCoeff(), spec.lower()[n]);
    EXPECT_LE(s.row(n).maxCoeff(), spec.upper()[n]);
  }
}

TEST(Sample, KolmogorovSmirnov)
{
  for (const char* text : { "tgauss1d", "laplace1d", "uniform1d", "tgauss:1,0.5,-0.2,3",
                            "laplace:0.3,0.7,-1,2", "tgauss:0,1,4,8" }) {
    const auto spec = DistributionSpec::parse(text);
    const Eigen::MatrixXd s = sample(spec, 100000, 2024);
    std::vector<double> x(s.data(), s.data() + s.size());
    // 1% critical value
    EXPECT_LT(ks_statistic(x, spec.axes()[0]), 1.63 / std::sqrt(100000.0)) << text;
  }
}

TEST(Sample, GaussianMoments)
{
  const Eigen::MatrixXd s = sample(DistributionSpec::parse("tgauss1d"), 1'000'000, 1);
  const double mean = s.mean();
  const double var = (s.array() - mean).square().sum() / (s.size() - 1);
  EXPECT_GE(mean, -0.005);
  EXPECT_LE(mean, 0.005);
  EXPECT_GE(var, 0.99);
  EXPECT_LE(var, 1.01);
}

TEST(AxisDistribution, QuantileInvertsCdf)
{
  for (const char* text : { "tgauss1d", "laplace1d", "uniform:-2,5", "tgauss:0,1,3,9" }) {
    const auto law = DistributionSpec::parse(text).axes()[0];
    for (int i = 1; i < 200; ++i) {
      const double u = i / 200.0;
      EXPECT_NEAR(law.cdf(law.quantile(u)), u, 1e-12) << text << " u=" << u;
    }
    EXPECT_EQ(law.cdf(law.lower()), 0.0);
    EXPECT_EQ(law.cdf(law.upper()), 1.0);
  }
}
