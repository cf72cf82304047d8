#include "fedens/sampling.hpp"

#include "fedens/parallel.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <stdexcept>

namespace fedens {

namespace {

constexpr double sqrt2 = std::numbers::sqrt2;

std::uint64_t
splitmix64_mix(std::uint64_t z)
{
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

constexpr std::uint64_t golden_gamma = 0x9E3779B97F4A7C15ULL;

// Upper tail Q(x) = 1 - Phi(x), accurate for large x.
double
normal_sf(double x)
{
  return 0.5 * std::erfc(x / sqrt2);
}

// Acklam's rational approximation, relative error ~1.2e-9.
double
quantile_start(double p)
{
  static constexpr double a[] = { -3.969683028665376e+01, 2.209460984245205e+02,
                                  -2.759285104469687e+02, 1.383577518672690e+02,
                                  -3.066479806614716e+01, 2.506628277459239e+00 };
  static constexpr double b[] = { -5.447609879822406e+01, 1.615858368580409e+02,
                                  -1.556989798598866e+02, 6.680131188771972e+01,
                                  -1.328068155288572e+01 };
  static constexpr double c[] = { -7.784894002430293e-03, -3.223964580411365e-01,
                                  -2.400758277161838e+00, -2.549732539343734e+00,
                                  4.374664141464968e+00,  2.938163982698783e+00 };
  static constexpr double d[] = { 7.784695709041462e-03, 3.224671290700398e-01,
                                  2.445134137142996e+00, 3.754408661907416e+00 };
  constexpr double p_low = 0.02425;
  if (p < p_low) {
    const double q = std::sqrt(-2.0 * std::log(p));
    return (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
           ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  if (p <= 1.0 - p_low) {
    const double q = p - 0.5;
    const double r = q * q;
    return (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
           (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
  }
  const double q = std::sqrt(-2.0 * std::log1p(-p));
  return -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
         ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
}

// Phi^{-1}(p) for p <= 0.5; refinement against the lower tail keeps full
// relative precision deep in the tail.
double
lower_quantile(double p)
{
  double x = quantile_start(p);
  const double e = 0.5 * std::erfc(-x / sqrt2) - p;
  const double u = e * std::sqrt(2.0 * std::numbers::pi) * std::exp(0.5 * x * x);
  x -= u / (1.0 + 0.5 * x * u);
  return x;
}

double
laplace_cdf(double z)
{
  return z < 0.0 ? 0.5 * std::exp(z) : 1.0 - 0.5 * std::exp(-z);
}

double
laplace_sf(double z)
{
  return z > 0.0 ? 0.5 * std::exp(-z) : 1.0 - 0.5 * std::exp(z);
}

std::string
fmt_num(double v)
{
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

template<class... Ts>
struct overloaded : Ts...
{
  using Ts::operator()...;
};

std::vector<double>
parse_numbers(std::string_view text, std::size_t expected, std::string_view term)
{
  std::vector<double> out;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t comma = text.find(',', pos);
    if (comma == std::string_view::npos) {
      comma = text.size();
    }
    std::string_view field = text.substr(pos, comma - pos);
    double v = 0.0;
    auto res = std::from_chars(field.data(), field.data() + field.size(), v);
    if (field.empty() || res.ec != std::errc() || res.ptr != field.data() + field.size()) {
      throw std::invalid_argument("bad number '" + std::string(field) + "' in '" +
                                  std::string(term) + "'");
    }
    out.push_back(v);
    pos = comma + 1;
  }
  if (out.size() != expected) {
    throw std::invalid_argument("'" + std::string(term) + "' expects " +
                                std::to_string(expected) + " parameters");
  }
  return out;
}

AxisDistribution
parse_axis(std::string_view term)
{
  const auto colon = term.find(':');
  if (colon == std::string_view::npos) {
    throw std::invalid_argument("axis term '" + std::string(term) +
                                "' is missing ':parameters'");
  }
  const std::string_view name = term.substr(0, colon);
  const std::string_view args = term.substr(colon + 1);
  if (name == "tgauss") {
    auto v = parse_numbers(args, 4, term);
    return AxisDistribution(TruncatedGaussian{ v[0], v[1], v[2], v[3] });
  }
  if (name == "uniform") {
    auto v = parse_numbers(args, 2, term);
    return AxisDistribution(Uniform{ v[0], v[1] });
  }
  if (name == "laplace") {
    auto v = parse_numbers(args, 4, term);
    return AxisDistribution(TruncatedLaplace{ v[0], v[1], v[2], v[3] });
  }
  throw std::invalid_argument("unknown distribution '" + std::string(name) + "'");
}

} // namespace

double
normal_cdf(double x)
{
  return 0.5 * std::erfc(-x / sqrt2);
}

double
normal_quantile(double p)
{
  if (!(p > 0.0 && p < 1.0)) {
    throw std::invalid_argument("normal_quantile needs p in (0, 1)");
  }
  return p <= 0.5 ? lower_quantile(p) : -lower_quantile(1.0 - p);
}

CounterRng::CounterRng(std::uint64_t seed)
  : key_(splitmix64_mix(seed + golden_gamma))
{}

std::uint64_t
CounterRng::bits(std::uint64_t counter) const
{
  return splitmix64_mix(key_ + (counter + 1) * golden_gamma);
}

double
CounterRng::uniform(std::uint64_t counter) const
{
  return (static_cast<double>(bits(counter) >> 11) + 0.5) * 0x1.0p-53;
}

AxisDistribution::AxisDistribution(Kind kind)
  : kind_(kind)
{
  std::visit(
    overloaded{
      [&](const TruncatedGaussian& g) {
        if (!(g.sd > 0.0) || !(g.lo < g.hi)) {
          throw std::invalid_argument("tgauss needs sd > 0 and lo < hi");
        }
        const double alpha = (g.lo - g.mean) / g.sd;
        const double beta = (g.hi - g.mean) / g.sd;
        norm_ = 0.5 * (std::erf(beta / sqrt2) - std::erf(alpha / sqrt2));
        lower_tail_ = normal_cdf(alpha);
        upper_tail_ = normal_sf(beta);
      },
      [&](const Uniform& u) {
        if (!(u.lo < u.hi)) {
          throw std::invalid_argument("uniform needs lo < hi");
        }
      },
      [&](const TruncatedLaplace& l) {
        if (!(l.scale > 0.0) || !(l.lo < l.hi)) {
          throw std::invalid_argument("laplace needs scale > 0 and lo < hi");
        }
        lower_tail_ = laplace_cdf((l.lo - l.location) / l.scale);
        upper_tail_ = laplace_sf((l.hi - l.location) / l.scale);
        norm_ = 1.0 - lower_tail_ - upper_tail_;
      } },
    kind_);
  if (!(norm_ > 0.0)) {
    throw std::invalid_argument("truncation interval carries no probability mass");
  }
}

double
AxisDistribution::lower() const
{
  return std::visit([](const auto& k) { return k.lo; }, kind_);
}

double
AxisDistribution::upper() const
{
  return std::visit([](const auto& k) { return k.hi; }, kind_);
}

double
AxisDistribution::pdf(double y) const
{
  if (!(y >= lower() && y <= upper())) {
    return 0.0;
  }
  return std::visit(
    overloaded{ [&](const TruncatedGaussian& g) {
                 const double z = (y - g.mean) / g.sd;
                 return std::exp(-0.5 * z * z) /
                        (std::sqrt(2.0 * std::numbers::pi) * g.sd * norm_);
               },
                [&](const Uniform& u) { return 1.0 / (u.hi - u.lo); },
                [&](const TruncatedLaplace& l) {
                  return std::exp(-std::abs(y - l.location) / l.scale) /
                         (2.0 * l.scale * norm_);
                } },
    kind_);
}

double
AxisDistribution::cdf(double y) const
{
  if (y <= lower()) {
    return 0.0;
  }
  if (y >= upper()) {
    return 1.0;
  }
  return std::visit(
    overloaded{ [&](const TruncatedGaussian& g) {
                 return (normal_cdf((y - g.mean) / g.sd) - lower_tail_) / norm_;
               },
                [&](const Uniform& u) { return (y - u.lo) / (u.hi - u.lo); },
                [&](const TruncatedLaplace& l) {
                  return (laplace_cdf((y - l.location) / l.scale) - lower_tail_) / norm_;
                } },
    kind_);
}

double
AxisDistribution::quantile(double u) const
{
  const double y = std::visit(
    overloaded{ [&](const TruncatedGaussian& g) {
                 // Work in whichever tail keeps the target probability small.
                 const double p = lower_tail_ + u * norm_;
                 const double z = p <= 0.5 ? lower_quantile(p)
                                           : -lower_quantile(upper_tail_ + (1.0 - u) * norm_);
                 return g.mean + g.sd * z;
               },
                [&](const Uniform& uni) { return uni.lo + u * (uni.hi - uni.lo); },
                [&](const TruncatedLaplace& l) {
                  const double p = lower_tail_ + u * norm_;
                  if (p <= 0.5) {
                    return l.location + l.scale * std::log(2.0 * p);
                  }
                  const double q = upper_tail_ + (1.0 - u) * norm_;
                  return l.location - l.scale * std::log(2.0 * q);
                } },
    kind_);
  return std::clamp(y, lower(), upper());
}

std::string
AxisDistribution::describe() const
{
  return std::visit(
    overloaded{ [](const TruncatedGaussian& g) {
                 return "tgauss:" + fmt_num(g.mean) + "," + fmt_num(g.sd) + "," +
                        fmt_num(g.lo) + "," + fmt_num(g.hi);
               },
                [](const Uniform& u) {
                  return "uniform:" + fmt_num(u.lo) + "," + fmt_num(u.hi);
                },
                [](const TruncatedLaplace& l) {
                  return "laplace:" + fmt_num(l.location) + "," + fmt_num(l.scale) + "," +
                         fmt_num(l.lo) + "," + fmt_num(l.hi);
                } },
    kind_);
}

DistributionSpec::DistributionSpec(std::vector<AxisDistribution> axes)
  : axes_(std::move(axes))
{
  if (axes_.empty() || static_cast<Index>(axes_.size()) > max_dim) {
    throw std::invalid_argument("distribution needs between 1 and " +
                                std::to_string(max_dim) + " axes");
  }
}

DistributionSpec
DistributionSpec::parse(std::string_view text)
{
  if (text == "tgauss1d" || text == "tgauss2d" || text == "tgauss3d") {
    const std::size_t d = static_cast<std::size_t>(text[6] - '0');
    return DistributionSpec(
      std::vector<AxisDistribution>(d, AxisDistribution(TruncatedGaussian{})));
  }
  if (text == "laplace1d") {
    return DistributionSpec({ AxisDistribution(TruncatedLaplace{}) });
  }
  if (text == "uniform1d") {
    return DistributionSpec({ AxisDistribution(Uniform{}) });
  }
  if (text == "mixed2d") {
    return DistributionSpec({ AxisDistribution(TruncatedGaussian{ 0.0, 2.0, -5.5, 5.5 }),
                              AxisDistribution(TruncatedGaussian{}) });
  }
  std::vector<AxisDistribution> axes;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t star = text.find('*', pos);
    if (star == std::string_view::npos) {
      star = text.size();
    }
    std::string_view term = text.substr(pos, star - pos);
    std::size_t repeat = 1;
    if (const auto caret = term.find('^'); caret != std::string_view::npos) {
      std::string_view count = term.substr(caret + 1);
      auto res = std::from_chars(count.data(), count.data() + count.size(), repeat);
      if (count.empty() || res.ec != std::errc() ||
          res.ptr != count.data() + count.size() || repeat == 0) {
        throw std::invalid_argument("bad repeat count in '" + std::string(term) + "'");
      }
      term = term.substr(0, caret);
    }
    const AxisDistribution axis = parse_axis(term);
    for (std::size_t r = 0; r < repeat; ++r) {
      axes.push_back(axis);
    }
    pos = star + 1;
  }
  return DistributionSpec(std::move(axes));
}

Eigen::VectorXd
DistributionSpec::lower() const
{
  Eigen::VectorXd v(dim());
  for (Index n = 0; n < dim(); ++n) {
    v[n] = axes_[static_cast<std::size_t>(n)].lower();
  }
  return v;
}

Eigen::VectorXd
DistributionSpec::upper() const
{
  Eigen::VectorXd v(dim());
  for (Index n = 0; n < dim(); ++n) {
    v[n] = axes_[static_cast<std::size_t>(n)].upper();
  }
  return v;
}

std::string
DistributionSpec::describe() const
{
  std::string out;
  for (const auto& a : axes_) {
    if (!out.empty()) {
      out += '*';
    }
    out += a.describe();
  }
  return out;
}

double
exact_pdf(const DistributionSpec& spec, const Eigen::Ref<const Eigen::VectorXd>& point)
{
  if (point.size() != spec.dim()) {
    throw std::invalid_argument("point dimension does not match distribution");
  }
  double value = 1.0;
  for (Index n = 0; n < spec.dim() && value != 0.0; ++n) {
    value *= spec.axes()[static_cast<std::size_t>(n)].pdf(point[n]);
  }
  return value;
}

Eigen::MatrixXd
sample_range(const DistributionSpec& spec, Index first, Index count, std::uint64_t seed, int threads)
{
  if (first < 0 || count < 0) {
    throw std::invalid_argument("sample range must be non-negative");
  }
  const Index d = spec.dim();
  Eigen::MatrixXd out(d, count);
  const CounterRng rng(seed);
  parallel_chunks(count, threads, [&](Index, Index begin, Index end) {
    for (Index i = begin; i < end; ++i) {
      const auto base = static_cast<std::uint64_t>(first + i) * static_cast<std::uint64_t>(d);
      for (Index n = 0; n < d; ++n) {
        out(n, i) = spec.axes()[static_cast<std::size_t>(n)].quantile(
          rng.uniform(base + static_cast<std::uint64_t>(n)));
      }
    }
  });
  return out;
}

Eigen::MatrixXd
sample(const DistributionSpec& spec, Index m, std::uint64_t seed, int threads)
{
  if (m < 1) {
    throw std::invalid_argument("sample count must be at least 1");
  }
  return sample_range(spec, 0, m, seed, threads);
}

} // namespace fedens
