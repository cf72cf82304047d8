#include "cli.hpp"

#include "fedens/analysis.hpp"
#include "fedens/baselines.hpp"
#include "fedens/estimator.hpp"
#include "fedens/io.hpp"
#include "fedens/sampling.hpp"

#include <CLI11.hpp>

#include <charconv>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace fedens::cli {

namespace {

namespace fs = std::filesystem;

//! Bad flags or flag values; exit code 2.
class UsageError : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

const char* const dist_help =
  "Distribution: a preset (tgauss1d, tgauss2d, tgauss3d, laplace1d, uniform1d, mixed2d) "
  "or a '*'-separated product of axis terms tgauss:MEAN,SD,LO,HI | uniform:LO,HI | "
  "laplace:LOC,SCALE,LO,HI, each optionally suffixed ^N to repeat it";

std::vector<std::string>
split(const std::string& text, char sep)
{
  std::vector<std::string> out;
  std::size_t pos = 0;
  while (true) {
    const std::size_t next = text.find(sep, pos);
    out.push_back(text.substr(pos, next == std::string::npos ? std::string::npos : next - pos));
    if (next == std::string::npos) {
      break;
    }
    pos = next + 1;
  }
  return out;
}

double
parse_real(const std::string& text, const std::string& flag)
{
  double v = 0.0;
  auto res = std::from_chars(text.data(), text.data() + text.size(), v);
  if (text.empty() || res.ec != std::errc() || res.ptr != text.data() + text.size() ||
      !std::isfinite(v)) {
    throw UsageError(flag + ": '" + text + "' is not a number");
  }
  return v;
}

//! Positive integer count; accepts scientific notation such as 1e6.
Index
parse_count(const std::string& text, const std::string& flag)
{
  const double v = parse_real(text, flag);
  if (!(v >= 1.0) || v != std::floor(v) || v > 0x1.0p62) {
    throw UsageError(flag + ": expected a positive integer, got '" + text + "'");
  }
  return static_cast<Index>(v);
}

std::uint64_t
parse_seed(const std::string& text, const std::string& flag)
{
  std::uint64_t v = 0;
  auto res = std::from_chars(text.data(), text.data() + text.size(), v);
  if (text.empty() || res.ec != std::errc() || res.ptr != text.data() + text.size()) {
    throw UsageError(flag + ": '" + text + "' is not a non-negative integer");
  }
  return v;
}

//! "2..5" or "2,3,4".
std::vector<int>
parse_levels(const std::string& text, const std::string& flag)
{
  std::vector<int> out;
  if (const auto dots = text.find(".."); dots != std::string::npos) {
    const int lo = static_cast<int>(parse_count(text.substr(0, dots), flag));
    const int hi = static_cast<int>(parse_count(text.substr(dots + 2), flag));
    if (hi < lo) {
      throw UsageError(flag + ": empty range '" + text + "'");
    }
    for (int k = lo; k <= hi; ++k) {
      out.push_back(k);
    }
    return out;
  }
  for (const auto& part : split(text, ',')) {
    out.push_back(static_cast<int>(parse_count(part, flag)));
  }
  return out;
}

std::vector<std::uint64_t>
parse_seeds(const std::string& text, const std::string& flag)
{
  std::vector<std::uint64_t> out;
  if (const auto dots = text.find(".."); dots != std::string::npos) {
    const auto lo = parse_seed(text.substr(0, dots), flag);
    const auto hi = parse_seed(text.substr(dots + 2), flag);
    if (hi < lo || hi - lo > 10000) {
      throw UsageError(flag + ": bad range '" + text + "'");
    }
    for (auto s = lo; s <= hi; ++s) {
      out.push_back(s);
    }
    return out;
  }
  for (const auto& part : split(text, ',')) {
    out.push_back(parse_seed(part, flag));
  }
  return out;
}

DistributionSpec
parse_dist(const std::string& text)
{
  try {
    return DistributionSpec::parse(text);
  } catch (const std::invalid_argument& e) {
    throw UsageError(std::string("--dist: ") + e.what());
  }
}

//! Comma list broadcast to `dim` entries.
Eigen::VectorXd
parse_reals(const std::string& text, Index dim, const std::string& flag)
{
  const auto parts = split(text, ',');
  if (parts.size() != 1 && static_cast<Index>(parts.size()) != dim) {
    throw UsageError(flag + ": expected 1 or " + std::to_string(dim) + " values");
  }
  Eigen::VectorXd v(dim);
  for (Index n = 0; n < dim; ++n) {
    v[n] = parse_real(parts.size() == 1 ? parts[0] : parts[static_cast<std::size_t>(n)], flag);
  }
  return v;
}

MultiIndex
parse_counts(const std::string& text, Index dim, const std::string& flag)
{
  const auto parts = split(text, ',');
  if (parts.size() != 1 && static_cast<Index>(parts.size()) != dim) {
    throw UsageError(flag + ": expected 1 or " + std::to_string(dim) + " values");
  }
  MultiIndex v(dim);
  for (Index n = 0; n < dim; ++n) {
    v[n] = parse_count(parts.size() == 1 ? parts[0] : parts[static_cast<std::size_t>(n)], flag);
  }
  return v;
}

//! Bins from either a count list or a target width; the flags are
//! mutually exclusive.
MultiIndex
resolve_bins(const std::string& bins,
             const std::string& delta,
             const Box& domain,
             const std::string& bins_flag,
             const std::string& delta_flag)
{
  const Index dim = domain.lower.size();
  if (!bins.empty()) {
    return parse_counts(bins, dim, bins_flag);
  }
  if (delta.empty()) {
    throw UsageError("one of " + bins_flag + " or " + delta_flag + " is required");
  }
  const Eigen::VectorXd width = parse_reals(delta, dim, delta_flag);
  MultiIndex out(dim);
  for (Index n = 0; n < dim; ++n) {
    if (!(width[n] > 0.0)) {
      throw UsageError(delta_flag + " must be positive");
    }
    out[n] = std::max<Index>(
      1, static_cast<Index>(std::ceil((domain.upper[n] - domain.lower[n]) / width[n] - 1e-9)));
  }
  return out;
}

Grid
make_grid(const Box& box, const MultiIndex& bins)
{
  try {
    return Grid(box.lower, box.upper, bins);
  } catch (const std::invalid_argument& e) {
    throw UsageError(std::string("grid: ") + e.what());
  }
}

double
seconds_since(std::chrono::steady_clock::time_point start)
{
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

// ---- sample ---------------------------------------------------------------

struct SampleArgs
{
  std::string dist;
  std::string m;
  std::string seed = "1";
  std::string out;
  int threads = 1;
};

std::function<int()>
prepare_sample(const SampleArgs& a, std::ostream& out)
{
  const DistributionSpec spec = parse_dist(a.dist);
  const Index m = parse_count(a.m, "--m");
  const std::uint64_t seed = parse_seed(a.seed, "--seed");
  return [=, &out, path = a.out, threads = a.threads] {
    const Eigen::MatrixXd s = sample(spec, m, seed, threads);
    const std::string comment = "dim=" + std::to_string(spec.dim()) +
                                " seed=" + std::to_string(seed) + " m=" + std::to_string(m) +
                                " dist=" + spec.describe();
    io::write_samples_csv(path, s, comment);
    out << "rows: " << m << '\n';
    return 0;
  };
}

// ---- fit ------------------------------------------------------------------

struct FitArgs
{
  std::string samples;
  std::string lower;
  std::string upper;
  std::string bins;
  std::string delta;
  std::string support = "given";
  std::string out;
  int threads = 1;
  bool compensated = false;
};

std::function<int()>
prepare_fit(const FitArgs& a, std::ostream& out)
{
  if (a.support != "given" && a.support != "auto") {
    throw UsageError("--support must be 'given' or 'auto'");
  }
  if (a.support == "given" && (a.lower.empty() || a.upper.empty())) {
    throw UsageError("--lower and --upper are required unless --support auto");
  }
  if (a.support == "auto" && (!a.lower.empty() || !a.upper.empty())) {
    throw UsageError("--support auto conflicts with --lower/--upper");
  }
  if (!a.bins.empty() && !a.delta.empty()) {
    throw UsageError("--bins and --delta are mutually exclusive");
  }
  if (a.bins.empty() && a.delta.empty()) {
    throw UsageError("one of --bins or --delta is required");
  }
  return [=, &out] {
    const Eigen::MatrixXd samples = io::read_samples_csv(a.samples);
    const Index dim = samples.rows();
    Box box;
    if (a.support == "auto") {
      box = estimate_support(samples);
    } else {
      box = Box{ parse_reals(a.lower, dim, "--lower"), parse_reals(a.upper, dim, "--upper") };
    }
    const Grid grid = make_grid(box, resolve_bins(a.bins, a.delta, box, "--bins", "--delta"));
    const auto start = std::chrono::steady_clock::now();
    LinearPdf pdf = [&] {
      try {
        return fit(grid, samples, FitOptions{ a.threads, a.compensated });
      } catch (const SampleOutOfDomain& e) {
        throw Error("sample row " + std::to_string(e.index() + 1) + ": coordinate " +
                    io::format_exact(e.value()) + " on axis " + std::to_string(e.axis()) +
                    " lies outside the grid domain");
      }
    }();
    const double elapsed = seconds_since(start);
    io::write_pdf(a.out, pdf);
    out << "samples: " << pdf.sample_count() << '\n'
        << "bins: " << grid.num_bins() << '\n'
        << "nodes: " << grid.num_nodes() << '\n';
    out << "lower:";
    for (Index n = 0; n < dim; ++n) {
      out << ' ' << io::format_exact(grid.lower()[n]);
    }
    out << "\nupper:";
    for (Index n = 0; n < dim; ++n) {
      out << ' ' << io::format_exact(grid.upper()[n]);
    }
    out << "\nintegral: " << io::format_rounded(integral(pdf), 15) << '\n'
        << "fit_seconds: " << io::format_rounded(elapsed, 4) << '\n';
    return 0;
  };
}

// ---- study ----------------------------------------------------------------

struct StudyArgs
{
  std::string dist;
  std::string mode = "coupled:2";
  std::string k;
  std::string m = "1e7";
  std::string n_delta = "256";
  std::string seeds = "1";
  std::string lower;
  std::string upper;
  std::string support = "distribution";
  double variance_multiplier = 1.0;
  bool holdout = false;
  bool no_timing = false;
  std::string out;
  int threads = 1;
};

std::function<int()>
prepare_study(const StudyArgs& a, std::ostream& out)
{
  StudyConfig cfg{ parse_dist(a.dist) };
  if (a.mode == "fixed_m") {
    cfg.mode = StudyMode::fixed_m;
  } else if (a.mode == "fixed_delta") {
    cfg.mode = StudyMode::fixed_delta;
  } else if (a.mode.rfind("coupled:", 0) == 0) {
    cfg.mode = StudyMode::coupled;
    const Index r = parse_count(a.mode.substr(8), "--mode");
    if (r != 1 && r != 2) {
      throw UnsupportedOrder(static_cast<int>(r));
    }
    cfg.order = static_cast<int>(r);
  } else {
    throw UsageError("--mode must be fixed_m, fixed_delta or coupled:R");
  }
  cfg.levels = parse_levels(a.k, "--k");
  if (!std::is_sorted(cfg.levels.begin(), cfg.levels.end())) {
    throw UsageError("--k levels must be ascending");
  }
  cfg.seeds = parse_seeds(a.seeds, "--seeds");
  cfg.fixed_m = parse_count(a.m, "--m");
  cfg.fixed_n_delta = parse_count(a.n_delta, "--n-delta");
  if (!(a.variance_multiplier > 0.0)) {
    throw UsageError("--variance-multiplier must be positive");
  }
  cfg.variance_multiplier = a.variance_multiplier;
  cfg.holdout = a.holdout;
  cfg.threads = a.threads;
  const bool given = !a.lower.empty() || !a.upper.empty();
  if (a.support == "auto") {
    if (given) {
      throw UsageError("--support auto conflicts with --lower/--upper");
    }
    cfg.domain = DomainMode::estimated;
  } else if (a.support != "distribution") {
    throw UsageError("--support must be 'distribution' or 'auto'");
  } else if (given) {
    if (a.lower.empty() || a.upper.empty()) {
      throw UsageError("--lower and --upper must be given together");
    }
    cfg.domain = DomainMode::given;
    cfg.lower = parse_reals(a.lower, cfg.distribution.dim(), "--lower");
    cfg.upper = parse_reals(a.upper, cfg.distribution.dim(), "--upper");
    for (Index n = 0; n < cfg.distribution.dim(); ++n) {
      if (!(cfg.lower[n] < cfg.upper[n])) {
        throw UsageError("--lower must be below --upper");
      }
    }
  }
  if (cfg.mode == StudyMode::coupled) {
    // surface overflow and order errors before any sampling
    for (int k : cfg.levels) {
      try {
        coupling(CouplingRule{ cfg.order, k, 0.0, 1.0, cfg.variance_multiplier });
      } catch (const std::invalid_argument& e) {
        throw UsageError(std::string("--k: ") + e.what());
      }
    }
  }
  return [cfg, &out, a] {
    const StudyResult result = convergence_study(cfg);
    const fs::path csv = a.out;
    fs::path script = csv;
    script.replace_extension(".gp");
    io::write_study_csv(csv, result, !a.no_timing);
    io::write_plot_script(script, csv, result, a.dist + " " + a.mode);
    for (const auto& row : result.rows) {
      out << "k=" << row.k << " n_delta=" << row.n_delta
          << " delta=" << io::format_rounded(row.delta) << " m=" << row.m
          << " error=" << io::format_rounded(row.error);
      if (!a.no_timing) {
        out << " seconds=" << io::format_rounded(row.seconds, 4);
      }
      out << '\n';
    }
    out << "rate_delta: " << io::format_rounded(result.rate_delta, 6) << '\n'
        << "rate_m: " << io::format_rounded(result.rate_m, 6) << '\n';
    return 0;
  };
}

// ---- compare --------------------------------------------------------------

struct CompareArgs
{
  std::string samples;
  std::string reference_samples;
  std::string reference_m;
  std::string reference_bins;
  std::string reference_delta;
  std::string m;
  std::string bins;
  std::string delta;
  std::string lower;
  std::string upper;
  std::string support = "given";
  std::string estimators = "fe";
  std::string model;
  std::string out;
  int threads = 1;
};

std::vector<SurrogateCandidate>
parse_estimators(const std::string& text)
{
  std::vector<SurrogateCandidate> out;
  if (text.empty()) {
    return out;
  }
  for (const auto& item : split(text, ',')) {
    if (item == "fe") {
      out.push_back({ item, SurrogateCandidate::FiniteElement{} });
    } else if (item == "histogram") {
      out.push_back({ item, SurrogateCandidate::HistogramFit{} });
    } else if (item.rfind("kde:", 0) == 0) {
      const double b = parse_real(item.substr(4), "--estimators");
      if (!(b > 0.0)) {
        throw NonpositiveBandwidth(b);
      }
      out.push_back({ item, SurrogateCandidate::Kde{ b } });
    } else {
      throw UsageError("--estimators: unknown estimator '" + item + "'");
    }
  }
  return out;
}

std::function<int()>
prepare_compare(const CompareArgs& a, std::ostream& out, std::ostream& err)
{
  std::vector<SurrogateCandidate> candidates = parse_estimators(a.estimators);
  if (candidates.empty() && a.model.empty()) {
    throw UsageError("nothing to compare: give --estimators and/or --model");
  }
  if (a.support != "given" && a.support != "auto") {
    throw UsageError("--support must be 'given' or 'auto'");
  }
  if (a.support == "given" && (a.lower.empty() || a.upper.empty())) {
    throw UsageError("--lower and --upper are required unless --support auto");
  }
  if (a.support == "auto" && (!a.lower.empty() || !a.upper.empty())) {
    throw UsageError("--support auto conflicts with --lower/--upper");
  }
  if (!a.bins.empty() && !a.delta.empty()) {
    throw UsageError("--bins and --delta are mutually exclusive");
  }
  if (!a.reference_bins.empty() && !a.reference_delta.empty()) {
    throw UsageError("--reference-bins and --reference-delta are mutually exclusive");
  }
  if (a.reference_bins.empty() && a.reference_delta.empty()) {
    throw UsageError("one of --reference-bins or --reference-delta is required");
  }
  if (!candidates.empty() && a.bins.empty() && a.delta.empty()) {
    throw UsageError("one of --bins or --delta is required");
  }
  const std::optional<Index> coarse_m =
    a.m.empty() ? std::nullopt : std::optional<Index>(parse_count(a.m, "--m"));
  const std::optional<Index> ref_m = a.reference_m.empty()
                                       ? std::nullopt
                                       : std::optional<Index>(parse_count(a.reference_m, "--reference-m"));

  return [=, &out, &err]() mutable {
    const Eigen::MatrixXd all = io::read_samples_csv(a.samples);
    Eigen::MatrixXd ref_all;
    if (!a.reference_samples.empty()) {
      ref_all = io::read_samples_csv(a.reference_samples);
      if (ref_all.rows() != all.rows()) {
        throw Error("reference and sample files differ in dimension");
      }
    }
    const Eigen::MatrixXd& ref_source = a.reference_samples.empty() ? all : ref_all;
    const Index m_hat = ref_m.value_or(ref_source.cols());
    const Index m = coarse_m.value_or(all.cols());
    if (m_hat > ref_source.cols()) {
      throw Error("--reference-m exceeds the " + std::to_string(ref_source.cols()) +
                  " available reference samples");
    }
    if (m > all.cols()) {
      throw Error("--m exceeds the " + std::to_string(all.cols()) + " available samples");
    }
    const auto reference_samples = ref_source.leftCols(m_hat);
    const auto coarse = all.leftCols(m);
    const Index dim = all.rows();

    Box box;
    if (a.support == "auto") {
      box = estimate_support(reference_samples);
    } else {
      box = Box{ parse_reals(a.lower, dim, "--lower"), parse_reals(a.upper, dim, "--upper") };
    }
    const Grid ref_grid = make_grid(
      box, resolve_bins(a.reference_bins, a.reference_delta, box, "--reference-bins", "--reference-delta"));
    const Histogram<double> reference = [&] {
      try {
        return fit_histogram(ref_grid, reference_samples);
      } catch (const SampleOutOfDomain& e) {
        throw Error("reference sample row " + std::to_string(e.index() + 1) +
                    " lies outside the domain");
      }
    }();

    std::optional<LinearPdf> model;
    if (!a.model.empty()) {
      model = io::read_pdf(a.model);
      candidates.push_back({ "model", SurrogateCandidate::Model{ &*model } });
    }
    std::vector<SurrogateRow> rows;
    if (!candidates.empty()) {
      const Grid grid = (a.bins.empty() && a.delta.empty())
                          ? model->grid()
                          : make_grid(box, resolve_bins(a.bins, a.delta, box, "--bins", "--delta"));
      if (const auto warn = surrogate_resolution_warning(reference, m, grid.width().maxCoeff())) {
        err << "warning: " << *warn << '\n';
      }
      try {
        rows = compare_to_histogram(reference, coarse, grid, candidates, a.threads);
      } catch (const SampleOutOfDomain& e) {
        throw Error("sample row " + std::to_string(e.index() + 1) + ": coordinate " +
                    io::format_exact(e.value()) + " on axis " + std::to_string(e.axis()) +
                    " lies outside the domain");
      }
    }
    io::write_comparison_csv(a.out, rows);
    for (const auto& row : rows) {
      out << row.estimator << " m=" << row.m << " delta=" << io::format_rounded(row.delta)
          << " rmse=" << io::format_rounded(row.rmse) << '\n';
    }
    return 0;
  };
}

} // namespace

int
run(int argc, const char* const* argv, std::ostream& out, std::ostream& err)
{
  CLI::App app{ "Piecewise-linear finite-element density estimation", "fedens" };
  app.require_subcommand(1);

  SampleArgs sample_args;
  auto* sample_cmd = app.add_subcommand("sample", "Draw seeded samples from a known distribution");
  sample_cmd->add_option("--dist", sample_args.dist, dist_help)->required();
  sample_cmd->add_option("--m", sample_args.m, "Number of samples (1e6 notation allowed)")->required();
  sample_cmd->add_option("--seed", sample_args.seed, "64-bit seed")->capture_default_str();
  sample_cmd->add_option("--out", sample_args.out, "Output CSV")->required();
  sample_cmd->add_option("--threads", sample_args.threads, "Worker threads")
    ->check(CLI::PositiveNumber);

  FitArgs fit_args;
  auto* fit_cmd = app.add_subcommand("fit", "Fit the piecewise-linear estimator to a sample CSV");
  fit_cmd->add_option("--samples", fit_args.samples, "Sample CSV")->required();
  fit_cmd->add_option("--lower", fit_args.lower, "Domain lower bounds (comma list or one value)");
  fit_cmd->add_option("--upper", fit_args.upper, "Domain upper bounds");
  fit_cmd->add_option("--bins", fit_args.bins, "Bins per axis (comma list or one value)");
  fit_cmd->add_option("--delta", fit_args.delta, "Target bin width; bins = ceil(width / delta)");
  fit_cmd->add_option("--support", fit_args.support,
                      "'given' uses --lower/--upper, 'auto' uses the sample extremes")
    ->capture_default_str();
  fit_cmd->add_option("--out", fit_args.out, "Output CSV (a .json sidecar is written beside it)")
    ->required();
  fit_cmd->add_option("--threads", fit_args.threads, "Worker threads")->check(CLI::PositiveNumber);
  fit_cmd->add_flag("--compensated", fit_args.compensated, "Kahan-compensated accumulation");

  StudyArgs study_args;
  auto* study_cmd = app.add_subcommand("study", "Run a convergence study against a known distribution");
  study_cmd->add_option("--dist", study_args.dist, dist_help)->required();
  study_cmd->add_option("--mode", study_args.mode, "fixed_m | fixed_delta | coupled:R (R = 1 or 2)")
    ->capture_default_str();
  study_cmd->add_option("--k", study_args.k, "Levels, e.g. 2..5 or 3,4,5")->required();
  study_cmd->add_option("--m", study_args.m, "Sample count for fixed_m")->capture_default_str();
  study_cmd->add_option("--n-delta", study_args.n_delta, "Bins per axis for fixed_delta")
    ->capture_default_str();
  study_cmd->add_option("--seeds", study_args.seeds, "Seeds to average over, e.g. 1..5 or 3,9")
    ->capture_default_str();
  study_cmd->add_option("--lower", study_args.lower, "Fitting domain lower bounds");
  study_cmd->add_option("--upper", study_args.upper, "Fitting domain upper bounds");
  study_cmd->add_option("--support", study_args.support,
                        "'distribution' (default) or 'auto' for per-level sample extremes")
    ->capture_default_str();
  study_cmd->add_option("--variance-multiplier", study_args.variance_multiplier,
                        "Scales M in coupled mode")
    ->capture_default_str();
  study_cmd->add_flag("--holdout", study_args.holdout, "Measure errors on independent draws");
  study_cmd->add_flag("--no-timing", study_args.no_timing, "Write 0 in the seconds column");
  study_cmd->add_option("--out", study_args.out, "Output CSV (a .gp plot script is written beside it)")
    ->required();
  study_cmd->add_option("--threads", study_args.threads, "Worker threads")->check(CLI::PositiveNumber);

  CompareArgs cmp_args;
  auto* cmp_cmd = app.add_subcommand("compare", "Compare estimators against a fine histogram surrogate");
  cmp_cmd->add_option("--samples", cmp_args.samples, "Sample CSV; its first --m rows are fitted")
    ->required();
  cmp_cmd->add_option("--reference-samples", cmp_args.reference_samples,
                      "Separate CSV for the reference histogram (default: --samples)");
  cmp_cmd->add_option("--reference-m", cmp_args.reference_m, "Reference sample count (prefix)");
  cmp_cmd->add_option("--reference-bins", cmp_args.reference_bins, "Reference bins per axis");
  cmp_cmd->add_option("--reference-delta", cmp_args.reference_delta, "Reference bin width");
  cmp_cmd->add_option("--m", cmp_args.m, "Coarse sample count (prefix)");
  cmp_cmd->add_option("--bins", cmp_args.bins, "Coarse bins per axis");
  cmp_cmd->add_option("--delta", cmp_args.delta, "Coarse bin width");
  cmp_cmd->add_option("--lower", cmp_args.lower, "Domain lower bounds");
  cmp_cmd->add_option("--upper", cmp_args.upper, "Domain upper bounds");
  cmp_cmd->add_option("--support", cmp_args.support,
                      "'given' uses --lower/--upper, 'auto' the reference sample extremes")
    ->capture_default_str();
  cmp_cmd->add_option("--estimators", cmp_args.estimators,
                      "Comma list of fe | histogram | kde:BANDWIDTH (gaussian kernel)")
    ->capture_default_str();
  cmp_cmd->add_option("--model", cmp_args.model, "Also compare a model written by 'fit'");
  cmp_cmd->add_option("--out", cmp_args.out, "Output CSV")->required();
  cmp_cmd->add_option("--threads", cmp_args.threads, "Worker threads")->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  }

  std::function<int()> action;
  try {
    if (*sample_cmd) {
      action = prepare_sample(sample_args, out);
    } else if (*fit_cmd) {
      action = prepare_fit(fit_args, out);
    } else if (*study_cmd) {
      action = prepare_study(study_args, out);
    } else {
      action = prepare_compare(cmp_args, out, err);
    }
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const UnsupportedOrder& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const NonpositiveBandwidth& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  }

  try {
    return action();
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
}

} // namespace fedens::cli
