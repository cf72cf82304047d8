// Acceptance suite: one PASS/FAIL line per criterion.
//   fedens-acceptance            run all
//   fedens-acceptance 4 5        run a subset
#include "cli.hpp"
#include "synthetic_qoi.hpp"

#include "fedens/analysis.hpp"
#include "fedens/baselines.hpp"
#include "fedens/estimator.hpp"
#include "fedens/io.hpp"
#include "fedens/sampling.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

using namespace fedens;
namespace fs = std::filesystem;

namespace {

struct Outcome
{
  bool pass = true;
  std::string detail;

  void check(bool ok, const std::string& what)
  {
    if (!ok) {
      pass = false;
    }
    if (!detail.empty()) {
      detail += "; ";
    }
    detail += (ok ? "" : "FAILED ") + what;
  }
};

std::string
fmt(double v, int digits = 4)
{
  return io::format_rounded(v, digits);
}

double
seconds_since(std::chrono::steady_clock::time_point t0)
{
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string
slopes(const StudyResult& r, bool by_delta)
{
  std::string s = "local slopes";
  for (std::size_t i = 1; i < r.rows.size(); ++i) {
    const auto& a = r.rows[i - 1];
    const auto& b = r.rows[i];
    const double x = by_delta ? std::log(a.delta / b.delta) : std::log(double(a.m) / double(b.m));
    s += ' ' + fmt(std::log(a.error / b.error) / x, 3);
  }
  return s;
}

std::vector<std::uint64_t>
five_seeds()
{
  return { 1, 2, 3, 4, 5 };
}

Eigen::MatrixXd
uniform_in(const Grid& g, Index m, std::mt19937_64& gen)
{
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Eigen::MatrixXd s(g.dim(), m);
  for (Index i = 0; i < m; ++i) {
    for (Index n = 0; n < g.dim(); ++n) {
      s(n, i) = g.lower()[n] + u(gen) * (g.upper()[n] - g.lower()[n]);
    }
  }
  return s;
}

int
cli(std::vector<std::string> args, std::string* out = nullptr)
{
  args.insert(args.begin(), "fedens");
  std::vector<const char*> argv;
  for (const auto& a : args) {
    argv.push_back(a.c_str());
  }
  std::ostringstream o, e;
  const int code = cli::run(static_cast<int>(argv.size()), argv.data(), o, e);
  if (out) {
    *out = o.str();
  }
  if (code != 0) {
    std::cerr << e.str();
  }
  return code;
}

std::string
slurp(const fs::path& p)
{
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

fs::path
scratch()
{
  const fs::path dir = fs::temp_directory_path() / "fedens_acceptance";
  fs::create_directories(dir);
  return dir;
}

// ---------------------------------------------------------------------------

Outcome
unit_integral()
{
  Outcome o;
  std::mt19937_64 gen(2024);
  std::normal_distribution<double> z(0.0, 1.0);
  double worst = 0.0;
  bool nonneg = true;
  for (int t = 0; t < 100; ++t) {
    const Index d = 1 + t % 3;
    MultiIndex n(d);
    Eigen::VectorXd lo(d), hi(d);
    for (Index a = 0; a < d; ++a) {
      n[a] = 1 + static_cast<Index>(gen() % 32);
      lo[a] = -5.0 + 4.0 * std::uniform_real_distribution<double>(0, 1)(gen);
      hi[a] = lo[a] + 0.1 + 8.0 * std::uniform_real_distribution<double>(0, 1)(gen);
    }
    const Grid g(lo, hi, n);
    const Index m = 1 + static_cast<Index>(gen() % 100000);
    Eigen::MatrixXd s(d, m);
    for (Index i = 0; i < m; ++i) {
      for (Index a = 0; a < d; ++a) {
        const double mid = 0.5 * (lo[a] + hi[a]);
        s(a, i) = std::clamp(mid + 0.3 * (hi[a] - lo[a]) * z(gen), lo[a], hi[a]);
      }
    }
    const LinearPdf pdf = fit(g, s, FitOptions{ 1 + t % 4 });
    worst = std::max(worst, std::abs(integral(pdf) - 1.0));
    nonneg = nonneg && pdf.coefficients().minCoeff() >= 0.0;
  }
  o.check(worst <= 1e-10, "max |integral - 1| = " + fmt(worst, 3));
  o.check(nonneg, "all coefficients >= 0");
  return o;
}

Outcome
brute_force_fit()
{
  Outcome o;
  std::mt19937_64 gen(77);
  double worst = 0.0;
  for (int t = 0; t < 50; ++t) {
    const Index d = 1 + t % 3;
    const Index max_per_axis = d == 1 ? 124 : (d == 2 ? 10 : 4);
    MultiIndex n(d);
    Eigen::VectorXd lo(d), hi(d);
    for (Index a = 0; a < d; ++a) {
      n[a] = 1 + static_cast<Index>(gen() % static_cast<std::uint64_t>(max_per_axis));
      lo[a] = -1.0 - static_cast<double>(gen() % 3);
      hi[a] = lo[a] + 1.0 + static_cast<double>(gen() % 3);
    }
    const Grid g(lo, hi, n);
    const Eigen::MatrixXd s = uniform_in(g, 1 + static_cast<Index>(gen() % 100), gen);
    const Eigen::VectorXd got = fit(g, s).coefficients();
    for (Index j = 0; j < g.num_nodes(); ++j) {
      const MultiIndex node = g.node_multi(j);
      double acc = 0.0;
      for (Index m = 0; m < s.cols(); ++m) {
        double w = 1.0;
        for (Index a = 0; a < d; ++a) {
          w *= std::max(0.0, 1.0 - std::abs(s(a, m) - g.node_coordinate(a, node[a])) / g.width()[a]);
        }
        acc += w;
      }
      double c = 1.0;
      for (Index a = 0; a < d; ++a) {
        c *= (node[a] == 0 || node[a] == n[a]) ? g.width()[a] / 2 : g.width()[a];
      }
      worst = std::max(worst, std::abs(got[j] - acc / (double(s.cols()) * c)));
    }
  }
  o.check(worst <= 1e-12, "max |fit - oracle| = " + fmt(worst, 3));
  return o;
}

Outcome
kde_identity()
{
  Outcome o;
  std::mt19937_64 gen(5);
  double worst = 0.0;
  for (int t = 0; t < 20; ++t) {
    const Index d = 1 + t % 2;
    const Grid g = Grid::cube(d, -3.0, 3.0, 4 + static_cast<Index>(gen() % (d == 1 ? 40 : 16)));
    const double delta = g.width()[0];
    std::uniform_real_distribution<double> u(-3.0 + delta, 3.0 - delta);
    Eigen::MatrixXd s(d, 200 + static_cast<Index>(gen() % 800));
    for (Index i = 0; i < s.cols(); ++i) {
      for (Index a = 0; a < d; ++a) {
        s(a, i) = u(gen);
      }
    }
    const LinearPdf pdf = fit(g, s);
    const KdeSpec<double> kde(Kernel::triangular, delta, s);
    for (Index j = 0; j < g.num_nodes(); ++j) {
      const MultiIndex node = g.node_multi(j);
      if ((node.array() == 0).any() || (node.array() == g.n_delta().array()).any()) {
        continue;
      }
      worst = std::max(worst, std::abs(pdf.coefficients()[j] - eval_kde(kde, node_coords(g, node))));
    }
  }
  o.check(worst <= 1e-12, "max |F_j - KDE| = " + fmt(worst, 3));
  return o;
}

StudyResult
gaussian_fixed_m()
{
  StudyConfig cfg{ DistributionSpec::parse("tgauss1d") };
  cfg.mode = StudyMode::fixed_m;
  cfg.fixed_m = 1'000'000;
  cfg.levels = { 3, 4, 5, 6 };
  cfg.seeds = five_seeds();
  return convergence_study(cfg);
}

Outcome
delta_rate()
{
  Outcome o;
  const StudyResult r = gaussian_fixed_m();
  o.check(r.rate_delta >= 1.6 && r.rate_delta <= 2.4,
          "delta-rate " + fmt(r.rate_delta) + " in [1.6, 2.4] (" + slopes(r, true) + ")");
  return o;
}

Outcome
m_rate()
{
  Outcome o;
  StudyConfig cfg{ DistributionSpec::parse("tgauss1d") };
  cfg.mode = StudyMode::fixed_delta;
  cfg.fixed_n_delta = 128;
  cfg.levels = { 3, 4, 5, 6 };
  cfg.seeds = five_seeds();
  const StudyResult r = convergence_study(cfg);
  const double mag = std::abs(r.rate_m);
  o.check(mag >= 0.35 && mag <= 0.65, "|M-rate| " + fmt(mag) + " in [0.35, 0.65]");
  return o;
}

Outcome
coupled_dimension_independence()
{
  Outcome o;
  std::vector<StudyResult> by_dim;
  for (const char* dist : { "tgauss1d", "tgauss2d" }) {
    StudyConfig cfg{ DistributionSpec::parse(dist) };
    cfg.order = 2;
    cfg.levels = { 2, 3, 4, 5 };
    cfg.seeds = five_seeds();
    by_dim.push_back(convergence_study(cfg));
    const StudyResult& r = by_dim.back();
    o.check(r.rate_delta >= 1.6 && r.rate_delta <= 2.4,
            std::string(dist) + " delta-rate " + fmt(r.rate_delta) + " in [1.6, 2.4] (" + slopes(r, true) + ")");
  }
  double worst = 1.0;
  for (std::size_t i = 0; i < by_dim[0].rows.size(); ++i) {
    const double a = by_dim[0].rows[i].error;
    const double b = by_dim[1].rows[i].error;
    worst = std::max(worst, std::max(a / b, b / a));
  }
  o.check(worst < 3.0, "max 1D/2D error ratio " + fmt(worst) + " < 3");
  return o;
}

Outcome
coupling_table()
{
  Outcome o;
  const Index n[] = { 4, 8, 16, 32 };
  const double d[] = { 2.75, 1.375, 0.6875, 0.34375 };
  const Index m[] = { 256, 4096, 65536, 1048576 };
  bool exact = true;
  for (int k = 2; k <= 5; ++k) {
    const Coupling c = coupling(CouplingRule{ 2, k, -5.5, 5.5 });
    exact = exact && c.n_delta == n[k - 2] && c.delta == d[k - 2] && c.m == m[k - 2];
  }
  o.check(exact, "N_delta, delta, M exact for k=2..5");
  return o;
}

Outcome
unknown_support()
{
  Outcome o;
  StudyConfig wide{ DistributionSpec::parse("uniform1d") };
  wide.levels = { 2, 3, 4, 5 };
  wide.seeds = five_seeds();
  wide.domain = DomainMode::given;
  wide.lower = Eigen::VectorXd::Constant(1, -1.5);
  wide.upper = Eigen::VectorXd::Constant(1, 1.5);
  const StudyResult a = convergence_study(wide);
  o.check(a.rate_delta < 1.0, "(a) rate on [-1.5,1.5] " + fmt(a.rate_delta) + " < 1");

  StudyConfig est = wide;
  est.domain = DomainMode::estimated;
  const StudyResult b = convergence_study(est);
  bool smaller = true;
  for (std::size_t level : { 2u, 3u }) {
    for (std::size_t s = 0; s < est.seeds.size(); ++s) {
      smaller = smaller && b.rows[level].seed_errors[s] < a.rows[level].seed_errors[s];
    }
  }
  o.check(smaller, "(b) estimated-support error smaller at k=4,5 for every seed");

  double gap = 0.0;
  for (const Box& box : b.rows[3].seed_domains) {
    gap = std::max({ gap, std::abs(box.lower[0] + 1.0), std::abs(box.upper[0] - 1.0) });
  }
  o.check(gap < 1e-4, "(c) max support gap at k=5 " + fmt(gap, 3) + " < 1e-4");
  return o;
}

Outcome
nonsmooth()
{
  Outcome o;
  StudyConfig cfg{ DistributionSpec::parse("laplace1d") };
  cfg.mode = StudyMode::fixed_m;
  cfg.fixed_m = 1'000'000;
  cfg.levels = { 3, 4, 5, 6 };
  cfg.seeds = five_seeds();
  const StudyResult lap = convergence_study(cfg);
  const StudyResult gauss = gaussian_fixed_m();
  o.check(lap.rate_delta < 1.6, "Laplace delta-rate " + fmt(lap.rate_delta) + " < 1.6");
  o.check(lap.rate_delta < gauss.rate_delta, "below Gaussian " + fmt(gauss.rate_delta));

  cfg.mode = StudyMode::fixed_delta;
  cfg.fixed_n_delta = 128;
  const StudyResult m = convergence_study(cfg);
  const double mag = std::abs(m.rate_m);
  o.check(mag >= 0.35 && mag <= 0.65, "|M-rate| " + fmt(mag) + " in [0.35, 0.65]");
  return o;
}

Outcome
bivariate_mixed()
{
  Outcome o;
  StudyConfig cfg{ DistributionSpec::parse("mixed2d") };
  cfg.levels = { 2, 3, 4, 5 };
  cfg.seeds = five_seeds();
  const StudyResult r = convergence_study(cfg);
  o.check(r.rate_delta >= 1.6 && r.rate_delta <= 2.4,
          "delta-rate " + fmt(r.rate_delta) + " in [1.6, 2.4] (" + slopes(r, true) + ")");
  return o;
}

Outcome
linear_scaling()
{
  Outcome o;
  const auto spec = DistributionSpec::parse("tgauss1d");
  const Eigen::MatrixXd s = sample(spec, 4'000'000, 1);
  const Grid g = Grid::cube(1, -5.5, 5.5, 256);
  auto best = [&](Index m) {
    double t = 1e300;
    for (int rep = 0; rep < 3; ++rep) {
      const auto t0 = std::chrono::steady_clock::now();
      const LinearPdf pdf = fit(g, s.leftCols(m));
      t = std::min(t, seconds_since(t0));
      if (pdf.sample_count() != m) {
        std::abort();
      }
    }
    return t;
  };
  const double t1 = best(1'000'000);
  const double t4 = best(4'000'000);
  const double ratio = t4 / t1;
  o.check(ratio >= 2.5 && ratio <= 6.0,
          "time(4e6)/time(1e6) = " + fmt(t4, 3) + "/" + fmt(t1, 3) + " = " + fmt(ratio, 3) + " in [2.5, 6]");
  return o;
}

Outcome
histogram_surrogate()
{
  Outcome o;
  // Generated on first use; the same file fedens-qoi writes.
  const fs::path csv = fs::path(FEDENS_DATA_DIR) / "qoi.csv";
  const Index m_hat = Index(1) << 24;
  if (!fs::exists(csv)) {
    fs::create_directories(csv.parent_path());
    io::write_samples_csv(csv, qoi::samples(m_hat, 1), "qoi seed=1 m=16777216");
  }
  const fs::path dir = scratch();
  const std::string lo = io::format_exact(qoi::domain_lower);
  const std::string hi = io::format_exact(qoi::domain_upper);
  double prev = 0.0;
  int step = 0;
  for (const auto& [m, delta] : { std::pair{ "65536", "0.5" }, std::pair{ "1048576", "0.25" } }) {
    const fs::path out = dir / ("trial_" + std::to_string(step) + ".csv");
    const int code = cli({ "compare", "--samples", csv.string(), "--reference-m", "16777216",
                           "--reference-delta", "0.125", "--m", m, "--delta", delta, "--lower", lo,
                           "--upper", hi, "--estimators", "fe", "--out", out.string() });
    if (code != 0) {
      o.check(false, "compare exited with " + std::to_string(code));
      return o;
    }
    std::istringstream rows(slurp(out));
    std::string header, line;
    std::getline(rows, header);
    std::getline(rows, line);
    const double rmse = std::stod(line.substr(line.rfind(',') + 1));
    if (step == 0) {
      o.check(rmse > 0.0, "RMSE(M=16^4, delta=0.5) = " + fmt(rmse));
    } else {
      o.check(rmse < prev, "RMSE(M=16^5, delta=0.25) = " + fmt(rmse) + " < previous");
    }
    prev = rmse;
    ++step;
  }
  return o;
}

Outcome
determinism()
{
  Outcome o;
  const fs::path dir = scratch();
  auto p = [&](const std::string& name) { return (dir / name).string(); };
  bool ok = true;
  for (int rep = 0; rep < 2; ++rep) {
    const std::string tag = std::to_string(rep);
    ok = ok && cli({ "sample", "--dist", "mixed2d", "--m", "1e5", "--seed", "9", "--threads", "3", "--out", p("s" + tag + ".csv") }) == 0;
    ok = ok && cli({ "fit", "--samples", p("s0.csv"), "--lower", "-5.5", "--upper", "5.5", "--bins", "20",
                     "--threads", "2", "--out", p("f" + tag + ".csv") }) == 0;
    ok = ok && cli({ "study", "--dist", "tgauss2d", "--mode", "coupled:2", "--k", "2..4", "--seeds", "1..3",
                     "--threads", std::to_string(2 + rep), "--no-timing", "--out", p("st" + tag + ".csv") }) == 0;
    ok = ok && cli({ "compare", "--samples", p("s0.csv"), "--reference-bins", "88", "--m", "1e4", "--bins", "22",
                     "--lower", "-5.5", "--upper", "5.5", "--estimators", "fe,histogram,kde:0.4",
                     "--threads", "2", "--out", p("c" + tag + ".csv") }) == 0;
  }
  o.check(ok, "all invocations succeeded");
  for (const char* stem : { "s", "f", "st", "c" }) {
    const std::string a = slurp(p(std::string(stem) + "0.csv"));
    const std::string b = slurp(p(std::string(stem) + "1.csv"));
    o.check(!a.empty() && a == b, std::string(stem) + "*.csv byte-identical");
  }
  o.check(slurp(p("f0.json")) == slurp(p("f1.json")), "fit sidecar byte-identical");
  return o;
}

struct Criterion
{
  int id;
  const char* name;
  double budget_seconds;
  std::function<Outcome()> run;
};

} // namespace

int
main(int argc, char** argv)
{
  const std::vector<Criterion> all = {
    { 1, "unit integral and non-negativity", 60, unit_integral },
    { 2, "fit matches all-nodes oracle", 10, brute_force_fit },
    { 3, "interior nodes equal triangular KDE", 30, kde_identity },
    { 4, "delta-rate, smooth pdf", 300, delta_rate },
    { 5, "M-rate, smooth pdf", 300, m_rate },
    { 6, "coupled rule, dimension independence", 600, coupled_dimension_independence },
    { 7, "coupling table", 1, coupling_table },
    { 8, "unknown support", 300, unknown_support },
    { 9, "non-smooth pdf", 300, nonsmooth },
    { 10, "bivariate mixed pdf", 600, bivariate_mixed },
    { 11, "linear scaling in M", 300, linear_scaling },
    { 12, "histogram surrogate", 300, histogram_surrogate },
    { 13, "determinism", 60, determinism },
  };
  std::vector<int> wanted;
  for (int i = 1; i < argc; ++i) {
    wanted.push_back(std::atoi(argv[i]));
  }
  int failures = 0;
  for (const auto& c : all) {
    if (!wanted.empty() && std::find(wanted.begin(), wanted.end(), c.id) == wanted.end()) {
      continue;
    }
    const auto t0 = std::chrono::steady_clock::now();
    Outcome out;
    try {
      out = c.run();
    } catch (const std::exception& e) {
      out.check(false, std::string("exception: ") + e.what());
    }
    const double took = seconds_since(t0);
    out.check(took < c.budget_seconds, "runtime " + fmt(took, 3) + " s < " + fmt(c.budget_seconds) + " s");
    std::cout << (out.pass ? "PASS" : "FAIL") << "  " << c.id << ". " << c.name << ": " << out.detail
              << std::endl;
    failures += out.pass ? 0 : 1;
  }
  return failures == 0 ? 0 : 1;
}
