// Writes the synthetic scalar output-of-interest samples used by the
// surrogate comparison: fedens-qoi --m 16777216 --seed 1 --out qoi.csv
#include "synthetic_qoi.hpp"

#include "fedens/io.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <iostream>
#include <string>

int
main(int argc, char** argv)
{
  CLI::App app{ "Synthetic output-of-interest samples", "fedens-qoi" };
  double m = 0;
  std::uint64_t seed = 1;
  std::string out;
  int threads = 1;
  app.add_option("--m", m, "Sample count")->required();
  app.add_option("--seed", seed, "Seed")->capture_default_str();
  app.add_option("--out", out, "Output CSV")->required();
  app.add_option("--threads", threads, "Worker threads")->check(CLI::PositiveNumber);
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }
  if (!(m >= 1) || m != std::floor(m)) {
    std::cerr << "error: --m must be a positive integer\n";
    return 2;
  }
  try {
    const auto y = fedens::qoi::samples(static_cast<Eigen::Index>(m), seed, threads);
    fedens::io::write_samples_csv(out, y,
                                  "qoi seed=" + std::to_string(seed) +
                                    " m=" + std::to_string(static_cast<long long>(m)));
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
