#pragma once

#include "fedens/analysis.hpp"
#include "fedens/baselines.hpp"
#include "fedens/estimator.hpp"

#include <Eigen/Core>

#include <filesystem>
#include <fstream>
#include <string>
#include <string_view>
#include <vector>

namespace fedens::io {

//! 17 significant digits (%.17g); parses back to the same double.
std::string format_exact(double v);

//! v rounded to `digits` significant digits (%.{digits}g).
std::string format_rounded(double v, int digits = 12);

//! Writes to "<path>.tmp" and renames onto `path` on commit(). An
//! uncommitted file is removed on destruction.
class AtomicFile
{
public:
  explicit AtomicFile(std::filesystem::path path);
  ~AtomicFile();
  AtomicFile(const AtomicFile&) = delete;
  AtomicFile& operator=(const AtomicFile&) = delete;

  std::ostream& stream() { return out_; }
  void commit();

private:
  std::filesystem::path path_;
  std::filesystem::path tmp_;
  std::ofstream out_;
  bool committed_ = false;
};

//! One row per sample, one column per axis, no header. `comment`, when
//! non-empty, is written first as a '#' line.
void write_samples_csv(const std::filesystem::path& path,
                       const Eigen::Ref<const Eigen::MatrixXd>& samples,
                       std::string_view comment = {});

//! Reads a sample CSV (one column per sample in the result). Blank lines
//! and lines starting with '#' are skipped. Throws ParseError with the
//! 1-based line number.
Eigen::MatrixXd read_samples_csv(const std::filesystem::path& path);

//! The JSON sidecar that accompanies a fitted-pdf CSV.
std::filesystem::path sidecar_path(const std::filesystem::path& csv_path);

//! CSV "index,y0,..,y{d-1},coefficient" with one row per node plus the
//! JSON sidecar {lower, upper, n_delta, sample_count}.
void write_pdf(const std::filesystem::path& csv_path, const LinearPdf& pdf);
LinearPdf read_pdf(const std::filesystem::path& csv_path);

//! CSV "index,y0,..,y{d-1},value" with the lower corner of each bin.
void write_histogram(const std::filesystem::path& csv_path, const Histogram<double>& h);

//! CSV "k,n_delta,delta,m,error,seconds" with values rounded to 12
//! significant digits. With include_timing false the seconds column is 0.
void write_study_csv(const std::filesystem::path& path,
                     const StudyResult& result,
                     bool include_timing = true);

//! gnuplot script drawing log-log error-vs-delta and error-vs-M plots from
//! a study CSV.
void write_plot_script(const std::filesystem::path& path,
                       const std::filesystem::path& csv_path,
                       const StudyResult& result,
                       std::string_view title);

//! CSV "estimator,m,delta,rmse" with 12-digit values.
void write_comparison_csv(const std::filesystem::path& path, const std::vector<SurrogateRow>& rows);

} // namespace fedens::io
