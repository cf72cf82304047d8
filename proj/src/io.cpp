#include "fedens/io.hpp"

#include "fedens/errors.hpp"

#include <json.hpp>

#include <charconv>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <stdexcept>
#include <system_error>

namespace fedens::io {

namespace fs = std::filesystem;

namespace {

void
append_general(std::string& out, double v, int digits)
{
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, digits);
  out.append(buf, res.ptr);
}

std::string
read_file(const fs::path& path)
{
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error("cannot open '" + path.string() + "' for reading");
  }
  std::ostringstream ss;
  ss << in.rdbuf();
  return std::move(ss).str();
}

// Splits `text` on newlines; calls f(line_number, line) with the '\r'
// stripped.
template<typename F>
void
for_each_line(std::string_view text, F&& f)
{
  std::int64_t line_no = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t nl = text.find('\n', pos);
    if (nl == std::string_view::npos) {
      nl = text.size();
    }
    std::string_view line = text.substr(pos, nl - pos);
    if (!line.empty() && line.back() == '\r') {
      line.remove_suffix(1);
    }
    f(++line_no, line);
    pos = nl + 1;
  }
}

bool
skippable(std::string_view line)
{
  const auto first = line.find_first_not_of(" \t");
  return first == std::string_view::npos || line[first] == '#';
}

// Parses comma-separated doubles; surrounding blanks are ignored.
std::vector<double>
parse_row(std::string_view line, std::int64_t line_no)
{
  std::vector<double> out;
  std::size_t pos = 0;
  while (true) {
    std::size_t comma = line.find(',', pos);
    if (comma == std::string_view::npos) {
      comma = line.size();
    }
    std::string_view field = line.substr(pos, comma - pos);
    const auto b = field.find_first_not_of(" \t");
    const auto e = field.find_last_not_of(" \t");
    field = b == std::string_view::npos ? std::string_view{} : field.substr(b, e - b + 1);
    double v = 0.0;
    auto res = std::from_chars(field.data(), field.data() + field.size(), v);
    if (field.empty() || res.ec != std::errc() || res.ptr != field.data() + field.size()) {
      throw ParseError(line_no, "cannot parse number '" + std::string(field) + "'");
    }
    if (!std::isfinite(v)) {
      throw ParseError(line_no, "non-finite value '" + std::string(field) + "'");
    }
    out.push_back(v);
    if (comma == line.size()) {
      break;
    }
    pos = comma + 1;
  }
  return out;
}

std::string
axis_header(Index dim)
{
  std::string h = "index";
  for (Index n = 0; n < dim; ++n) {
    h += ",y" + std::to_string(n);
  }
  return h;
}

} // namespace

std::string
format_exact(double v)
{
  std::string s;
  append_general(s, v, 17);
  return s;
}

std::string
format_rounded(double v, int digits)
{
  std::string s;
  append_general(s, v, digits);
  return s;
}

AtomicFile::AtomicFile(fs::path path)
  : path_(std::move(path))
  , tmp_(path_.string() + ".tmp")
  , out_(tmp_, std::ios::binary | std::ios::trunc)
{
  if (!out_) {
    throw Error("cannot open '" + tmp_.string() + "' for writing");
  }
}

AtomicFile::~AtomicFile()
{
  if (!committed_) {
    out_.close();
    std::error_code ec;
    fs::remove(tmp_, ec);
  }
}

void
AtomicFile::commit()
{
  out_.flush();
  out_.close();
  if (!out_) {
    throw Error("write to '" + tmp_.string() + "' failed");
  }
  std::error_code ec;
  fs::rename(tmp_, path_, ec);
  if (ec) {
    throw Error("cannot rename '" + tmp_.string() + "' to '" + path_.string() +
                "': " + ec.message());
  }
  committed_ = true;
}

void
write_samples_csv(const fs::path& path,
                  const Eigen::Ref<const Eigen::MatrixXd>& samples,
                  std::string_view comment)
{
  AtomicFile file(path);
  auto& out = file.stream();
  if (!comment.empty()) {
    out << "# " << comment << '\n';
  }
  std::string buf;
  for (Index i = 0; i < samples.cols(); ++i) {
    for (Index n = 0; n < samples.rows(); ++n) {
      if (n > 0) {
        buf += ',';
      }
      append_general(buf, samples(n, i), 17);
    }
    buf += '\n';
    if (buf.size() > (1u << 20)) {
      out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
      buf.clear();
    }
  }
  out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
  file.commit();
}

Eigen::MatrixXd
read_samples_csv(const fs::path& path)
{
  const std::string text = read_file(path);
  std::vector<double> values;
  Index dim = -1;
  Index count = 0;
  for_each_line(text, [&](std::int64_t line_no, std::string_view line) {
    if (skippable(line)) {
      return;
    }
    std::vector<double> row = parse_row(line, line_no);
    if (dim < 0) {
      dim = static_cast<Index>(row.size());
      if (dim > max_dim) {
        throw ParseError(line_no, "too many columns");
      }
    } else if (static_cast<Index>(row.size()) != dim) {
      throw ParseError(line_no, "expected " + std::to_string(dim) + " columns, found " +
                                  std::to_string(row.size()));
    }
    values.insert(values.end(), row.begin(), row.end());
    ++count;
  });
  if (count == 0) {
    throw EmptySampleSet();
  }
  return Eigen::Map<const Eigen::MatrixXd>(values.data(), dim, count);
}

fs::path
sidecar_path(const fs::path& csv_path)
{
  fs::path p = csv_path;
  p.replace_extension(".json");
  if (p == csv_path) {
    p = csv_path.string() + ".json";
  }
  return p;
}

void
write_pdf(const fs::path& csv_path, const LinearPdf& pdf)
{
  const Grid& grid = pdf.grid();
  {
    AtomicFile file(csv_path);
    auto& out = file.stream();
    out << axis_header(grid.dim()) << ",coefficient\n";
    std::string buf;
    for (Index j = 0; j < grid.num_nodes(); ++j) {
      buf = std::to_string(j);
      const MultiIndex node = grid.node_multi(j);
      for (Index n = 0; n < grid.dim(); ++n) {
        buf += ',';
        append_general(buf, grid.node_coordinate(n, node[n]), 17);
      }
      buf += ',';
      append_general(buf, pdf.coefficients()[j], 17);
      buf += '\n';
      out << buf;
    }
    file.commit();
  }
  nlohmann::json meta;
  meta["lower"] = std::vector<double>(grid.lower().data(), grid.lower().data() + grid.dim());
  meta["upper"] = std::vector<double>(grid.upper().data(), grid.upper().data() + grid.dim());
  meta["n_delta"] =
    std::vector<Index>(grid.n_delta().data(), grid.n_delta().data() + grid.dim());
  meta["sample_count"] = pdf.sample_count();
  AtomicFile side(sidecar_path(csv_path));
  side.stream() << meta.dump(2) << '\n';
  side.commit();
}

LinearPdf
read_pdf(const fs::path& csv_path)
{
  const fs::path side = sidecar_path(csv_path);
  nlohmann::json meta;
  try {
    meta = nlohmann::json::parse(read_file(side));
  } catch (const nlohmann::json::exception& e) {
    throw Error("bad sidecar '" + side.string() + "': " + e.what());
  }
  Grid grid = [&] {
    try {
      const auto lower = meta.at("lower").get<std::vector<double>>();
      const auto upper = meta.at("upper").get<std::vector<double>>();
      const auto n_delta = meta.at("n_delta").get<std::vector<Index>>();
      const auto d = static_cast<Index>(lower.size());
      if (static_cast<Index>(upper.size()) != d || static_cast<Index>(n_delta.size()) != d) {
        throw Error("sidecar '" + side.string() + "' has inconsistent dimensions");
      }
      return Grid(Eigen::Map<const Eigen::VectorXd>(lower.data(), d),
                  Eigen::Map<const Eigen::VectorXd>(upper.data(), d),
                  Eigen::Map<const MultiIndex>(n_delta.data(), d));
    } catch (const nlohmann::json::exception& e) {
      throw Error("bad sidecar '" + side.string() + "': " + e.what());
    } catch (const std::invalid_argument& e) {
      throw Error("bad sidecar '" + side.string() + "': " + e.what());
    }
  }();
  Index sample_count = 0;
  try {
    sample_count = meta.at("sample_count").get<Index>();
  } catch (const nlohmann::json::exception& e) {
    throw Error("bad sidecar '" + side.string() + "': " + e.what());
  }

  const std::string text = read_file(csv_path);
  Eigen::VectorXd coeffs(grid.num_nodes());
  Index next = 0;
  bool header_seen = false;
  for_each_line(text, [&](std::int64_t line_no, std::string_view line) {
    if (skippable(line)) {
      return;
    }
    if (!header_seen) {
      header_seen = true;
      if (line != axis_header(grid.dim()) + ",coefficient") {
        throw ParseError(line_no, "unexpected header '" + std::string(line) + "'");
      }
      return;
    }
    const std::vector<double> row = parse_row(line, line_no);
    if (static_cast<Index>(row.size()) != grid.dim() + 2) {
      throw ParseError(line_no, "expected " + std::to_string(grid.dim() + 2) + " columns");
    }
    if (next >= grid.num_nodes() || row[0] != static_cast<double>(next)) {
      throw ParseError(line_no, "node index out of sequence");
    }
    coeffs[next++] = row.back();
  });
  if (next != grid.num_nodes()) {
    throw Error("'" + csv_path.string() + "' lists " + std::to_string(next) + " of " +
                std::to_string(grid.num_nodes()) + " nodes");
  }
  try {
    return LinearPdf(std::move(grid), std::move(coeffs), sample_count);
  } catch (const std::invalid_argument& e) {
    throw Error("'" + csv_path.string() + "': " + e.what());
  }
}

void
write_histogram(const fs::path& csv_path, const Histogram<double>& h)
{
  const Grid& grid = h.grid();
  AtomicFile file(csv_path);
  auto& out = file.stream();
  out << axis_header(grid.dim()) << ",value\n";
  std::string buf;
  for (Index l = 0; l < grid.num_bins(); ++l) {
    buf = std::to_string(l);
    const MultiIndex bin = grid.bin_multi(l);
    for (Index n = 0; n < grid.dim(); ++n) {
      buf += ',';
      append_general(buf, grid.node_coordinate(n, bin[n]), 17);
    }
    buf += ',';
    append_general(buf, h.values()[l], 17);
    buf += '\n';
    out << buf;
  }
  file.commit();
}

void
write_study_csv(const fs::path& path, const StudyResult& result, bool include_timing)
{
  AtomicFile file(path);
  auto& out = file.stream();
  out << "k,n_delta,delta,m,error,seconds\n";
  for (const auto& row : result.rows) {
    out << row.k << ',' << row.n_delta << ',' << format_rounded(row.delta) << ',' << row.m
        << ',' << format_rounded(row.error) << ','
        << (include_timing ? format_rounded(row.seconds) : std::string("0")) << '\n';
  }
  file.commit();
}

void
write_plot_script(const fs::path& path,
                  const fs::path& csv_path,
                  const StudyResult& result,
                  std::string_view title)
{
  const std::string data = csv_path.filename().string();
  const std::string stem = csv_path.stem().string();
  AtomicFile file(path);
  auto& out = file.stream();
  out << "# gnuplot script; run from the directory holding " << data << "\n"
      << "set datafile separator ','\n"
      << "set key top left\n"
      << "set logscale xy\n"
      << "set format x '%g'\n"
      << "set format y '%.1e'\n"
      << "set grid\n"
      << "set terminal pngcairo size 900,600\n\n";
  out << "set output '" << stem << "_delta.png'\n"
      << "set title '" << title << ": error vs bin size (fitted rate "
      << format_rounded(result.rate_delta, 4) << ")'\n"
      << "set xlabel 'delta'\nset ylabel 'error'\n"
      << "plot '" << data << "' skip 1 using 3:5 with linespoints pt 7 title 'error'\n\n";
  out << "set output '" << stem << "_m.png'\n"
      << "set title '" << title << ": error vs sample size (fitted rate "
      << format_rounded(result.rate_m, 4) << ")'\n"
      << "set xlabel 'M'\nset ylabel 'error'\n"
      << "plot '" << data << "' skip 1 using 4:5 with linespoints pt 7 title 'error'\n";
  file.commit();
}

void
write_comparison_csv(const fs::path& path, const std::vector<SurrogateRow>& rows)
{
  AtomicFile file(path);
  auto& out = file.stream();
  out << "estimator,m,delta,rmse\n";
  for (const auto& row : rows) {
    out << row.estimator << ',' << row.m << ',' << format_rounded(row.delta) << ','
        << format_rounded(row.rmse) << '\n';
  }
  file.commit();
}

} // namespace fedens::io
