#include "cica/io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <string>

#include "binary_io.hpp"
#include "cica/error.hpp"

namespace cica {

namespace {

constexpr std::string_view kMatrixMagic = "CMAT1";

[[noreturn]] void parse_fail(const std::filesystem::path& path, std::size_t line, const std::string& msg) {
  fail(ErrorKind::Parse, path.string() + ":" + std::to_string(line) + ": " + msg);
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

}  // namespace

MatrixFormat parse_matrix_format(std::string_view name) {
  if (name == "csv") return MatrixFormat::Csv;
  if (name == "bin") return MatrixFormat::Bin;
  fail(ErrorKind::Config, "unknown matrix format '" + std::string(name) + "' (expected csv or bin)");
}

Matrix load_matrix(const std::filesystem::path& path, MatrixFormat format) {
  std::ifstream is(path, std::ios::binary);
  if (!is) fail(ErrorKind::Parse, "cannot open " + path.string());

  if (format == MatrixFormat::Bin) {
    detail::BinaryReader r(is, path.string());
    r.expect_magic(kMatrixMagic);
    const std::uint64_t rows = r.u64();
    const std::uint64_t cols = r.u64();
    const auto size = std::filesystem::file_size(path);
    const std::uint64_t header = kMatrixMagic.size() + 16;
    if (rows == 0 || cols == 0) r.error("empty matrix");
    if (rows > (size - header) / 8 / cols || header + 8 * rows * cols != size)
      r.error("payload length does not match " + std::to_string(rows) + " x " + std::to_string(cols));
    std::vector<double> values = r.f64s(rows * cols);
    for (std::size_t i = 0; i < values.size(); ++i)
      if (!std::isfinite(values[i])) fail(ErrorKind::Parse, path.string() + ": non-finite value at byte offset " +
                                                                std::to_string(header + 8 * i));
    return Matrix(rows, cols, std::move(values));
  }

  std::vector<double> values;
  std::size_t width = 0;
  std::size_t samples = 0;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    std::string_view rest = trim(line);
    if (rest.empty()) parse_fail(path, line_no, "empty line");
    std::size_t count = 0;
    for (;;) {
      const std::size_t comma = rest.find(',');
      const std::string_view cell = trim(rest.substr(0, comma));
      double v = 0.0;
      const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
      if (cell.empty() || ec != std::errc{} || ptr != cell.data() + cell.size() || !std::isfinite(v))
        parse_fail(path, line_no, "non-numeric cell '" + std::string(cell) + "' in column " + std::to_string(count + 1));
      values.push_back(v);
      ++count;
      if (comma == std::string_view::npos) break;
      rest = rest.substr(comma + 1);
    }
    if (samples == 0) {
      width = count;
    } else if (count != width) {
      parse_fail(path, line_no,
                 "ragged row: " + std::to_string(count) + " cells, expected " + std::to_string(width));
    }
    ++samples;
  }
  if (samples == 0) fail(ErrorKind::Parse, path.string() + ": no data rows");
  return Matrix(samples, width, std::move(values)).transpose();
}

void save_matrix(const std::filesystem::path& path, const Matrix& m, MatrixFormat format) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) fail(ErrorKind::Parse, "cannot open " + path.string() + " for writing");
  if (format == MatrixFormat::Bin) {
    detail::BinaryWriter w(os);
    w.bytes(kMatrixMagic.data(), kMatrixMagic.size());
    w.u64(m.rows());
    w.u64(m.cols());
    w.f64s(m.values());
  } else {
    char buf[32];
    for (std::size_t j = 0; j < m.cols(); ++j) {
      for (std::size_t i = 0; i < m.rows(); ++i) {
        if (i > 0) os.put(',');
        const int len = std::snprintf(buf, sizeof buf, "%.17g", m(i, j));
        os.write(buf, len);
      }
      os.put('\n');
    }
  }
  if (!os) fail(ErrorKind::Parse, "write failed for " + path.string());
}

std::vector<ClassId> load_labels(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) fail(ErrorKind::Parse, "cannot open " + path.string());
  std::vector<ClassId> labels;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    const std::string_view cell = trim(line);
    ClassId v = 0;
    const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
    if (cell.empty() || ec != std::errc{} || ptr != cell.data() + cell.size())
      parse_fail(path, line_no, "expected an integer label, got '" + std::string(cell) + "'");
    labels.push_back(v);
  }
  if (labels.empty()) fail(ErrorKind::Parse, path.string() + ": no labels");
  return labels;
}

void save_labels(const std::filesystem::path& path, const std::vector<ClassId>& labels) {
  std::ofstream os(path, std::ios::trunc);
  if (!os) fail(ErrorKind::Parse, "cannot open " + path.string() + " for writing");
  for (ClassId l : labels) os << l << '\n';
  if (!os) fail(ErrorKind::Parse, "write failed for " + path.string());
}

}  // namespace cica
