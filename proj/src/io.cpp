#include "edmshrink/io.hpp"

#include <cerrno>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <vector>

#include "edmshrink/errors.hpp"

namespace edmshrink::io {
namespace {

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

// strtod accepts the usual spellings ("1e-3", "+2", "inf" is rejected below).
bool parse_double(std::string_view token, double& out) {
  token = trim(token);
  if (token.empty()) return false;
  const std::string tmp(token);
  char* end = nullptr;
  errno = 0;
  out = std::strtod(tmp.c_str(), &end);
  return end == tmp.c_str() + tmp.size() && errno == 0 && std::isfinite(out);
}

Matrix<double> to_matrix(const std::vector<std::vector<double>>& rows) {
  if (rows.empty()) return Matrix<double>(0, 0);
  Matrix<double> m(static_cast<Eigen::Index>(rows.size()),
                   static_cast<Eigen::Index>(rows.front().size()));
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < rows[i].size(); ++j)
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
  return m;
}

template <typename SplitFn>
Matrix<double> parse_rows(std::string_view text, SplitFn split, const char* what) {
  std::vector<std::vector<double>> rows;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto eol = text.find('\n', pos);
    const auto line = trim(text.substr(pos, eol == std::string_view::npos ? text.npos : eol - pos));
    pos = eol == std::string_view::npos ? text.size() + 1 : eol + 1;
    ++line_no;
    if (line.empty() || line.front() == '#') continue;
    std::vector<double> row;
    for (auto token : split(line)) {
      double v = 0;
      if (!parse_double(token, v))
        throw InputError(std::string("malformed ") + what + " field '" + std::string(token) + "'",
                         line_no);
      row.push_back(v);
    }
    if (!rows.empty() && row.size() != rows.front().size())
      throw InputError(std::string("ragged ") + what + " row: expected " +
                           std::to_string(rows.front().size()) + " fields, got " +
                           std::to_string(row.size()),
                       line_no);
    rows.push_back(std::move(row));
  }
  return to_matrix(rows);
}

std::vector<std::string_view> split_commas(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    out.push_back(line.substr(start, comma == std::string_view::npos ? line.npos : comma - start));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

std::vector<std::string_view> split_whitespace(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) ++i;
    const auto start = i;
    while (i < line.size() && line[i] != ' ' && line[i] != '\t') ++i;
    if (i > start) out.push_back(line.substr(start, i - start));
  }
  return out;
}

Matrix<double> parse_xyz(std::string_view text) {
  // Standard XYZ starts with an integer atom count.
  std::istringstream in{std::string(text)};
  std::string first;
  std::size_t line_no = 0;
  while (std::getline(in, first)) {
    ++line_no;
    if (!trim(first).empty()) break;
  }
  const auto head = trim(first);
  std::size_t count = 0;
  const auto [ptr, ec] = std::from_chars(head.data(), head.data() + head.size(), count);
  if (ec != std::errc() || ptr != head.data() + head.size())
    return parse_rows(text, split_whitespace, "xyz");

  std::string comment;
  std::getline(in, comment);
  ++line_no;
  std::vector<std::vector<double>> rows;
  std::string line;
  while (rows.size() < count && std::getline(in, line)) {
    ++line_no;
    const auto fields = split_whitespace(trim(line));
    if (fields.empty()) continue;
    if (fields.size() < 4) throw InputError("xyz atom line needs 'symbol x y z'", line_no);
    std::vector<double> row(3);
    for (int k = 0; k < 3; ++k)
      if (!parse_double(fields[static_cast<std::size_t>(k) + 1], row[static_cast<std::size_t>(k)]))
        throw InputError("malformed xyz coordinate", line_no);
    rows.push_back(std::move(row));
  }
  if (rows.size() != count)
    throw InputError("xyz file declares " + std::to_string(count) + " atoms but has " +
                     std::to_string(rows.size()));
  return to_matrix(rows);
}

void require_points(const Matrix<double>& m) {
  if (m.rows() < 2) throw InputError("need at least two points, got " + std::to_string(m.rows()));
  if (m.cols() < 1) throw InputError("coordinates have no columns");
}

}  // namespace

std::string format_double(double v) {
  char buf[32];
  const int len = std::snprintf(buf, sizeof buf, "%.17g", v);
  return std::string(buf, static_cast<std::size_t>(len));
}

Matrix<double> read_csv_matrix(const std::filesystem::path& path) {
  return parse_rows(read_file(path), split_commas, "csv");
}

SymHollowMatrix<double> read_distance_csv(const std::filesystem::path& path) {
  Matrix<double> m = read_csv_matrix(path);
  if (m.rows() != m.cols())
    throw InputError(path.string() + ": expected a square matrix, got " + std::to_string(m.rows()) +
                     "x" + std::to_string(m.cols()));
  try {
    return SymHollowMatrix<double>::from_approximate(std::move(m), kLoadTol);
  } catch (const InvalidMatrix& e) {
    throw InputError(path.string() + ": " + e.what());
  }
}

void write_csv_matrix(const std::filesystem::path& path, const Matrix<double>& m,
                      std::string_view header) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write " + path.string());
  if (!header.empty()) out << "# " << header << '\n';
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (j > 0) out << ',';
      out << format_double(m(i, j));
    }
    out << '\n';
  }
  if (!out) throw Error("write failed for " + path.string());
}

CoordFormat parse_coord_format(std::string_view name) {
  if (name == "csv") return CoordFormat::csv;
  if (name == "xyz") return CoordFormat::xyz;
  if (name == "pdb") return CoordFormat::pdb;
  throw InputError("unknown coordinate format '" + std::string(name) + "'");
}

Matrix<double> parse_pdb(std::string_view text) {
  std::vector<std::vector<double>> rows;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    const auto eol = text.find('\n', pos);
    auto line = text.substr(pos, eol == std::string_view::npos ? text.npos : eol - pos);
    pos = eol == std::string_view::npos ? text.size() : eol + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);

    if (line.rfind("ENDMDL", 0) == 0) {
      if (!rows.empty()) break;  // only the first model
      continue;
    }
    if (line.rfind("ATOM", 0) != 0) continue;
    if (line.size() < 54) throw InputError("ATOM record shorter than 54 columns", line_no);
    std::vector<double> row(3);
    for (std::size_t k = 0; k < 3; ++k) {
      // Columns 31-38, 39-46, 47-54 (1-based, inclusive).
      const auto field = line.substr(30 + 8 * k, 8);
      if (!parse_double(field, row[k]))
        throw InputError("malformed ATOM coordinate '" + std::string(field) + "'", line_no);
    }
    rows.push_back(std::move(row));
  }
  return to_matrix(rows);
}

Matrix<double> load_coords(const std::filesystem::path& path, CoordFormat format) {
  const std::string text = read_file(path);
  Matrix<double> m;
  switch (format) {
    case CoordFormat::csv:
      m = parse_rows(text, split_commas, "csv");
      break;
    case CoordFormat::xyz:
      m = parse_xyz(text);
      break;
    case CoordFormat::pdb:
      m = parse_pdb(text);
      break;
  }
  require_points(m);
  return m;
}

}  // namespace edmshrink::io
