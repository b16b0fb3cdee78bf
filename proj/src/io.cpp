#include "pairmatch/io.hpp"

#include "pairmatch/errors.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace pairmatch {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    out.push_back(trim(line.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

double parse_cell(std::string_view cell, std::size_t row, std::size_t column) {
  double value = 0.0;
  const char* first = cell.data();
  const char* last = cell.data() + cell.size();
  if (!cell.empty() && *first == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, last, value);
  if (cell.empty() || ec != std::errc() || ptr != last) {
    throw ParseError("'" + std::string(cell) + "' is not a decimal number", row, column);
  }
  if (!std::isfinite(value)) throw ParseError("non-finite value '" + std::string(cell) + "'", row, column);
  return value;
}

std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open '" + path.string() + "'");
  return in;
}

bool blank(std::string_view line) { return trim(line).empty(); }

}  // namespace

UnitTable read_unit_csv(std::istream& in) {
  std::string line;
  std::size_t row = 0;
  while (std::getline(in, line)) {
    ++row;
    if (!blank(line)) break;
  }
  if (row == 0 || blank(line)) throw ParseError("unit CSV is empty", 1, 1);
  if (line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0) line.erase(0, 3);

  const auto header = split_fields(line);
  if (header.front() != "id") throw ParseError("first header column must be 'id'", row, 1);
  if (header.size() < 2) throw ParseError("unit CSV needs at least one covariate column", row, 2);
  const std::size_t p = header.size() - 1;

  std::vector<std::string> ids;
  std::vector<double> values;
  while (std::getline(in, line)) {
    ++row;
    if (blank(line)) continue;
    const auto fields = split_fields(line);
    if (fields.size() != header.size()) {
      throw ParseError("expected " + std::to_string(header.size()) + " fields, found " + std::to_string(fields.size()),
                       row, std::min(fields.size(), header.size()) + 1);
    }
    if (fields[0].empty()) throw ParseError("empty unit id", row, 1);
    ids.emplace_back(fields[0]);
    for (std::size_t c = 1; c < fields.size(); ++c) values.push_back(parse_cell(fields[c], row, c + 1));
  }

  const auto n = static_cast<Eigen::Index>(ids.size());
  Eigen::MatrixXd x(n, static_cast<Eigen::Index>(p));
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index c = 0; c < x.cols(); ++c) x(i, c) = values[static_cast<std::size_t>(i * x.cols() + c)];
  }
  try {
    return UnitTable(std::move(ids), std::move(x));
  } catch (const InvariantViolation& e) {
    throw ParseError(e.what(), row, 1);
  }
}

UnitTable read_unit_csv(const std::filesystem::path& path) {
  auto in = open_input(path);
  return read_unit_csv(in);
}

DistanceMatrix read_matrix_csv(std::istream& in) {
  std::vector<std::vector<double>> rows;
  std::string line;
  std::size_t row = 0;
  while (std::getline(in, line)) {
    ++row;
    if (blank(line)) continue;
    std::vector<double> values;
    const auto fields = split_fields(line);
    for (std::size_t c = 0; c < fields.size(); ++c) values.push_back(parse_cell(fields[c], row, c + 1));
    if (!rows.empty() && values.size() != rows.front().size()) {
      throw ParseError("row has " + std::to_string(values.size()) + " entries, expected " +
                           std::to_string(rows.front().size()),
                       row, values.size());
    }
    rows.push_back(std::move(values));
  }
  if (rows.empty()) throw ParseError("weight matrix is empty", 1, 1);
  if (rows.size() != rows.front().size()) {
    throw ParseError("weight matrix is " + std::to_string(rows.size()) + "x" + std::to_string(rows.front().size()) +
                         ", not square",
                     row, 1);
  }
  const auto n = static_cast<Eigen::Index>(rows.size());
  Eigen::MatrixXd m(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) m(i, j) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
  }
  return DistanceMatrix(std::move(m));
}

DistanceMatrix read_matrix_csv(const std::filesystem::path& path) {
  auto in = open_input(path);
  return read_matrix_csv(in);
}

std::string format_real(double x) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, ec == std::errc() ? ptr : buf);
}

void write_pair_csv(std::ostream& out, const PairSet& pairs, const DistanceMatrix& d,
                    const std::vector<std::string>& ids, bool with_total) {
  std::vector<IndexPair> ordered = pairs.pairs;
  std::stable_sort(ordered.begin(), ordered.end(), [&](const IndexPair& a, const IndexPair& b) {
    return d(a.first, a.second) < d(b.first, b.second);
  });
  out << "pair_index,id_a,id_b,distance\n";
  for (std::size_t k = 0; k < ordered.size(); ++k) {
    const auto& pr = ordered[k];
    out << (k + 1) << ',' << ids.at(pr.first) << ',' << ids.at(pr.second) << ',' << format_real(d(pr.first, pr.second))
        << '\n';
  }
  if (with_total) out << "# total_distance=" << format_real(pairs.total_distance) << '\n';
}

void write_matching_csv(std::ostream& out, const Matching& matching, const DistanceMatrix& d) {
  out << "node_a,node_b,weight\n";
  for (const auto& pr : matching.pairs) out << pr.first << ',' << pr.second << ',' << format_real(d(pr.first, pr.second)) << '\n';
  out << "# total_weight=" << format_real(matching.total_weight) << '\n';
}

void write_file_atomic(const std::filesystem::path& path, const std::string& content) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw UsageError("cannot write '" + tmp.string() + "'");
    out << content;
    out.flush();
    if (!out) throw UsageError("failed writing '" + tmp.string() + "'");
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    throw UsageError("cannot move output into place at '" + path.string() + "'");
  }
}

}  // namespace pairmatch
