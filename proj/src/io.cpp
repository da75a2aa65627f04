#include "sbmvar/io.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>

#include "sbmvar/errors.hpp"

namespace sbmvar::io {
namespace {

[[noreturn]] void parse_error(const std::string& source, int line, const std::string& what) {
  fail(ErrorKind::kData, source + ":" + std::to_string(line) + ": " + what);
}

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

bool parse_int(std::string_view token, int& out) {
  const auto* end = token.data() + token.size();
  auto [ptr, ec] = std::from_chars(token.data(), end, out);
  return ec == std::errc() && ptr == end;
}

}  // namespace

EdgeList parse_edge_list(std::istream& in, const std::string& source, bool allow_star,
                         std::optional<int> n) {
  EdgeList list;
  std::string raw;
  int line_no = 0;
  bool saw_pair = false;
  while (std::getline(in, raw)) {
    ++line_no;
    const std::string_view line = trim(raw);
    if (line.empty() || line.front() == '#') continue;
    if (line == "*") {
      if (!allow_star) parse_error(source, line_no, "'*' is only valid in a mask file");
      if (saw_pair || list.all) parse_error(source, line_no, "'*' must be the only entry");
      list.all = true;
      continue;
    }
    if (list.all) parse_error(source, line_no, "'*' must be the only entry");
    const auto tab = line.find('\t');
    if (tab == std::string_view::npos) parse_error(source, line_no, "expected 'i<TAB>j'");
    int i = 0, j = 0;
    if (!parse_int(trim(line.substr(0, tab)), i) || !parse_int(trim(line.substr(tab + 1)), j))
      parse_error(source, line_no, "node ids must be integers");
    if (i < 1 || j < 1) parse_error(source, line_no, "node ids are 1-based");
    if (i == j) parse_error(source, line_no, "self-loop " + std::to_string(i));
    if (n && (i > *n || j > *n))
      parse_error(source, line_no, "node id exceeds n = " + std::to_string(*n));
    list.pairs.emplace_back(std::min(i, j) - 1, std::max(i, j) - 1);
    list.n = std::max({list.n, i, j});
    saw_pair = true;
  }
  std::sort(list.pairs.begin(), list.pairs.end());
  list.pairs.erase(std::unique(list.pairs.begin(), list.pairs.end()), list.pairs.end());
  if (n) list.n = *n;
  return list;
}

EdgeList read_edge_list(const std::filesystem::path& path, bool allow_star, std::optional<int> n) {
  std::ifstream in(path);
  require(static_cast<bool>(in), ErrorKind::kData, "cannot open " + path.string());
  return parse_edge_list(in, path.string(), allow_star, n);
}

AdjacencyMatrix to_adjacency(const EdgeList& list, int n) {
  require(!list.all, ErrorKind::kData, "'*' is not a valid edge list");
  AdjacencyMatrix a(n);
  for (auto [i, j] : list.pairs) {
    require(j < n, ErrorKind::kData, "edge endpoint beyond node count");
    a.set(i, j, true);
  }
  return a;
}

SamplingMask to_mask(const EdgeList& list, int n) {
  if (list.all) return SamplingMask::full(n);
  SamplingMask x(n);
  for (auto [i, j] : list.pairs) {
    require(j < n, ErrorKind::kData, "mask pair beyond node count");
    x.set(i, j, true);
  }
  return x;
}

void write_edge_list(std::ostream& out, const BinarySymMatrix& m) {
  for (int i = 0; i < m.n(); ++i)
    for (int j = i + 1; j < m.n(); ++j)
      if (m(i, j)) out << i + 1 << '\t' << j + 1 << '\n';
}

void write_mask(std::ostream& out, const SamplingMask& m) {
  const std::int64_t total = static_cast<std::int64_t>(m.n()) * (m.n() - 1) / 2;
  if (m.n() > 1 && m.count_pairs() == total) {
    out << "*\n";
    return;
  }
  write_edge_list(out, m);
}

void write_matrix_csv(std::ostream& out, const Eigen::MatrixXd& m) {
  const auto old_precision = out.precision(17);
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (j) out << ',';
      out << m(i, j);
    }
    out << '\n';
  }
  out.precision(old_precision);
}

Eigen::MatrixXd parse_matrix_csv(std::istream& in, const std::string& source) {
  std::vector<std::vector<double>> rows;
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    if (trim(raw).empty()) continue;
    std::vector<double> row;
    std::stringstream ss(raw);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      try {
        std::size_t used = 0;
        const std::string t(trim(cell));
        row.push_back(std::stod(t, &used));
        if (used != t.size()) throw std::invalid_argument(t);
      } catch (const std::exception&) {
        parse_error(source, line_no, "not a number: '" + cell + "'");
      }
    }
    if (!rows.empty() && row.size() != rows.front().size())
      parse_error(source, line_no, "ragged row");
    rows.push_back(std::move(row));
  }
  const auto r = static_cast<Eigen::Index>(rows.size());
  const auto c = r ? static_cast<Eigen::Index>(rows.front().size()) : 0;
  Eigen::MatrixXd m(r, c);
  for (Eigen::Index i = 0; i < r; ++i)
    for (Eigen::Index j = 0; j < c; ++j) m(i, j) = rows[i][j];
  return m;
}

void write_labels_csv(std::ostream& out, const LabelAssignment& z) {
  out << "node,label\n";
  for (int i = 0; i < z.n(); ++i) out << i + 1 << ',' << z.z[i] + 1 << '\n';
}

std::ofstream open_output(const std::filesystem::path& path) {
  std::ofstream out(path);
  require(static_cast<bool>(out), ErrorKind::kIo, "cannot write " + path.string());
  return out;
}

}  // namespace sbmvar::io
