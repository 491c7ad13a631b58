#include "conu/csv.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <string_view>
#include <vector>

namespace conu {

ParseError::ParseError(std::size_t line, const std::string& what)
    : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}

namespace {

std::vector<std::string_view> split_fields(std::string_view line, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    const auto pos = line.find(sep, start);
    if (pos == std::string_view::npos) {
      out.push_back(line.substr(start));
      return out;
    }
    out.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
    s.remove_suffix(1);
  return s;
}

double parse_double(std::string_view s, std::size_t line) {
  s = trim(s);
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty())
    throw ParseError(line, "expected a number, got '" + std::string(s) + "'");
  return v;
}

long long parse_int(std::string_view s, std::size_t line) {
  s = trim(s);
  long long v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty())
    throw ParseError(line, "expected an integer, got '" + std::string(s) + "'");
  return v;
}

// Reads the header and checks it is f0..f{d-1},<last>; returns d.
Index read_header(std::istream& in, std::string_view last) {
  std::string line;
  if (!std::getline(in, line)) throw ParseError(1, "missing header");
  const auto fields = split_fields(trim(line), ',');
  if (fields.size() < 2) throw ParseError(1, "header needs at least one feature column");
  for (std::size_t j = 0; j + 1 < fields.size(); ++j) {
    if (trim(fields[j]) != "f" + std::to_string(j))
      throw ParseError(1, "expected column 'f" + std::to_string(j) + "', got '" +
                              std::string(trim(fields[j])) + "'");
  }
  if (trim(fields.back()) != last)
    throw ParseError(1, "expected last column '" + std::string(last) + "'");
  return static_cast<Index>(fields.size() - 1);
}

template <class RowFn>
std::size_t for_each_row(std::istream& in, Index d, RowFn fn) {
  std::string line;
  std::size_t lineno = 1;
  std::vector<double> feats(static_cast<std::size_t>(d));
  std::size_t rows = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto body = trim(line);
    if (body.empty()) continue;
    const auto fields = split_fields(body, ',');
    if (static_cast<Index>(fields.size()) != d + 1)
      throw ParseError(lineno, "expected " + std::to_string(d + 1) + " fields, got " +
                                   std::to_string(fields.size()));
    for (Index j = 0; j < d; ++j)
      feats[static_cast<std::size_t>(j)] = parse_double(fields[static_cast<std::size_t>(j)], lineno);
    fn(feats, fields.back(), lineno);
    ++rows;
  }
  return rows;
}

void write_features(std::ostream& out, const Matrix& x, Index row) {
  for (Index j = 0; j < x.cols(); ++j) out << format_double(x(row, j)) << ',';
}

void write_header(std::ostream& out, Index d, std::string_view last) {
  for (Index j = 0; j < d; ++j) out << 'f' << j << ',';
  out << last << '\n';
}

template <class T, class Fn>
void with_file(const std::string& path, std::ios::openmode mode, Fn fn) {
  T stream(path, mode);
  if (!stream) throw std::runtime_error("cannot open '" + path + "'");
  fn(stream);
}

}  // namespace

std::string format_double(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

void write_ordinary_csv(const OrdinaryDataset& ds, std::ostream& out) {
  write_header(out, ds.dim(), "y");
  for (Index i = 0; i < ds.size(); ++i) {
    write_features(out, ds.features, i);
    out << ds.labels[static_cast<std::size_t>(i)] + 1 << '\n';
  }
}

void write_ordinary_csv(const OrdinaryDataset& ds, const std::string& path) {
  with_file<std::ofstream>(path, std::ios::out, [&](auto& s) { write_ordinary_csv(ds, s); });
}

OrdinaryDataset read_ordinary_csv(std::istream& in, int q) {
  const Index d = read_header(in, "y");
  std::vector<double> flat;
  std::vector<int> labels;
  std::size_t last_line = 1;
  for_each_row(in, d, [&](const std::vector<double>& f, std::string_view y, std::size_t line) {
    const long long v = parse_int(y, line);
    if (v < 1 || (q > 0 && v > q))
      throw ParseError(line, "label " + std::to_string(v) + " out of range");
    flat.insert(flat.end(), f.begin(), f.end());
    labels.push_back(static_cast<int>(v - 1));
    last_line = line;
  });
  if (labels.empty()) throw ParseError(last_line, "no data rows");
  OrdinaryDataset ds;
  ds.q = q > 0 ? q : *std::max_element(labels.begin(), labels.end()) + 1;
  if (ds.q < 2) throw ParseError(last_line, "fewer than two classes");
  ds.labels = std::move(labels);
  ds.features = Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
      flat.data(), static_cast<Index>(ds.labels.size()), d);
  return ds;
}

OrdinaryDataset read_ordinary_csv(const std::string& path, int q) {
  OrdinaryDataset ds;
  with_file<std::ifstream>(path, std::ios::in, [&](auto& s) { ds = read_ordinary_csv(s, q); });
  return ds;
}

void write_complementary_csv(const ComplementaryDataset& cds, std::ostream& out) {
  write_header(out, cds.dim(), "cl");
  for (Index i = 0; i < cds.size(); ++i) {
    write_features(out, cds.features, i);
    bool first = true;
    for (int k = 0; k < cds.q; ++k) {
      if (!cds.flagged(i, k)) continue;
      if (!first) out << ';';
      out << k + 1;
      first = false;
    }
    out << '\n';
  }
}

void write_complementary_csv(const ComplementaryDataset& cds, const std::string& path) {
  with_file<std::ofstream>(path, std::ios::out, [&](auto& s) { write_complementary_csv(cds, s); });
}

ComplementaryDataset read_complementary_csv(std::istream& in, int q) {
  const Index d = read_header(in, "cl");
  std::vector<double> flat;
  std::vector<std::vector<int>> sets;
  std::size_t last_line = 1;
  int max_index = 0;
  for_each_row(in, d, [&](const std::vector<double>& f, std::string_view cl, std::size_t line) {
    std::vector<int> set;
    cl = trim(cl);
    if (!cl.empty()) {
      for (auto tok : split_fields(cl, ';')) {
        const long long v = parse_int(tok, line);
        if (v < 1 || (q > 0 && v > q))
          throw ParseError(line, "complementary label " + std::to_string(v) + " out of range");
        if (std::find(set.begin(), set.end(), static_cast<int>(v) - 1) != set.end())
          throw ParseError(line, "duplicate complementary label " + std::to_string(v));
        set.push_back(static_cast<int>(v) - 1);
        max_index = std::max(max_index, static_cast<int>(v));
      }
    }
    flat.insert(flat.end(), f.begin(), f.end());
    sets.push_back(std::move(set));
    last_line = line;
  });
  if (sets.empty()) throw ParseError(last_line, "no data rows");
  ComplementaryDataset cds;
  cds.q = q > 0 ? q : max_index;
  if (cds.q < 2) throw ParseError(last_line, "cannot infer at least two classes");
  const auto n = static_cast<Index>(sets.size());
  cds.features = Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
      flat.data(), n, d);
  cds.comp = BitMatrix::Zero(n, cds.q);
  for (Index i = 0; i < n; ++i) {
    const auto& set = sets[static_cast<std::size_t>(i)];
    if (static_cast<int>(set.size()) >= cds.q)
      throw ParseError(static_cast<std::size_t>(i) + 2,
                       "row marks every class as complementary");
    for (int k : set) cds.comp(i, k) = 1;
  }
  return cds;
}

ComplementaryDataset read_complementary_csv(const std::string& path, int q) {
  ComplementaryDataset cds;
  with_file<std::ifstream>(path, std::ios::in, [&](auto& s) { cds = read_complementary_csv(s, q); });
  return cds;
}

void write_priors_csv(const ClassPriors& priors, std::ostream& out) {
  out << "k,pi_k,pi_bar_k\n";
  for (int k = 0; k < priors.num_classes(); ++k)
    out << k + 1 << ',' << format_double(priors.pi[static_cast<std::size_t>(k)]) << ','
        << format_double(priors.pi_bar[static_cast<std::size_t>(k)]) << '\n';
}

void write_priors_csv(const ClassPriors& priors, const std::string& path) {
  with_file<std::ofstream>(path, std::ios::out, [&](auto& s) { write_priors_csv(priors, s); });
}

ClassPriors read_priors_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || trim(line) != "k,pi_k,pi_bar_k")
    throw ParseError(1, "expected header 'k,pi_k,pi_bar_k'");
  ClassPriors p;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    const auto f = split_fields(trim(line), ',');
    if (f.size() != 3) throw ParseError(lineno, "expected 3 fields");
    const long long k = parse_int(f[0], lineno);
    if (k != static_cast<long long>(p.pi.size()) + 1)
      throw ParseError(lineno, "classes must be listed in order starting at 1");
    p.pi.push_back(parse_double(f[1], lineno));
    p.pi_bar.push_back(parse_double(f[2], lineno));
  }
  try {
    p.validate();
  } catch (const std::invalid_argument& e) {
    throw ParseError(lineno, e.what());
  }
  return p;
}

ClassPriors read_priors_csv(const std::string& path) {
  ClassPriors p;
  with_file<std::ifstream>(path, std::ios::in, [&](auto& s) { p = read_priors_csv(s); });
  return p;
}

}  // namespace conu
