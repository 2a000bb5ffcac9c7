#include "sfield/csv_io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "sfield/error.hpp"

namespace sfield {
namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_cells(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream ss(line);
  while (std::getline(ss, cell, ',')) out.push_back(trim(cell));
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

std::string num(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

}  // namespace

Dims parse_dims(const std::string& text) {
  Dims d;
  std::string cur;
  auto flush = [&] {
    const std::string t = trim(cur);
    if (t.empty() || t.find_first_not_of("0123456789") != std::string::npos)
      fail(ErrorKind::invalid_config, "cannot read grid dimensions from '" + text + "'");
    d.push_back(static_cast<std::size_t>(std::stoul(t)));
    cur.clear();
  };
  for (char c : text) {
    if (c == ',' || c == 'x') flush();
    else cur += c;
  }
  flush();
  validate_dims(d);
  return d;
}

BasisKind parse_basis_kind(const std::string& text) {
  if (text == "fourier") return BasisKind::fourier;
  if (text == "bspline") return BasisKind::bspline;
  fail(ErrorKind::invalid_config, "unknown basis '" + text + "' (expected fourier or bspline)");
}

FunctionalGridSample read_sample_csv(std::istream& in, std::optional<Dims> dims, std::optional<BasisChoice> basis) {
  std::optional<Dims> meta_dims;
  std::optional<BasisKind> meta_kind;
  std::optional<std::size_t> meta_k;

  std::string line;
  std::vector<std::string> header;
  while (std::getline(in, line)) {
    const std::string t = trim(line);
    if (t.empty()) continue;
    if (t[0] == '#') {
      std::istringstream ss(t.substr(1));
      std::string tok;
      while (ss >> tok) {
        const auto eq = tok.find('=');
        if (eq == std::string::npos) continue;
        const std::string key = tok.substr(0, eq), value = tok.substr(eq + 1);
        if (key == "dims") meta_dims = parse_dims(value);
        else if (key == "basis") meta_kind = parse_basis_kind(value);
        else if (key == "k") {
          if (value.empty() || value.find_first_not_of("0123456789") != std::string::npos || value == "0")
            throw ParseError("header: bad basis dimension '" + value + "'", 0, 0);
          meta_k = static_cast<std::size_t>(std::stoul(value));
        }
      }
      continue;
    }
    header = split_cells(t);
    break;
  }
  if (header.empty()) throw ParseError("missing CSV header row", 0, 0);
  bool raw = false;
  for (std::size_t c = 0; c < header.size(); ++c) {
    const bool is_coef = header[c].rfind("coef", 0) == 0;
    const bool is_raw = header[c].rfind("raw", 0) == 0;
    if (!is_coef && !is_raw)
      throw ParseError("header column " + std::to_string(c + 1) + " must start with 'coef' or 'raw'", 0, c + 1);
    if (c == 0) raw = is_raw;
    else if (raw != is_raw) throw ParseError("header mixes 'coef' and 'raw' columns", 0, c + 1);
  }
  const std::size_t width = header.size();

  if (dims && meta_dims && *dims != *meta_dims)
    fail(ErrorKind::invalid_config, "grid dimensions from the command line differ from the file header");
  const Dims grid = dims ? *dims : meta_dims ? *meta_dims : Dims{};
  if (grid.empty()) fail(ErrorKind::invalid_config, "grid dimensions are required (flag or '# dims=' header)");
  const std::size_t n = grid_size(grid);

  BasisChoice choice;
  if (basis) {
    choice = *basis;
  } else {
    choice.kind = meta_kind.value_or(BasisKind::fourier);
    choice.dimension = meta_k.value_or(raw ? 0 : width);
  }
  if (choice.dimension == 0) {
    if (raw) fail(ErrorKind::invalid_config, "raw curves need the basis dimension (flag or '# k=' header)");
    choice.dimension = width;
  }
  const std::size_t k = choice.dimension;
  if (!raw && width != k)
    throw ParseError("coefficient header has " + std::to_string(width) + " columns but the basis dimension is " +
                         std::to_string(k),
                     0, width);
  if (raw && width < k)
    throw ParseError("raw mode needs at least K = " + std::to_string(k) + " evaluation points", 0, width);

  std::vector<std::vector<double>> rows;
  rows.reserve(n);
  std::size_t row = 0;
  while (std::getline(in, line)) {
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    ++row;
    if (row > n)
      throw ParseError("row " + std::to_string(row) + ": more data rows than grid locations (" + std::to_string(n) + ")",
                       row, 0);
    const auto cells = split_cells(t);
    if (cells.size() != width)
      throw ParseError("row " + std::to_string(row) + ": expected " + std::to_string(width) + " columns, found " +
                           std::to_string(cells.size()),
                       row, std::min(cells.size(), width) + 1);
    std::vector<double> values(width);
    for (std::size_t c = 0; c < width; ++c) {
      const char* begin = cells[c].c_str();
      char* end = nullptr;
      const double v = std::strtod(begin, &end);
      if (cells[c].empty() || end != begin + cells[c].size())
        throw ParseError("row " + std::to_string(row) + ", column " + std::to_string(c + 1) + ": not a number", row,
                         c + 1);
      if (!std::isfinite(v))
        throw ParseError("row " + std::to_string(row) + ", column " + std::to_string(c + 1) + ": non-finite value",
                         row, c + 1);
      values[c] = v;
    }
    rows.push_back(std::move(values));
  }
  if (row != n)
    throw ParseError("found " + std::to_string(row) + " data rows, expected " + std::to_string(n) + " grid locations",
                     row, 0);

  BasisSpec spec = choice.kind == BasisKind::fourier ? BasisSpec::fourier(k) : BasisSpec::bspline(k);
  RealMatrix coeffs(n, k);
  if (!raw) {
    for (std::size_t s = 0; s < n; ++s)
      for (std::size_t j = 0; j < k; ++j) coeffs(s, j) = rows[s][j];
  } else {
    const std::size_t m = width;
    RealMatrix design(m, k);
    for (std::size_t i = 0; i < m; ++i) {
      const auto v = spec.evaluate((static_cast<double>(i) + 0.5) / static_cast<double>(m));
      for (std::size_t j = 0; j < k; ++j) design(i, j) = v[j];
    }
    RealMatrix normal = multiply(transpose(design), design);
    for (std::size_t j = 0; j < k; ++j) normal(j, j) += 1e-10;
    std::vector<double> rhs(k);
    for (std::size_t s = 0; s < n; ++s) {
      for (std::size_t j = 0; j < k; ++j) {
        double acc = 0.0;
        for (std::size_t i = 0; i < m; ++i) acc += design(i, j) * rows[s][i];
        rhs[j] = acc;
      }
      const auto c = cholesky_solve(normal, rhs);
      for (std::size_t j = 0; j < k; ++j) coeffs(s, j) = c[j];
    }
  }
  return FunctionalGridSample(grid, std::move(coeffs), std::move(spec));
}

FunctionalGridSample ingest_csv(const std::string& path, std::optional<Dims> dims, std::optional<BasisChoice> basis) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::io, "cannot open input file " + path);
  return read_sample_csv(in, std::move(dims), basis);
}

void write_sample_csv(const FunctionalGridSample& sample, std::ostream& out) {
  out << "# dims=";
  for (std::size_t i = 0; i < sample.dims().size(); ++i) out << (i ? "," : "") << sample.dims()[i];
  out << " basis=" << (sample.basis().kind() == BasisKind::fourier ? "fourier" : "bspline")
      << " k=" << sample.dimension() << '\n';
  for (std::size_t j = 0; j < sample.dimension(); ++j) out << (j ? "," : "") << "coef_" << j + 1;
  out << '\n';
  const RealMatrix& x = sample.coeffs();
  for (std::size_t s = 0; s < x.rows(); ++s) {
    for (std::size_t j = 0; j < x.cols(); ++j) out << (j ? "," : "") << num(x(s, j));
    out << '\n';
  }
}

void write_sample_csv(const FunctionalGridSample& sample, const std::string& path) {
  std::ofstream out(path);
  if (!out) fail(ErrorKind::io, "cannot write " + path);
  write_sample_csv(sample, out);
  if (!out) fail(ErrorKind::io, "write to " + path + " failed");
}

std::string format_spectrum_csv(const EigenField& eig) {
  std::ostringstream os;
  const std::size_t d = eig.grid.d();
  os << "node";
  for (std::size_t i = 0; i < d; ++i) os << ",theta_" << i + 1;
  for (std::size_t m = 0; m < eig.dimension; ++m) os << ",lambda_" << m + 1;
  os << ",trace\n";
  for (std::size_t node = 0; node < eig.grid.size(); ++node) {
    os << node;
    for (double t : eig.grid.theta(node)) os << ',' << num(t);
    for (double v : eig.values[node]) os << ',' << num(v);
    os << ',' << num(eig.traces[node]) << '\n';
  }
  return os.str();
}

std::string format_filters_csv(const SfpcFilterBank& bank) {
  std::ostringstream os;
  os << "level";
  for (std::size_t i = 0; i < bank.d(); ++i) os << ",l_" << i + 1;
  for (std::size_t j = 0; j < bank.dimension(); ++j) os << ",coef_" << j + 1;
  os << '\n';
  for (std::size_t m = 0; m < bank.levels(); ++m)
    for (std::size_t li = 0; li < bank.lag_count(); ++li) {
      os << m + 1;
      for (long l : bank.lag(li)) os << ',' << l;
      for (double c : bank.filter(m, li)) os << ',' << num(c);
      os << '\n';
    }
  return os.str();
}

}  // namespace sfield
