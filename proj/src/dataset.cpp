#include "ip/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace ip {

std::string FeatureId::name() const {
  if (is_main()) return "x" + std::to_string(first_ + 1);
  return "x" + std::to_string(first_ + 1) + ":x" + std::to_string(second_ + 1);
}

FeatureId FeatureId::parse(const std::string& text) {
  auto parse_one = [](const std::string& s) -> int {
    if (s.size() < 2 || s[0] != 'x')
      throw InputError("bad feature name '" + s + "'");
    int v = 0;
    auto [ptr, ec] = std::from_chars(s.data() + 1, s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size() || v < 1)
      throw InputError("bad feature name '" + s + "'");
    return v - 1;
  };
  auto colon = text.find(':');
  if (colon == std::string::npos) return FeatureId::main(parse_one(text));
  return FeatureId::interaction(parse_one(text.substr(0, colon)),
                                parse_one(text.substr(colon + 1)));
}

TrueSets true_sets(const TrueModel& m) {
  TrueSets s;
  for (const auto& [kl, v] : m.gamma) {
    s.interactions.insert(kl);
    s.interaction_vars.insert(kl.first);
    s.interaction_vars.insert(kl.second);
  }
  for (const auto& [j, v] : m.beta) s.main_effects.insert(j);
  s.important_features = s.interaction_vars;
  s.important_features.insert(s.main_effects.begin(), s.main_effects.end());
  return s;
}

void Dataset::validate() const {
  if (x.rows() < 3) throw InputError("need at least 3 rows");
  if (x.cols() < 1) throw InputError("need at least 1 covariate");
  if (y.size() != x.rows())
    throw InputError("response length does not match row count");
  if (!x.allFinite() || !y.allFinite())
    throw InputError("non-finite entries in dataset");
}

std::pair<Dataset, StandardizeParams> standardize(const Dataset& d) {
  d.validate();
  const Eigen::Index n = d.n(), p = d.p();
  StandardizeParams params;
  params.mean.resize(p);
  params.sd.resize(p);
  Dataset out = d;
  for (Eigen::Index j = 0; j < p; ++j) {
    const double mean = d.x.col(j).mean();
    const double var = (d.x.col(j).array() - mean).square().sum() / double(n);
    if (var <= 0.0)
      throw InputError("constant column " + std::to_string(j + 1));
    const double sd = std::sqrt(var);
    params.mean[j] = mean;
    params.sd[j] = sd;
    out.x.col(j) = (d.x.col(j).array() - mean) / sd;
  }
  out.standardized = true;
  return {std::move(out), std::move(params)};
}

Dataset apply_standardization(const Dataset& d, const StandardizeParams& params) {
  if (params.mean.size() != d.p())
    throw InputError("standardization parameters do not match column count");
  Dataset out = d;
  for (Eigen::Index j = 0; j < d.p(); ++j)
    out.x.col(j) = (d.x.col(j).array() - params.mean[j]) / params.sd[j];
  out.standardized = true;
  return out;
}

std::string format_double(double v) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

namespace {

double parse_cell(const std::string& cell, std::size_t row1, std::size_t col1) {
  const char* begin = cell.data();
  const char* end = cell.data() + cell.size();
  while (begin < end && (*begin == ' ' || *begin == '\t')) ++begin;
  while (end > begin && (end[-1] == ' ' || end[-1] == '\t' || end[-1] == '\r'))
    --end;
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(begin, end, v);
  if (ec != std::errc() || ptr != end)
    throw InputError("cannot parse cell at row " + std::to_string(row1) +
                     ", column " + std::to_string(col1) + ": '" + cell + "'");
  if (!std::isfinite(v))
    throw InputError("non-finite value at row " + std::to_string(row1) +
                     ", column " + std::to_string(col1));
  return v;
}

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      cells.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur.push_back(c);
    }
  }
  cells.push_back(cur);
  return cells;
}

}  // namespace

LoadedCsv load_csv(const std::string& path, const std::string& response_column,
                   const CsvOptions& opts) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open file '" + path + "'");

  std::string line;
  std::vector<std::string> header;
  std::size_t line_no = 0;
  if (opts.has_header) {
    if (!std::getline(in, line)) throw InputError("empty file '" + path + "'");
    ++line_no;
    header = split_line(line);
    for (auto& h : header) {
      while (!h.empty() && (h.back() == ' ' || h.back() == '\r')) h.pop_back();
      while (!h.empty() && h.front() == ' ') h.erase(h.begin());
    }
  }

  std::vector<std::vector<double>> rows;
  std::size_t ncols = header.size();
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    auto cells = split_line(line);
    if (ncols == 0) ncols = cells.size();
    if (cells.size() != ncols)
      throw InputError("row " + std::to_string(line_no) + " has " +
                       std::to_string(cells.size()) + " cells, expected " +
                       std::to_string(ncols));
    std::vector<double> vals(ncols);
    for (std::size_t j = 0; j < ncols; ++j)
      vals[j] = parse_cell(cells[j], line_no, j + 1);
    rows.push_back(std::move(vals));
  }
  if (rows.empty()) throw InputError("no data rows in '" + path + "'");

  // Resolve the response column: by header name, else 1-based index.
  std::size_t resp = ncols;
  if (!header.empty()) {
    for (std::size_t j = 0; j < header.size(); ++j)
      if (header[j] == response_column) resp = j;
  }
  if (resp == ncols) {
    int idx = 0;
    auto [ptr, ec] = std::from_chars(
        response_column.data(), response_column.data() + response_column.size(),
        idx);
    if (ec == std::errc() &&
        ptr == response_column.data() + response_column.size() && idx >= 1 &&
        static_cast<std::size_t>(idx) <= ncols) {
      resp = static_cast<std::size_t>(idx - 1);
    }
  }
  if (resp == ncols)
    throw InputError("response column '" + response_column + "' not found");
  if (ncols < 2)
    throw InputError("need at least one covariate besides the response");

  LoadedCsv out;
  const std::size_t n = rows.size(), p = ncols - 1;
  out.data.x.resize(n, p);
  out.data.y.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t jj = 0;
    for (std::size_t j = 0; j < ncols; ++j) {
      if (j == resp)
        out.data.y[i] = rows[i][j];
      else
        out.data.x(i, jj++) = rows[i][j];
    }
  }
  if (!header.empty()) {
    out.response_name = header[resp];
    for (std::size_t j = 0; j < ncols; ++j)
      if (j != resp) out.covariate_names.push_back(header[j]);
  } else {
    out.response_name = "y";
    for (std::size_t j = 1; j + 1 <= p + 1; ++j)
      if (j - 1 != resp) out.covariate_names.push_back("x" + std::to_string(j));
    out.covariate_names.resize(p);
  }
  out.data.validate();
  if ((out.data.y.array() == out.data.y[0]).all())
    out.warnings.push_back("response column is constant");
  return out;
}

void save_csv(const Dataset& d, const std::string& path,
              const std::vector<std::string>& covariate_names,
              const std::string& response_name) {
  std::ofstream outf(path);
  if (!outf) throw InputError("cannot write file '" + path + "'");
  const Eigen::Index n = d.n(), p = d.p();
  for (Eigen::Index j = 0; j < p; ++j) {
    if (j < static_cast<Eigen::Index>(covariate_names.size()))
      outf << covariate_names[j];
    else
      outf << 'x' << (j + 1);
    outf << ',';
  }
  outf << response_name << '\n';
  std::string line;
  for (Eigen::Index i = 0; i < n; ++i) {
    line.clear();
    for (Eigen::Index j = 0; j < p; ++j) {
      line += format_double(d.x(i, j));
      line += ',';
    }
    line += format_double(d.y[i]);
    line += '\n';
    outf << line;
  }
  if (!outf) throw InputError("failed writing '" + path + "'");
}

}  // namespace ip
