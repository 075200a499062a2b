#include "svrpl/ingest.hpp"

#include "svrpl/metrics.hpp"

#include <cerrno>
#include <cstdlib>
#include <fstream>
#include <numeric>
#include <sstream>

namespace svrpl {

namespace {

Error data_error(const std::string& source, std::size_t line, const std::string& what) {
  return Error(ErrorKind::Data, source + ":" + std::to_string(line) + ": " + what);
}

bool parse_double(const std::string& s, double& out) {
  if (s.empty()) return false;
  errno = 0;
  char* end = nullptr;
  out = std::strtod(s.c_str(), &end);
  return end == s.c_str() + s.size() && errno != ERANGE && std::isfinite(out);
}

bool parse_index(const std::string& s, std::uint32_t& out) {
  if (s.empty() || s.find_first_not_of("0123456789") != std::string::npos) return false;
  errno = 0;
  const unsigned long long v = std::strtoull(s.c_str(), nullptr, 10);
  if (errno == ERANGE || v == 0 || v > 0xffffffffULL) return false;
  out = static_cast<std::uint32_t>(v);
  return true;
}

std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::Data, "cannot open " + path.string());
  return in;
}

std::ofstream open_output(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::Data, "cannot open " + path.string() + " for writing");
  return out;
}

}  // namespace

LabeledDataset read_libsvm(std::istream& in, const LibsvmOptions& options, const std::string& source) {
  LabeledDataset data;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::istringstream tokens(line);
    std::string tok;
    if (!(tokens >> tok)) continue;

    double raw = 0.0;
    if (!parse_double(tok, raw)) throw data_error(source, lineno, "bad label '" + tok + "'");
    LabeledRow row;
    if (options.two_labels) {
      if (raw == options.two_labels->first) row.label = 1.0;
      else if (raw == options.two_labels->second) row.label = -1.0;
      else continue;
    } else {
      row.label = raw > 0.0 ? 1.0 : -1.0;
    }

    std::uint32_t last = 0;
    while (tokens >> tok) {
      const auto colon = tok.find(':');
      if (colon == std::string::npos) throw data_error(source, lineno, "expected idx:val, got '" + tok + "'");
      std::uint32_t idx = 0;
      double val = 0.0;
      if (!parse_index(tok.substr(0, colon), idx))
        throw data_error(source, lineno, "bad feature index in '" + tok + "'");
      if (!parse_double(tok.substr(colon + 1), val))
        throw data_error(source, lineno, "bad feature value in '" + tok + "'");
      if (idx <= last) throw data_error(source, lineno, "feature indices must be ascending");
      last = idx;
      row.features.emplace_back(idx, val);
    }
    data.dim = std::max(data.dim, last);
    data.rows.push_back(std::move(row));
  }
  return data;
}

LabeledDataset read_libsvm(const std::filesystem::path& path, const LibsvmOptions& options) {
  auto in = open_input(path);
  return read_libsvm(in, options, path.string());
}

void write_libsvm(const LabeledDataset& data, std::ostream& out) {
  for (const auto& row : data.rows) {
    out << (row.label > 0.0 ? "+1" : "-1");
    for (const auto& [idx, val] : row.features) out << ' ' << idx << ':' << format_real(val);
    out << '\n';
  }
}

void write_libsvm(const LabeledDataset& data, const std::filesystem::path& path) {
  auto out = open_output(path);
  write_libsvm(data, out);
}

ReturnsTable read_returns_csv(std::istream& in, bool skip_header, const std::string& source) {
  std::vector<std::vector<double>> rows;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (lineno == 1 && skip_header) continue;
    if (line.empty()) continue;
    std::vector<double> row;
    std::stringstream cells(line);
    std::string cell;
    while (std::getline(cells, cell, ',')) {
      const auto b = cell.find_first_not_of(" \t");
      const auto e = cell.find_last_not_of(" \t");
      const std::string trimmed = b == std::string::npos ? "" : cell.substr(b, e - b + 1);
      double v = 0.0;
      if (!parse_double(trimmed, v)) throw data_error(source, lineno, "bad number '" + cell + "'");
      row.push_back(v);
    }
    if (!line.empty() && line.back() == ',') throw data_error(source, lineno, "trailing comma");
    if (!rows.empty() && row.size() != rows.front().size())
      throw data_error(source, lineno,
                       "row " + std::to_string(rows.size() + 1) + " has " + std::to_string(row.size()) +
                           " columns, expected " + std::to_string(rows.front().size()));
    rows.push_back(std::move(row));
  }
  ReturnsTable table;
  const auto cols = rows.empty() ? 0 : static_cast<Eigen::Index>(rows.front().size());
  table.values.resize(static_cast<Eigen::Index>(rows.size()), cols);
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (Eigen::Index j = 0; j < cols; ++j) table.values(static_cast<Eigen::Index>(i), j) = rows[i][j];
  return table;
}

ReturnsTable read_returns_csv(const std::filesystem::path& path, bool skip_header) {
  auto in = open_input(path);
  return read_returns_csv(in, skip_header, path.string());
}

void write_returns_csv(const ReturnsTable& table, std::ostream& out) {
  for (Eigen::Index i = 0; i < table.values.rows(); ++i) {
    for (Eigen::Index j = 0; j < table.values.cols(); ++j) {
      if (j) out << ',';
      out << format_real(table.values(i, j));
    }
    out << '\n';
  }
}

void write_returns_csv(const ReturnsTable& table, const std::filesystem::path& path) {
  auto out = open_output(path);
  write_returns_csv(table, out);
}

namespace {

std::vector<std::size_t> draw_without_replacement(std::size_t size, std::size_t count,
                                                  std::uint64_t seed) {
  if (count > size)
    throw invalid_argument("subsample: asked for " + std::to_string(count) + " of " +
                           std::to_string(size) + " rows");
  std::vector<std::size_t> idx(size);
  std::iota(idx.begin(), idx.end(), 0);
  Rng rng(seed);
  // Partial Fisher-Yates.
  for (std::size_t i = 0; i < count; ++i) {
    const auto j = i + static_cast<std::size_t>(uniform_token(rng, size - i) - 1);
    std::swap(idx[i], idx[j]);
  }
  idx.resize(count);
  return idx;
}

}  // namespace

LabeledDataset subsample(const LabeledDataset& data, std::size_t count, std::uint64_t seed) {
  LabeledDataset out;
  for (auto i : draw_without_replacement(data.rows.size(), count, seed)) {
    out.rows.push_back(data.rows[i]);
    if (!data.rows[i].features.empty())
      out.dim = std::max(out.dim, data.rows[i].features.back().first);
  }
  return out;
}

ReturnsTable subsample(const ReturnsTable& table, std::size_t count, std::uint64_t seed) {
  const auto idx = draw_without_replacement(static_cast<std::size_t>(table.values.rows()), count, seed);
  ReturnsTable out;
  out.values.resize(static_cast<Eigen::Index>(count), table.values.cols());
  for (std::size_t i = 0; i < idx.size(); ++i)
    out.values.row(static_cast<Eigen::Index>(i)) = table.values.row(static_cast<Eigen::Index>(idx[i]));
  return out;
}

MultiLossInstance to_multiloss(const LabeledDataset& data, double beta, double scale,
                               std::optional<std::uint32_t> dim) {
  const std::uint32_t n = dim.value_or(data.dim);
  if (n < data.dim)
    throw Error(ErrorKind::Data, "dataset uses feature " + std::to_string(data.dim) +
                                     " but the dimension is " + std::to_string(n));
  if (n == 0) throw Error(ErrorKind::Data, "dataset has no features");
  MultiLossInstance inst;
  inst.features = Matrix::Zero(static_cast<Eigen::Index>(data.rows.size()), n);
  inst.labels.resize(static_cast<Eigen::Index>(data.rows.size()));
  for (std::size_t i = 0; i < data.rows.size(); ++i) {
    const auto r = static_cast<Eigen::Index>(i);
    for (const auto& [idx, val] : data.rows[i].features) inst.features(r, idx - 1) = scale * val;
    inst.labels[r] = data.rows[i].label;
  }
  inst.beta = beta;
  return inst;
}

PortfolioInstance to_portfolio(const ReturnsTable& table, double beta, double rho, double gamma) {
  PortfolioInstance inst;
  inst.returns = table.values;
  inst.beta = beta;
  inst.rho = rho;
  inst.gamma = gamma;
  inst.validate();
  return inst;
}

}  // namespace svrpl
