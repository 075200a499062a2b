#pragma once

#include "svrpl/problems.hpp"
#include "svrpl/types.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace svrpl {

struct LabeledRow {
  std::vector<std::pair<std::uint32_t, double>> features;  // 1-based, ascending
  double label = 1.0;                                      // +1 or -1

  bool operator==(const LabeledRow&) const = default;
};

struct LabeledDataset {
  std::vector<LabeledRow> rows;
  std::uint32_t dim = 0;  // largest feature index seen

  bool operator==(const LabeledDataset&) const = default;
};

struct LibsvmOptions {
  // Keep only rows whose raw label is one of these two; the first becomes +1
  // and the second -1. Without it, labels > 0 map to +1 and the rest to -1.
  std::optional<std::pair<double, double>> two_labels;
};

// "label idx:val idx:val ..." per line; blank lines are skipped and CRLF is
// accepted. Malformed lines raise a data error naming the line.
LabeledDataset read_libsvm(std::istream& in, const LibsvmOptions& options = {},
                           const std::string& source = "<stream>");
LabeledDataset read_libsvm(const std::filesystem::path& path, const LibsvmOptions& options = {});

void write_libsvm(const LabeledDataset& data, std::ostream& out);
void write_libsvm(const LabeledDataset& data, const std::filesystem::path& path);

struct ReturnsTable {
  Matrix values;  // periods x assets
};

ReturnsTable read_returns_csv(std::istream& in, bool skip_header = false,
                              const std::string& source = "<stream>");
ReturnsTable read_returns_csv(const std::filesystem::path& path, bool skip_header = false);

void write_returns_csv(const ReturnsTable& table, std::ostream& out);
void write_returns_csv(const ReturnsTable& table, const std::filesystem::path& path);

// `count` rows drawn uniformly without replacement, in draw order.
LabeledDataset subsample(const LabeledDataset& data, std::size_t count, std::uint64_t seed);
ReturnsTable subsample(const ReturnsTable& table, std::size_t count, std::uint64_t seed);

// Dense features multiplied by `scale` (1/255 turns MNIST pixels into [0, 1]).
// `dim` pads or checks the feature width; defaults to data.dim.
MultiLossInstance to_multiloss(const LabeledDataset& data, double beta, double scale = 1.0,
                               std::optional<std::uint32_t> dim = std::nullopt);

PortfolioInstance to_portfolio(const ReturnsTable& table, double beta, double rho, double gamma);

}  // namespace svrpl
