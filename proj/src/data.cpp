#include "perfsim/data.hpp"

#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "perfsim/loss.hpp"

namespace perfsim {
namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, ',')) cells.push_back(trim(cell));
  if (!line.empty() && line.back() == ',') cells.push_back("");
  return cells;
}

bool is_missing(const std::string& cell) {
  return cell.empty() || cell == "NA" || cell == "na" || cell == "N/A";
}

double parse_cell(const std::string& cell, std::size_t row, std::size_t col) {
  std::size_t pos = 0;
  double v = 0.0;
  try {
    v = std::stod(cell, &pos);
  } catch (const std::exception&) {
    pos = 0;
  }
  if (pos != cell.size()) {
    std::ostringstream msg;
    msg << "csv: non-numeric cell '" << cell << "' at row " << row
        << ", column " << col + 1;
    throw std::runtime_error(msg.str());
  }
  return v;
}

}  // namespace

Dataset load_credit_csv(const std::string& path, const CsvLoadOptions& options) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("csv: cannot open '" + path + "'");

  std::string line;
  if (!std::getline(in, line))
    throw std::runtime_error("csv: '" + path + "' is empty, no header row");
  const std::vector<std::string> header = split_csv_line(line);

  std::size_t label_col = header.size();
  for (std::size_t j = 0; j < header.size(); ++j)
    if (header[j] == options.label_column) label_col = j;
  if (label_col == header.size())
    throw std::runtime_error("csv: no label column '" + options.label_column +
                             "' in header of '" + path + "'");
  if (header.size() < 2)
    throw std::runtime_error("csv: need at least one feature column");

  const std::size_t d = header.size() - 1;
  std::vector<std::vector<double>> rows;
  std::vector<double> labels;
  std::int64_t dropped = 0;

  std::size_t row_no = 1;  // header is row 1
  while (std::getline(in, line)) {
    ++row_no;
    if (trim(line).empty()) continue;
    const std::vector<std::string> cells = split_csv_line(line);
    if (cells.size() != header.size()) {
      std::ostringstream msg;
      msg << "csv: row " << row_no << " has " << cells.size()
          << " cells, expected " << header.size();
      throw std::runtime_error(msg.str());
    }
    bool missing = false;
    for (const auto& c : cells)
      if (is_missing(c)) missing = true;
    if (missing) {
      ++dropped;
      continue;
    }
    std::vector<double> feat;
    feat.reserve(d);
    double label = 0.0;
    for (std::size_t j = 0; j < cells.size(); ++j) {
      const double v = parse_cell(cells[j], row_no, j);
      if (j == label_col) {
        if (v != 0.0 && v != 1.0) {
          std::ostringstream msg;
          msg << "csv: label " << v << " at row " << row_no
              << " is not in {0, 1}";
          throw std::runtime_error(msg.str());
        }
        label = v;
      } else {
        feat.push_back(v);
      }
    }
    rows.push_back(std::move(feat));
    labels.push_back(label);
  }

  if (rows.empty()) throw std::runtime_error("csv: no usable rows in '" + path + "'");

  std::vector<std::size_t> order(rows.size());
  std::iota(order.begin(), order.end(), 0);
  if (options.row_cap > 0) {
    Rng rng(options.shuffle_seed);
    for (std::size_t i = order.size() - 1; i > 0; --i) {
      const std::size_t j = rng.uniform_index(i + 1);
      std::swap(order[i], order[j]);
    }
    order.resize(std::min<std::size_t>(order.size(),
                                       static_cast<std::size_t>(options.row_cap)));
  }

  Dataset out;
  out.features.resize(static_cast<Eigen::Index>(order.size()),
                      static_cast<Eigen::Index>(d));
  out.labels.resize(static_cast<Eigen::Index>(order.size()));
  for (std::size_t i = 0; i < order.size(); ++i) {
    for (std::size_t j = 0; j < d; ++j)
      out.features(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          rows[order[i]][j];
    out.labels[static_cast<Eigen::Index>(i)] = labels[order[i]];
  }
  out.rows_dropped = dropped;
  return out;
}

Dataset preprocess(const Dataset& raw) {
  const Eigen::Index n = raw.n();
  const Eigen::Index d = raw.d();
  if (n < 2) throw std::invalid_argument("preprocess: need at least 2 rows");

  Dataset out = raw;
  out.feature_means.resize(d);
  out.feature_stds.resize(d);
  for (Eigen::Index j = 0; j < d; ++j) {
    const double mean = raw.features.col(j).mean();
    const double var =
        (raw.features.col(j).array() - mean).square().sum() / static_cast<double>(n);
    const double sd = std::sqrt(var);
    if (sd < 1e-12) {
      std::ostringstream msg;
      msg << "preprocess: feature column " << j << " is constant";
      throw std::invalid_argument(msg.str());
    }
    out.features.col(j) = (raw.features.col(j).array() - mean) / sd;
    out.feature_means[j] = mean;
    out.feature_stds[j] = sd;
  }
  return out;
}

Dataset synthetic_credit(std::int64_t n, std::int64_t d, double label_balance,
                         std::uint64_t seed) {
  if (n < 10) throw std::invalid_argument("synthetic_credit: n must be >= 10");
  if (d < 1) throw std::invalid_argument("synthetic_credit: d must be >= 1");
  if (!(label_balance > 0.0 && label_balance < 1.0))
    throw std::invalid_argument("synthetic_credit: label_balance in (0,1) required");

  Rng rng(seed);
  Dataset raw;
  raw.features.resize(n, d);
  raw.labels.resize(n);

  // Fixed ground truth: alternating-sign weights of norm 2, intercept set by
  // the requested positive rate.
  Eigen::VectorXd w0(d);
  for (Eigen::Index j = 0; j < d; ++j)
    w0[j] = (j % 2 == 0 ? 2.0 : -2.0) / std::sqrt(static_cast<double>(d));
  const double b0 = std::log(label_balance / (1.0 - label_balance));

  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < d; ++j) raw.features(i, j) = rng.normal();
    const double p = sigmoid(raw.features.row(i).dot(w0) + b0);
    raw.labels[i] = rng.bernoulli(p) ? 1.0 : 0.0;
  }
  return preprocess(raw);
}

}  // namespace perfsim
