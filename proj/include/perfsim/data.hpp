#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>

#include "perfsim/rng.hpp"

namespace perfsim {

// Feature matrix plus binary labels. After preprocess() every column has
// mean 0 and standard deviation 1 under the population convention
// (divide by n); the transformation parameters are kept for provenance.
struct Dataset {
  Eigen::MatrixXd features;  // n x d
  Eigen::VectorXd labels;    // n, entries in {0, 1}
  Eigen::VectorXd feature_means;
  Eigen::VectorXd feature_stds;
  std::int64_t rows_dropped = 0;

  Eigen::Index n() const { return features.rows(); }
  Eigen::Index d() const { return features.cols(); }
};

struct CsvLoadOptions {
  std::string label_column;
  // When > 0, keep the first row_cap rows after a seeded shuffle.
  std::int64_t row_cap = 0;
  std::uint64_t shuffle_seed = 0;
};

// Comma-separated, header row, UTF-8, '.' decimal. Rows with missing cells
// ("", "NA", "na", "N/A") are dropped and counted; any other non-numeric
// cell is a parse error naming the row and column.
Dataset load_credit_csv(const std::string& path, const CsvLoadOptions& options);

// Standardize each feature column to zero mean and unit standard deviation
// (population convention). Labels pass through. Errors on constant columns.
Dataset preprocess(const Dataset& raw);

// Desk-scale substitute for the credit file: standardized Gaussian features
// and labels from a fixed logistic ground truth. Deterministic in seed.
Dataset synthetic_credit(std::int64_t n, std::int64_t d, double label_balance,
                         std::uint64_t seed);

}  // namespace perfsim
