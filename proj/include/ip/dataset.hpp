#pragma once

#include <Eigen/Core>
#include <string>
#include <utility>
#include <vector>

#include "ip/types.hpp"

namespace ip {

// Immutable after construction; safe to share read-only across threads.
// All sample moments throughout the library use the n-denominator convention.
struct Dataset {
  Eigen::MatrixXd x;  // n x p covariates
  Eigen::VectorXd y;  // n responses
  bool standardized = false;

  Eigen::Index n() const noexcept { return x.rows(); }
  Eigen::Index p() const noexcept { return x.cols(); }

  // Enforces n >= 3, p >= 1, finite entries, matching y length.
  void validate() const;
};

// Column transform applied by standardize(); kept around so the same map can
// be applied to test data and inverted.
struct StandardizeParams {
  Eigen::VectorXd mean;
  Eigen::VectorXd sd;  // n-denominator standard deviation
};

// Replaces each column by (x_j - mean_j)/sd_j; y untouched.
// Throws InputError naming the (1-based) column if one is constant.
std::pair<Dataset, StandardizeParams> standardize(const Dataset& d);

// Applies a stored transform to fresh data (e.g. a test set).
Dataset apply_standardization(const Dataset& d, const StandardizeParams& params);

struct CsvOptions {
  bool has_header = true;
};

struct LoadedCsv {
  Dataset data;
  std::vector<std::string> covariate_names;
  std::string response_name;
  std::vector<std::string> warnings;
};

// response_column is a header name, or a 1-based column index when the file
// has no header (an integer string is accepted either way).
LoadedCsv load_csv(const std::string& path, const std::string& response_column,
                   const CsvOptions& opts = {});

// Writes covariate columns then the response, with a header row. Numbers are
// rendered as shortest round-trip decimals (<= 17 significant digits).
void save_csv(const Dataset& d, const std::string& path,
              const std::vector<std::string>& covariate_names = {},
              const std::string& response_name = "y");

// Shortest decimal string that parses back to exactly the same double.
std::string format_double(double v);

}  // namespace ip
