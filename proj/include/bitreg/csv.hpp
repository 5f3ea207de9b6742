#pragma once

#include <Eigen/Core>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace bitreg {

struct CsvOptions {
  bool header = false;
  /// Response column (0-based); defaults to the last column.
  std::optional<std::size_t> yColumn;
  char delimiter = ',';
};

struct RegressionTable {
  Eigen::MatrixXd X;
  Eigen::VectorXd y;
  std::vector<std::string> names;  // predictor names when a header was read
};

/// Reads numeric rows. Empty, non-numeric or missing fields and ragged rows
/// throw DataError with the line number.
RegressionTable readRegressionCsv(std::istream& in, const CsvOptions& opt = {});

void writeRegressionCsv(std::ostream& out, const Eigen::Ref<const Eigen::MatrixXd>& X,
                        const Eigen::Ref<const Eigen::VectorXd>& y);

}  // namespace bitreg
