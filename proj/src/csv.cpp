#include "bitreg/csv.hpp"

#include <charconv>
#include <cmath>
#include <istream>
#include <ostream>
#include <string_view>

#include "bitreg/error.hpp"

namespace bitreg {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split(std::string_view line, char delim) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    const auto pos = line.find(delim, start);
    out.push_back(trim(line.substr(start, pos == std::string_view::npos ? pos : pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

double parseField(std::string_view field, std::size_t line, std::size_t col) {
  auto fail = [&](const char* why) {
    return DataError("line " + std::to_string(line) + ", column " + std::to_string(col + 1) + ": " + why);
  };
  if (field.empty()) throw fail("missing value");
  if (field.front() == '+') field.remove_prefix(1);
  double v = 0.0;
  const auto res = std::from_chars(field.data(), field.data() + field.size(), v);
  if (res.ec != std::errc() || res.ptr != field.data() + field.size()) throw fail("not a number");
  if (!std::isfinite(v)) throw fail("missing value");
  return v;
}

}  // namespace

RegressionTable readRegressionCsv(std::istream& in, const CsvOptions& opt) {
  std::vector<std::vector<double>> rows;
  std::vector<std::string> header;
  std::size_t cols = 0;
  std::size_t lineNo = 0;
  std::string line;
  while (std::getline(in, line)) {
    ++lineNo;
    if (trim(line).empty()) continue;
    const auto fields = split(line, opt.delimiter);
    if (opt.header && header.empty() && rows.empty()) {
      for (const auto f : fields) header.emplace_back(f);
      cols = fields.size();
      continue;
    }
    if (cols == 0) cols = fields.size();
    if (fields.size() != cols) {
      throw DataError("line " + std::to_string(lineNo) + ": expected " + std::to_string(cols) + " fields, found " +
                      std::to_string(fields.size()));
    }
    std::vector<double> row(cols);
    for (std::size_t c = 0; c < cols; ++c) row[c] = parseField(fields[c], lineNo, c);
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw DataError("no data rows");
  if (cols < 2) throw DataError("need at least one predictor column and a response column");
  const std::size_t yCol = opt.yColumn.value_or(cols - 1);
  if (yCol >= cols) throw InvalidArgument("response column " + std::to_string(yCol) + " out of range");

  RegressionTable t;
  t.X.resize(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(cols - 1));
  t.y.resize(static_cast<Eigen::Index>(rows.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    Eigen::Index k = 0;
    for (std::size_t c = 0; c < cols; ++c) {
      if (c == yCol) {
        t.y(static_cast<Eigen::Index>(i)) = rows[i][c];
      } else {
        t.X(static_cast<Eigen::Index>(i), k++) = rows[i][c];
      }
    }
  }
  for (std::size_t c = 0; c < header.size(); ++c) {
    if (c != yCol) t.names.push_back(header[c]);
  }
  return t;
}

void writeRegressionCsv(std::ostream& out, const Eigen::Ref<const Eigen::MatrixXd>& X,
                        const Eigen::Ref<const Eigen::VectorXd>& y) {
  char buf[64];
  auto put = [&](double v) {
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    out.write(buf, res.ptr - buf);
  };
  for (Eigen::Index i = 0; i < X.rows(); ++i) {
    for (Eigen::Index j = 0; j < X.cols(); ++j) {
      put(X(i, j));
      out << ',';
    }
    put(y(i));
    out << '\n';
  }
}

}  // namespace bitreg
