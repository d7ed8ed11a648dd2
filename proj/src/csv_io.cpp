#include "robustsi/csv_io.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "robustsi/errors.h"

namespace robustsi {

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          cur.push_back('"');
          ++i;
        } else {
          quoted = false;
        }
      } else {
        cur.push_back(c);
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(std::move(cur));
      cur.clear();
    } else if (c != '\r') {
      cur.push_back(c);
    }
  }
  fields.push_back(std::move(cur));
  return fields;
}

std::vector<std::vector<std::string>> read_rows(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open file: " + path);
  std::vector<std::vector<std::string>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() && in.peek() == EOF) break;
    rows.push_back(split_csv_line(line));
  }
  if (rows.empty()) throw ParseError("empty CSV: " + path);
  return rows;
}

double parse_cell(const std::string& cell, int data_row,
                  const std::string& column) {
  const char* begin = cell.c_str();
  char* end = nullptr;
  const double v = std::strtod(begin, &end);
  // Trailing whitespace is fine; anything else is a malformed number.
  while (end && *end == ' ') ++end;
  if (end == begin || (end && *end != '\0') || !std::isfinite(v)) {
    throw ParseError("row " + std::to_string(data_row) + ", column \"" +
                     column + "\": cannot parse \"" + cell +
                     "\" as a finite real");
  }
  return v;
}

void append_number(std::string* out, double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  out->append(buf);
}

}  // namespace

Dataset ingest_csv(const std::string& path, const std::string& response_column,
                   const std::vector<std::string>& feature_columns,
                   bool add_intercept, double sigma2,
                   const std::optional<Eigen::MatrixXd>& Sigma) {
  const auto rows = read_rows(path);
  const auto& header = rows.front();
  auto column_index = [&](const std::string& name) {
    const auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) {
      throw MissingColumn("column \"" + name + "\" not found in " + path);
    }
    return static_cast<int>(it - header.begin());
  };
  const int y_col = column_index(response_column);
  std::vector<int> x_cols;
  for (const auto& name : feature_columns) x_cols.push_back(column_index(name));

  const int n = static_cast<int>(rows.size()) - 1;
  const int d_raw = static_cast<int>(x_cols.size());
  const int d = d_raw + (add_intercept ? 1 : 0);
  if (n < 2) throw ParseError("need at least 2 data rows, got " +
                              std::to_string(n));
  Eigen::MatrixXd X(n, d);
  Eigen::VectorXd y(n);
  for (int i = 0; i < n; ++i) {
    const auto& row = rows[i + 1];
    if (row.size() != header.size()) {
      throw ParseError("row " + std::to_string(i + 1) + " has " +
                       std::to_string(row.size()) + " fields, header has " +
                       std::to_string(header.size()));
    }
    if (add_intercept) X(i, 0) = 1.0;
    for (int j = 0; j < d_raw; ++j) {
      X(i, j + (add_intercept ? 1 : 0)) =
          parse_cell(row[x_cols[j]], i + 1, feature_columns[j]);
    }
    y(i) = parse_cell(row[y_col], i + 1, response_column);
  }
  Eigen::MatrixXd cov = Sigma.has_value()
                            ? *Sigma
                            : Eigen::MatrixXd(sigma2 *
                                              Eigen::MatrixXd::Identity(n, n));
  return Dataset(std::move(X), std::move(y), std::move(cov));
}

Eigen::MatrixXd read_matrix_csv(const std::string& path) {
  const auto rows = read_rows(path);
  const int n = static_cast<int>(rows.size());
  const int m = static_cast<int>(rows.front().size());
  Eigen::MatrixXd M(n, m);
  for (int i = 0; i < n; ++i) {
    if (static_cast<int>(rows[i].size()) != m) {
      throw ParseError("matrix row " + std::to_string(i + 1) +
                       " has inconsistent width");
    }
    for (int j = 0; j < m; ++j) {
      M(i, j) = parse_cell(rows[i][j], i + 1, "col" + std::to_string(j + 1));
    }
  }
  return M;
}

std::string emit_dataset_csv(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                             const std::vector<std::string>& feature_names,
                             const std::string& response_name) {
  if (static_cast<Eigen::Index>(feature_names.size()) != X.cols()) {
    throw DimensionMismatch("one feature name per X column required");
  }
  std::string out;
  for (const auto& name : feature_names) {
    out += name;
    out += ',';
  }
  out += response_name;
  out += '\n';
  for (Eigen::Index i = 0; i < X.rows(); ++i) {
    for (Eigen::Index j = 0; j < X.cols(); ++j) {
      append_number(&out, X(i, j));
      out += ',';
    }
    append_number(&out, y(i));
    out += '\n';
  }
  return out;
}

}  // namespace robustsi
