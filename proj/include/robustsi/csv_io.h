#pragma once

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <vector>

#include "robustsi/types.h"

namespace robustsi {

// RFC-4180-style CSV with a required header row (quoted fields and embedded
// commas supported; UTF-8 passes through). Every referenced cell must parse
// as a finite real; failures raise ParseError naming the data row (1-based,
// header excluded) and column.
Dataset ingest_csv(const std::string& path, const std::string& response_column,
                   const std::vector<std::string>& feature_columns,
                   bool add_intercept, double sigma2,
                   const std::optional<Eigen::MatrixXd>& Sigma = std::nullopt);

// Headerless numeric CSV holding an n x n covariance matrix.
Eigen::MatrixXd read_matrix_csv(const std::string& path);

// Feature columns followed by the response, 17 significant digits (exact
// double round trip through ingest_csv).
std::string emit_dataset_csv(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                             const std::vector<std::string>& feature_names,
                             const std::string& response_name);

}  // namespace robustsi
