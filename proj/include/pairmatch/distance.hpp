#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace pairmatch {

/// N candidate units with p covariates each. Row i of the covariate matrix
/// belongs to ids()[i].
class UnitTable {
 public:
  /// Throws InvariantViolation unless N >= 2, p >= 1, every value is finite,
  /// ids are unique and ids.size() == covariates.rows().
  UnitTable(std::vector<std::string> ids, Eigen::MatrixXd covariates);

  /// Same as above with ids "u1".."uN". An empty id list in the constructor
  /// above also means default ids.
  explicit UnitTable(Eigen::MatrixXd covariates);

  std::size_t size() const { return static_cast<std::size_t>(covariates_.rows()); }
  std::size_t dimension() const { return static_cast<std::size_t>(covariates_.cols()); }
  const std::vector<std::string>& ids() const { return ids_; }
  const Eigen::MatrixXd& covariates() const { return covariates_; }

 private:
  std::vector<std::string> ids_;
  Eigen::MatrixXd covariates_;
};

/// Sample covariance S (denominator N-1) and precision = inverse(S + ridge*I).
struct CovarianceModel {
  Eigen::MatrixXd covariance;
  Eigen::MatrixXd precision;
  double ridge = 0.0;
};

enum class DistanceForm { root, squared };

std::string_view to_string(DistanceForm form);
/// Accepts "root" or "squared"; throws UsageError otherwise.
DistanceForm parse_distance_form(std::string_view text);

/// Symmetric, nonnegative, zero-diagonal, finite n x n matrix.
class DistanceMatrix {
 public:
  /// Validates the invariants. Non-finite entries throw NonFiniteWeight, the
  /// others throw InvariantViolation.
  explicit DistanceMatrix(Eigen::MatrixXd values, DistanceForm form = DistanceForm::root);

  std::size_t size() const { return static_cast<std::size_t>(values_.rows()); }
  double operator()(std::size_t i, std::size_t j) const {
    return values_(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
  }
  const Eigen::MatrixXd& values() const { return values_; }
  DistanceForm form() const { return form_; }

  /// Rows/columns restricted to `indices`, in that order.
  DistanceMatrix submatrix(const std::vector<std::size_t>& indices) const;

 private:
  Eigen::MatrixXd values_;
  DistanceForm form_;
};

/// Condition numbers above this are treated as singular when ridge is 0.
inline constexpr double kSingularConditionLimit = 1e12;

/// Throws SingularCovariance when ridge == 0 and S is numerically singular.
CovarianceModel estimate_covariance(const UnitTable& table, double ridge = 0.0);

/// Pairwise (x_i - x_j)' P (x_i - x_j), or its square root for form root.
/// Throws DimensionMismatch if cov does not have the table's p.
DistanceMatrix mahalanobis_matrix(const UnitTable& table, const CovarianceModel& cov,
                                  DistanceForm form = DistanceForm::root);

}  // namespace pairmatch
