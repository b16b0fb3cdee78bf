#include "pairmatch/distance.hpp"

#include "pairmatch/errors.hpp"

#include <cmath>
#include <unordered_set>
#include <utility>

namespace pairmatch {

namespace {

std::vector<std::string> default_ids(Eigen::Index n) {
  std::vector<std::string> ids;
  ids.reserve(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) ids.push_back("u" + std::to_string(i + 1));
  return ids;
}

}  // namespace

UnitTable::UnitTable(std::vector<std::string> ids, Eigen::MatrixXd covariates)
    : ids_(std::move(ids)), covariates_(std::move(covariates)) {
  if (ids_.empty()) ids_ = default_ids(covariates_.rows());
  if (covariates_.rows() < 2) throw InvariantViolation("unit table needs at least 2 units");
  if (covariates_.cols() < 1) throw InvariantViolation("unit table needs at least 1 covariate");
  if (ids_.size() != static_cast<std::size_t>(covariates_.rows())) {
    throw InvariantViolation("unit table has " + std::to_string(ids_.size()) + " ids for " +
                             std::to_string(covariates_.rows()) + " rows");
  }
  if (!covariates_.allFinite()) throw InvariantViolation("unit table contains a non-finite covariate");
  std::unordered_set<std::string_view> seen;
  for (const auto& id : ids_) {
    if (!seen.insert(id).second) throw InvariantViolation("duplicate unit id '" + id + "'");
  }
}

UnitTable::UnitTable(Eigen::MatrixXd covariates) : UnitTable({}, std::move(covariates)) {}

std::string_view to_string(DistanceForm form) {
  return form == DistanceForm::root ? "root" : "squared";
}

DistanceForm parse_distance_form(std::string_view text) {
  if (text == "root") return DistanceForm::root;
  if (text == "squared") return DistanceForm::squared;
  throw UsageError("unknown distance form '" + std::string(text) + "' (expected root or squared)");
}

DistanceMatrix::DistanceMatrix(Eigen::MatrixXd values, DistanceForm form)
    : values_(std::move(values)), form_(form) {
  const Eigen::Index n = values_.rows();
  if (values_.cols() != n) throw InvariantViolation("distance matrix is not square");
  if (!values_.allFinite()) throw NonFiniteWeight("distance matrix contains a non-finite weight");
  for (Eigen::Index i = 0; i < n; ++i) {
    if (values_(i, i) != 0.0) throw InvariantViolation("distance matrix has a nonzero diagonal entry");
    for (Eigen::Index j = i + 1; j < n; ++j) {
      if (values_(i, j) != values_(j, i)) throw InvariantViolation("distance matrix is not symmetric");
      if (values_(i, j) < 0.0) throw InvariantViolation("distance matrix has a negative weight");
    }
  }
}

DistanceMatrix DistanceMatrix::submatrix(const std::vector<std::size_t>& indices) const {
  const auto k = static_cast<Eigen::Index>(indices.size());
  Eigen::MatrixXd sub(k, k);
  for (Eigen::Index a = 0; a < k; ++a) {
    for (Eigen::Index b = 0; b < k; ++b) {
      sub(a, b) = (*this)(indices[static_cast<std::size_t>(a)], indices[static_cast<std::size_t>(b)]);
    }
  }
  return DistanceMatrix(std::move(sub), form_);
}

CovarianceModel estimate_covariance(const UnitTable& table, double ridge) {
  if (!(ridge >= 0.0) || !std::isfinite(ridge)) throw UsageError("ridge must be a finite nonnegative number");
  const Eigen::MatrixXd& x = table.covariates();
  const auto n = static_cast<double>(x.rows());
  const Eigen::RowVectorXd mean = x.colwise().mean();
  const Eigen::MatrixXd centered = x.rowwise() - mean;
  Eigen::MatrixXd s = (centered.transpose() * centered) / (n - 1.0);
  s = 0.5 * (s + s.transpose());

  const Eigen::Index p = s.rows();
  if (ridge == 0.0) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(s, Eigen::EigenvaluesOnly);
    const double lo = eig.eigenvalues().minCoeff();
    const double hi = eig.eigenvalues().maxCoeff();
    if (!(lo > 0.0) || hi / lo > kSingularConditionLimit) {
      throw SingularCovariance(
          "sample covariance is numerically singular (collinear or constant covariates); "
          "pass a small ridge such as 1e-8 to regularize");
    }
  }
  const Eigen::MatrixXd regularized = s + ridge * Eigen::MatrixXd::Identity(p, p);
  Eigen::MatrixXd precision = regularized.ldlt().solve(Eigen::MatrixXd::Identity(p, p));
  precision = 0.5 * (precision + precision.transpose());
  return CovarianceModel{std::move(s), std::move(precision), ridge};
}

DistanceMatrix mahalanobis_matrix(const UnitTable& table, const CovarianceModel& cov, DistanceForm form) {
  const Eigen::MatrixXd& x = table.covariates();
  const Eigen::Index p = x.cols();
  if (cov.precision.rows() != p || cov.precision.cols() != p) {
    throw DimensionMismatch("covariance model has dimension " + std::to_string(cov.precision.rows()) +
                            " but the table has " + std::to_string(p) + " covariates");
  }
  const Eigen::Index n = x.rows();
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(n, n);
  Eigen::VectorXd diff(p);
  Eigen::VectorXd scaled(p);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) {
      diff = (x.row(i) - x.row(j)).transpose();
      scaled.noalias() = cov.precision * diff;
      double q = diff.dot(scaled);
      if (q < 0.0) q = 0.0;  // rounding on near-duplicate rows
      if (form == DistanceForm::root) q = std::sqrt(q);
      d(i, j) = q;
      d(j, i) = q;
    }
  }
  return DistanceMatrix(std::move(d), form);
}

}  // namespace pairmatch
