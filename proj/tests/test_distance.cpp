#include "pairmatch/distance.hpp"
#include "pairmatch/errors.hpp"
#include "test_support.hpp"

#include <doctest.h>

#include <cmath>
#include <numeric>

using namespace pairmatch;
using namespace pairmatch::testing;

TEST_CASE("covariance of 0,1,2 is one") {
  Eigen::MatrixXd x(3, 1);
  x << 0, 1, 2;
  const auto cov = estimate_covariance(UnitTable(x));
  CHECK(cov.covariance(0, 0) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(cov.precision(0, 0) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(cov.ridge == 0.0);
}

TEST_CASE("identical rows are singular without a ridge") {
  Eigen::MatrixXd x(2, 1);
  x << 3.5, 3.5;
  CHECK_THROWS_AS(estimate_covariance(UnitTable(x)), SingularCovariance);
  const auto cov = estimate_covariance(UnitTable(x), 1e-8);
  CHECK(cov.precision(0, 0) == doctest::Approx(1e8));
}

TEST_CASE("collinear covariates are singular") {
  Eigen::MatrixXd x(5, 2);
  x << 1, 2, 2, 4, 3, 6, 4, 8, 5, 10;
  CHECK_THROWS_AS(estimate_covariance(UnitTable(x)), SingularCovariance);
}

TEST_CASE("2x2 precision matches the closed-form inverse") {
  Eigen::MatrixXd x(4, 2);
  x << 0, 0,
       1, 0,
       0, 2,
       3, 1;
  const auto cov = estimate_covariance(UnitTable(x));
  const auto s = loop_covariance(x);
  const auto inv = inverse_2x2(s);
  for (int a = 0; a < 2; ++a) {
    for (int b = 0; b < 2; ++b) {
      CHECK(cov.covariance(a, b) == doctest::Approx(s[a][b]).epsilon(1e-13));
      CHECK(cov.precision(a, b) == doctest::Approx(inv[a][b]).epsilon(1e-12));
    }
  }
  const Eigen::MatrixXd prod = cov.precision * cov.covariance;
  CHECK((prod - Eigen::MatrixXd::Identity(2, 2)).cwiseAbs().maxCoeff() < 1e-8);
}

TEST_CASE("ridge is added before inversion") {
  std::mt19937_64 gen(3);
  const Eigen::MatrixXd x = random_covariates(gen, 30, 3);
  const auto plain = estimate_covariance(UnitTable(x));
  const auto ridged = estimate_covariance(UnitTable(x), 0.5);
  const Eigen::MatrixXd expect = (plain.covariance + 0.5 * Eigen::MatrixXd::Identity(3, 3)).inverse();
  CHECK((ridged.precision - expect).cwiseAbs().maxCoeff() < 1e-10);
  CHECK_THROWS_AS(estimate_covariance(UnitTable(x), -1.0), UsageError);
}

TEST_CASE("duplicate rows have zero distance under both forms") {
  Eigen::MatrixXd x(4, 2);
  x << 1, 2,
       0.5, 7,
       1, 2,
       -3, 0;
  const UnitTable t(x);
  const auto cov = estimate_covariance(t);
  CHECK(mahalanobis_matrix(t, cov, DistanceForm::root)(0, 2) == 0.0);
  CHECK(mahalanobis_matrix(t, cov, DistanceForm::squared)(0, 2) == 0.0);
}

TEST_CASE("unit variance root distance is the absolute difference") {
  Eigen::MatrixXd x(2, 1);
  x << 1, 4;
  const CovarianceModel unit{Eigen::MatrixXd::Ones(1, 1), Eigen::MatrixXd::Ones(1, 1), 0.0};
  const auto d = mahalanobis_matrix(UnitTable(x), unit, DistanceForm::root);
  CHECK(d(0, 1) == 3.0);
  CHECK(d.form() == DistanceForm::root);
}

TEST_CASE("squared distances match an explicit quadratic-form loop") {
  std::mt19937_64 gen(11);
  const Eigen::MatrixXd x = random_covariates(gen, 12, 2);
  const UnitTable t(x);
  const auto d = mahalanobis_matrix(t, estimate_covariance(t), DistanceForm::squared);
  const auto precision = inverse_2x2(loop_covariance(x));
  for (int i = 0; i < 12; ++i) {
    for (int j = 0; j < 12; ++j) {
      CHECK(d(i, j) == doctest::Approx(triple_product(x, i, j, precision)).epsilon(1e-10));
    }
  }
}

TEST_CASE("dimension mismatch is rejected") {
  std::mt19937_64 gen(5);
  const UnitTable t3(random_covariates(gen, 10, 3));
  const UnitTable t2(random_covariates(gen, 10, 2));
  CHECK_THROWS_AS(mahalanobis_matrix(t3, estimate_covariance(t2)), DimensionMismatch);
}

TEST_CASE("distance matrices are symmetric with zero diagonal") {
  std::mt19937_64 gen(21);
  for (int trial = 0; trial < 50; ++trial) {
    const int n = 2 + trial % 17;
    const int p = 1 + trial % 4;
    const UnitTable t(random_covariates(gen, n + p, p));
    const auto d = mahalanobis_matrix(t, estimate_covariance(t));
    for (std::size_t i = 0; i < d.size(); ++i) {
      CHECK(d(i, i) == 0.0);
      for (std::size_t j = 0; j < d.size(); ++j) {
        CHECK(d(i, j) == d(j, i));
        CHECK(d(i, j) >= 0.0);
      }
    }
  }
}

TEST_CASE("root entries are exactly square roots of squared entries") {
  std::mt19937_64 gen(8);
  const UnitTable t(random_covariates(gen, 25, 4));
  const auto cov = estimate_covariance(t);
  const auto root = mahalanobis_matrix(t, cov, DistanceForm::root);
  const auto sq = mahalanobis_matrix(t, cov, DistanceForm::squared);
  for (std::size_t i = 0; i < 25; ++i) {
    for (std::size_t j = 0; j < 25; ++j) CHECK(root(i, j) == std::sqrt(sq(i, j)));
  }
}

TEST_CASE("distances are invariant under invertible affine maps") {
  std::mt19937_64 gen(13);
  std::normal_distribution<double> z(0.0, 1.0);
  for (int trial = 0; trial < 20; ++trial) {
    const int p = 1 + trial % 4;
    const Eigen::MatrixXd x = random_covariates(gen, 30, p);
    Eigen::MatrixXd a(p, p);
    for (int r = 0; r < p; ++r) {
      for (int c = 0; c < p; ++c) a(r, c) = z(gen) + (r == c ? 3.0 : 0.0);
    }
    Eigen::RowVectorXd shift(p);
    for (int c = 0; c < p; ++c) shift(c) = 10.0 * z(gen);
    const Eigen::MatrixXd y = (x * a.transpose()).rowwise() + shift;

    const UnitTable tx(x);
    const UnitTable ty(y);
    const auto dx = mahalanobis_matrix(tx, estimate_covariance(tx));
    const auto dy = mahalanobis_matrix(ty, estimate_covariance(ty));
    for (std::size_t i = 0; i < 30; ++i) {
      for (std::size_t j = i + 1; j < 30; ++j) CHECK(dy(i, j) == doctest::Approx(dx(i, j)).epsilon(1e-6));
    }
  }
}

TEST_CASE("permuting units permutes the distance matrix") {
  std::mt19937_64 gen(17);
  const Eigen::MatrixXd x = random_covariates(gen, 15, 3);
  std::vector<int> perm(15);
  std::iota(perm.begin(), perm.end(), 0);
  std::shuffle(perm.begin(), perm.end(), gen);
  Eigen::MatrixXd xp(15, 3);
  for (int i = 0; i < 15; ++i) xp.row(i) = x.row(perm[i]);

  const UnitTable t(x);
  const UnitTable tp(xp);
  const auto d = mahalanobis_matrix(t, estimate_covariance(t));
  const auto dp = mahalanobis_matrix(tp, estimate_covariance(tp));
  for (int i = 0; i < 15; ++i) {
    for (int j = 0; j < 15; ++j) CHECK(dp(i, j) == doctest::Approx(d(perm[i], perm[j])).epsilon(1e-12));
  }
}

TEST_CASE("unit table invariants") {
  CHECK_THROWS_AS(UnitTable(Eigen::MatrixXd::Zero(1, 2)), InvariantViolation);
  CHECK_THROWS_AS(UnitTable(Eigen::MatrixXd::Zero(3, 0)), InvariantViolation);
  Eigen::MatrixXd bad = Eigen::MatrixXd::Zero(3, 1);
  bad(1, 0) = std::nan("");
  CHECK_THROWS_AS(UnitTable{bad}, InvariantViolation);
  CHECK_THROWS_AS(UnitTable({"a", "b", "a"}, Eigen::MatrixXd::Zero(3, 1)), InvariantViolation);
  CHECK_THROWS_AS(UnitTable({"a", "b"}, Eigen::MatrixXd::Zero(3, 1)), InvariantViolation);
  const UnitTable ok(Eigen::MatrixXd::Zero(3, 1));
  CHECK(ok.ids() == std::vector<std::string>{"u1", "u2", "u3"});
}

TEST_CASE("distance matrix invariants") {
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(3, 3);
  m(0, 1) = 1.0;
  CHECK_THROWS_AS(DistanceMatrix{m}, InvariantViolation);
  m(1, 0) = 1.0;
  CHECK_NOTHROW(DistanceMatrix{m});
  m(2, 2) = 0.1;
  CHECK_THROWS_AS(DistanceMatrix{m}, InvariantViolation);
  m(2, 2) = 0.0;
  m(0, 2) = m(2, 0) = -1.0;
  CHECK_THROWS_AS(DistanceMatrix{m}, InvariantViolation);
  m(0, 2) = m(2, 0) = INFINITY;
  CHECK_THROWS_AS(DistanceMatrix{m}, NonFiniteWeight);
  CHECK_THROWS_AS(DistanceMatrix(Eigen::MatrixXd::Zero(2, 3)), InvariantViolation);
}

TEST_CASE("distance form names") {
  CHECK(parse_distance_form("root") == DistanceForm::root);
  CHECK(parse_distance_form("squared") == DistanceForm::squared);
  CHECK(to_string(DistanceForm::squared) == "squared");
  CHECK_THROWS_AS(parse_distance_form("cubed"), UsageError);
}
