#pragma once

#include "pairmatch/rng.hpp"

#include <Eigen/Dense>

#include <cstddef>
#include <string>
#include <variant>
#include <vector>

namespace pairmatch {

/// Finite support with positive probabilities summing to 1 (within 1e-12).
struct DiscretePmf {
  std::vector<double> values;
  std::vector<double> probs;
};

struct Exponential {
  double mean = 1.0;
};

struct StudentT {
  double df = 1.0;
};

struct Normal {
  double mean = 0.0;
  double sd = 1.0;
};

struct Uniform {
  double lo = 0.0;
  double hi = 1.0;
};

struct Cauchy {
  double location = 0.0;
  double scale = 1.0;
};

/// A block of block_size covariates. Unit i of n has mean
/// ramp_lo + i * (ramp_hi - ramp_lo) / (n - 1) in every coordinate; the block
/// covariance is 1 on the diagonal and correlation elsewhere. With
/// exponentiate set, every draw is passed through exp().
struct EquicorrelatedMvn {
  std::size_t block_size = 1;
  double ramp_lo = 0.0;
  double ramp_hi = 0.0;
  double correlation = 0.0;
  bool exponentiate = false;
};

struct Discrete {
  DiscretePmf pmf;
};

using GeneratorSpec = std::variant<Exponential, StudentT, Normal, Uniform, Cauchy, EquicorrelatedMvn, Discrete>;

/// Throws InvalidGenerator when parameters leave their natural domain.
void validate(const GeneratorSpec& spec);

/// Number of covariate columns the generator produces.
std::size_t column_count(const GeneratorSpec& spec);

/// n rows by column_count(spec) columns of draws.
Eigen::MatrixXd sample_covariates(const GeneratorSpec& spec, std::size_t n, CounterRng& rng);

/// One-line text form used by scenario files, e.g. "normal 1 1" or
/// "discrete -10:0.4 -1:0.1 1:0.1 10:0.4".
std::string describe(const GeneratorSpec& spec);

/// Inverse of describe(). Throws InvalidGenerator on malformed text.
GeneratorSpec parse_generator(const std::string& text);

}  // namespace pairmatch
