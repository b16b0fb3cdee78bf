#include "pairmatch/generators.hpp"

#include "pairmatch/errors.hpp"

#include <cmath>
#include <iomanip>
#include <random>
#include <sstream>

namespace pairmatch {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

void require(bool ok, const std::string& what) {
  if (!ok) throw InvalidGenerator(what);
}

bool finite(double x) { return std::isfinite(x); }

void validate_pmf(const DiscretePmf& pmf) {
  require(!pmf.values.empty(), "discrete pmf needs at least one value");
  require(pmf.values.size() == pmf.probs.size(), "discrete pmf has mismatched value and probability counts");
  double total = 0.0;
  for (std::size_t i = 0; i < pmf.values.size(); ++i) {
    require(finite(pmf.values[i]), "discrete pmf value must be finite");
    require(finite(pmf.probs[i]) && pmf.probs[i] > 0.0, "discrete pmf probabilities must be positive");
    total += pmf.probs[i];
  }
  require(std::abs(total - 1.0) <= 1e-12, "discrete pmf probabilities must sum to 1");
}

Eigen::LLT<Eigen::MatrixXd> block_factor(const EquicorrelatedMvn& g) {
  const auto k = static_cast<Eigen::Index>(g.block_size);
  Eigen::MatrixXd cov = Eigen::MatrixXd::Constant(k, k, g.correlation);
  cov.diagonal().setOnes();
  Eigen::LLT<Eigen::MatrixXd> llt(cov);
  require(llt.info() == Eigen::Success, "equicorrelated block covariance is not positive definite");
  return llt;
}

std::string format_number(double x) {
  std::ostringstream os;
  os << std::setprecision(17) << x;
  return os.str();
}

}  // namespace

void validate(const GeneratorSpec& spec) {
  std::visit(Overloaded{
                 [](const Exponential& g) { require(finite(g.mean) && g.mean > 0.0, "exponential mean must be > 0"); },
                 [](const StudentT& g) { require(finite(g.df) && g.df > 0.0, "student_t df must be > 0"); },
                 [](const Normal& g) {
                   require(finite(g.mean), "normal mean must be finite");
                   require(finite(g.sd) && g.sd > 0.0, "normal sd must be > 0");
                 },
                 [](const Uniform& g) { require(finite(g.lo) && finite(g.hi) && g.lo < g.hi, "uniform needs lo < hi"); },
                 [](const Cauchy& g) {
                   require(finite(g.location), "cauchy location must be finite");
                   require(finite(g.scale) && g.scale > 0.0, "cauchy scale must be > 0");
                 },
                 [](const EquicorrelatedMvn& g) {
                   require(g.block_size >= 1, "mvn block size must be >= 1");
                   require(finite(g.ramp_lo) && finite(g.ramp_hi), "mvn mean ramp must be finite");
                   require(finite(g.correlation) && std::abs(g.correlation) < 1.0, "mvn correlation must satisfy |r| < 1");
                   block_factor(g);
                 },
                 [](const Discrete& g) { validate_pmf(g.pmf); },
             },
             spec);
}

std::size_t column_count(const GeneratorSpec& spec) {
  if (const auto* mvn = std::get_if<EquicorrelatedMvn>(&spec)) return mvn->block_size;
  return 1;
}

Eigen::MatrixXd sample_covariates(const GeneratorSpec& spec, std::size_t n, CounterRng& rng) {
  validate(spec);
  const auto rows = static_cast<Eigen::Index>(n);
  Eigen::MatrixXd out(rows, static_cast<Eigen::Index>(column_count(spec)));

  auto fill = [&](auto&& dist) {
    for (Eigen::Index i = 0; i < rows; ++i) out(i, 0) = dist(rng);
  };

  std::visit(Overloaded{
                 [&](const Exponential& g) { fill(std::exponential_distribution<double>(1.0 / g.mean)); },
                 [&](const StudentT& g) { fill(std::student_t_distribution<double>(g.df)); },
                 [&](const Normal& g) { fill(std::normal_distribution<double>(g.mean, g.sd)); },
                 [&](const Uniform& g) { fill(std::uniform_real_distribution<double>(g.lo, g.hi)); },
                 [&](const Cauchy& g) { fill(std::cauchy_distribution<double>(g.location, g.scale)); },
                 [&](const EquicorrelatedMvn& g) {
                   const Eigen::MatrixXd lower = block_factor(g).matrixL();
                   const auto k = static_cast<Eigen::Index>(g.block_size);
                   std::normal_distribution<double> z(0.0, 1.0);
                   Eigen::VectorXd draw(k);
                   for (Eigen::Index i = 0; i < rows; ++i) {
                     const double mean =
                         rows > 1 ? g.ramp_lo + static_cast<double>(i) * (g.ramp_hi - g.ramp_lo) /
                                                    static_cast<double>(rows - 1)
                                  : g.ramp_lo;
                     for (Eigen::Index c = 0; c < k; ++c) draw(c) = z(rng);
                     Eigen::VectorXd x = (lower * draw).array() + mean;
                     if (g.exponentiate) x = x.array().exp();
                     out.row(i) = x.transpose();
                   }
                 },
                 [&](const Discrete& g) {
                   std::discrete_distribution<std::size_t> pick(g.pmf.probs.begin(), g.pmf.probs.end());
                   for (Eigen::Index i = 0; i < rows; ++i) out(i, 0) = g.pmf.values[pick(rng)];
                 },
             },
             spec);
  return out;
}

std::string describe(const GeneratorSpec& spec) {
  const auto num = format_number;
  return std::visit(
      Overloaded{
          [&](const Exponential& g) { return "exponential " + num(g.mean); },
          [&](const StudentT& g) { return "student_t " + num(g.df); },
          [&](const Normal& g) { return "normal " + num(g.mean) + " " + num(g.sd); },
          [&](const Uniform& g) { return "uniform " + num(g.lo) + " " + num(g.hi); },
          [&](const Cauchy& g) { return "cauchy " + num(g.location) + " " + num(g.scale); },
          [&](const EquicorrelatedMvn& g) {
            return std::string(g.exponentiate ? "exp_of_mvn " : "equicorrelated_mvn ") + std::to_string(g.block_size) +
                   " " + num(g.ramp_lo) + " " + num(g.ramp_hi) + " " + num(g.correlation);
          },
          [&](const Discrete& g) {
            std::string s = "discrete";
            for (std::size_t i = 0; i < g.pmf.values.size(); ++i) s += " " + num(g.pmf.values[i]) + ":" + num(g.pmf.probs[i]);
            return s;
          },
      },
      spec);
}

GeneratorSpec parse_generator(const std::string& text) {
  std::istringstream in(text);
  std::string kind;
  in >> kind;
  std::vector<std::string> args;
  for (std::string tok; in >> tok;) args.push_back(tok);

  auto number = [&](const std::string& tok) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(tok, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != tok.size() || tok.empty()) throw InvalidGenerator("'" + tok + "' is not a number in generator '" + text + "'");
    return v;
  };
  auto expect = [&](std::size_t count) {
    if (args.size() != count) {
      throw InvalidGenerator("generator '" + kind + "' takes " + std::to_string(count) + " parameters (got " +
                             std::to_string(args.size()) + ")");
    }
  };

  GeneratorSpec spec;
  if (kind == "exponential") {
    expect(1);
    spec = Exponential{number(args[0])};
  } else if (kind == "student_t") {
    expect(1);
    spec = StudentT{number(args[0])};
  } else if (kind == "normal") {
    expect(2);
    spec = Normal{number(args[0]), number(args[1])};
  } else if (kind == "uniform") {
    expect(2);
    spec = Uniform{number(args[0]), number(args[1])};
  } else if (kind == "cauchy") {
    expect(2);
    spec = Cauchy{number(args[0]), number(args[1])};
  } else if (kind == "equicorrelated_mvn" || kind == "exp_of_mvn") {
    expect(4);
    const double block = number(args[0]);
    if (block < 1.0 || block != std::floor(block)) throw InvalidGenerator("mvn block size must be a positive integer");
    spec = EquicorrelatedMvn{static_cast<std::size_t>(block), number(args[1]), number(args[2]), number(args[3]),
                             kind == "exp_of_mvn"};
  } else if (kind == "discrete") {
    DiscretePmf pmf;
    for (const auto& tok : args) {
      const auto colon = tok.find(':');
      if (colon == std::string::npos) throw InvalidGenerator("discrete entries are value:probability (got '" + tok + "')");
      pmf.values.push_back(number(tok.substr(0, colon)));
      pmf.probs.push_back(number(tok.substr(colon + 1)));
    }
    spec = Discrete{std::move(pmf)};
  } else {
    throw InvalidGenerator("unknown generator kind '" + kind + "'");
  }
  validate(spec);
  return spec;
}

}  // namespace pairmatch
