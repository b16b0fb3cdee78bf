#include "pairmatch/scenario.hpp"

#include "pairmatch/errors.hpp"

#include <algorithm>
#include <cctype>
#include <istream>
#include <map>
#include <sstream>

namespace pairmatch {

namespace {

std::string trim(std::string_view s) {
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  for (std::string item; std::getline(ss, item, ',');) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

const std::vector<Method> kAllRatioMethods = {Method::random, Method::ranking, Method::greedy};

// Covariates C1..C8 of the two multi-covariate studies.
ScenarioSpec eight_covariate_case(const std::string& name, bool heavy_tailed) {
  ScenarioSpec s;
  s.name = name;
  s.unit_count = 100;
  s.pair_count = 10;
  s.generators = {
      Exponential{1.0},
      StudentT{3.0},
      heavy_tailed ? GeneratorSpec{Cauchy{0.0, 1.0}} : GeneratorSpec{Normal{1.0, 1.0}},
      Uniform{0.0, 2.0},
      EquicorrelatedMvn{4, 1.0, 2.0, 0.5, heavy_tailed},
  };
  s.ratio_methods = kAllRatioMethods;
  return s;
}

GeneratorSpec continuous_kind(const std::string& kind) {
  if (kind == "cauchy") return Cauchy{0.0, 1.0};
  if (kind == "gaussian") return Normal{0.0, 1.0};
  return Uniform{0.0, 1.0};
}

DiscretePmf evenly_spaced(double lo, double hi, const std::vector<double>& weights_over_50) {
  DiscretePmf pmf;
  const std::size_t k = weights_over_50.size();
  for (std::size_t i = 0; i < k; ++i) {
    pmf.values.push_back(lo + static_cast<double>(i) * (hi - lo) / static_cast<double>(k - 1));
    pmf.probs.push_back(weights_over_50[i] / 50.0);
  }
  return pmf;
}

std::vector<double> repeat_pattern(const std::vector<double>& pattern, std::size_t total) {
  std::vector<double> out;
  for (std::size_t i = 0; i < total; ++i) out.push_back(pattern[i % pattern.size()]);
  return out;
}

// Probability mass functions of the discrete two-covariate cases 4..12.
DiscretePmf two_cov_pmf(int which) {
  constexpr double twelfth = 1.0 / 12.0;
  constexpr double third = 1.0 / 3.0;
  switch (which) {
    case 4:
      return {{-10, -1, 1, 10}, {0.4, 0.1, 0.1, 0.4}};
    case 5:
      return {{-10, -1, 1, 10}, {0.1, 0.4, 0.1, 0.4}};
    case 6:
      return {{-10, -1, 2, 20}, {0.6, 0.1, 0.2, 0.1}};
    case 7:
      return {{-20, -10, -1, 1, 10, 20}, {twelfth, third, twelfth, twelfth, third, twelfth}};
    case 8:
      return {{-20, -10, -1, 1, 10, 20}, {twelfth, third, twelfth, twelfth, twelfth, third}};
    case 9:
      return {{-20, -10, -1, 2, 20, 40}, {twelfth, third, twelfth, twelfth, twelfth, third}};
    case 10:
      return evenly_spaced(-10.0, 10.0, repeat_pattern({1, 4, 4, 1}, 20));
    case 11:
      return evenly_spaced(-10.0, 10.0, repeat_pattern({1, 4}, 20));
    case 12:
      return evenly_spaced(-10.0, 30.0, repeat_pattern({4, 1}, 20));
    default:
      throw UnknownScenario("no discrete two-covariate case " + std::to_string(which));
  }
}

std::size_t parse_count(const std::string& value, std::size_t line) {
  std::size_t used = 0;
  unsigned long long v = 0;
  try {
    v = std::stoull(value, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != value.size() || value.front() == '-') {
    throw ParseError("expected a nonnegative integer, got '" + value + "'", line, 2);
  }
  return static_cast<std::size_t>(v);
}

double parse_real(const std::string& value, std::size_t line) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(value, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != value.size()) throw ParseError("expected a number, got '" + value + "'", line, 2);
  return v;
}

}  // namespace

void validate(const ScenarioSpec& spec) {
  if (spec.pair_count < 1) throw InvariantViolation("scenario '" + spec.name + "' needs m >= 1");
  if (2 * spec.pair_count > spec.unit_count) {
    throw InvariantViolation("scenario '" + spec.name + "' needs N >= 2m");
  }
  if (spec.reps < 1) throw InvariantViolation("scenario '" + spec.name + "' needs reps >= 1");
  if (spec.generators.empty()) throw InvariantViolation("scenario '" + spec.name + "' has no generators");
  if (!(spec.ridge >= 0.0)) throw InvariantViolation("scenario '" + spec.name + "' has a negative ridge");
  for (const auto& g : spec.generators) validate(g);
  for (const Method m : spec.ratio_methods) {
    if (m == Method::optimal) throw InvariantViolation("optimal is the ratio numerator, not a comparison method");
    if (m == Method::ranking && spec.unit_count % 2 != 0) {
      throw InvariantViolation("scenario '" + spec.name + "' compares ranking but N is odd");
    }
  }
}

std::vector<std::string> builtin_scenario_names() {
  std::vector<std::string> names = {"case-A", "case-B"};
  for (const char* m : {"30", "45", "50"}) {
    for (const char* kind : {"cauchy", "gaussian", "uniform"}) names.push_back(std::string("single-") + kind + "-m" + m);
  }
  for (int c = 1; c <= 12; ++c) names.push_back("two-cov-case" + std::to_string(c));
  return names;
}

ScenarioSpec builtin_scenario(const std::string& name) {
  if (name == "case-A") return eight_covariate_case(name, false);
  if (name == "case-B") return eight_covariate_case(name, true);

  for (const char* kind : {"cauchy", "gaussian", "uniform"}) {
    for (const std::size_t m : {30, 45, 50}) {
      if (name == std::string("single-") + kind + "-m" + std::to_string(m)) {
        ScenarioSpec s;
        s.name = name;
        s.unit_count = 100;
        s.pair_count = m;
        s.generators = {continuous_kind(kind)};
        s.ratio_methods = {Method::greedy};
        return s;
      }
    }
  }

  for (int c = 1; c <= 12; ++c) {
    if (name != "two-cov-case" + std::to_string(c)) continue;
    ScenarioSpec s;
    s.name = name;
    s.unit_count = 100;
    s.pair_count = 50;
    s.ratio_methods = {Method::greedy};
    if (c <= 3) {
      const GeneratorSpec g = continuous_kind(c == 1 ? "cauchy" : c == 2 ? "gaussian" : "uniform");
      s.generators = {g, g};
    } else {
      const GeneratorSpec g = Discrete{two_cov_pmf(c)};
      s.generators = {g, g};
      s.ridge = kDiscreteRidge;
    }
    return s;
  }
  throw UnknownScenario("unknown scenario '" + name + "'");
}

std::vector<ScenarioSpec> parse_scenario_file(std::istream& in) {
  ScenarioSpec base;
  base.name = "custom";
  base.ratio_methods = kAllRatioMethods;
  std::vector<std::size_t> pair_counts;
  std::map<std::string, std::size_t> seen;

  std::size_t line_no = 0;
  for (std::string raw; std::getline(in, raw);) {
    ++line_no;
    const auto hash = raw.find('#');
    const std::string line = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ParseError("expected 'key = value'", line_no, 1);
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (value.empty()) throw ParseError("missing value for '" + key + "'", line_no, 2);
    if (key != "generator" && seen.count(key) != 0) {
      throw ParseError("duplicate key '" + key + "'", line_no, 1);
    }
    seen[key] = line_no;

    try {
      if (key == "name") {
        base.name = value;
      } else if (key == "N") {
        base.unit_count = parse_count(value, line_no);
      } else if (key == "m") {
        for (const auto& item : split_list(value)) pair_counts.push_back(parse_count(item, line_no));
      } else if (key == "reps") {
        base.reps = parse_count(value, line_no);
      } else if (key == "seed") {
        base.seed = parse_count(value, line_no);
      } else if (key == "distance_form") {
        base.distance_form = parse_distance_form(value);
      } else if (key == "ratio_methods") {
        base.ratio_methods.clear();
        for (const auto& item : split_list(value)) base.ratio_methods.push_back(parse_method(item));
      } else if (key == "ridge") {
        base.ridge = parse_real(value, line_no);
      } else if (key == "generator") {
        base.generators.push_back(parse_generator(value));
      } else {
        throw ParseError("unknown key '" + key + "'", line_no, 1);
      }
    } catch (const ParseError&) {
      throw;
    } catch (const UsageError& e) {
      throw ParseError(e.what(), line_no, 2);
    }
  }
  if (pair_counts.empty()) throw ParseError("scenario file does not set m", line_no, 1);

  std::vector<ScenarioSpec> specs;
  for (const std::size_t m : pair_counts) {
    ScenarioSpec s = base;
    s.pair_count = m;
    if (pair_counts.size() > 1) s.name = base.name + "-m" + std::to_string(m);
    try {
      validate(s);
    } catch (const InvariantViolation& e) {
      throw UsageError(e.what());
    }
    specs.push_back(std::move(s));
  }
  return specs;
}

std::string format_scenario(const ScenarioSpec& spec) {
  std::ostringstream os;
  os << "name = " << spec.name << "\n";
  os << "N = " << spec.unit_count << "\n";
  os << "m = " << spec.pair_count << "\n";
  os << "reps = " << spec.reps << "\n";
  os << "seed = " << spec.seed << "\n";
  os << "distance_form = " << to_string(spec.distance_form) << "\n";
  os << "ratio_methods = ";
  for (std::size_t i = 0; i < spec.ratio_methods.size(); ++i) os << (i ? ", " : "") << to_string(spec.ratio_methods[i]);
  os << "\n";
  os << "ridge = " << spec.ridge << "\n";
  for (const auto& g : spec.generators) os << "generator = " << describe(g) << "\n";
  return os.str();
}

}  // namespace pairmatch
