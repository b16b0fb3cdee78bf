#include "pairmatch/cli.hpp"
#include "pairmatch/errors.hpp"
#include "pairmatch/io.hpp"
#include "pairmatch/matcher.hpp"

#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

using namespace pairmatch;
namespace fs = std::filesystem;

namespace {

struct CliResult {
  int code;
  std::string out;
  std::string err;
};

CliResult invoke(std::vector<std::string> args) {
  args.insert(args.begin(), "pairmatch");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out;
  std::ostringstream err;
  const int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

class TempDir {
 public:
  explicit TempDir(const std::string& tag)
      : path_(fs::temp_directory_path() / ("pairmatch-test-" + tag + "-" + std::to_string(::getpid()))) {
    fs::remove_all(path_);
    fs::create_directories(path_);
  }
  ~TempDir() { fs::remove_all(path_); }
  const fs::path& path() const { return path_; }
  fs::path write(const std::string& name, const std::string& content) const {
    std::ofstream(path_ / name) << content;
    return path_ / name;
  }

 private:
  fs::path path_;
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string total_line(const std::string& text) {
  const auto pos = text.find("# total_distance=");
  REQUIRE(pos != std::string::npos);
  return text.substr(pos, text.find('\n', pos) - pos);
}

// One covariate at 0, 1, 1.5, 2.5: greedy takes the close middle pair first
// and is left with the outer pair.
const char* kLineUnits = "id,x\na,0\nb,1\nc,1.5\nd,2.5\n";

}  // namespace

TEST_CASE("unit CSV parsing") {
  std::istringstream ok("id,age,income\nu1,30,1.5\nu2,41,2e3\n");
  const auto t = read_unit_csv(ok);
  CHECK(t.size() == 2);
  CHECK(t.dimension() == 2);
  CHECK(t.ids() == std::vector<std::string>{"u1", "u2"});
  CHECK(t.covariates()(1, 1) == 2000.0);

  auto error_at = [](const std::string& text, std::size_t row, std::size_t col) {
    std::istringstream in(text);
    try {
      read_unit_csv(in);
      FAIL("expected a parse error");
    } catch (const ParseError& e) {
      CHECK(e.row() == row);
      CHECK(e.column() == col);
    }
  };
  error_at("id,a,b\nu1,1,2\nu2,3,abc\n", 3, 3);
  error_at("id,a,b\nu1,1,2\nu2,3\n", 3, 3);
  error_at("name,a\nu1,1\n", 1, 1);
  error_at("id,a\nu1,nan\n", 2, 2);
  error_at("id,a\nu1,1.5x\n", 2, 2);
  error_at("", 1, 1);
}

TEST_CASE("weight matrix CSV parsing") {
  std::istringstream ok("0,1\n1,0\n");
  CHECK(read_matrix_csv(ok).size() == 2);
  std::istringstream ragged("0,1,2\n1,0\n2,1,0\n");
  CHECK_THROWS_AS(read_matrix_csv(ragged), ParseError);
  std::istringstream rect("0,1\n1,0\n2,2\n");
  CHECK_THROWS_AS(read_matrix_csv(rect), ParseError);
  std::istringstream asym("0,1\n2,0\n");
  CHECK_THROWS_AS(read_matrix_csv(asym), InvariantViolation);
}

TEST_CASE("real formatting round trips") {
  for (const double x : {0.1, 1.0 / 3.0, 4.0, 1e-300, 123456.789}) {
    CHECK(std::stod(format_real(x)) == x);
  }
  CHECK(format_real(4.0) == "4");
}

TEST_CASE("atomic writes replace content and leave no temporary") {
  TempDir dir("atomic");
  const auto target = dir.path() / "file.csv";
  write_file_atomic(target, "first\n");
  write_file_atomic(target, "second\n");
  CHECK(slurp(target) == "second\n");
  std::size_t entries = 0;
  for ([[maybe_unused]] const auto& e : fs::directory_iterator(dir.path())) ++entries;
  CHECK(entries == 1);
  CHECK_THROWS_AS(write_file_atomic(dir.path() / "missing" / "x.csv", "x"), UsageError);
}

TEST_CASE("match picks the optimal pairs") {
  TempDir dir("match");
  const auto csv = dir.write("units.csv", kLineUnits);
  const auto opt = invoke({"match", "--input", csv.string(), "--m", "2"});
  REQUIRE(opt.code == 0);
  const auto greedy = invoke({"match", "--input", csv.string(), "--m", "2", "--method", "greedy"});
  REQUIRE(greedy.code == 0);
  // sd of the four values is sqrt(3.25/3); optimal total 2/sd, greedy 3/sd.
  const double sd = std::sqrt(3.25 / 3.0);
  const double opt_total = std::stod(total_line(opt.out).substr(17));
  const double greedy_total = std::stod(total_line(greedy.out).substr(17));
  CHECK(opt_total == doctest::Approx(2.0 / sd));
  CHECK(greedy_total == doctest::Approx(3.0 / sd));
  CHECK(opt.out.rfind("pair_index,id_a,id_b,distance\n", 0) == 0);
  CHECK(opt.out.find(",a,b,") != std::string::npos);
  CHECK(opt.out.find(",c,d,") != std::string::npos);

  const auto squared = invoke({"match", "--input", csv.string(), "--m", "2", "--distance-form", "squared"});
  CHECK(std::stod(total_line(squared.out).substr(17)) == doctest::Approx(2.0 * 3.0 / 3.25));
}

TEST_CASE("match writes pairs and summary files") {
  TempDir dir("matchout");
  std::ostringstream units;
  units << "id,a,b\n";
  for (int i = 0; i < 12; ++i) units << "u" << i << ',' << (i * 7 % 5) << ',' << (i * i % 11) << '\n';
  const auto csv = dir.write("units.csv", units.str());
  const auto out_opt = dir.path() / "opt";
  const auto out_rank = dir.path() / "rank";
  REQUIRE(invoke({"match", "--input", csv.string(), "--m", "6", "--out", out_opt.string()}).code == 0);
  REQUIRE(invoke({"match", "--input", csv.string(), "--m", "6", "--method", "ranking", "--out", out_rank.string()})
              .code == 0);
  const std::string s_opt = slurp(out_opt / "summary.csv");
  const std::string s_rank = slurp(out_rank / "summary.csv");
  CHECK(s_opt.rfind("method,total_distance,m,N\noptimal,", 0) == 0);
  CHECK(s_rank.rfind("method,total_distance,m,N\nranking,", 0) == 0);
  CHECK(s_opt.substr(s_opt.find(',', 30)) == s_rank.substr(s_rank.find(',', 30)));
  CHECK(s_opt.substr(s_opt.size() - 6) == ",6,12\n");
  const std::string pairs = slurp(out_opt / "pairs.csv");
  CHECK(std::count(pairs.begin(), pairs.end(), '\n') == 7);
}

TEST_CASE("match error exits") {
  TempDir dir("matcherr");
  const auto csv = dir.write("units.csv", kLineUnits);
  const auto bad = dir.write("bad.csv", "id,x\na,0\nb,oops\n");
  const auto constant = dir.write("const.csv", "id,x,y\na,0,1\nb,1,1\nc,2,1\nd,3,1\n");

  const auto parse = invoke({"match", "--input", bad.string(), "--m", "1"});
  CHECK(parse.code == cli::kUsageError);
  CHECK(parse.err.find("row 3") != std::string::npos);
  CHECK(parse.err.find("column 2") != std::string::npos);

  CHECK(invoke({"match", "--input", csv.string(), "--m", "3"}).code == cli::kNumericalError);
  CHECK(invoke({"match", "--input", csv.string(), "--m", "0"}).code == cli::kNumericalError);
  CHECK(invoke({"match", "--input", csv.string()}).code == cli::kUsageError);
  CHECK(invoke({"match", "--input", csv.string(), "--m", "1", "--method", "best"}).code == cli::kUsageError);
  CHECK(invoke({"match", "--input", (dir.path() / "nope.csv").string(), "--m", "1"}).code == cli::kUsageError);
  CHECK(invoke({"frobnicate"}).code == cli::kUsageError);

  const auto singular = invoke({"match", "--input", constant.string(), "--m", "1"});
  CHECK(singular.code == cli::kNumericalError);
  CHECK(singular.err.find("--ridge") != std::string::npos);
  CHECK(invoke({"match", "--input", constant.string(), "--m", "1", "--ridge", "1e-8"}).code == 0);
}

TEST_CASE("random method honours the seed and the environment fallback") {
  TempDir dir("seed");
  std::ostringstream units;
  units << "id,x\n";
  for (int i = 0; i < 20; ++i) units << "u" << i << ',' << (i * 13 % 17) << '\n';
  const auto csv = dir.write("units.csv", units.str()).string();
  const auto a = invoke({"match", "--input", csv, "--m", "3", "--method", "random", "--seed", "5"});
  const auto b = invoke({"match", "--input", csv, "--m", "3", "--method", "random", "--seed", "5"});
  const auto c = invoke({"match", "--input", csv, "--m", "3", "--method", "random", "--seed", "6"});
  CHECK(a.out == b.out);
  CHECK(a.out != c.out);

  ::setenv("PAIRMATCH_SEED", "5", 1);
  const auto env = invoke({"match", "--input", csv, "--m", "3", "--method", "random"});
  const auto flag_wins = invoke({"match", "--input", csv, "--m", "3", "--method", "random", "--seed", "6"});
  ::setenv("PAIRMATCH_SEED", "not-a-number", 1);
  const auto bad_env = invoke({"match", "--input", csv, "--m", "3", "--method", "random"});
  ::unsetenv("PAIRMATCH_SEED");
  CHECK(env.out == a.out);
  CHECK(flag_wins.out == c.out);
  CHECK(bad_env.code == cli::kUsageError);
  CHECK(invoke({"match", "--input", csv, "--m", "3", "--seed", "-4"}).code == cli::kUsageError);

  cli::RunConfig config;
  CHECK(cli::resolve_seed(config, 17) == 17);
  config.seed = 3;
  CHECK(cli::resolve_seed(config, 17) == 3);
}

TEST_CASE("solve prints the optimal matching") {
  TempDir dir("solve");
  const auto two = invoke({"solve", "--matrix", dir.write("two.csv", "0,2.5\n2.5,0\n").string()});
  REQUIRE(two.code == 0);
  CHECK(two.out == "node_a,node_b,weight\n0,1,2.5\n# total_weight=2.5\n");

  const auto four =
      invoke({"solve", "--matrix", dir.write("four.csv", "0,1,2,2\n1,0,2,2\n2,2,0,10\n2,2,10,0\n").string()});
  REQUIRE(four.code == 0);
  CHECK(four.out.find("# total_weight=4\n") != std::string::npos);

  std::ostringstream five;
  for (int i = 0; i < 5; ++i) {
    for (int j = 0; j < 5; ++j) five << (j ? "," : "") << (i == j ? 0 : 1);
    five << '\n';
  }
  const auto odd = invoke({"solve", "--matrix", dir.write("five.csv", five.str()).string()});
  CHECK(odd.code == cli::kNumericalError);
  CHECK(invoke({"solve", "--matrix", dir.write("bad.csv", "0,x\nx,0\n").string()}).code == cli::kUsageError);
}

TEST_CASE("oracle subcommand") {
  const auto selection = invoke({"oracle", "--trials", "500", "--units", "8", "--pairs", "2", "--seed", "11"});
  CHECK(selection.code == 0);
  CHECK(selection.out.find("selection N=8 m=2: 500/500 agree") != std::string::npos);
  const auto matching = invoke({"oracle", "--trials", "1000", "--nodes", "8", "--units", "6", "--pairs", "1"});
  CHECK(matching.code == 0);
  CHECK(matching.out.find("matching n=8: 1000/1000 agree") != std::string::npos);
  CHECK(matching.out.find("PASS") != std::string::npos);

  CHECK(invoke({"oracle", "--units", "20"}).code == cli::kUsageError);
  CHECK(invoke({"oracle", "--nodes", "14"}).code == cli::kUsageError);
  CHECK(invoke({"oracle", "--nodes", "7"}).code == cli::kUsageError);
  CHECK(invoke({"oracle", "--units", "6", "--pairs", "4"}).code == cli::kUsageError);
}

TEST_CASE("simulate outputs are deterministic across runs and workers") {
  TempDir dir("sim");
  const auto a = dir.path() / "a";
  const auto b = dir.path() / "b";
  const auto c = dir.path() / "c";
  const auto first = invoke({"simulate", "--scenario", "case-A", "--seed", "1", "--reps", "60", "--workers", "1",
                             "--out", a.string()});
  REQUIRE(first.code == 0);
  REQUIRE(invoke({"simulate", "--scenario", "case-A", "--seed", "1", "--reps", "60", "--workers", "1", "--out",
                  b.string()})
              .code == 0);
  REQUIRE(invoke({"simulate", "--scenario", "case-A", "--seed", "1", "--reps", "60", "--workers", "4", "--out",
                  c.string()})
              .code == 0);
  for (const char* name : {"case-A_ratios.csv", "case-A_histogram.csv", "summary.csv"}) {
    const std::string ref = slurp(a / name);
    CHECK(!ref.empty());
    CHECK(slurp(b / name) == ref);
    CHECK(slurp(c / name) == ref);
  }
  CHECK(first.out == slurp(a / "summary.csv"));

  std::istringstream rows(first.out);
  std::string line;
  std::getline(rows, line);
  int count = 0;
  while (std::getline(rows, line)) {
    ++count;
    std::istringstream cells(line);
    std::string cell;
    std::getline(cells, cell, ',');
    std::getline(cells, cell, ',');
    for (int k = 0; k < 6; ++k) {
      std::getline(cells, cell, ',');
      const double v = std::stod(cell);
      CHECK(v > 0.0);
      CHECK(v <= 1.0);
    }
  }
  CHECK(count == 3);

  const auto other = dir.path() / "d";
  REQUIRE(invoke({"simulate", "--scenario", "case-A", "--seed", "2", "--reps", "60", "--out", other.string()}).code ==
          0);
  CHECK(slurp(other / "case-A_ratios.csv") != slurp(a / "case-A_ratios.csv"));
}

TEST_CASE("simulate from a scenario file") {
  TempDir dir("simfile");
  const auto file = dir.write("s.txt",
                              "name = tiny\nN = 20\nm = 4, 10\nreps = 15\n"
                              "ratio_methods = greedy\ngenerator = uniform 0 1\ngenerator = normal 0 1\n");
  const auto out = dir.path() / "out";
  const auto r = invoke({"simulate", "--scenario-file", file.string(), "--out", out.string()});
  REQUIRE(r.code == 0);
  CHECK(fs::exists(out / "tiny-m4_ratios.csv"));
  CHECK(fs::exists(out / "tiny-m10_histogram.csv"));
  CHECK(r.out.find("tiny-m4,greedy,") != std::string::npos);
  CHECK(r.out.find("tiny-m10,greedy,") != std::string::npos);
}

TEST_CASE("simulate error exits") {
  TempDir dir("simerr");
  const auto out = dir.path().string();
  CHECK(invoke({"simulate", "--scenario", "bogus", "--out", out}).code == cli::kUsageError);
  CHECK(invoke({"simulate", "--out", out}).code == cli::kUsageError);
  CHECK(invoke({"simulate", "--scenario", "case-A", "--reps", "5", "--workers", "0", "--out", out}).code ==
        cli::kUsageError);
  const auto bad = dir.write("bad.txt", "m = 2\nN = lots\n");
  const auto parse = invoke({"simulate", "--scenario-file", bad.string(), "--out", out});
  CHECK(parse.code == cli::kUsageError);
  CHECK(parse.err.find("row 2") != std::string::npos);
  const auto constant = dir.write("const.txt", "N = 10\nm = 2\nreps = 5\ngenerator = discrete 3:1\n");
  CHECK(invoke({"simulate", "--scenario-file", constant.string(), "--out", out}).code == cli::kNumericalError);
  CHECK(invoke({"simulate", "--scenario-file", constant.string(), "--ridge", "1e-8", "--out", out}).code == 0);
}
