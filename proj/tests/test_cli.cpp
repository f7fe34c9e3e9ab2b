#include <doctest.h>

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "htp/cli.hpp"
#include "htp/error.hpp"

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result run(const std::vector<std::string>& args) {
  std::ostringstream out;
  std::ostringstream err;
  const int code = htp::cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string temp_path(const char* name) { return std::string("/tmp/htp_test_") + name; }

}  // namespace

TEST_CASE("FNV-1a reference values") {
  CHECK(htp::cli::fnv1a_hex("") == "cbf29ce484222325");
  CHECK(htp::cli::fnv1a_hex("a") == "af63dc4c8601ec8c");
  CHECK(htp::cli::fnv1a_hex("foobar") == "85944171f73967e8");
}

TEST_CASE("config text") {
  htp::cli::RunConfig c;
  htp::cli::apply_config_text(c, "# comment\nseed = 7\nformat=json  # trailing\n\nx_min = 0.5\ngrid_spacing = log\n");
  CHECK(c.seed == 7);
  CHECK(c.format == "json");
  CHECK(c.x_min == 0.5);
  CHECK(c.grid_spacing == "log");
  CHECK_THROWS_AS(htp::cli::apply_config_text(c, "colour = red\n"), htp::DomainError);
  CHECK_THROWS_AS(htp::cli::apply_config_text(c, "seed = 1.5\n"), htp::DomainError);
  CHECK_THROWS_AS(htp::cli::apply_config_text(c, "just words\n"), htp::DomainError);
  htp::cli::RunConfig bad;
  bad.x_min = 0.0;
  CHECK_THROWS_AS(bad.validate(), htp::DomainError);
  // The worker count does not enter the hash.
  htp::cli::RunConfig a;
  htp::cli::RunConfig b;
  b.workers = 3;
  CHECK(a.canonical() == b.canonical());
  b.seed = 2;
  CHECK(a.canonical() != b.canonical());
}

TEST_CASE("value commands") {
  const auto k = run({"kernel", "eval", "--alpha", "-0.5", "--beta", "0.5", "--x", "2", "--y", "1"});
  CHECK(k.code == 0);
  CHECK(k.out.rfind("0.424413181578", 0) == 0);
  const auto g = run({"specfun", "eval", "--fn", "gamma", "--args", "0.5,5"});
  CHECK(g.out == "1.7724538509055161\n24\n");
  CHECK(run({"specfun", "eval", "--fn", "besselj", "--args", "0.5"}).code == 2);
}

TEST_CASE("usage errors exit with 2") {
  CHECK(run({}).code == 2);
  CHECK(run({"bogus"}).code == 2);
  CHECK(run({"verify", "cz", "--a", "0", "--b", "0.7", "--kmin", "0"}).code == 2);
  CHECK(run({"verify", "cz", "--a", "0", "--b", "0.7", "--kmin", "0", "--kmax", "1", "--colour", "red"}).code == 2);
  CHECK(run({"verify", "cz", "--a", "0", "--b", "1.5", "--kmin", "0", "--kmax", "1"}).code == 2);
  CHECK(run({"hankel", "transform", "--nu", "0", "--f", "bump:2,0.8", "--xmin", "0"}).code == 2);
  CHECK(run({"--format", "xml", "ap", "--weight", "one"}).code == 2);
}

TEST_CASE("divergent weight is informational") {
  const auto r = run({"ap", "--weight", "pow:1.5", "--p", "2"});
  CHECK(r.code == 0);
  CHECK(r.out.find("# summary.divergent: true") != std::string::npos);
  const auto f = run({"ap", "--weight", "pow:0.5", "--family", "dyadic:-2,2", "--format", "json"});
  CHECK(f.code == 0);
  CHECK(f.out.find("\"divergent\": false") != std::string::npos);
  CHECK(f.out.find("\"trend\"") != std::string::npos);
}

TEST_CASE("invariant failure exits with 1") {
  CHECK(run({"verify", "lemma", "--gamma", "0", "--lambda", "1"}).code == 0);
  CHECK(run({"verify", "lemma", "--gamma", "0", "--lambda", "1", "--threshold", "1.1"}).code == 1);
}

TEST_CASE("report metadata and config precedence") {
  const std::string cfg = temp_path("config.txt");
  {
    std::ofstream f(cfg);
    f << "seed = 7\nformat = json\n";
  }
  const auto from_file = run({"--config", cfg, "verify", "radial", "--n", "2"});
  CHECK(from_file.code == 0);
  CHECK(from_file.out.find("\"seed\": 7") != std::string::npos);
  CHECK(from_file.out.find("\"config_hash\"") != std::string::npos);
  CHECK(from_file.out.find("\"version\"") != std::string::npos);
  const auto flag = run({"--config", cfg, "verify", "radial", "--n", "2", "--seed", "9", "--format", "csv"});
  CHECK(flag.out.find("# seed: 9") != std::string::npos);
  CHECK(flag.out.find("# statement: ") != std::string::npos);
  CHECK(flag.out.find("n,sigma,item,measured,bound,ratio,note\n") != std::string::npos);
  std::remove(cfg.c_str());
}

TEST_CASE("reruns are byte-identical and --out writes the report") {
  const std::vector<std::string> args{"verify", "vector", "--a", "0", "--b", "0.7", "--kmax", "1",
                                      "--draws", "3", "--weight", "pow:0.25", "--seed", "5"};
  const auto first = run(args);
  const auto second = run(args);
  CHECK(first.code == 0);
  CHECK(first.out == second.out);
  const std::string path = temp_path("report.csv");
  auto with_out = args;
  with_out.insert(with_out.end(), {"--out", path});
  CHECK(run(with_out).code == 0);
  std::ifstream f(path);
  std::stringstream text;
  text << f.rdbuf();
  CHECK(text.str() == first.out);
  std::remove(path.c_str());
}
