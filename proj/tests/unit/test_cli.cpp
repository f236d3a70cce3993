#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "coopbeacon/config.hpp"
#include "coopbeacon/experiments.hpp"
#include "coopbeacon/table.hpp"

using namespace coopbeacon;

namespace {

std::filesystem::path temp_file(const std::string& name, const std::string& contents) {
  const auto dir = std::filesystem::temp_directory_path() / "coopbeacon_tests";
  std::filesystem::create_directories(dir);
  const auto path = dir / name;
  std::ofstream(path) << contents;
  return path;
}

struct CliRun {
  int code;
  std::string out;
  std::string err;
};

CliRun run(std::vector<std::string> args) {
  std::ostringstream out;
  std::ostringstream err;
  const int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

const char* kSmallSweep =
    "seed = 7\n"
    "[sweep]\n"
    "schemes = nc, ocsa\n"
    "rho_db = 0:20:10\n"
    "n_trials = 3000\n"
    "[protocol]\n"
    "alpha = 0.5\n"
    "d = 2\n"
    "[links]\n"
    "lambda_pt = 1\n"
    "lambda_pr = 2\n"
    "lambda_tr = 3\n";

}  // namespace

TEST_CASE("key-value parsing with sections and comments") {
  const KeyValueConfig kv = KeyValueConfig::parse_text(
      "# comment\n"
      "seed = 3   # trailing\n"
      "\n"
      "[sweep]\n"
      "n_trials = 10\n");
  REQUIRE(kv.find("seed"));
  CHECK(kv.find("seed")->value == "3");
  CHECK(kv.find("sweep.n_trials")->value == "10");
  CHECK(kv.find("sweep.n_trials")->line == 5);
  CHECK_FALSE(kv.find("missing"));
}

TEST_CASE("malformed config names the key and line") {
  try {
    const KeyValueConfig kv = KeyValueConfig::parse_text("seed = 1\n[sweep]\nbogus = 3\n");
    (void)ExperimentConfig::from_kv(kv);
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(e.key() == "sweep.bogus");
    CHECK(e.line() == 3);
    CHECK(std::string(e.what()).find("line 3") != std::string::npos);
  }
  CHECK_THROWS_AS(KeyValueConfig::parse_text("seed 1\n"), ConfigError);
  CHECK_THROWS_AS(KeyValueConfig::parse_text("seed = 1\nseed = 2\n"), ConfigError);
  CHECK_THROWS_AS(KeyValueConfig::parse_text("[open\n"), ConfigError);
  CHECK_THROWS_AS(ExperimentConfig::from_kv(KeyValueConfig::parse_text("[sweep]\nn_trials = 5\n")), ConfigError);
  try {
    (void)ExperimentConfig::from_kv(KeyValueConfig::parse_text("seed = 1\n[sweep]\nn_trials = many\n"));
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(e.key() == "sweep.n_trials");
    CHECK(e.line() == 3);
  }
}

TEST_CASE("overrides replace file values") {
  KeyValueConfig kv = KeyValueConfig::parse_text(kSmallSweep);
  kv.apply_override("sweep.n_trials=42");
  kv.apply_override("protocol.alpha = 0.25");
  const ExperimentConfig cfg = ExperimentConfig::from_kv(kv);
  CHECK(cfg.n_trials == 42);
  CHECK(cfg.alpha == 0.25);
  CHECK_THROWS_AS(kv.apply_override("no_equals_sign"), ConfigError);
}

TEST_CASE("list and range values") {
  const ExperimentConfig cfg = ExperimentConfig::from_kv(KeyValueConfig::parse_text(kSmallSweep));
  CHECK(cfg.rho_grid_db == std::vector<double>{0.0, 10.0, 20.0});
  CHECK(cfg.schemes == std::vector<Scheme>{Scheme::NC, Scheme::OCSA});
  CHECK(cfg.lambda_pr == 2.0);
}

TEST_CASE("config echo round-trips exactly") {
  KeyValueConfig kv = KeyValueConfig::parse_text(kSmallSweep);
  kv.apply_override("protocol.alpha=0.1");
  kv.apply_override("imperfect.sigma2=0.3,0.01");
  const ExperimentConfig a = ExperimentConfig::from_kv(kv);
  KeyValueConfig echo;
  for (const auto& [k, v] : a.to_kv()) {
    echo.set(k, v);
  }
  const ExperimentConfig b = ExperimentConfig::from_kv(echo);
  CHECK(a.to_kv() == b.to_kv());
  CHECK(b.alpha == 0.1);
  CHECK(b.sigma2 == std::vector<double>{0.3, 0.01});
}

TEST_CASE("format_double is shortest round-trip") {
  for (double v : {0.1, 1.0 / 3.0, 1e-300, 12345.678, -0.0}) {
    CHECK(std::stod(format_double(v)) == v);
  }
  CHECK(format_double(0.1) == "0.1");
}

TEST_CASE("CSV output") {
  Table t;
  t.columns = {"a", "b", "c"};
  std::ostringstream empty;
  write_csv(t, empty);
  CHECK(empty.str() == "a,b,c\n");
  t.add_row({1.0 / 3.0, std::int64_t{4}, std::string("x")});
  std::ostringstream os;
  write_csv(t, os);
  CHECK(os.str() == "a,b,c\n0.3333333333,4,x\n");
  CHECK_THROWS_AS(t.add_row({1.0}), std::logic_error);
}

TEST_CASE("JSON output round-trips exactly") {
  Table t;
  t.columns = {"rho_db", "scheme", "p_miss"};
  t.add_row({10.0, std::string("nc"), 0.1234567890123456789});
  t.add_row({20.0, std::string("ocsa"), 3.3e-9});
  const std::map<std::string, std::string> meta{{"seed", "7"}};
  std::stringstream ss;
  write_json(t, meta, ss);
  std::map<std::string, std::string> meta_back;
  const Table back = read_json_table(ss, &meta_back);
  CHECK(meta_back == meta);
  CHECK(back.columns == t.columns);
  REQUIRE(back.rows.size() == 2);
  CHECK(std::get<double>(back.rows[0][2]) == std::get<double>(t.rows[0][2]));
  CHECK(std::get<double>(back.rows[1][2]) == 3.3e-9);
  CHECK(std::get<std::string>(back.rows[1][1]) == "ocsa");
}

TEST_CASE("emit_table surfaces I/O failures") {
  Table t;
  t.columns = {"a"};
  std::ostringstream sink;
  CHECK_THROWS_AS(emit_table(t, {}, TableFormat::Csv, "/nonexistent-dir/x.csv", sink), IoError);
}

TEST_CASE("CLI exit codes") {
  const auto good = temp_file("good.conf", kSmallSweep);
  CHECK(run({"miss-sweep", "--config", good.string()}).code == exit_code::kOk);
  CHECK(run({"miss-sweep"}).code == exit_code::kConfig);
  CHECK(run({"no-such-kind", "--config", good.string()}).code == exit_code::kConfig);
  CHECK(run({"miss-sweep", "--config", "/nonexistent/cfg.conf"}).code == exit_code::kConfig);

  const auto bad = temp_file("bad.conf", "seed = 1\n[sweep]\nn_trails = 4\n");
  const CliRun r = run({"miss-sweep", "--config", bad.string()});
  CHECK(r.code == exit_code::kConfig);
  CHECK(r.err.find("n_trails") != std::string::npos);
  CHECK(r.err.find("line 3") != std::string::npos);

  CHECK(run({"miss-sweep", "--config", good.string(), "--set", "protocol.alpha=1.5"}).code == exit_code::kNumeric);
  CHECK(run({"miss-sweep", "--config", good.string(), "--out", "/nonexistent-dir/out.csv"}).code == exit_code::kIo);
}

TEST_CASE("miss-sweep CSV layout") {
  const auto good = temp_file("layout.conf", kSmallSweep);
  const CliRun r = run({"miss-sweep", "--config", good.string()});
  REQUIRE(r.code == 0);
  std::istringstream is(r.out);
  std::string header;
  std::getline(is, header);
  CHECK(header == "rho_db,scheme,node,p_miss,stderr");
  int rows = 0;
  for (std::string line; std::getline(is, line);) {
    ++rows;
  }
  CHECK(rows == 2 * 3 * 2);
  CHECK(r.out.back() == '\n');
}

TEST_CASE("JSON meta echoes the config and re-ingests to the same plan") {
  const auto good = temp_file("meta.conf", kSmallSweep);
  const CliRun r = run({"joint-sweep", "--config", good.string(), "--format", "json", "--set", "sweep.n_trials=500"});
  REQUIRE(r.code == 0);
  std::istringstream is(r.out);
  std::map<std::string, std::string> meta;
  const Table t = read_json_table(is, &meta);
  CHECK(meta.at("experiment") == "joint-sweep");
  CHECK(meta.at("seed") == "7");
  CHECK(t.rows.size() == 6);
  KeyValueConfig echo;
  for (const auto& [k, v] : meta) {
    if (k != "experiment") {
      echo.set(k, v);
    }
  }
  const ExperimentConfig again = ExperimentConfig::from_kv(echo);
  CHECK(again.n_trials == 500);
  std::map<std::string, std::string> expect = meta;
  expect.erase("experiment");
  std::map<std::string, std::string> plan = again.to_kv();
  plan.erase("output.path");
  CHECK(plan == expect);
  CHECK(meta.count("output.path") == 0);
}

TEST_CASE("output is byte-identical across thread counts") {
  const auto good = temp_file("threads.conf", kSmallSweep);
  const CliRun a = run({"miss-sweep", "--config", good.string(), "--threads", "1", "--format", "json"});
  const CliRun b = run({"miss-sweep", "--config", good.string(), "--threads", "4", "--format", "json"});
  REQUIRE(a.code == 0);
  CHECK(a.out == b.out);
}

TEST_CASE("output files do not depend on their path") {
  const auto good = temp_file("paths.conf", kSmallSweep);
  const auto dir = std::filesystem::temp_directory_path() / "coopbeacon_tests";
  const auto p1 = dir / "one.json";
  const auto p2 = dir / "two.json";
  REQUIRE(run({"joint-sweep", "--config", good.string(), "--format", "json", "--out", p1.string()}).code == 0);
  REQUIRE(run({"joint-sweep", "--config", good.string(), "--format", "json", "--out", p2.string(), "--threads", "3"})
              .code == 0);
  auto slurp = [](const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
  };
  CHECK_FALSE(slurp(p1).empty());
  CHECK(slurp(p1) == slurp(p2));
}

TEST_CASE("every experiment kind runs on a tiny config") {
  const auto path = temp_file("tiny.conf",
                              "seed = 3\n"
                              "[sweep]\nrho_db = 0, 20, 30, 40\nn_trials = 2000\n"
                              "[diversity]\nfit_lo_db = 20\nfit_hi_db = 40\n"
                              "[outage]\nepsilon = 0.1\n"
                              "[imperfect]\nsigma2 = 0.1\n"
                              "[overhead]\nw1 = 0.1\nw2 = 0.1\n"
                              "[multiuser]\npairs = 1, 2\n");
  for (const std::string& kind : experiment_kinds()) {
    CAPTURE(kind);
    const CliRun r = run({kind, "--config", path.string()});
    CHECK(r.code == 0);
    CHECK_FALSE(r.out.empty());
  }
}

TEST_CASE("selfcheck passes") {
  for (const SelfCheck& c : run_selfcheck()) {
    CAPTURE(c.name);
    CAPTURE(c.detail);
    CHECK(c.passed);
  }
}
