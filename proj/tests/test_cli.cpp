#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "monret/cli.hpp"
#include "monret/errors.hpp"
#include "monret/io.hpp"
#include "oracles.hpp"

using namespace monret;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& tag) {
    path = fs::temp_directory_path() / ("monret_test_" + tag + "_" + std::to_string(std::random_device{}()));
    fs::remove_all(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

std::string slurp(const fs::path& p) {
  std::ifstream is(p, std::ios::binary);
  std::ostringstream os;
  os << is.rdbuf();
  return os.str();
}

Json two_level_config() {
  return Json::parse(R"({"model": {"energies": [-1, 1], "weights": [0.5, 0.5]},
                         "dist": {"type": "exponential", "rate": 1}})");
}

int run(const std::string& cmd, const Json& config, const fs::path& out, cli::Options o = {}) {
  std::ostringstream sout, serr;
  o.quiet = true;
  return cli::run(cmd, config, out.string(), o, sout, serr);
}

}  // namespace

TEST_CASE("model parsing") {
  const auto m = model_from_json(Json::parse(R"({"energies": [1, -1, 1], "weights": [0.25, 0.5, 0.25]})"));
  CHECK(m.dimension() == 2);
  CHECK(m.weight(1) == doctest::Approx(0.5));

  const auto h = model_from_json(Json::parse(
      R"({"hamiltonian": [[0, [0, -1]], [[0, 1], 0]], "initial_state": [1, 0]})"));
  CHECK(h.dimension() == 2);
  CHECK(h.energy(0) == doctest::Approx(-1.0));

  CHECK_THROWS_AS(model_from_json(Json::parse(R"({"energies": [1], "weights": [1], "extra": 1})")), InvalidInput);
  CHECK_THROWS_AS(model_from_json(Json::parse(R"({"energies": [1, 2], "weights": [1]})")), InvalidInput);
  CHECK_THROWS_AS(model_from_json(Json::parse(R"({"hamiltonian": [[1, 2]], "initial_state": [1]})")), InvalidInput);
  CHECK_THROWS_AS(model_from_json(Json::parse(R"([1, 2])")), InvalidInput);
}

TEST_CASE("distribution parsing round-trips") {
  for (const char* text : {R"({"type": "fixed", "tau": 0.5})", R"({"type": "exponential", "rate": 2})",
                           R"({"type": "uniform", "a": 0.5, "b": 1.5})", R"({"type": "gamma", "shape": 2, "rate": 3})"}) {
    const Json j = Json::parse(text);
    CHECK(to_json(dist_from_json(j)) == j);
  }
  CHECK_THROWS_AS(dist_from_json(Json::parse(R"({"type": "poisson", "rate": 1})")), InvalidInput);
  CHECK_THROWS_AS(dist_from_json(Json::parse(R"({"type": "fixed"})")), InvalidInput);
  CHECK_THROWS_AS(dist_from_json(Json::parse(R"({"type": "fixed", "tau": "x"})")), InvalidInput);
  CHECK_THROWS_AS(dist_from_json(Json::parse(R"({"type": "exponential", "rate": -1})")), InvalidInput);
}

TEST_CASE("number formatting keeps full precision") {
  CHECK(format_double(0.1) == "0.10000000000000001");
  CHECK(std::stod(format_double(1.0 / 3.0)) == 1.0 / 3.0);
  CHECK(format_double(std::numeric_limits<double>::infinity()) == "inf");
}

TEST_CASE("verify on the two-level system passes") {
  TempDir dir("verify");
  CHECK(run("verify", two_level_config(), dir.path) == cli::kOk);
  const Json j = Json::parse(slurp(dir.path / "verify.json"));
  CHECK(j["pass"] == true);
  for (const auto& row : j["checks"]) CHECK(row["residual"].get<double>() <= 1e-8);
}

TEST_CASE("exact reports the dimension for a random model") {
  std::mt19937_64 gen(61);
  const auto m = oracle::random_model(5, gen);
  Json config = {{"model", {{"energies", m.energies()}, {"weights", m.weights()}}},
                 {"dist", {{"type", "gamma"}, {"shape", 2.0}, {"rate", 2.0}}},
                 {"dump_matrices", true}};
  TempDir dir("exact");
  REQUIRE(run("exact", config, dir.path) == cli::kOk);
  const Json j = Json::parse(slurp(dir.path / "report.json"));
  CHECK(std::abs(j["report"]["mean_k"].get<double>() - 5.0) < 1e-8);
  const std::string sweep = slurp(dir.path / "sweep.csv");
  CHECK(sweep.rfind("# monret exact\nomega,re_F,im_F,re_Ftau,im_Ftau\n", 0) == 0);
  CHECK(fs::exists(dir.path / "gamma.csv"));
}

TEST_CASE("flat distribution form") {
  CHECK(to_json(dist_from_json(Json::parse(R"({"dist": "exponential", "rate": 2})"))) ==
        Json::parse(R"({"type": "exponential", "rate": 2})"));
  Json config = Json::parse(R"({"model": {"energies": [-1, 1], "weights": [0.5, 0.5]},
                                "dist": "uniform", "a": 0.5, "b": 1.5})");
  TempDir dir("flat");
  CHECK(run("verify", config, dir.path) == cli::kOk);
  config["tau"] = 1.0;
  CHECK(run("verify", config, dir.path / "x") == cli::kSchemaError);
}

TEST_CASE("malformed configs exit 2 and write nothing") {
  TempDir dir("bad");
  Json missing_dist = {{"model", two_level_config()["model"]}};
  CHECK(run("exact", missing_dist, dir.path) == cli::kSchemaError);
  Json typo = two_level_config();
  typo["samplez"] = 10;
  CHECK(run("sample", typo, dir.path) == cli::kSchemaError);
  CHECK(run("nonsense", two_level_config(), dir.path) == cli::kSchemaError);
  CHECK_FALSE(fs::exists(dir.path));

  const fs::path cfg = fs::temp_directory_path() / "monret_test_malformed.json";
  std::ofstream(cfg) << "{ not json";
  std::ostringstream o, e;
  CHECK(cli::run_file("exact", cfg.string(), dir.path.string(), {}, o, e) == cli::kSchemaError);
  CHECK_FALSE(fs::exists(dir.path));
  fs::remove(cfg);
}

TEST_CASE("resonant config exits 3 without output") {
  TempDir dir("res");
  Json config = two_level_config();
  config["dist"] = {{"type", "fixed"}, {"tau", 3.141592653589793}};
  CHECK(run("exact", config, dir.path) == cli::kResonance);
  CHECK(run("verify", config, dir.path) == cli::kResonance);
  CHECK_FALSE(fs::exists(dir.path));
}

TEST_CASE("sampling is byte-identical across runs and thread counts") {
  Json config = two_level_config();
  config["samples"] = 20000;
  TempDir a("s1"), b("s2");
  cli::Options one;
  one.threads = 1;
  one.seed = 99;
  cli::Options three;
  three.threads = 3;
  three.seed = 99;
  REQUIRE(run("sample", config, a.path, one) == cli::kOk);
  REQUIRE(run("sample", config, b.path, three) == cli::kOk);
  CHECK(slurp(a.path / "histogram.csv") == slurp(b.path / "histogram.csv"));
  CHECK(slurp(a.path / "report.json") == slurp(b.path / "report.json"));
  CHECK(slurp(a.path / "histogram.csv").rfind("# monret sample seed=99\n", 0) == 0);
}

TEST_CASE("default seed is recorded") {
  Json config = two_level_config();
  config["samples"] = 1000;
  TempDir dir("seed");
  REQUIRE(run("sample", config, dir.path) == cli::kOk);
  const Json j = Json::parse(slurp(dir.path / "report.json"));
  CHECK(j["seed"].get<std::uint64_t>() == cli::kDefaultSeed);
}

TEST_CASE("sample and exact agree within standard errors") {
  Json config = two_level_config();
  config["samples"] = 100000;
  TempDir s("agree_s"), e("agree_e");
  REQUIRE(run("sample", config, s.path) == cli::kOk);
  Json exact_cfg = two_level_config();
  REQUIRE(run("exact", exact_cfg, e.path) == cli::kOk);
  const Json mc = Json::parse(slurp(s.path / "report.json"))["report"];
  const Json ex = Json::parse(slurp(e.path / "report.json"))["report"];
  for (const char* order : {"1", "2"}) {
    const double diff = mc["moments_k"][order].get<double>() - ex["moments_k"][order].get<double>();
    CHECK(std::abs(diff) < 4.0 * mc["std_errors_k"][order].get<double>());
  }
}

TEST_CASE("trajectory and fluctuation artifacts") {
  Json config = two_level_config();
  config["realizations"] = 2;
  config["omega_points"] = 256;
  TempDir dir("traj");
  REQUIRE(run("trajectory", config, dir.path) == cli::kOk);
  CHECK(fs::exists(dir.path / "phi_0.csv"));
  CHECK(fs::exists(dir.path / "trajectory_1.csv"));
  const Json w = Json::parse(slurp(dir.path / "windings.json"));
  CHECK(w["windings"].size() == 2);

  TempDir fl("fluct");
  Json fc = Json::parse(R"({"j_range": {"min": 0.5, "max": 3.0, "points": 11}, "tau_or_rate": 1.0})");
  REQUIRE(run("fluctuations", fc, fl.path) == cli::kOk);
  const std::string csv = slurp(fl.path / "fluctuations.csv");
  CHECK(csv.find("J,second_moment_random,second_moment_stroboscopic") != std::string::npos);
  Json bad = Json::parse(R"({"j_grid": [1.0, -2.0]})");
  CHECK(run("fluctuations", bad, fl.path / "x") == cli::kSchemaError);
}
