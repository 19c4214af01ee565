#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "cpc/cli.hpp"
#include "support.hpp"

using namespace cpc;
using nlohmann::json;

namespace {

const std::string kConfigs = std::string(CPC_SOURCE_DIR) + "/configs/";

struct Run {
  int code = 0;
  std::string out, err;
};

Run run(std::vector<std::string> args) {
  args.insert(args.begin(), "cpc");
  std::vector<char*> argv;
  for (std::string& a : args) argv.push_back(a.data());
  std::ostringstream out, err;
  Run r;
  r.code = cli::main(int(argv.size()), argv.data(), out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

std::string read(const std::string& path) {
  std::ifstream f(path);
  return std::string(std::istreambuf_iterator<char>(f), {});
}

// Writes `j` to a fresh file under the temp directory.
std::string temp_config(const json& j, const std::string& name) {
  const auto p = std::filesystem::temp_directory_path() / ("cpc_test_" + name + ".json");
  std::ofstream(p) << j.dump();
  return p.string();
}

json ball_json() { return json::parse(read(kConfigs + "ball.json")); }

const json* find_cert(const json& report, const std::string& name) {
  for (const json& c : report["certificates"])
    if (c["name"] == name) return &c;
  return nullptr;
}

const std::string kRay = "0.6,0,0,0.8;";

}  // namespace

TEST_CASE("config: schema errors") {
  CHECK_THROWS_AS(cli::parse_config("{}"), cli::ConfigError);
  CHECK_THROWS_AS(cli::parse_config("not json"), cli::ConfigError);
  json j = ball_json();
  j["colour"] = "blue";
  CHECK_THROWS_AS(cli::parse_config(j.dump()), cli::ConfigError);
  j = ball_json();
  j.erase("rho");
  CHECK_THROWS_AS(cli::parse_config(j.dump()), cli::ConfigError);
  j = ball_json();
  j["C"] = 0;
  CHECK_THROWS_AS(cli::parse_config(j.dump()), cli::ConfigError);
  j = ball_json();
  j["m"] = 1;
  CHECK_THROWS_AS(cli::parse_config(j.dump()), cli::ConfigError);
  j = ball_json();
  j["schedule"]["order"] = 20;
  CHECK_THROWS_AS(cli::parse_config(j.dump()), cli::ConfigError);
  j = ball_json();
  j["rho"] = "1 - x1^^2";
  CHECK_THROWS_AS(cli::parse_config(j.dump()), ParseError);
}

TEST_CASE("config: defaults and hash") {
  const cli::RunConfig a = cli::load_config(kConfigs + "ball.json");
  CHECK(a.m == 2);
  CHECK(a.C.has_value());
  CHECK(*a.C == -1.0);
  CHECK(a.schedule.K == 8);
  CHECK(a.hash.size() == 16);
  json j = ball_json();
  j["seed"] = 2;
  CHECK(cli::parse_config(j.dump()).hash != a.hash);
  CHECK(cli::fnv1a_hex("") == "cbf29ce484222325");
  CHECK(cli::fnv1a_hex("a") == "af63dc4c8601ec8c");
}

TEST_CASE("report: ball passes every certificate") {
  const Run r = run({"report", "--config", kConfigs + "ball.json"});
  CHECK(r.code == 0);
  const json rep = json::parse(r.out);
  CHECK(rep["meta"]["version"] == cli::kVersion);
  CHECK(rep["meta"]["seed"] == 1);
  CHECK(rep["meta"]["config-hash"].get<std::string>().size() == 16);
  CHECK(rep["certificates"].size() >= 12);
  for (const json& c : rep["certificates"]) {
    CHECK_MESSAGE(c["verdict"] != "fail", c["name"].get<std::string>());
    CHECK(!c["anchor"].get<std::string>().empty());
    for (const json& d : c["diagnostics"]) CHECK(d.contains("tolerance"));
  }
  CHECK(rep["signature"]["metric"] == json::array({0, 4}));
  CHECK(rep["signature"]["levi"].is_array());
}

TEST_CASE("report: wrong constant fails the asymptotic form") {
  json j = ball_json();
  j["C"] = -2;
  const Run r = run({"report", "--config", temp_config(j, "c2")});
  CHECK(r.code == 1);
  const json rep = json::parse(r.out);
  const json* c = find_cert(rep, "asymptotic-form");
  REQUIRE(c != nullptr);
  CHECK((*c)["verdict"] == "fail");
}

TEST_CASE("report: malformed expression is a config error with a position") {
  json j = ball_json();
  j["rho"] = "1 - x1^^2";
  const Run r = run({"report", "--config", temp_config(j, "bad")});
  CHECK(r.code == 2);
  CHECK(r.err.find("position") != std::string::npos);
  CHECK(r.out.empty());
  CHECK(run({"report", "--config", "/nonexistent/config.json"}).code == 2);
  CHECK(run({"report"}).code == 2);
  CHECK(run({"frobnicate"}).code == 2);
}

TEST_CASE("report: byte-identical on rerun and through --out") {
  const cli::RunConfig cfg = cli::load_config(kConfigs + "perturbed.json");
  const cli::ReportResult a = cli::run_report(cfg), b = cli::run_report(cfg);
  CHECK(a.json == b.json);
  CHECK(a.exit_code == b.exit_code);
  const auto p = (std::filesystem::temp_directory_path() / "cpc_test_report.json").string();
  const Run r = run({"report", "--config", kConfigs + "perturbed.json", "--out", p});
  CHECK(r.out.empty());
  CHECK(read(p) == a.json);
}

TEST_CASE("report: flat space is not compactified") {
  const Run r = run({"report", "--config", kConfigs + "flat.json"});
  CHECK(r.code == 1);
  const json rep = json::parse(r.out);
  CHECK((*find_cert(rep, "volume-density"))["verdict"] == "fail");
  CHECK((*find_cert(rep, "scalar-boundary-constancy"))["verdict"] == "not-applicable");
}

TEST_CASE("sweep: ball and flat columns") {
  const cli::RunConfig ball = cli::load_config(kConfigs + "ball.json");
  std::istringstream s(cli::run_sweep(ball, "S", kRay));
  std::string line;
  std::getline(s, line);
  CHECK(line.rfind("# quantity=S anchor=", 0) == 0);
  std::getline(s, line);
  CHECK(line == "t,S");
  int rows = 0;
  while (std::getline(s, line)) {
    const double v = std::stod(line.substr(line.find(',') + 1));
    CHECK(std::abs(v - 6.0) < 1e-8);
    ++rows;
  }
  CHECK(rows == 9);

  std::istringstream tr(cli::run_sweep(ball, "tau-over-rho", kRay));
  std::getline(tr, line);
  std::getline(tr, line);
  std::vector<double> col;
  while (std::getline(tr, line)) col.push_back(std::stod(line.substr(line.find(',') + 1)));
  for (std::size_t k = 1; k < col.size(); ++k) CHECK(std::abs(col[k] - col[0]) < 1e-8 * col[0]);
  CHECK(col.back() > 0.1);

  const cli::RunConfig flat = cli::load_config(kConfigs + "flat.json");
  std::istringstream fs(cli::run_sweep(flat, "S", "0,0.1,0.2,0.3;1,0,0,0"));
  std::getline(fs, line);
  std::getline(fs, line);
  while (std::getline(fs, line)) CHECK(std::stod(line.substr(line.find(',') + 1)) == 0.0);

  for (const std::string& q : cli::sweep_quantities()) CHECK_NOTHROW(cli::run_sweep(ball, q, kRay));
  CHECK_THROWS_AS(cli::run_sweep(ball, "entropy", kRay), cli::ConfigError);
  CHECK(run({"sweep", "--config", kConfigs + "ball.json", "--quantity", "entropy", "--ray", kRay}).code == 2);
  CHECK_THROWS_AS(cli::run_sweep(ball, "S", "0.6,0,0,0.8;1,0,0,0"), cli::ConfigError);
}

TEST_CASE("limits: examples") {
  const cli::RunConfig ball = cli::load_config(kConfigs + "ball.json");
  const json s = json::parse(cli::run_limits(ball, "S", kRay));
  CHECK(s["converged"] == true);
  CHECK(std::abs(s["value"].get<double>() - 6.0) < 1e-6);
  CHECK(json::parse(cli::run_limits(ball, "1/rho", kRay))["converged"] == false);
  const json c = json::parse(cli::run_limits(ball, "0*S + 2", kRay));
  CHECK(c["value"] == 2.0);
  CHECK(c["error"].get<double>() < 1e-14);
  const json d = json::parse(cli::run_limits(ball, "detH / S", kRay));
  CHECK(d["value"].get<double>() == doctest::Approx(1.0 / 24.0).epsilon(1e-8));
  const json p = json::parse(cli::run_limits(ball, "-(2 / 2) / trP", kRay));
  CHECK(p["value"].get<double>() == doctest::Approx(-1.0).epsilon(1e-6));
  const Run r = run({"limits", "--config", kConfigs + "ball.json", "--expr", "S +", "--ray", kRay});
  CHECK(r.code == 2);
}
