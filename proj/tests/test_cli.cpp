#include <sys/wait.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "doctest.h"
#include "json.hpp"

namespace fs = std::filesystem;
using Json = nlohmann::json;
using doctest::Approx;

namespace {

const fs::path& dir() {
  static const fs::path d = [] {
    fs::path p = fs::temp_directory_path() / "biphoton_cli_tests";
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
  }();
  return d;
}

struct Run {
  int code;
  std::string out;
  std::string err;
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Run run(const std::string& args, const std::string& env = "") {
  const fs::path out = dir() / "stdout.txt", err = dir() / "stderr.txt";
  const std::string cmd = env + " \"" BIPHOTON_CLI "\" " + args + " >\"" + out.string() + "\" 2>\"" + err.string() + "\"";
  const int status = std::system(cmd.c_str());
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, slurp(out), slurp(err)};
}

Json run_json(const std::string& args) {
  const Run r = run(args);
  INFO(r.err);
  REQUIRE(r.code == 0);
  return Json::parse(r.out);
}

fs::path write(const std::string& name, const std::string& text) {
  const fs::path p = dir() / name;
  std::ofstream(p, std::ios::binary) << text;
  return p;
}

std::string q(const fs::path& p) { return "\"" + p.string() + "\""; }

}  // namespace

TEST_CASE("efficiency at the experimental point") {
  const Json j = run_json("efficiency --t-hat 11 --gamma-hat 0.85");
  CHECK(j["eta_in"].get<double>() == Approx(0.8).epsilon(0.125));
  CHECK(j["lambda_head"].size() == 8);
  CHECK(j["config"]["t_hat"] == 11.0);
  CHECK(j["config"]["schema_version"] == "1");
  CHECK(j["config"]["side_pulses"] == 3);
}

TEST_CASE("efficiency at a very long period matches the gate-free weight") {
  const Json gated = run_json("efficiency --t-hat 1e9 --gamma-hat 0.2");
  const Json free = run_json("efficiency --t-hat 1e9 --gamma-hat 0.2 --no-gates");
  CHECK(free["config"]["gates"] == false);
  const double l1 = free["lambda_head"][0].get<double>();
  CHECK(gated["eta_in"].get<double>() == Approx(l1 * l1).epsilon(1e-4));
}

TEST_CASE("usage errors exit with the config code") {
  CHECK(run("efficiency --t-hat 11").code == 2);
  CHECK(run("efficiency --t-hat 11 --gamma-hat abc").code == 2);
  CHECK(run("efficiency --t-hat -1 --gamma-hat 0.5").code == 2);
  CHECK(run("").code == 2);
  CHECK(run("bogus").code == 2);
  CHECK(run("efficiency --t-hat 2 --gamma-hat 1 --kernel other").code == 2);
  CHECK(run("--help").code == 0);
}

TEST_CASE("config files") {
  const fs::path ok = write("eff.json", R"({"schema_version": "1", "command": "efficiency", "t_hat": 11, "gamma_hat": 0.85, "kernel": "ungated"})");
  Json j = run_json("efficiency --config " + q(ok));
  CHECK(j["config"]["gamma_hat"] == 0.85);
  CHECK(j["config"]["kernel"] == "ungated");

  j = run_json("efficiency --config " + q(ok) + " --gamma-hat 0.5");
  CHECK(j["config"]["gamma_hat"] == 0.5);
  CHECK(j["config"]["t_hat"] == 11.0);

  CHECK(run("efficiency --config " + q(write("u.json", R"({"schema_version": "1", "t_hat": 2, "gamma_hat": 1, "typo": 3})"))).code == 2);
  CHECK(run("efficiency --config " + q(write("v.json", R"({"t_hat": 2, "gamma_hat": 1})"))).code == 2);
  CHECK(run("efficiency --config " + q(write("w.json", R"({"schema_version": "9", "t_hat": 2, "gamma_hat": 1})"))).code == 2);
  CHECK(run("efficiency --config " + q(write("x.json", R"({"schema_version": "1", "t_hat": "2", "gamma_hat": 1})"))).code == 2);
  CHECK(run("efficiency --config " + q(write("y.json", R"({"schema_version": "1", "command": "sweep"})"))).code == 2);
  CHECK(run("efficiency --config " + q(write("z.json", "{not json"))).code == 2);
  CHECK(run("efficiency --config /nonexistent/c.json").code == 3);
}

TEST_CASE("single-cell sweep and determinism") {
  const fs::path a = dir() / "a.csv", b = dir() / "b.csv", s = dir() / "s.json";
  const std::string args = "sweep --t-min 11 --t-max 11 --t-count 1 --gamma-min 0.85 --gamma-max 0.85 --gamma-count 1";
  REQUIRE(run(args + " --csv " + q(a) + " --summary " + q(s)).code == 0);
  CHECK(slurp(a) == "t_hat,gamma_hat,eta_in\n11,0.85,0.864887128\n");
  const Json j = Json::parse(slurp(s));
  CHECK(j["gamma_opt_curve"].size() == 1);
  CHECK(j["config"]["t_count"] == 1);

  const std::string grid = "sweep --t-min 2 --t-max 6 --t-count 3 --gamma-min 0.2 --gamma-max 1.4 --gamma-count 5";
  REQUIRE(run(grid + " --csv " + q(a), "BIPHOTON_THREADS=1").code == 0);
  REQUIRE(run(grid + " --csv " + q(b), "BIPHOTON_THREADS=3").code == 0);
  CHECK(slurp(a) == slurp(b));
  CHECK(run(grid + " --csv " + q(a), "BIPHOTON_THREADS=x").code == 2);
  CHECK(run(grid + " --csv /nonexistent/dir/m.csv").code == 3);
  CHECK(run(grid).code == 2);
}

TEST_CASE("spectrum") {
  Json j = run_json("spectrum --pump-fwhm-ghz 1.3 --filter-fwhm-ghz 1.4");
  CHECK(j["fwhm_GHz"].get<double>() == Approx(1.63).epsilon(0.01));
  j = run_json("spectrum --pump-fwhm-ghz 1 --filter-fwhm-ghz 1.41421356237");
  CHECK(j["fwhm_GHz"].get<double>() == Approx(std::sqrt(2.0)).epsilon(1e-3));
  j = run_json("spectrum --pump-fwhm-ghz 1.3 --filter-fwhm-ghz 0.001");
  CHECK(j["fwhm_GHz"].get<double>() == Approx(1.3).epsilon(1e-3));
  j = run_json("spectrum --pump-fwhm-ghz 1 --filter-fwhm-ghz 1 --filter-convention intensity");
  CHECK(j["filter_amplitude_fwhm_GHz"].get<double>() == Approx(std::sqrt(2.0)));
  const fs::path csv = dir() / "spec.csv";
  REQUIRE(run("spectrum --pump-fwhm-ghz 1.3 --filter-fwhm-ghz 1.4 --freq-points 401 --csv " + q(csv)).code == 0);
  CHECK(slurp(csv).rfind("frequency_GHz,intensity\n", 0) == 0);
  CHECK(run("spectrum --pump-fwhm-ghz 1.3 --filter-fwhm-ghz 1.4 --freq-points 11").code == 4);
}

TEST_CASE("analyze") {
  const fs::path counts = write("counts.csv",
                                "pump_power_mW,c_T,c_H,c_V,c_H_given_T,c_V_given_T,c_HV_given_T,acc_s_given_T\n"
                                "1,10000,500,500,62.5,62.5,0,0\n"
                                "2,20000,1000,1000,125,125,0,0\n"
                                "oops,1\n"
                                "3,30000,1500,1500,187.5,187.5,0,0\n");
  const Run r = run("analyze --input " + q(counts) + " --transmission 0.1 --transmission-err 0.01 --detector-efficiency 0.5");
  REQUIRE(r.code == 0);
  CHECK(r.err.find(":4:") != std::string::npos);
  const Json j = Json::parse(r.out);
  REQUIRE(j["points"].size() == 3);
  CHECK(j["points"][0]["eta_her"].get<double>() == Approx(0.25));
  CHECK(j["points"][0]["g2"] == 0.0);
  CHECK(j["aggregate"]["eta_her"].get<double>() == Approx(0.25));
  CHECK(j["fits"]["c_T"]["slope"].get<double>() == Approx(10000.0));
  CHECK(j["fits"]["c_T"]["intercept"].get<double>() == Approx(0.0).epsilon(1e-9));
  CHECK(j["skipped_rows"][0]["line"] == 4);

  CHECK(run("analyze --input " + q(write("empty.csv", "")) + " --transmission 0.1 --detector-efficiency 0.5").code == 3);
  CHECK(run("analyze --input /nonexistent.csv --transmission 0.1 --detector-efficiency 0.5").code == 3);
  CHECK(run("analyze --input " + q(counts) + " --transmission 0.1").code == 2);
  CHECK(run("analyze --input " + q(counts) + " --transmission 1.5 --detector-efficiency 0.5").code == 2);
}

TEST_CASE("fit-spectrum") {
  std::ostringstream sweep, mono, few;
  sweep << "detuning_GHz,normalized_coincidences\n";
  mono << "detuning_GHz,normalized_coincidences\n";
  const double w = std::hypot(1.78, 1.1 / std::sqrt(2.0)), wf = 1.1 / std::sqrt(2.0);
  for (int k = -20; k <= 20; ++k) {
    const double x = 0.2 * k;
    sweep << x << ',' << std::exp(-4 * std::log(2.0) * x * x / (w * w)) << '\n';
    mono << 0.1 * k << ',' << std::exp(-4 * std::log(2.0) * 0.01 * k * k / (wf * wf)) << '\n';
  }
  few << "detuning_GHz,normalized_coincidences\n-1,0.5\n0,1\n1,0.5\n";

  Json j = run_json("fit-spectrum --input " + q(write("sweep.csv", sweep.str())) + " --filter-fwhm-ghz 1.1");
  CHECK(std::abs(j["delta_nu_GHz"].get<double>() - 1.78) < 0.02);
  CHECK(j["residuals"].size() == 41);
  CHECK(j.contains("delta_t_ns"));
  CHECK(j.contains("delta_nu_err_GHz"));

  const Run m = run("fit-spectrum --input " + q(write("mono.csv", mono.str())) + " --filter-fwhm-ghz 1.1");
  REQUIRE(m.code == 0);
  CHECK(Json::parse(m.out)["below_resolution"] == true);
  CHECK(m.err.find("resolution") != std::string::npos);

  CHECK(run("fit-spectrum --input " + q(write("few.csv", few.str())) + " --filter-fwhm-ghz 1.1").code == 4);
}

TEST_CASE("unwritable output is an I/O failure") {
  CHECK(run("efficiency --t-hat 2 --gamma-hat 1 --output /nonexistent/dir/out.json").code == 3);
}
