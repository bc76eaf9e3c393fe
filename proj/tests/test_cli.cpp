#include <catch_amalgamated.hpp>

#include <array>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <sys/wait.h>

#include "qcopier/cli.hpp"
#include "qcopier/serialize.hpp"

using namespace qcopier;
using Catch::Matchers::WithinAbs;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code = -1;
  std::string out;
  std::string err;
  json report() const { return json::parse(out); }
};

Run cli(std::vector<std::string> args) {
  args.insert(args.begin(), "qcopier");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  Run r;
  r.code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

/// Runs the built executable; stdout captured, stderr discarded.
Run binary(const std::string& args) {
  const char* exe = std::getenv("QCOPIER_CLI");
  Run r;
  if (exe == nullptr) return r;
  FILE* p = popen((std::string(exe) + " " + args + " 2>/dev/null").c_str(), "r");
  REQUIRE(p != nullptr);
  std::array<char, 4096> buf{};
  std::size_t n = 0;
  while ((n = fread(buf.data(), 1, buf.size(), p)) > 0) r.out.append(buf.data(), n);
  const int status = pclose(p);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

class TempDir {
 public:
  TempDir() {
    path_ = fs::temp_directory_path() / ("qcopier_cli_" + std::to_string(std::random_device{}()));
    fs::create_directories(path_);
  }
  ~TempDir() { fs::remove_all(path_); }
  std::string file(const std::string& name, const std::string& content = "") const {
    const fs::path p = path_ / name;
    if (!content.empty()) std::ofstream(p) << content;
    return p.string();
  }

 private:
  fs::path path_;
};

std::string slurp(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  return {std::istreambuf_iterator<char>(f), {}};
}

json without_time(json report) {
  report.erase("wall_time_s");
  return report;
}

const std::string kCnot = "[[1,0,0,0],[0,1,0,0],[0,0,0,1],[0,0,1,0]]";

}  // namespace

TEST_CASE("decompose the CNOT gate") {
  TempDir t;
  const Run r = cli({"decompose", t.file("cnot.json", kCnot)});
  REQUIRE(r.code == kExitOk);
  const json rep = r.report();
  CHECK(rep["schema"] == kSchema);
  CHECK(rep["command"] == "decompose");
  CHECK_THAT(rep["results"]["zeta"].get<double>(), WithinAbs(kPi / 2, 1e-9));
  CHECK_THAT(rep["results"]["eta"].get<double>(), WithinAbs(kPi / 2, 1e-9));
  CHECK(rep["results"]["reconstruction_residual"].get<double>() <= 1e-9);

  const CanonicalDecomposition d = decomposition_from_json(rep["results"]["decomposition"]);
  const Isometry v = isometry_from_unitary(op_from_json(json::parse(kCnot)), CVec::basis(2, 0));
  CHECK(equal_up_to_phase(reconstruct(d), v, 1e-9));

  SECTION("b given on the command line and in the file") {
    const Run r1 = cli({"decompose", t.file("u.json", R"({"unitary": )" + kCnot + R"(, "b": [[0,0],[1,0]]})")});
    REQUIRE(r1.code == kExitOk);
    CHECK(r1.report()["config"]["b"] == json::parse("[[0.0,0.0],[1.0,0.0]]"));
    const Run r2 = cli({"decompose", t.file("u.json"), "--b", "+"});
    REQUIRE(r2.code == kExitOk);
    CHECK_THAT(r2.report()["config"]["b"][1][0].get<double>(), WithinAbs(std::sqrt(0.5), 1e-15));
  }
  SECTION("non-unitary input is a validation error") {
    CHECK(cli({"decompose", t.file("bad.json", "[[1,0,0,0],[0,1,0,0],[0,0,1,0],[0,0,1,0]]")}).code == kExitValidation);
    CHECK(cli({"decompose", t.file("small.json", "[[1,0],[0,1]]")}).code == kExitValidation);
  }
}

TEST_CASE("channel command") {
  const Run r = cli({"channel", "--gamma", "0", "--delta", "0"});
  REQUIRE(r.code == kExitOk);
  const json a = r.report()["results"]["a"]["probed"];
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) CHECK_THAT(a["m"][i][j].get<double>(), WithinAbs(0.0, 1e-15));
  }
  CHECK_THAT(a["d"][0].get<double>(), WithinAbs(0.0, 1e-15));
  CHECK_THAT(a["d"][1].get<double>(), WithinAbs(0.0, 1e-15));
  CHECK_THAT(a["d"][2].get<double>(), WithinAbs(1.0, 1e-15));

  SECTION("degrees") {
    const json deg = cli({"--degrees", "channel", "--gamma", "60", "--delta", "30"}).report();
    const json rad = cli({"channel", "--gamma", std::to_string(kPi / 3), "--delta", std::to_string(kPi / 6)}).report();
    CHECK_THAT(deg["config"]["gamma"].get<double>(), WithinAbs(kPi / 3, 1e-15));
    CHECK_THAT(deg["results"]["a"]["probed"]["m"][0][0].get<double>(),
               WithinAbs(rad["results"]["a"]["probed"]["m"][0][0].get<double>(), 1e-6));
  }
  SECTION("--check passes") {
    CHECK(cli({"--check", "channel", "--gamma", "0.4", "--delta", "1.1"}).code == kExitOk);
  }
}

TEST_CASE("ellipsoid command") {
  const Run r = cli({"--check", "ellipsoid", "--gamma", "1.0471975511965976", "--delta", "0.5235987755982988"});
  REQUIRE(r.code == kExitOk);
  const json rep = r.report();
  CHECK(rep["results"]["a"]["tangency"] == "points");
  CHECK(rep["results"]["a"]["tangency_points"].size() == 2);
  CHECK(rep["check"]["passed"] == true);
}

TEST_CASE("bb84 command") {
  TempDir t;
  const std::string cfg = t.file("bb84.json", R"({"gamma": 1.5707963267948966, "delta": 0, "n_trials": 20000, "seed": 5})");
  const Run r = cli({"--check", "bb84", cfg});
  REQUIRE(r.code == kExitOk);
  const json rep = r.report();
  CHECK(rep["results"]["analytic"]["p_x"].get<double>() == 0.0);
  CHECK(rep["results"]["analytic"]["q_x"].get<double>() == 0.0);
  CHECK_THAT(rep["results"]["analytic"]["p_y"].get<double>(), WithinAbs(0.5, 1e-15));
  CHECK(rep["results"]["empirical"]["p_x"].get<double>() == 0.0);
  CHECK(rep["seed"] == 5);

  SECTION("fixed seed is deterministic, serial or parallel") {
    const json again = cli({"bb84", cfg}).report();
    const json serial = cli({"--serial", "bb84", cfg}).report();
    CHECK(without_time(again)["results"] == rep["results"]);
    CHECK(serial["results"] == rep["results"]);
  }
  SECTION("a report re-fed as config reproduces the configuration") {
    const std::string out = t.file("report.json");
    REQUIRE(cli({"--out", out, "bb84", cfg}).code == kExitOk);
    const Run again = cli({"bb84", out});
    REQUIRE(again.code == kExitOk);
    CHECK(again.report()["config"] == rep["config"]);
    CHECK(again.report()["results"] == rep["results"]);
    const RunReport loaded = run_report_from_json(json::parse(slurp(out)));
    CHECK(without_time(to_json(loaded)) == without_time(json::parse(slurp(out))));
  }
  SECTION("ledger csv") {
    const std::string ledger = t.file("ledger.csv");
    REQUIRE(cli({"bb84", cfg, "--ledger", ledger}).code == kExitOk);
    const std::string text = slurp(ledger);
    CHECK(text.rfind("trial,mode,bit,bob,eve,branch\n", 0) == 0);
    CHECK(text.find('\r') == std::string::npos);
    CHECK(std::count(text.begin(), text.end(), '\n') == 20001);
  }
  SECTION("stochastic copier with the z mode") {
    const std::string c = t.file("zc.json", R"({"n_trials": 4000, "seed": 9, "modes": ["x", "y", "z"],
      "copier": {"branches": [{"p": 0.5, "circuit": {"gates": [{"type": "rot", "target": "b", "phi": 0.3}, {"type": "cnot", "control": "a"}]}},
                              {"p": 0.5, "circuit": {"gates": [{"type": "cnot", "control": "a"}]}}]}})");
    const Run z = cli({"--check", "bb84", c});
    REQUIRE(z.code == kExitOk);
    CHECK(z.report()["results"]["modes"].contains("z"));
  }
  SECTION("seed is mandatory") {
    const Run bad = cli({"bb84", t.file("noseed.json", R"({"gamma": 1, "delta": 0, "n_trials": 10})")});
    CHECK(bad.code == kExitValidation);
    CHECK(bad.out.empty());
    CHECK(bad.err.find("seed") != std::string::npos);
  }
}

TEST_CASE("b92 command") {
  TempDir t;
  const std::string cfg = t.file("b92.json", R"({"alpha_bar": 0.39269908169872414, "delta": 0, "gamma_prime": "auto", "n_trials": 50000, "seed": 3})");
  const Run r = cli({"--check", "b92", cfg});
  REQUIRE(r.code == kExitOk);
  const json res = r.report()["results"];
  CHECK_THAT(res["gamma_prime"].get<double>(), WithinAbs(0.95532, 1e-5));
  CHECK_THAT(res["exact_eve_success"].get<double>(), WithinAbs(std::pow(std::cos(kPi / 8), 2), 1e-12));
  CHECK(cli({"b92", t.file("bad.json", R"({"alpha_bar": 0.9, "delta": 0, "n_trials": 10, "seed": 1})")}).code ==
        kExitValidation);
  CHECK(cli({"b92", t.file("m.json", R"({"delta": 0.2, "n_trials": 100, "seed": 1, "machine": "unitary"})")}).code ==
        kExitOk);
}

TEST_CASE("verify-circuit command") {
  TempDir t;
  const GammaDelta gd{0.8, 0.3};
  const std::string a = t.file("a.json", to_json(build_fig2a(gd)).dump());
  const std::string c = t.file("c.json", to_json(build_fig2c(gd)).dump());
  const std::string x = t.file("x.json", to_json(build_fig3(primed(gd), Mode::x)).dump());
  const std::string other = t.file("o.json", to_json(build_fig2a({0.8, 0.31})).dump());

  const Run ac = cli({"--check", "verify-circuit", a, c});
  REQUIRE(ac.code == kExitOk);
  CHECK(ac.report()["results"]["equivalent"] == true);
  CHECK(cli({"--check", "verify-circuit", a, x}).code == kExitOk);
  const Run no = cli({"--check", "verify-circuit", a, other});
  CHECK(no.code == kExitAcceptance);
  CHECK(no.report()["results"]["equivalent"] == false);
  CHECK(cli({"verify-circuit", a, other}).code == kExitOk);

  SECTION("circuit json round trip") {
    Circuit custom = build_fig3(primed(gd), Mode::y);
    custom.gates.push_back(Gate::unitary(Qubit::a, hadamard(), Basis::custom(rotation(0.4))));
    const Circuit back = circuit_from_json(to_json(custom));
    CHECK(max_abs_diff(compile(back), compile(custom)) == 0.0);
    CHECK(back.gates.size() == custom.gates.size());
  }
}

TEST_CASE("stochastic command") {
  TempDir t;
  const GammaDelta gd{0.7, 0.4};
  Circuit c1 = build_fig2a({gd.gamma, kPi - gd.delta});
  c1.gates.push_back(Gate::rot(Qubit::b, kPi));
  const json spec = {{"branches", {{{"p", 0.5}, {"circuit", to_json(build_fig2a(gd))}}, {{"p", 0.5}, {"circuit", to_json(c1)}}}}};
  const Run r = cli({"--check", "stochastic", t.file("copier.json", spec.dump())});
  REQUIRE(r.code == kExitOk);
  const json res = r.report()["results"];
  for (const char* q : {"a", "b"}) {
    for (int k = 0; k < 3; ++k) CHECK(std::abs(res["averaged"][q]["d"][k].get<double>()) <= 1e-12);
  }
  CHECK(res["coin_embedding"]["max_deviation"].get<double>() <= 1e-10);

  CHECK(cli({"stochastic", t.file("bad.json", R"({"branches": [{"p": 0.7, "isometry": [[1,0],[0,1],[0,0],[0,0]]}]})")}).code ==
        kExitValidation);
  const Run iso = cli({"stochastic", t.file("iso.json", R"({"branches": [{"p": 1, "isometry": [[1,0],[0,0],[0,1],[0,0]]}]})")});
  REQUIRE(iso.code == kExitOk);
  CHECK_FALSE(iso.report()["results"].contains("coin_embedding"));
}

TEST_CASE("sweep command") {
  TempDir t;
  SECTION("grid") {
    const std::string csv = t.file("s.csv");
    const Run r = cli({"--check", "sweep", "--gamma", "0:1.5:4", "--delta", "0:1.5:3", "--csv", csv});
    REQUIRE(r.code == kExitOk);
    CHECK(r.report()["results"]["rows"] == 12);
    CHECK(r.report()["results"]["max_circle_residual"].get<double>() <= 1e-12);
    const std::string text = slurp(csv);
    CHECK(text.rfind("gamma_rad,delta_rad,axis_a1", 0) == 0);
    CHECK(std::count(text.begin(), text.end(), '\n') == 13);
    CHECK(text.find('\r') == std::string::npos);
  }
  SECTION("empty grid gives a header-only file") {
    const std::string csv = t.file("e.csv");
    REQUIRE(cli({"sweep", "--gamma", "0:1:0", "--delta", "0:1:5", "--csv", csv}).code == kExitOk);
    const std::string text = slurp(csv);
    CHECK(std::count(text.begin(), text.end(), '\n') == 1);
  }
  SECTION("bad grid and unwritable output") {
    CHECK(cli({"sweep", "--gamma", "0:1", "--delta", "0:1:5", "--csv", t.file("x.csv")}).code == kExitValidation);
    const Run r = cli({"sweep", "--gamma", "0:1:2", "--delta", "0:1:2", "--csv", "/nonexistent/dir/out.csv"});
    CHECK(r.code == kExitValidation);
    CHECK(r.err.find("/nonexistent/dir/out.csv") != std::string::npos);
  }
}

TEST_CASE("exit codes") {
  TempDir t;
  CHECK(cli({}).code == kExitParse);
  CHECK(cli({"frobnicate"}).code == kExitParse);
  CHECK(cli({"channel", "--gamma", "x", "--delta", "0"}).code == kExitParse);
  CHECK(cli({"channel", "--gamma", "0"}).code == kExitParse);
  CHECK(cli({"bb84", t.file("broken.json", "{\"gamma\": ")}).code == kExitParse);
  CHECK(cli({"bb84", t.file("missing.json")}).code == kExitValidation);
  CHECK(cli({"channel", "--gamma", "nan", "--delta", "0"}).code == kExitValidation);
  CHECK(cli({"ellipsoid", "--gamma", "0", "--delta", "inf"}).code == kExitValidation);
  CHECK(cli({"--help"}).code == kExitOk);
}

TEST_CASE("installed executable") {
  if (std::getenv("QCOPIER_CLI") == nullptr) SKIP("QCOPIER_CLI not set");
  const Run ok = binary("channel --gamma 0.3 --delta 0.2");
  CHECK(ok.code == kExitOk);
  CHECK(json::parse(ok.out)["schema"] == kSchema);
  CHECK(binary("nonsense").code == kExitParse);
  CHECK(binary("bb84 /nonexistent.json").code == kExitValidation);
  CHECK(binary("channel --gamma nan --delta 0").code == kExitValidation);
  TempDir t;
  const std::string a = t.file("a.json", to_json(build_fig2a({0.5, 0.2})).dump());
  const std::string b = t.file("b.json", to_json(build_fig2a({0.5, 0.25})).dump());
  CHECK(binary("--check verify-circuit " + a + " " + b).code == kExitAcceptance);
}
