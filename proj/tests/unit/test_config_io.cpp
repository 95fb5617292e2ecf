#include "helpers.hpp"

#include "dislo/config.hpp"
#include "dislo/io.hpp"

#include <doctest.h>
#include <json.hpp>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace testing;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "dislo_tests" / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

void write_file(const fs::path& p, const std::string& text) { std::ofstream(p) << text; }

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string(DISLO_CLI) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

const char* kValid = R"(# two dislocations
[lattice]
epsilon = 1/128
gamma = 0.4
domain = square
half_width = 0.75

[potentials]
name = quadratic
alpha1 = 1.5
alpha2 = 3   ; trailing comment

[frame]
angle = 0.25

[dislocations]
dislocation = -0.3 0 1 0
dislocation = 0.3 0.1 0 -1 1.297197551196598

[far_field]
matrix = 0.01 0 0 -0.01

[solver]
max_iter = 500
fixed_frame = false

[scaling]
epsilons = 1/16, 1/32

[thin_annulus]
m = 3
epsilons = 1/32 1/64
)";

}  // namespace

TEST_SUITE("config") {

TEST_CASE("ini syntax") {
  const auto ini = parse_ini("[a]\nx = 1\n# c\n; d\n\n[b]\ny=2\ny = 3\nno equals sign\n[broken\n");
  REQUIRE(ini.entries.size() == 3);
  CHECK(ini.entries[0].section == "a");
  CHECK(ini.entries[0].key == "x");
  CHECK(ini.entries[0].value == "1");
  CHECK(ini.entries[0].line == 2);
  CHECK(ini.entries[2].value == "3");
  REQUIRE(ini.syntax_errors.size() == 2);
  CHECK(ini.syntax_errors[0].rfind("line 9:", 0) == 0);
  CHECK(ini.syntax_errors[1].rfind("line 10:", 0) == 0);
}

TEST_CASE("valid config") {
  const auto c = parse_config_text(kValid);
  CHECK(c.epsilon == 1.0 / 128);
  CHECK(c.gamma == 0.4);
  CHECK(c.domain_label == "square");
  CHECK(c.domain.area() == doctest::Approx(2.25));
  CHECK(c.potentials.alpha1 == 1.5);
  CHECK(c.potentials.alpha2 == 3.0);
  CHECK(c.frame_angle == 0.25);
  REQUIRE(c.dislocations.size() == 2);
  CHECK(c.dislocations[0].theta == 0.25);  // defaults to the frame
  CHECK(c.dislocations[1].burgers == Eigen::Vector2i(0, -1));
  CHECK(c.dislocations[1].theta == doctest::Approx(0.25 + kPi / 3));
  CHECK(c.far_field(1, 1) == -0.01);
  CHECK(c.max_iter == 500);
  CHECK_FALSE(c.fixed_frame);
  CHECK(c.ladder == std::vector<double>{1.0 / 16, 1.0 / 32});
  CHECK(c.thin_m == 3.0);
  const auto mu = c.measure();
  CHECK(mu.epsilon == c.epsilon);
  CHECK(mu.gamma == c.gamma);
  const auto study = c.scaling_study(3);
  CHECK(study.threads == 3);
  CHECK(study.epsilons == c.ladder);
  CHECK(study.far_field.matrix == c.far_field);
}

TEST_CASE("defaults without a file") {
  const auto c = parse_config_text("");
  CHECK(c.epsilon == 1.0 / 64);
  CHECK(c.dislocations.empty());
  CHECK(c.domain_label == "hexagon");
}

TEST_CASE("gamma outside (0, 1) names the field") {
  try {
    parse_config_text("[lattice]\ngamma = 1.5\n");
    FAIL("expected a ConfigError");
  } catch (const ConfigError& e) {
    REQUIRE(e.issues().size() == 1);
    CHECK(e.issues()[0].kind == ConfigIssue::Kind::Range);
    CHECK(e.issues()[0].field == "lattice.gamma");
    CHECK(e.issues()[0].line == 2);
    CHECK(std::string(e.what()).find("lattice.gamma") != std::string::npos);
  }
}

TEST_CASE("every problem is reported at once") {
  const std::string text =
      "[lattice]\nepsilon = abc\ncolour = red\n[potentials]\nname = morse\n[mystery]\nx = 1\n"
      "[dislocations]\ndislocation = 0 0 1\n[solver]\nmax_iter = -4\nmax_iter = 5\n";
  try {
    parse_config_text(text);
    FAIL("expected a ConfigError");
  } catch (const ConfigError& e) {
    CHECK(e.has(ConfigIssue::Kind::Type));
    CHECK(e.has(ConfigIssue::Kind::Unknown));
    CHECK(e.has(ConfigIssue::Kind::Range));
    CHECK(e.issues().size() >= 6);
    for (const auto& i : e.issues()) CHECK(i.line > 0);
    const std::string msg = e.what();
    CHECK(msg.find("line 2") != std::string::npos);
    CHECK(msg.find("line 3") != std::string::npos);
  }
}

TEST_CASE("separation is checked against eps^gamma") {
  // 3 eps^gamma apart, below the required 4 eps^gamma.
  const double d = 3.0 * std::pow(1.0 / 64, 0.5);
  const std::string text = "[lattice]\nepsilon = 1/64\n[dislocations]\ndislocation = 0 0 1 0\ndislocation = " +
                           format_double(d) + " 0 -1 0\n";
  try {
    parse_config_text(text);
    FAIL("expected a ConfigError");
  } catch (const ConfigError& e) {
    CHECK(e.has(ConfigIssue::Kind::Separation));
  }
}

TEST_CASE("polygon domains from files") {
  const auto dir = scratch("polygon");
  write_file(dir / "tri.txt", "# triangle\n0 0\n2 0\n1 1.5\n");
  const auto c = parse_config_text("[lattice]\ndomain = polygon\npolygon_file = tri.txt\n", dir);
  CHECK(c.domain.area() == doctest::Approx(1.5));
  try {
    parse_config_text("[lattice]\ndomain = polygon\npolygon_file = missing.txt\n", dir);
    FAIL("expected a ConfigError");
  } catch (const ConfigError& e) {
    CHECK(e.has(ConfigIssue::Kind::File));
  }
  CHECK_THROWS_AS(parse_config(dir / "nope.ini"), ConfigError);
}

}  // TEST_SUITE

TEST_SUITE("io") {

TEST_CASE("doubles round trip") {
  CHECK(format_double(1.0 / 3) == "0.33333333333333331");
  CHECK(format_double(0.5) == "0.5");
  std::mt19937 rng(51);
  std::uniform_real_distribution<double> u(-1e6, 1e6);
  for (int k = 0; k < 100; ++k) {
    const double v = u(rng);
    CHECK(std::stod(format_double(v)) == v);
  }
}

TEST_CASE("csv tables") {
  const auto dir = scratch("csv");
  CsvTable empty;
  empty.header = {"a", "b"};
  emit_csv(empty, dir / "empty.csv");
  CHECK(slurp(dir / "empty.csv") == "a,b\n");
  CHECK(read_csv(dir / "empty.csv").rows.empty());

  CsvTable t;
  t.header = {"name", "x", "n", "flag"};
  t.add("row", 1.0 / 3, 7, true);
  t.add(std::string("other"), -2.5, 0, false);
  emit_csv(t, dir / "t.csv");
  const auto back = read_csv(dir / "t.csv");
  CHECK(back.header == t.header);
  CHECK(back.rows == t.rows);
  CHECK(csv_text(t) == slurp(dir / "t.csv"));

  CsvTable ragged;
  ragged.header = {"a", "b"};
  ragged.rows = {{"1"}};
  CHECK_THROWS_AS(emit_csv(ragged, dir / "r.csv"), std::invalid_argument);
  CsvTable comma;
  comma.header = {"a"};
  comma.rows = {{"1,2"}};
  CHECK_THROWS_AS(emit_csv(comma, dir / "c.csv"), std::invalid_argument);
  CHECK_THROWS_AS(emit_csv(t, dir / "no" / "such" / "dir" / "t.csv"), std::runtime_error);
}

TEST_CASE("FNV-1a reference vectors") {
  CHECK(fnv1a_hex("") == "cbf29ce484222325");
  CHECK(fnv1a_hex("a") == "af63dc4c8601ec8c");
  CHECK(fnv1a_hex("foobar") == "85944171f73967e8");
}

TEST_CASE("manifest") {
  const auto dir = scratch("manifest");
  Manifest m;
  m.subcommand = "phi";
  m.config_text = "[phi]\nburgers = 2 0\n";
  m.threads = 2;
  m.seed = 9;
  m.outputs = {"phi_certificate.csv"};
  m.timings["total"] = 0.5;
  write_manifest(m, dir / "m.json");
  const auto j = nlohmann::json::parse(slurp(dir / "m.json"));
  CHECK(j["subcommand"] == "phi");
  CHECK(j["version"] == kVersion);
  CHECK(j["config_fnv1a"] == fnv1a_hex(m.config_text));
  CHECK(j["threads"] == 2);
  CHECK(j["seed"] == 9);
  CHECK(j["outputs"][0] == "phi_certificate.csv");
}

}  // TEST_SUITE

TEST_SUITE("cli") {

TEST_CASE("exit codes") {
  const auto dir = scratch("cli_codes");
  write_file(dir / "bad.ini", "[lattice]\ngamma = 1.5\n");
  CHECK(run_cli("--config " + (dir / "bad.ini").string() + " --out " + dir.string() + " phi") == 2);
  CHECK(run_cli("--out " + dir.string() + " no-such-command") == 2);
  CHECK(run_cli("--config " + (dir / "missing.ini").string() + " phi") == 2);

  write_file(dir / "short.ini",
             "[lattice]\nepsilon = 1/16\n[dislocations]\ndislocation = 0 0 1 0\n[solver]\nmax_iter = 2\n");
  CHECK(run_cli("--config " + (dir / "short.ini").string() + " --out " + dir.string() + " minimize") == 3);

  write_file(dir / "ok.ini", "[lattice]\nepsilon = 1/16\n[dislocations]\ndislocation = 0 0 1 0\n");
  CHECK(run_cli("--config " + (dir / "ok.ini").string() + " --out " + dir.string() + " minimize") == 0);
  CHECK(fs::exists(dir / "history.csv"));
  CHECK(fs::exists(dir / "minimize_manifest.json"));
  const auto j = nlohmann::json::parse(slurp(dir / "minimize_manifest.json"));
  CHECK(j["config_fnv1a"] == fnv1a_hex(slurp(dir / "ok.ini")));
}

TEST_CASE("outputs are byte identical across runs") {
  const auto a = scratch("cli_a"), b = scratch("cli_b");
  write_file(a / "cfg.ini", "[lattice]\nepsilon = 1/16\n[dislocations]\ndislocation = 0 0 1 0\n[selfenergy]\nratios = 10 100\n");
  for (const auto& sub : {"selfenergy", "phi", "recover"}) {
    REQUIRE(run_cli("--config " + (a / "cfg.ini").string() + " --out " + a.string() + " " + sub) == 0);
    REQUIRE(run_cli("--config " + (a / "cfg.ini").string() + " --out " + b.string() + " " + sub) == 0);
  }
  for (const auto& f : {"psi_convergence.csv", "phi_certificate.csv", "strain.csv", "measure.csv", "displacement.csv"}) {
    REQUIRE(fs::exists(a / f));
    CHECK(slurp(a / f) == slurp(b / f));
  }
}

}  // TEST_SUITE
