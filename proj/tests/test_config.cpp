#include <doctest.h>

#include <filesystem>
#include <map>
#include <string>

#include "expint/config.hpp"
#include "expint/errors.hpp"

using namespace expint;
namespace fs = std::filesystem;

namespace {

const std::string kMinimal =
    "schema_version 1\n"
    "problem { name allen_cahn  N 16  u0 { kind hat } }\n"
    "scheme { name expeuler }\n"
    "study { }\n";

Command command_for(const fs::path& path) {
  const std::string stem = path.stem().string();
  if (stem.rfind("defect_", 0) == 0) return Command::defect;
  if (stem.size() > 6 && stem.substr(stem.size() - 6) == "_solve") return Command::solve;
  return Command::converge;
}

std::string error_of(const std::string& text, Command command) {
  try {
    parse_config(text, command);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST_SUITE("parse_config") {
  TEST_CASE("defaults are resolved") {
    const ExperimentConfig c = parse_config(kMinimal, Command::converge);
    CHECK(c.problem.dims == 2);
    CHECK(c.problem.epsilon == 0.1);
    CHECK(c.problem.diffusivity() == doctest::Approx(0.01).epsilon(1e-15));
    CHECK(c.scheme.c2 == 0.5);
    CHECK(c.study.T == 0.1);
    REQUIRE(c.study.taus.size() == 7);
    CHECK(c.study.taus.front() == 0.025);
    CHECK(c.study.taus.back() == doctest::Approx(0.025 / 64).epsilon(1e-15));
    REQUIRE(c.study.norms.size() == 2);
    CHECK(c.study.norms[0].name() == "max");
    CHECK(c.study.reference.kind == ReferenceSpec::Kind::fine_step);
    CHECK(c.study.reference.refinement == 32);
    CHECK(c.output.directory.empty());
  }

  TEST_CASE("explicit tau list") {
    const std::string text =
        "schema_version 1\n"
        "problem { name heat  dims 1  N 32  nu 1  u0 { kind hat } }\n"
        "scheme { name erk2  c2 1 }\n"
        "study { T 0.5  taus \"0.25 0.125 0.0625\"  reference { kind exact } }\n";
    const ExperimentConfig c = parse_config(text, Command::converge);
    CHECK(c.study.taus == std::vector<double>{0.25, 0.125, 0.0625});
    CHECK(c.study.reference.kind == ReferenceSpec::Kind::exact);
    CHECK(c.scheme.c2 == 1.0);
    CHECK(c.problem.nu == 1.0);
  }

  TEST_CASE("holder norm parameters") {
    const std::string text =
        "schema_version 1\n"
        "problem { name burgers  N 16  u0 { kind fourier_decay  gamma 0.5  seed 4 } }\n"
        "scheme { name expeuler }\n"
        "study { norms \"holder\"  holder { exponent 0.25  samples 300  seed 8 } }\n";
    const ExperimentConfig c = parse_config(text, Command::converge);
    REQUIRE(c.study.norms.size() == 1);
    CHECK(c.study.norms[0].exponent == 0.25);
    CHECK(c.study.norms[0].samples == 300);
    CHECK(c.study.norms[0].seed == 8);
    CHECK(c.problem.u0.gamma == 0.5);
    CHECK(c.problem.u0.seed == 4);
  }

  TEST_CASE("defect block") {
    const std::string text =
        "schema_version 1\n"
        "defect { N 8  t \"1 0.5\"  v { kind fourier_decay  gamma 0.2 } }\n";
    const ExperimentConfig c = parse_config(text, Command::defect);
    CHECK(c.defect.nu == 1.0);
    CHECK(c.defect.k == 1);
    CHECK(c.defect.ts == std::vector<double>{1.0, 0.5});
    CHECK(c.defect.beta1 == doctest::Approx(0.4).epsilon(1e-15));
  }

  TEST_CASE("schema violations name the offending key") {
    const std::map<std::string, std::string> cases{
        {"schema_version 1\nproblem { name allen_cahn  N 16  u0 { kind hat } }\nscheme { name expeuler }\n"
         "study { }\nextra 3\n",
         "extra: unknown key"},
        {"schema_version 1\nproblem { name allen_cahn  N 16  N 32  u0 { kind hat } }\nscheme { name expeuler }\n"
         "study { }\n",
         "problem.N: duplicate key"},
        {"problem { name allen_cahn  N 16  u0 { kind hat } }\nscheme { name expeuler }\nstudy { }\n",
         "schema_version: required key missing"},
        {"schema_version 1\nproblem { name allen_cahn  N 16  u0 { kind hat } }\nscheme { name expeuler }\n",
         "study: required block missing"},
        {"schema_version 1\nproblem { name allen_cahn  N 16  u0 { kind hat } }\nscheme { name expeuler }\n"
         "study { taus \"0.01 0.02\" }\n",
         "strictly decreasing"},
        {"schema_version 1\nproblem { name allen_cahn  N 16  u0 { kind hat } }\nscheme { name expeuler  c2 2 }\n"
         "study { }\n",
         "scheme.c2"},
        {"schema_version 1\nproblem { name allen_cahn  N abc  u0 { kind hat } }\nscheme { name expeuler }\n"
         "study { }\n",
         "expected an integer"},
        {"schema_version 1\nproblem { name allen_cahn  N 16  nu 1  u0 { kind hat } }\nscheme { name expeuler }\n"
         "study { }\n",
         "problem.nu: unknown key"},
        {"schema_version 1\nproblem { name allen_cahn  N 16  u0 { kind hat } }\nscheme { name expeuler }\n"
         "study { reference { kind exact } }\n",
         "no exact solution"},
        {"schema_version 1\nproblem { name allen_cahn  N 16  u0 { kind hat } }\nscheme { name expeuler }\n"
         "study { T 0.1  taus \"0.03\" }\n",
         ""},
    };
    for (const auto& [text, needle] : cases) {
      CAPTURE(text);
      const std::string message = error_of(text, Command::converge);
      REQUIRE_FALSE(message.empty());
      CHECK(message.find(needle) != std::string::npos);
    }
  }

  TEST_CASE("schema version mismatch") {
    std::string text = kMinimal;
    text.replace(text.find("1\n"), 1, "2");
    CHECK(error_of(text, Command::converge).find("schema_version") != std::string::npos);
  }

  TEST_CASE("syntax errors report the line") {
    const std::string message = error_of("schema_version 1\nproblem {\n  name heat\n", Command::converge);
    CHECK(message.find("syntax error at line") != std::string::npos);
  }

  TEST_CASE("split schemes need a 2D grid") {
    const std::string text =
        "schema_version 1\n"
        "problem { name allen_cahn  dims 1  N 16  u0 { kind hat } }\n"
        "scheme { name erk2l }\n"
        "study { }\n";
    CHECK_THROWS_AS(parse_config(text, Command::converge), ConfigError);
  }

  TEST_CASE("blocks belong to one command") {
    CHECK_THROWS_AS(parse_config(kMinimal, Command::solve), ConfigError);
    CHECK_THROWS_AS(parse_config(kMinimal, Command::defect), ConfigError);
  }

  TEST_CASE("grid size limits") {
    std::string text = kMinimal;
    text.replace(text.find("N 16"), 4, "N 513");
    CHECK_THROWS_AS(parse_config(text, Command::converge), ConfigError);
  }
}

TEST_SUITE("load_config") {
  TEST_CASE("missing file is an I/O error naming the path") {
    try {
      load_config("/nonexistent/dir/x.cfg", Command::converge);
      FAIL("expected IoError");
    } catch (const IoError& e) {
      CHECK(std::string(e.what()).find("/nonexistent/dir/x.cfg") != std::string::npos);
    }
  }
}

TEST_SUITE("echo and hash") {
  TEST_CASE("every shipped config round-trips through its echo") {
    int count = 0;
    for (const auto& entry : fs::directory_iterator(EXPINT_CONFIG_DIR)) {
      if (entry.path().extension() != ".cfg") continue;
      CAPTURE(entry.path().string());
      const Command command = command_for(entry.path());
      const ExperimentConfig c = load_config(entry.path(), command);
      const std::string echo = echo_config(c);
      const ExperimentConfig again = parse_config(echo, command);
      CHECK(echo_config(again) == echo);
      CHECK(config_hash(again) == config_hash(c));
      CHECK(config_hash(c).size() == 16);
      CHECK_FALSE(c.output.directory.empty());
      ++count;
    }
    CHECK(count >= 10);
  }

  TEST_CASE("hash ignores layout and comments but not values") {
    const std::string spaced =
        "; comment\n"
        "schema_version 1\n"
        "problem\n{\n  name allen_cahn\n  N 16\n  u0 { kind hat }\n}\n"
        "scheme { name expeuler }\n"
        "study { tau_max 0.025  levels 7 }\n";
    const std::string base = config_hash(parse_config(kMinimal, Command::converge));
    CHECK(config_hash(parse_config(spaced, Command::converge)) == base);
    std::string changed = kMinimal;
    changed.replace(changed.find("N 16"), 4, "N 17");
    CHECK(config_hash(parse_config(changed, Command::converge)) != base);
  }

  TEST_CASE("echo lists the expanded step sizes") {
    const std::string echo = echo_config(parse_config(kMinimal, Command::converge));
    CHECK(echo.find("taus") != std::string::npos);
    CHECK(echo.find("tau_max") == std::string::npos);
  }
}

TEST_SUITE("build_problem") {
  TEST_CASE("2D problems carry a split operator") {
    const ExperimentConfig c = parse_config(kMinimal, Command::converge);
    const Problem p = build_problem(c.problem);
    CHECK(p.split.has_value());
    CHECK(p.u0.size() == 15 * 15);
  }

  TEST_CASE("linear_forced has an exact solution") {
    const std::string text =
        "schema_version 1\n"
        "problem { name linear_forced  dims 1  N 8  u0 { kind hat }  forcing { g0 1  g1 -2 } }\n"
        "scheme { name erk2 }\n"
        "study { reference { kind exact } }\n";
    const Problem p = build_problem(parse_config(text, Command::converge).problem);
    CHECK(p.exact.has_value());
    CHECK_FALSE(p.split.has_value());
  }
}
