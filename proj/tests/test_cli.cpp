#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cstdlib>
#include <filesystem>
#include <sstream>

#include "commands.hpp"
#include "state_io.hpp"

using namespace qdecon;
using namespace qdecon::cli;
using doctest::Approx;

namespace {

std::string data(const std::string& name) { return std::string(QDECON_TEST_DATA) + "/" + name; }

struct Outcome {
  int code;
  std::string out;
  std::string err;
  Json doc() const { return Json::parse(out); }
};

Outcome call(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = run(args, out, err);
  return {code, out.str(), err.str()};
}

}  // namespace

TEST_CASE("state file parsing") {
  const auto pi = read_state_file(data("pi1.qs"));
  CHECK(pi.labels() == Labels{"A"});
  CHECK(max_abs(pi.matrix() - Matrix::Identity(2, 2) / 2.0) == 0.0);

  const std::string commented =
      "# a comment\nQSTATE 1\n\nlabels A   # trailing\ndims 2\n0.5,0 0,0\n0,0 0.5,0\n";
  CHECK(max_abs(parse_state(commented).matrix() - pi.matrix()) == 0.0);

  const auto expect_error = [](const std::string& text, int line) {
    try {
      parse_state(text);
      FAIL("no error for: " << text);
    } catch (const ParseError& e) {
      CHECK(e.line() == line);
      CHECK(std::string(e.what()).find("line " + std::to_string(line)) != std::string::npos);
    }
  };
  expect_error("QSTATE 2\nlabels A\ndims 2\n", 1);
  expect_error("QSTATE 1\nlabels A\ndims 2 x\n", 3);
  expect_error("QSTATE 1\nlabels A\ndims 2\n0.5,0 0,0\n0,0 0.5\n", 5);
  expect_error("QSTATE 1\nlabels A\ndims 2\n0.5,0 0,0\n", 5);
  expect_error("QSTATE 1\nlabels A\ndims 2\n0.5,0 0,0\n0,0 0.5,0\nextra\n", 6);
  expect_error("QSTATE 1\nlabels A A\ndims 2 2\n", 2);

  try {
    parse_state("QSTATE 1\nlabels A\ndims 2\n0.5,0 0,0\n0,0 0.6,0\n");
    FAIL("trace not checked");
  } catch (const ParseError& e) {
    CHECK(std::string(e.what()).find("trace") != std::string::npos);
  }
  CHECK_THROWS_AS(read_state_file(data("not_psd.qs")), ParseError);
  CHECK_THROWS_AS(read_state_file(data("bad_dims.qs")), ParseError);
}

TEST_CASE("state file round trip over a generated corpus") {
  const auto dir = std::filesystem::temp_directory_path() / "qdecon_round_trip";
  std::filesystem::create_directories(dir);
  for (int i = 0; i < 100; ++i) {
    const SystemLayout l({"A", "B", "C"}, {1 + i % 3, 1 + (i / 3) % 2, 2});
    const auto s = random_mixed_state(l, 1000 + i, 1 + i % static_cast<int>(l.total_dim()));
    const auto path = (dir / ("s" + std::to_string(i) + ".qs")).string();
    write_state_file(path, s);
    const auto back = read_state_file(path);
    CHECK(back.labels() == s.labels());
    CHECK(max_abs(back.matrix() - s.matrix()) == 0.0);
    CHECK(write_state(back) == write_state(s));
  }
  std::filesystem::remove_all(dir);
}

TEST_CASE("digest") {
  CHECK(fnv1a_hex("") == "cbf29ce484222325");
  CHECK(fnv1a_hex("a") == "af63dc4c8601ec8c");
}

TEST_CASE("quantity commands") {
  const auto r = call({"cqmi", "--state", data("bell_times_pi.qs"), "--a", "A", "--b", "B",
                       "--e", "E"});
  CHECK(r.code == 0);
  const Json d = r.doc();
  CHECK(d["results"]["cqmi"]["value"].get<double>() == Approx(2.0).epsilon(1e-12));
  CHECK(d["pass"].get<bool>());
  std::vector<std::string> keys;
  for (const auto& [k, v] : d.items()) keys.push_back(k);
  CHECK(keys == std::vector<std::string>{"command", "seed", "tolerances", "inputs", "results",
                                         "checks", "pass"});

  const auto e = call({"entropy", "--state", data("bell.qs"), "--systems", "A"});
  CHECK(e.code == 0);
  CHECK(e.doc()["results"]["entropy"]["value"].get<double>() == Approx(1.0).epsilon(1e-12));

  const auto rec = call({"recover", "--state", data("mixed_abe.qs"), "--a", "A", "--b", "B",
                         "--e", "E"});
  CHECK(rec.code == 0);
}

TEST_CASE("appendixb report") {
  const auto r = call({"appendixb", "--n", "4", "--m", "2"});
  const Json d = r.doc();
  CHECK(d["results"]["fid_bound"]["value"].get<double>() == Approx(0.6).epsilon(1e-15));
  CHECK(d["results"]["cmi_xy_given_z"]["value"].get<double>() == Approx(1.0).epsilon(1e-12));
  CHECK(d["results"]["oracle_fidelity"]["value"].get<double>() ==
        Approx(0.6476030138).epsilon(1e-8));
  // The stated closed-form bound is exceeded by the exact optimum.
  CHECK(r.code == 1);
  bool saw = false;
  for (const auto& c : d["checks"]) {
    if (c["name"] == "oracle_within_fid_bound") {
      saw = true;
      CHECK_FALSE(c["pass"].get<bool>());
    }
    if (c["name"] == "oracle_within_relaxed_bound") CHECK(c["pass"].get<bool>());
  }
  CHECK(saw);
  CHECK(call({"appendixb", "--n", "6", "--m", "6"}).code == 0);
}

TEST_CASE("exit codes") {
  CHECK(call({}).code == 2);
  CHECK(call({"nope"}).code == 2);
  CHECK(call({"cqmi", "--state", data("missing.qs"), "--a", "A", "--b", "B"}).code == 2);
  const auto bad = call({"cqmi", "--state", data("bad_dims.qs"), "--a", "A", "--b", "B"});
  CHECK(bad.code == 2);
  CHECK(bad.err.find("line 3") != std::string::npos);
  CHECK(call({"cqmi", "--state", data("bell.qs"), "--a", "A", "--b", "Q"}).code == 2);
  CHECK(call({"squashed", "--state", data("bell.qs")}).code == 2);  // seed required
  CHECK(call({"discord", "--state", data("bell.qs"), "--povm", "random"}).code == 2);
  CHECK(call({"einselect", "--state", data("bell.qs"), "--protocol", "zero-noise"}).code == 1);
  CHECK(call({"einselect", "--state", data("bell.qs")}).code == 0);
}

TEST_CASE("determinism") {
  const std::vector<std::string> sq{"squashed", "--state", data("bell.qs"), "--seed", "3"};
  const auto a = call(sq);
  const auto b = call(sq);
  CHECK(a.code == 0);
  CHECK(a.out == b.out);
  const std::vector<std::string> dis{"discord", "--state", data("mixed_abe.qs"), "--povm",
                                     "random", "--elements", "3", "--seed", "11"};
  CHECK(call(dis).out == call(dis).out);
}

TEST_CASE("tolerance overrides") {
  ::setenv("QDECON_TOL_TRACE", "1e-3", 1);
  CHECK(tolerances_from_env().trace == 1e-3);
  const std::string off = "QSTATE 1\nlabels A\ndims 2\n0.5,0 0,0\n0,0 0.5001,0\n";
  CHECK_NOTHROW(parse_state(off, tolerances_from_env()));
  ::setenv("QDECON_TOL_TRACE", "bogus", 1);
  CHECK_THROWS_AS(tolerances_from_env(), UsageError);
  CHECK(call({"entropy", "--state", data("pi1.qs"), "--systems", "A"}).code == 2);
  ::unsetenv("QDECON_TOL_TRACE");
  CHECK(tolerances_from_env().trace == 1e-9);
}
