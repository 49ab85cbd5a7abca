#include <string>

#include "decseq/error.hpp"
#include "decseq/model.hpp"
#include "decseq/spec_io.hpp"
#include "doctest.h"
#include "support.hpp"

using namespace decseq;

namespace {

const char* kSym02 = R"({
  "prior": 0.5,
  "channels": [{"observer": 1, "tables": [[0.8, 0.2], [0.2, 0.8]]},
               {"observer": 2, "tables": [[[0.8, 0.2], [0.2, 0.8]]]}],
  "costs": {"c1": 0.05, "c2": 0.05, "J": [[0, 1], [1, 0]]},
  "horizons": {"T1": 2, "T2": 2},
  "variant": "P1"
})";

std::string replace(std::string s, const std::string& from, const std::string& to) {
  s.replace(s.find(from), from.size(), to);
  return s;
}

std::string validation_message(const std::string& text) {
  try {
    load_problem_spec(text);
  } catch (const ValidationError& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST_CASE("load_problem_spec reads the sym-0.2 instance") {
  ProblemSpec s = load_problem_spec(kSym02);
  CHECK(s.p0 == 0.5);
  CHECK(s.channel1.at(1) == test::symmetric(0.2));
  CHECK(s.channel2.at(7) == test::symmetric(0.2));
  CHECK(s.costs.J[0][1] == 1.0);
  CHECK(s.costs.L == 1.0);
  CHECK(s.M == 2);
  CHECK(s.variant == Variant::P1);
  CHECK(s.stationary());
}

TEST_CASE("spec JSON round-trips and the digest is stable") {
  ProblemSpec s = load_problem_spec(kSym02);
  ProblemSpec back = load_problem_spec(problem_spec_to_json(s));
  CHECK(problem_spec_to_json(back) == problem_spec_to_json(s));
  CHECK(spec_digest(back) == spec_digest(s));
  CHECK(spec_digest(s).size() == 16);
  back.p0 = 0.4;
  CHECK(spec_digest(back) != spec_digest(s));
}

TEST_CASE("prior may be given as an object") {
  ProblemSpec s = load_problem_spec(replace(kSym02, "\"prior\": 0.5", "\"prior\": {\"p0\": 0.25}"));
  CHECK(s.p0 == 0.25);
}

TEST_CASE("validation errors name the problem") {
  CHECK(validation_message(replace(kSym02, "[[0, 1], [1, 0]]", "[[0, 1], [1, 1]]")).find("cost ordering violated") !=
        std::string::npos);
  std::string msg = validation_message(replace(kSym02, "[[0.8, 0.2], [0.2, 0.8]]", "[[0.7, 0.2], [0.2, 0.8]]"));
  CHECK(msg.find("row not normalized") != std::string::npos);
  CHECK(msg.find("channels[observer=1].tables[0][0]") != std::string::npos);
  CHECK(!validation_message(replace(kSym02, "\"T1\": 2", "\"T1\": 0")).empty());
  CHECK(!validation_message(replace(kSym02, "\"c2\": 0.05", "\"c2\": 0")).empty());
  CHECK(!validation_message(replace(kSym02, "\"prior\": 0.5", "\"prior\": 1.5")).empty());
  CHECK(!validation_message(replace(kSym02, "\"P1\"", "\"P3\"")).empty());
  CHECK(!validation_message("{not json").empty());
  CHECK(validation_message(replace(replace(kSym02, "\"P1\"", "\"P2\""), "\"T1\": 2", "\"T1\": 3")).find("T2 >= T1") !=
        std::string::npos);
}

TEST_CASE("channels must cover the horizon") {
  ProblemSpec s = test::drift(3, 3, Variant::P1);
  CHECK_NOTHROW(validate(s));
  s.T2 = 4;
  CHECK_THROWS_AS(validate(s), ValidationError);
  CHECK_FALSE(s.stationary());
}

TEST_CASE("missing files are unreadable input") {
  CHECK_THROWS_AS(load_problem_spec_file("/nonexistent/spec.json"), UnreadableInput);
}

TEST_CASE("terminal costs") {
  CostModel c = test::zero_one(0.05, 0.05);
  CHECK(terminal_cost(0, 0.3, c) == doctest::Approx(0.7).epsilon(1e-15));
  CHECK(terminal_cost(1, 0.3, c) == doctest::Approx(0.3).epsilon(1e-15));
  CostModel a = c;
  a.J = {{{0.1, 2.0}, {3.0, 0.2}}};
  CHECK(terminal_cost(1, 0.0, a) == 0.2);
  CHECK(terminal_cost(0, 1.0, a) == 0.1);
  CHECK(terminal_crossing(c) == 0.5);
  double x = terminal_crossing(a);
  CHECK(terminal_cost(0, x, a) == doctest::Approx(terminal_cost(1, x, a)));
}

TEST_CASE("derived bound is the largest terminal cost") {
  CostModel c;
  c.c1 = c.c2 = 0.1;
  c.J = {{{0.0, 1.5}, {0.8, 0.0}}};
  CHECK(with_derived_bound(c).L == 1.5);
}
