#include <catch_amalgamated.hpp>

#include "fixtures.hpp"

using namespace unpred;
using fixtures::robot6;
using fixtures::robot6_spec;

namespace {

StateId st(const TransitionSystem& ts, const char* n) { return *ts.find_state(n); }

StateSet states(const TransitionSystem& ts, std::initializer_list<const char*> names) {
  StateSet s;
  for (auto n : names) s.push_back(st(ts, n));
  std::sort(s.begin(), s.end());
  return s;
}

}  // namespace

TEST_CASE("robot6 passes validation") {
  auto ts = robot6();
  CHECK(validate(ts).ok());
  CHECK(ts.num_states() == 6);
  CHECK(ts.num_observations() == 6);
  CHECK(ts.obs_name(ts.observe(st(ts, "4"))) == "4");
  CHECK(ts.label(st(ts, "2")).has(0));
  CHECK(ts.label(st(ts, "6")).has(1));
  CHECK(ts.label(st(ts, "1")).bits() == 0);
}

TEST_CASE("isolated sink violates liveness") {
  auto spec = robot6_spec();
  spec.states.push_back("7");
  spec.transitions.push_back({"6", "c2", "7"});
  auto report = validate(TransitionSystem(spec));
  REQUIRE(report.violations.size() >= 1);
  CHECK(report.violations[0].kind == Violation::Kind::NotLive);
  CHECK(report.violations[0].states == StateSet{6});
}

TEST_CASE("shared observation with different active inputs") {
  auto spec = robot6_spec();
  for (const char* x : {"1", "2", "3", "4", "5", "6"}) spec.observations.push_back({x, x});
  spec.observations[4].second = "3";  // H(5) = H(3)
  auto ts = TransitionSystem(spec);
  auto report = validate(ts);
  REQUIRE(report.violations.size() == 1);
  CHECK(report.violations[0].kind == Violation::Kind::NonUniformControl);
  CHECK(report.violations[0].states == states(ts, {"3", "5"}));
  CHECK(ts.active_inputs(st(ts, "3")) != ts.active_inputs(st(ts, "5")));
}

TEST_CASE("malformed specs are rejected") {
  auto bad = [](auto edit) {
    auto spec = robot6_spec();
    edit(spec);
    return spec;
  };
  using S = TransitionSystem::Spec;
  CHECK_THROWS_AS(TransitionSystem(bad([](S& s) { s.initial = "9"; })), ModelError);
  CHECK_THROWS_AS(TransitionSystem(bad([](S& s) { s.transitions.push_back({"1", "c9", "2"}); })), ModelError);
  CHECK_THROWS_AS(TransitionSystem(bad([](S& s) { s.transitions.push_back({"1", "c1", "9"}); })), ModelError);
  CHECK_THROWS_AS(TransitionSystem(bad([](S& s) { s.states.push_back("1"); })), ModelError);
  CHECK_THROWS_AS(TransitionSystem(bad([](S& s) { s.labels.push_back({"3", {"q"}}); })), ModelError);
  CHECK_THROWS_AS(TransitionSystem(bad([](S& s) { s.ap.push_back("9bad"); })), ModelError);
  CHECK_THROWS_AS(TransitionSystem(bad([](S& s) { s.observations = {{"1", "a"}}; })), ModelError);
  CHECK_THROWS_AS(TransitionSystem(bad([](S& s) { s.states.clear(); })), ModelError);
}

TEST_CASE("nx on the case-study system") {
  auto ts = robot6();
  InputId c1 = *ts.find_input("c1");
  auto q = states(ts, {"2"});
  CHECK(ts.nx(q, c1) == states(ts, {"4", "5"}));
  CHECK(ts.nx(StateSet{}, c1).empty());
  q = states(ts, {"2", "4"});
  CHECK(ts.nx(q, c1) == states(ts, {"4", "5", "6"}));
}

TEST_CASE("nx distributes over union and is monotone") {
  std::mt19937_64 rng(17);
  for (int i = 0; i < 100; ++i) {
    auto ts = fixtures::random_system(rng, 6, 2, 1);
    for (int j = 0; j < 10; ++j) {
      StateSet a, b;
      for (StateId x = 0; x < ts.num_states(); ++x) {
        if (rng() % 2) a.push_back(x);
        if (rng() % 2) b.push_back(x);
      }
      for (InputId u = 0; u < ts.num_inputs(); ++u) {
        auto ab = set_union(a, b);
        REQUIRE(ts.nx(ab, u) == set_union(ts.nx(a, u), ts.nx(b, u)));
        auto na = ts.nx(a, u), nab = ts.nx(ab, u);
        REQUIRE(std::includes(nab.begin(), nab.end(), na.begin(), na.end()));
      }
    }
  }
}

TEST_CASE("active inputs") {
  auto ts = robot6();
  std::vector<InputId> both{0, 1};
  CHECK(ts.active_inputs(st(ts, "2")) == both);
  CHECK(ts.active_inputs(st(ts, "4")) == both);
  CHECK(ts.active_inputs(st(ts, "6")) == std::vector<InputId>{0});
  CHECK_THROWS_AS(ts.active_inputs(42), ModelError);

  auto spec = robot6_spec();
  spec.states.push_back("7");
  auto ts7 = TransitionSystem(spec);
  CHECK(ts7.active_inputs(st(ts7, "7")).empty());
}

TEST_CASE("observe paths") {
  auto ts = robot6();
  auto p = states(ts, {"1", "2", "3"});
  auto o = ts.observe(std::span<const StateId>(p));
  REQUIRE(o.size() == 3);
  CHECK(ts.obs_name(o[0]) == "1");
  CHECK(ts.obs_name(o[2]) == "3");
  StateId one[] = {st(ts, "5")};
  CHECK(ts.observe(std::span<const StateId>(one)).size() == 1);

  auto spec = robot6_spec();
  for (const char* x : {"1", "2", "3", "4", "5", "6"}) spec.observations.push_back({x, "o"});
  auto flat = TransitionSystem(spec);
  auto fo = flat.observe(std::span<const StateId>(p));
  CHECK(fo == std::vector<ObsId>(3, 0));
}

TEST_CASE("path validity") {
  auto ts = robot6();
  InputId c1 = 0, c2 = 1;
  Path p{states(ts, {"1", "2", "3"}), {c1, c2}};
  CHECK(p.is_valid(ts, true));
  Path wrong{states(ts, {"1", "2", "3"}), {c1, c1}};
  CHECK_FALSE(wrong.is_valid(ts, true));
  Path unrooted{{st(ts, "2"), st(ts, "3")}, {c2}};
  CHECK(unrooted.is_valid(ts, false));
  CHECK_FALSE(unrooted.is_valid(ts, true));
  CHECK(Path{}.is_valid(ts, false));
}

TEST_CASE("validated systems extend every rooted path") {
  std::mt19937_64 rng(23);
  for (int i = 0; i < 50; ++i) {
    auto ts = fixtures::random_system(rng, 6, 2, 1);
    REQUIRE(validate(ts).ok());
    std::vector<StateId> frontier{ts.initial()};
    for (int step = 0; step < 6; ++step) {
      std::vector<StateId> next;
      for (StateId x : frontier) {
        REQUIRE_FALSE(ts.active_inputs(x).empty());
        for (InputId u : ts.active_inputs(x)) {
          const auto& s = ts.successors(x, u);
          next.insert(next.end(), s.begin(), s.end());
        }
      }
      std::sort(next.begin(), next.end());
      next.erase(std::unique(next.begin(), next.end()), next.end());
      frontier = next;
    }
  }
}

TEST_CASE("stop state transform") {
  auto ts = robot6();
  std::vector<StateId> from{st(ts, "3"), st(ts, "6")};
  auto s = add_stop_state(ts, from);
  REQUIRE(s.num_states() == 7);
  StateId stop = *s.find_state("stop");
  InputId stop_in = *s.find_input("stop");
  CHECK(s.successors(st(ts, "3"), stop_in) == StateSet{stop});
  CHECK(s.successors(stop, stop_in) == StateSet{stop});
  CHECK(s.active_inputs(stop) == std::vector<InputId>{stop_in});
  CHECK(s.obs_name(s.observe(stop)) == "stop");
  CHECK(s.label(stop).bits() == 0);
  CHECK(s.successors(st(ts, "1"), stop_in).empty());
}
