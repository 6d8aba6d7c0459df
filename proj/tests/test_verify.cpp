#include <catch_amalgamated.hpp>

#include <set>

#include "fixtures.hpp"

using namespace unpred;
using fixtures::ob;
using fixtures::obs_seq;
using fixtures::px;

namespace {

MealyController policy(const TransitionSystem& ts, std::initializer_list<std::pair<const char*, const char*>> table) {
  std::map<ObsId, InputId> m;
  for (auto [o, u] : table) m[ob(ts, o)] = fixtures::in(ts, u);
  return memoryless_controller(ts, m);
}

MealyController baseline(const TransitionSystem& ts) {
  return policy(ts, {{"1", "c1"}, {"2", "c2"}, {"3", "c1"}, {"6", "c1"}});
}

// System-level state sequences from the initial state until the first
// completion, following the closed loop.
std::set<std::vector<std::string>> runs_to_completion(const Pipeline& pl, const ClosedLoop& cl, std::size_t max_len) {
  std::set<std::vector<std::string>> out;
  std::vector<std::vector<ConfigId>> work{{0}};
  while (!work.empty()) {
    auto path = work.back();
    work.pop_back();
    ConfigId c = path.back();
    if (cl.secret[c]) {
      std::vector<std::string> names;
      for (ConfigId d : path) names.push_back(pl.system.state_name(pl.product.origin[cl.configs[d].state].first));
      out.insert(names);
      continue;
    }
    if (path.size() > max_len) continue;
    for (ConfigId d : cl.succ[c]) {
      auto q = path;
      q.push_back(d);
      work.push_back(q);
    }
  }
  return out;
}

}  // namespace

TEST_CASE("closed loop of the synthesized controller") {
  auto pl = fixtures::robot6_pipeline();
  auto r = synthesize(pl.product, 3);
  REQUIRE(r.controller);
  ClosedLoop cl = build_closed_loop(pl.product, r.controller->to_mealy());
  CHECK(check_live(cl));
  CHECK(check_task(cl).ok);
  CHECK(check_unpredictable(cl, 3).ok);
  std::set<std::vector<std::string>> expect{{"1", "2", "4", "6"}, {"1", "2", "4", "5", "6"}, {"1", "2", "5", "6"}};
  CHECK(runs_to_completion(pl, cl, 12) == expect);

  auto report = verify_controller(pl.product, r.controller->to_mealy(), 3);
  CHECK(report.ok());
  CHECK(report.task_witness.empty());
  CHECK(report.unpredictable_witness.empty());
}

TEST_CASE("baseline policy") {
  auto pl = fixtures::robot6_pipeline();
  const auto& ts = pl.product.ts;
  ClosedLoop cl = build_closed_loop(pl.product, baseline(ts));
  CHECK(runs_to_completion(pl, cl, 12) == std::set<std::vector<std::string>>{{"1", "2", "3", "6"}});
  CHECK(check_live(cl));
  CHECK(check_task(cl).ok);
  auto u = check_unpredictable(cl, 3);
  CHECK_FALSE(u.ok);
  CHECK(u.witness == obs_seq(ts, {"1"}));
  // With K = 0 the only certain completion is observing region 6 on the first visit.
  auto u0 = check_unpredictable(cl, 0);
  CHECK_FALSE(u0.ok);
  CHECK(u0.witness == obs_seq(ts, {"1", "2", "3", "6"}));
  // Two steps ahead it is already certain at region 2.
  CHECK(check_unpredictable(cl, 2).witness == obs_seq(ts, {"1", "2"}));
  CHECK_FALSE(check_unpredictable_def1(cl, 3, 10));
}

TEST_CASE("undefined control reports the shortest observation sequence") {
  auto pl = fixtures::robot6_pipeline();
  const auto& ts = pl.product.ts;
  auto partial = policy(ts, {{"1", "c1"}, {"2", "c1"}, {"4", "c1"}});
  try {
    build_closed_loop(pl.product, partial);
    FAIL("expected VerifyError");
  } catch (const VerifyError& e) {
    CHECK(e.kind() == VerifyError::Kind::UndefinedControl);
    CHECK(e.witness() == obs_seq(ts, {"1", "2", "5"}));
  }
}

TEST_CASE("task check finds the 4-5 loop") {
  auto pl = fixtures::robot6_pipeline();
  const auto& ts = pl.product.ts;
  auto always_c1 = policy(ts, {{"1", "c1"}, {"2", "c1"}, {"3", "c1"}, {"4", "c1"}, {"5", "c1"}, {"6", "c1"}});
  ClosedLoop cl = build_closed_loop(pl.product, always_c1);
  CHECK(check_live(cl));
  auto t = check_task(cl);
  CHECK_FALSE(t.ok);
  REQUIRE(t.witness.size() >= 3);
  CHECK(std::vector<ObsId>(t.witness.begin(), t.witness.begin() + 2) == obs_seq(ts, {"1", "2"}));
  auto last = ts.obs_name(t.witness.back());
  CHECK((last == "4" || last == "5"));
  CHECK_FALSE(verify_controller(pl.product, always_c1, 3).task);
}

TEST_CASE("task holds when the initial state completes it") {
  TransitionSystem::Spec s;
  s.states = {"a", "b"};
  s.initial = "a";
  s.inputs = {"u"};
  s.transitions = {{"a", "u", "b"}, {"b", "u", "b"}};
  s.ap = {"p"};
  s.labels = {{"a", {"p"}}};
  auto pl = build_pipeline(TransitionSystem(s), "p");
  ClosedLoop cl = build_closed_loop(pl.product, policy(pl.product.ts, {{"a", "u"}, {"b", "u"}}));
  CHECK(cl.done[0]);
  CHECK(cl.secret[0]);
  CHECK(check_task(cl).ok);
  // Completion happens at time zero, which is certain for K = 0 only.
  CHECK_FALSE(check_unpredictable(cl, 0).ok);
  CHECK(check_unpredictable(cl, 1).ok);
}

TEST_CASE("dead ends are not live") {
  TransitionSystem::Spec s;
  s.states = {"a", "b"};
  s.initial = "a";
  s.inputs = {"u", "v"};
  s.transitions = {{"a", "u", "b"}, {"a", "v", "a"}, {"b", "v", "b"}};
  s.ap = {"p"};
  s.labels = {};
  auto pl = build_pipeline(TransitionSystem(s), "F p");
  // The Mealy memory picks `u` at b, where u has no successor.
  ClosedLoop cl = build_closed_loop(pl.product, policy(pl.product.ts, {{"a", "u"}, {"b", "u"}}));
  CHECK_FALSE(check_live(cl));
}

TEST_CASE("state estimates") {
  auto pl = fixtures::robot6_pipeline();
  const auto& p = pl.product;
  auto r = synthesize(p, 3);
  REQUIRE(r.controller);
  ClosedLoop cl = build_closed_loop(p, r.controller->to_mealy());
  CHECK(state_estimate(cl, obs_seq(p.ts, {"1", "2", "4"})) == StateSet{px(p, "x4")});
  CHECK(state_estimate(cl, obs_seq(p.ts, {"1", "2", "4", "6"})) == StateSet{px(p, "x6")});
  CHECK(state_estimate(cl, obs_seq(p.ts, {"1", "2", "5", "6", "6"})) == StateSet{px(p, "x7")});
  CHECK_THROWS_AS(state_estimate(cl, obs_seq(p.ts, {"1", "3"})), VerifyError);
  CHECK_THROWS_AS(state_estimate(cl, obs_seq(p.ts, {"2"})), VerifyError);
  CHECK_THROWS_AS(state_estimate(cl, std::vector<ObsId>{}), VerifyError);

  // Coarse observations merge x4 and x5.
  auto spec = fixtures::robot6_spec();
  for (const char* x : {"1", "2", "3", "4", "5", "6"}) spec.observations.push_back({x, x});
  spec.observations[3].second = "45";
  spec.observations[4].second = "45";
  auto coarse = build_pipeline(TransitionSystem(spec), fixtures::kTask);
  const auto& cts = coarse.product.ts;
  auto c = policy(cts, {{"1", "c1"}, {"2", "c1"}, {"45", "c2"}, {"3", "c1"}, {"6", "c1"}});
  ClosedLoop ccl = build_closed_loop(coarse.product, c);
  CHECK(state_estimate(ccl, obs_seq(cts, {"1", "2", "45"})) ==
        StateSet{px(coarse.product, "x4"), px(coarse.product, "x5")});
}

TEST_CASE("reach_exact") {
  auto pl = fixtures::robot6_pipeline();
  ClosedLoop cl = build_closed_loop(pl.product, baseline(pl.product.ts));
  ConfigId from[] = {0};
  CHECK(reach_exact(cl, from, 0) == std::vector<ConfigId>{0});
  auto r3 = reach_exact(cl, from, 3);
  REQUIRE(r3.size() == 1);
  CHECK(cl.secret[r3[0]]);
  auto r4 = reach_exact(cl, from, 4);
  REQUIRE(r4.size() == 1);
  CHECK_FALSE(cl.secret[r4[0]]);
  CHECK(cl.done[r4[0]]);
}

TEST_CASE("observer check agrees with the original definition on random closed loops") {
  std::mt19937_64 rng(53);
  int loops = 0;
  for (int i = 0; i < 150; ++i) {
    auto pl = build_pipeline(fixtures::random_system(rng, 5, 2, 2), fixtures::random_formula(rng, 2, 2));
    const auto& ts = pl.product.ts;
    // Random memoryless policy over active inputs.
    std::map<ObsId, InputId> m;
    for (StateId x = 0; x < ts.num_states(); ++x) {
      auto a = ts.active_inputs(x);
      if (!m.count(ts.observe(x))) m[ts.observe(x)] = a[rng() % a.size()];
    }
    ClosedLoop cl = build_closed_loop(pl.product, memoryless_controller(ts, m));
    ++loops;
    for (unsigned k = 0; k <= 3; ++k)
      REQUIRE(check_unpredictable(cl, k).ok == check_unpredictable_def1(cl, k, k + cl.size()));
  }
  CHECK(loops == 150);
}

TEST_CASE("exhaustive search over belief controllers") {
  auto pl = fixtures::robot6_pipeline();
  auto none = exhaustive_controller_search(pl.product, 1);
  CHECK(none.outcome == ExhaustiveSearchResult::Outcome::NoneFound);
  CHECK(none.candidates > 1);
  auto found = exhaustive_controller_search(pl.product, 3);
  REQUIRE(found.outcome == ExhaustiveSearchResult::Outcome::Found);
  REQUIRE(found.controller);
  CHECK(verify_controller(pl.product, *found.controller, 3).ok());
  auto capped = exhaustive_controller_search(pl.product, 3, 1);
  CHECK(capped.outcome == ExhaustiveSearchResult::Outcome::Inconclusive);
}

TEST_CASE("synthesis and exhaustive search agree on random systems") {
  std::mt19937_64 rng(59);
  int compared = 0;
  for (int i = 0; i < 80; ++i) {
    auto pl = build_pipeline(fixtures::random_system(rng, 4, 2, 2), fixtures::random_formula(rng, 2, 2));
    unsigned k = static_cast<unsigned>(rng() % 3);
    auto r = synthesize(pl.product, k);
    if (r.controller) REQUIRE(verify_controller(pl.product, r.controller->to_mealy(), k).ok());
    auto e = exhaustive_controller_search(pl.product, k, 4096);
    if (e.outcome == ExhaustiveSearchResult::Outcome::Inconclusive) continue;
    ++compared;
    // Belief-memory controllers are a subset of what synthesis can return.
    if (e.outcome == ExhaustiveSearchResult::Outcome::Found) REQUIRE(r.controller.has_value());
  }
  CHECK(compared > 40);
}
