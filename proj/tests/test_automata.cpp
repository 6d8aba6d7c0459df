#include <catch_amalgamated.hpp>

#include "fixtures.hpp"

using namespace unpred;

namespace {

const ApUniverse kAps({"p1", "p2"});
const Label E{};
const Label P1 = Label().with(0);
const Label P2 = Label().with(1);
const Label P12 = P1.with(1);

// Compares two acceptors on every word up to max_len.
template <typename A, typename B>
void require_same_language(const A& a, const B& b, std::size_t num_ap, std::size_t max_len) {
  for (std::size_t len = 0; len <= max_len; ++len)
    for (const auto& w : fixtures::words_of_length(num_ap, len)) REQUIRE(a(w) == b(w));
}

// Reachable states of a Dfa.
std::size_t reachable(const Dfa& a) {
  std::vector<bool> seen(a.num_states(), false);
  std::vector<DfaState> stack{a.initial()};
  seen[a.initial()] = true;
  std::size_t n = 1;
  while (!stack.empty()) {
    DfaState s = stack.back();
    stack.pop_back();
    for (std::uint64_t c = 0; c < a.alphabet_size(); ++c) {
      DfaState t = a.step(s, Label(c));
      if (t != kNoState && !seen[t]) {
        seen[t] = true;
        ++n;
        stack.push_back(t);
      }
    }
  }
  return n;
}

}  // namespace

TEST_CASE("case-study task compiles to the three-state automaton") {
  Dfa a = minimize(compile(parse("F(p1 & F p2)", kAps), kAps));
  REQUIRE(a.num_states() == 3);
  REQUIRE(a.is_complete());
  DfaState s1 = a.initial();
  DfaState s2 = a.step(s1, P1);
  DfaState s3 = a.step(s2, P2);
  CHECK(a.step(s1, E) == s1);
  CHECK(a.step(s1, P2) == s1);
  CHECK(a.step(s1, P12) == s3);
  CHECK(a.step(s2, E) == s2);
  CHECK(a.step(s2, P1) == s2);
  CHECK(a.is_accepting(s3));
  CHECK_FALSE(a.is_accepting(s1));
  CHECK_FALSE(a.is_accepting(s2));
  CHECK(s1 != s2);
  CHECK(s2 != s3);
}

TEST_CASE("modified case-study automaton") {
  ModifiedDfa m = modify(minimize(compile(parse("F(p1 & F p2)", kAps), kAps)));
  CHECK(m.dfa.num_states() == 5);
  CHECK(m.accepts({E, P1, E, P2}));
  CHECK(m.is_f(m.dfa.step(m.dfa.step(m.dfa.step(m.dfa.step(m.dfa.initial(), E), P1), E), P2)));
  CHECK_FALSE(m.accepts({E, E, E}));
  CHECK(m.accepts({}) == m.dfa.is_accepting(m.dfa.initial()));
  CHECK_FALSE(m.accepts({}));
  // s_B is unreachable because the input automaton was complete.
  CHECK(reachable(m.dfa) == 4);
  CHECK_THROWS_AS(m.accepts({Label(4)}), AutomatonError);
}

TEST_CASE("modify invariants") {
  std::mt19937_64 rng(3);
  ApUniverse aps({"a0", "a1"});
  for (int i = 0; i < 50; ++i) {
    Dfa a = compile(parse(fixtures::random_formula(rng, 2, 3), aps), aps);
    ModifiedDfa m = modify(a);
    const Dfa& d = m.dfa;
    REQUIRE(d.is_complete());
    REQUIRE_FALSE(m.is_f(m.sink_accept));
    REQUIRE_FALSE(m.is_f(m.sink_bad));
    for (std::uint64_t c = 0; c < d.alphabet_size(); ++c) {
      REQUIRE(d.step(m.sink_accept, Label(c)) == m.sink_accept);
      REQUIRE(d.step(m.sink_bad, Label(c)) == m.sink_bad);
      for (DfaState s = 0; s < d.num_states(); ++s)
        if (m.is_f(s)) REQUIRE(d.step(s, Label(c)) == m.sink_accept);
    }
    REQUIRE(d.is_accepting(m.sink_accept));
    REQUIRE_FALSE(d.is_accepting(m.sink_bad));
    require_same_language([&](const Word& w) { return a.accepts(w); }, [&](const Word& w) { return m.accepts(w); },
                          2, 5);
  }
}

TEST_CASE("true compiles to a universal single state") {
  Dfa a = minimize(compile(Formula::truth(), kAps));
  REQUIRE(a.num_states() == 1);
  CHECK(a.is_accepting(0));
  for (std::uint64_t c = 0; c < 4; ++c) CHECK(a.step(0, Label(c)) == 0);
  ModifiedDfa m = modify(a);
  CHECK(m.is_f(m.dfa.initial()));
  for (std::uint64_t c = 0; c < 4; ++c) CHECK(m.dfa.step(m.dfa.initial(), Label(c)) == m.sink_accept);
}

TEST_CASE("incomplete automaton is completed through s_B") {
  Dfa a(1, 2, 0);
  a.set_transition(0, Label(1), 1);
  a.set_accepting(1, true);
  CHECK_FALSE(a.is_complete());
  CHECK_FALSE(a.accepts({Label(0)}));
  ModifiedDfa m = modify(a);
  CHECK(m.dfa.is_complete());
  CHECK(m.dfa.step(0, Label(0)) == m.sink_bad);
  CHECK(m.dfa.step(m.sink_bad, Label(1)) == m.sink_bad);
  CHECK(m.accepts({Label(1)}));
  CHECK(m.accepts({Label(1), Label(0), Label(1)}));
  CHECK_FALSE(m.accepts({Label(0), Label(1)}));
}

TEST_CASE("compile agrees with holds_on for a fixed conjunction") {
  Formula f = parse("p1 & F p2", kAps);
  Dfa a = compile(f, kAps);
  require_same_language([&](const Word& w) { return a.accepts(w); }, [&](const Word& w) { return holds_on(w, f); }, 2,
                        6);
}

TEST_CASE("alphabet bound") {
  std::vector<std::string> names;
  for (int i = 0; i < 17; ++i) names.push_back("a" + std::to_string(i));
  ApUniverse big(names);
  CHECK_THROWS_AS(compile(Formula::atom(0), big), AutomatonError);
  CHECK_NOTHROW(compile(Formula::atom(0), big, CompileOptions{20}));
}

TEST_CASE("minimize keeps the language and is idempotent") {
  std::mt19937_64 rng(5);
  ApUniverse aps({"a0", "a1"});
  for (int i = 0; i < 80; ++i) {
    Formula f = parse(fixtures::random_formula(rng, 2, 3), aps);
    INFO(to_string(f, aps));
    Dfa a = compile(f, aps);
    Dfa m = minimize(a);
    REQUIRE(m.num_states() <= a.num_states());
    REQUIRE(minimize(m).num_states() == m.num_states());
    require_same_language([&](const Word& w) { return a.accepts(w); }, [&](const Word& w) { return m.accepts(w); },
                          2, 6);
  }
}

TEST_CASE("minimize collapses a doubled automaton") {
  // Two copies of the case-study DFA glued at the initial state.
  Dfa base = minimize(compile(parse("F(p1 & F p2)", kAps), kAps));
  const std::size_t n = base.num_states();
  Dfa twice(2, 2 * n, 0);
  for (DfaState s = 0; s < n; ++s)
    for (std::uint64_t c = 0; c < 4; ++c) {
      DfaState t = base.step(s, Label(c));
      twice.set_transition(s, Label(c), t == base.initial() ? t : static_cast<DfaState>(t + n));
      twice.set_transition(static_cast<DfaState>(s + n), Label(c), t);
      twice.set_accepting(s, base.is_accepting(s));
      twice.set_accepting(static_cast<DfaState>(s + n), base.is_accepting(s));
    }
  Dfa m = minimize(twice);
  CHECK(m.num_states() == n);
  require_same_language([&](const Word& w) { return base.accepts(w); }, [&](const Word& w) { return m.accepts(w); },
                        2, 6);
}

TEST_CASE("DOT export marks the sinks") {
  ModifiedDfa m = modify(minimize(compile(parse("F(p1 & F p2)", kAps), kAps)));
  std::string dot = to_dot(m, kAps);
  CHECK(dot.rfind("digraph dfa {", 0) == 0);
  CHECK(dot.find("label=\"s_F\", shape=doublecircle") != std::string::npos);
  CHECK(dot.find("label=\"s_B\", shape=circle, style=dashed") != std::string::npos);
  CHECK(dot.find("peripheries=2") != std::string::npos);
  CHECK(dot.back() == '\n');
  CHECK(to_dot(m, kAps) == dot);
}
