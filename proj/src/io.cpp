#include "unpred/io.hpp"

#include <fstream>
#include <set>
#include <sstream>

namespace unpred {

namespace {

void require_fields(const Json& j, std::string_view what, std::initializer_list<std::string_view> required,
                    std::initializer_list<std::string_view> optional = {}) {
  if (!j.is_object()) throw IoError(std::string(what) + ": expected a JSON object");
  for (auto f : required)
    if (!j.contains(f)) throw IoError(std::string(what) + ": missing field '" + std::string(f) + "'");
  for (const auto& [key, value] : j.items()) {
    bool known = false;
    for (auto f : required) known = known || key == f;
    for (auto f : optional) known = known || key == f;
    if (!known) throw IoError(std::string(what) + ": unknown field '" + key + "'");
  }
}

template <typename T>
T get(const Json& j, std::string_view what) {
  try {
    return j.get<T>();
  } catch (const Json::exception&) {
    throw IoError(std::string(what) + ": wrong type");
  }
}

template <typename Find>
auto lookup(Find find, const std::string& name, std::string_view kind) {
  auto id = find(name);
  if (!id) throw IoError("unknown " + std::string(kind) + " '" + name + "'");
  return *id;
}

std::vector<std::string> obs_names(const TransitionSystem& ts, const std::vector<ObsId>& seq) {
  std::vector<std::string> out;
  for (ObsId o : seq) out.push_back(ts.obs_name(o));
  return out;
}

}  // namespace

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::filesystem::path& path, std::string_view text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write '" + path.string() + "'");
  out << text;
  if (text.empty() || text.back() != '\n') out << '\n';
  if (!out) throw IoError("write failed for '" + path.string() + "'");
}

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

TransitionSystem model_from_json(const Json& j) {
  require_fields(j, "model", {"states", "initial", "inputs", "transitions", "ap", "labels"}, {"observations"});
  TransitionSystem::Spec spec;
  spec.states = get<std::vector<std::string>>(j["states"], "states");
  spec.initial = get<std::string>(j["initial"], "initial");
  spec.inputs = get<std::vector<std::string>>(j["inputs"], "inputs");
  if (!j["transitions"].is_array()) throw IoError("transitions: expected an array");
  for (const auto& t : j["transitions"]) {
    require_fields(t, "transition", {"from", "input", "to"});
    spec.transitions.emplace_back(get<std::string>(t["from"], "transition.from"),
                                  get<std::string>(t["input"], "transition.input"),
                                  get<std::string>(t["to"], "transition.to"));
  }
  spec.ap = get<std::vector<std::string>>(j["ap"], "ap");
  if (!j["labels"].is_object()) throw IoError("labels: expected an object");
  for (const auto& [state, aps] : j["labels"].items())
    spec.labels.emplace_back(state, get<std::vector<std::string>>(aps, "labels." + state));
  if (j.contains("observations")) {
    if (!j["observations"].is_object()) throw IoError("observations: expected an object");
    for (const auto& [state, o] : j["observations"].items())
      spec.observations.emplace_back(state, get<std::string>(o, "observations." + state));
  }
  return TransitionSystem(spec);
}

Json model_to_json(const TransitionSystem& ts) {
  Json j;
  j["states"] = ts.state_names();
  j["initial"] = ts.state_name(ts.initial());
  j["inputs"] = ts.input_names();
  j["ap"] = ts.ap().names();
  j["transitions"] = Json::array();
  for (const auto& t : ts.transitions())
    j["transitions"].push_back(
        {{"from", ts.state_name(t.from)}, {"input", ts.input_name(t.input)}, {"to", ts.state_name(t.to)}});
  j["labels"] = Json::object();
  j["observations"] = Json::object();
  for (StateId x = 0; x < ts.num_states(); ++x) {
    Json aps = Json::array();
    for (ApId a = 0; a < ts.ap().size(); ++a)
      if (ts.label(x).has(a)) aps.push_back(ts.ap().name(a));
    if (!aps.empty()) j["labels"][ts.state_name(x)] = aps;
    j["observations"][ts.state_name(x)] = ts.obs_name(ts.observe(x));
  }
  return j;
}

TransitionSystem load_model(const std::filesystem::path& path) {
  std::string text = read_text_file(path);
  Json j;
  try {
    j = Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw IoError(path.string() + ": " + e.what());
  }
  return model_from_json(j);
}

Json controller_to_json(const Controller& c, const ProductSystem& p) {
  const auto& t = c.bts();
  const auto& ts = p.ts;
  auto belief = [&](const Belief& b) {
    Json arr = Json::array();
    for (const auto& a : b) arr.push_back({{"state", ts.state_name(a.state)}, {"pred", to_string(a.pred, t.k)}});
    return arr;
  };
  Json j;
  j["k"] = t.k;
  j["initial"] = c.initial();
  j["y_states"] = Json::array();
  for (std::size_t i = 0; i < t.y.size(); ++i)
    j["y_states"].push_back({{"belief", belief(t.y[i].belief)},
                             {"observation", ts.obs_name(t.y[i].obs)},
                             {"input", ts.input_name(c.input_at(i))},
                             {"next", c.z_after(i)}});
  j["z_states"] = Json::array();
  for (std::size_t i = 0; i < t.z.size(); ++i) {
    Json next = Json::object();
    for (auto [o, y] : t.zy[i]) next[ts.obs_name(o)] = y;
    j["z_states"].push_back(
        {{"belief", belief(t.z[i].belief)}, {"input", ts.input_name(t.z[i].input)}, {"next", next}});
  }
  return j;
}

Controller controller_from_json(const Json& j, const ProductSystem& p) {
  const auto& ts = p.ts;
  require_fields(j, "controller", {"k", "initial", "y_states", "z_states"});
  Bts t;
  t.k = get<unsigned>(j["k"], "k");
  if (t.k > kMaxHorizon) throw IoError("controller: horizon too large");
  auto belief = [&](const Json& arr) {
    if (!arr.is_array()) throw IoError("belief: expected an array");
    Belief b;
    for (const auto& a : arr) {
      require_fields(a, "belief entry", {"state", "pred"});
      StateId x = lookup([&](auto& n) { return ts.find_state(n); }, get<std::string>(a["state"], "state"), "state");
      auto bits = get<std::string>(a["pred"], "pred");
      if (bits.size() != t.k + 1) throw IoError("belief entry: prediction length must be K+1");
      try {
        b.push_back({x, parse_prediction(bits)});
      } catch (const SynthesisError& e) {
        throw IoError(std::string("belief entry: ") + e.what());
      }
    }
    std::sort(b.begin(), b.end());
    if (!is_functional(b)) throw IoError("belief: duplicate state");
    return b;
  };
  auto index = [](const Json& v, std::size_t bound, std::string_view what) {
    auto i = get<std::size_t>(v, what);
    if (i >= bound) throw IoError(std::string(what) + ": index out of range");
    return i;
  };
  const Json& ys = j["y_states"];
  const Json& zs = j["z_states"];
  if (!ys.is_array() || !zs.is_array()) throw IoError("controller: node tables must be arrays");
  for (const auto& y : ys) {
    require_fields(y, "y_state", {"belief", "observation", "input", "next"});
    ObsId o = lookup([&](auto& n) { return ts.find_obs(n); }, get<std::string>(y["observation"], "observation"),
                     "observation");
    InputId u = lookup([&](auto& n) { return ts.find_input(n); }, get<std::string>(y["input"], "input"), "input");
    t.y.push_back({belief(y["belief"]), o});
    t.yz.push_back({{u, index(y["next"], zs.size(), "y_state.next")}});
  }
  for (const auto& z : zs) {
    require_fields(z, "z_state", {"belief", "input", "next"});
    InputId u = lookup([&](auto& n) { return ts.find_input(n); }, get<std::string>(z["input"], "input"), "input");
    t.z.push_back({belief(z["belief"]), u});
    if (!z["next"].is_object()) throw IoError("z_state.next: expected an object");
    std::vector<std::pair<ObsId, std::size_t>> edges;
    for (const auto& [name, y] : z["next"].items())
      edges.push_back({lookup([&](auto& n) { return ts.find_obs(n); }, name, "observation"),
                       index(y, ys.size(), "z_state.next")});
    std::sort(edges.begin(), edges.end());
    t.zy.push_back(std::move(edges));
  }
  t.initial = {index(j["initial"], ys.size(), "initial")};
  for (std::size_t i = 0; i < t.y.size(); ++i)
    if (t.z[t.yz[i].front().second].input != t.yz[i].front().first)
      throw IoError("controller: y_state input disagrees with its successor");
  return Controller(std::move(t));
}

MealyController policy_from_json(const Json& j, const ProductSystem& p) {
  const auto& ts = p.ts;
  if (!j.is_object()) throw IoError("policy: expected a JSON object");
  auto obs = [&](const std::string& n) { return lookup([&](auto& s) { return ts.find_obs(s); }, n, "observation"); };
  auto input = [&](const std::string& n) { return lookup([&](auto& s) { return ts.find_input(s); }, n, "input"); };
  if (j.contains("y_states")) return controller_from_json(j, p).to_mealy();
  if (j.contains("policy")) {
    require_fields(j, "policy", {"policy"});
    if (!j["policy"].is_object()) throw IoError("policy: expected an object");
    std::map<ObsId, InputId> table;
    for (const auto& [o, u] : j["policy"].items()) table[obs(o)] = input(get<std::string>(u, "policy." + o));
    return memoryless_controller(ts, table);
  }
  if (j.contains("mealy")) {
    require_fields(j, "policy", {"mealy"});
    const Json& m = j["mealy"];
    require_fields(m, "mealy", {"memory", "initial", "update", "output"});
    MealyController c;
    c.memory_names = get<std::vector<std::string>>(m["memory"], "mealy.memory");
    auto mem = [&](const std::string& n) {
      auto it = std::find(c.memory_names.begin(), c.memory_names.end(), n);
      if (it == c.memory_names.end()) throw IoError("unknown memory '" + n + "'");
      return static_cast<MemId>(it - c.memory_names.begin());
    };
    if (std::set<std::string>(c.memory_names.begin(), c.memory_names.end()).size() != c.memory_names.size())
      throw IoError("mealy.memory: duplicate name");
    c.initial = mem(get<std::string>(m["initial"], "mealy.initial"));
    if (!m["update"].is_array()) throw IoError("mealy.update: expected an array");
    for (const auto& e : m["update"]) {
      require_fields(e, "mealy.update entry", {"memory", "observation", "next"});
      auto key = std::make_pair(mem(get<std::string>(e["memory"], "memory")),
                                obs(get<std::string>(e["observation"], "observation")));
      if (!c.update.emplace(key, mem(get<std::string>(e["next"], "next"))).second)
        throw IoError("mealy.update: duplicate entry");
    }
    c.output.assign(c.memory_names.size(), std::nullopt);
    if (!m["output"].is_object()) throw IoError("mealy.output: expected an object");
    for (const auto& [name, u] : m["output"].items()) c.output[mem(name)] = input(get<std::string>(u, "output"));
    return c;
  }
  throw IoError("policy: expected one of 'policy', 'mealy' or a controller");
}

Json report_to_json(const VerificationReport& r, const TransitionSystem& ts) {
  Json w = Json::object();
  if (!r.task) w["task"] = obs_names(ts, r.task_witness);
  if (!r.unpredictable) w["unpredictable"] = obs_names(ts, r.unpredictable_witness);
  return {{"live", r.live}, {"task", r.task}, {"unpredictable", r.unpredictable}, {"witnesses", w}};
}

}  // namespace unpred
