#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <map>

#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "CLI11.hpp"
#include "unpred/io.hpp"
#include "unpred/pipeline.hpp"

namespace fs = std::filesystem;
using namespace unpred;

namespace {

constexpr int kOk = 0;
constexpr int kDataError = 1;
constexpr int kNoSolution = 2;
constexpr int kCheckFailed = 3;

struct Config {
  std::string model;
  std::string formula;
  unsigned k = 0;
  std::uint64_t seed = 0;
  std::string out;
  std::vector<std::string> dot;
  bool no_minimize = false;
  bool add_stop = false;
  std::string baseline;
  std::string controller;
  std::size_t steps = 20;
  std::vector<std::string> ap;
};

void setup_logging() {
  auto logger = spdlog::stderr_color_mt("unpred");
  spdlog::set_default_logger(logger);
  spdlog::set_pattern("[%l] %v");
  const char* lvl = std::getenv("UNPRED_LOG");
  spdlog::set_level(lvl ? spdlog::level::from_str(lvl) : spdlog::level::warn);
}

Pipeline load(const Config& cfg) {
  auto pl = build_pipeline(load_model(cfg.model), cfg.formula, {!cfg.no_minimize, cfg.add_stop});
  spdlog::info("model: {} states, automaton: {} states, product: {} states", pl.system.num_states(),
               pl.dfa.dfa.num_states(), pl.product.num_states());
  return pl;
}

// "kind" or "kind=path"; a bare kind is written to <dir>/<kind>.dot.
std::map<std::string, fs::path> dot_targets(const std::vector<std::string>& specs, const fs::path& dir,
                                            const std::vector<std::string>& allowed) {
  std::map<std::string, fs::path> out;
  for (const auto& s : specs) {
    auto eq = s.find('=');
    std::string kind = s.substr(0, eq);
    if (std::find(allowed.begin(), allowed.end(), kind) == allowed.end())
      throw IoError("unknown DOT target '" + kind + "'");
    out[kind] = eq == std::string::npos ? dir / (kind + ".dot") : fs::path(s.substr(eq + 1));
  }
  return out;
}

MealyController load_policy(const Config& cfg, const ProductSystem& p) {
  const std::string& path = cfg.controller.empty() ? cfg.baseline : cfg.controller;
  if (path.empty()) throw IoError("one of --controller or --baseline is required");
  Json j;
  try {
    j = Json::parse(read_text_file(path));
  } catch (const Json::parse_error& e) {
    throw IoError(path + ": " + e.what());
  }
  return policy_from_json(j, p);
}

std::string belief_string(const Belief& b, const ProductSystem& p, unsigned k) {
  std::string s = "{";
  for (const auto& a : b) s += (s.size() > 1 ? ", " : "") + p.ts.state_name(a.state) + ":" + to_string(a.pred, k);
  return s + "}";
}

int cmd_validate(const Config& cfg) {
  auto ts = load_model(cfg.model);
  if (cfg.add_stop) {
    std::vector<StateId> all(ts.num_states());
    for (StateId x = 0; x < all.size(); ++x) all[x] = x;
    ts = add_stop_state(ts, all);
  }
  auto report = validate(ts);
  std::cout << ts.num_states() << " states, " << ts.num_inputs() << " inputs, " << ts.num_observations()
            << " observations\n";
  for (const auto& v : report.violations) std::cout << "violation: " << v.message << "\n";
  std::cout << (report.ok() ? "ok" : "invalid") << "\n";
  return report.ok() ? kOk : kDataError;
}

int cmd_compile(const Config& cfg) {
  ApUniverse aps = cfg.model.empty() ? ApUniverse(cfg.ap) : load_model(cfg.model).ap();
  Formula f = parse(cfg.formula, aps);
  Dfa dfa = compile(f, aps);
  if (!cfg.no_minimize) dfa = minimize(dfa);
  ModifiedDfa m = modify(dfa);
  std::cout << "formula: " << to_string(f, aps) << "\n";
  std::cout << "automaton: " << dfa.num_states() << " states (+ s_F, s_B)\n";
  std::string dot = to_dot(m, aps);
  if (!cfg.out.empty())
    write_text_file(cfg.out, dot);
  else
    std::cout << dot;
  return kOk;
}

int cmd_synthesize(const Config& cfg) {
  auto pl = load(cfg);
  auto r = synthesize(pl.product, cfg.k);
  spdlog::info("AES: {} Y-states, {} Z-states", r.aes.y.size(), r.aes.z.size());
  auto dots = dot_targets(cfg.dot, ".", {"dfa", "product", "aes", "controller"});
  if (dots.count("dfa")) write_text_file(dots["dfa"], to_dot(pl.dfa, pl.system.ap()));
  if (dots.count("product")) write_text_file(dots["product"], to_dot(pl.product));
  if (dots.count("aes")) write_text_file(dots["aes"], to_dot(r.aes, pl.product, "aes"));
  if (!r.controller) {
    std::cout << "no solution exists\n";
    return kNoSolution;
  }
  const auto& c = *r.controller;
  if (dots.count("controller")) write_text_file(dots["controller"], to_dot(c.bts(), pl.product, "controller"));
  for (std::size_t y = 0; y < c.bts().y.size(); ++y)
    std::cout << "y" << y << (y == c.initial() ? "*" : " ") << " "
              << belief_string(c.bts().y[y].belief, pl.product, cfg.k) << " -> "
              << pl.product.ts.input_name(c.input_at(y)) << "\n";
  std::string json = dump(controller_to_json(c, pl.product));
  if (!cfg.out.empty())
    write_text_file(cfg.out, json);
  else
    std::cout << json;
  return kOk;
}

int cmd_verify(const Config& cfg) {
  auto pl = load(cfg);
  auto c = load_policy(cfg, pl.product);
  auto report = verify_controller(pl.product, c, cfg.k);
  std::string json = dump(report_to_json(report, pl.product.ts));
  std::cout << json;
  if (!cfg.out.empty()) write_text_file(cfg.out, json);
  return report.ok() ? kOk : kCheckFailed;
}

int cmd_simulate(const Config& cfg) {
  auto pl = load(cfg);
  auto c = load_policy(cfg, pl.product);
  std::cout << format_trace(pl, simulate(pl.product, c, cfg.steps, cfg.seed));
  return kOk;
}

int cmd_export(const Config& cfg) {
  auto pl = load(cfg);
  fs::path dir = cfg.out.empty() ? fs::path(".") : fs::path(cfg.out);
  auto specs = cfg.dot.empty() ? std::vector<std::string>{"dfa", "product", "aes", "controller"} : cfg.dot;
  auto dots = dot_targets(specs, dir, {"dfa", "product", "aes", "controller"});
  if (dots.count("dfa")) write_text_file(dots["dfa"], to_dot(pl.dfa, pl.system.ap()));
  if (dots.count("product")) write_text_file(dots["product"], to_dot(pl.product));
  if (dots.count("aes") || dots.count("controller")) {
    auto r = synthesize(pl.product, cfg.k);
    if (dots.count("aes")) write_text_file(dots["aes"], to_dot(r.aes, pl.product, "aes"));
    if (dots.count("controller")) {
      Bts empty;
      empty.k = cfg.k;
      write_text_file(dots["controller"],
                      to_dot(r.controller ? r.controller->bts() : empty, pl.product, "controller"));
    }
  }
  for (const auto& [kind, path] : dots) std::cout << kind << ": " << path.string() << "\n";
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  setup_logging();
  CLI::App app{"Synthesis of K-step unpredictable controllers for scLTL tasks"};
  app.require_subcommand(1);
  Config cfg;

  auto model = [&](CLI::App* sub, bool required = true) {
    auto* o = sub->add_option("--model", cfg.model, "Model JSON file");
    if (required) o->required();
  };
  auto formula = [&](CLI::App* sub) {
    sub->add_option("--formula", cfg.formula, "scLTL task formula")->required();
    sub->add_flag("--no-minimize", cfg.no_minimize, "Keep the unminimized task automaton");
    sub->add_flag("--add-stop", cfg.add_stop, "Add an absorbing stop state reachable from every state");
  };
  auto horizon = [&](CLI::App* sub) {
    sub->add_option("--k", cfg.k, "Unpredictability horizon K")->required()->check(CLI::Range(0U, kMaxHorizon));
  };
  auto policy = [&](CLI::App* sub) {
    auto* c = sub->add_option("--controller", cfg.controller, "Synthesized controller JSON");
    auto* b = sub->add_option("--baseline", cfg.baseline, "Hand-written policy JSON");
    c->excludes(b);
  };

  auto* validate_cmd = app.add_subcommand("validate", "Check a model for liveness and uniform control");
  model(validate_cmd);
  validate_cmd->add_flag("--add-stop", cfg.add_stop, "Add an absorbing stop state reachable from every state");

  auto* compile_cmd = app.add_subcommand("compile", "Compile a formula to its task automaton (DOT)");
  model(compile_cmd, false);
  compile_cmd->add_option("--ap", cfg.ap, "Atomic propositions when no model is given");
  compile_cmd->add_option("--formula", cfg.formula, "scLTL task formula")->required();
  compile_cmd->add_flag("--no-minimize", cfg.no_minimize, "Keep the unminimized automaton");
  compile_cmd->add_option("--out", cfg.out, "Output DOT file");

  auto* synth_cmd = app.add_subcommand("synthesize", "Synthesize a K-step unpredictable controller");
  model(synth_cmd);
  formula(synth_cmd);
  horizon(synth_cmd);
  synth_cmd->add_option("--out", cfg.out, "Controller JSON output");
  synth_cmd->add_option("--dot", cfg.dot, "DOT target: dfa|product|aes|controller[=path]");

  auto* verify_cmd = app.add_subcommand("verify", "Check liveness, task completion and unpredictability");
  model(verify_cmd);
  formula(verify_cmd);
  horizon(verify_cmd);
  policy(verify_cmd);
  verify_cmd->add_option("--out", cfg.out, "Report JSON output");

  auto* sim_cmd = app.add_subcommand("simulate", "Run the closed loop with seeded nondeterminism");
  model(sim_cmd);
  formula(sim_cmd);
  policy(sim_cmd);
  sim_cmd->add_option("--steps", cfg.steps, "Number of transitions");
  sim_cmd->add_option("--seed", cfg.seed, "Random seed");

  auto* export_cmd = app.add_subcommand("export", "Write DOT files for the pipeline stages");
  model(export_cmd);
  formula(export_cmd);
  horizon(export_cmd);
  export_cmd->add_option("--dot", cfg.dot, "DOT target: dfa|product|aes|controller[=path]");
  export_cmd->add_option("--out", cfg.out, "Output directory for bare targets");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kOk : kDataError;
  }

  try {
    if (*validate_cmd) return cmd_validate(cfg);
    if (*compile_cmd) return cmd_compile(cfg);
    if (*synth_cmd) return cmd_synthesize(cfg);
    if (*verify_cmd) return cmd_verify(cfg);
    if (*sim_cmd) return cmd_simulate(cfg);
    if (*export_cmd) return cmd_export(cfg);
  } catch (const VerifyError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kCheckFailed;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kDataError;
  }
  return kDataError;
}
