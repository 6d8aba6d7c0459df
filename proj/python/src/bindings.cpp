#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "unpred/io.hpp"
#include "unpred/pipeline.hpp"

namespace py = pybind11;
using namespace unpred;

namespace {

// Model, formula and product held together; JSON crosses the boundary as text.
class Session {
 public:
  Session(const std::string& model_json, const std::string& formula, bool minimize, bool add_stop)
      : pl_(build_pipeline(model_from_json(parse_json(model_json)), formula, {minimize, add_stop})) {}

  std::size_t num_product_states() const { return pl_.product.num_states(); }
  std::size_t num_automaton_states() const { return pl_.dfa.dfa.num_states(); }

  std::vector<std::string> product_states() const {
    std::vector<std::string> out;
    for (StateId x = 0; x < pl_.product.num_states(); ++x)
      out.push_back(pl_.product.describe(x, pl_.system, pl_.dfa));
    return out;
  }

  std::vector<std::string> secret_states() const {
    std::vector<std::string> out;
    for (StateId x = 0; x < pl_.product.num_states(); ++x)
      if (pl_.product.is_secret(x)) out.push_back(pl_.product.ts.state_name(x));
    return out;
  }

  std::pair<std::size_t, std::size_t> aes_size(unsigned k) const {
    Aes aes = build_aes(pl_.product, k);
    return {aes.y.size(), aes.z.size()};
  }

  std::optional<std::string> synthesize(unsigned k) const {
    auto r = unpred::synthesize(pl_.product, k);
    if (!r.controller) return std::nullopt;
    return dump(controller_to_json(*r.controller, pl_.product));
  }

  std::string verify(const std::string& policy_json, unsigned k) const {
    auto c = policy_from_json(parse_json(policy_json), pl_.product);
    return dump(report_to_json(verify_controller(pl_.product, c, k), pl_.product.ts));
  }

  std::string simulate(const std::string& policy_json, std::size_t steps, std::uint64_t seed) const {
    auto c = policy_from_json(parse_json(policy_json), pl_.product);
    return format_trace(pl_, unpred::simulate(pl_.product, c, steps, seed));
  }

  std::string dot(const std::string& kind, unsigned k) const {
    if (kind == "dfa") return to_dot(pl_.dfa, pl_.system.ap());
    if (kind == "product") return to_dot(pl_.product);
    auto r = unpred::synthesize(pl_.product, k);
    if (kind == "aes") return to_dot(r.aes, pl_.product, "aes");
    if (kind == "controller") {
      Bts empty;
      empty.k = k;
      return to_dot(r.controller ? r.controller->bts() : empty, pl_.product, "controller");
    }
    throw IoError("unknown DOT target '" + kind + "'");
  }

 private:
  static Json parse_json(const std::string& text) {
    try {
      return Json::parse(text);
    } catch (const Json::parse_error& e) {
      throw IoError(e.what());
    }
  }

  Pipeline pl_;
};

Word to_word(const std::vector<std::vector<std::string>>& letters, const ApUniverse& aps) {
  Word w;
  for (const auto& letter : letters) {
    Label l;
    for (const auto& name : letter) {
      auto id = aps.find(name);
      if (!id) throw FormulaError(FormulaError::Kind::UnknownAtom, 0, "unknown proposition '" + name + "'");
      l = l.with(*id);
    }
    w.push_back(l);
  }
  return w;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "K-step unpredictable controller synthesis for scLTL tasks";

  auto base = py::register_exception<std::runtime_error>(m, "UnpredError", PyExc_RuntimeError);
  py::register_exception<FormulaError>(m, "FormulaError", base.ptr());
  py::register_exception<AutomatonError>(m, "AutomatonError", base.ptr());
  py::register_exception<ModelError>(m, "ModelError", base.ptr());
  py::register_exception<SynthesisError>(m, "SynthesisError", base.ptr());
  py::register_exception<VerifyError>(m, "VerifyError", base.ptr());
  py::register_exception<IoError>(m, "IoError", base.ptr());

  m.def(
      "normalize_formula",
      [](const std::string& text, const std::vector<std::string>& ap) {
        ApUniverse aps(ap);
        return to_string(parse(text, aps), aps);
      },
      py::arg("formula"), py::arg("ap"));

  m.def(
      "holds_on",
      [](const std::string& text, const std::vector<std::string>& ap,
         const std::vector<std::vector<std::string>>& word) {
        ApUniverse aps(ap);
        return holds_on(to_word(word, aps), parse(text, aps));
      },
      py::arg("formula"), py::arg("ap"), py::arg("word"), "Finite-word satisfaction; letters are lists of propositions.");

  m.def(
      "compile_dot",
      [](const std::string& text, const std::vector<std::string>& ap, bool minimized) {
        ApUniverse aps(ap);
        Dfa a = compile(parse(text, aps), aps);
        if (minimized) a = minimize(a);
        return std::make_pair(a.num_states(), to_dot(modify(a), aps));
      },
      py::arg("formula"), py::arg("ap"), py::arg("minimize") = true,
      "Automaton state count (before the two sinks) and the DOT of the completed automaton.");

  py::class_<Session>(m, "Session")
      .def(py::init<const std::string&, const std::string&, bool, bool>(), py::arg("model_json"), py::arg("formula"),
           py::arg("minimize") = true, py::arg("add_stop") = false)
      .def_property_readonly("num_product_states", &Session::num_product_states)
      .def_property_readonly("num_automaton_states", &Session::num_automaton_states)
      .def("product_states", &Session::product_states)
      .def("secret_states", &Session::secret_states)
      .def("aes_size", &Session::aes_size, py::arg("k"), "(Y-states, Z-states) of the largest admissible BTS.")
      .def("synthesize", &Session::synthesize, py::arg("k"), "Controller JSON, or None when no solution exists.")
      .def("verify", &Session::verify, py::arg("policy_json"), py::arg("k"))
      .def("simulate", &Session::simulate, py::arg("policy_json"), py::arg("steps") = 20, py::arg("seed") = 0)
      .def("dot", &Session::dot, py::arg("kind"), py::arg("k") = 0);
}
