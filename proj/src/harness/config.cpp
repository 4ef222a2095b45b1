#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "qpc/errors.hpp"
#include "qpc/harness.hpp"

namespace qpc::harness {

namespace {

Json null() { return Json(nullptr); }

std::vector<ExperimentInfo> build_catalog() {
  std::vector<ExperimentInfo> c;
  c.push_back({"lyapunov-sweep",
               "Lyapunov exponent L(E) = lim (1/n) int log||M_n(x, E)|| dx of the Schroedinger cocycle",
               "Finite-volume Lyapunov exponents over an energy grid and a volume ladder.",
               {{"energies", null(), "explicit energies; null uses e_count points over the spectral range"},
                {"e_count", 9, "number of energies when energies is null"},
                {"n_ladder", Json::array({256, 1024, 4096}), "volumes n"},
                {"grid", 256, "phase samples x_j = j / grid"},
                {"y", 0.0, "imaginary part of the phase"}},
               {}});
  c.push_back({"ldt", "Large deviation estimate for log||M_n|| and log|f_n| about n L_n",
               "Phase measure of large deviations over a delta ladder.",
               {{"n", 512, "volume"},
                {"energy", 0.0, "energy"},
                {"deltas", Json::array({0.02, 0.05, 0.1, 0.2}), "relative deviations"},
                {"grid", 4096, "phase samples"},
                {"determinant", false, "use log|f_n| instead of log||M_n||"}},
               {}});
  c.push_back({"ap-check", "Avalanche principle for long products of large non-cancelling 2x2 matrices",
               "Random hyperbolic chains against the C n / mu defect bound, and the 2 L_2l - L_l extrapolation.",
               {{"chains", 1000, "number of random chains"},
                {"n_max", 200, "chain lengths are uniform on [2, n_max]"},
                {"log_mu_min", 20.0, "smallest log norm of a factor"},
                {"log_mu_max", 40.0, "largest log norm of a factor"},
                {"constant", 10.0, "constant C of the bound C n / mu"},
                {"extrapolation_energies", Json::array({0.0, 1.0, -1.0, 2.0, -2.0}), "energies for 2 L_2l - L_l"},
                {"ell", 64, "scale l"},
                {"N", 4096, "reference volume"},
                {"grid", 512, "phase samples"}},
               {{"extrapolation", 5e-3, "max |2 L_2l - L_l - L_N|"}}});
  c.push_back({"ids", "Integrated density of states N(E) as the limit of normalized Dirichlet eigenvalue counts",
               "Phase-averaged counting function on an energy grid.",
               {{"N", 512, "volume"},
                {"x_grid", 256, "phase samples"},
                {"e_min", null(), "lower end of the energy grid; null uses the spectral range"},
                {"e_max", null(), "upper end of the energy grid"},
                {"e_count", 1000, "number of grid steps"},
                {"counting", "exact_sturm", "exact_sturm or eigenvalue_list"}},
               {{"free_law", 3.0, "max |N(E) - arccos law| in units of 1/N, checked when V = 0"}}});
  c.push_back({"holder", "Hoelder continuity of the IDS with exponent 1/(2 k0) - epsilon",
               "Modulus of continuity sup_E N(E + eta) - N(E - eta) and its fitted exponent.",
               {{"N", 512, "volume"},
                {"x_grid", 256, "phase samples"},
                {"e_step", 2e-3, "energy grid spacing"},
                {"eta_min", 2e-3, "smallest eta"},
                {"eta_max", 5e-2, "largest eta"},
                {"eta_count", 8, "geometric eta ladder size"},
                {"k0", 1, "degree of the potential"}},
               {{"exponent_min", 0.35, "smallest acceptable fitted exponent"}}});
  c.push_back({"lipschitz", "Lipschitz continuity of the IDS off an exceptional energy set",
               "Ratios (N(E + eta) - N(E - eta)) / eta after discarding the worst q-fraction of energies.",
               {{"N", 256, "volume"},
                {"x_grid", 128, "phase samples"},
                {"e_step", 4e-3, "energy grid spacing"},
                {"etas", Json::array({8e-3, 1.6e-2, 3.2e-2}), "window half-widths"},
                {"qs", Json::array({0.0, 0.05, 0.1}), "discarded fractions, each in [0, 0.2)"}},
               {}});
  c.push_back({"thouless", "Thouless formula L(E) = int log|E - E'| dN(E')",
               "Log potential of the finite-volume IDS against the Lyapunov exponent.",
               {{"N", 512, "volume"},
                {"x_grid", 64, "phase samples for the IDS"},
                {"e_step", 5e-3, "energy grid spacing"},
                {"energies", null(), "null uses the IDS midpoint quantiles (2i - 1) / 16"},
                {"lyap_grid", 256, "phase samples for L"}},
               {{"residual", 5e-2, "max |L - log potential|"}}});
  c.push_back({"gaps", "Separation of Dirichlet eigenvalues by exp(-N^delta)",
               "Minimal eigenvalue gaps over a phase grid.",
               {{"N", 100, "volume"},
                {"x_grid", 256, "phase samples"},
                {"deltas", Json::array({0.3, 0.5, 0.7}), "threshold exponents"},
                {"window", null(), "[lo, hi] energy window; null keeps every gap"}},
               {{"small_gap_fraction", 0.1, "max fraction of phases with min gap below exp(-N^0.5)"}}});
  c.push_back({"wegner", "Wegner-type estimate mes{x : dist(spec H_N(x), E) < exp(-H)}",
               "Phase fraction near a fixed energy along an H ladder.",
               {{"N", 128, "volume"},
                {"energy", null(), "null uses the IDS quantile at energy_level"},
                {"energy_level", 0.5625, "IDS level used when energy is null"},
                {"x_grid", 16384, "phase samples"},
                {"H", Json::array({3, 4, 5, 6, 7, 8, 9, 10, 11, 12}), "H ladder"}},
               {}});
  c.push_back({"localization", "Exponential localization of Dirichlet eigenfunctions",
               "Tail masses and decay rates of every eigenvector at one phase.",
               {{"N", 200, "volume"}, {"x", 0.1234, "phase"}, {"extra_Q", Json::array(), "additional tail radii"}},
               {{"residual", 1e-10, "max ||H psi - E psi||"}, {"orthonormality", 1e-10, "max |<psi_j, psi_k> - delta|"}}});
  c.push_back({"rellich", "Rellich functions E_j(x) and their phase derivatives",
               "Hellmann-Feynman velocities over a phase grid, cross-checked by finite differences at one phase.",
               {{"N", 64, "volume"},
                {"x_grid", 64, "phase samples"},
                {"threshold", 1e-3, "velocity below which a branch counts as flat"},
                {"check_x", 0.1, "phase of the finite-difference cross-check"}},
               {{"agreement", 1e-3, "max relative difference of the two derivatives"}}});
  c.push_back({"zeros-figure", "Zeros of f_N(z) in the complexified phase and their equidistribution in an annulus",
               "Zero census of f_N with SVG scatter plots.",
               {{"N", 70, "volume"},
                {"energies", null(), "null uses the IDS quantiles at energy_levels"},
                {"energy_levels", Json::array({0.3125, 0.6875}), "IDS levels used when energies is null"},
                {"rho", 0.45, "annulus half-width"}},
               {{"radial", 0.1, "max ||z| - 1|"}, {"discrepancy", 0.15, "max angular star discrepancy"}}});
  c.push_back({"jensen", "Jensen averages sandwich the zero count: nu(r1 - r2) <= 4 r1^2/r2^2 J <= nu(r1 + r2)",
               "Jensen averages of log|f_N| on the unit circle against argument-principle counts.",
               {{"N", 70, "volume"},
                {"energy", null(), "null uses the IDS quantile at energy_level"},
                {"energy_level", 0.6875, "IDS level used when energy is null"},
                {"centers", 4, "disk centres e(k / centers)"},
                {"r1", 0.05, "outer radius"},
                {"r2", 0.01, "inner radius"},
                {"quadrature_n", 32, "initial angular samples"}},
               {}});
  c.push_back({"separation", "Separation of the zeros of f_N by exp(-N^delta) off an exceptional energy set",
               "Minimal zero distance over energies sampled from the density of states.",
               {{"N", 70, "volume"},
                {"energy_count", 16, "IDS midpoint quantiles used as energies"},
                {"rho", 0.45, "annulus half-width"},
                {"refine_steps", 0, "golden-section steps towards a near-double zero around the worst energy"}},
               {{"separated_fraction", 0.9, "min fraction of energies with min distance above exp(-N^0.5)"}}});
  c.push_back({"per-disk", "At most 2 k0 zeros of f_N in any disk of radius exp(-(log N)^A)",
               "Largest number of zeros in a disk of radius exp(-(log N)^A) for an A ladder.",
               {{"N", 70, "volume"},
                {"energy_count", 16, "IDS midpoint quantiles used as energies"},
                {"rho", 0.45, "annulus half-width"},
                {"exponents", Json::array({1.5, 2.0, 3.0}), "A ladder"},
                {"k0", 1, "degree of the potential"}},
               {}});
  c.push_back({"resonance-scan", "Elimination of double resonances between f_l1(z) and f_l2(z e(t omega))",
               "Distance between the two zero sets over an (omega, E) grid and its sub-level measures.",
               {{"ell1", 24, "first window length"},
                {"ell2", 24, "second window length"},
                {"t", 200, "shift; 0 or greater than ell1"},
                {"x0", 0.0, "disk centre e(x0)"},
                {"r", 0.1, "disk radius"},
                {"omega_min", 0.35, "frequency grid start"},
                {"omega_max", 0.45, "frequency grid end"},
                {"omega_count", 16, "frequency cells, one seeded sample per cell"},
                {"e_min", null(), "energy grid start; null uses the spectral range"},
                {"e_max", null(), "energy grid end"},
                {"e_count", 16, "energy samples"},
                {"taus", Json::array({1e-8, 1e-6, 1e-4, 1e-3, 1e-2}), "sub-level thresholds"}},
               {{"bad_fraction", 0.05, "max fraction of cells with distance below 1e-4"}}});
  c.push_back({"concat-bound", "Eigenvalue count in (E - eta, E + eta) is at most 4 eta sum_k W_{N,k}",
               "Concatenation bound at random (x, E).",
               {{"N", 256, "volume"},
                {"samples", 32, "random (x, E) pairs drawn from the seed"},
                {"eta", null(), "null uses 1 / N"}},
               {}});
  return c;
}

Json potential_defaults() { return {{"type", "almost_mathieu"}, {"coupling", 4.0}}; }
Json omega_defaults() { return {{"mode", "sqrt2"}}; }

void require(bool ok, const std::string& msg) {
  if (!ok) throw ConfigError(msg);
}

// Loose type compatibility against the catalog default.
bool compatible(const Json& def, const Json& v) {
  if (def.is_null()) return true;
  if (def.is_number()) return v.is_number();
  if (def.is_boolean()) return v.is_boolean();
  if (def.is_string()) return v.is_string();
  if (def.is_array()) return v.is_array();
  return v.type() == def.type();
}

Json resolve_potential(const Json& raw) {
  require(raw.is_object(), "potential must be an object");
  Json p = raw;
  if (!p.contains("type")) p["type"] = "almost_mathieu";
  require(p["type"].is_string(), "potential.type must be a string");
  const auto type = p["type"].get<std::string>();
  auto allow = [&](std::initializer_list<const char*> keys) {
    for (const auto& [k, v] : p.items()) {
      bool ok = k == "type";
      for (const char* a : keys) ok = ok || k == a;
      require(ok, "potential: unknown key '" + k + "' for type " + type);
    }
  };
  auto number = [&](const char* key, double def) {
    if (!p.contains(key)) p[key] = def;
    require(p[key].is_number(), std::string("potential.") + key + " must be a number");
  };
  if (type == "almost_mathieu") {
    allow({"coupling"});
    number("coupling", 4.0);
  } else if (type == "cosine") {
    allow({"coupling", "harmonic"});
    number("coupling", 1.0);
    if (!p.contains("harmonic")) p["harmonic"] = 1;
    require(p["harmonic"].is_number_integer() && p["harmonic"].get<int>() >= 1,
            "potential.harmonic must be a positive integer");
  } else if (type == "zero") {
    allow({});
  } else if (type == "terms") {
    allow({"coupling", "rho0", "terms"});
    number("coupling", 1.0);
    number("rho0", 1.0);
    require(p.contains("terms") && p["terms"].is_array() && !p["terms"].empty(),
            "potential.terms must be a non-empty array of [k, re, im]");
    for (const auto& t : p["terms"])
      require(t.is_array() && t.size() == 3 && t[0].is_number_integer() && t[1].is_number() && t[2].is_number(),
              "potential.terms entries must be [k, re, im]");
  } else {
    throw ConfigError("potential.type must be almost_mathieu, cosine, zero or terms");
  }
  return p;
}

Json resolve_omega(const Json& raw) {
  require(raw.is_object(), "omega must be an object");
  Json o = raw;
  if (!o.contains("mode")) o["mode"] = "sqrt2";
  require(o["mode"].is_string(), "omega.mode must be a string");
  const auto mode = o["mode"].get<std::string>();
  auto allow = [&](std::initializer_list<const char*> keys) {
    for (const auto& [k, v] : o.items()) {
      bool ok = k == "mode";
      for (const char* a : keys) ok = ok || k == a;
      require(ok, "omega: unknown key '" + k + "' for mode " + mode);
    }
  };
  if (mode == "sqrt2" || mode == "golden") {
    allow({});
  } else if (mode == "float") {
    allow({"value"});
    require(o.contains("value") && o["value"].is_number(), "omega.value must be a number");
  } else if (mode == "rational") {
    allow({"p", "q"});
    require(o.contains("p") && o["p"].is_number_integer() && o.contains("q") && o["q"].is_number_integer() &&
                o["q"].get<std::int64_t>() >= 1,
            "omega.p and omega.q must be integers with q >= 1");
  } else if (mode == "convergent") {
    allow({"tag", "min_denominator"});
    if (!o.contains("tag")) o["tag"] = "sqrt2";
    require(o["tag"].is_string() && (o["tag"] == "sqrt2" || o["tag"] == "golden"),
            "omega.tag must be sqrt2 or golden");
    require(o.contains("min_denominator") && o["min_denominator"].is_number_integer() &&
                o["min_denominator"].get<std::int64_t>() >= 1,
            "omega.min_denominator must be a positive integer");
  } else {
    throw ConfigError("omega.mode must be sqrt2, golden, float, rational or convergent");
  }
  return o;
}

Json resolve_section(const Json& raw, const std::vector<ParamDoc>& docs, const std::string& what,
                     const std::string& experiment) {
  Json out = Json::object();
  for (const auto& d : docs) out[d.name] = d.default_value;
  if (raw.is_null()) return out;
  require(raw.is_object(), what + " must be an object");
  for (const auto& [k, v] : raw.items()) {
    const auto it = std::find_if(docs.begin(), docs.end(), [&](const ParamDoc& d) { return d.name == k; });
    require(it != docs.end(), what + ": unknown key '" + k + "' for experiment " + experiment);
    require(compatible(it->default_value, v), what + "." + k + " has the wrong type");
    out[k] = v;
  }
  return out;
}

Json schema_for_default(const Json& def) {
  if (def.is_null()) return Json::object();
  if (def.is_boolean()) return {{"type", "boolean"}};
  if (def.is_number_integer()) return {{"type", "integer"}};
  if (def.is_number()) return {{"type", "number"}};
  if (def.is_string()) return {{"type", "string"}};
  if (def.is_array()) return {{"type", "array"}};
  return {{"type", "object"}};
}

}  // namespace

const std::vector<ExperimentInfo>& catalog() {
  static const std::vector<ExperimentInfo> c = build_catalog();
  return c;
}

const ExperimentInfo& experiment_info(std::string_view name) {
  for (const auto& e : catalog())
    if (e.name == name) return e;
  throw ConfigError("unknown experiment '" + std::string(name) + "'");
}

Json catalog_json() {
  Json out = Json::array();
  for (const auto& e : catalog()) {
    Json params = Json::array(), tols = Json::array();
    for (const auto& p : e.params) params.push_back({{"name", p.name}, {"default", p.default_value}, {"doc", p.doc}});
    for (const auto& p : e.tolerances) tols.push_back({{"name", p.name}, {"default", p.default_value}, {"doc", p.doc}});
    out.push_back(
        {{"name", e.name}, {"anchor", e.anchor}, {"summary", e.summary}, {"params", params}, {"tolerances", tols}});
  }
  return out;
}

Json config_schema() {
  Json names = Json::array();
  Json branches = Json::array();
  for (const auto& e : catalog()) {
    names.push_back(e.name);
    Json props = Json::object(), tprops = Json::object();
    for (const auto& p : e.params) {
      props[p.name] = schema_for_default(p.default_value);
      props[p.name]["description"] = p.doc;
    }
    for (const auto& p : e.tolerances) {
      tprops[p.name] = schema_for_default(p.default_value);
      tprops[p.name]["description"] = p.doc;
    }
    branches.push_back(
        {{"if", {{"properties", {{"experiment", {{"const", e.name}}}}}}},
         {"then",
          {{"properties",
            {{"params", {{"type", "object"}, {"additionalProperties", false}, {"properties", props}}},
             {"tolerances", {{"type", "object"}, {"additionalProperties", false}, {"properties", tprops}}}}}}}});
  }
  Json term = {{"type", "array"},
               {"prefixItems", Json::array({{{"type", "integer"}}, {{"type", "number"}}, {{"type", "number"}}})},
               {"minItems", 3},
               {"maxItems", 3}};
  Json potential = {{"type", "object"},
                    {"properties",
                     {{"type", {{"enum", {"almost_mathieu", "cosine", "zero", "terms"}}}},
                      {"coupling", {{"type", "number"}}},
                      {"harmonic", {{"type", "integer"}, {"minimum", 1}}},
                      {"rho0", {{"type", "number"}, {"exclusiveMinimum", 0}}},
                      {"terms", {{"type", "array"}, {"items", term}}}}}};
  Json omega = {{"type", "object"},
                {"properties",
                 {{"mode", {{"enum", {"sqrt2", "golden", "float", "rational", "convergent"}}}},
                  {"value", {{"type", "number"}}},
                  {"p", {{"type", "integer"}}},
                  {"q", {{"type", "integer"}, {"minimum", 1}}},
                  {"tag", {{"enum", {"sqrt2", "golden"}}}},
                  {"min_denominator", {{"type", "integer"}, {"minimum", 1}}}}}};
  return {{"$schema", "https://json-schema.org/draft/2020-12/schema"},
          {"title", "qpclab experiment config"},
          {"type", "object"},
          {"required", {"experiment"}},
          {"additionalProperties", false},
          {"properties",
           {{"experiment", {{"enum", names}}},
            {"potential", potential},
            {"omega", omega},
            {"params", {{"type", "object"}}},
            {"tolerances", {{"type", "object"}}},
            {"seed", {{"type", "integer"}, {"minimum", 0}}},
            {"output_dir", {{"type", "string"}}},
            {"threads", {{"type", "integer"}, {"minimum", 0}}},
            {"reproducible", {{"type", "boolean"}}},
            {"budget",
             {{"type", "object"},
              {"additionalProperties", false},
              {"properties",
               {{"max_boxes", {{"type", "integer"}, {"minimum", 1}}},
                {"min_box", {{"type", "number"}, {"exclusiveMinimum", 0}}}}}}}}},
          {"allOf", branches}};
}

Json default_config(std::string_view experiment) {
  experiment_info(experiment);
  return {{"experiment", std::string(experiment)}};
}

ExperimentConfig parse_config(const Json& raw) {
  require(raw.is_object(), "config must be a JSON object");
  static const char* kKeys[] = {"experiment", "potential", "omega",        "params",      "tolerances",
                                "seed",       "output_dir", "threads",     "reproducible", "budget"};
  for (const auto& [k, v] : raw.items())
    require(std::find(std::begin(kKeys), std::end(kKeys), k) != std::end(kKeys), "unknown config key '" + k + "'");
  require(raw.contains("experiment") && raw["experiment"].is_string(), "config needs an experiment name");
  ExperimentConfig c;
  c.experiment = raw["experiment"].get<std::string>();
  const auto& info = experiment_info(c.experiment);
  c.potential = resolve_potential(raw.value("potential", potential_defaults()));
  c.omega = resolve_omega(raw.value("omega", omega_defaults()));
  c.params = resolve_section(raw.value("params", Json()), info.params, "params", c.experiment);
  c.tolerances = resolve_section(raw.value("tolerances", Json()), info.tolerances, "tolerances", c.experiment);
  if (raw.contains("seed")) {
    const Json& seed = raw["seed"];
    require(seed.is_number_unsigned() || (seed.is_number_integer() && seed.get<std::int64_t>() >= 0),
            "seed must be a non-negative integer");
    c.seed = raw["seed"].get<std::uint64_t>();
  }
  if (raw.contains("output_dir")) {
    require(raw["output_dir"].is_string(), "output_dir must be a string");
    c.output_dir = raw["output_dir"].get<std::string>();
  }
  if (raw.contains("threads")) {
    require(raw["threads"].is_number_integer() && raw["threads"].get<int>() >= 0,
            "threads must be a non-negative integer");
    c.threads = raw["threads"].get<int>();
  }
  if (raw.contains("reproducible")) {
    require(raw["reproducible"].is_boolean(), "reproducible must be a boolean");
    c.reproducible = raw["reproducible"].get<bool>();
  }
  if (raw.contains("budget")) {
    const auto& b = raw["budget"];
    require(b.is_object(), "budget must be an object");
    for (const auto& [k, v] : b.items()) {
      if (k == "max_boxes") {
        require(v.is_number_integer() && v.get<std::int64_t>() >= 1, "budget.max_boxes must be a positive integer");
        c.budget.max_boxes = v.get<std::size_t>();
      } else if (k == "min_box") {
        require(v.is_number() && v.get<double>() > 0.0, "budget.min_box must be positive");
        c.budget.min_box = v.get<double>();
      } else {
        throw ConfigError("budget: unknown key '" + k + "'");
      }
    }
  }
  // Surface potential errors (conjugate symmetry, rho0) at validation time.
  try {
    c.cocycle();
  } catch (const DomainError& e) {
    throw ConfigError(std::string("potential/omega: ") + e.what());
  }
  return c;
}

Json ExperimentConfig::to_json() const {
  Json j = {{"experiment", experiment},
            {"potential", potential},
            {"omega", omega},
            {"params", params},
            {"tolerances", tolerances},
            {"seed", seed},
            {"threads", threads},
            {"reproducible", reproducible},
            {"budget", {{"max_boxes", budget.max_boxes}, {"min_box", budget.min_box}}}};
  if (!output_dir.empty()) j["output_dir"] = output_dir;
  return j;
}

CocycleParams ExperimentConfig::cocycle() const {
  CocycleParams p;
  const auto type = potential.at("type").get<std::string>();
  if (type == "almost_mathieu") {
    p.potential = TrigPotential::almost_mathieu(potential.at("coupling").get<double>());
  } else if (type == "cosine") {
    p.potential = TrigPotential::cosine(potential.at("coupling").get<double>(), potential.at("harmonic").get<int>());
  } else if (type == "zero") {
    p.potential = TrigPotential::zero();
  } else {
    std::vector<std::pair<int, Complex>> terms;
    for (const auto& t : potential.at("terms"))
      terms.emplace_back(t[0].get<int>(), Complex(t[1].get<double>(), t[2].get<double>()));
    p.potential =
        TrigPotential::from_terms(potential.at("coupling").get<double>(), potential.at("rho0").get<double>(), terms);
  }
  const auto mode = omega.at("mode").get<std::string>();
  if (mode == "sqrt2") {
    p.omega = Frequency::sqrt2();
  } else if (mode == "golden") {
    p.omega = Frequency::golden();
  } else if (mode == "float") {
    p.omega = Frequency::irrational(omega.at("value").get<double>());
  } else if (mode == "rational") {
    p.omega = Frequency::rational(omega.at("p").get<std::int64_t>(), omega.at("q").get<std::int64_t>());
  } else {
    p.omega = Frequency::convergent(omega.at("tag").get<std::string>(), omega.at("min_denominator").get<std::int64_t>());
  }
  return p;
}

void apply_override(Json& config, std::string_view assignment) {
  const auto eq = assignment.find('=');
  require(eq != std::string_view::npos && eq > 0, "override must look like key.path=value");
  const std::string path(assignment.substr(0, eq));
  const std::string text(assignment.substr(eq + 1));
  Json value = Json::parse(text, nullptr, false);
  if (value.is_discarded()) value = text;
  if (!config.is_object()) config = Json::object();
  Json* node = &config;
  std::size_t start = 0;
  while (true) {
    const auto dot = path.find('.', start);
    const std::string key = path.substr(start, dot == std::string::npos ? std::string::npos : dot - start);
    require(!key.empty(), "override has an empty key segment: " + path);
    if (dot == std::string::npos) {
      (*node)[key] = value;
      return;
    }
    Json& child = (*node)[key];
    if (!child.is_object()) child = Json::object();
    node = &child;
    start = dot + 1;
  }
}

Json load_config_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  Json j = Json::parse(ss.str(), nullptr, false, true);
  if (j.is_discarded()) throw ConfigError("config file " + path.string() + " is not valid JSON");
  return j;
}

std::string default_output_dir() {
  if (const char* env = std::getenv("QPC_OUTPUT_DIR"); env != nullptr && *env != '\0') return env;
  return "qpc-out";
}

}  // namespace qpc::harness
