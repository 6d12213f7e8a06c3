#include "perfsim/config.hpp"

#include <algorithm>
#include <set>
#include <sstream>

namespace perfsim {

using nlohmann::json;

namespace {

std::string join(const std::vector<std::string>& parts) {
  std::ostringstream out;
  out << "config: " << parts.size() << " violation(s)";
  for (const auto& p : parts) out << "\n  - " << p;
  return out.str();
}

class Checker {
 public:
  std::vector<std::string> errors;

  void check_keys(const json& obj, const std::string& section,
                  const std::set<std::string>& allowed) {
    if (!obj.is_object()) {
      errors.push_back(section + ": expected an object");
      return;
    }
    for (const auto& [key, _] : obj.items())
      if (!allowed.count(key))
        errors.push_back(section + ": unknown key '" + key + "'");
  }

  double number(const json& obj, const std::string& section,
                const std::string& key, bool required, double fallback) {
    if (!obj.is_object() || !obj.contains(key)) {
      if (required) errors.push_back(section + ": missing required key '" + key + "'");
      return fallback;
    }
    if (!obj[key].is_number()) {
      errors.push_back(section + "." + key + ": expected a number");
      return fallback;
    }
    return obj[key].get<double>();
  }

  std::int64_t integer(const json& obj, const std::string& section,
                       const std::string& key, bool required,
                       std::int64_t fallback) {
    if (!obj.is_object() || !obj.contains(key)) {
      if (required) errors.push_back(section + ": missing required key '" + key + "'");
      return fallback;
    }
    if (!obj[key].is_number_integer() && !obj[key].is_number_unsigned()) {
      errors.push_back(section + "." + key + ": expected an integer");
      return fallback;
    }
    return obj[key].get<std::int64_t>();
  }

  std::string text(const json& obj, const std::string& section,
                   const std::string& key, bool required,
                   const std::string& fallback) {
    if (!obj.is_object() || !obj.contains(key)) {
      if (required) errors.push_back(section + ": missing required key '" + key + "'");
      return fallback;
    }
    if (!obj[key].is_string()) {
      errors.push_back(section + "." + key + ": expected a string");
      return fallback;
    }
    return obj[key].get<std::string>();
  }
};

void parse_environment(Checker& ck, const json& doc, EnvironmentSpec& env) {
  if (!doc.contains("environment")) {
    ck.errors.push_back("missing required section 'environment'");
    return;
  }
  const json& e = doc["environment"];
  env.kind = ck.text(e, "environment", "kind", true, "");

  if (env.kind == "gaussian") {
    ck.check_keys(e, "environment", {"kind", "mu", "sigma", "epsilon"});
    env.mu = ck.number(e, "environment", "mu", true, 0.0);
    env.sigma = ck.number(e, "environment", "sigma", true, 0.0);
    env.epsilon = ck.number(e, "environment", "epsilon", true, 0.0);
  } else if (env.kind == "eta") {
    ck.check_keys(e, "environment", {"kind", "p", "mu", "w", "epsilon"});
    env.p = ck.number(e, "environment", "p", true, 0.0);
    env.mu = ck.number(e, "environment", "mu", true, 0.0);
    env.w = ck.number(e, "environment", "w", true, 0.0);
    env.epsilon = ck.number(e, "environment", "epsilon", true, 0.0);
  } else if (env.kind == "point_mass") {
    ck.check_keys(e, "environment", {"kind", "epsilon", "beta_c", "gamma_c"});
    env.epsilon = ck.number(e, "environment", "epsilon", true, 0.0);
    env.beta_c = ck.number(e, "environment", "beta_c", true, 0.0);
    env.gamma_c = ck.number(e, "environment", "gamma_c", true, 0.0);
  } else if (env.kind == "strategic") {
    ck.check_keys(e, "environment",
                  {"kind", "epsilon", "strategic_dims", "lambda", "data"});
    env.epsilon = ck.number(e, "environment", "epsilon", true, 0.0);
    if (!e.contains("strategic_dims") || !e["strategic_dims"].is_array()) {
      ck.errors.push_back("environment: strategic requires 'strategic_dims' array");
    } else {
      for (const auto& v : e["strategic_dims"]) {
        if (!v.is_number_integer() && !v.is_number_unsigned()) {
          ck.errors.push_back("environment.strategic_dims: expected integers");
          break;
        }
        env.strategic_dims.push_back(v.get<std::int64_t>());
      }
    }
    if (e.contains("lambda") && e["lambda"].is_string()) {
      if (e["lambda"].get<std::string>() != "rule_1000_over_n")
        ck.errors.push_back(
            "environment.lambda: expected a number or \"rule_1000_over_n\"");
      env.lambda_rule = true;
    } else {
      env.lambda = ck.number(e, "environment", "lambda", true, 0.0);
    }
    if (!e.contains("data")) {
      ck.errors.push_back("environment: strategic requires a 'data' section");
    } else {
      const json& d = e["data"];
      env.data.source = ck.text(d, "environment.data", "source", true, "");
      if (env.data.source == "synthetic") {
        ck.check_keys(d, "environment.data",
                      {"source", "n", "d", "label_balance", "seed"});
        env.data.n = ck.integer(d, "environment.data", "n", true, 0);
        env.data.d = ck.integer(d, "environment.data", "d", true, 0);
        env.data.label_balance =
            ck.number(d, "environment.data", "label_balance", false, 0.5);
        env.data.seed = static_cast<std::uint64_t>(
            ck.integer(d, "environment.data", "seed", false, 7));
      } else if (env.data.source == "csv") {
        ck.check_keys(d, "environment.data",
                      {"source", "path", "label_column", "row_cap", "shuffle_seed"});
        env.data.path = ck.text(d, "environment.data", "path", true, "");
        env.data.label_column =
            ck.text(d, "environment.data", "label_column", true, "");
        env.data.row_cap = ck.integer(d, "environment.data", "row_cap", false, 0);
        env.data.shuffle_seed = static_cast<std::uint64_t>(
            ck.integer(d, "environment.data", "shuffle_seed", false, 0));
      } else {
        ck.errors.push_back("environment.data.source: expected 'synthetic' or 'csv'");
      }
    }
  } else if (!env.kind.empty()) {
    ck.errors.push_back("environment.kind: unknown kind '" + env.kind + "'");
  }
}

void parse_algorithm(Checker& ck, const json& doc, AlgorithmSpec& algo) {
  if (!doc.contains("algorithm")) {
    ck.errors.push_back("missing required section 'algorithm'");
    return;
  }
  const json& a = doc["algorithm"];
  ck.check_keys(a, "algorithm",
                {"name", "step", "deployment", "eta", "mc_samples", "inner_tol"});
  algo.name = ck.text(a, "algorithm", "name", true, "");
  const bool sgd = algo.name == "greedy" || algo.name == "lazy";

  if (a.contains("step")) {
    algo.has_step = true;
    if (!sgd)
      ck.errors.push_back("algorithm.step: only greedy and lazy take a step schedule");
    const json& s = a["step"];
    ck.check_keys(s, "algorithm.step", {"variant", "eta", "c_eta", "k0"});
    algo.step.variant = ck.text(s, "algorithm.step", "variant", false, "auto");
    const std::set<std::string> variants{"auto", "theorem", "override", "constant"};
    if (!variants.count(algo.step.variant))
      ck.errors.push_back("algorithm.step.variant: unknown variant '" +
                          algo.step.variant + "'");
    algo.step.eta = ck.number(s, "algorithm.step", "eta",
                              algo.step.variant == "constant", 0.0);
    algo.step.c_eta = ck.number(s, "algorithm.step", "c_eta", false, 0.0);
    algo.step.k0 = ck.number(s, "algorithm.step", "k0", false, -1.0);
  }

  if (a.contains("deployment")) {
    algo.has_deployment = true;
    if (algo.name != "lazy")
      ck.errors.push_back(
          "algorithm.deployment: only lazy has a deployment schedule");
    const json& d = a["deployment"];
    ck.check_keys(d, "algorithm.deployment", {"n0", "alpha"});
    algo.n0 = ck.number(d, "algorithm.deployment", "n0", false, 1.0);
    algo.alpha = ck.number(d, "algorithm.deployment", "alpha", false, 1.0);
  }

  if (a.contains("eta")) {
    if (algo.name != "rgd")
      ck.errors.push_back("algorithm.eta: only rgd takes a constant eta here");
    algo.eta = ck.number(a, "algorithm", "eta", false, 0.0);
    algo.eta_set = true;
  }
  if (a.contains("mc_samples")) {
    if (algo.name != "rgd")
      ck.errors.push_back("algorithm.mc_samples: only rgd uses Monte-Carlo gradients");
    algo.mc_samples = ck.integer(a, "algorithm", "mc_samples", false, 1000);
  }
  if (a.contains("inner_tol")) {
    if (algo.name != "rrm")
      ck.errors.push_back("algorithm.inner_tol: only rrm has an inner solver");
    algo.inner_tol = ck.number(a, "algorithm", "inner_tol", false, 1e-10);
  }

  const std::set<std::string> names{"greedy", "lazy", "rgd", "rrm"};
  if (!algo.name.empty() && !names.count(algo.name))
    ck.errors.push_back("algorithm.name: unknown algorithm '" + algo.name + "'");
}

void parse_budget(Checker& ck, const json& doc, const std::string& algo,
                  BudgetSpec& budget) {
  if (!doc.contains("budget")) {
    ck.errors.push_back("missing required section 'budget'");
    return;
  }
  const json& b = doc["budget"];
  ck.check_keys(b, "budget", {"samples", "deployments", "steps", "rounds"});
  budget.samples = ck.integer(b, "budget", "samples", false, 0);
  budget.deployments = ck.integer(b, "budget", "deployments", false, 0);
  budget.steps = ck.integer(b, "budget", "steps", false, 0);
  budget.rounds = ck.integer(b, "budget", "rounds", false, 0);

  const auto positive = [&](std::int64_t v, const char* key) {
    if (v < 1) ck.errors.push_back(std::string("budget.") + key + " must be >= 1");
  };
  if (algo == "greedy") {
    positive(budget.samples, "samples");
    if (budget.deployments || budget.steps || budget.rounds)
      ck.errors.push_back("budget: greedy takes only 'samples'");
  } else if (algo == "lazy") {
    if (budget.samples <= 0 && budget.deployments <= 0)
      ck.errors.push_back("budget: lazy needs 'samples' and/or 'deployments'");
    if (budget.steps || budget.rounds)
      ck.errors.push_back("budget: lazy takes 'samples'/'deployments' only");
  } else if (algo == "rgd") {
    positive(budget.steps, "steps");
    if (budget.samples || budget.deployments || budget.rounds)
      ck.errors.push_back("budget: rgd takes only 'steps'");
  } else if (algo == "rrm") {
    positive(budget.rounds, "rounds");
    if (budget.samples || budget.deployments || budget.steps)
      ck.errors.push_back("budget: rrm takes only 'rounds'");
  }
}

}  // namespace

ConfigError::ConfigError(std::vector<std::string> violations)
    : std::runtime_error(join(violations)), violations_(std::move(violations)) {}

namespace {
ExperimentConfig parse_config_doc(const json& doc_in);
}

ExperimentConfig parse_config(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError({std::string("not valid JSON: ") + e.what()});
  }
  return parse_config_doc(doc);
}

namespace {
ExperimentConfig parse_config_doc(const json& doc_in) {
  const json& doc =
      doc_in.is_object() && doc_in.contains("resolved_config")
          ? doc_in["resolved_config"]
          : doc_in;

  Checker ck;
  ExperimentConfig cfg;
  if (!doc.is_object()) throw ConfigError({"top level: expected an object"});

  ck.check_keys(doc, "top level",
                {"environment", "algorithm", "budget", "repeats", "base_seed",
                 "checkpoints", "stable_point", "init", "output", "audit"});

  parse_environment(ck, doc, cfg.environment);
  parse_algorithm(ck, doc, cfg.algorithm);
  parse_budget(ck, doc, cfg.algorithm.name, cfg.budget);

  cfg.repeats = ck.integer(doc, "top level", "repeats", false, 30);
  if (cfg.repeats < 1) ck.errors.push_back("repeats must be >= 1");
  cfg.base_seed =
      static_cast<std::uint64_t>(ck.integer(doc, "top level", "base_seed", false, 1));

  if (doc.contains("checkpoints")) {
    const json& c = doc["checkpoints"];
    ck.check_keys(c, "checkpoints", {"kind", "points", "values"});
    cfg.checkpoints.kind = ck.text(c, "checkpoints", "kind", false, "geometric");
    if (cfg.checkpoints.kind == "geometric") {
      cfg.checkpoints.points =
          static_cast<int>(ck.integer(c, "checkpoints", "points", false, 200));
      if (cfg.checkpoints.points < 1)
        ck.errors.push_back("checkpoints.points must be >= 1");
    } else if (cfg.checkpoints.kind == "explicit") {
      if (!c.contains("values") || !c["values"].is_array()) {
        ck.errors.push_back("checkpoints: explicit kind requires a 'values' array");
      } else {
        for (const auto& v : c["values"])
          cfg.checkpoints.values.push_back(v.get<std::int64_t>());
        if (!std::is_sorted(cfg.checkpoints.values.begin(),
                            cfg.checkpoints.values.end()) ||
            std::adjacent_find(cfg.checkpoints.values.begin(),
                               cfg.checkpoints.values.end()) !=
                cfg.checkpoints.values.end())
          ck.errors.push_back("checkpoints.values must be strictly increasing");
      }
    } else {
      ck.errors.push_back("checkpoints.kind: expected 'geometric' or 'explicit'");
    }
  }

  if (doc.contains("stable_point")) {
    const json& s = doc["stable_point"];
    ck.check_keys(s, "stable_point", {"source", "value", "tol"});
    cfg.stable_point.source = ck.text(s, "stable_point", "source", false, "auto");
    const std::set<std::string> sources{"auto", "closed_form", "rrm_empirical",
                                        "explicit", "none"};
    if (!sources.count(cfg.stable_point.source))
      ck.errors.push_back("stable_point.source: unknown source '" +
                          cfg.stable_point.source + "'");
    cfg.stable_point.tol = ck.number(s, "stable_point", "tol", false, 1e-9);
    if (s.contains("value")) {
      if (!s["value"].is_array()) {
        ck.errors.push_back("stable_point.value: expected an array");
      } else {
        for (const auto& v : s["value"])
          cfg.stable_point.value.push_back(v.get<double>());
      }
    }
    if (cfg.stable_point.source == "explicit" && cfg.stable_point.value.empty())
      ck.errors.push_back("stable_point: explicit source requires 'value'");
  }

  if (doc.contains("init")) {
    const json& s = doc["init"];
    ck.check_keys(s, "init", {"kind", "value"});
    cfg.init.kind = ck.text(s, "init", "kind", false, "default");
    const std::set<std::string> kinds{"default", "zero", "explicit"};
    if (!kinds.count(cfg.init.kind))
      ck.errors.push_back("init.kind: unknown kind '" + cfg.init.kind + "'");
    if (s.contains("value")) {
      if (!s["value"].is_array()) {
        ck.errors.push_back("init.value: expected an array");
      } else {
        for (const auto& v : s["value"]) cfg.init.value.push_back(v.get<double>());
      }
    }
    if (cfg.init.kind == "explicit" && cfg.init.value.empty())
      ck.errors.push_back("init: explicit kind requires 'value'");
  }

  if (doc.contains("output")) {
    const json& o = doc["output"];
    ck.check_keys(o, "output", {"dir", "perf_risk_samples"});
    cfg.output.dir = ck.text(o, "output", "dir", false, "out");
    cfg.output.perf_risk_samples =
        ck.integer(o, "output", "perf_risk_samples", false, 0);
    if (cfg.output.perf_risk_samples < 0)
      ck.errors.push_back("output.perf_risk_samples must be >= 0");
  }

  if (doc.contains("audit")) {
    const json& a = doc["audit"];
    ck.check_keys(a, "audit",
                  {"pairs", "n_samples", "bootstrap", "coordinate", "paired",
                   "pair_scale", "seed"});
    cfg.audit.pairs = ck.integer(a, "audit", "pairs", false, 10);
    cfg.audit.n_samples = ck.integer(a, "audit", "n_samples", false, 100000);
    cfg.audit.bootstrap =
        static_cast<int>(ck.integer(a, "audit", "bootstrap", false, 100));
    cfg.audit.coordinate = ck.integer(a, "audit", "coordinate", false, 0);
    if (a.contains("paired")) {
      if (!a["paired"].is_boolean())
        ck.errors.push_back("audit.paired: expected a boolean");
      else
        cfg.audit.paired = a["paired"].get<bool>();
    }
    cfg.audit.pair_scale = ck.number(a, "audit", "pair_scale", false, 1.0);
    cfg.audit.seed =
        static_cast<std::uint64_t>(ck.integer(a, "audit", "seed", false, 1));
  }

  if (!ck.errors.empty()) throw ConfigError(std::move(ck.errors));
  return cfg;
}
}  // namespace

json ExperimentConfig::to_json() const {
  json doc;
  json e;
  e["kind"] = environment.kind;
  if (environment.kind == "gaussian") {
    e["mu"] = environment.mu;
    e["sigma"] = environment.sigma;
    e["epsilon"] = environment.epsilon;
  } else if (environment.kind == "eta") {
    e["p"] = environment.p;
    e["mu"] = environment.mu;
    e["w"] = environment.w;
    e["epsilon"] = environment.epsilon;
  } else if (environment.kind == "point_mass") {
    e["epsilon"] = environment.epsilon;
    e["beta_c"] = environment.beta_c;
    e["gamma_c"] = environment.gamma_c;
  } else if (environment.kind == "strategic") {
    e["epsilon"] = environment.epsilon;
    e["strategic_dims"] = environment.strategic_dims;
    if (environment.lambda_rule)
      e["lambda"] = "rule_1000_over_n";
    else
      e["lambda"] = environment.lambda;
    json d;
    d["source"] = environment.data.source;
    if (environment.data.source == "synthetic") {
      d["n"] = environment.data.n;
      d["d"] = environment.data.d;
      d["label_balance"] = environment.data.label_balance;
      d["seed"] = environment.data.seed;
    } else {
      d["path"] = environment.data.path;
      d["label_column"] = environment.data.label_column;
      d["row_cap"] = environment.data.row_cap;
      d["shuffle_seed"] = environment.data.shuffle_seed;
    }
    e["data"] = d;
  }
  doc["environment"] = e;

  json a;
  a["name"] = algorithm.name;
  if (algorithm.name == "greedy" || algorithm.name == "lazy") {
    json s;
    s["variant"] = algorithm.step.variant;
    if (algorithm.step.variant == "constant") s["eta"] = algorithm.step.eta;
    if (algorithm.step.variant == "override") {
      if (algorithm.step.c_eta > 0.0) s["c_eta"] = algorithm.step.c_eta;
      if (algorithm.step.k0 >= 0.0) s["k0"] = algorithm.step.k0;
    }
    a["step"] = s;
  }
  if (algorithm.name == "lazy") {
    json d;
    d["n0"] = algorithm.n0;
    d["alpha"] = algorithm.alpha;
    a["deployment"] = d;
  }
  if (algorithm.name == "rgd") {
    if (algorithm.eta_set) a["eta"] = algorithm.eta;
    a["mc_samples"] = algorithm.mc_samples;
  }
  if (algorithm.name == "rrm") a["inner_tol"] = algorithm.inner_tol;
  doc["algorithm"] = a;

  json b;
  if (budget.samples > 0) b["samples"] = budget.samples;
  if (budget.deployments > 0) b["deployments"] = budget.deployments;
  if (budget.steps > 0) b["steps"] = budget.steps;
  if (budget.rounds > 0) b["rounds"] = budget.rounds;
  doc["budget"] = b;

  doc["repeats"] = repeats;
  doc["base_seed"] = base_seed;

  json c;
  c["kind"] = checkpoints.kind;
  if (checkpoints.kind == "geometric")
    c["points"] = checkpoints.points;
  else
    c["values"] = checkpoints.values;
  doc["checkpoints"] = c;

  json sp;
  sp["source"] = stable_point.source;
  if (!stable_point.value.empty()) sp["value"] = stable_point.value;
  sp["tol"] = stable_point.tol;
  doc["stable_point"] = sp;

  json in;
  in["kind"] = init.kind;
  if (!init.value.empty()) in["value"] = init.value;
  doc["init"] = in;

  json o;
  o["dir"] = output.dir;
  o["perf_risk_samples"] = output.perf_risk_samples;
  doc["output"] = o;

  json au;
  au["pairs"] = audit.pairs;
  au["n_samples"] = audit.n_samples;
  au["bootstrap"] = audit.bootstrap;
  au["coordinate"] = audit.coordinate;
  au["paired"] = audit.paired;
  au["pair_scale"] = audit.pair_scale;
  au["seed"] = audit.seed;
  doc["audit"] = au;

  return doc;
}

}  // namespace perfsim
