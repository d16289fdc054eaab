#include "config.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace mesharc::cli {

using nlohmann::json;

namespace {

const json* member(const json& obj, const char* key) {
  auto it = obj.find(key);
  return it == obj.end() ? nullptr : &*it;
}

void expect_object(const json& j, const std::string& path) {
  if (!j.is_object()) throw ConfigError(path, "expected an object");
}

double get_number(const json& j, const std::string& path) {
  if (!j.is_number()) throw ConfigError(path, "expected a number");
  return j.get<double>();
}

int get_int(const json& j, const std::string& path) {
  if (!j.is_number_integer()) throw ConfigError(path, "expected an integer");
  return j.get<int>();
}

std::string get_string(const json& j, const std::string& path) {
  if (!j.is_string()) throw ConfigError(path, "expected a string");
  return j.get<std::string>();
}

void reject_unknown(const json& obj, const std::string& path,
                    std::initializer_list<const char*> known) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    const bool ok = std::any_of(known.begin(), known.end(),
                                [&](const char* k) { return it.key() == k; });
    if (!ok) throw ConfigError(path.empty() ? it.key() : path + "." + it.key(), "unknown field");
  }
}

std::size_t line_of(const std::string& text, std::size_t byte) {
  byte = std::min(byte, text.size());
  return 1 + static_cast<std::size_t>(std::count(text.begin(), text.begin() + static_cast<long>(byte), '\n'));
}

}  // namespace

RunConfig parse_config_text(const std::string& text) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError("line " + std::to_string(line_of(text, e.byte)), "malformed JSON");
  }
  expect_object(root, "config");
  reject_unknown(root, "",
                 {"problem", "kernel", "normalization", "levels", "mu", "c", "nested",
                  "nitsche", "quadrature", "condition_numbers", "angles", "output"});

  RunConfig cfg;
  if (auto p = member(root, "problem")) {
    cfg.problem = get_string(*p, "problem");
    try {
      (void)problem_by_name(cfg.problem);
    } catch (const std::invalid_argument& e) {
      throw ConfigError("problem", e.what());
    }
  }

  if (auto k = member(root, "kernel")) {
    expect_object(*k, "kernel");
    reject_unknown(*k, "kernel", {"family", "k"});
    if (auto f = member(*k, "family"); f && get_string(*f, "kernel.family") != "wendland")
      throw ConfigError("kernel.family", "only 'wendland' is supported");
    if (auto kk = member(*k, "k")) {
      cfg.kernel_k = get_int(*kk, "kernel.k");
      if (cfg.kernel_k != 1 && cfg.kernel_k != 3)
        throw ConfigError("kernel.k", "expected 1 (C2) or 3 (C6)");
    }
  }

  if (auto n = member(root, "normalization")) {
    try {
      cfg.normalization = normalization_from_string(get_string(*n, "normalization"));
    } catch (const std::invalid_argument& e) {
      throw ConfigError("normalization", e.what());
    }
  }

  const json* lv = member(root, "levels");
  if (!lv) throw ConfigError("levels", "missing");
  if (lv->is_array()) {
    for (std::size_t i = 0; i < lv->size(); ++i) {
      const std::string path = "levels[" + std::to_string(i) + "]";
      const json& e = (*lv)[i];
      expect_object(e, path);
      reject_unknown(e, path, {"grid_m", "delta"});
      const json* m = member(e, "grid_m");
      const json* d = member(e, "delta");
      if (!m) throw ConfigError(path + ".grid_m", "missing");
      if (!d) throw ConfigError(path + ".delta", "missing");
      LevelEntry L{get_int(*m, path + ".grid_m"), get_number(*d, path + ".delta")};
      if (L.grid_m < 2) throw ConfigError(path + ".grid_m", "must be at least 2");
      if (!(L.delta > 0.0)) throw ConfigError(path + ".delta", "must be positive");
      cfg.levels.push_back(L);
    }
  } else if (lv->is_object()) {
    reject_unknown(*lv, "levels", {"m0", "n_levels", "nu"});
    GeneratedLevels g;
    const json* m0 = member(*lv, "m0");
    const json* nl = member(*lv, "n_levels");
    const json* nu = member(*lv, "nu");
    if (!m0) throw ConfigError("levels.m0", "missing");
    if (!nl) throw ConfigError("levels.n_levels", "missing");
    if (!nu) throw ConfigError("levels.nu", "missing");
    g.m0 = get_int(*m0, "levels.m0");
    g.n_levels = get_int(*nl, "levels.n_levels");
    g.nu = get_number(*nu, "levels.nu");
    if (g.m0 < 2) throw ConfigError("levels.m0", "must be at least 2");
    if (g.n_levels < 0) throw ConfigError("levels.n_levels", "must not be negative");
    if (!(g.nu > 0.0)) throw ConfigError("levels.nu", "must be positive");
    cfg.generated = g;
  } else {
    throw ConfigError("levels", "expected a list of {grid_m, delta} or {m0, n_levels, nu}");
  }

  if (auto m = member(root, "mu")) {
    cfg.mu = get_number(*m, "mu");
    if (!(cfg.mu > 0.0 && cfg.mu < 1.0)) throw ConfigError("mu", "must lie in (0, 1)");
  }
  if (auto c = member(root, "c")) {
    cfg.c = get_number(*c, "c");
    if (!(cfg.c > 0.0 && cfg.c <= 1.0)) throw ConfigError("c", "must lie in (0, 1]");
  }

  if (auto n = member(root, "nested")) {
    expect_object(*n, "nested");
    reject_unknown(*n, "nested", {"K", "n"});
    NestedConfig nc;
    const json* K = member(*n, "K");
    const json* nn = member(*n, "n");
    if (!K) throw ConfigError("nested.K", "missing");
    if (!nn) throw ConfigError("nested.n", "missing");
    nc.K = get_int(*K, "nested.K");
    nc.n = get_int(*nn, "nested.n");
    if (nc.K < 0) throw ConfigError("nested.K", "must be >= 0");
    if (nc.n < 1) throw ConfigError("nested.n", "must be >= 1");
    cfg.nested = nc;
  }

  if (auto n = member(root, "nitsche")) {
    expect_object(*n, "nitsche");
    reject_unknown(*n, "nitsche", {"safety", "mode", "beta"});
    if (auto s = member(*n, "safety")) {
      cfg.nitsche_safety = get_number(*s, "nitsche.safety");
      if (!(cfg.nitsche_safety > 1.0)) throw ConfigError("nitsche.safety", "must exceed 1");
    }
    if (auto m = member(*n, "mode")) {
      try {
        cfg.nitsche_mode = beta_mode_from_string(get_string(*m, "nitsche.mode"));
      } catch (const std::invalid_argument& e) {
        throw ConfigError("nitsche.mode", e.what());
      }
    }
    if (auto b = member(*n, "beta")) {
      cfg.nitsche_beta = get_number(*b, "nitsche.beta");
      if (!(*cfg.nitsche_beta > 0.0)) throw ConfigError("nitsche.beta", "must be positive");
    }
  }

  if (auto q = member(root, "quadrature")) {
    expect_object(*q, "quadrature");
    reject_unknown(*q, "quadrature", {"order", "subdiv", "tol", "max_refinements", "lobatto_n"});
    if (auto v = member(*q, "order")) cfg.quadrature.order = get_int(*v, "quadrature.order");
    if (auto v = member(*q, "subdiv")) cfg.quadrature.subdiv = get_int(*v, "quadrature.subdiv");
    if (auto v = member(*q, "tol")) cfg.quadrature.tol = get_number(*v, "quadrature.tol");
    if (auto v = member(*q, "max_refinements"))
      cfg.quadrature.max_refinements = get_int(*v, "quadrature.max_refinements");
    if (auto v = member(*q, "lobatto_n")) cfg.lobatto_n = get_int(*v, "quadrature.lobatto_n");
    try {
      cfg.quadrature.validate();
    } catch (const std::invalid_argument& e) {
      throw ConfigError("quadrature", e.what());
    }
    if (cfg.lobatto_n < 2) throw ConfigError("quadrature.lobatto_n", "must be at least 2");
  }

  if (auto c = member(root, "condition_numbers")) {
    if (!c->is_boolean()) throw ConfigError("condition_numbers", "expected true or false");
    cfg.condition_numbers = c->get<bool>();
  }

  if (auto a = member(root, "angles")) {
    expect_object(*a, "angles");
    reject_unknown(*a, "angles", {"inner_product"});
    if (auto ip = member(*a, "inner_product")) {
      try {
        cfg.inner_product = inner_product_from_string(get_string(*ip, "angles.inner_product"));
      } catch (const std::invalid_argument& e) {
        throw ConfigError("angles.inner_product", e.what());
      }
    }
  }

  if (auto o = member(root, "output")) cfg.output = get_string(*o, "output");
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path, "cannot open config file");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str());
}

void validate_levels(const RunConfig& cfg, bool require_monotone) {
  const std::size_t n =
      cfg.generated ? static_cast<std::size_t>(cfg.generated->n_levels) : cfg.levels.size();
  if (n == 0) throw ConfigError("levels", "at least one level is required");
  if (!require_monotone || cfg.generated) return;
  for (std::size_t i = 1; i < cfg.levels.size(); ++i) {
    const std::string path = "levels[" + std::to_string(i) + "]";
    if (!(cfg.levels[i].delta < cfg.levels[i - 1].delta))
      throw ConfigError(path + ".delta", "supports must decrease from level to level");
    if (!(cfg.levels[i].grid_m > cfg.levels[i - 1].grid_m))
      throw ConfigError(path + ".grid_m", "grids must grow from level to level");
  }
}

LevelSchedule build_schedule(const RunConfig& cfg, const RectDomain& domain) {
  if (cfg.generated)
    return schedule_generated(domain, cfg.generated->m0, cfg.generated->n_levels,
                              cfg.generated->nu);
  std::vector<int> m;
  std::vector<double> d;
  for (const auto& L : cfg.levels) {
    m.push_back(L.grid_m);
    d.push_back(L.delta);
  }
  return schedule_from_grids(domain, m, d, cfg.mu, cfg.c);
}

SolverOptions build_options(const RunConfig& cfg) {
  SolverOptions o;
  o.kernel = WendlandKernel::from_smoothness(cfg.kernel_k);
  o.normalization = cfg.normalization;
  o.quadrature = cfg.quadrature;
  o.lobatto_n = cfg.lobatto_n;
  o.compute_condition = cfg.condition_numbers;
  return o;
}

}  // namespace mesharc::cli
