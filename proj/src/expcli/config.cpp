#include "frl/expcli/config.hpp"

#include <toml.hpp>

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace frl::expcli {

namespace {

template <class T>
void read(const Json& table, const char* key, T& out) {
  if (!table.contains(key)) return;
  try {
    out = table.at(key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("config field ") + key + ": " + e.what());
  }
}

template <class T>
void read(const Json& table, const char* key, std::optional<T>& out) {
  if (!table.contains(key)) return;
  T value{};
  read(table, key, value);
  out = value;
}

const Json& section(const Json& doc, const char* name) {
  static const Json empty = Json::object();
  if (!doc.contains(name)) return empty;
  require(doc.at(name).is_object(), std::string("config section [") + name + "] must be a table");
  return doc.at(name);
}

void check_keys(const Json& table, std::initializer_list<const char*> allowed, const char* where) {
  for (const auto& [key, value] : table.items()) {
    const bool known = std::any_of(allowed.begin(), allowed.end(),
                                   [&](const char* a) { return key == a; });
    require(known, std::string("unknown config key '") + key + "' in " + where);
  }
}

template <class T>
Json optional_json(const std::optional<T>& v) {
  return v ? Json(*v) : Json(nullptr);
}

}  // namespace

std::vector<double> ExperimentConfig::sharpness_exponents() const {
  if (!sharpness_p.empty()) return sharpness_p;
  const double critical = 2.0 * d / alpha;
  return {critical - 1.0, critical + 1.0};
}

SequencePlan ExperimentConfig::plan() const {
  // depth 0 still needs one plan level to define the plan; stages may stop short.
  return make_sequence_plan(alpha, d, n1, std::max(depth, 1), c0);
}

void validate(const ExperimentConfig& c) {
  require(c.d >= 1 && c.d <= kMaxDim, "d must lie in [1, 3]");
  require(c.alpha > 0.0 && c.alpha < c.d, "alpha must lie in (0, d)");
  require(c.exponent() > 2.0, "p must exceed 2");
  require(c.depth >= 0, "depth must be >= 0");
  require(c.n1 >= 2, "n1 must be >= 2");
  require(c.c0 > 0.0, "c0 must be positive");
  require(c.node_budget >= 1, "node_budget must be positive");
  require(c.threads >= 0, "threads must be >= 0");
  require(c.quad_rel_tol > 0.0, "quadrature rel_tol must be positive");
  require(c.quad_max_points > 0, "quadrature max_points must be positive");
  require(c.extension_spacing > 0.0 && c.extension_spacing <= 0.5,
          "extension_spacing must lie in (0, 1/2]");
  require(c.constant_cap > 1.0, "search constant_cap must exceed 1");
  require(c.max_swaps >= 0, "search max_swaps must be >= 0");
  require(!c.search_modulus || *c.search_modulus >= 1, "search modulus must be positive");
  require(!c.search_target_size || *c.search_target_size >= 1, "search target_size must be positive");
  require(c.search_modulus.has_value() == c.search_target_size.has_value(),
          "search modulus and target_size must be given together");
  require(!c.r_max || *c.r_max >= 4.0, "decay r_max must be >= 4");
  require(c.per_annulus >= 16, "decay per_annulus must be >= 16");
  require(!c.restrict_c0 || *c.restrict_c0 > 0.0, "restrict c0 must be positive");
  require(c.power_iterations >= 0, "restrict power_iterations must be >= 0");
  for (const double q : c.sharpness_exponents()) require(q >= 1.0, "sharpness exponents must be >= 1");
  require(!c.radii.empty(), "sharpness radii must be nonempty");
  for (std::size_t i = 0; i < c.radii.size(); ++i) {
    require(c.radii[i] > 0.0 && (i == 0 || c.radii[i] > c.radii[i - 1]),
            "sharpness radii must be positive and increasing");
  }
  for (const auto& e : c.experiments) {
    const auto& known = known_experiments();
    require(std::find(known.begin(), known.end(), e) != known.end(), "unknown experiment: " + e);
  }
}

ExperimentConfig config_from_json(const Json& doc) {
  require(doc.is_object(), "config must be a table");
  check_keys(doc,
             {"alpha", "d", "p", "depth", "n1", "c0", "seed", "node_budget", "output_dir",
              "experiments", "threads", "quadrature", "search", "decay", "restrict", "sharpness"},
             "top level");
  ExperimentConfig c;
  read(doc, "alpha", c.alpha);
  read(doc, "d", c.d);
  read(doc, "p", c.p);
  read(doc, "depth", c.depth);
  read(doc, "n1", c.n1);
  read(doc, "c0", c.c0);
  read(doc, "seed", c.seed);
  read(doc, "node_budget", c.node_budget);
  read(doc, "output_dir", c.output_dir);
  read(doc, "experiments", c.experiments);
  read(doc, "threads", c.threads);

  const Json& quad = section(doc, "quadrature");
  check_keys(quad, {"rel_tol", "max_points", "extension_spacing"}, "[quadrature]");
  read(quad, "rel_tol", c.quad_rel_tol);
  read(quad, "max_points", c.quad_max_points);
  read(quad, "extension_spacing", c.extension_spacing);

  const Json& search = section(doc, "search");
  check_keys(search, {"constant_cap", "max_swaps", "modulus", "target_size"}, "[search]");
  read(search, "constant_cap", c.constant_cap);
  read(search, "max_swaps", c.max_swaps);
  read(search, "modulus", c.search_modulus);
  read(search, "target_size", c.search_target_size);

  const Json& decay = section(doc, "decay");
  check_keys(decay, {"r_max", "per_annulus"}, "[decay]");
  read(decay, "r_max", c.r_max);
  read(decay, "per_annulus", c.per_annulus);

  const Json& restrict_ = section(doc, "restrict");
  check_keys(restrict_, {"c0", "power_iterations"}, "[restrict]");
  read(restrict_, "c0", c.restrict_c0);
  read(restrict_, "power_iterations", c.power_iterations);

  const Json& sharp = section(doc, "sharpness");
  check_keys(sharp, {"p_list", "radii"}, "[sharpness]");
  read(sharp, "p_list", c.sharpness_p);
  read(sharp, "radii", c.radii);
  return c;
}

Json config_to_json(const ExperimentConfig& c) {
  return {{"alpha", c.alpha},
          {"d", c.d},
          {"p", c.exponent()},
          {"depth", c.depth},
          {"n1", c.n1},
          {"c0", c.c0},
          {"seed", c.seed},
          {"node_budget", c.node_budget},
          {"output_dir", c.output_dir},
          {"experiments", c.experiments},
          {"threads", c.threads},
          {"quadrature",
           {{"rel_tol", c.quad_rel_tol},
            {"max_points", c.quad_max_points},
            {"extension_spacing", c.extension_spacing}}},
          {"search",
           {{"constant_cap", c.constant_cap},
            {"max_swaps", c.max_swaps},
            {"modulus", optional_json(c.search_modulus)},
            {"target_size", optional_json(c.search_target_size)}}},
          {"decay", {{"r_max", optional_json(c.r_max)}, {"per_annulus", c.per_annulus}}},
          {"restrict",
           {{"c0", optional_json(c.restrict_c0)}, {"power_iterations", c.power_iterations}}},
          {"sharpness", {{"p_list", c.sharpness_exponents()}, {"radii", c.radii}}}};
}

Json toml_to_json(const std::string& text) {
  toml::table table;
  try {
    table = toml::parse(text);
  } catch (const toml::parse_error& e) {
    std::ostringstream msg;
    msg << "TOML parse error: " << e.description() << " at line " << e.source().begin.line;
    throw ValidationError(msg.str());
  }
  std::ostringstream out;
  out << toml::json_formatter{table};
  return Json::parse(out.str());
}

ExperimentConfig load_config_file(const std::string& path) {
  std::ifstream in(path);
  require(static_cast<bool>(in), "cannot read config file " + path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  const std::string text = buffer.str();
  const bool json = path.size() >= 5 && path.compare(path.size() - 5, 5, ".json") == 0;
  Json doc;
  if (json) {
    try {
      doc = Json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
      throw ValidationError(std::string("JSON parse error: ") + e.what());
    }
  } else {
    doc = toml_to_json(text);
  }
  // Null entries (e.g. "r_max": null in a written-back config) mean "unset".
  auto strip = [](auto&& self, Json& j) -> void {
    if (!j.is_object()) return;
    for (auto it = j.begin(); it != j.end();) {
      if (it->is_null()) {
        it = j.erase(it);
      } else {
        self(self, *it);
        ++it;
      }
    }
  };
  strip(strip, doc);
  return config_from_json(doc);
}

void apply_environment(ExperimentConfig& config) {
  if (const char* env = std::getenv("FRL_SEED"); env != nullptr && *env != '\0') {
    char* end = nullptr;
    const unsigned long long seed = std::strtoull(env, &end, 10);
    require(end != nullptr && *end == '\0', std::string("FRL_SEED is not an integer: ") + env);
    config.seed = seed;
  }
}

std::string config_hash(const ExperimentConfig& config) {
  Json doc = config_to_json(config);
  doc.erase("output_dir");
  doc.erase("threads");
  return sha256_hex(doc.dump());
}

std::string construction_hash(const ExperimentConfig& config) {
  const Json doc = {{"alpha", config.alpha},
                    {"d", config.d},
                    {"depth", config.depth},
                    {"n1", config.n1},
                    {"c0", config.c0},
                    {"seed", config.seed},
                    {"quadrature_rel_tol", config.quad_rel_tol},
                    {"quadrature_max_points", config.quad_max_points},
                    {"constant_cap", config.constant_cap},
                    {"max_swaps", config.max_swaps},
                    {"search_modulus", optional_json(config.search_modulus)},
                    {"search_target_size", optional_json(config.search_target_size)}};
  return sha256_hex(doc.dump());
}

}  // namespace frl::expcli
