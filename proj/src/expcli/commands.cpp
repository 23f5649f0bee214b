#include "frl/expcli/commands.hpp"

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <numbers>
#include <sstream>

#include "frl/extension.hpp"
#include "frl/spectral.hpp"

namespace frl::expcli {

namespace {

namespace fs = std::filesystem;

constexpr std::uint64_t kSearchStream = 0x5ea7c4;
constexpr std::uint64_t kDecayStream = 0xdeca;
constexpr std::uint64_t kRestrictStream = 0x7e57;
constexpr std::uint64_t kTernaryStream = 0x7e3a;

void write_text(const std::string& path, const std::string& text) {
  const fs::path parent = fs::path(path).parent_path();
  if (!parent.empty()) fs::create_directories(parent);
  std::ofstream out(path, std::ios::binary);
  require(static_cast<bool>(out), "cannot write " + path);
  out << text;
  require(static_cast<bool>(out), "write failed: " + path);
}

void write_json(const std::string& path, const Json& doc) { write_text(path, doc.dump(2) + "\n"); }

Json read_json(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  require(static_cast<bool>(in), "cannot read " + path);
  try {
    return Json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ValidationError("malformed JSON in " + path + ": " + e.what());
  }
}

std::string csv_preamble(const std::string& hash) {
  std::ostringstream out;
  out << "# frl-csv v" << kCsvVersion << " config_hash=" << hash << "\n";
  return out.str();
}

std::string fmt(double v) {
  std::ostringstream out;
  out << std::setprecision(17) << v;
  return out.str();
}

SearchBudget search_budget(const ExperimentConfig& c) {
  SearchBudget budget;
  budget.max_swaps = c.max_swaps;
  budget.certify.quadrature = {c.quad_rel_tol, c.quad_max_points};
  return budget;
}

void check_construction(const ExperimentConfig& config, const Json& doc, const std::string& path) {
  const std::string expected = construction_hash(config);
  const std::string found = doc.value("construction_hash", std::string());
  if (found != expected) {
    throw ValidationError(path + " was produced by a different configuration (construction hash " +
                          (found.empty() ? std::string("missing") : found.substr(0, 12)) +
                          ", expected " + expected.substr(0, 12) + ")");
  }
}

std::vector<Alphabet> load_alphabets_checked(const ExperimentConfig& config, const std::string& path,
                                             const SequencePlan& plan) {
  const Json doc = read_json(path);
  require(doc.value("format", std::string()) == "alphabet-set", path + " is not an alphabet set");
  check_construction(config, doc, path);
  require(plan_from_json(doc.at("plan")) == plan, path + " was searched for a different plan");
  std::vector<Alphabet> sets;
  for (const auto& level : doc.at("levels")) sets.push_back(alphabet_from_json(level.at("alphabet")));
  require(static_cast<int>(sets.size()) >= config.depth, path + " has too few levels");
  return sets;
}

}  // namespace

std::string output_path(const ExperimentConfig& config, const std::string& name) {
  return (fs::path(config.output_dir) / name).string();
}

CommandOutput cmd_search_alphabet(const ExperimentConfig& config, std::ostream& log) {
  validate(config);
  const SequencePlan plan = config.plan();
  const std::string hash = config_hash(config);
  CommandOutput result;

  struct Job {
    std::int64_t modulus;
    std::int64_t size;
  };
  std::vector<Job> jobs;
  const bool standalone = config.search_modulus.has_value();
  if (standalone) {
    jobs.push_back({*config.search_modulus, *config.search_target_size});
  } else {
    for (int j = 0; j < plan.depth(); ++j) jobs.push_back({plan.n_seq[j], plan.t_seq[j]});
  }

  Json levels = Json::array();
  bool all_within = true;
  for (std::size_t j = 0; j < jobs.size(); ++j) {
    require(jobs[j].size <= ipow(jobs[j].modulus, config.d), "search target_size exceeds modulus^d");
    const auto found = search_lambda_p_set(jobs[j].modulus, config.d, plan.p, jobs[j].size,
                                           config.constant_cap, derive_seed(config.seed, kSearchStream + j),
                                           search_budget(config));
    all_within = all_within && found.within_cap;
    log << "level " << j + 1 << ": n=" << jobs[j].modulus << " t=" << jobs[j].size
        << " constant=" << found.certificate.constant_lower
        << (found.within_cap ? "" : " (exceeds cap)") << "\n";
    levels.push_back({{"alphabet", alphabet_to_json(found.alphabet)},
                      {"certificate", certificate_to_json(found.certificate)},
                      {"within_cap", found.within_cap},
                      {"swaps_tried", found.swaps_tried}});
  }

  const std::string path = output_path(config, "alphabets.json");
  write_json(path, {{"format", "alphabet-set"},
                    {"format_version", kFormatVersion},
                    {"config_hash", hash},
                    {"construction_hash", construction_hash(config)},
                    {"standalone", standalone},
                    {"plan", plan_to_json(plan)},
                    {"levels", levels}});
  result.outputs.push_back(path);
  if (!all_within) {
    log << "error: no set within constant_cap " << config.constant_cap
        << " was found; best effort written to " << path << "\n";
    result.exit_code = kExitSearch;
  }
  return result;
}

CommandOutput cmd_build(const ExperimentConfig& config, const std::string& alphabets_path,
                        std::ostream& log) {
  validate(config);
  const SequencePlan plan = config.plan();
  const auto sets = load_alphabets_checked(config, alphabets_path, plan);
  BuildOptions options;
  options.seed = config.seed;
  options.node_budget = config.node_budget;
  const CantorStage stage = build_stage(plan, sets, config.depth, options);

  log << "depth " << stage.depth() << ": N_k = " << stage.scale(stage.depth())
      << ", T_k = " << stage.count(stage.depth()) << "\n";
  bool sandwich = true;
  for (int j = 0; j <= stage.depth(); ++j) {
    const double size = std::pow(static_cast<double>(stage.scale(j)), plan.alpha);
    const double lower = std::pow(plan.c0_realized, j) * size;
    const double upper = std::pow(plan.c1, j) * size;
    const double t = static_cast<double>(stage.count(j));
    const bool ok = lower <= t * (1 + 1e-12) && t <= upper * (1 + 1e-12);
    sandwich = sandwich && ok;
    log << "  j=" << j << " N=" << stage.scale(j) << " T=" << stage.count(j) << "  " << lower
        << " <= T <= " << upper << (ok ? "" : "  VIOLATED") << "\n";
  }
  log << "sandwich c0^j N_j^alpha <= T_j <= c1^j N_j^alpha with c0 = " << plan.c0_realized
      << ", c1 = " << plan.c1 << ": " << (sandwich ? "holds" : "fails") << "\n";

  Json doc = stage_to_json(stage, config_hash(config));
  doc["construction_hash"] = construction_hash(config);
  const std::string path = output_path(config, "stage.json");
  write_json(path, doc);
  return {kExitOk, {alphabets_path}, {path}};
}

CantorStage load_stage_checked(const ExperimentConfig& config, const std::string& path) {
  const Json doc = read_json(path);
  check_construction(config, doc, path);
  CantorStage stage = stage_from_json(doc, config.node_budget);
  require(stage.depth() == config.depth, path + " has a different depth than the config");
  return stage;
}

CommandOutput cmd_decay(const ExperimentConfig& config, const std::string& stage_path,
                        std::ostream& log) {
  validate(config);
  const CantorStage stage = load_stage_checked(config, stage_path);
  const double r_max =
      config.r_max.value_or(std::max(16.0, static_cast<double>(stage.scale(stage.depth()))));
  const SpectralProfile profile =
      decay_profile(stage, r_max, config.per_annulus, derive_seed(config.seed, kDecayStream));
  const std::string hash = config_hash(config);

  const std::string csv_path = output_path(config, "decay.csv");
  const std::string json_path = output_path(config, "decay.json");
  write_text(csv_path, csv_preamble(hash) + profile_csv(profile));
  Json header = profile_header(profile);
  header["format"] = "decay-profile";
  header["format_version"] = kFormatVersion;
  header["config_hash"] = hash;
  header["alpha"] = config.alpha;
  header["depth"] = stage.depth();
  header["r_max"] = r_max;
  write_json(json_path, header);

  log << "fitted beta = " << profile.fitted_beta << " over [" << profile.fit_min << ", "
      << profile.fit_max << "] (" << profile.fit_points << " annuli, rms residual "
      << profile.residual << ")\n";
  CommandOutput result{kExitOk, {stage_path}, {csv_path, json_path}};
  if (config.alpha >= 0.2 && stage.depth() >= 2 && profile.fitted_beta <= 0.0) {
    log << "error: no decay detected (fitted beta <= 0)\n";
    result.exit_code = kExitCheckFailed;
  }
  return result;
}

CommandOutput cmd_restrict(const ExperimentConfig& config, const std::string& stage_path,
                           std::ostream& log) {
  validate(config);
  const CantorStage stage = load_stage_checked(config, stage_path);
  const double p = config.exponent();
  const double critical = 2.0 * config.d / config.alpha;
  if (p < critical - 1e-12) {
    log << "warning: p = " << p << " is below 2d/alpha = " << critical
        << "; the estimate is not expected to hold there\n";
  }
  RestrictionOptions options;
  options.spacing = config.extension_spacing;
  options.power_iterations = config.power_iterations;
  options.seed = derive_seed(config.seed, kRestrictStream);
  options.c0 = config.restrict_c0 ? *config.restrict_c0
                                  : default_restriction_c0(stage, p, options.seed);
  log << "C0 = " << *options.c0 << "\n";

  const std::string hash = config_hash(config);
  std::ostringstream table, growth;
  table << csv_preamble(hash) << "k,p,strategy,measured_ratio,paper_bound,ratio_over_bound\n";
  growth << csv_preamble(hash) << "k,strategy,normalized_ratio,growth_factor\n";
  std::map<GKind, double> previous;
  for (int k = 0; k <= stage.depth(); ++k) {
    const CantorStage sub = stage.truncated(k);
    for (const auto& r : restriction_report(sub, p, options)) {
      table << k << "," << fmt(p) << "," << to_string(r.g_kind) << "," << fmt(r.measured_ratio)
            << "," << fmt(r.paper_bound) << "," << fmt(r.measured_ratio / r.paper_bound) << "\n";
      const double factor = k == 0 ? 1.0 : r.normalized_ratio / previous[r.g_kind];
      previous[r.g_kind] = r.normalized_ratio;
      growth << k << "," << to_string(r.g_kind) << "," << fmt(r.normalized_ratio) << ","
             << fmt(factor) << "\n";
      log << "k=" << k << " " << std::setw(18) << std::left << to_string(r.g_kind) << std::right
          << " ratio=" << r.measured_ratio << " bound=" << r.paper_bound
          << " growth=" << factor << "\n";
    }
  }
  const std::string table_path = output_path(config, "restrict.csv");
  const std::string growth_path = output_path(config, "restrict_growth.csv");
  write_text(table_path, table.str());
  write_text(growth_path, growth.str());
  return {kExitOk, {stage_path}, {table_path, growth_path}};
}

std::vector<double> sharpness_slopes(const CantorStage& stage, const std::vector<double>& exponents,
                                     const std::vector<double>& radii) {
  std::vector<double> slopes;
  for (const double q : exponents) {
    const auto norms = lp_growth_of_muhat(stage, q, radii);
    slopes.push_back(loglog_slope(radii, norms));
  }
  return slopes;
}

CommandOutput cmd_sharpness(const ExperimentConfig& config, const std::string& stage_path,
                            std::ostream& log) {
  validate(config);
  const CantorStage stage = load_stage_checked(config, stage_path);
  const std::string hash = config_hash(config);
  const auto exponents = config.sharpness_exponents();
  std::ostringstream csv;
  csv << csv_preamble(hash) << "p,radius,lp_norm\n";
  Json slopes = Json::array();
  for (const double q : exponents) {
    const auto norms = lp_growth_of_muhat(stage, q, config.radii);
    for (std::size_t i = 0; i < norms.size(); ++i) {
      csv << fmt(q) << "," << fmt(config.radii[i]) << "," << fmt(norms[i]) << "\n";
    }
    const double slope = loglog_slope(config.radii, norms);
    slopes.push_back({{"p", q}, {"slope", slope}});
    log << "p=" << q << " slope=" << slope << "\n";
  }
  const std::string csv_path = output_path(config, "sharpness.csv");
  const std::string json_path = output_path(config, "sharpness.json");
  write_text(csv_path, csv.str());
  write_json(json_path, {{"format", "sharpness"},
                         {"format_version", kFormatVersion},
                         {"config_hash", hash},
                         {"critical_p", 2.0 * config.d / config.alpha},
                         {"radii", config.radii},
                         {"slopes", slopes}});
  return {kExitOk, {stage_path}, {csv_path, json_path}};
}

TernaryComparison compare_ternary(int depth, std::uint64_t seed,
                                  const std::vector<double>& exponents,
                                  const std::vector<double>& radii) {
  require(depth >= 1, "compare-ternary needs depth >= 1");
  TernaryComparison out;
  out.alpha = std::numbers::ln2 / std::log(3.0);
  out.exponents = exponents;
  const SequencePlan plan = plan_from_sequences(1, out.alpha, std::vector<std::int64_t>(depth, 3),
                                                std::vector<std::int64_t>(depth, 2));
  const std::vector<Alphabet> sets(depth, Alphabet(1, 3, {{0}, {2}}));

  BuildOptions ternary;
  ternary.translations = TranslationMode::kZero;
  BuildOptions random;
  random.seed = derive_seed(seed, kTernaryStream);
  out.ternary_slopes = sharpness_slopes(build_stage(plan, sets, depth, ternary), exponents, radii);
  out.random_slopes = sharpness_slopes(build_stage(plan, sets, depth, random), exponents, radii);
  return out;
}

CommandOutput cmd_compare_ternary(const ExperimentConfig& config, std::ostream& log) {
  validate(config);
  const std::vector<double> exponents =
      config.sharpness_p.empty() ? std::vector<double>{3.0, 6.0} : config.sharpness_p;
  const auto cmp = compare_ternary(std::max(config.depth, 1), config.seed, exponents, config.radii);
  const std::string hash = config_hash(config);

  std::ostringstream csv;
  csv << csv_preamble(hash) << "branch,alpha,p,slope\n";
  Json rows = Json::array();
  log << "alpha (ternary) = " << cmp.alpha << ", alpha (random) = " << cmp.alpha << "\n";
  for (std::size_t i = 0; i < exponents.size(); ++i) {
    csv << "ternary," << fmt(cmp.alpha) << "," << fmt(exponents[i]) << ","
        << fmt(cmp.ternary_slopes[i]) << "\n";
    csv << "random," << fmt(cmp.alpha) << "," << fmt(exponents[i]) << ","
        << fmt(cmp.random_slopes[i]) << "\n";
    rows.push_back({{"p", exponents[i]},
                    {"ternary_slope", cmp.ternary_slopes[i]},
                    {"random_slope", cmp.random_slopes[i]}});
    log << "p=" << exponents[i] << " ternary slope=" << cmp.ternary_slopes[i]
        << " random slope=" << cmp.random_slopes[i]
        << " difference=" << cmp.ternary_slopes[i] - cmp.random_slopes[i] << "\n";
  }
  const std::string csv_path = output_path(config, "ternary.csv");
  const std::string json_path = output_path(config, "ternary.json");
  write_text(csv_path, csv.str());
  write_json(json_path, {{"format", "ternary-comparison"},
                         {"format_version", kFormatVersion},
                         {"config_hash", hash},
                         {"depth", std::max(config.depth, 1)},
                         {"alpha_ternary", cmp.alpha},
                         {"alpha_random", cmp.alpha},
                         {"radii", config.radii},
                         {"slopes", rows}});
  return {kExitOk, {}, {csv_path, json_path}};
}

int cmd_run(const ExperimentConfig& config, std::ostream& log) {
  validate(config);
  RunManifest manifest;
  manifest.config_hash = config_hash(config);
  manifest.code_version = code_version();
  const std::string alphabets = output_path(config, "alphabets.json");
  const std::string stage = output_path(config, "stage.json");
  write_json(output_path(config, "config.json"), config_to_json(config));

  int status = kExitOk;
  for (const auto& name : config.experiments) {
    log << "== " << name << "\n";
    const auto start = std::chrono::steady_clock::now();
    CommandOutput out;
    try {
      if (name == "search-alphabet") {
        out = cmd_search_alphabet(config, log);
      } else if (name == "build") {
        out = cmd_build(config, alphabets, log);
      } else if (name == "decay") {
        out = cmd_decay(config, stage, log);
      } else if (name == "restrict") {
        out = cmd_restrict(config, stage, log);
      } else if (name == "sharpness") {
        out = cmd_sharpness(config, stage, log);
      } else {
        out = cmd_compare_ternary(config, log);
      }
    } catch (...) {
      manifest.experiments.push_back({name, {}, {}, 0.0, -1});
      write_json(output_path(config, "manifest.json"), manifest.to_json());
      throw;
    }
    const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - start;
    ExperimentRecord record;
    record.name = name;
    record.seconds = elapsed.count();
    record.exit_code = out.exit_code;
    for (const auto& f : out.inputs) record.inputs[fs::path(f).filename().string()] = file_digest(f);
    for (const auto& f : out.outputs) {
      record.outputs[fs::path(f).filename().string()] = file_digest(f);
    }
    manifest.experiments.push_back(record);
    if (out.exit_code != kExitOk) {
      status = out.exit_code;
      break;
    }
  }
  write_json(output_path(config, "manifest.json"), manifest.to_json());
  return status;
}

}  // namespace frl::expcli
