// frl: command-line front end for the experiment pipeline.

#include <CLI11.hpp>

#include <iostream>
#include <optional>
#include <string>

#include "frl/expcli/commands.hpp"
#include "frl/kernels.hpp"

namespace {

using frl::expcli::ExperimentConfig;

struct Overrides {
  std::string config_path;
  std::optional<double> alpha;
  std::optional<int> d;
  std::optional<double> p;
  std::optional<int> depth;
  std::optional<std::int64_t> n1;
  std::optional<double> c0;
  std::optional<std::uint64_t> seed;
  std::optional<std::int64_t> node_budget;
  std::optional<std::string> output_dir;
  std::optional<int> threads;
  std::optional<double> constant_cap;
  std::optional<std::int64_t> modulus;
  std::optional<std::int64_t> target_size;
  std::optional<double> r_max;
  std::optional<double> restrict_c0;
};

void add_common(CLI::App* cmd, Overrides& o) {
  cmd->add_option("-c,--config", o.config_path, "TOML or JSON config file");
  cmd->add_option("--alpha", o.alpha, "target dimension");
  cmd->add_option("--d", o.d, "ambient dimension (1-3)");
  cmd->add_option("--p", o.p, "exponent (default 2d/alpha)");
  cmd->add_option("--depth", o.depth, "stage depth k");
  cmd->add_option("--n1", o.n1, "first modulus n_1");
  cmd->add_option("--c0", o.c0, "plan constant c0");
  cmd->add_option("--seed", o.seed, "master seed (overrides FRL_SEED)");
  cmd->add_option("--node-budget", o.node_budget, "maximum T_j");
  cmd->add_option("-o,--output-dir", o.output_dir, "output directory");
  cmd->add_option("--threads", o.threads, "cap on worker threads (0: runtime default)");
}

ExperimentConfig resolve(const Overrides& o) {
  ExperimentConfig c = o.config_path.empty() ? ExperimentConfig{}
                                             : frl::expcli::load_config_file(o.config_path);
  frl::expcli::apply_environment(c);
  if (o.alpha) c.alpha = *o.alpha;
  if (o.d) c.d = *o.d;
  if (o.p) c.p = *o.p;
  if (o.depth) c.depth = *o.depth;
  if (o.n1) c.n1 = *o.n1;
  if (o.c0) c.c0 = *o.c0;
  if (o.seed) c.seed = *o.seed;
  if (o.node_budget) c.node_budget = *o.node_budget;
  if (o.output_dir) c.output_dir = *o.output_dir;
  if (o.threads) c.threads = *o.threads;
  if (o.constant_cap) c.constant_cap = *o.constant_cap;
  if (o.modulus) c.search_modulus = *o.modulus;
  if (o.target_size) c.search_target_size = *o.target_size;
  if (o.r_max) c.r_max = *o.r_max;
  if (o.restrict_c0) c.restrict_c0 = *o.restrict_c0;
  frl::expcli::validate(c);
  return c;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Fourier restriction experiments on random Cantor measures"};
  app.require_subcommand(1);
  app.set_version_flag("--version", frl::expcli::code_version());
  Overrides o;
  std::string alphabets_path;
  std::string stage_path;

  auto* search = app.add_subcommand("search-alphabet", "search Lambda(p) sets for every level");
  add_common(search, o);
  search->add_option("--constant-cap", o.constant_cap, "largest accepted Lambda(p) constant");
  search->add_option("--modulus", o.modulus, "search one set in [modulus]^d instead of the plan");
  search->add_option("--target-size", o.target_size, "size of the standalone set");

  auto* build = app.add_subcommand("build", "build the depth-k stage");
  add_common(build, o);
  build->add_option("--alphabets", alphabets_path, "alphabet file (default <output-dir>/alphabets.json)");

  auto* decay = app.add_subcommand("decay", "sample sup |mu^| over frequency annuli");
  add_common(decay, o);
  decay->add_option("--stage", stage_path, "stage file (default <output-dir>/stage.json)");
  decay->add_option("--r-max", o.r_max, "largest frequency radius");

  auto* restrict_cmd = app.add_subcommand("restrict", "localized restriction ratios for k' = 0..k");
  add_common(restrict_cmd, o);
  restrict_cmd->add_option("--stage", stage_path, "stage file (default <output-dir>/stage.json)");
  restrict_cmd->add_option("--C0", o.restrict_c0, "constant in the reference bound");

  auto* sharp = app.add_subcommand("sharpness", "growth of ||mu^||_p over [-R, R]^d");
  add_common(sharp, o);
  sharp->add_option("--stage", stage_path, "stage file (default <output-dir>/stage.json)");

  auto* ternary = app.add_subcommand("compare-ternary", "ternary measure against random translates");
  add_common(ternary, o);

  auto* run = app.add_subcommand("run", "run the configured experiment list and write a manifest");
  add_common(run, o);

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return frl::expcli::kExitValidation;
  }

  namespace ex = frl::expcli;
  try {
    const ExperimentConfig config = resolve(o);
    frl::kernels::set_thread_count(config.threads);
    const double critical = 2.0 * config.d / config.alpha;
    if (config.p && *config.p < critical - 1e-12 && !restrict_cmd->parsed()) {
      std::cerr << "warning: p = " << *config.p << " is below 2d/alpha = " << critical << "\n";
    }
    const auto stage_file = stage_path.empty() ? ex::output_path(config, "stage.json") : stage_path;
    ex::CommandOutput out;
    if (search->parsed()) {
      out = ex::cmd_search_alphabet(config, std::cout);
    } else if (build->parsed()) {
      out = ex::cmd_build(config,
                          alphabets_path.empty() ? ex::output_path(config, "alphabets.json")
                                                 : alphabets_path,
                          std::cout);
    } else if (decay->parsed()) {
      out = ex::cmd_decay(config, stage_file, std::cout);
    } else if (restrict_cmd->parsed()) {
      out = ex::cmd_restrict(config, stage_file, std::cout);
    } else if (sharp->parsed()) {
      out = ex::cmd_sharpness(config, stage_file, std::cout);
    } else if (ternary->parsed()) {
      out = ex::cmd_compare_ternary(config, std::cout);
    } else {
      return ex::cmd_run(config, std::cout);
    }
    for (const auto& f : out.outputs) std::cout << "wrote " << f << "\n";
    return out.exit_code;
  } catch (const frl::ValidationError& e) {
    std::cerr << "validation error: " << e.what() << "\n";
    return ex::kExitValidation;
  } catch (const frl::BudgetError& e) {
    std::cerr << "budget exceeded: " << e.what() << "\n";
    return ex::kExitBudget;
  } catch (const frl::SearchError& e) {
    std::cerr << "search failed: " << e.what() << "\n";
    return ex::kExitSearch;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
