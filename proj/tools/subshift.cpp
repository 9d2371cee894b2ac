#include <iostream>

#include <CLI11.hpp>

#include "cli/commands.hpp"

using subshift::cli::RunConfig;

int main(int argc, char** argv) {
  CLI::App app{"subshift: aperiodic sequences, sliding block codes and the block-family construction"};
  app.set_config("--config", "", "TOML/INI file with flag defaults");
  app.require_subcommand(1);
  app.fallthrough();

  RunConfig cfg;
  std::size_t j_cap = 0;
  app.add_option("--out", cfg.out, "Output directory")->envname("SUBSHIFT_OUT");
  app.add_option("--threads", cfg.threads, "Worker threads for candidate evaluation")
      ->envname("SUBSHIFT_THREADS")
      ->check(CLI::PositiveNumber);
  app.add_option("--seed", cfg.seed, "Base seed")->envname("SUBSHIFT_SEED");
  app.add_option("--budget-candidates", cfg.budget_candidates,
                 "Largest candidate count evaluated exhaustively")
      ->envname("SUBSHIFT_BUDGET_CANDIDATES")
      ->check(CLI::PositiveNumber);
  app.add_option("--budget-memory-mb", cfg.budget_memory_mb, "Member storage budget per step")
      ->envname("SUBSHIFT_BUDGET_MEMORY_MB")
      ->check(CLI::PositiveNumber);
  app.add_option("--sweep-stride", cfg.sweep_stride, "Stride of the condition (R) sweep (relaxed only)")
      ->envname("SUBSHIFT_SWEEP_STRIDE")
      ->check(CLI::PositiveNumber);
  auto* jcap_opt = app.add_option("--j-cap", j_cap, "Last swept start position (relaxed only)")
                       ->envname("SUBSHIFT_J_CAP")
                       ->check(CLI::PositiveNumber);
  app.add_option("--schedule", cfg.schedule, "Schedule JSON file")->envname("SUBSHIFT_SCHEDULE");
  app.add_option("--sequence", cfg.sequence, "mobius:n | bernoulli:seed:n | file:path")
      ->envname("SUBSHIFT_SEQUENCE");

  auto* seq = app.add_subcommand("sequence", "Generate or load y and write the aperiodicity report");
  std::size_t mobius_n = 0;
  std::string bernoulli, file;
  auto* o_mob = seq->add_option("--mobius", mobius_n, "Mobius function up to n");
  auto* o_ber = seq->add_option("--bernoulli", bernoulli, "seed:n random signs");
  auto* o_file = seq->add_option("--file", file, "One value per line");
  o_mob->excludes(o_ber)->excludes(o_file);
  o_ber->excludes(o_file);
  seq->add_option("--t-max", cfg.t_max, "Largest progression step t")->check(CLI::PositiveNumber);
  seq->add_option("--checkpoints", cfg.checkpoints, "Prefix lengths n to report")->delimiter(',');

  auto* plan = app.add_subcommand("plan", "Certify a schedule and print the per-step table");

  auto* construct = app.add_subcommand("construct", "Build G_1..G_K");
  construct->add_option("--mode", cfg.mode, "exhaustive | sample | auto")
      ->envname("SUBSHIFT_MODE")
      ->check(CLI::IsMember({"exhaustive", "sample", "auto"}));
  construct->add_option("--samples", cfg.samples, "Draws per sampled step")
      ->envname("SUBSHIFT_SAMPLES")
      ->check(CLI::PositiveNumber);
  construct->add_flag("--resume", cfg.resume, "Continue after the last family file in --out");
  construct->add_flag("--timings", cfg.timings, "Record wall time in the report");

  auto* verify = app.add_subcommand("verify", "Re-check built families");
  verify->add_option("families", cfg.families, "Family files, level 1 first (default: --out)");
  verify->add_option("--samples", cfg.verify_samples, "Sampled point prefixes per level")
      ->check(CLI::PositiveNumber);
  verify->add_option("--offsets", cfg.verify_offsets, "Offsets per level")->check(CLI::PositiveNumber);
  verify->add_option("--diag-trials", cfg.diag_trials, "Monte-Carlo trials for diagnostics")
      ->check(CLI::PositiveNumber);
  verify->add_option("--completeness-limit", cfg.completeness_limit,
                     "Largest candidate count re-enumerated for completeness");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return subshift::cli::kUsage;
  }
  if (*jcap_opt) cfg.j_cap = j_cap;

  if (*seq) {
    if (*o_mob) cfg.sequence = "mobius:" + std::to_string(mobius_n);
    else if (*o_ber) cfg.sequence = "bernoulli:" + bernoulli;
    else if (*o_file) cfg.sequence = "file:" + file;
    return subshift::cli::cmd_sequence(cfg, std::cerr);
  }
  if (*plan) return subshift::cli::cmd_plan(cfg, std::cerr);
  if (*construct) return subshift::cli::cmd_construct(cfg, std::cerr);
  return subshift::cli::cmd_verify(cfg, std::cerr);
}
