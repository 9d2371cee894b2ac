#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "subshift/sequences.hpp"

namespace subshift::cli {

enum ExitCode : int {
  kOk = 0,
  kVerifyFailed = 1,
  kUsage = 2,
  kBudget = 3,
  kIntegrity = 4,
};

struct RunConfig {
  std::filesystem::path out = ".";
  std::filesystem::path schedule;
  std::string sequence;  // mobius:n | bernoulli:seed:n | file:path
  unsigned threads = 1;
  std::uint64_t seed = 0;
  std::uint64_t budget_candidates = 10'000'000;
  std::uint64_t budget_memory_mb = 4096;
  std::size_t sweep_stride = 1;
  std::optional<std::size_t> j_cap;
  std::string mode = "auto";  // exhaustive | sample | auto
  std::uint64_t samples = 20'000;
  bool resume = false;
  bool timings = false;

  // sequence
  std::size_t t_max = 8;
  std::vector<std::size_t> checkpoints;

  // verify
  std::vector<std::filesystem::path> families;  // default: family_*.json in out
  std::size_t verify_samples = 100;
  std::size_t verify_offsets = 5;
  std::uint64_t diag_trials = 500;
  std::uint64_t completeness_limit = 1'000'000;
};

AperiodicSequence load_sequence_spec(const std::string& spec);

// Each command maps library errors onto exit codes and never throws.
int cmd_sequence(const RunConfig& config, std::ostream& log);
int cmd_plan(const RunConfig& config, std::ostream& log);
int cmd_construct(const RunConfig& config, std::ostream& log);
int cmd_verify(const RunConfig& config, std::ostream& log);

}  // namespace subshift::cli
