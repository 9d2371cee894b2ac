#include "cli/commands.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <ostream>
#include <sstream>

#include "subshift/construction.hpp"
#include "subshift/errors.hpp"
#include "subshift/family_io.hpp"
#include "subshift/serialize.hpp"

namespace subshift::cli {

namespace fs = std::filesystem;

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t level_seed(std::uint64_t seed, std::uint64_t k) { return splitmix64(seed ^ splitmix64(k)); }

std::uint64_t parse_u64(std::string_view s, const std::string& what) {
  std::uint64_t v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc{} || ptr != s.data() + s.size()) {
    throw ArgumentError("invalid " + what + " '" + std::string(s) + "'");
  }
  return v;
}

void write_text(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ArgumentError("cannot write " + path.string());
  out << text;
}

void write_json(const fs::path& path, const json& j) { write_text(path, j.dump(2) + "\n"); }

ParamSchedule read_schedule(const fs::path& path) {
  if (path.empty()) throw ConfigError("no schedule file given (--schedule)");
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open schedule file " + path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    throw ConfigError("schedule file " + path.string() + " is not valid JSON");
  }
  return schedule_from_json(j);
}

json provenance_json(const AperiodicSequence& y) {
  return json{{"source", y.provenance().describe()}, {"length", y.length()}};
}

std::vector<fs::path> discover_families(const fs::path& dir) {
  std::vector<fs::path> paths;
  for (std::uint64_t k = 1;; ++k) {
    auto p = family_path(dir, k);
    if (!fs::exists(p)) break;
    paths.push_back(std::move(p));
  }
  return paths;
}

SweepRange sweep_range(const RunConfig& config, const ParamSchedule& sched) {
  if (config.sweep_stride == 0) throw ArgumentError("--sweep-stride must be positive");
  if (sched.mode() == ScheduleMode::strict && (config.sweep_stride != 1 || config.j_cap)) {
    throw ConfigError("strict schedules sweep every start position; drop --sweep-stride/--j-cap");
  }
  return SweepRange{config.sweep_stride, config.j_cap};
}

SweepRange range_from_meta(const BuildMeta& meta) {
  SweepRange r{meta.stride, std::nullopt};
  if (meta.j_capped) r.j_cap = meta.j_max;
  return r;
}

std::vector<std::uint64_t> code_indices(const std::vector<SlidingBlockCode>& F) {
  std::vector<std::uint64_t> out;
  for (const auto& f : F) out.push_back(f.index());
  // horizon-major enumeration: index order is horizon order
  std::sort(out.begin(), out.end());
  return out;
}

StepReport report_from_family(const BlockFamily& fam) {
  StepReport r;
  r.k = fam.level();
  r.m = fam.multiplier();
  r.block_length = fam.block_length();
  r.parent_size = fam.parent()->size();
  r.size = fam.size();
  r.gamma = fam.gamma();
  r.exhaustive = fam.meta().mode == "exhaustive";
  r.log_size = fam.log_size();
  r.entropy_estimate = fam.log_size() / static_cast<double>(fam.block_length());
  return r;
}

// log2 of |G_{k-1}|^m, for budget decisions.
double candidates_log2(const BlockFamily& parent, std::uint64_t m) {
  if (parent.size() == 0) return -INFINITY;
  return static_cast<double>(m) * std::log2(static_cast<double>(parent.size()));
}

template <typename Fn>
int guarded(std::ostream& log, Fn&& fn) {
  try {
    return fn();
  } catch (const IntegrityError& e) {
    log << "integrity error: " << e.what() << '\n';
    return kIntegrity;
  } catch (const SizeError& e) {
    log << "budget exceeded: " << e.what() << '\n'
        << "hint: completed levels are kept; rerun construct with --resume after raising "
           "--budget-candidates, or use --mode sample\n";
    return kBudget;
  } catch (const json::exception& e) {
    log << "invalid input: " << e.what() << '\n';
    return kUsage;
  } catch (const fs::filesystem_error& e) {
    log << "filesystem error: " << e.what() << '\n';
    return kUsage;
  } catch (const std::exception& e) {
    log << "error: " << e.what() << '\n';
    return kUsage;
  }
}

}  // namespace

AperiodicSequence load_sequence_spec(const std::string& spec) {
  if (spec.empty()) throw ArgumentError("no sequence given (mobius:n | bernoulli:seed:n | file:path)");
  const auto colon = spec.find(':');
  const std::string kind = spec.substr(0, colon);
  const std::string rest = colon == std::string::npos ? "" : spec.substr(colon + 1);
  if (kind == "mobius") return mobius_sieve(parse_u64(rest, "sequence length"));
  if (kind == "bernoulli") {
    const auto c2 = rest.find(':');
    if (c2 == std::string::npos) throw ArgumentError("bernoulli spec must be bernoulli:seed:n");
    const auto n = parse_u64(rest.substr(c2 + 1), "sequence length");
    if (n == 0) throw ArgumentError("sequence length must be positive");
    return bernoulli_sequence(parse_u64(rest.substr(0, c2), "seed"), n);
  }
  if (kind == "file") {
    if (rest.empty()) throw ArgumentError("file spec needs a path");
    return load_sequence_file(rest);
  }
  throw ArgumentError("unknown sequence spec '" + spec + "'");
}

int cmd_sequence(const RunConfig& config, std::ostream& log) {
  return guarded(log, [&] {
    const auto y = load_sequence_spec(config.sequence);
    std::vector<std::size_t> checkpoints = config.checkpoints;
    if (checkpoints.empty()) {
      // largest n with n t + l inside the prefix for every t <= t_max
      if (config.t_max == 0 || y.length() < 2 * config.t_max - 1) {
        throw ArgumentError("sequence too short for --t-max " + std::to_string(config.t_max));
      }
      const std::size_t n_max = (y.length() - config.t_max + 1) / config.t_max;
      for (std::size_t n = 10; n < n_max; n *= 10) checkpoints.push_back(n);
      checkpoints.push_back(n_max);
    }
    const auto rows = aperiodicity_report(y, config.t_max, checkpoints);

    fs::create_directories(config.out);
    write_sequence_file(y, config.out / "sequence.txt");

    json seq = provenance_json(y);
    json first = json::array();
    for (std::size_t i = 1; i <= std::min<std::size_t>(10, y.length()); ++i) first.push_back(y[i]);
    seq["first"] = std::move(first);
    seq["prefix_average"] = y.range_sum(1, y.length()) / static_cast<double>(y.length());
    write_json(config.out / "sequence.json", seq);

    json table = json::array();
    std::ostringstream csv;
    csv << "t,l,n,abs_average\n";
    double worst = 0.0;
    for (const auto& r : rows) {
      table.push_back(json{{"t", r.t}, {"l", r.l}, {"n", r.n}, {"abs_average", r.abs_average}});
      csv << r.t << ',' << r.l << ',' << r.n << ',' << r.abs_average << '\n';
      if (r.n == checkpoints.back()) worst = std::max(worst, r.abs_average);
    }
    write_json(config.out / "aperiodicity.json",
               json{{"sequence", seq},
                    {"t_max", config.t_max},
                    {"checkpoints", checkpoints},
                    {"note", "finite-horizon averages only; aperiodicity itself is not decidable"},
                    {"rows", std::move(table)}});
    write_text(config.out / "aperiodicity.csv", csv.str());

    log << y.provenance().describe() << ": " << y.length() << " values, prefix average "
        << seq["prefix_average"].get<double>() << ", max |AP average| at n = " << checkpoints.back()
        << " is " << worst << '\n';
    return static_cast<int>(kOk);
  });
}

int cmd_plan(const RunConfig& config, std::ostream& log) {
  return guarded(log, [&] {
    const auto sched = read_schedule(config.schedule);
    std::optional<AperiodicSequence> y;
    if (!config.sequence.empty()) y = load_sequence_spec(config.sequence);
    const auto plan = make_plan(sched, y ? &*y : nullptr);

    json j = plan_to_json(plan);
    j["schedule"] = schedule_to_json(sched);
    if (y) j["sequence"] = provenance_json(*y);
    fs::create_directories(config.out);
    write_json(config.out / "plan.json", j);
    write_text(config.out / "plan.csv", plan_to_csv(plan));

    log << "schedule: N = " << sched.alphabet_size() << ", M = " << sched.initial_multiplier()
        << ", " << sched.steps() << " steps, final multiplier " << sched.final_multiplier() << '\n';
    log << "entropy floor log N - log 2/(M-1) = " << plan.entropy_floor << '\n';
    if (plan.strict_infeasible) {
      log << "INFEASIBLE: N_k reaches 2^" << plan.max_block_length.log2()
          << "; blocks of this length cannot be constructed\n";
    } else {
      log << "largest block length N_k = " << plan.max_block_length.to_string() << '\n';
    }
    for (const auto& jc : plan.jumps) {
      log << "m = " << jc.m << ": K = " << jc.configured_K << ", condition (b) needs K >= "
          << jc.minimal_K << (jc.b_satisfied ? " [ok]" : " [violated]") << ", condition (a) "
          << to_string(jc.a.status);
      if (!jc.a.reason.empty()) log << " (" << jc.a.reason << ")";
      log << '\n';
    }
    return static_cast<int>(kOk);
  });
}

int cmd_construct(const RunConfig& config, std::ostream& log) {
  return guarded(log, [&] {
    const auto sched = read_schedule(config.schedule);
    if (config.mode != "exhaustive" && config.mode != "sample" && config.mode != "auto") {
      throw ArgumentError("--mode must be exhaustive, sample or auto");
    }
    if (config.threads == 0) throw ArgumentError("--threads must be positive");
    const auto range = sweep_range(config, sched);
    const auto y = load_sequence_spec(config.sequence);
    const Alphabet alphabet(sched.alphabet_size());

    // Fail before any work if y is too short for some step.
    for (std::uint64_t k = 1; k <= sched.steps(); ++k) {
      const auto step = derive_step(sched, k);
      const auto n_k = static_cast<std::size_t>(step.block_length.require_exact("N_k"));
      const auto need = required_prefix(step.m, n_k, range);
      if (y.length() < need) {
        throw ArgumentError("sequence too short: step " + std::to_string(k) + " sweeps windows up to m^2 N_k = " +
                            std::to_string(step.m * step.m * n_k) + " and needs " +
                            std::to_string(need) + " values, have " + std::to_string(y.length()));
      }
    }

    fs::create_directories(config.out);
    std::vector<FamilyPtr> levels{BlockFamily::alphabet_level(alphabet)};
    std::vector<std::string> hashes{alphabet_hash(alphabet)};
    std::vector<StepReport> reports;

    if (config.resume) {
      const auto existing = discover_families(config.out);
      if (!existing.empty()) {
        auto chain = load_family_chain(existing);
        if (chain.levels[0]->alphabet() != alphabet) {
          throw ConfigError("cannot resume: existing families use a different alphabet");
        }
        for (std::size_t k = 1; k < chain.levels.size() && k <= sched.steps(); ++k) {
          const auto& fam = *chain.levels[k];
          const auto step = derive_step(sched, k);
          const auto F = step_codes(step, alphabet.size());
          if (fam.multiplier() != step.m || fam.meta().codes != code_indices(F) ||
              fam.meta().epsilon != step.epsilon || fam.meta().delta != step.delta ||
              fam.meta().stride != range.stride) {
            throw ConfigError("cannot resume: " + existing[k - 1].string() +
                              " was built with different parameters");
          }
          levels.push_back(chain.levels[k]);
          hashes.push_back(chain.hashes[k]);
          reports.push_back(report_from_family(fam));
        }
        log << "resuming after level " << levels.size() - 1 << '\n';
      }
    }

    for (std::uint64_t k = levels.size(); k <= sched.steps(); ++k) {
      const auto& parent = levels.back();
      if (parent->size() == 0) {
        log << "warning: level " << k - 1 << " is empty; stopping\n";
        break;
      }
      const auto step = derive_step(sched, k);
      const auto F = step_codes(step, alphabet.size());
      if (F.empty()) log << "warning: F is empty at step " << k << "; condition (R) is vacuous\n";

      const double cand_log2 = candidates_log2(*parent, step.m);
      const double budget_log2 = std::log2(static_cast<double>(config.budget_candidates));
      BuildMode mode;
      const bool exhaustive =
          config.mode == "exhaustive" || (config.mode == "auto" && cand_log2 <= budget_log2);
      mode.kind = exhaustive ? BuildMode::Kind::exhaustive : BuildMode::Kind::sample;
      mode.samples = config.samples;
      mode.seed = level_seed(config.seed, k);

      // Worst-case member storage: one 4-byte parent index per slot.
      const double stored_log2 =
          (exhaustive ? cand_log2 : std::log2(static_cast<double>(config.samples))) +
          std::log2(static_cast<double>(step.m) * 4.0);
      if (stored_log2 > std::log2(static_cast<double>(config.budget_memory_mb)) + 20.0) {
        throw SizeError("step " + std::to_string(k) + " may store 2^" + std::to_string(stored_log2) +
                        " bytes of members, above --budget-memory-mb");
      }

      BuildOptions options;
      options.sweep = range;
      options.threads = config.threads;
      options.candidate_budget = config.budget_candidates;
      auto result = build_family(parent, step, F, y, mode, options);

      const auto path = family_path(config.out, k);
      hashes.push_back(write_family_file(*result.family, hashes.back(), path));
      levels.push_back(result.family);
      const auto& r = result.report;
      log << "level " << k << ": m = " << r.m << ", N_k = " << r.block_length << ", |G_k| = "
          << r.size << ", gamma = " << r.gamma.value()
          << (r.exhaustive ? " (exact)" : " (estimated)") << '\n';
      if (r.gamma.straddles_half()) {
        log << "warning: gamma interval [" << r.gamma.ci_low << ", " << r.gamma.ci_high
            << "] straddles 1/2\n";
      }
      reports.push_back(std::move(result.report));
    }

    const auto entropy = entropy_series(reports, alphabet.size(), sched.initial_multiplier());
    json steps = json::array();
    for (const auto& r : reports) steps.push_back(step_report_to_json(r, config.timings));
    json files = json::array();
    for (std::size_t k = 1; k < hashes.size(); ++k) {
      files.push_back(json{{"level", k}, {"path", family_path("", k).string()}, {"sha256", hashes[k]}});
    }
    write_json(config.out / "report.json", json{{"schedule", schedule_to_json(sched)},
                                                {"sequence", provenance_json(y)},
                                                {"seed", config.seed},
                                                {"steps", std::move(steps)},
                                                {"entropy", entropy_to_json(entropy)},
                                                {"families", std::move(files)}});
    write_text(config.out / "report.csv", step_reports_to_csv(reports, entropy));
    write_json(config.out / "entropy.json", entropy_to_json(entropy));
    if (!entropy.floor_applicable) log << "note: some gamma < 1/2, the entropy floor does not apply\n";
    return static_cast<int>(kOk);
  });
}

int cmd_verify(const RunConfig& config, std::ostream& log) {
  return guarded(log, [&] {
    const auto sched = read_schedule(config.schedule);
    const auto paths = config.families.empty() ? discover_families(config.out) : config.families;
    if (paths.empty()) throw ArgumentError("no family files found in " + config.out.string());
    const auto chain = load_family_chain(paths);
    const auto y = load_sequence_spec(config.sequence);
    if (chain.levels[0]->alphabet().size() != sched.alphabet_size()) {
      throw ConfigError("family alphabet does not match the schedule");
    }

    bool failed = false;
    json levels_json = json::array();
    for (std::size_t k = 1; k < chain.levels.size(); ++k) {
      const auto& fam = chain.levels[k];
      json lj{{"level", k}, {"size", fam->size()}, {"N_k", fam->block_length()}};
      if (k > sched.steps()) {
        throw ConfigError("family level " + std::to_string(k) + " is beyond the schedule");
      }
      const auto step = derive_step(sched, k);
      const auto F = step_codes(step, sched.alphabet_size());
      const auto& meta = fam->meta();

      std::vector<std::string> mismatches;
      if (fam->multiplier() != step.m) mismatches.push_back("multiplier");
      if (meta.codes != code_indices(F)) mismatches.push_back("codes");
      if (meta.epsilon != step.epsilon) mismatches.push_back("epsilon");
      if (meta.delta != step.delta) mismatches.push_back("delta");
      lj["meta_mismatch"] = mismatches;
      if (!mismatches.empty()) {
        failed = true;
        log << "level " << k << ": build parameters differ from the schedule\n";
      }
      if (F.empty()) {
        log << "warning: F is empty at level " << k << "; the checks pass vacuously\n";
        lj["vacuous"] = true;
      }

      for (std::size_t i = 1; i < fam->size(); ++i) {
        const auto a = fam->member(i - 1), b = fam->member(i);
        if (!std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end())) {
          failed = true;
          lj["unordered_member"] = i;
          log << "level " << k << ": member " << i << " breaks the sorted, duplicate-free order\n";
          break;
        }
      }

      const auto range = range_from_meta(meta);
      const double cand_log2 = candidates_log2(*fam->parent(), fam->multiplier());
      const bool completeness =
          meta.mode == "exhaustive" &&
          cand_log2 <= std::log2(static_cast<double>(config.completeness_limit));
      const auto audit = audit_family(*fam, F, y, range, completeness, config.threads);
      lj["audit"] = audit_to_json(audit);
      for (auto i : audit.unsound) {
        failed = true;
        log << "level " << k << ": member " << i << " fails a fresh condition (R) check\n";
      }
      for (auto c : audit.incomplete) {
        failed = true;
        log << "level " << k << ": candidate " << c << " passes condition (R) but is missing\n";
      }

      // The final bound needs the full sweep and m >= 5.
      std::string skip;
      if (step.m < 5) skip = "bound undefined for m <= 4";
      else if (range.stride != 1 || meta.j_capped) skip = "family built with a partial sweep";
      else if (fam->size() == 0) skip = "empty family";
      if (skip.empty()) {
        UncorrelationOptions uo;
        uo.samples = config.verify_samples;
        uo.seed = level_seed(config.seed ^ 0x5eedULL, k);
        const std::size_t count = std::min(config.verify_offsets, fam->block_length());
        uo.offsets.clear();
        for (std::size_t i = 0; i < count; ++i) uo.offsets.push_back(i * fam->block_length() / count);
        const auto rep = verify_uncorrelation(*fam, step, y, F, uo);
        lj["uncorrelation"] = uncorrelation_to_json(rep);
        for (const auto& v : rep.violations) {
          failed = true;
          log << "level " << k << ": sample " << v.sample << " offset " << v.offset << " code "
              << v.code_index << " n = " << v.n << " has correlation " << v.value
              << " above the bound " << rep.bound << '\n';
          break;
        }
        log << "level " << k << ": max prefix correlation " << rep.max_observed << " <= bound "
            << rep.bound << (rep.violations.empty() ? "" : " VIOLATED") << '\n';
      } else {
        lj["uncorrelation"] = json{{"skipped", skip}};
      }

      if (!F.empty() && fam->size() > 0) {
        try {
          DiagnosticsOptions d;
          d.trials = config.diag_trials;
          d.seed = level_seed(config.seed ^ 0xd1a9ULL, k);
          d.windows = {1, sweep_end(step.m, fam->block_length(), range)};
          const auto diag = diagnostics_lemma(fam->parent(), step, y, F.front(), fam->gamma().value(), d);
          lj["diagnostics"] = diagnostics_to_json(diag);
        } catch (const std::exception& e) {
          lj["diagnostics"] = json{{"skipped", e.what()}};
        }
      }
      log << "level " << k << ": " << audit.members_checked << " members re-checked"
          << (completeness ? ", completeness checked" : "") << '\n';
      levels_json.push_back(std::move(lj));
    }
    fs::create_directories(config.out);
    write_json(config.out / "verify.json", json{{"passed", !failed},
                                                {"hashes", chain.hashes},
                                                {"levels", std::move(levels_json)}});
    log << (failed ? "verification FAILED\n" : "verification passed\n");
    return static_cast<int>(failed ? kVerifyFailed : kOk);
  });
}

}  // namespace subshift::cli
