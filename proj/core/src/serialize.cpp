#include "subshift/serialize.hpp"

#include <charconv>
#include <cmath>
#include <set>
#include <sstream>

#include "subshift/errors.hpp"

namespace subshift {

namespace {

std::string num(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

json finite_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

json magnitude_to_json(const Magnitude& m) {
  json j;
  j["log2"] = finite_or_null(m.log2());
  j["exact"] = m.is_exact() ? json(*m.exact_value()) : json(nullptr);
  return j;
}

template <typename T>
T get_field(const json& j, const char* key, const char* what) {
  if (!j.contains(key)) throw ConfigError(std::string(what) + ": missing field '" + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string(what) + ": field '" + key + "' has the wrong type");
  }
}

std::uint64_t parse_key(const std::string& key, const char* what) {
  std::uint64_t v = 0;
  auto [ptr, ec] = std::from_chars(key.data(), key.data() + key.size(), v);
  if (ec != std::errc{} || ptr != key.data() + key.size()) {
    throw ConfigError(std::string(what) + ": key '" + key + "' is not a nonnegative integer");
  }
  return v;
}

StepOverride override_from_json(const json& j) {
  static const std::set<std::string> known = {"epsilon", "delta", "codes", "code_ordinal_max",
                                              "horizon_cap"};
  if (!j.is_object()) throw ConfigError("schedule override must be an object");
  for (const auto& [k, v] : j.items()) {
    if (!known.contains(k)) throw ConfigError("unknown override field '" + k + "'");
  }
  StepOverride o;
  if (j.contains("epsilon")) o.epsilon = get_field<double>(j, "epsilon", "override");
  if (j.contains("delta")) o.delta = get_field<double>(j, "delta", "override");
  if (j.contains("codes")) o.codes = get_field<std::vector<std::uint64_t>>(j, "codes", "override");
  if (j.contains("code_ordinal_max")) {
    o.code_ordinal_max = get_field<std::uint64_t>(j, "code_ordinal_max", "override");
  }
  if (j.contains("horizon_cap")) o.horizon_cap = get_field<double>(j, "horizon_cap", "override");
  return o;
}

json override_to_json(const StepOverride& o) {
  json j = json::object();
  if (o.epsilon) j["epsilon"] = *o.epsilon;
  if (o.delta) j["delta"] = *o.delta;
  if (o.codes) j["codes"] = *o.codes;
  if (o.code_ordinal_max) j["code_ordinal_max"] = *o.code_ordinal_max;
  if (o.horizon_cap) j["horizon_cap"] = *o.horizon_cap;
  return j;
}

}  // namespace

json code_to_json(const SlidingBlockCode& f) {
  json table = json::array();
  for (Sign s : f.table()) table.push_back(static_cast<int>(s));
  json j{{"alphabet", f.alphabet().size()}, {"horizon", f.horizon()}, {"table", std::move(table)}};
  if (f.has_index()) j["index"] = f.index();
  return j;
}

SlidingBlockCode code_from_json(const json& j) {
  try {
    const auto n = j.at("alphabet").get<std::uint32_t>();
    const auto r = j.at("horizon").get<std::size_t>();
    std::vector<Sign> table;
    for (const auto& v : j.at("table")) table.push_back(static_cast<Sign>(v.get<int>()));
    auto f = SlidingBlockCode::from_table(Alphabet(n), r, std::move(table));
    if (f.horizon() != r) throw ArgumentError("code table does not have minimal horizon");
    if (j.contains("index") && (!f.has_index() || j.at("index").get<std::uint64_t>() != f.index())) {
      throw ArgumentError("code index does not match its table");
    }
    return f;
  } catch (const json::exception& e) {
    throw ArgumentError(std::string("malformed code JSON: ") + e.what());
  }
}

json block_to_json(const SymbolBlock& block) {
  if (block.alphabet().size() <= 10) return block_to_string(block);
  json arr = json::array();
  for (Symbol s : block.symbols()) arr.push_back(s);
  return arr;
}

SymbolBlock block_from_json(const json& j, Alphabet alphabet) {
  std::vector<Symbol> symbols;
  if (j.is_string()) {
    if (alphabet.size() > 10) throw ArgumentError("digit-string blocks need N <= 10");
    for (char c : j.get<std::string>()) {
      if (c < '0' || c > '9') throw ArgumentError("block string contains a non-digit");
      symbols.push_back(static_cast<Symbol>(c - '0'));
    }
  } else if (j.is_array()) {
    for (const auto& v : j) symbols.push_back(v.get<Symbol>());
  } else {
    throw ArgumentError("block must be a digit string or an array");
  }
  return SymbolBlock(alphabet, std::move(symbols));
}

json sweep_to_json(const CorrSweepResult& r) {
  return json{{"max_abs", r.max_abs},
              {"argmax_j", r.argmax_j},
              {"values_requested", r.values_requested},
              {"violations", r.violations},
              {"violations_overflow", r.violations_overflow}};
}

ParamSchedule schedule_from_json(const json& j) {
  static const std::set<std::string> known = {"N", "M", "mode", "steps", "jump_steps",
                                              "overrides"};
  if (!j.is_object()) throw ConfigError("schedule must be a JSON object");
  for (const auto& [k, v] : j.items()) {
    if (!known.contains(k)) throw ConfigError("unknown schedule field '" + k + "'");
  }
  const auto n = get_field<std::uint32_t>(j, "N", "schedule");
  const auto M = get_field<std::uint64_t>(j, "M", "schedule");
  const auto mode_s = j.contains("mode") ? get_field<std::string>(j, "mode", "schedule")
                                         : std::string("relaxed");
  ScheduleMode mode;
  if (mode_s == "strict") {
    mode = ScheduleMode::strict;
  } else if (mode_s == "relaxed") {
    mode = ScheduleMode::relaxed;
  } else {
    throw ConfigError("schedule mode must be 'strict' or 'relaxed', got '" + mode_s + "'");
  }
  std::map<std::uint64_t, std::uint64_t> jumps;
  if (j.contains("jump_steps")) {
    const auto& js = j.at("jump_steps");
    if (!js.is_object()) throw ConfigError("jump_steps must be an object {m: K}");
    for (const auto& [k, v] : js.items()) {
      if (!v.is_number_unsigned()) throw ConfigError("jump step K_" + k + " must be a positive integer");
      jumps[parse_key(k, "jump_steps")] = v.get<std::uint64_t>();
    }
  }
  std::uint64_t steps = 1;
  for (const auto& [m, K] : jumps) steps = std::max(steps, K);
  if (j.contains("steps")) steps = get_field<std::uint64_t>(j, "steps", "schedule");
  std::map<std::uint64_t, StepOverride> overrides;
  if (j.contains("overrides")) {
    const auto& os = j.at("overrides");
    if (!os.is_object()) throw ConfigError("overrides must be an object keyed by step or '*'");
    for (const auto& [k, v] : os.items()) {
      const std::uint64_t step = k == "*" ? 0 : parse_key(k, "overrides");
      if (step == 0 && k != "*") throw ConfigError("override step keys start at 1");
      overrides[step] = override_from_json(v);
    }
  }
  return ParamSchedule(n, M, mode, std::move(jumps), steps, std::move(overrides));
}

json schedule_to_json(const ParamSchedule& s) {
  json jumps = json::object();
  for (const auto& [m, K] : s.jump_steps()) jumps[std::to_string(m)] = K;
  json ov = json::object();
  for (const auto& [k, o] : s.overrides()) ov[k == 0 ? "*" : std::to_string(k)] = override_to_json(o);
  return json{{"N", s.alphabet_size()},
              {"M", s.initial_multiplier()},
              {"mode", s.mode() == ScheduleMode::strict ? "strict" : "relaxed"},
              {"steps", s.steps()},
              {"jump_steps", std::move(jumps)},
              {"overrides", std::move(ov)}};
}

json step_params_to_json(const StepParams& s) {
  json codes{{"max_ordinal", s.codes.max_ordinal},
             {"horizon_cap", finite_or_null(s.codes.horizon_cap)}};
  if (s.codes.explicit_indices) codes["explicit"] = *s.codes.explicit_indices;
  return json{{"k", s.k},
              {"m", s.m},
              {"N_k", magnitude_to_json(s.block_length)},
              {"p", s.reference},
              {"N_p", magnitude_to_json(s.reference_length)},
              {"m_ref", s.reference_multiplier},
              {"epsilon", s.epsilon},
              {"delta", s.delta},
              {"threshold", s.threshold()},
              {"alpha_log2", s.alpha_log2},
              {"codes", std::move(codes)},
              {"overridden", s.overridden}};
}

json plan_to_json(const PlanReport& plan) {
  json rows = json::array();
  for (const auto& r : plan.rows) {
    json row = step_params_to_json(r.step);
    row["family_bound"] = r.family_bound;
    row["gamma_lower_bound"] = finite_or_null(r.gamma_bound.value);
    row["gamma_deficit_log2"] = r.gamma_bound.deficit_log2;
    row["gamma_bound_vacuous"] = r.gamma_bound.vacuous;
    rows.push_back(std::move(row));
  }
  json jumps = json::array();
  for (const auto& jc : plan.jumps) {
    json a{{"status", to_string(jc.a.status)}, {"reason", jc.a.reason}};
    if (jc.a.ratio) a["ratio"] = *jc.a.ratio;
    if (jc.a.witness_L) a["witness_L"] = *jc.a.witness_L;
    if (jc.a.failing_offset) a["failing_offset"] = *jc.a.failing_offset;
    if (jc.a.required_length) a["required_length"] = jc.a.required_length;
    jumps.push_back(json{{"m", jc.m},
                         {"K", jc.configured_K},
                         {"condition_b", {{"minimal_K", jc.minimal_K},
                                          {"satisfied", jc.b_satisfied}}},
                         {"condition_a", std::move(a)}});
  }
  return json{{"entropy_floor", plan.entropy_floor},
              {"strict_infeasible", plan.strict_infeasible},
              {"max_N_k", magnitude_to_json(plan.max_block_length)},
              {"steps", std::move(rows)},
              {"jumps", std::move(jumps)}};
}

std::string plan_to_csv(const PlanReport& plan) {
  std::ostringstream os;
  os << "k,m,p,N_k_log2,N_k,epsilon,delta,alpha_log2,family_bound,gamma_lower_bound,vacuous\n";
  for (const auto& r : plan.rows) {
    const auto& s = r.step;
    os << s.k << ',' << s.m << ',' << s.reference << ',' << num(s.block_length.log2()) << ','
       << (s.block_length.is_exact() ? std::to_string(*s.block_length.exact_value()) : "") << ','
       << num(s.epsilon) << ',' << num(s.delta) << ',' << num(s.alpha_log2) << ','
       << r.family_bound << ',' << num(r.gamma_bound.value) << ','
       << (r.gamma_bound.vacuous ? 1 : 0) << '\n';
  }
  return os.str();
}

json gamma_to_json(const GammaRecord& g) {
  return json{{"kind", g.kind == GammaRecord::Kind::exact ? "exact" : "estimate"},
              {"value", g.value()},
              {"passed", g.passed},
              {"trials", g.trials},
              {"ci", {g.ci_low, g.ci_high}}};
}

GammaRecord gamma_from_json(const json& j) {
  GammaRecord g;
  const auto kind = j.at("kind").get<std::string>();
  if (kind == "exact") {
    g.kind = GammaRecord::Kind::exact;
  } else if (kind == "estimate") {
    g.kind = GammaRecord::Kind::estimate;
  } else {
    throw ArgumentError("unknown gamma kind '" + kind + "'");
  }
  g.passed = j.at("passed").get<std::uint64_t>();
  g.trials = j.at("trials").get<std::uint64_t>();
  const auto& ci = j.at("ci");
  g.ci_low = ci.at(0).get<double>();
  g.ci_high = ci.at(1).get<double>();
  return g;
}

json meta_to_json(const BuildMeta& m) {
  return json{{"mode", m.mode},         {"samples", m.samples},     {"seed", m.seed},
              {"codes", m.codes},       {"epsilon", m.epsilon},     {"delta", m.delta},
              {"threshold", m.threshold}, {"j_max", m.j_max},       {"stride", m.stride},
              {"j_capped", m.j_capped}};
}

BuildMeta meta_from_json(const json& j) {
  BuildMeta m;
  m.mode = j.at("mode").get<std::string>();
  m.samples = j.at("samples").get<std::uint64_t>();
  m.seed = j.at("seed").get<std::uint64_t>();
  m.codes = j.at("codes").get<std::vector<std::uint64_t>>();
  m.epsilon = j.at("epsilon").get<double>();
  m.delta = j.at("delta").get<double>();
  m.threshold = j.at("threshold").get<double>();
  m.j_max = j.at("j_max").get<std::size_t>();
  m.stride = j.at("stride").get<std::size_t>();
  m.j_capped = j.at("j_capped").get<bool>();
  return m;
}

json step_report_to_json(const StepReport& r, bool include_timing) {
  json rej = json::object();
  for (const auto& [code, count] : r.rejections_by_code) rej[std::to_string(code)] = count;
  json j{{"k", r.k},
         {"m", r.m},
         {"N_k", r.block_length},
         {"parent_size", r.parent_size},
         {"size", r.size},
         {"gamma", gamma_to_json(r.gamma)},
         {"exhaustive", r.exhaustive},
         {"log_size", finite_or_null(r.log_size)},
         {"entropy_estimate", finite_or_null(r.entropy_estimate)},
         {"rejections_by_code", std::move(rej)}};
  if (include_timing) j["wall_ms"] = r.wall_ms;
  return j;
}

std::string step_reports_to_csv(std::span<const StepReport> reports, const EntropySeries& entropy) {
  std::ostringstream os;
  os << "k,m,N_k,parent_size,size,gamma_kind,gamma,gamma_ci_low,gamma_ci_high,entropy_estimate,"
        "running_entropy\n";
  for (std::size_t i = 0; i < reports.size(); ++i) {
    const auto& r = reports[i];
    os << r.k << ',' << r.m << ',' << r.block_length << ',' << r.parent_size << ',' << r.size
       << ',' << (r.gamma.kind == GammaRecord::Kind::exact ? "exact" : "estimate") << ','
       << num(r.gamma.value()) << ',' << num(r.gamma.ci_low) << ',' << num(r.gamma.ci_high) << ','
       << num(r.entropy_estimate) << ','
       << (i < entropy.running_sum.size() ? num(entropy.running_sum[i]) : "") << '\n';
  }
  return os.str();
}

json entropy_to_json(const EntropySeries& e) {
  json per = json::array();
  for (double v : e.per_step) per.push_back(finite_or_null(v));
  json run = json::array();
  for (double v : e.running_sum) run.push_back(finite_or_null(v));
  return json{{"per_step", std::move(per)},
              {"running_sum", std::move(run)},
              {"floor", e.floor},
              {"floor_applicable", e.floor_applicable}};
}

json audit_to_json(const AuditResult& a) {
  return json{{"members_checked", a.members_checked},
              {"unsound", a.unsound},
              {"completeness_checked", a.completeness_checked},
              {"candidates_checked", a.candidates_checked},
              {"incomplete", a.incomplete}};
}

json diagnostics_to_json(const LemmaDiagnostics& d) {
  json vars = json::array();
  for (const auto& v : d.variances) {
    vars.push_back(json{{"level", v.level},
                        {"measured", v.measured},
                        {"standard_error", v.standard_error},
                        {"exact", v.exact},
                        {"ceiling_recursive", v.ceiling_recursive},
                        {"ceiling_from_parent", v.ceiling_from_parent}});
  }
  return json{
      {"note", "diagnostic, not enforced"},
      {"part_b", {{"expectation", d.expectation},
                  {"standard_error", d.expectation_se},
                  {"window_j", d.expectation_j},
                  {"bound", d.expectation_bound},
                  {"exact", d.expectation_exact},
                  {"within", d.expectation_within}}},
      {"part_a", {{"deficit_sum", d.gamma_deficit_sum},
                  {"bound", d.gamma_deficit_bound},
                  {"holds", d.part_a_holds}}},
      {"part_c", {{"gamma_measured", d.gamma_measured ? json(*d.gamma_measured) : json(nullptr)},
                  {"lower_bound", finite_or_null(d.gamma_bound.value)},
                  {"deficit_log2", d.gamma_bound.deficit_log2},
                  {"vacuous", d.gamma_bound.vacuous},
                  {"holds", d.part_c_holds}}},
      {"variances", std::move(vars)}};
}

json uncorrelation_to_json(const UncorrelationReport& r, std::size_t violation_cap) {
  json v = json::array();
  for (std::size_t i = 0; i < r.violations.size() && i < violation_cap; ++i) {
    const auto& x = r.violations[i];
    v.push_back(json{{"sample", x.sample},
                     {"offset", x.offset},
                     {"code", x.code_index},
                     {"n", x.n},
                     {"value", x.value}});
  }
  return json{{"bound", r.bound},
              {"max_observed", r.max_observed},
              {"checks", r.checks},
              {"violation_count", r.violations.size()},
              {"violations", std::move(v)},
              {"violations_overflow", r.violations.size() > violation_cap}};
}

}  // namespace subshift
