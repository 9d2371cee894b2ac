#pragma once

#include <span>
#include <string>

#include <nlohmann/json.hpp>

#include "subshift/codes.hpp"
#include "subshift/construction.hpp"
#include "subshift/correlation.hpp"
#include "subshift/schedule.hpp"

namespace subshift {

using json = nlohmann::json;

// {alphabet, horizon, table: [±1...], index}
json code_to_json(const SlidingBlockCode& f);
SlidingBlockCode code_from_json(const json& j);

// Digit string for N <= 10, JSON array otherwise.
json block_to_json(const SymbolBlock& block);
SymbolBlock block_from_json(const json& j, Alphabet alphabet);

json sweep_to_json(const CorrSweepResult& r);

// {N, M, mode, steps, jump_steps: {"m": K}, overrides: {"*" | "k": {...}}}
ParamSchedule schedule_from_json(const json& j);
json schedule_to_json(const ParamSchedule& s);

json step_params_to_json(const StepParams& s);
json plan_to_json(const PlanReport& plan);
std::string plan_to_csv(const PlanReport& plan);

json gamma_to_json(const GammaRecord& g);
GammaRecord gamma_from_json(const json& j);
json meta_to_json(const BuildMeta& m);
BuildMeta meta_from_json(const json& j);

json step_report_to_json(const StepReport& r, bool include_timing);
std::string step_reports_to_csv(std::span<const StepReport> reports, const EntropySeries& entropy);
json entropy_to_json(const EntropySeries& e);

json audit_to_json(const AuditResult& a);
json diagnostics_to_json(const LemmaDiagnostics& d);
json uncorrelation_to_json(const UncorrelationReport& r, std::size_t violation_cap = 100);

}  // namespace subshift
