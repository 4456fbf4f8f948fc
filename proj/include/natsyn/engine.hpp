/*
 * Copyright 2026 The natsyn Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

/*!
  \file engine.hpp
  \brief Counterexample-guided synthesis, parameterized synthesis and the
         natural-language workflows.
*/

#pragma once

#include <natsyn/backend.hpp>
#include <natsyn/ltl.hpp>
#include <natsyn/tlsf.hpp>
#include <natsyn/toolchain.hpp>
#include <natsyn/verilog.hpp>

#include <chrono>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace natsyn::engine
{

enum class Status
{
  Solved,
  Unsolved,
  Error,
};

std::string_view status_name( Status s ); // "solved" / "unsolved" / "error"

/// Pipeline stage an iteration stopped at.
enum class Stage
{
  None,      // reached a verdict
  Parse,     // specification
  Backend,
  Extract,
  Lint,
  Translate,
  Check,
  Deadline,
};

std::string_view stage_name( Stage s );

struct TokenTotals
{
  std::uint64_t reasoning = 0;
  std::uint64_t output = 0;

  TokenTotals& operator+=( TokenTotals const& o )
  {
    reasoning += o.reasoning;
    output += o.output;
    return *this;
  }
  friend bool operator==( TokenTotals const&, TokenTotals const& ) = default;
};

/// One prompt, one response and the checks of the returned module.
struct Iteration
{
  unsigned index = 0;
  backend::PromptKind prompt_kind = backend::PromptKind::Synthesis;
  std::string prompt_hash; // content_hash of the prompt text
  TokenTotals tokens;
  double latency_seconds = 0.0;
  std::optional<verilog::Role> role; // claimed by the module name
  std::string module_source;
  /// "realizable" or "unrealizable"; empty when no decomposition was chosen.
  std::string decomposition;
  std::vector<ltl::Formula> subproperties;
  std::vector<toolchain::CheckVerdict> verdicts; // parallel to subproperties
  Stage stopped_at = Stage::None;
  std::string detail;   // diagnostic for a stopped iteration
  std::string feedback; // sent with the next prompt; empty for the last iteration
  std::optional<std::int64_t> parameter_value; // first failing value, parameterized runs
  std::vector<std::int64_t> values_passed;     // parameterized runs
};

struct Outcome
{
  Status status = Status::Error;
  std::optional<verilog::Role> role;
  unsigned iterations_used = 0; // repair prompts sent
  std::vector<Iteration> iterations; // iterations_used + 1 entries unless the run errored first
  std::optional<verilog::VerilogModule> final_module;
  TokenTotals tokens;
  Stage error_stage = Stage::None;
  std::string detail;
  /// The claimed role contradicts the expected realizability.
  bool role_mismatch = false;
  double wall_seconds = 0.0;
};

struct ParamOutcome
{
  Outcome outcome;
  std::string parameter;             // the swept parameter
  std::vector<std::int64_t> values;  // ascending
  std::vector<std::int64_t> tested;  // values checked on the final iteration, in order
  std::optional<std::int64_t> first_failing;
  /// Always true: passing values say nothing about untested ones.
  bool verified_per_instance_only = true;
  static constexpr std::string_view soundness = "verified-per-instance, not universally";
};

struct AutoformalizationAttempt
{
  std::string response;
  std::string spec_text; // contents of the tlsf fence, or the whole response
  bool parsed = false;
  std::string diagnostic;
  TokenTotals tokens;
};

struct Autoformalization
{
  std::vector<AutoformalizationAttempt> attempts;
  /// Text of the first attempt; used for synthesis whether or not it parses.
  std::string first_text;
  /// First attempt that parsed; the verification target.
  std::optional<std::string> repaired_text;
  bool parseable() const { return repaired_text.has_value(); }
};

enum class Route
{
  ViaAutoformalization,
  Direct,
};

std::string_view route_name( Route r ); // "natural-auto" / "natural-direct"

/// Verification of one module against one specification.
struct TargetVerdict
{
  enum class Kind
  {
    Pass,
    Fail,
    Unavailable, // target did not parse or no module exists
    Error,
  };
  Kind kind = Kind::Unavailable;
  std::vector<toolchain::CheckVerdict> verdicts;
  std::string detail;
};

std::string_view kind_name( TargetVerdict::Kind k ); // "pass" / "fail" / "unavailable" / "error"

struct NaturalOutcome
{
  Route route = Route::ViaAutoformalization;
  Autoformalization autoformalization;
  std::optional<toolchain::Equivalence> equivalence; // ground truth vs autoformalized
  Outcome synthesis;
  TargetVerdict against_ground_truth;
  TargetVerdict against_autoformalized;
};

/// Bound precondition violations (empty value list, unordered values).
struct PreconditionError : std::invalid_argument
{
  using std::invalid_argument::invalid_argument;
};

// ---- feedback ----------------------------------------------------------------------

/// One section per Fail verdict, in subproperty order: the subformula in
/// TLSF expression syntax, a step table over the trace atoms with the first
/// loop row marked "loop", and, for a G-rooted consequent, the first step
/// at which its body fails. Throws std::invalid_argument without a Fail.
std::string format_feedback( std::vector<ltl::Formula> const& subproperties,
                             std::vector<toolchain::CheckVerdict> const& verdicts, ltl::LtlProblem const& problem );

/// The step table alone.
std::string format_trace_table( ltl::LassoTrace const& trace );

// ---- parameterized wrapper ------------------------------------------------------------

/// Renames the module to `<name>_impl` and appends a top-level module with
/// the original name whose ports follow `problem` (swapped for an environment)
/// and which instantiates the renamed module with `parameter` bound to
/// `value`.
std::string wrap_parameterized( verilog::VerilogModule const& m, ltl::LtlProblem const& problem,
                                std::string const& parameter, std::int64_t value );

// ---- the engine ---------------------------------------------------------------------

struct EngineOptions
{
  toolchain::CheckOptions check;
  toolchain::ToolLimits translate_limits;
  std::chrono::duration<double> instance_ceiling{ 3600.0 };
  /// Per-run diagnostics (role mismatches, skipped stages).
  std::function<void( std::string_view )> log;
};

struct InstanceHints
{
  /// From dataset metadata; a contradicting claimed role is logged, not fatal.
  std::optional<verilog::Role> expected_role;
};

class Engine
{
public:
  Engine( backend::Backend& backend, toolchain::Toolchain const& tools, EngineOptions options = {} );

  /// `spec_text` is stripped of metadata before prompting.
  Outcome run_instance( std::string_view spec_text, backend::ReasoningLevel level, unsigned cex_budget,
                        InstanceHints const& hints = {} );

  /// Sweeps the first declared parameter over `values`. Throws
  /// PreconditionError for an empty or non-ascending list.
  ParamOutcome run_parameterized( std::string_view spec_text, std::vector<std::int64_t> const& values,
                                  backend::ReasoningLevel level, unsigned cex_budget,
                                  InstanceHints const& hints = {} );

  Autoformalization autoformalize( std::string_view nl_text, backend::ReasoningLevel level,
                                   unsigned max_attempts = 3 );

  NaturalOutcome run_natural( std::string_view nl_text, std::string_view ground_truth_spec,
                              backend::ReasoningLevel level, Route route, unsigned cex_budget,
                              InstanceHints const& hints = {} );

  /// Checks `m` against `problem` using the decomposition of its role.
  TargetVerdict verify_against( verilog::VerilogModule const& m, ltl::LtlProblem const& problem ) const;

private:
  backend::Backend& backend_;
  toolchain::Toolchain const& tools_;
  EngineOptions options_;

  struct Loop;
  void note( std::string const& message ) const;
};

} // namespace natsyn::engine
