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
  \file verilog.hpp
  \brief Shallow handling of generated Verilog and the built-in AIGER
         verification oracle.
*/

#pragma once

#include <natsyn/ltl.hpp>

#include <chrono>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace natsyn::verilog
{

enum class Role
{
  Solution,
  Environment,
};

std::string_view role_name( Role r ); // "solution" / "environment"

enum class Direction
{
  Input,
  Output,
};

struct Port
{
  Direction direction = Direction::Input;
  std::string name;
  std::string range;                // "[26:0]" as written, empty for scalars
  std::optional<std::int64_t> width; // evaluated under parameter defaults
};

struct ModuleParameter
{
  std::string name;
  std::string default_value;
};

struct VerilogModule
{
  std::string source; // the fenced block's contents
  std::string name;
  Role role = Role::Solution;
  std::vector<Port> ports;
  bool has_clk = false;
  std::vector<ModuleParameter> parameters;

  Port const* find_port( std::string_view name ) const;
};

/// Base of the extraction failures; what() is phrased as feedback for the
/// synthesizer.
struct ExtractionError : std::runtime_error
{
  using std::runtime_error::runtime_error;
};

struct NoCodeBlock : ExtractionError
{
  using ExtractionError::ExtractionError;
};

struct BadModuleName : ExtractionError
{
  using ExtractionError::ExtractionError;
};

struct MissingClock : ExtractionError
{
  using ExtractionError::ExtractionError;
};

/// Takes the first ```verilog fenced block of a response.
VerilogModule extract_verilog( std::string_view response );

/// Reads the top module (named solution or environment) of plain source.
VerilogModule parse_module( std::string_view source );

enum class IssueKind
{
  MissingPort,
  ExtraPort,
  WrongDirection,
  RoleMismatch,
  WidthMismatch,
};

struct PortIssue
{
  IssueKind kind;
  std::string port;
  std::string detail;
};

std::string describe( PortIssue const& issue );

/// Solution ports mirror the problem's signals; environment ports swap
/// inputs and outputs. clk is exempt.
std::vector<PortIssue> lint_ports( VerilogModule const& m, ltl::LtlProblem const& p );

// ---- AIGER -------------------------------------------------------------------

struct AigerError : std::runtime_error
{
  using std::runtime_error::runtime_error;
};

struct HeaderMismatch : AigerError
{
  using AigerError::AigerError;
};

struct OddVariableLiteral : AigerError
{
  using AigerError::AigerError;
};

struct DanglingLiteral : AigerError
{
  using AigerError::AigerError;
};

struct Latch
{
  unsigned lit = 0;
  unsigned next = 0;
  unsigned reset = 0; // literal 0 or 1
};

struct AndGate
{
  unsigned lhs = 0;
  unsigned rhs0 = 0;
  unsigned rhs1 = 0;
};

struct AigerCircuit
{
  unsigned max_var = 0;
  std::vector<unsigned> inputs;
  std::vector<Latch> latches;
  std::vector<unsigned> outputs;
  std::vector<AndGate> ands; // topologically sorted
  std::vector<std::string> input_names;  // empty string when unnamed
  std::vector<std::string> latch_names;
  std::vector<std::string> output_names;
  std::vector<std::string> comments;

  /// Symbol with `x[k]` rewritten to `x_k`; `i<k>`/`o<k>` when unnamed.
  std::string input_atom( std::size_t k ) const;
  std::string output_atom( std::size_t k ) const;
};

/// ASCII AIGER only; the binary format is rejected.
AigerCircuit parse_aiger( std::string_view text );
std::string render_aiger( AigerCircuit const& c );

/// `x[k]` -> `x_k`; other names unchanged.
std::string normalize_symbol( std::string_view name );

struct Step
{
  std::vector<bool> inputs;
  std::vector<bool> latches; // state before the step
  std::vector<bool> outputs;

  friend bool operator==( Step const&, Step const& ) = default;
};

/// One Step per valuation; latches start at their reset values.
std::vector<Step> simulate( AigerCircuit const& c, std::vector<std::vector<bool>> const& inputs );

/// One step from an arbitrary latch state; returns the successor state.
std::vector<bool> step_from( AigerCircuit const& c, std::vector<bool> const& state, std::vector<bool> const& inputs,
                             Step& out );

/// True iff driving the circuit with the trace's input atoms produces the
/// trace's output atoms at every position of the infinite word.
bool replays( AigerCircuit const& c, ltl::LassoTrace const& trace );

struct FalsifyOptions
{
  std::uint64_t state_input_budget = 1u << 12; // bound on 2^(latches + inputs)
  std::size_t product_cap = 1u << 20;          // explored product nodes
  std::optional<std::chrono::steady_clock::time_point> deadline;
  /// Atom order of returned traces; defaults to circuit inputs then outputs.
  std::vector<std::string> atoms;
};

struct FalsifyResult
{
  enum class Status
  {
    Fail,
    NoneFound,
  };
  Status status = Status::NoneFound;
  std::optional<ltl::LassoTrace> trace;
  /// NoneFound is a proof only when the whole reachable product was covered.
  bool complete = false;
  std::size_t product_nodes = 0;
};

/// Searches the circuit for a run violating f. Returned traces use the
/// shortest stem and loop that describe the violating word and have been
/// checked with replays() and eval_lasso().
FalsifyResult falsify_small( AigerCircuit const& c, ltl::Formula const& f, FalsifyOptions const& options = {} );

} // namespace natsyn::verilog
