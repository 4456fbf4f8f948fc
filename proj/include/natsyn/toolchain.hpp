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
  \file toolchain.hpp
  \brief Subprocess drivers for the synthesis tool, the AIGER-to-SMV
         translator, the SMV model checker and the LTL filter.
*/

#pragma once

#include <natsyn/ltl.hpp>
#include <natsyn/verilog.hpp>

#include <chrono>
#include <condition_variable>
#include <cstdint>
#include <filesystem>
#include <map>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace natsyn::toolchain
{

struct ToolLimits
{
  std::chrono::duration<double> wall_timeout{ 600.0 };
  std::uint64_t memory_cap = std::uint64_t{ 32 } << 30; // bytes of address space

  static ToolLimits checking() { return {}; }
  static ToolLimits equivalence() { return { std::chrono::duration<double>( 1800.0 ) }; }
};

struct ToolReport
{
  std::string tool;
  std::vector<std::string> argv;
  int exit_status = -1; // -1 when killed by a signal
  int signal = 0;
  bool timed_out = false;
  std::string out;
  std::string err;
  double wall_seconds = 0.0;
};

struct ToolMissing : std::runtime_error
{
  explicit ToolMissing( std::string executable );
  std::string executable;
};

struct ToolFailed : std::runtime_error
{
  explicit ToolFailed( ToolReport report );
  ToolReport report;
};

struct ToolTimeout : std::runtime_error
{
  explicit ToolTimeout( ToolReport report );
  ToolReport report;
};

/// Runs argv[0] (searched on PATH when it has no slash) in its own process
/// group under `limits`. The group is killed at the deadline. Throws
/// ToolMissing when the executable cannot be started; never throws on a
/// nonzero exit.
ToolReport run_process( std::vector<std::string> const& argv, std::string const& stdin_text, ToolLimits const& limits,
                        std::filesystem::path const& cwd = {} );

// ---- scripts -------------------------------------------------------------------

/// Verilog to ASCII AIGER; writes `circuit.aag` in the working directory.
std::string yosys_script( std::string_view module_name );
std::string nuxmv_script();

// ---- model checker output ----------------------------------------------------------

struct SmvState
{
  std::map<std::string, std::string> assignments; // as printed, this state only
};

struct SmvCounterexample
{
  std::vector<SmvState> states;
  std::optional<std::size_t> loop_start; // index into states
};

struct SmvOutput
{
  enum class Verdict
  {
    True,
    False,
    Unknown,
  };
  Verdict verdict = Verdict::Unknown;
  std::optional<SmvCounterexample> counterexample;
};

/// Reads the first LTL verdict and its counterexample listing.
SmvOutput parse_nuxmv_output( std::string_view text );

/// Lasso over `atoms` from a sparse listing: unchanged variables keep their
/// previous value. SMV names are mapped through verilog::normalize_symbol.
/// Returns the candidate shapes in preference order: the loop as listed, then
/// the loop with a trailing copy of its first state removed.
std::vector<ltl::LassoTrace> counterexample_lassos( SmvCounterexample const& cex,
                                                    std::vector<std::string> const& atoms );

// ---- verdicts ----------------------------------------------------------------------

struct CheckVerdict
{
  enum class Kind
  {
    Pass,
    Fail,
    Timeout,
    ToolError,
  };
  Kind kind = Kind::ToolError;
  std::optional<ltl::LassoTrace> trace; // Fail only; validated against the circuit
  std::string checker;                  // "nuxmv" or "builtin"
  std::string detail;
  std::vector<ToolReport> reports;
};

std::string_view kind_name( CheckVerdict::Kind k ); // "pass" / "fail" / "timeout" / "tool-error"

struct Equivalence
{
  enum class Kind
  {
    Equivalent,
    Inequivalent,
    Unknown, // bounded search found no witness
    Timeout,
    ToolMissing,
  };
  Kind kind = Kind::Unknown;
  std::optional<ltl::LassoTrace> witness;
  std::string detail;
};

std::string_view kind_name( Equivalence::Kind k );

// ---- tool discovery and the driver ----------------------------------------------------

struct ToolPaths
{
  std::optional<std::filesystem::path> yosys;
  std::optional<std::filesystem::path> aigtosmv;
  std::optional<std::filesystem::path> nuxmv;
  std::optional<std::filesystem::path> ltlfilt;
};

/// A configured path wins when it is executable; otherwise PATH is searched
/// for each of `names`.
std::optional<std::filesystem::path> find_tool( std::optional<std::filesystem::path> const& configured,
                                                std::vector<std::string> const& names );

/// Content-addressed store of translated circuits: `<key>.aag` plus the
/// translated source as `<key>.v`.
class TranslationCache
{
public:
  explicit TranslationCache( std::filesystem::path dir );

  /// Hex FNV-1a-64 of the module name, a NUL byte and the source text.
  static std::string key( std::string_view module_name, std::string_view source );

  std::optional<verilog::AigerCircuit> lookup( verilog::VerilogModule const& m ) const;
  void store( verilog::VerilogModule const& m, verilog::AigerCircuit const& c ) const;
  std::filesystem::path const& dir() const { return dir_; }

private:
  std::filesystem::path dir_;
};

enum class CheckerChoice
{
  Auto,     // external when available, else built-in
  External,
  Builtin,
  Both,     // external verdict wins; disagreement becomes ToolError
};

struct ToolchainConfig
{
  ToolPaths configured;
  std::filesystem::path work_root; // empty: system temp directory
  bool keep_artifacts = false;
  std::optional<std::filesystem::path> translation_cache;
  CheckerChoice checker = CheckerChoice::Auto;
  std::size_t heavy_slots = 1; // concurrent model checker runs
};

struct CheckOptions
{
  ToolLimits limits = ToolLimits::checking();
  verilog::FalsifyOptions builtin;
  /// Trace atom order; defaults to circuit inputs then outputs.
  std::vector<std::string> atoms;
};

/// Thread-safe; each call owns its subprocesses and scratch directory.
class Toolchain
{
public:
  explicit Toolchain( ToolchainConfig config = {} );

  ToolPaths const& paths() const { return paths_; }
  bool can_translate() const { return paths_.yosys.has_value(); }
  bool can_check() const { return paths_.aigtosmv.has_value() && paths_.nuxmv.has_value(); }
  bool can_filter() const { return paths_.ltlfilt.has_value(); }

  /// First line of each discovered tool's version banner.
  std::map<std::string, std::string> versions() const;

  /// Uses the translation cache first. Throws ToolMissing, ToolFailed,
  /// ToolTimeout, or verilog::AigerError for unreadable tool output.
  verilog::AigerCircuit translate_to_aiger( verilog::VerilogModule const& m, ToolLimits const& limits = {},
                                            std::vector<ToolReport>* reports = nullptr ) const;

  /// One model checker run per property. Never throws on tool misbehavior.
  std::vector<CheckVerdict> check_properties( verilog::AigerCircuit const& c, std::vector<ltl::Formula> const& props,
                                              CheckOptions const& options = {} ) const;

  /// falsify_small per property.
  std::vector<CheckVerdict> check_builtin( verilog::AigerCircuit const& c, std::vector<ltl::Formula> const& props,
                                           CheckOptions const& options = {} ) const;

  /// Dispatches per the configured CheckerChoice.
  std::vector<CheckVerdict> verify( verilog::AigerCircuit const& c, std::vector<ltl::Formula> const& props,
                                    CheckOptions const& options = {} ) const;

  /// Delegates to the LTL filter; falls back to bounded_inequiv without it.
  Equivalence equivalence_check( ltl::Formula const& f, ltl::Formula const& g,
                                 ToolLimits const& limits = ToolLimits::equivalence(),
                                 ltl::InequivOptions const& fallback = {} ) const;

private:
  struct Slots
  {
    std::mutex mutex;
    std::condition_variable cv;
    std::size_t free = 1;
  };

  ToolchainConfig config_;
  ToolPaths paths_;
  std::shared_ptr<Slots> slots_;

  std::filesystem::path scratch( std::string_view purpose ) const;
  void release( std::filesystem::path const& dir ) const;
};

} // namespace natsyn::toolchain
