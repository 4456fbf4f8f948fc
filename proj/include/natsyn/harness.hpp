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
  \file harness.hpp
  \brief Datasets, run configuration, the run ledger and reports.
*/

#pragma once

#include <natsyn/backend.hpp>
#include <natsyn/engine.hpp>
#include <natsyn/toolchain.hpp>

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace natsyn::harness
{

enum class Realizability
{
  Realizable,
  Unrealizable,
  Unknown,
};

std::string_view realizability_name( Realizability r ); // "realizable" / "unrealizable" / "unknown"
std::optional<Realizability> parse_realizability( std::string_view text );

struct DatasetInstance
{
  std::string id; // file stem
  std::filesystem::path spec_path;
  Realizability realizability = Realizability::Unknown;
  /// Equal for specs that differ only in their parameter values.
  std::string family;
  std::optional<std::int64_t> parameter_value; // first declared parameter
  std::optional<std::filesystem::path> nl_path;
  std::optional<std::filesystem::path> ground_truth_path;
};

struct QuarantineEntry
{
  std::filesystem::path path;
  std::string reason;
};

struct Dataset
{
  std::vector<DatasetInstance> instances; // sorted by id
  std::vector<QuarantineEntry> quarantined;

  /// Families with at least two members, each sorted by parameter value.
  std::map<std::string, std::vector<DatasetInstance const*>> families() const;
  DatasetInstance const* find( std::string_view id ) const;
};

/// Family key: hash of the rendered specification with every literal
/// parameter value replaced by a placeholder.
std::string family_key( tlsf::TlsfSpec const& spec );

/// Loads every `.tlsf` file of `dir`. The metadata manifest (default
/// `<dir>/metadata.json`, optional) maps ids to {"realizability", "nl",
/// "ground_truth"}; paths are relative to the manifest. Unreadable or
/// unparseable files are quarantined.
Dataset load_dataset( std::filesystem::path const& dir, std::optional<std::filesystem::path> metadata = {} );

// ---- configuration -------------------------------------------------------------------

enum class Workflow
{
  Synthesis,
  Parameterized,
  NaturalAuto,
  NaturalDirect,
};

std::string_view workflow_name( Workflow w ); // "synthesis", "parameterized", "natural-auto", "natural-direct"
std::optional<Workflow> parse_workflow( std::string_view text );

struct BackendSpec
{
  std::string type; // "scripted" or "remote"
  std::filesystem::path fixtures; // scripted
  backend::RemoteConfig remote;   // remote
};

struct RunConfig
{
  Workflow workflow = Workflow::Synthesis;
  std::filesystem::path dataset;
  std::optional<std::filesystem::path> metadata;
  std::string backend = "scripted";
  std::map<std::string, BackendSpec> backends;
  backend::ReasoningLevel level = backend::ReasoningLevel::High;
  unsigned cex_iters = 2;
  std::vector<std::int64_t> values; // parameter ladder override
  std::int64_t max_value = 27;      // top of the default ladder
  unsigned jobs = 1;
  unsigned runs = 1; // repetitions; each is a separate ledger stratum
  double check_timeout = 600.0;
  double instance_ceiling = 3600.0;
  bool keep_artifacts = false;
  std::filesystem::path ledger = "natsyn-ledger.jsonl";
  std::filesystem::path artifacts; // empty: next to the ledger
  toolchain::ToolPaths tools;
  toolchain::CheckerChoice checker = toolchain::CheckerChoice::Auto;
  std::optional<std::filesystem::path> translation_cache;
  std::filesystem::path work_root;
};

struct ConfigError : std::invalid_argument
{
  using std::invalid_argument::invalid_argument;
};

/// Applies a JSON configuration file on top of `base`. Throws ConfigError.
RunConfig apply_config_file( RunConfig base, std::filesystem::path const& file );

/// Rejects unknown backends, levels without a mapping, zero jobs or runs,
/// and missing datasets. Throws ConfigError.
void validate( RunConfig const& config );

std::unique_ptr<backend::Backend> make_backend( RunConfig const& config,
                                                backend::RemoteBackend::Log log = {} );

// ---- ledger -------------------------------------------------------------------------

struct AttemptRecord
{
  unsigned index = 0;
  std::string prompt_kind;
  std::string prompt_hash;
  std::uint64_t reasoning_tokens = 0;
  std::uint64_t output_tokens = 0;
  double latency_seconds = 0.0;
  std::string role;
  std::vector<std::string> verdicts; // kind names per subproperty
  std::string stopped_at;
  std::string detail;
};

struct LedgerRecord
{
  std::string instance;
  std::string workflow;
  std::string backend;
  std::string level;
  unsigned budget = 0;
  unsigned run = 0;
  std::string realizability = "unknown";
  std::string status; // engine::status_name
  std::string role;
  unsigned iterations_used = 0;
  std::string error_stage;
  std::string detail;
  std::vector<AttemptRecord> attempts;
  std::uint64_t reasoning_tokens = 0; // sum over attempts
  std::uint64_t output_tokens = 0;
  std::map<std::string, std::string> tool_versions;
  std::vector<std::string> artifacts;
  std::string extra; // workflow-specific JSON object text, "{}" when empty
  /// The only nondeterministic field: timestamp and wall time.
  std::string timing = "{}";

  /// (instance, workflow, backend, level, budget, run)
  std::string key() const;
};

std::string to_json_line( LedgerRecord const& r );
LedgerRecord from_json_line( std::string_view line );

/// Append-only JSON-lines file. Appends are serialized and flushed per line.
class RunLedger
{
public:
  explicit RunLedger( std::filesystem::path path );

  /// Records already on disk. A torn final line is ignored.
  std::vector<LedgerRecord> read() const;
  bool contains( std::string const& key ) const;
  void append( LedgerRecord const& r );
  std::filesystem::path const& path() const { return path_; }

private:
  std::filesystem::path path_;
  mutable std::mutex mutex_;
  std::set<std::string> keys_;
};

// ---- running ------------------------------------------------------------------------

struct RunSummary
{
  std::size_t executed = 0;
  std::size_t skipped = 0; // already in the ledger
  std::size_t errors = 0;  // Error outcomes among the selected tuples
  std::vector<QuarantineEntry> quarantined;
};

/// Runs the configured workflow over the dataset, appending one record per
/// (instance, run). Throws ConfigError before any run on a bad config.
RunSummary run_benchmark( RunConfig const& config, std::function<void( std::string_view )> log = {} );

/// Writes the cached translations named by a manifest of lines
/// `module.v<TAB>circuit.aag[<TAB>spec.tlsf<TAB>param=value]`; the
/// four-column form caches the parameterized wrapper. Paths are relative to
/// the manifest. Returns the number of entries written.
std::size_t seed_translation_cache( std::filesystem::path const& manifest, std::filesystem::path const& cache_dir );

// ---- reports ------------------------------------------------------------------------

struct SolvedRow
{
  std::string workflow;
  std::string backend;
  std::string level;
  unsigned budget = 0;
  unsigned cex = 0;      // solved within this many repair iterations
  std::size_t runs = 0;
  std::size_t total = 0; // instances per run
  double solved_mean = 0.0;
  double solved_std = 0.0; // sample standard deviation over runs; 0 for one run
  std::map<std::string, std::pair<double, std::size_t>> by_realizability; // mean solved, total
  /// Natural workflows: mean passes per verification target.
  std::map<std::string, double> by_target;
};

struct TokenRow
{
  std::string workflow;
  std::string backend;
  std::string level;
  unsigned budget = 0;
  double reasoning_mean = 0.0; // per instance, over all runs
  double reasoning_std = 0.0;  // sample standard deviation over instances
  double solved_mean = 0.0;
  std::size_t total = 0;
};

struct Report
{
  std::vector<SolvedRow> solved;
  std::vector<TokenRow> tokens;
};

/// Last record per key, in key order.
std::vector<LedgerRecord> latest( std::vector<LedgerRecord> const& records );

/// Later records replace earlier ones with the same key.
Report summarize( std::vector<LedgerRecord> const& records );

std::string render_table( Report const& r );
std::string render_token_csv( Report const& r );
std::string render_audit( std::vector<LedgerRecord> const& records );

} // namespace natsyn::harness
