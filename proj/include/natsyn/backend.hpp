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
  \file backend.hpp
  \brief Prompt construction and synthesizer backends.
*/

#pragma once

#include <natsyn/verilog.hpp>

#include <chrono>
#include <condition_variable>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace natsyn::backend
{

enum class PromptKind
{
  Synthesis,
  Repair,
  ParamSynthesis,
  Autoformalize,
  AutoformalizeRepair,
  DirectNL,
};

/// "synthesis", "repair", "param-synthesis", "autoformalize",
/// "autoformalize-repair", "direct-nl"
std::string_view kind_name( PromptKind k );

struct PromptBundle
{
  PromptKind kind = PromptKind::Synthesis;
  std::string text;
  std::string template_id;
  std::string spec_hash; // of the specification or description text
  unsigned attempt = 0;   // 0 for the first request of an instance
};

/// Hex FNV-1a-64.
std::string content_hash( std::string_view text );

struct EmptyInput : std::invalid_argument
{
  using std::invalid_argument::invalid_argument;
};

struct NoParameters : std::invalid_argument
{
  using std::invalid_argument::invalid_argument;
};

/// Raw template text by id ("synthesis", "repair", "param-rule",
/// "autoformalize", "autoformalize-repair", "direct-nl").
std::string_view prompt_template( std::string_view id );

PromptBundle build_synthesis_prompt( std::string_view spec_text, unsigned attempt = 0 );

enum class RepairBase
{
  Synthesis,
  Parameterized,
  DirectNL, // `spec_text` is then the natural-language description
};

/// `feedback` is the formatted counterexample report.
PromptBundle build_repair_prompt( std::string_view spec_text, verilog::VerilogModule const& module,
                                  std::string_view feedback, unsigned attempt,
                                  RepairBase base = RepairBase::Synthesis );

/// Throws NoParameters unless the specification declares a parameter.
PromptBundle build_param_prompt( std::string_view spec_text, unsigned attempt = 0 );

PromptBundle build_autoformalization_prompt( std::string_view nl_text, unsigned attempt = 0 );

/// Syntax repair of an autoformalization attempt.
PromptBundle build_autoformalization_repair_prompt( std::string_view nl_text, std::string_view previous,
                                                    std::string_view diagnostic, unsigned attempt );

PromptBundle build_directnl_prompt( std::string_view nl_text, unsigned attempt = 0 );

// ---- backends ----------------------------------------------------------------------

enum class ReasoningLevel
{
  None,
  Low,
  Medium,
  High,
  XHigh,
};

std::string_view level_name( ReasoningLevel l ); // "none" .. "xhigh"
std::optional<ReasoningLevel> parse_level( std::string_view text );

struct BackendResponse
{
  std::string text;
  std::uint64_t reasoning_tokens = 0;
  std::uint64_t output_tokens = 0; // visible completion tokens
  double latency_seconds = 0.0;
  std::string backend_id;
};

struct BackendError : std::runtime_error
{
  using std::runtime_error::runtime_error;
};

struct AuthError : BackendError
{
  using BackendError::BackendError;
};

struct RateLimited : BackendError
{
  RateLimited( std::string const& what, double retry_after, unsigned attempts );
  double retry_after_seconds; // last server hint, or the backoff that was due
  unsigned attempts;
};

struct TransportError : BackendError
{
  using BackendError::BackendError;
};

struct FixtureMissing : BackendError
{
  explicit FixtureMissing( std::filesystem::path expected );
  std::filesystem::path expected;
};

class Backend
{
public:
  virtual ~Backend() = default;
  virtual std::string id() const = 0;
  virtual BackendResponse complete( PromptBundle const& prompt, ReasoningLevel level ) = 0;
};

/// Replays `<kind>-<spec-hash>-<attempt>.txt` with an optional
/// `<same stem>.meta.json` holding reasoning_tokens, output_tokens and
/// latency_seconds.
class ScriptedBackend : public Backend
{
public:
  explicit ScriptedBackend( std::filesystem::path dir, std::string id = "scripted" );

  static std::string fixture_stem( PromptBundle const& prompt );

  std::string id() const override { return id_; }
  BackendResponse complete( PromptBundle const& prompt, ReasoningLevel level ) override;

private:
  std::filesystem::path dir_;
  std::string id_;
};

struct ConfigError : std::invalid_argument
{
  using std::invalid_argument::invalid_argument;
};

struct RemoteConfig
{
  std::string id = "remote";
  std::string base_url; // scheme://host[:port]
  std::string path = "/v1/chat/completions";
  std::string model;
  std::string credential_env; // environment variable holding the bearer token
  /// JSON object text merged into the request body, per level.
  std::map<ReasoningLevel, std::string> level_knobs;
  unsigned max_retries = 3;
  std::chrono::duration<double> initial_backoff{ 2.0 };
  std::chrono::duration<double> max_wait{ 120.0 };
  std::chrono::duration<double> request_timeout{ 1800.0 };
  std::size_t max_concurrent = 4;
  double min_interval_seconds = 0.0; // between request starts
};

/// Chat-completion client. Request and response bodies go to `log` with the
/// credential redacted.
class RemoteBackend : public Backend
{
public:
  using Log = std::function<void( std::string_view )>;

  /// Throws ConfigError for malformed knobs or a missing credential.
  RemoteBackend( RemoteConfig config, Log log = {} );

  /// Throws ConfigError when `level` has no knob mapping.
  void require_level( ReasoningLevel level ) const;

  std::string id() const override { return config_.id; }
  BackendResponse complete( PromptBundle const& prompt, ReasoningLevel level ) override;

private:
  RemoteConfig config_;
  Log log_;
  std::string credential_;
  std::mutex mutex_;
  std::condition_variable cv_;
  std::size_t in_flight_ = 0;
  std::chrono::steady_clock::time_point next_start_{};

  std::string redact( std::string text ) const;
};

} // namespace natsyn::backend
