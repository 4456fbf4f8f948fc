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

#include <natsyn/backend.hpp>

#include <httplib.h>
#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <thread>

namespace natsyn::backend
{

namespace
{

using seconds = std::chrono::duration<double>;
using nlohmann::json;

/// Retry-After as delta seconds; HTTP dates are not honored.
std::optional<double> retry_after( httplib::Response const& res )
{
  if ( !res.has_header( "Retry-After" ) )
    return std::nullopt;
  auto const value = res.get_header_value( "Retry-After" );
  char* end = nullptr;
  auto const v = std::strtod( value.c_str(), &end );
  if ( end == value.c_str() || !std::isfinite( v ) || v < 0 )
    return std::nullopt;
  return v;
}

void sleep_for( double s )
{
  if ( s > 0 )
    std::this_thread::sleep_for( seconds( s ) );
}

BackendResponse parse_completion( std::string const& body )
{
  BackendResponse r;
  try
  {
    auto const j = json::parse( body );
    auto const& content = j.at( "choices" ).at( 0 ).at( "message" ).at( "content" );
    if ( !content.is_string() )
      throw BackendError( "response content is not a string" );
    r.text = content.get<std::string>();
    if ( auto const usage = j.find( "usage" ); usage != j.end() && usage->is_object() )
    {
      auto const completion = usage->value( "completion_tokens", std::uint64_t{ 0 } );
      std::uint64_t reasoning = 0;
      if ( auto const d = usage->find( "completion_tokens_details" ); d != usage->end() && d->is_object() )
        reasoning = d->value( "reasoning_tokens", std::uint64_t{ 0 } );
      r.reasoning_tokens = reasoning;
      r.output_tokens = completion > reasoning ? completion - reasoning : 0;
    }
  }
  catch ( json::exception const& e )
  {
    throw BackendError( std::string( "malformed completion response: " ) + e.what() );
  }
  return r;
}

} // namespace

RemoteBackend::RemoteBackend( RemoteConfig config, Log log ) : config_( std::move( config ) ), log_( std::move( log ) )
{
  if ( config_.base_url.empty() )
    throw ConfigError( "backend " + config_.id + ": base_url is empty" );
  if ( config_.max_concurrent == 0 )
    throw ConfigError( "backend " + config_.id + ": max_concurrent must be positive" );
  for ( auto const& [level, knob] : config_.level_knobs )
  {
    json parsed;
    try
    {
      parsed = json::parse( knob );
    }
    catch ( json::exception const& e )
    {
      throw ConfigError( "backend " + config_.id + ": knob for level " + std::string( level_name( level ) ) +
                         " is not JSON: " + e.what() );
    }
    if ( !parsed.is_object() )
      throw ConfigError( "backend " + config_.id + ": knob for level " + std::string( level_name( level ) ) +
                         " is not a JSON object" );
  }
  if ( !config_.credential_env.empty() )
  {
    auto const* value = std::getenv( config_.credential_env.c_str() );
    if ( value == nullptr || *value == '\0' )
      throw ConfigError( "backend " + config_.id + ": environment variable " + config_.credential_env + " is not set" );
    credential_ = value;
  }
}

void RemoteBackend::require_level( ReasoningLevel level ) const
{
  if ( !config_.level_knobs.count( level ) )
    throw ConfigError( "backend " + config_.id + " has no mapping for reasoning level " +
                       std::string( level_name( level ) ) );
}

std::string RemoteBackend::redact( std::string text ) const
{
  if ( credential_.empty() )
    return text;
  for ( auto at = text.find( credential_ ); at != std::string::npos; at = text.find( credential_, at ) )
    text.replace( at, credential_.size(), "[redacted]" );
  return text;
}

BackendResponse RemoteBackend::complete( PromptBundle const& prompt, ReasoningLevel level )
{
  require_level( level );

  json body = { { "model", config_.model },
                { "messages", json::array( { { { "role", "user" }, { "content", prompt.text } } } ) } };
  body.merge_patch( json::parse( config_.level_knobs.at( level ) ) );
  auto const payload = body.dump();

  {
    std::unique_lock lock( mutex_ );
    cv_.wait( lock, [&] { return in_flight_ < config_.max_concurrent; } );
    ++in_flight_;
  }
  struct Release
  {
    RemoteBackend* self;
    ~Release()
    {
      {
        std::lock_guard lock( self->mutex_ );
        --self->in_flight_;
      }
      self->cv_.notify_one();
    }
  } release{ this };

  httplib::Client client( config_.base_url );
  auto const timeout = std::chrono::duration_cast<std::chrono::milliseconds>( config_.request_timeout );
  client.set_connection_timeout( std::min( timeout, std::chrono::milliseconds( 60000 ) ) );
  client.set_read_timeout( timeout );
  client.set_write_timeout( timeout );
  httplib::Headers headers;
  if ( !credential_.empty() )
    headers.emplace( "Authorization", "Bearer " + credential_ );

  auto backoff = config_.initial_backoff.count();
  auto const max_wait = config_.max_wait.count();
  double last_wait = 0.0;
  std::string last_problem;
  bool rate_limited = false;
  for ( unsigned attempt = 0; attempt <= config_.max_retries; ++attempt )
  {
    if ( attempt > 0 )
    {
      sleep_for( last_wait );
      backoff = std::min( backoff * 2.0, max_wait );
    }
    if ( config_.min_interval_seconds > 0 )
    {
      std::unique_lock lock( mutex_ );
      auto const now = std::chrono::steady_clock::now();
      auto const start = std::max( now, next_start_ );
      next_start_ = start + std::chrono::duration_cast<std::chrono::steady_clock::duration>(
                                seconds( config_.min_interval_seconds ) );
      lock.unlock();
      std::this_thread::sleep_until( start );
    }

    if ( log_ )
      log_( redact( "request " + config_.id + " attempt " + std::to_string( attempt ) + ": " + payload ) );
    auto const started = std::chrono::steady_clock::now();
    auto const res = client.Post( config_.path, headers, payload, "application/json" );
    auto const elapsed = seconds( std::chrono::steady_clock::now() - started ).count();

    if ( !res )
    {
      last_problem = "transport failure: " + httplib::to_string( res.error() );
      rate_limited = false;
      last_wait = std::min( backoff, max_wait );
      if ( log_ )
        log_( redact( "response " + config_.id + ": " + last_problem ) );
      continue;
    }
    if ( log_ )
      log_( redact( "response " + config_.id + " status " + std::to_string( res->status ) + ": " + res->body ) );

    if ( res->status == 401 || res->status == 403 )
      throw AuthError( "backend " + config_.id + " rejected the credential (status " +
                       std::to_string( res->status ) + ")" );
    if ( res->status == 429 )
    {
      rate_limited = true;
      last_wait = std::min( retry_after( *res ).value_or( backoff ), max_wait );
      last_problem = "rate limited (status 429)";
      continue;
    }
    if ( res->status >= 500 )
    {
      rate_limited = false;
      last_wait = std::min( backoff, max_wait );
      last_problem = "server error (status " + std::to_string( res->status ) + ")";
      continue;
    }
    if ( res->status < 200 || res->status >= 300 )
      throw BackendError( redact( "backend " + config_.id + " returned status " + std::to_string( res->status ) +
                                  ": " + res->body ) );

    auto r = parse_completion( res->body );
    r.latency_seconds = elapsed;
    r.backend_id = config_.id;
    return r;
  }

  auto const attempts = config_.max_retries + 1;
  auto const what = "backend " + config_.id + ": " + last_problem + " after " + std::to_string( attempts ) +
                    " attempts";
  if ( rate_limited )
    throw RateLimited( what, last_wait, attempts );
  throw TransportError( what );
}

} // namespace natsyn::backend
