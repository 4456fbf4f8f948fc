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

#include <json.hpp>

#include <fstream>
#include <sstream>

namespace natsyn::backend
{

namespace
{

std::string slurp( std::filesystem::path const& p )
{
  std::ifstream in( p, std::ios::binary );
  if ( !in )
    throw BackendError( "cannot read " + p.string() );
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

} // namespace

RateLimited::RateLimited( std::string const& what, double retry_after, unsigned attempts )
    : BackendError( what ), retry_after_seconds( retry_after ), attempts( attempts )
{
}

FixtureMissing::FixtureMissing( std::filesystem::path expected )
    : BackendError( "no scripted response at " + expected.string() ), expected( std::move( expected ) )
{
}

ScriptedBackend::ScriptedBackend( std::filesystem::path dir, std::string id )
    : dir_( std::move( dir ) ), id_( std::move( id ) )
{
}

std::string ScriptedBackend::fixture_stem( PromptBundle const& prompt )
{
  return std::string( kind_name( prompt.kind ) ) + "-" + prompt.spec_hash + "-" + std::to_string( prompt.attempt );
}

BackendResponse ScriptedBackend::complete( PromptBundle const& prompt, ReasoningLevel )
{
  auto const stem = fixture_stem( prompt );
  auto const text_path = dir_ / ( stem + ".txt" );
  if ( !std::filesystem::is_regular_file( text_path ) )
    throw FixtureMissing( text_path );

  BackendResponse r;
  r.text = slurp( text_path );
  r.backend_id = id_;
  auto const meta_path = dir_ / ( stem + ".meta.json" );
  if ( std::filesystem::is_regular_file( meta_path ) )
  {
    try
    {
      auto const meta = nlohmann::json::parse( slurp( meta_path ) );
      r.reasoning_tokens = meta.value( "reasoning_tokens", std::uint64_t{ 0 } );
      r.output_tokens = meta.value( "output_tokens", std::uint64_t{ 0 } );
      r.latency_seconds = meta.value( "latency_seconds", 0.0 );
    }
    catch ( nlohmann::json::exception const& e )
    {
      throw BackendError( meta_path.string() + ": " + e.what() );
    }
  }
  return r;
}

} // namespace natsyn::backend
