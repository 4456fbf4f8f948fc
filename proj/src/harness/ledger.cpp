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

#include <natsyn/harness.hpp>

#include <json.hpp>

#include <fstream>
#include <sstream>

namespace natsyn::harness
{

namespace
{

using ojson = nlohmann::ordered_json;

ojson object_or_empty( std::string const& text )
{
  if ( text.empty() )
    return ojson::object();
  return ojson::parse( text );
}

} // namespace

std::string LedgerRecord::key() const
{
  return instance + '\t' + workflow + '\t' + backend + '\t' + level + '\t' + std::to_string( budget ) + '\t' +
         std::to_string( run );
}

std::string to_json_line( LedgerRecord const& r )
{
  ojson j;
  j["instance"] = r.instance;
  j["workflow"] = r.workflow;
  j["backend"] = r.backend;
  j["level"] = r.level;
  j["budget"] = r.budget;
  j["run"] = r.run;
  j["realizability"] = r.realizability;
  j["status"] = r.status;
  j["role"] = r.role;
  j["iterations_used"] = r.iterations_used;
  j["error_stage"] = r.error_stage;
  j["detail"] = r.detail;
  j["reasoning_tokens"] = r.reasoning_tokens;
  j["output_tokens"] = r.output_tokens;
  auto attempts = ojson::array();
  for ( auto const& a : r.attempts )
  {
    ojson o;
    o["index"] = a.index;
    o["prompt_kind"] = a.prompt_kind;
    o["prompt_hash"] = a.prompt_hash;
    o["reasoning_tokens"] = a.reasoning_tokens;
    o["output_tokens"] = a.output_tokens;
    o["latency_seconds"] = a.latency_seconds;
    o["role"] = a.role;
    o["verdicts"] = a.verdicts;
    o["stopped_at"] = a.stopped_at;
    o["detail"] = a.detail;
    attempts.push_back( std::move( o ) );
  }
  j["attempts"] = std::move( attempts );
  auto versions = ojson::object();
  for ( auto const& [tool, v] : r.tool_versions )
    versions[tool] = v;
  j["tool_versions"] = std::move( versions );
  j["artifacts"] = r.artifacts;
  j["extra"] = object_or_empty( r.extra );
  j["timing"] = object_or_empty( r.timing );
  return j.dump();
}

LedgerRecord from_json_line( std::string_view line )
{
  auto const j = ojson::parse( line );
  LedgerRecord r;
  r.instance = j.at( "instance" ).get<std::string>();
  r.workflow = j.at( "workflow" ).get<std::string>();
  r.backend = j.at( "backend" ).get<std::string>();
  r.level = j.at( "level" ).get<std::string>();
  r.budget = j.at( "budget" ).get<unsigned>();
  r.run = j.value( "run", 0u );
  r.realizability = j.value( "realizability", std::string( "unknown" ) );
  r.status = j.at( "status" ).get<std::string>();
  r.role = j.value( "role", std::string{} );
  r.iterations_used = j.value( "iterations_used", 0u );
  r.error_stage = j.value( "error_stage", std::string{} );
  r.detail = j.value( "detail", std::string{} );
  r.reasoning_tokens = j.value( "reasoning_tokens", std::uint64_t{ 0 } );
  r.output_tokens = j.value( "output_tokens", std::uint64_t{ 0 } );
  if ( auto const a = j.find( "attempts" ); a != j.end() )
    for ( auto const& o : *a )
    {
      AttemptRecord ar;
      ar.index = o.value( "index", 0u );
      ar.prompt_kind = o.value( "prompt_kind", std::string{} );
      ar.prompt_hash = o.value( "prompt_hash", std::string{} );
      ar.reasoning_tokens = o.value( "reasoning_tokens", std::uint64_t{ 0 } );
      ar.output_tokens = o.value( "output_tokens", std::uint64_t{ 0 } );
      ar.latency_seconds = o.value( "latency_seconds", 0.0 );
      ar.role = o.value( "role", std::string{} );
      ar.verdicts = o.value( "verdicts", std::vector<std::string>{} );
      ar.stopped_at = o.value( "stopped_at", std::string{} );
      ar.detail = o.value( "detail", std::string{} );
      r.attempts.push_back( std::move( ar ) );
    }
  if ( auto const v = j.find( "tool_versions" ); v != j.end() )
    for ( auto const& [tool, text] : v->items() )
      r.tool_versions[tool] = text.get<std::string>();
  r.artifacts = j.value( "artifacts", std::vector<std::string>{} );
  r.extra = j.contains( "extra" ) ? j["extra"].dump() : "{}";
  r.timing = j.contains( "timing" ) ? j["timing"].dump() : "{}";
  return r;
}

RunLedger::RunLedger( std::filesystem::path path ) : path_( std::move( path ) )
{
  for ( auto const& r : read() )
    keys_.insert( r.key() );
}

std::vector<LedgerRecord> RunLedger::read() const
{
  std::vector<LedgerRecord> out;
  std::ifstream in( path_ );
  if ( !in )
    return out;
  std::string line;
  while ( std::getline( in, line ) )
  {
    if ( line.find_first_not_of( " \t\r" ) == std::string::npos )
      continue;
    try
    {
      out.push_back( from_json_line( line ) );
    }
    catch ( std::exception const& )
    {
      // A crash mid-append leaves at most one torn line; it is rerun.
    }
  }
  return out;
}

bool RunLedger::contains( std::string const& key ) const
{
  std::lock_guard lock( mutex_ );
  return keys_.count( key ) > 0;
}

void RunLedger::append( LedgerRecord const& r )
{
  auto const line = to_json_line( r ) + "\n";
  std::lock_guard lock( mutex_ );
  if ( !path_.parent_path().empty() )
    std::filesystem::create_directories( path_.parent_path() );
  {
    // A torn last line (no newline) is terminated first so the new record
    // starts on its own line.
    std::ifstream probe( path_, std::ios::binary | std::ios::ate );
    if ( probe && probe.tellg() > 0 )
    {
      probe.seekg( -1, std::ios::end );
      char last = '\n';
      probe.get( last );
      if ( last != '\n' )
      {
        std::ofstream fix( path_, std::ios::binary | std::ios::app );
        fix << '\n';
      }
    }
  }
  std::ofstream out( path_, std::ios::binary | std::ios::app );
  out << line;
  out.flush();
  if ( !out )
    throw std::runtime_error( "cannot append to ledger " + path_.string() );
  keys_.insert( r.key() );
}

} // namespace natsyn::harness
