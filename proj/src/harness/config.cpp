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

#include <algorithm>
#include <fstream>
#include <functional>
#include <set>

namespace natsyn::harness
{

std::string_view workflow_name( Workflow w )
{
  switch ( w )
  {
  case Workflow::Synthesis:
    return "synthesis";
  case Workflow::Parameterized:
    return "parameterized";
  case Workflow::NaturalAuto:
    return "natural-auto";
  case Workflow::NaturalDirect:
    return "natural-direct";
  }
  return "synthesis";
}

std::optional<Workflow> parse_workflow( std::string_view text )
{
  for ( auto w : { Workflow::Synthesis, Workflow::Parameterized, Workflow::NaturalAuto, Workflow::NaturalDirect } )
    if ( workflow_name( w ) == text )
      return w;
  return std::nullopt;
}

namespace
{

using nlohmann::json;

std::filesystem::path resolve( std::filesystem::path const& base, json const& value, std::string const& field )
{
  if ( !value.is_string() )
    throw ConfigError( field + " must be a string path" );
  std::filesystem::path p = value.get<std::string>();
  return p.is_absolute() ? p : base / p;
}

void check_keys( json const& obj, std::set<std::string> const& allowed, std::string const& where )
{
  if ( !obj.is_object() )
    throw ConfigError( where + " must be a JSON object" );
  for ( auto const& [key, _] : obj.items() )
    if ( !allowed.count( key ) )
      throw ConfigError( "unknown key \"" + key + "\" in " + where );
}

double number( json const& v, std::string const& field, bool non_negative = true )
{
  if ( !v.is_number() )
    throw ConfigError( field + " must be a number" );
  auto const d = v.get<double>();
  if ( non_negative && d < 0 )
    throw ConfigError( field + " must not be negative" );
  return d;
}

std::string text( json const& v, std::string const& field )
{
  if ( !v.is_string() )
    throw ConfigError( field + " must be a string" );
  return v.get<std::string>();
}

backend::ReasoningLevel level_of( std::string const& name, std::string const& where )
{
  auto const l = backend::parse_level( name );
  if ( !l )
    throw ConfigError( "unsupported reasoning level \"" + name + "\" in " + where +
                       " (expected none, low, medium, high or xhigh)" );
  return *l;
}

BackendSpec backend_spec( std::string const& id, json const& j, std::filesystem::path const& base )
{
  auto const where = "backends." + id;
  check_keys( j,
              { "type", "fixtures", "base_url", "path", "model", "credential_env", "levels", "max_retries",
                "initial_backoff", "max_wait", "request_timeout", "max_concurrent", "min_interval" },
              where );
  BackendSpec spec;
  spec.type = j.contains( "type" ) ? text( j["type"], where + ".type" ) : std::string{};
  if ( spec.type == "scripted" )
  {
    if ( !j.contains( "fixtures" ) )
      throw ConfigError( where + ": a scripted backend needs \"fixtures\"" );
    spec.fixtures = resolve( base, j["fixtures"], where + ".fixtures" );
    return spec;
  }
  if ( spec.type != "remote" )
    throw ConfigError( where + ".type must be \"scripted\" or \"remote\"" );
  auto& r = spec.remote;
  r.id = id;
  if ( j.contains( "base_url" ) )
    r.base_url = text( j["base_url"], where + ".base_url" );
  if ( j.contains( "path" ) )
    r.path = text( j["path"], where + ".path" );
  if ( j.contains( "model" ) )
    r.model = text( j["model"], where + ".model" );
  if ( j.contains( "credential_env" ) )
    r.credential_env = text( j["credential_env"], where + ".credential_env" );
  if ( j.contains( "levels" ) )
  {
    check_keys( j["levels"], { "none", "low", "medium", "high", "xhigh" }, where + ".levels" );
    for ( auto const& [name, knob] : j["levels"].items() )
    {
      if ( !knob.is_object() )
        throw ConfigError( where + ".levels." + name + " must be a JSON object" );
      r.level_knobs[level_of( name, where + ".levels" )] = knob.dump();
    }
  }
  if ( j.contains( "max_retries" ) )
    r.max_retries = static_cast<unsigned>( number( j["max_retries"], where + ".max_retries" ) );
  if ( j.contains( "initial_backoff" ) )
    r.initial_backoff = std::chrono::duration<double>( number( j["initial_backoff"], where + ".initial_backoff" ) );
  if ( j.contains( "max_wait" ) )
    r.max_wait = std::chrono::duration<double>( number( j["max_wait"], where + ".max_wait" ) );
  if ( j.contains( "request_timeout" ) )
    r.request_timeout = std::chrono::duration<double>( number( j["request_timeout"], where + ".request_timeout" ) );
  if ( j.contains( "max_concurrent" ) )
    r.max_concurrent = static_cast<std::size_t>( number( j["max_concurrent"], where + ".max_concurrent" ) );
  if ( j.contains( "min_interval" ) )
    r.min_interval_seconds = number( j["min_interval"], where + ".min_interval" );
  return spec;
}

toolchain::CheckerChoice checker_of( std::string const& name )
{
  if ( name == "auto" )
    return toolchain::CheckerChoice::Auto;
  if ( name == "external" )
    return toolchain::CheckerChoice::External;
  if ( name == "builtin" )
    return toolchain::CheckerChoice::Builtin;
  if ( name == "both" )
    return toolchain::CheckerChoice::Both;
  throw ConfigError( "checker must be auto, external, builtin or both" );
}

void apply( RunConfig& c, json const& j, std::filesystem::path const& base, std::string const& where )
{
  check_keys( j,
              { "workflow", "dataset", "metadata", "backend", "backends", "level", "cex_iters", "values", "max_value",
                "jobs", "runs", "check_timeout", "instance_ceiling", "keep_artifacts", "ledger", "artifacts", "tools",
                "checker", "translation_cache", "work_root" },
              where );
  if ( j.contains( "workflow" ) )
  {
    auto const w = parse_workflow( text( j["workflow"], "workflow" ) );
    if ( !w )
      throw ConfigError( "unknown workflow " + j["workflow"].dump() );
    c.workflow = *w;
  }
  if ( j.contains( "dataset" ) )
    c.dataset = resolve( base, j["dataset"], "dataset" );
  if ( j.contains( "metadata" ) )
    c.metadata = resolve( base, j["metadata"], "metadata" );
  if ( j.contains( "backend" ) )
    c.backend = text( j["backend"], "backend" );
  if ( j.contains( "backends" ) )
  {
    if ( !j["backends"].is_object() )
      throw ConfigError( "backends must be a JSON object" );
    for ( auto const& [id, spec] : j["backends"].items() )
      c.backends[id] = backend_spec( id, spec, base );
  }
  if ( j.contains( "level" ) )
    c.level = level_of( text( j["level"], "level" ), "level" );
  if ( j.contains( "cex_iters" ) )
    c.cex_iters = static_cast<unsigned>( number( j["cex_iters"], "cex_iters" ) );
  if ( j.contains( "values" ) )
  {
    if ( !j["values"].is_array() )
      throw ConfigError( "values must be an array of integers" );
    c.values.clear();
    for ( auto const& v : j["values"] )
    {
      if ( !v.is_number_integer() )
        throw ConfigError( "values must be an array of integers" );
      c.values.push_back( v.get<std::int64_t>() );
    }
  }
  if ( j.contains( "max_value" ) )
    c.max_value = static_cast<std::int64_t>( number( j["max_value"], "max_value" ) );
  if ( j.contains( "jobs" ) )
    c.jobs = static_cast<unsigned>( number( j["jobs"], "jobs" ) );
  if ( j.contains( "runs" ) )
    c.runs = static_cast<unsigned>( number( j["runs"], "runs" ) );
  if ( j.contains( "check_timeout" ) )
    c.check_timeout = number( j["check_timeout"], "check_timeout" );
  if ( j.contains( "instance_ceiling" ) )
    c.instance_ceiling = number( j["instance_ceiling"], "instance_ceiling" );
  if ( j.contains( "keep_artifacts" ) )
  {
    if ( !j["keep_artifacts"].is_boolean() )
      throw ConfigError( "keep_artifacts must be a boolean" );
    c.keep_artifacts = j["keep_artifacts"].get<bool>();
  }
  if ( j.contains( "ledger" ) )
    c.ledger = resolve( base, j["ledger"], "ledger" );
  if ( j.contains( "artifacts" ) )
    c.artifacts = resolve( base, j["artifacts"], "artifacts" );
  if ( j.contains( "tools" ) )
  {
    check_keys( j["tools"], { "yosys", "aigtosmv", "nuxmv", "ltlfilt" }, "tools" );
    auto const& t = j["tools"];
    if ( t.contains( "yosys" ) )
      c.tools.yosys = resolve( base, t["yosys"], "tools.yosys" );
    if ( t.contains( "aigtosmv" ) )
      c.tools.aigtosmv = resolve( base, t["aigtosmv"], "tools.aigtosmv" );
    if ( t.contains( "nuxmv" ) )
      c.tools.nuxmv = resolve( base, t["nuxmv"], "tools.nuxmv" );
    if ( t.contains( "ltlfilt" ) )
      c.tools.ltlfilt = resolve( base, t["ltlfilt"], "tools.ltlfilt" );
  }
  if ( j.contains( "checker" ) )
    c.checker = checker_of( text( j["checker"], "checker" ) );
  if ( j.contains( "translation_cache" ) )
    c.translation_cache = resolve( base, j["translation_cache"], "translation_cache" );
  if ( j.contains( "work_root" ) )
    c.work_root = resolve( base, j["work_root"], "work_root" );
}

} // namespace

RunConfig apply_config_file( RunConfig base, std::filesystem::path const& file )
{
  std::ifstream in( file );
  if ( !in )
    throw ConfigError( "cannot read configuration " + file.string() );
  json j;
  try
  {
    j = json::parse( in );
  }
  catch ( json::exception const& e )
  {
    throw ConfigError( file.string() + ": " + e.what() );
  }
  apply( base, j, std::filesystem::absolute( file ).parent_path(), file.string() );
  return base;
}

void validate( RunConfig const& c )
{
  if ( c.jobs == 0 )
    throw ConfigError( "jobs must be at least 1" );
  if ( c.runs == 0 )
    throw ConfigError( "runs must be at least 1" );
  if ( c.check_timeout <= 0 )
    throw ConfigError( "check_timeout must be positive" );
  std::error_code ec;
  if ( c.dataset.empty() || !std::filesystem::is_directory( c.dataset, ec ) )
    throw ConfigError( "dataset directory " + c.dataset.string() + " does not exist" );
  auto const it = c.backends.find( c.backend );
  if ( it == c.backends.end() )
    throw ConfigError( "backend \"" + c.backend + "\" is not configured" );
  auto const& spec = it->second;
  if ( spec.type == "scripted" )
  {
    if ( !std::filesystem::is_directory( spec.fixtures, ec ) )
      throw ConfigError( "fixture directory " + spec.fixtures.string() + " of backend " + c.backend +
                         " does not exist" );
  }
  else if ( !spec.remote.level_knobs.count( c.level ) )
  {
    throw ConfigError( "backend " + c.backend + " has no mapping for reasoning level " +
                       std::string( backend::level_name( c.level ) ) );
  }
  if ( std::adjacent_find( c.values.begin(), c.values.end(), std::greater_equal<>() ) != c.values.end() )
    throw ConfigError( "values must be strictly ascending" );
}

std::unique_ptr<backend::Backend> make_backend( RunConfig const& config, backend::RemoteBackend::Log log )
{
  validate( config );
  auto const& spec = config.backends.at( config.backend );
  if ( spec.type == "scripted" )
    return std::make_unique<backend::ScriptedBackend>( spec.fixtures, config.backend );
  try
  {
    return std::make_unique<backend::RemoteBackend>( spec.remote, std::move( log ) );
  }
  catch ( backend::ConfigError const& e )
  {
    throw ConfigError( e.what() );
  }
}

} // namespace natsyn::harness
