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

// Command-line front end: run, report, compile, prompt, fixture-key, seed-cache.

#include <natsyn/harness.hpp>

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

namespace
{

using namespace natsyn;

std::string slurp( std::string const& path )
{
  std::ifstream in( path, std::ios::binary );
  if ( !in )
    throw std::runtime_error( "cannot read " + path );
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

/// Metadata-free text, or the text itself when it does not parse.
std::string strip_or_keep( std::string const& text )
{
  try
  {
    return tlsf::strip_metadata( text );
  }
  catch ( std::exception const& )
  {
    return text;
  }
}

std::vector<std::int64_t> parse_values( std::string const& list )
{
  std::vector<std::int64_t> out;
  std::istringstream in( list );
  for ( std::string item; std::getline( in, item, ',' ); )
  {
    if ( item.empty() )
      continue;
    std::size_t used = 0;
    auto const v = std::stoll( item, &used );
    if ( used != item.size() )
      throw harness::ConfigError( "--values: not an integer: " + item );
    out.push_back( v );
  }
  return out;
}

std::map<std::string, std::int64_t> parse_bindings( std::vector<std::string> const& items )
{
  std::map<std::string, std::int64_t> out;
  for ( auto const& item : items )
  {
    auto const eq = item.find( '=' );
    if ( eq == std::string::npos )
      throw std::invalid_argument( "--param expects name=value, got " + item );
    out[item.substr( 0, eq )] = std::stoll( item.substr( eq + 1 ) );
  }
  return out;
}

} // namespace

int main( int argc, char** argv )
{
  CLI::App app{ "natsyn: counterexample-guided reactive synthesis with reasoning-model backends" };
  app.require_subcommand( 1 );

  // ---- run
  auto* run = app.add_subcommand( "run", "Run a workflow over a dataset and append to the ledger" );
  std::string config_file, workflow, dataset, metadata, backend_id, level, values, ledger, checker, cache, fixtures,
      artifacts;
  unsigned cex_iters = 0, jobs = 0, runs = 0;
  double check_timeout = 0;
  bool keep_artifacts = false;
  run->add_option( "--config", config_file, "JSON configuration file" )->check( CLI::ExistingFile );
  run->add_option( "--workflow", workflow, "synthesis | parameterized | natural-auto | natural-direct" );
  run->add_option( "--dataset", dataset, "Directory of .tlsf files" );
  run->add_option( "--metadata", metadata, "Metadata manifest (default: <dataset>/metadata.json)" );
  run->add_option( "--backend", backend_id, "Backend id from the configuration" );
  run->add_option( "--fixtures", fixtures, "Define the backend as a scripted backend replaying this directory" );
  run->add_option( "--level", level, "none | low | medium | high | xhigh" );
  run->add_option( "--cex-iters", cex_iters, "Repair iterations after the first attempt" );
  run->add_option( "--values", values, "Parameter values, comma separated and ascending" );
  run->add_option( "--jobs", jobs, "Concurrent instances" );
  run->add_option( "--runs", runs, "Repetitions of the whole run" );
  run->add_option( "--check-timeout", check_timeout, "Seconds per tool invocation" );
  run->add_flag( "--keep-artifacts", keep_artifacts, "Keep tool scratch directories and final modules" );
  run->add_option( "--ledger", ledger, "Ledger file (JSON lines)" );
  run->add_option( "--artifacts", artifacts, "Directory for kept artifacts" );
  run->add_option( "--checker", checker, "auto | external | builtin | both" );
  run->add_option( "--translation-cache", cache, "Directory of cached circuit translations" );

  // ---- report
  auto* report = app.add_subcommand( "report", "Summarize a ledger" );
  std::string report_ledger, format = "table";
  report->add_option( "--ledger", report_ledger, "Ledger file" )->required()->check( CLI::ExistingFile );
  report->add_option( "--format", format, "table | csv | audit" )
      ->check( CLI::IsMember( { "table", "csv", "audit" } ) );

  // ---- compile
  auto* compile = app.add_subcommand( "compile", "Print the LTL problem of a TLSF specification" );
  std::string spec_file, dialect = "tlsf", decomposition;
  std::vector<std::string> params;
  compile->add_option( "spec", spec_file, "TLSF file" )->required()->check( CLI::ExistingFile );
  compile->add_option( "--param", params, "Parameter binding name=value (repeatable)" );
  compile->add_option( "--dialect", dialect, "tlsf | smv | spot" )->check( CLI::IsMember( { "tlsf", "smv", "spot" } ) );
  compile->add_option( "--decompose", decomposition, "realizable | unrealizable" )
      ->check( CLI::IsMember( { "realizable", "unrealizable" } ) );

  // ---- prompt
  auto* prompt = app.add_subcommand( "prompt", "Print a prompt" );
  std::string prompt_kind, prompt_input;
  unsigned prompt_attempt = 0;
  prompt->add_option( "--kind", prompt_kind, "synthesis | param-synthesis | autoformalize | direct-nl" )
      ->required()
      ->check( CLI::IsMember( { "synthesis", "param-synthesis", "autoformalize", "direct-nl" } ) );
  prompt->add_option( "input", prompt_input, "TLSF or natural-language file" )->required()->check( CLI::ExistingFile );
  prompt->add_option( "--attempt", prompt_attempt, "Attempt index" );

  // ---- fixture-key
  auto* key = app.add_subcommand( "fixture-key", "Print the scripted-backend fixture stem of a prompt" );
  std::string key_kind, key_input;
  unsigned key_attempt = 0;
  key->add_option( "--kind", key_kind, "Prompt kind" )
      ->required()
      ->check( CLI::IsMember(
          { "synthesis", "repair", "param-synthesis", "autoformalize", "autoformalize-repair", "direct-nl" } ) );
  key->add_option( "input", key_input, "TLSF or natural-language file" )->required()->check( CLI::ExistingFile );
  key->add_option( "--attempt", key_attempt, "Attempt index" );

  // ---- seed-cache
  auto* seed = app.add_subcommand( "seed-cache", "Import pre-translated circuits into a translation cache" );
  std::string manifest, cache_dir;
  seed->add_option( "--manifest", manifest, "Manifest file" )->required()->check( CLI::ExistingFile );
  seed->add_option( "--cache", cache_dir, "Cache directory" )->required();

  CLI11_PARSE( app, argc, argv );

  try
  {
    if ( *run )
    {
      harness::RunConfig c;
      if ( !config_file.empty() )
        c = harness::apply_config_file( c, config_file );
      if ( run->count( "--workflow" ) )
      {
        auto const w = harness::parse_workflow( workflow );
        if ( !w )
          throw harness::ConfigError( "unknown workflow " + workflow );
        c.workflow = *w;
      }
      if ( run->count( "--dataset" ) )
        c.dataset = dataset;
      if ( run->count( "--metadata" ) )
        c.metadata = metadata;
      if ( run->count( "--backend" ) )
        c.backend = backend_id;
      if ( run->count( "--fixtures" ) )
      {
        harness::BackendSpec s;
        s.type = "scripted";
        s.fixtures = fixtures;
        c.backends[c.backend] = s;
      }
      if ( run->count( "--level" ) )
      {
        auto const l = backend::parse_level( level );
        if ( !l )
          throw harness::ConfigError( "unsupported reasoning level " + level );
        c.level = *l;
      }
      if ( run->count( "--cex-iters" ) )
        c.cex_iters = cex_iters;
      if ( run->count( "--values" ) )
        c.values = parse_values( values );
      if ( run->count( "--jobs" ) )
        c.jobs = jobs;
      if ( run->count( "--runs" ) )
        c.runs = runs;
      if ( run->count( "--check-timeout" ) )
        c.check_timeout = check_timeout;
      if ( keep_artifacts )
        c.keep_artifacts = true;
      if ( run->count( "--ledger" ) )
        c.ledger = ledger;
      if ( run->count( "--artifacts" ) )
        c.artifacts = artifacts;
      if ( run->count( "--translation-cache" ) )
        c.translation_cache = cache;
      if ( run->count( "--checker" ) )
      {
        static std::map<std::string, toolchain::CheckerChoice> const choices{
            { "auto", toolchain::CheckerChoice::Auto },
            { "external", toolchain::CheckerChoice::External },
            { "builtin", toolchain::CheckerChoice::Builtin },
            { "both", toolchain::CheckerChoice::Both } };
        auto const it = choices.find( checker );
        if ( it == choices.end() )
          throw harness::ConfigError( "checker must be auto, external, builtin or both" );
        c.checker = it->second;
      }
      auto const summary = harness::run_benchmark( c, []( std::string_view line ) { std::cerr << line << '\n'; } );
      for ( auto const& q : summary.quarantined )
        std::cerr << "quarantined " << q.path.string() << ": " << q.reason << '\n';
      std::cout << "executed " << summary.executed << ", skipped " << summary.skipped << ", errors "
                << summary.errors << '\n';
      return summary.errors == 0 ? 0 : 1;
    }
    if ( *report )
    {
      auto const records = harness::RunLedger( report_ledger ).read();
      if ( format == "audit" )
        std::cout << harness::render_audit( records );
      else if ( format == "csv" )
        std::cout << harness::render_token_csv( harness::summarize( records ) );
      else
        std::cout << harness::render_table( harness::summarize( records ) );
      return 0;
    }
    if ( *compile )
    {
      auto const spec = tlsf::parse_tlsf( tlsf::strip_metadata( slurp( spec_file ) ) );
      auto const problem = tlsf::expand_semantics( tlsf::instantiate( spec, parse_bindings( params ) ) );
      auto const d = dialect == "smv" ? ltl::Dialect::Smv : dialect == "spot" ? ltl::Dialect::Spot
                                                                               : ltl::Dialect::TlsfExpr;
      std::cout << "inputs:";
      for ( auto const& a : problem.inputs )
        std::cout << ' ' << a;
      std::cout << "\noutputs:";
      for ( auto const& a : problem.outputs )
        std::cout << ' ' << a;
      std::cout << '\n';
      if ( decomposition.empty() )
        std::cout << ltl::render( problem.phi, d ) << '\n';
      else
      {
        auto const subs = decomposition == "realizable" ? ltl::decompose_realizable( problem )
                                                        : ltl::decompose_unrealizable( problem );
        for ( auto const& f : subs )
          std::cout << ltl::render( f, d ) << '\n';
      }
      return 0;
    }
    if ( *prompt || *key )
    {
      auto const& kind = *prompt ? prompt_kind : key_kind;
      auto const text = slurp( *prompt ? prompt_input : key_input );
      auto const attempt = *prompt ? prompt_attempt : key_attempt;
      backend::PromptBundle b;
      if ( kind == "synthesis" || kind == "repair" )
      {
        b = backend::build_synthesis_prompt( strip_or_keep( text ), attempt );
        if ( kind == "repair" )
          b.kind = backend::PromptKind::Repair;
      }
      else if ( kind == "param-synthesis" )
        b = backend::build_param_prompt( tlsf::strip_metadata( text ), attempt );
      else if ( kind == "autoformalize" || kind == "autoformalize-repair" )
      {
        b = backend::build_autoformalization_prompt( text, attempt );
        if ( kind == "autoformalize-repair" )
          b.kind = backend::PromptKind::AutoformalizeRepair;
      }
      else
        b = backend::build_directnl_prompt( text, attempt );
      std::cout << ( *prompt ? b.text : backend::ScriptedBackend::fixture_stem( b ) + "\n" );
      return 0;
    }
    if ( *seed )
    {
      auto const n = harness::seed_translation_cache( manifest, cache_dir );
      std::cout << "seeded " << n << " cache entries into " << cache_dir << '\n';
      return 0;
    }
  }
  catch ( harness::ConfigError const& e )
  {
    std::cerr << "configuration error: " << e.what() << '\n';
    return 2;
  }
  catch ( std::exception const& e )
  {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
