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
#include <atomic>
#include <ctime>
#include <fstream>
#include <sstream>
#include <thread>

namespace natsyn::harness
{

namespace
{

using ojson = nlohmann::ordered_json;
using clock = std::chrono::steady_clock;

std::string slurp( std::filesystem::path const& p )
{
  std::ifstream in( p, std::ios::binary );
  if ( !in )
    throw std::runtime_error( "cannot read " + p.string() );
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string utc_now()
{
  auto const t = std::time( nullptr );
  std::tm tm{};
  gmtime_r( &t, &tm );
  char buf[32];
  std::strftime( buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm );
  return buf;
}

struct Task
{
  DatasetInstance const* instance = nullptr;
  unsigned run = 0;
  std::vector<std::int64_t> values; // parameterized only
  LedgerRecord skeleton;
};

std::vector<std::int64_t> default_ladder( std::int64_t max_value )
{
  std::vector<std::int64_t> v{ 2, 3, max_value };
  std::sort( v.begin(), v.end() );
  v.erase( std::unique( v.begin(), v.end() ), v.end() );
  v.erase( std::remove_if( v.begin(), v.end(), []( std::int64_t x ) { return x < 1; } ), v.end() );
  return v;
}

void fill_attempts( LedgerRecord& r, engine::Outcome const& o )
{
  r.status = std::string( engine::status_name( o.status ) );
  r.role = o.role ? std::string( verilog::role_name( *o.role ) ) : std::string{};
  r.iterations_used = o.iterations_used;
  r.error_stage = o.error_stage == engine::Stage::None ? std::string{} : std::string( engine::stage_name( o.error_stage ) );
  r.detail = o.detail;
  for ( auto const& it : o.iterations )
  {
    AttemptRecord a;
    a.index = it.index;
    a.prompt_kind = std::string( backend::kind_name( it.prompt_kind ) );
    a.prompt_hash = it.prompt_hash;
    a.reasoning_tokens = it.tokens.reasoning;
    a.output_tokens = it.tokens.output;
    a.latency_seconds = it.latency_seconds;
    a.role = it.role ? std::string( verilog::role_name( *it.role ) ) : std::string{};
    for ( auto const& v : it.verdicts )
      a.verdicts.emplace_back( toolchain::kind_name( v.kind ) );
    a.stopped_at = it.stopped_at == engine::Stage::None ? std::string{} : std::string( engine::stage_name( it.stopped_at ) );
    a.detail = it.detail;
    r.attempts.push_back( std::move( a ) );
  }
}

void total_tokens( LedgerRecord& r )
{
  r.reasoning_tokens = 0;
  r.output_tokens = 0;
  for ( auto const& a : r.attempts )
  {
    r.reasoning_tokens += a.reasoning_tokens;
    r.output_tokens += a.output_tokens;
  }
}

ojson natural_extra( engine::NaturalOutcome const& no )
{
  ojson j;
  j["route"] = std::string( engine::route_name( no.route ) );
  auto attempts = ojson::array();
  for ( auto const& a : no.autoformalization.attempts )
    attempts.push_back( { { "parsed", a.parsed }, { "diagnostic", a.diagnostic } } );
  j["autoformalization"] = { { "attempts", attempts }, { "parseable", no.autoformalization.parseable() } };
  j["equivalence"] = no.equivalence ? std::string( toolchain::kind_name( no.equivalence->kind ) ) : std::string{};
  j["against_ground_truth"] = std::string( engine::kind_name( no.against_ground_truth.kind ) );
  j["against_autoformalized"] = std::string( engine::kind_name( no.against_autoformalized.kind ) );
  return j;
}

std::vector<AttemptRecord> autoformalization_attempts( engine::Autoformalization const& af )
{
  std::vector<AttemptRecord> out;
  for ( std::size_t k = 0; k < af.attempts.size(); ++k )
  {
    AttemptRecord a;
    a.index = static_cast<unsigned>( k );
    a.prompt_kind = k == 0 ? "autoformalize" : "autoformalize-repair";
    a.reasoning_tokens = af.attempts[k].tokens.reasoning;
    a.output_tokens = af.attempts[k].tokens.output;
    a.stopped_at = af.attempts[k].parsed ? "" : "parse";
    a.detail = af.attempts[k].diagnostic;
    out.push_back( std::move( a ) );
  }
  return out;
}

} // namespace

std::size_t seed_translation_cache( std::filesystem::path const& manifest, std::filesystem::path const& cache_dir )
{
  toolchain::TranslationCache const cache( cache_dir );
  auto const base = manifest.parent_path();
  std::istringstream lines( slurp( manifest ) );
  std::string line;
  std::size_t written = 0;
  std::size_t number = 0;
  while ( std::getline( lines, line ) )
  {
    ++number;
    if ( line.empty() || line[0] == '#' )
      continue;
    std::vector<std::string> cols;
    std::istringstream fields( line );
    for ( std::string col; std::getline( fields, col, '\t' ); )
      cols.push_back( col );
    auto const where = manifest.string() + ":" + std::to_string( number );
    if ( cols.size() != 2 && cols.size() != 4 )
      throw std::runtime_error( where + ": expected 2 or 4 tab-separated columns" );
    auto const module = verilog::parse_module( slurp( base / cols[0] ) );
    auto const circuit = verilog::parse_aiger( slurp( base / cols[1] ) );
    if ( cols.size() == 2 )
    {
      cache.store( module, circuit );
      ++written;
      continue;
    }
    auto const eq = cols[3].find( '=' );
    if ( eq == std::string::npos )
      throw std::runtime_error( where + ": expected param=value" );
    auto const parameter = cols[3].substr( 0, eq );
    auto const value = std::stoll( cols[3].substr( eq + 1 ) );
    auto const spec = tlsf::parse_tlsf( tlsf::strip_metadata( slurp( base / cols[2] ) ) );
    auto const problem = tlsf::expand_semantics( tlsf::instantiate( spec, { { parameter, value } } ) );
    auto const top = verilog::parse_module( engine::wrap_parameterized( module, problem, parameter, value ) );
    cache.store( top, circuit );
    ++written;
  }
  return written;
}

RunSummary run_benchmark( RunConfig const& config, std::function<void( std::string_view )> log )
{
  validate( config );
  auto backend = make_backend( config );
  auto const dataset = load_dataset( config.dataset, config.metadata );

  RunSummary summary;
  summary.quarantined = dataset.quarantined;

  toolchain::ToolchainConfig tc;
  tc.configured = config.tools;
  tc.work_root = config.work_root;
  tc.keep_artifacts = config.keep_artifacts;
  tc.translation_cache = config.translation_cache;
  tc.checker = config.checker;
  tc.heavy_slots = config.jobs;
  toolchain::Toolchain const tools( tc );
  std::map<std::string, std::string> versions;
  for ( auto const& [tool, v] : tools.versions() )
    versions[tool] = v;

  engine::EngineOptions eo;
  eo.check.limits.wall_timeout = std::chrono::duration<double>( config.check_timeout );
  eo.translate_limits.wall_timeout = std::chrono::duration<double>( config.check_timeout );
  eo.instance_ceiling = std::chrono::duration<double>( config.instance_ceiling );
  std::mutex log_mutex;
  auto say = [&]( std::string const& message ) {
    if ( !log )
      return;
    std::lock_guard lock( log_mutex );
    log( message );
  };
  eo.log = [&]( std::string_view m ) { say( std::string( m ) ); };

  RunLedger ledger( config.ledger );
  auto const artifacts_dir =
      config.artifacts.empty() ? config.ledger.parent_path() / "natsyn-artifacts" : config.artifacts;

  // Select the tasks.
  std::vector<std::pair<DatasetInstance const*, std::vector<std::int64_t>>> selected;
  switch ( config.workflow )
  {
  case Workflow::Synthesis:
    for ( auto const& i : dataset.instances )
      selected.push_back( { &i, {} } );
    break;
  case Workflow::Parameterized:
  {
    auto const families = dataset.families();
    std::set<std::string> covered;
    for ( auto const& [key, members] : families )
    {
      std::vector<std::int64_t> values = config.values;
      if ( values.empty() )
        for ( auto const* m : members )
          values.push_back( *m->parameter_value );
      std::sort( values.begin(), values.end() );
      values.erase( std::unique( values.begin(), values.end() ), values.end() );
      selected.push_back( { members.back(), values } );
      covered.insert( key );
    }
    for ( auto const& i : dataset.instances )
      if ( i.parameter_value && !covered.count( i.family ) )
        selected.push_back( { &i, config.values.empty() ? default_ladder( config.max_value ) : config.values } );
    std::sort( selected.begin(), selected.end(),
               []( auto const& a, auto const& b ) { return a.first->id < b.first->id; } );
    break;
  }
  case Workflow::NaturalAuto:
  case Workflow::NaturalDirect:
    for ( auto const& i : dataset.instances )
      if ( i.nl_path )
        selected.push_back( { &i, {} } );
    break;
  }

  std::vector<Task> tasks;
  for ( unsigned run = 0; run < config.runs; ++run )
    for ( auto const& [inst, values] : selected )
    {
      Task t;
      t.instance = inst;
      t.run = run;
      t.values = values;
      auto& r = t.skeleton;
      r.instance = inst->id;
      r.workflow = std::string( workflow_name( config.workflow ) );
      r.backend = config.backend;
      r.level = std::string( backend::level_name( config.level ) );
      r.budget = config.cex_iters;
      r.run = run;
      r.realizability = std::string( realizability_name( inst->realizability ) );
      r.tool_versions = versions;
      if ( ledger.contains( r.key() ) )
      {
        ++summary.skipped;
        continue;
      }
      tasks.push_back( std::move( t ) );
    }

  std::atomic<std::size_t> next{ 0 };
  auto worker = [&] {
    for ( ;; )
    {
      auto const k = next++;
      if ( k >= tasks.size() )
        return;
      auto const& task = tasks[k];
      auto r = task.skeleton;
      auto const started = clock::now();
      std::optional<verilog::Role> expected;
      if ( task.instance->realizability == Realizability::Realizable )
        expected = verilog::Role::Solution;
      else if ( task.instance->realizability == Realizability::Unrealizable )
        expected = verilog::Role::Environment;
      engine::InstanceHints const hints{ expected };
      engine::Engine eng( *backend, tools, eo );
      std::optional<verilog::VerilogModule> final_module;
      try
      {
        auto const spec_text = slurp( task.instance->spec_path );
        switch ( config.workflow )
        {
        case Workflow::Synthesis:
        {
          auto const o = eng.run_instance( spec_text, config.level, config.cex_iters, hints );
          fill_attempts( r, o );
          final_module = o.final_module;
          r.extra = ojson{ { "role_mismatch", o.role_mismatch } }.dump();
          break;
        }
        case Workflow::Parameterized:
        {
          auto const po = eng.run_parameterized( spec_text, task.values, config.level, config.cex_iters, hints );
          fill_attempts( r, po.outcome );
          final_module = po.outcome.final_module;
          ojson extra;
          extra["parameter"] = po.parameter;
          extra["values"] = po.values;
          extra["tested"] = po.tested;
          extra["first_failing"] = po.first_failing ? ojson( *po.first_failing ) : ojson( nullptr );
          extra["soundness"] = std::string( engine::ParamOutcome::soundness );
          r.extra = extra.dump();
          break;
        }
        case Workflow::NaturalAuto:
        case Workflow::NaturalDirect:
        {
          auto const nl = slurp( *task.instance->nl_path );
          auto const truth = slurp( task.instance->ground_truth_path.value_or( task.instance->spec_path ) );
          auto const route =
              config.workflow == Workflow::NaturalAuto ? engine::Route::ViaAutoformalization : engine::Route::Direct;
          auto const no = eng.run_natural( nl, truth, config.level, route, config.cex_iters, hints );
          r.attempts = autoformalization_attempts( no.autoformalization );
          LedgerRecord synth;
          fill_attempts( synth, no.synthesis );
          r.status = synth.status;
          r.role = synth.role;
          r.iterations_used = synth.iterations_used;
          r.error_stage = synth.error_stage;
          r.detail = synth.detail;
          r.attempts.insert( r.attempts.end(), synth.attempts.begin(), synth.attempts.end() );
          final_module = no.synthesis.final_module;
          r.extra = natural_extra( no ).dump();
          break;
        }
        }
      }
      catch ( std::exception const& e )
      {
        r.status = std::string( engine::status_name( engine::Status::Error ) );
        r.error_stage = "harness";
        r.detail = e.what();
      }
      total_tokens( r );
      if ( config.keep_artifacts && final_module )
      {
        auto const dir = artifacts_dir / backend::content_hash( r.key() );
        std::filesystem::create_directories( dir );
        std::ofstream( dir / "final.v", std::ios::binary ) << final_module->source;
        r.artifacts.push_back( ( dir / "final.v" ).string() );
      }
      auto const wall = std::chrono::duration<double>( clock::now() - started ).count();
      r.timing = ojson{ { "finished", utc_now() }, { "wall_seconds", wall } }.dump();
      ledger.append( r );
      say( r.instance + " [" + r.workflow + ", run " + std::to_string( r.run ) + "]: " + r.status +
           ( r.status == "error" ? " (" + r.error_stage + ": " + r.detail + ")"
                                 : " after " + std::to_string( r.iterations_used ) + " repair iteration(s)" ) );
    }
  };
  std::vector<std::thread> pool;
  auto const n = std::min<std::size_t>( config.jobs, std::max<std::size_t>( tasks.size(), 1 ) );
  for ( std::size_t i = 1; i < n; ++i )
    pool.emplace_back( worker );
  worker();
  for ( auto& t : pool )
    t.join();
  summary.executed = tasks.size();

  std::set<std::string> wanted;
  for ( unsigned run = 0; run < config.runs; ++run )
    for ( auto const& [inst, _] : selected )
    {
      LedgerRecord k;
      k.instance = inst->id;
      k.workflow = std::string( workflow_name( config.workflow ) );
      k.backend = config.backend;
      k.level = std::string( backend::level_name( config.level ) );
      k.budget = config.cex_iters;
      k.run = run;
      wanted.insert( k.key() );
    }
  for ( auto const& r : latest( ledger.read() ) )
    if ( wanted.count( r.key() ) && r.status == "error" )
      ++summary.errors;
  return summary;
}

} // namespace natsyn::harness
