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

#include <natsyn/toolchain.hpp>

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

namespace natsyn::toolchain
{

namespace
{

std::string slurp( std::filesystem::path const& p )
{
  std::ifstream in( p, std::ios::binary );
  if ( !in )
    throw std::runtime_error( "cannot read " + p.string() );
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void spit( std::filesystem::path const& p, std::string const& text )
{
  std::ofstream out( p, std::ios::binary );
  out << text;
  if ( !out )
    throw std::runtime_error( "cannot write " + p.string() );
}

std::string first_line( std::string const& text )
{
  auto const b = text.find_first_not_of( "\r\n" );
  if ( b == std::string::npos )
    return {};
  auto const e = text.find_first_of( "\r\n", b );
  return text.substr( b, e == std::string::npos ? std::string::npos : e - b );
}

/// Circuit atoms as keys: the normalized symbol names.
verilog::AigerCircuit with_normalized_symbols( verilog::AigerCircuit c )
{
  for ( std::size_t k = 0; k < c.inputs.size(); ++k )
  {
    c.input_names.resize( c.inputs.size() );
    c.input_names[k] = c.input_atom( k );
  }
  for ( std::size_t k = 0; k < c.outputs.size(); ++k )
  {
    c.output_names.resize( c.outputs.size() );
    c.output_names[k] = c.output_atom( k );
  }
  return c;
}

std::vector<std::string> default_atoms( verilog::AigerCircuit const& c )
{
  std::vector<std::string> atoms;
  for ( std::size_t k = 0; k < c.inputs.size(); ++k )
    atoms.push_back( c.input_atom( k ) );
  for ( std::size_t k = 0; k < c.outputs.size(); ++k )
    atoms.push_back( c.output_atom( k ) );
  return atoms;
}

CheckVerdict tool_error( std::string checker, std::string detail )
{
  CheckVerdict v;
  v.kind = CheckVerdict::Kind::ToolError;
  v.checker = std::move( checker );
  v.detail = std::move( detail );
  return v;
}

} // namespace

std::string_view kind_name( CheckVerdict::Kind k )
{
  switch ( k )
  {
  case CheckVerdict::Kind::Pass:
    return "pass";
  case CheckVerdict::Kind::Fail:
    return "fail";
  case CheckVerdict::Kind::Timeout:
    return "timeout";
  case CheckVerdict::Kind::ToolError:
    return "tool-error";
  }
  return "?";
}

std::string_view kind_name( Equivalence::Kind k )
{
  switch ( k )
  {
  case Equivalence::Kind::Equivalent:
    return "equivalent";
  case Equivalence::Kind::Inequivalent:
    return "inequivalent";
  case Equivalence::Kind::Unknown:
    return "unknown";
  case Equivalence::Kind::Timeout:
    return "timeout";
  case Equivalence::Kind::ToolMissing:
    return "tool-missing";
  }
  return "?";
}

// ---- translation cache -------------------------------------------------------------

TranslationCache::TranslationCache( std::filesystem::path dir ) : dir_( std::move( dir ) ) {}

std::string TranslationCache::key( std::string_view module_name, std::string_view source )
{
  std::uint64_t h = 0xcbf29ce484222325ull;
  auto feed = [&]( unsigned char byte ) {
    h ^= byte;
    h *= 0x100000001b3ull;
  };
  for ( char c : module_name )
    feed( static_cast<unsigned char>( c ) );
  feed( 0 );
  for ( char c : source )
    feed( static_cast<unsigned char>( c ) );
  char hex[17];
  std::snprintf( hex, sizeof hex, "%016llx", static_cast<unsigned long long>( h ) );
  return hex;
}

std::optional<verilog::AigerCircuit> TranslationCache::lookup( verilog::VerilogModule const& m ) const
{
  auto const stem = dir_ / key( m.name, m.source );
  std::error_code ec;
  if ( !std::filesystem::exists( stem.string() + ".aag", ec ) )
    return std::nullopt;
  // A key collision would show up as a different source next to the circuit.
  if ( std::filesystem::exists( stem.string() + ".v", ec ) && slurp( stem.string() + ".v" ) != m.source )
    return std::nullopt;
  return verilog::parse_aiger( slurp( stem.string() + ".aag" ) );
}

void TranslationCache::store( verilog::VerilogModule const& m, verilog::AigerCircuit const& c ) const
{
  std::filesystem::create_directories( dir_ );
  auto const stem = dir_ / key( m.name, m.source );
  spit( stem.string() + ".v", m.source );
  spit( stem.string() + ".aag", verilog::render_aiger( c ) );
}

// ---- driver ------------------------------------------------------------------------

Toolchain::Toolchain( ToolchainConfig config ) : config_( std::move( config ) ), slots_( std::make_shared<Slots>() )
{
  paths_.yosys = find_tool( config_.configured.yosys, { "yosys" } );
  paths_.aigtosmv = find_tool( config_.configured.aigtosmv, { "aigtosmv" } );
  paths_.nuxmv = find_tool( config_.configured.nuxmv, { "nuXmv", "nuxmv" } );
  paths_.ltlfilt = find_tool( config_.configured.ltlfilt, { "ltlfilt" } );
  slots_->free = std::max<std::size_t>( 1, config_.heavy_slots );
}

std::filesystem::path Toolchain::scratch( std::string_view purpose ) const
{
  auto root = config_.work_root.empty() ? std::filesystem::temp_directory_path() : config_.work_root;
  std::filesystem::create_directories( root );
  std::string pattern = ( root / ( "natsyn-" + std::string( purpose ) + "-XXXXXX" ) ).string();
  if ( ::mkdtemp( pattern.data() ) == nullptr )
    throw std::system_error( errno, std::generic_category(), "mkdtemp " + pattern );
  return pattern;
}

void Toolchain::release( std::filesystem::path const& dir ) const
{
  if ( !config_.keep_artifacts )
  {
    std::error_code ec;
    std::filesystem::remove_all( dir, ec );
  }
}

std::map<std::string, std::string> Toolchain::versions() const
{
  std::map<std::string, std::string> out;
  ToolLimits const quick{ std::chrono::duration<double>( 10.0 ) };
  auto probe = [&]( std::string const& name, std::optional<std::filesystem::path> const& path,
                    std::vector<std::string> args, std::string const& input ) {
    if ( !path )
      return;
    args.insert( args.begin(), path->string() );
    try
    {
      auto const r = run_process( args, input, quick );
      auto line = first_line( r.out.empty() ? r.err : r.out );
      out[name] = line.empty() ? "present" : line;
    }
    catch ( std::exception const& e )
    {
      out[name] = std::string( "unavailable: " ) + e.what();
    }
  };
  probe( "yosys", paths_.yosys, { "-V" }, "" );
  probe( "nuxmv", paths_.nuxmv, { "-int" }, "quit\n" );
  probe( "ltlfilt", paths_.ltlfilt, { "--version" }, "" );
  if ( paths_.aigtosmv )
    out["aigtosmv"] = "present";
  return out;
}

verilog::AigerCircuit Toolchain::translate_to_aiger( verilog::VerilogModule const& m, ToolLimits const& limits,
                                                     std::vector<ToolReport>* reports ) const
{
  std::optional<TranslationCache> cache;
  if ( config_.translation_cache )
  {
    cache.emplace( *config_.translation_cache );
    if ( auto hit = cache->lookup( m ) )
      return with_normalized_symbols( std::move( *hit ) );
  }
  if ( !paths_.yosys )
    throw ToolMissing( "yosys" );

  auto const dir = scratch( "yosys" );
  spit( dir / "module.v", m.source );
  spit( dir / "script.ys", yosys_script( m.name ) );
  auto report = run_process( { paths_.yosys->string(), "-q", "-s", "script.ys", "module.v" }, "", limits, dir );
  report.tool = "yosys";
  if ( reports )
    reports->push_back( report );
  if ( report.timed_out )
  {
    release( dir );
    throw ToolTimeout( std::move( report ) );
  }
  if ( report.exit_status != 0 || !std::filesystem::exists( dir / "circuit.aag" ) )
  {
    release( dir );
    throw ToolFailed( std::move( report ) );
  }
  auto circuit = verilog::parse_aiger( slurp( dir / "circuit.aag" ) );
  release( dir );
  if ( cache )
  {
    try
    {
      cache->store( m, circuit );
    }
    catch ( std::exception const& )
    {
      // The cache is an optimization; a read-only directory is fine.
    }
  }
  return with_normalized_symbols( std::move( circuit ) );
}

std::vector<CheckVerdict> Toolchain::check_properties( verilog::AigerCircuit const& c,
                                                       std::vector<ltl::Formula> const& props,
                                                       CheckOptions const& options ) const
{
  std::vector<CheckVerdict> verdicts;
  auto const atoms = options.atoms.empty() ? default_atoms( c ) : options.atoms;
  std::set<std::string> const circuit_atoms = [&] {
    auto const d = default_atoms( c );
    return std::set<std::string>( d.begin(), d.end() );
  }();

  if ( !can_check() )
  {
    for ( std::size_t i = 0; i < props.size(); ++i )
      verdicts.push_back( tool_error( "nuxmv", ToolMissing( paths_.aigtosmv ? "nuXmv" : "aigtosmv" ).what() ) );
    return verdicts;
  }

  auto const dir = scratch( "check" );
  spit( dir / "circuit.aag", verilog::render_aiger( with_normalized_symbols( c ) ) );
  spit( dir / "check.cmd", nuxmv_script() );
  ToolReport translation;
  try
  {
    translation = run_process( { paths_.aigtosmv->string(), "circuit.aag", "circuit.smv" }, "", options.limits, dir );
  }
  catch ( std::exception const& e )
  {
    release( dir );
    for ( std::size_t i = 0; i < props.size(); ++i )
      verdicts.push_back( tool_error( "nuxmv", e.what() ) );
    return verdicts;
  }
  translation.tool = "aigtosmv";
  if ( translation.timed_out || translation.exit_status != 0 || !std::filesystem::exists( dir / "circuit.smv" ) )
  {
    release( dir );
    for ( std::size_t i = 0; i < props.size(); ++i )
    {
      auto v = tool_error( "nuxmv", "AIGER to SMV translation failed: " + first_line( translation.err ) );
      v.reports.push_back( translation );
      verdicts.push_back( std::move( v ) );
    }
    return verdicts;
  }
  auto const model = slurp( dir / "circuit.smv" );

  for ( std::size_t i = 0; i < props.size(); ++i )
  {
    auto const& prop = props[i];
    std::string missing;
    for ( auto const& a : ltl::atoms_of( prop ) )
    {
      if ( !circuit_atoms.count( a ) )
      {
        missing = a;
        break;
      }
    }
    if ( missing.empty() )
    {
      for ( auto const& a : atoms )
      {
        if ( !circuit_atoms.count( a ) )
        {
          missing = a;
          break;
        }
      }
    }
    if ( !missing.empty() )
    {
      verdicts.push_back( tool_error( "nuxmv", "atom '" + missing + "' is not a port of the circuit" ) );
      continue;
    }

    auto const file = "property_" + std::to_string( i ) + ".smv";
    spit( dir / file, model + "\nLTLSPEC " + ltl::render( prop, ltl::Dialect::Smv ) + "\n" );
    ToolReport report;
    {
      std::unique_lock lock( slots_->mutex );
      slots_->cv.wait( lock, [&] { return slots_->free > 0; } );
      --slots_->free;
    }
    try
    {
      report = run_process( { paths_.nuxmv->string(), "-source", "check.cmd", file }, "", options.limits, dir );
    }
    catch ( std::exception const& e )
    {
      report.err = e.what();
      report.exit_status = -1;
    }
    {
      std::lock_guard lock( slots_->mutex );
      ++slots_->free;
    }
    slots_->cv.notify_one();
    report.tool = "nuxmv";

    CheckVerdict v;
    v.checker = "nuxmv";
    v.reports = { translation, report };
    if ( report.timed_out )
    {
      v.kind = CheckVerdict::Kind::Timeout;
      v.detail = "model checker exceeded " + std::to_string( options.limits.wall_timeout.count() ) + " s";
      verdicts.push_back( std::move( v ) );
      continue;
    }
    auto const parsed = parse_nuxmv_output( report.out );
    if ( parsed.verdict == SmvOutput::Verdict::True )
    {
      v.kind = CheckVerdict::Kind::Pass;
    }
    else if ( parsed.verdict == SmvOutput::Verdict::False && parsed.counterexample )
    {
      v.kind = CheckVerdict::Kind::ToolError;
      v.detail = "counterexample did not replay on the circuit";
      try
      {
        for ( auto& candidate : counterexample_lassos( *parsed.counterexample, atoms ) )
        {
          if ( verilog::replays( c, candidate ) && !ltl::eval_lasso( prop, candidate ) )
          {
            v.kind = CheckVerdict::Kind::Fail;
            v.trace = std::move( candidate );
            v.detail.clear();
            break;
          }
        }
      }
      catch ( std::exception const& e )
      {
        v.detail = std::string( "unreadable counterexample: " ) + e.what();
      }
    }
    else
    {
      v.kind = CheckVerdict::Kind::ToolError;
      v.detail = "unrecognized model checker output (exit " + std::to_string( report.exit_status ) +
                 "): " + first_line( report.err.empty() ? report.out : report.err );
    }
    verdicts.push_back( std::move( v ) );
  }
  release( dir );
  return verdicts;
}

std::vector<CheckVerdict> Toolchain::check_builtin( verilog::AigerCircuit const& c,
                                                    std::vector<ltl::Formula> const& props,
                                                    CheckOptions const& options ) const
{
  std::vector<CheckVerdict> verdicts;
  for ( auto const& prop : props )
  {
    CheckVerdict v;
    v.checker = "builtin";
    auto falsify = options.builtin;
    falsify.atoms = options.atoms;
    auto const deadline = std::chrono::steady_clock::now() +
                          std::chrono::duration_cast<std::chrono::steady_clock::duration>( options.limits.wall_timeout );
    falsify.deadline = falsify.deadline ? std::min( *falsify.deadline, deadline ) : deadline;
    try
    {
      auto r = verilog::falsify_small( c, prop, falsify );
      if ( r.status == verilog::FalsifyResult::Status::Fail )
      {
        v.kind = CheckVerdict::Kind::Fail;
        v.trace = std::move( r.trace );
      }
      else if ( r.complete )
      {
        v.kind = CheckVerdict::Kind::Pass;
      }
      else
      {
        v.kind = CheckVerdict::Kind::Timeout;
        v.detail = "search stopped after " + std::to_string( r.product_nodes ) + " product states";
      }
    }
    catch ( ltl::BudgetExceeded const& e )
    {
      v.kind = CheckVerdict::Kind::ToolError;
      v.detail = e.what();
    }
    catch ( ltl::UnknownAtom const& e )
    {
      v.kind = CheckVerdict::Kind::ToolError;
      v.detail = std::string( "property or trace atom is not a port of the circuit: " ) + e.what();
    }
    verdicts.push_back( std::move( v ) );
  }
  return verdicts;
}

std::vector<CheckVerdict> Toolchain::verify( verilog::AigerCircuit const& c, std::vector<ltl::Formula> const& props,
                                             CheckOptions const& options ) const
{
  switch ( config_.checker )
  {
  case CheckerChoice::External:
    return check_properties( c, props, options );
  case CheckerChoice::Builtin:
    return check_builtin( c, props, options );
  case CheckerChoice::Auto:
    return can_check() ? check_properties( c, props, options ) : check_builtin( c, props, options );
  case CheckerChoice::Both:
    break;
  }
  auto external = check_properties( c, props, options );
  auto const builtin = check_builtin( c, props, options );
  auto conclusive = []( CheckVerdict const& v ) {
    return v.kind == CheckVerdict::Kind::Pass || v.kind == CheckVerdict::Kind::Fail;
  };
  for ( std::size_t i = 0; i < external.size(); ++i )
  {
    if ( conclusive( external[i] ) && conclusive( builtin[i] ) && external[i].kind != builtin[i].kind )
    {
      auto const detail = "checker disagreement: nuxmv says " + std::string( kind_name( external[i].kind ) ) +
                          ", builtin says " + std::string( kind_name( builtin[i].kind ) );
      external[i].kind = CheckVerdict::Kind::ToolError;
      external[i].trace.reset();
      external[i].detail = detail;
    }
  }
  return external;
}

Equivalence Toolchain::equivalence_check( ltl::Formula const& f, ltl::Formula const& g, ToolLimits const& limits,
                                          ltl::InequivOptions const& fallback ) const
{
  Equivalence out;
  if ( f == g )
  {
    out.kind = Equivalence::Kind::Equivalent;
    out.detail = "syntactically equal";
    return out;
  }
  auto bounded = [&]( ltl::InequivOptions opts ) {
    auto const deadline = std::chrono::steady_clock::now() +
                          std::chrono::duration_cast<std::chrono::steady_clock::duration>( limits.wall_timeout );
    opts.deadline = opts.deadline ? std::min( *opts.deadline, deadline ) : deadline;
    return ltl::bounded_inequiv( f, g, opts );
  };

  if ( paths_.ltlfilt )
  {
    try
    {
      auto const r = run_process( { paths_.ltlfilt->string(), "-f", ltl::render( f, ltl::Dialect::Spot ),
                                    "--equivalent-to", ltl::render( g, ltl::Dialect::Spot ) },
                                  "", limits );
      if ( r.timed_out )
      {
        out.kind = Equivalence::Kind::Timeout;
        out.detail = "ltlfilt exceeded its time limit";
        return out;
      }
      bool const printed = r.out.find_first_not_of( " \r\n" ) != std::string::npos;
      if ( r.exit_status == 0 && printed )
      {
        out.kind = Equivalence::Kind::Equivalent;
        return out;
      }
      if ( r.exit_status == 1 && !printed )
      {
        out.kind = Equivalence::Kind::Inequivalent;
        try
        {
          auto const w = bounded( fallback );
          if ( w.status == ltl::InequivResult::Status::Witness )
            out.witness = w.witness;
        }
        catch ( ltl::BudgetExceeded const& )
        {
          // The verdict stands without a witness.
        }
        return out;
      }
      out.kind = Equivalence::Kind::Unknown;
      out.detail = "ltlfilt exit " + std::to_string( r.exit_status ) + ": " + first_line( r.err );
      return out;
    }
    catch ( ToolMissing const& )
    {
      // Fall through to the bounded search.
    }
  }

  if ( fallback.max_len == 0 )
  {
    out.kind = Equivalence::Kind::ToolMissing;
    out.detail = "ltlfilt not found and the bounded fallback is disabled";
    return out;
  }
  ltl::InequivResult w;
  try
  {
    w = bounded( fallback );
  }
  catch ( ltl::BudgetExceeded const& e )
  {
    out.kind = Equivalence::Kind::Unknown;
    out.detail = e.what();
    return out;
  }
  switch ( w.status )
  {
  case ltl::InequivResult::Status::Witness:
    out.kind = Equivalence::Kind::Inequivalent;
    out.witness = w.witness;
    break;
  case ltl::InequivResult::Status::NoneFound:
    out.kind = Equivalence::Kind::Unknown;
    out.detail = "no distinguishing lasso up to length " + std::to_string( fallback.max_len );
    break;
  case ltl::InequivResult::Status::DeadlineReached:
    out.kind = Equivalence::Kind::Timeout;
    out.detail = "bounded search exceeded its time limit";
    break;
  }
  return out;
}

} // namespace natsyn::toolchain
