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

#include <natsyn/verilog.hpp>

#include <algorithm>
#include <charconv>
#include <map>
#include <regex>
#include <sstream>

namespace natsyn::verilog
{

namespace
{

std::vector<std::string> split_lines( std::string_view text )
{
  std::vector<std::string> lines;
  std::size_t start = 0;
  while ( start < text.size() )
  {
    auto end = text.find( '\n', start );
    end = end == std::string_view::npos ? text.size() : end;
    std::string line( text.substr( start, end - start ) );
    if ( !line.empty() && line.back() == '\r' )
      line.pop_back();
    lines.push_back( std::move( line ) );
    start = end + 1;
  }
  return lines;
}

std::vector<unsigned> numbers( std::string const& line, std::size_t line_no )
{
  std::vector<unsigned> out;
  std::istringstream in( line );
  std::string tok;
  while ( in >> tok )
  {
    unsigned v = 0;
    auto const [ptr, ec] = std::from_chars( tok.data(), tok.data() + tok.size(), v );
    if ( ec != std::errc{} || ptr != tok.data() + tok.size() )
    {
      throw HeaderMismatch( "line " + std::to_string( line_no ) + ": expected unsigned literals, found '" + line + "'" );
    }
    out.push_back( v );
  }
  return out;
}

std::string indexed_default( char kind, std::size_t k ) { return std::string( 1, kind ) + std::to_string( k ); }

} // namespace

std::string normalize_symbol( std::string_view name )
{
  static std::regex const indexed( R"(^(.*)\[(\d+)\]$)" );
  std::string const s( name );
  std::smatch m;
  if ( std::regex_match( s, m, indexed ) )
  {
    return m[1].str() + "_" + m[2].str();
  }
  return s;
}

std::string AigerCircuit::input_atom( std::size_t k ) const
{
  return k < input_names.size() && !input_names[k].empty() ? normalize_symbol( input_names[k] )
                                                            : indexed_default( 'i', k );
}

std::string AigerCircuit::output_atom( std::size_t k ) const
{
  return k < output_names.size() && !output_names[k].empty() ? normalize_symbol( output_names[k] )
                                                              : indexed_default( 'o', k );
}

AigerCircuit parse_aiger( std::string_view text )
{
  auto const lines = split_lines( text );
  if ( lines.empty() )
  {
    throw HeaderMismatch( "empty AIGER input" );
  }
  std::istringstream header( lines[0] );
  std::string magic;
  header >> magic;
  if ( magic == "aig" )
  {
    throw AigerError( "binary AIGER (aig) is not supported; write ASCII AIGER (aag)" );
  }
  if ( magic != "aag" )
  {
    throw HeaderMismatch( "line 1: expected header 'aag M I L O A', found '" + lines[0] + "'" );
  }
  auto const counts = numbers( lines[0].substr( 3 ), 1 );
  if ( counts.size() < 5 )
  {
    throw HeaderMismatch( "line 1: header needs five counts M I L O A" );
  }
  if ( std::any_of( counts.begin() + 5, counts.end(), []( unsigned v ) { return v != 0; } ) )
  {
    throw AigerError( "line 1: bad, constraint, justice and fairness sections are not supported" );
  }

  AigerCircuit c;
  c.max_var = counts[0];
  unsigned const ni = counts[1], nl = counts[2], no = counts[3], na = counts[4];
  std::size_t const body = 1 + std::size_t{ ni } + nl + no + na;

  auto body_line = [&]( std::size_t idx, std::size_t expect_min, std::size_t expect_max, char const* what ) {
    if ( idx >= lines.size() || lines[idx].empty() || !std::isdigit( static_cast<unsigned char>( lines[idx][0] ) ) )
    {
      throw HeaderMismatch( "line " + std::to_string( idx + 1 ) + ": header promises more " + what +
                            " lines than present" );
    }
    auto v = numbers( lines[idx], idx + 1 );
    if ( v.size() < expect_min || v.size() > expect_max )
    {
      throw HeaderMismatch( "line " + std::to_string( idx + 1 ) + ": malformed " + what + " line '" + lines[idx] +
                            "'" );
    }
    return v;
  };

  std::vector<int> defined( std::size_t{ c.max_var } + 1, 0 ); // 0 = undefined
  auto define = [&]( unsigned lit, std::size_t line_no ) {
    if ( lit & 1u )
    {
      throw OddVariableLiteral( "line " + std::to_string( line_no ) + ": literal " + std::to_string( lit ) +
                                " is odd where a variable is defined" );
    }
    if ( lit / 2 == 0 || lit / 2 > c.max_var )
    {
      throw DanglingLiteral( "line " + std::to_string( line_no ) + ": literal " + std::to_string( lit ) +
                             " outside 2.." + std::to_string( 2 * c.max_var ) );
    }
    if ( defined[lit / 2] )
    {
      throw AigerError( "line " + std::to_string( line_no ) + ": variable " + std::to_string( lit / 2 ) +
                        " defined twice" );
    }
    defined[lit / 2] = 1;
  };

  std::size_t idx = 1;
  for ( unsigned k = 0; k < ni; ++k, ++idx )
  {
    auto const v = body_line( idx, 1, 1, "input" );
    define( v[0], idx + 1 );
    c.inputs.push_back( v[0] );
  }
  for ( unsigned k = 0; k < nl; ++k, ++idx )
  {
    auto const v = body_line( idx, 2, 3, "latch" );
    define( v[0], idx + 1 );
    Latch l{ v[0], v[1], v.size() == 3 ? v[2] : 0u };
    if ( l.reset != 0 && l.reset != 1 )
    {
      throw AigerError( "line " + std::to_string( idx + 1 ) + ": only constant latch resets are supported" );
    }
    c.latches.push_back( l );
  }
  for ( unsigned k = 0; k < no; ++k, ++idx )
  {
    c.outputs.push_back( body_line( idx, 1, 1, "output" )[0] );
  }
  std::vector<AndGate> gates;
  std::vector<std::size_t> gate_lines;
  for ( unsigned k = 0; k < na; ++k, ++idx )
  {
    auto const v = body_line( idx, 3, 3, "and" );
    define( v[0], idx + 1 );
    gates.push_back( AndGate{ v[0], v[1], v[2] } );
    gate_lines.push_back( idx + 1 );
  }

  // Every referenced variable must be defined.
  auto check_ref = [&]( unsigned lit, std::size_t line_no ) {
    if ( lit / 2 > c.max_var || ( lit / 2 != 0 && !defined[lit / 2] ) )
    {
      throw DanglingLiteral( "line " + std::to_string( line_no ) + ": literal " + std::to_string( lit ) +
                             " refers to an undefined variable" );
    }
  };
  for ( std::size_t k = 0; k < c.latches.size(); ++k )
    check_ref( c.latches[k].next, 2 + ni + k );
  for ( std::size_t k = 0; k < c.outputs.size(); ++k )
    check_ref( c.outputs[k], 2 + ni + nl + k );
  for ( std::size_t k = 0; k < gates.size(); ++k )
  {
    check_ref( gates[k].rhs0, gate_lines[k] );
    check_ref( gates[k].rhs1, gate_lines[k] );
  }

  // Topological order of the and gates.
  std::map<unsigned, std::size_t> gate_of;
  for ( std::size_t k = 0; k < gates.size(); ++k )
    gate_of[gates[k].lhs / 2] = k;
  std::vector<int> mark( gates.size(), 0 );
  std::vector<std::pair<std::size_t, int>> stack;
  for ( std::size_t root = 0; root < gates.size(); ++root )
  {
    if ( mark[root] )
      continue;
    stack.push_back( { root, 0 } );
    while ( !stack.empty() )
    {
      auto& [g, stage] = stack.back();
      if ( stage == 0 )
      {
        mark[g] = 1;
        stage = 1;
        for ( unsigned operand : { gates[g].rhs0, gates[g].rhs1 } )
        {
          auto it = gate_of.find( operand / 2 );
          if ( it == gate_of.end() )
            continue;
          if ( mark[it->second] == 1 )
          {
            throw AigerError( "line " + std::to_string( gate_lines[g] ) + ": combinational cycle through and gate " +
                              std::to_string( gates[g].lhs ) );
          }
          if ( mark[it->second] == 0 )
            stack.push_back( { it->second, 0 } );
        }
      }
      else
      {
        std::size_t const done = g;
        stack.pop_back();
        if ( mark[done] == 1 )
        {
          mark[done] = 2;
          c.ands.push_back( gates[done] );
        }
      }
    }
  }

  // Symbols and comments.
  c.input_names.assign( ni, "" );
  c.latch_names.assign( nl, "" );
  c.output_names.assign( no, "" );
  static std::regex const symbol( R"(^([ilo])(\d+) (.*)$)" );
  for ( idx = body; idx < lines.size(); ++idx )
  {
    auto const& line = lines[idx];
    if ( line == "c" )
    {
      c.comments.assign( lines.begin() + idx + 1, lines.end() );
      while ( !c.comments.empty() && c.comments.back().empty() )
        c.comments.pop_back();
      break;
    }
    if ( line.empty() )
      continue;
    std::smatch m;
    if ( !std::regex_match( line, m, symbol ) )
    {
      throw HeaderMismatch( "line " + std::to_string( idx + 1 ) + ": unexpected content '" + line +
                            "' after the declared sections" );
    }
    std::size_t const pos = std::stoul( m[2].str() );
    auto& table = m[1] == "i" ? c.input_names : m[1] == "l" ? c.latch_names : c.output_names;
    if ( pos >= table.size() )
    {
      throw HeaderMismatch( "line " + std::to_string( idx + 1 ) + ": symbol index " + m[2].str() + " out of range" );
    }
    table[pos] = m[3].str();
  }
  return c;
}

std::string render_aiger( AigerCircuit const& c )
{
  std::ostringstream out;
  out << "aag " << c.max_var << ' ' << c.inputs.size() << ' ' << c.latches.size() << ' ' << c.outputs.size() << ' '
      << c.ands.size() << '\n';
  for ( auto i : c.inputs )
    out << i << '\n';
  for ( auto const& l : c.latches )
  {
    out << l.lit << ' ' << l.next;
    if ( l.reset != 0 )
      out << ' ' << l.reset;
    out << '\n';
  }
  for ( auto o : c.outputs )
    out << o << '\n';
  for ( auto const& a : c.ands )
    out << a.lhs << ' ' << a.rhs0 << ' ' << a.rhs1 << '\n';
  auto symbols = [&]( char kind, std::vector<std::string> const& names ) {
    for ( std::size_t k = 0; k < names.size(); ++k )
    {
      if ( !names[k].empty() )
        out << kind << k << ' ' << names[k] << '\n';
    }
  };
  symbols( 'i', c.input_names );
  symbols( 'l', c.latch_names );
  symbols( 'o', c.output_names );
  if ( !c.comments.empty() )
  {
    out << "c\n";
    for ( auto const& line : c.comments )
      out << line << '\n';
  }
  return out.str();
}

namespace
{

// Evaluates one step; `values` is indexed by variable.
void evaluate( AigerCircuit const& c, std::vector<bool> const& inputs, std::vector<bool> const& state,
               std::vector<char>& values )
{
  values.assign( std::size_t{ c.max_var } + 1, 0 );
  for ( std::size_t k = 0; k < c.inputs.size(); ++k )
    values[c.inputs[k] / 2] = inputs[k];
  for ( std::size_t k = 0; k < c.latches.size(); ++k )
    values[c.latches[k].lit / 2] = state[k];
  auto lit = [&]( unsigned l ) { return static_cast<bool>( values[l / 2] ) != static_cast<bool>( l & 1u ); };
  for ( auto const& a : c.ands )
    values[a.lhs / 2] = lit( a.rhs0 ) && lit( a.rhs1 );
}

bool literal_value( std::vector<char> const& values, unsigned l )
{
  return static_cast<bool>( values[l / 2] ) != static_cast<bool>( l & 1u );
}

} // namespace

std::vector<Step> simulate( AigerCircuit const& c, std::vector<std::vector<bool>> const& inputs )
{
  std::vector<Step> steps;
  std::vector<bool> state( c.latches.size() );
  for ( std::size_t k = 0; k < c.latches.size(); ++k )
    state[k] = c.latches[k].reset == 1;
  std::vector<char> values;
  for ( auto const& in : inputs )
  {
    if ( in.size() != c.inputs.size() )
    {
      throw std::invalid_argument( "simulate: valuation covers " + std::to_string( in.size() ) + " of " +
                                   std::to_string( c.inputs.size() ) + " inputs" );
    }
    evaluate( c, in, state, values );
    Step s;
    s.inputs = in;
    s.latches = state;
    for ( auto o : c.outputs )
      s.outputs.push_back( literal_value( values, o ) );
    for ( std::size_t k = 0; k < c.latches.size(); ++k )
      state[k] = literal_value( values, c.latches[k].next );
    steps.push_back( std::move( s ) );
  }
  return steps;
}

std::vector<bool> step_from( AigerCircuit const& c, std::vector<bool> const& state, std::vector<bool> const& inputs,
                             Step& out )
{
  std::vector<char> values;
  evaluate( c, inputs, state, values );
  out.inputs = inputs;
  out.latches = state;
  out.outputs.clear();
  for ( auto o : c.outputs )
    out.outputs.push_back( literal_value( values, o ) );
  std::vector<bool> next( c.latches.size() );
  for ( std::size_t k = 0; k < c.latches.size(); ++k )
    next[k] = literal_value( values, c.latches[k].next );
  return next;
}

bool replays( AigerCircuit const& c, ltl::LassoTrace const& trace )
{
  ltl::validate_trace( trace );
  auto column = [&]( std::string const& atom ) -> std::optional<std::size_t> {
    auto it = std::find( trace.atoms.begin(), trace.atoms.end(), atom );
    if ( it == trace.atoms.end() )
      return std::nullopt;
    return static_cast<std::size_t>( it - trace.atoms.begin() );
  };
  std::vector<std::size_t> in_cols;
  for ( std::size_t k = 0; k < c.inputs.size(); ++k )
  {
    auto col = column( c.input_atom( k ) );
    if ( !col )
      throw ltl::UnknownAtom( c.input_atom( k ) );
    in_cols.push_back( *col );
  }
  std::vector<std::optional<std::size_t>> out_cols;
  for ( std::size_t k = 0; k < c.outputs.size(); ++k )
    out_cols.push_back( column( c.output_atom( k ) ) );

  std::vector<bool> state( c.latches.size() );
  for ( std::size_t k = 0; k < c.latches.size(); ++k )
    state[k] = c.latches[k].reset == 1;
  std::vector<char> values;
  std::vector<bool> in( c.inputs.size() );

  auto step = [&]( std::vector<bool> const& v ) {
    for ( std::size_t k = 0; k < in_cols.size(); ++k )
      in[k] = v[in_cols[k]];
    evaluate( c, in, state, values );
    for ( std::size_t k = 0; k < out_cols.size(); ++k )
    {
      if ( out_cols[k] && literal_value( values, c.outputs[k] ) != v[*out_cols[k]] )
        return false;
    }
    for ( std::size_t k = 0; k < c.latches.size(); ++k )
      state[k] = literal_value( values, c.latches[k].next );
    return true;
  };

  for ( auto const& v : trace.stem )
  {
    if ( !step( v ) )
      return false;
  }
  // Once the state at a loop boundary repeats, the rest of the run repeats.
  std::vector<std::vector<bool>> boundaries;
  while ( std::find( boundaries.begin(), boundaries.end(), state ) == boundaries.end() )
  {
    boundaries.push_back( state );
    for ( auto const& v : trace.loop )
    {
      if ( !step( v ) )
        return false;
    }
  }
  return true;
}

} // namespace natsyn::verilog
