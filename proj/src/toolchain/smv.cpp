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

#include <regex>
#include <sstream>

namespace natsyn::toolchain
{

namespace
{

std::string trim( std::string_view s )
{
  auto const b = s.find_first_not_of( " \t\r" );
  if ( b == std::string_view::npos )
    return {};
  auto const e = s.find_last_not_of( " \t\r" );
  return std::string( s.substr( b, e - b + 1 ) );
}

std::string smv_name_to_atom( std::string name )
{
  if ( name.size() >= 2 && name.front() == '"' && name.back() == '"' )
    name = name.substr( 1, name.size() - 2 );
  std::string plain;
  for ( char c : name )
  {
    if ( c != '\\' )
      plain += c;
  }
  return verilog::normalize_symbol( plain );
}

std::optional<bool> truth( std::string const& value )
{
  if ( value == "TRUE" || value == "1" )
    return true;
  if ( value == "FALSE" || value == "0" )
    return false;
  return std::nullopt;
}

} // namespace

std::string yosys_script( std::string_view module_name )
{
  std::string const top( module_name );
  return "hierarchy -check -top " + top +
         "\n"
         "proc\n"
         "flatten\n"
         "opt\n"
         "memory; opt\n"
         "techmap; opt\n"
         "dffunmap\n"
         "abc -g AND\n"
         "delete -port " +
         top +
         "/clk\n"
         "write_aiger -ascii -symbols circuit.aag\n";
}

std::string nuxmv_script()
{
  return "read_model\n"
         "flatten_hierarchy\n"
         "encode_variables\n"
         "build_boolean_model\n"
         "check_ltlspec_ic3\n"
         "quit\n";
}

SmvOutput parse_nuxmv_output( std::string_view text )
{
  static std::regex const verdict( R"(^--\s*(?:LTL\s+)?specification\s.*\sis\s+(true|false)\s*$)" );
  static std::regex const state( R"(^->\s*State:\s*\S+\s*<-$)" );
  static std::regex const input( R"(^->\s*Input:\s*\S+\s*<-$)" );
  static std::regex const loop( R"(^--\s*Loop starts here\s*$)" );
  static std::regex const assignment( R"(^([^=\s][^=]*?)\s*=\s*(\S+)$)" );

  SmvOutput out;
  std::istringstream in{ std::string( text ) };
  std::string raw;
  bool in_trace = false;
  bool pending_loop = false;
  bool in_input = false;
  SmvState pending_input;
  while ( std::getline( in, raw ) )
  {
    auto const line = trim( raw );
    std::smatch m;
    if ( std::regex_match( line, m, verdict ) )
    {
      if ( out.verdict != SmvOutput::Verdict::Unknown )
        break; // first property only
      out.verdict = m[1] == "true" ? SmvOutput::Verdict::True : SmvOutput::Verdict::False;
      if ( out.verdict == SmvOutput::Verdict::False )
      {
        out.counterexample.emplace();
        in_trace = true;
      }
      continue;
    }
    if ( !in_trace )
      continue;
    auto& cex = *out.counterexample;
    if ( std::regex_match( line, loop ) )
    {
      pending_loop = true;
    }
    else if ( std::regex_match( line, state ) )
    {
      if ( pending_loop )
        cex.loop_start = cex.states.size();
      pending_loop = false;
      cex.states.push_back( std::move( pending_input ) );
      pending_input = {};
      in_input = false;
    }
    else if ( std::regex_match( line, input ) )
    {
      // Input assignments are attributed to the state that follows them.
      pending_input = {};
      in_input = true;
    }
    else if ( std::regex_match( line, m, assignment ) )
    {
      if ( in_input )
        pending_input.assignments[m[1]] = m[2];
      else if ( !cex.states.empty() )
        cex.states.back().assignments[m[1]] = m[2];
    }
  }
  return out;
}

std::vector<ltl::LassoTrace> counterexample_lassos( SmvCounterexample const& cex,
                                                    std::vector<std::string> const& atoms )
{
  if ( !cex.loop_start || *cex.loop_start >= cex.states.size() )
    throw std::invalid_argument( "counterexample has no loop marker" );

  // Dense assignments, carrying unchanged values forward.
  std::vector<std::map<std::string, std::string>> dense;
  std::map<std::string, std::string> current;
  for ( auto const& s : cex.states )
  {
    for ( auto const& [name, value] : s.assignments )
      current[smv_name_to_atom( name )] = value;
    dense.push_back( current );
  }
  auto valuation = [&]( std::size_t k ) {
    std::vector<bool> v;
    for ( auto const& a : atoms )
    {
      auto it = dense[k].find( a );
      if ( it == dense[k].end() )
        throw std::invalid_argument( "counterexample does not assign '" + a + "'" );
      auto const b = truth( it->second );
      if ( !b )
        throw std::invalid_argument( "counterexample assigns non-Boolean value '" + it->second + "' to '" + a + "'" );
      v.push_back( *b );
    }
    return v;
  };

  std::size_t const ls = *cex.loop_start;
  std::size_t const n = cex.states.size();
  auto build = [&]( std::size_t end ) {
    ltl::LassoTrace t;
    t.atoms = atoms;
    for ( std::size_t k = 0; k < end; ++k )
      ( k < ls ? t.stem : t.loop ).push_back( valuation( k ) );
    return t;
  };
  std::vector<ltl::LassoTrace> out;
  if ( n - ls > 1 && dense[n - 1] == dense[ls] )
    out.push_back( build( n - 1 ) );
  out.push_back( build( n ) );
  return out;
}

} // namespace natsyn::toolchain
