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

#include "internal.hpp"

namespace natsyn::tlsf
{

namespace
{

using namespace detail;

bool right_associative( std::string const& op ) { return op == "->" || op == "U" || op == "W" || op == "R"; }

std::string render_at( SpecExpr const& e, int min_level );

std::string render_raw( SpecExpr const& e )
{
  using K = SpecExpr::Kind;
  switch ( e.kind )
  {
  case K::Int:
    return std::to_string( e.value );
  case K::Bool:
    return e.truth ? "true" : "false";
  case K::Name:
    return e.name;
  case K::Index:
    return e.name + "[" + render_at( *e.args[0], LevelIff ) + "]";
  case K::Call:
  {
    std::string s = e.name + "(";
    for ( std::size_t i = 0; i < e.args.size(); ++i )
    {
      s += ( i ? ", " : "" ) + render_at( *e.args[i], LevelIff );
    }
    return s + ")";
  }
  case K::Unary:
    if ( e.op == "-" )
      return "-" + render_at( *e.args[0], LevelNeg );
    if ( e.op == "!" )
      return "!" + render_at( *e.args[0], LevelUnary );
    return e.op + " " + render_at( *e.args[0], LevelUnary );
  case K::Binary:
  {
    int const level = level_of( e );
    bool const right = right_associative( e.op );
    bool const chain = level != LevelCompare;
    int const left_min = chain && !right ? level : level + 1;
    int const right_min = chain && right ? level : level + 1;
    return render_at( *e.args[0], left_min ) + " " + e.op + " " + render_at( *e.args[1], right_min );
  }
  case K::Range:
    return e.op + "[" + render_at( *e.args[0], LevelAdd ) + " " + e.lo_rel + " " + e.name + " " + e.hi_rel + " " +
           render_at( *e.args[1], LevelAdd ) + "] " + render_at( *e.args[2], LevelUnary );
  }
  return {};
}

std::string render_at( SpecExpr const& e, int min_level )
{
  auto s = render_raw( e );
  return level_of( e ) < min_level ? "(" + s + ")" : s;
}

void render_signals( std::string& out, std::string_view keyword, std::vector<SignalDecl> const& signals )
{
  out += "  ";
  out += keyword;
  out += " {\n";
  for ( auto const& s : signals )
  {
    out += "    " + s.name;
    if ( s.width )
    {
      out += "[" + render_expr( *s.width ) + "]";
    }
    out += ";\n";
  }
  out += "  }\n";
}

} // namespace

std::string render_expr( SpecExpr const& e ) { return render_at( e, LevelIff ); }

std::string render_tlsf( TlsfSpec const& spec )
{
  std::string out;
  if ( spec.semantics_declared || spec.target )
  {
    out += "INFO {\n";
    if ( spec.semantics_declared )
    {
      out += "  SEMANTICS: " + std::string( semantics_name( spec.semantics ) ) + "\n";
    }
    if ( spec.target )
    {
      out += "  TARGET: " + std::string( semantics_name( *spec.target ) ) + "\n";
    }
    out += "}\n";
  }
  if ( !spec.parameters.empty() || !spec.definitions.empty() )
  {
    out += "GLOBAL {\n";
    if ( !spec.parameters.empty() )
    {
      out += "  PARAMETERS {\n";
      for ( auto const& p : spec.parameters )
      {
        out += "    " + p.name + " = " + render_expr( *p.expr ) + ";\n";
      }
      out += "  }\n";
    }
    if ( !spec.definitions.empty() )
    {
      out += "  DEFINITIONS {\n";
      for ( auto const& d : spec.definitions )
      {
        out += "    " + d.name;
        if ( !d.params.empty() )
        {
          out += "(";
          for ( std::size_t i = 0; i < d.params.size(); ++i )
          {
            out += ( i ? ", " : "" ) + d.params[i];
          }
          out += ")";
        }
        out += " = " + render_expr( *d.body ) + ";\n";
      }
      out += "  }\n";
    }
    out += "}\n";
  }
  out += "MAIN {\n";
  render_signals( out, "INPUTS", spec.inputs );
  render_signals( out, "OUTPUTS", spec.outputs );
  for ( auto const& [kind, exprs] : spec.sections )
  {
    out += "  " + std::string( section_keyword( kind ) ) + " {\n";
    for ( auto const& e : exprs )
    {
      out += "    " + render_expr( *e ) + ";\n";
    }
    out += "  }\n";
  }
  out += "}\n";
  return out;
}

} // namespace natsyn::tlsf
