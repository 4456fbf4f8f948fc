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

#include <natsyn/tlsf.hpp>

namespace natsyn::tlsf
{

namespace
{

std::string format_syntax_error( SourceSpan at, std::vector<std::string> const& expected, std::string const& found )
{
  std::string msg = std::to_string( at.line ) + ":" + std::to_string( at.col ) + ": expected ";
  if ( expected.size() == 1 )
  {
    msg += expected.front();
  }
  else
  {
    msg += "{";
    for ( std::size_t i = 0; i < expected.size(); ++i )
    {
      msg += ( i ? ", " : "" ) + expected[i];
    }
    msg += "}";
  }
  return msg + ", found " + found;
}

std::vector<ExprPtr> const& empty_exprs()
{
  static std::vector<ExprPtr> const empty;
  return empty;
}

} // namespace

SyntaxError::SyntaxError( SourceSpan at_, std::vector<std::string> expected_, std::string found_ )
    : std::runtime_error( format_syntax_error( at_, expected_, found_ ) ), at( at_ ), expected( std::move( expected_ ) ),
      found( std::move( found_ ) )
{
}

InstantiationError::InstantiationError( SourceSpan at_, std::string const& message )
    : std::runtime_error( std::to_string( at_.line ) + ":" + std::to_string( at_.col ) + ": " + message ), at( at_ )
{
}

std::string_view section_keyword( SectionKind kind )
{
  switch ( kind )
  {
  case SectionKind::Initially:
    return "INITIALLY";
  case SectionKind::Preset:
    return "PRESET";
  case SectionKind::Require:
    return "REQUIRE";
  case SectionKind::Assert:
    return "ASSERT";
  case SectionKind::Assume:
    return "ASSUME";
  case SectionKind::Guarantee:
    return "GUARANTEE";
  }
  return "";
}

std::string_view semantics_name( Semantics s )
{
  switch ( s )
  {
  case Semantics::Mealy:
    return "Mealy";
  case Semantics::Moore:
    return "Moore";
  case Semantics::MealyStrict:
    return "Mealy,Strict";
  case Semantics::MooreStrict:
    return "Moore,Strict";
  }
  return "";
}

bool is_strict( Semantics s ) { return s == Semantics::MealyStrict || s == Semantics::MooreStrict; }

bool operator==( SpecExpr const& a, SpecExpr const& b )
{
  if ( a.kind != b.kind || a.value != b.value || a.truth != b.truth || a.name != b.name || a.op != b.op ||
       a.lo_rel != b.lo_rel || a.hi_rel != b.hi_rel || a.args.size() != b.args.size() )
  {
    return false;
  }
  for ( std::size_t i = 0; i < a.args.size(); ++i )
  {
    if ( !equal( a.args[i], b.args[i] ) )
    {
      return false;
    }
  }
  return true;
}

bool equal( ExprPtr const& a, ExprPtr const& b )
{
  if ( !a || !b )
  {
    return !a && !b;
  }
  return a == b || *a == *b;
}

namespace
{

bool equal_lists( std::vector<ExprPtr> const& a, std::vector<ExprPtr> const& b )
{
  if ( a.size() != b.size() )
  {
    return false;
  }
  for ( std::size_t i = 0; i < a.size(); ++i )
  {
    if ( !equal( a[i], b[i] ) )
    {
      return false;
    }
  }
  return true;
}

bool equal_signals( std::vector<SignalDecl> const& a, std::vector<SignalDecl> const& b )
{
  if ( a.size() != b.size() )
  {
    return false;
  }
  for ( std::size_t i = 0; i < a.size(); ++i )
  {
    if ( a[i].name != b[i].name || !equal( a[i].width, b[i].width ) )
    {
      return false;
    }
  }
  return true;
}

} // namespace

bool operator==( TlsfSpec const& a, TlsfSpec const& b )
{
  if ( a.parameters.size() != b.parameters.size() || a.definitions.size() != b.definitions.size() ||
       a.semantics != b.semantics || a.semantics_declared != b.semantics_declared || a.target != b.target ||
       !equal_signals( a.inputs, b.inputs ) || !equal_signals( a.outputs, b.outputs ) ||
       a.sections.size() != b.sections.size() )
  {
    return false;
  }
  for ( std::size_t i = 0; i < a.parameters.size(); ++i )
  {
    auto const& p = a.parameters[i];
    auto const& q = b.parameters[i];
    if ( p.name != q.name || p.value != q.value || !equal( p.expr, q.expr ) )
    {
      return false;
    }
  }
  for ( std::size_t i = 0; i < a.definitions.size(); ++i )
  {
    auto const& d = a.definitions[i];
    auto const& e = b.definitions[i];
    if ( d.name != e.name || d.params != e.params || !equal( d.body, e.body ) )
    {
      return false;
    }
  }
  for ( auto const& [kind, exprs] : a.sections )
  {
    auto it = b.sections.find( kind );
    if ( it == b.sections.end() || !equal_lists( exprs, it->second ) )
    {
      return false;
    }
  }
  return true;
}

std::vector<ExprPtr> const& TlsfSpec::section( SectionKind kind ) const
{
  auto it = sections.find( kind );
  return it == sections.end() ? empty_exprs() : it->second;
}

std::vector<ltl::Formula> const& GroundSpec::section( SectionKind kind ) const
{
  static std::vector<ltl::Formula> const empty;
  auto it = sections.find( kind );
  return it == sections.end() ? empty : it->second;
}

} // namespace natsyn::tlsf
