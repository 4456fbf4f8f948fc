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

#include <algorithm>
#include <limits>
#include <map>
#include <type_traits>

namespace natsyn::tlsf
{

namespace
{

using ltl::Formula;
using K = SpecExpr::Kind;

constexpr std::uint64_t max_range_terms = 1u << 20;

// Lexical environment: range indices are integers, definition arguments are
// closures over the caller's environment.
struct Env;
using EnvPtr = std::shared_ptr<Env const>;

struct Env
{
  EnvPtr parent;
  std::string name;
  bool is_int = false;
  std::int64_t value = 0;
  SpecExpr const* expr = nullptr;
  EnvPtr scope;

  static EnvPtr bind_int( EnvPtr parent, std::string name, std::int64_t v )
  {
    auto e = std::make_shared<Env>();
    e->parent = std::move( parent );
    e->name = std::move( name );
    e->is_int = true;
    e->value = v;
    return e;
  }

  static EnvPtr bind_closure( EnvPtr parent, std::string name, SpecExpr const* expr, EnvPtr scope )
  {
    auto e = std::make_shared<Env>();
    e->parent = std::move( parent );
    e->name = std::move( name );
    e->expr = expr;
    e->scope = std::move( scope );
    return e;
  }
};

Env const* lookup( EnvPtr const& env, std::string const& name )
{
  for ( Env const* e = env.get(); e; e = e->parent.get() )
  {
    if ( e->name == name )
    {
      return e;
    }
  }
  return nullptr;
}

bool is_relation( std::string const& op )
{
  return op == "==" || op == "!=" || op == "<" || op == "<=" || op == ">" || op == ">=";
}

class Grounder
{
public:
  // Open mode: unknown identifiers are atoms (used for standalone formulas).
  bool open = false;
  std::map<std::string, std::int64_t> params;
  std::map<std::string, Definition const*> defs;
  std::map<std::string, std::optional<std::int64_t>> signals;

  Formula formula( SpecExpr const& e, EnvPtr const& env, int depth )
  {
    switch ( e.kind )
    {
    case K::Bool:
      return ltl::constant( e.truth );
    case K::Int:
      throw EvaluationError( e.span, "integer used where a formula is expected" );
    case K::Name:
      return name_formula( e, env, depth );
    case K::Index:
      return ltl::atom( ltl::bit_atom( vector_name( e, env ), index_of( e, env, depth ) ) );
    case K::Call:
      return call( e, env, depth, [&]( SpecExpr const& body, EnvPtr const& scope, int d ) {
        return formula( body, scope, d );
      } );
    case K::Unary:
    {
      if ( e.op == "-" )
      {
        throw EvaluationError( e.span, "integer used where a formula is expected" );
      }
      auto x = formula( *e.args[0], env, depth );
      if ( e.op == "!" )
        return ltl::negate( x );
      if ( e.op == "X" )
        return ltl::next( x );
      if ( e.op == "G" )
        return ltl::globally( x );
      return ltl::eventually( x );
    }
    case K::Binary:
    {
      if ( is_relation( e.op ) )
      {
        return ltl::constant( relation( e, env, depth ) );
      }
      if ( level_of_arith( e ) )
      {
        throw EvaluationError( e.span, "integer used where a formula is expected" );
      }
      auto l = formula( *e.args[0], env, depth );
      auto r = formula( *e.args[1], env, depth );
      if ( e.op == "&&" )
        return ltl::conj( l, r );
      if ( e.op == "||" )
        return ltl::disj( l, r );
      if ( e.op == "->" )
        return ltl::implies( l, r );
      if ( e.op == "<->" )
        return ltl::iff( l, r );
      if ( e.op == "U" )
        return ltl::until( l, r );
      if ( e.op == "W" )
        return ltl::weak_until( l, r );
      return ltl::release( l, r );
    }
    case K::Range:
    {
      auto [lo, hi] = bounds( e, env, depth );
      if ( hi >= lo && static_cast<std::uint64_t>( hi ) - static_cast<std::uint64_t>( lo ) >= max_range_terms )
      {
        throw EvaluationError( e.span, "range over '" + e.name + "' expands to more than " +
                                           std::to_string( max_range_terms ) + " terms" );
      }
      std::optional<Formula> acc;
      for ( std::int64_t i = lo; i <= hi; ++i )
      {
        auto body = formula( *e.args[2], Env::bind_int( env, e.name, i ), depth );
        acc = !acc ? body : e.op == "&&" ? ltl::conj( *acc, body ) : ltl::disj( *acc, body );
      }
      return acc ? *acc : ltl::constant( e.op == "&&" );
    }
    }
    throw EvaluationError( e.span, "unsupported expression" );
  }

  std::int64_t integer( SpecExpr const& e, EnvPtr const& env, int depth )
  {
    switch ( e.kind )
    {
    case K::Int:
      return e.value;
    case K::Name:
    {
      if ( auto const* b = lookup( env, e.name ) )
      {
        return b->is_int ? b->value : integer( *b->expr, b->scope, depth );
      }
      if ( auto it = params.find( e.name ); it != params.end() )
      {
        return it->second;
      }
      if ( auto it = defs.find( e.name ); it != defs.end() && it->second->params.empty() )
      {
        check_depth( e, depth );
        return integer( *it->second->body, nullptr, depth + 1 );
      }
      throw EvaluationError( e.span, "'" + e.name + "' is not an integer" );
    }
    case K::Call:
      return call( e, env, depth,
                   [&]( SpecExpr const& body, EnvPtr const& scope, int d ) { return integer( body, scope, d ); } );
    case K::Unary:
      if ( e.op == "-" )
      {
        return detail::checked_arith( "-", 0, integer( *e.args[0], env, depth ), e.span );
      }
      break;
    case K::Binary:
      if ( level_of_arith( e ) )
      {
        return detail::checked_arith( e.op, integer( *e.args[0], env, depth ), integer( *e.args[1], env, depth ),
                                      e.span );
      }
      break;
    default:
      break;
    }
    throw EvaluationError( e.span, "formula used where an integer is expected" );
  }

private:
  static bool level_of_arith( SpecExpr const& e ) { return detail::level_of( e ) >= detail::LevelAdd; }

  static void check_depth( SpecExpr const& e, int depth )
  {
    if ( depth >= max_definition_depth )
    {
      throw NonTerminatingDefinition( e.span, "definition expansion of '" + e.name + "' exceeds depth " +
                                                  std::to_string( max_definition_depth ) );
    }
  }

  template <typename Fn>
  std::invoke_result_t<Fn, SpecExpr const&, EnvPtr const&, int> call( SpecExpr const& e, EnvPtr const& env, int depth,
                                                                   Fn&& body_fn )
  {
    auto it = defs.find( e.name );
    if ( it == defs.end() || it->second->params.size() != e.args.size() )
    {
      throw EvaluationError( e.span, "no definition '" + e.name + "' taking " + std::to_string( e.args.size() ) +
                                         " arguments" );
    }
    check_depth( e, depth );
    EnvPtr scope;
    for ( std::size_t i = 0; i < e.args.size(); ++i )
    {
      scope = Env::bind_closure( scope, it->second->params[i], e.args[i].get(), env );
    }
    return body_fn( *it->second->body, scope, depth + 1 );
  }

  bool relation( SpecExpr const& e, EnvPtr const& env, int depth )
  {
    auto const a = integer( *e.args[0], env, depth );
    auto const b = integer( *e.args[1], env, depth );
    if ( e.op == "==" )
      return a == b;
    if ( e.op == "!=" )
      return a != b;
    if ( e.op == "<" )
      return a < b;
    if ( e.op == "<=" )
      return a <= b;
    if ( e.op == ">" )
      return a > b;
    return a >= b;
  }

  std::pair<std::int64_t, std::int64_t> bounds( SpecExpr const& e, EnvPtr const& env, int depth )
  {
    auto lo = integer( *e.args[0], env, depth );
    auto hi = integer( *e.args[1], env, depth );
    if ( e.lo_rel == "<" )
      lo = detail::checked_arith( "+", lo, 1, e.span );
    if ( e.hi_rel == "<" )
      hi = detail::checked_arith( "-", hi, 1, e.span );
    return { lo, hi };
  }

  Formula name_formula( SpecExpr const& e, EnvPtr const& env, int depth )
  {
    if ( auto const* b = lookup( env, e.name ) )
    {
      if ( b->is_int )
      {
        throw EvaluationError( e.span, "index '" + e.name + "' used where a formula is expected" );
      }
      return formula( *b->expr, b->scope, depth );
    }
    if ( params.count( e.name ) )
    {
      throw EvaluationError( e.span, "parameter '" + e.name + "' used where a formula is expected" );
    }
    if ( auto it = defs.find( e.name ); it != defs.end() && it->second->params.empty() )
    {
      check_depth( e, depth );
      return formula( *it->second->body, nullptr, depth + 1 );
    }
    if ( auto it = signals.find( e.name ); it != signals.end() )
    {
      if ( it->second )
      {
        throw EvaluationError( e.span, "vector signal '" + e.name + "' used without an index" );
      }
      return ltl::atom( e.name );
    }
    if ( open )
    {
      return ltl::atom( e.name );
    }
    throw EvaluationError( e.span, "undeclared identifier '" + e.name + "'" );
  }

  // Resolves the indexed name through argument closures to a signal.
  std::string vector_name( SpecExpr const& e, EnvPtr const& env )
  {
    std::string name = e.name;
    EnvPtr scope = env;
    while ( auto const* b = lookup( scope, name ) )
    {
      if ( b->is_int || b->expr->kind != K::Name )
      {
        throw EvaluationError( e.span, "'" + name + "' does not name a vector signal" );
      }
      name = b->expr->name;
      scope = b->scope;
    }
    if ( open )
    {
      return name;
    }
    auto it = signals.find( name );
    if ( it == signals.end() || !it->second )
    {
      throw EvaluationError( e.span, "'" + name + "' does not name a vector signal" );
    }
    return name;
  }

  std::int64_t index_of( SpecExpr const& e, EnvPtr const& env, int depth )
  {
    auto const k = integer( *e.args[0], env, depth );
    auto const name = vector_name( e, env );
    std::int64_t const width = open ? std::numeric_limits<std::int64_t>::max() : *signals.at( name );
    if ( k < 0 || k >= width )
    {
      throw IndexOutOfRange( e.span, "index " + std::to_string( k ) + " of '" + name + "' outside [0, " +
                                         std::to_string( width ) + ")" );
    }
    return k;
  }
};

} // namespace

GroundSpec instantiate( TlsfSpec const& spec, std::map<std::string, std::int64_t> const& bindings )
{
  Grounder g;
  for ( auto const& [name, value] : bindings )
  {
    bool const known = std::any_of( spec.parameters.begin(), spec.parameters.end(),
                                    [&]( Parameter const& p ) { return p.name == name; } );
    if ( !known )
    {
      throw EvaluationError( {}, "binding for undeclared parameter '" + name + "'" );
    }
  }
  for ( auto const& p : spec.parameters )
  {
    auto it = bindings.find( p.name );
    std::int64_t const v = it != bindings.end() ? it->second : g.integer( *p.expr, nullptr, 0 );
    if ( v < 0 )
    {
      throw EvaluationError( p.span, "parameter '" + p.name + "' must be nonnegative, got " + std::to_string( v ) );
    }
    g.params[p.name] = v;
  }
  for ( auto const& d : spec.definitions )
  {
    g.defs[d.name] = &d;
  }

  GroundSpec out;
  out.semantics = spec.semantics;
  out.semantics_declared = spec.semantics_declared;
  auto ground_signals = [&]( std::vector<SignalDecl> const& decls, std::vector<ltl::Signal>& dest ) {
    for ( auto const& d : decls )
    {
      std::optional<std::int64_t> width;
      if ( d.width )
      {
        width = g.integer( *d.width, nullptr, 0 );
        if ( *width <= 0 )
        {
          throw EvaluationError( d.span, "width of '" + d.name + "' must be positive, got " +
                                             std::to_string( *width ) );
        }
      }
      g.signals[d.name] = width;
      dest.push_back( ltl::Signal{ d.name, width } );
    }
  };
  ground_signals( spec.inputs, out.inputs );
  ground_signals( spec.outputs, out.outputs );

  for ( auto const& [kind, exprs] : spec.sections )
  {
    auto& list = out.sections[kind];
    for ( auto const& e : exprs )
    {
      list.push_back( g.formula( *e, nullptr, 0 ) );
    }
  }
  return out;
}

ltl::Formula parse_ltl( std::string_view text )
{
  auto const e = detail::parse_standalone_expression( text );
  Grounder g;
  g.open = true;
  return g.formula( *e, nullptr, 0 );
}

} // namespace natsyn::tlsf
