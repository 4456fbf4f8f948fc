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

#include <natsyn/ltl.hpp>

#include <algorithm>
#include <functional>
#include <numeric>
#include <unordered_set>

namespace natsyn::ltl
{

bool is_unary( Op op )
{
  switch ( op )
  {
  case Op::Not:
  case Op::Next:
  case Op::Globally:
  case Op::Finally:
    return true;
  default:
    return false;
  }
}

bool is_binary( Op op )
{
  switch ( op )
  {
  case Op::And:
  case Op::Or:
  case Op::Implies:
  case Op::Iff:
  case Op::Until:
  case Op::WeakUntil:
  case Op::Release:
    return true;
  default:
    return false;
  }
}

namespace
{

std::size_t mix( std::size_t seed, std::size_t v )
{
  return seed ^ ( v + 0x9e3779b97f4a7c15ull + ( seed << 6 ) + ( seed >> 2 ) );
}

} // namespace

Formula::Formula() : Formula( make( Op::True, {} ) ) {}

Formula Formula::make( Op op, std::vector<Formula> children, std::string name )
{
  std::size_t const arity = is_unary( op ) ? 1u : is_binary( op ) ? 2u : 0u;
  if ( children.size() != arity )
  {
    throw std::invalid_argument( "ltl: wrong number of operands" );
  }
  if ( op == Op::Atom && name.empty() )
  {
    throw std::invalid_argument( "ltl: atoms need a nonempty name" );
  }
  std::size_t size = 1;
  std::size_t hash = mix( static_cast<std::size_t>( op ), std::hash<std::string>{}( name ) );
  for ( auto const& c : children )
  {
    size += c.size();
    hash = mix( hash, c.node_->hash );
  }
  auto node = std::make_shared<Node const>( Node{ op, std::move( name ), std::move( children ), size, hash } );
  return Formula( std::move( node ) );
}

bool operator==( Formula const& a, Formula const& b )
{
  if ( a.node_ == b.node_ )
  {
    return true;
  }
  if ( a.node_->hash != b.node_->hash || a.node_->size != b.node_->size || a.op() != b.op() ||
       a.name() != b.name() )
  {
    return false;
  }
  auto const& ca = a.node_->children;
  auto const& cb = b.node_->children;
  return std::equal( ca.begin(), ca.end(), cb.begin(), cb.end() );
}

Formula atom( std::string name ) { return Formula::make( Op::Atom, {}, std::move( name ) ); }
Formula constant( bool value ) { return Formula::make( value ? Op::True : Op::False, {} ); }
Formula negate( Formula f ) { return Formula::make( Op::Not, { std::move( f ) } ); }
Formula conj( Formula a, Formula b ) { return Formula::make( Op::And, { std::move( a ), std::move( b ) } ); }
Formula disj( Formula a, Formula b ) { return Formula::make( Op::Or, { std::move( a ), std::move( b ) } ); }
Formula implies( Formula a, Formula b ) { return Formula::make( Op::Implies, { std::move( a ), std::move( b ) } ); }
Formula iff( Formula a, Formula b ) { return Formula::make( Op::Iff, { std::move( a ), std::move( b ) } ); }
Formula next( Formula f ) { return Formula::make( Op::Next, { std::move( f ) } ); }
Formula until( Formula a, Formula b ) { return Formula::make( Op::Until, { std::move( a ), std::move( b ) } ); }
Formula weak_until( Formula a, Formula b )
{
  return Formula::make( Op::WeakUntil, { std::move( a ), std::move( b ) } );
}
Formula release( Formula a, Formula b ) { return Formula::make( Op::Release, { std::move( a ), std::move( b ) } ); }
Formula globally( Formula f ) { return Formula::make( Op::Globally, { std::move( f ) } ); }
Formula eventually( Formula f ) { return Formula::make( Op::Finally, { std::move( f ) } ); }

Formula conj_all( std::span<Formula const> fs )
{
  if ( fs.empty() )
  {
    return constant( true );
  }
  Formula acc = fs.front();
  for ( auto const& f : fs.subspan( 1 ) )
  {
    acc = conj( acc, f );
  }
  return acc;
}

Formula disj_all( std::span<Formula const> fs )
{
  if ( fs.empty() )
  {
    return constant( false );
  }
  Formula acc = fs.front();
  for ( auto const& f : fs.subspan( 1 ) )
  {
    acc = disj( acc, f );
  }
  return acc;
}

std::vector<std::string> atoms_of( Formula const& f )
{
  std::vector<std::string> out;
  std::unordered_set<std::string> seen;
  std::vector<Formula const*> stack{ &f };
  while ( !stack.empty() )
  {
    auto const* g = stack.back();
    stack.pop_back();
    if ( g->op() == Op::Atom )
    {
      if ( seen.insert( g->name() ).second )
      {
        out.push_back( g->name() );
      }
    }
    else if ( is_binary( g->op() ) )
    {
      stack.push_back( &g->rhs() );
      stack.push_back( &g->lhs() );
    }
    else if ( is_unary( g->op() ) )
    {
      stack.push_back( &g->child() );
    }
  }
  return out;
}

namespace
{

struct Spelling
{
  char const* t;
  char const* f;
  char const* not_;
  char const* and_;
  char const* or_;
  char const* release;
};

Spelling spelling( Dialect d )
{
  switch ( d )
  {
  case Dialect::Smv:
    return { "TRUE", "FALSE", "!", "&", "|", "V" };
  case Dialect::Spot:
    return { "true", "false", "!", "&", "|", "R" };
  case Dialect::TlsfExpr:
    break;
  }
  return { "true", "false", "!", "&&", "||", "R" };
}

void render_rec( Formula const& f, Dialect d, bool root, std::string& out )
{
  auto const sp = spelling( d );
  auto binary = [&]( Formula const& l, char const* op, Formula const& r ) {
    if ( !root )
      out += '(';
    render_rec( l, d, false, out );
    out += ' ';
    out += op;
    out += ' ';
    render_rec( r, d, false, out );
    if ( !root )
      out += ')';
  };
  auto unary = [&]( char const* op, Formula const& c, bool space ) {
    out += op;
    if ( space )
      out += ' ';
    render_rec( c, d, false, out );
  };

  switch ( f.op() )
  {
  case Op::True:
    out += sp.t;
    break;
  case Op::False:
    out += sp.f;
    break;
  case Op::Atom:
    out += f.name();
    break;
  case Op::Not:
    unary( sp.not_, f.child(), false );
    break;
  case Op::Next:
    unary( "X", f.child(), true );
    break;
  case Op::Globally:
    unary( "G", f.child(), true );
    break;
  case Op::Finally:
    unary( "F", f.child(), true );
    break;
  case Op::And:
    binary( f.lhs(), sp.and_, f.rhs() );
    break;
  case Op::Or:
    binary( f.lhs(), sp.or_, f.rhs() );
    break;
  case Op::Implies:
    binary( f.lhs(), "->", f.rhs() );
    break;
  case Op::Iff:
    binary( f.lhs(), "<->", f.rhs() );
    break;
  case Op::Until:
    binary( f.lhs(), "U", f.rhs() );
    break;
  case Op::Release:
    binary( f.lhs(), sp.release, f.rhs() );
    break;
  case Op::WeakUntil:
    if ( d == Dialect::Smv )
    {
      render_rec( disj( until( f.lhs(), f.rhs() ), globally( f.lhs() ) ), d, root, out );
    }
    else
    {
      binary( f.lhs(), "W", f.rhs() );
    }
    break;
  }
}

} // namespace

std::string render( Formula const& f, Dialect dialect )
{
  std::string out;
  render_rec( f, dialect, true, out );
  return out;
}

std::vector<bool> const& LassoTrace::at( std::size_t position ) const
{
  if ( position < stem.size() )
  {
    return stem[position];
  }
  return loop[( position - stem.size() ) % loop.size()];
}

void validate_trace( LassoTrace const& t )
{
  if ( t.loop.empty() )
  {
    throw std::invalid_argument( "lasso trace needs a nonempty loop" );
  }
  auto check = [&]( std::vector<bool> const& v ) {
    if ( v.size() != t.atoms.size() )
    {
      throw std::invalid_argument( "lasso valuation does not cover the atom set" );
    }
  };
  std::for_each( t.stem.begin(), t.stem.end(), check );
  std::for_each( t.loop.begin(), t.loop.end(), check );
}

bool same_word( LassoTrace const& a, LassoTrace const& b )
{
  std::vector<std::size_t> columns;
  for ( auto const& name : a.atoms )
  {
    auto it = std::find( b.atoms.begin(), b.atoms.end(), name );
    if ( it == b.atoms.end() )
    {
      return false;
    }
    columns.push_back( static_cast<std::size_t>( it - b.atoms.begin() ) );
  }
  // Two lasso words agree everywhere iff they agree on the first
  // max(stem) + lcm(loop) positions.
  std::size_t const stem = std::max( a.stem.size(), b.stem.size() );
  std::size_t const period = std::lcm( a.loop.size(), b.loop.size() );
  for ( std::size_t p = 0; p < stem + period; ++p )
  {
    auto const& va = a.at( p );
    auto const& vb = b.at( p );
    for ( std::size_t i = 0; i < columns.size(); ++i )
    {
      if ( va[i] != vb[columns[i]] )
      {
        return false;
      }
    }
  }
  return true;
}

UnknownAtom::UnknownAtom( std::string const& name )
    : std::runtime_error( "unknown atom '" + name + "'" ), atom( name )
{
}

std::string bit_atom( std::string_view signal, std::int64_t index )
{
  return std::string( signal ) + "_" + std::to_string( index );
}

std::vector<std::string> Signal::bit_atoms() const
{
  if ( !width )
  {
    return { name };
  }
  std::vector<std::string> out;
  for ( std::int64_t i = 0; i < *width; ++i )
  {
    out.push_back( bit_atom( name, i ) );
  }
  return out;
}

std::vector<std::string> LtlProblem::atoms() const
{
  std::vector<std::string> out = inputs;
  out.insert( out.end(), outputs.begin(), outputs.end() );
  return out;
}

} // namespace natsyn::ltl
