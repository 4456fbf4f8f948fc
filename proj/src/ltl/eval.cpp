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
#include <unordered_map>

namespace natsyn::ltl
{

namespace
{

struct Compiler
{
  std::unordered_map<std::string, std::uint32_t> atom_index;
  std::unordered_map<Formula, std::uint32_t, FormulaHash> memo;
  CompiledFormula out;

  std::uint32_t emit( Formula const& f )
  {
    if ( auto it = memo.find( f ); it != memo.end() )
    {
      return it->second;
    }
    CompiledFormula::Instr ins{ f.op() };
    if ( f.op() == Op::Atom )
    {
      auto it = atom_index.find( f.name() );
      if ( it == atom_index.end() )
      {
        throw UnknownAtom( f.name() );
      }
      ins.a = it->second;
    }
    else if ( is_unary( f.op() ) )
    {
      ins.a = emit( f.child() );
    }
    else if ( is_binary( f.op() ) )
    {
      ins.a = emit( f.lhs() );
      ins.b = emit( f.rhs() );
    }
    auto const id = static_cast<std::uint32_t>( out.code.size() );
    out.code.push_back( ins );
    memo.emplace( f, id );
    return id;
  }
};

constexpr std::uint64_t ones = ~std::uint64_t{ 0 };

} // namespace

CompiledFormula compile( Formula const& f, std::span<std::string const> atoms )
{
  Compiler c;
  c.out.atoms.assign( atoms.begin(), atoms.end() );
  for ( std::uint32_t i = 0; i < atoms.size(); ++i )
  {
    c.atom_index.emplace( atoms[i], i );
  }
  c.emit( f );
  return std::move( c.out );
}

void eval_batch( CompiledFormula const& cf, std::size_t stem, std::size_t loop,
                 std::span<std::uint64_t const> atom_words, std::span<std::uint64_t> out )
{
  std::size_t const n = stem + loop;
  std::size_t const natoms = cf.atoms.size();
  if ( loop == 0 || atom_words.size() < n * natoms || out.size() < n || cf.code.empty() )
  {
    throw std::invalid_argument( "eval_batch: malformed lasso batch" );
  }

  // values[instr * n + position]
  thread_local std::vector<std::uint64_t> values;
  values.resize( cf.code.size() * n );
  auto succ = [&]( std::size_t p ) { return p + 1 < n ? p + 1 : stem; };

  for ( std::size_t k = 0; k < cf.code.size(); ++k )
  {
    auto const& ins = cf.code[k];
    std::uint64_t* v = &values[k * n];
    std::uint64_t const* a = &values[ins.a * n];
    std::uint64_t const* b = &values[ins.b * n];

    // Fixpoint operators: v[p] = now[p] | (keep[p] & v[succ p]), evaluated
    // backwards twice around the loop, seeded with 0 (least) or 1 (greatest).
    auto fixpoint = [&]( auto now, auto keep, std::uint64_t seed ) {
      v[stem] = seed;
      for ( int pass = 0; pass < 2; ++pass )
      {
        for ( std::size_t p = n; p-- > stem; )
        {
          v[p] = now( p ) | ( keep( p ) & v[succ( p )] );
        }
      }
      for ( std::size_t p = stem; p-- > 0; )
      {
        v[p] = now( p ) | ( keep( p ) & v[p + 1] );
      }
    };

    switch ( ins.op )
    {
    case Op::True:
      std::fill_n( v, n, ones );
      break;
    case Op::False:
      std::fill_n( v, n, 0 );
      break;
    case Op::Atom:
      for ( std::size_t p = 0; p < n; ++p )
        v[p] = atom_words[p * natoms + ins.a];
      break;
    case Op::Not:
      for ( std::size_t p = 0; p < n; ++p )
        v[p] = ~a[p];
      break;
    case Op::And:
      for ( std::size_t p = 0; p < n; ++p )
        v[p] = a[p] & b[p];
      break;
    case Op::Or:
      for ( std::size_t p = 0; p < n; ++p )
        v[p] = a[p] | b[p];
      break;
    case Op::Implies:
      for ( std::size_t p = 0; p < n; ++p )
        v[p] = ~a[p] | b[p];
      break;
    case Op::Iff:
      for ( std::size_t p = 0; p < n; ++p )
        v[p] = ~( a[p] ^ b[p] );
      break;
    case Op::Next:
      for ( std::size_t p = 0; p < n; ++p )
        v[p] = a[succ( p )];
      break;
    case Op::Until: // b | (a & X(a U b)), least
      fixpoint( [&]( std::size_t p ) { return b[p]; }, [&]( std::size_t p ) { return a[p]; }, 0 );
      break;
    case Op::WeakUntil: // b | (a & X(a W b)), greatest
      fixpoint( [&]( std::size_t p ) { return b[p]; }, [&]( std::size_t p ) { return a[p]; }, ones );
      break;
    case Op::Release: // b & (a | X(a R b)), greatest
      fixpoint( [&]( std::size_t p ) { return a[p] & b[p]; }, [&]( std::size_t p ) { return b[p]; }, ones );
      break;
    case Op::Globally: // a & X G a, greatest
      fixpoint( []( std::size_t ) { return std::uint64_t{ 0 }; }, [&]( std::size_t p ) { return a[p]; }, ones );
      break;
    case Op::Finally: // a | X F a, least
      fixpoint( [&]( std::size_t p ) { return a[p]; }, []( std::size_t ) { return ones; }, 0 );
      break;
    }
  }
  std::copy_n( &values[( cf.code.size() - 1 ) * n], n, out.begin() );
}

namespace
{

std::vector<std::uint64_t> single_lane( LassoTrace const& t, std::vector<std::size_t> const& columns )
{
  std::size_t const n = t.length();
  std::vector<std::uint64_t> words( n * columns.size() );
  for ( std::size_t p = 0; p < n; ++p )
  {
    auto const& v = t.at( p );
    for ( std::size_t i = 0; i < columns.size(); ++i )
    {
      words[p * columns.size() + i] = v[columns[i]] ? 1u : 0u;
    }
  }
  return words;
}

std::vector<bool> eval_all( Formula const& f, LassoTrace const& t )
{
  validate_trace( t );
  auto const atoms = atoms_of( f );
  std::vector<std::size_t> columns;
  for ( auto const& a : atoms )
  {
    auto it = std::find( t.atoms.begin(), t.atoms.end(), a );
    if ( it == t.atoms.end() )
    {
      throw UnknownAtom( a );
    }
    columns.push_back( static_cast<std::size_t>( it - t.atoms.begin() ) );
  }
  auto const cf = compile( f, atoms );
  auto const words = single_lane( t, columns );
  std::vector<std::uint64_t> out( t.length() );
  eval_batch( cf, t.stem.size(), t.loop.size(), words, out );
  std::vector<bool> result( out.size() );
  std::transform( out.begin(), out.end(), result.begin(), []( std::uint64_t w ) { return ( w & 1u ) != 0; } );
  return result;
}

} // namespace

bool eval_lasso( Formula const& f, LassoTrace const& t ) { return eval_all( f, t ).front(); }

std::vector<bool> eval_positions( Formula const& f, LassoTrace const& t ) { return eval_all( f, t ); }

} // namespace natsyn::ltl
