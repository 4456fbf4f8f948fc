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

// Naive LTL semantics over lasso words, by explicit unrolling. Test-only:
// shares nothing with the fixpoint evaluator beyond the formula type.

#pragma once

#include <natsyn/ltl.hpp>

#include <cstdint>
#include <map>
#include <vector>

namespace natsyn::testing
{

/// Lane-parallel unrolling oracle. Position p >= stem + loop wraps into the
/// loop; every until/release scan looks exactly stem + loop steps ahead,
/// which visits every distinct suffix at least once.
class UnrollOracle
{
public:
  UnrollOracle( std::vector<std::string> atoms, std::size_t stem, std::size_t loop,
                std::vector<std::uint64_t> const& atom_words )
      : atoms_( std::move( atoms ) ), stem_( stem ), loop_( loop ), words_( atom_words )
  {
  }

  std::uint64_t holds( ltl::Formula const& f, std::size_t position )
  {
    using ltl::Op;
    std::size_t const p = normalize( position );
    std::size_t const horizon = stem_ + loop_;
    switch ( f.op() )
    {
    case Op::True:
      return ~std::uint64_t{ 0 };
    case Op::False:
      return 0;
    case Op::Atom:
      for ( std::size_t i = 0; i < atoms_.size(); ++i )
        if ( atoms_[i] == f.name() )
          return words_[p * atoms_.size() + i];
      throw ltl::UnknownAtom( f.name() );
    case Op::Not:
      return ~holds( f.child(), p );
    case Op::And:
      return holds( f.lhs(), p ) & holds( f.rhs(), p );
    case Op::Or:
      return holds( f.lhs(), p ) | holds( f.rhs(), p );
    case Op::Implies:
      return ~holds( f.lhs(), p ) | holds( f.rhs(), p );
    case Op::Iff:
      return ~( holds( f.lhs(), p ) ^ holds( f.rhs(), p ) );
    case Op::Next:
      return holds( f.child(), p + 1 );
    case Op::Globally: {
      std::uint64_t all = ~std::uint64_t{ 0 };
      for ( std::size_t j = 0; j < horizon; ++j )
        all &= holds( f.child(), p + j );
      return all;
    }
    case Op::Finally: {
      std::uint64_t any = 0;
      for ( std::size_t j = 0; j < horizon; ++j )
        any |= holds( f.child(), p + j );
      return any;
    }
    case Op::Until:
    case Op::WeakUntil: {
      // exists j: b at j and a everywhere before j
      std::uint64_t found = 0;
      std::uint64_t prefix_a = ~std::uint64_t{ 0 };
      for ( std::size_t j = 0; j < horizon; ++j )
      {
        found |= prefix_a & holds( f.rhs(), p + j );
        prefix_a &= holds( f.lhs(), p + j );
      }
      return f.op() == Op::Until ? found : ( found | prefix_a );
    }
    case Op::Release: {
      // b holds up to and including the first a; or b forever
      std::uint64_t released = 0;
      std::uint64_t prefix_b = ~std::uint64_t{ 0 };
      for ( std::size_t j = 0; j < horizon; ++j )
      {
        prefix_b &= holds( f.rhs(), p + j );
        released |= prefix_b & holds( f.lhs(), p + j );
      }
      return released | prefix_b;
    }
    }
    return 0;
  }

private:
  std::size_t normalize( std::size_t p ) const
  {
    return p < stem_ + loop_ ? p : stem_ + ( p - stem_ ) % loop_;
  }

  std::vector<std::string> atoms_;
  std::size_t stem_;
  std::size_t loop_;
  std::vector<std::uint64_t> const& words_;
};

inline bool oracle_eval( ltl::Formula const& f, ltl::LassoTrace const& t )
{
  std::vector<std::uint64_t> words;
  for ( std::size_t p = 0; p < t.length(); ++p )
    for ( bool b : t.at( p ) )
      words.push_back( b ? 1u : 0u );
  UnrollOracle oracle( t.atoms, t.stem.size(), t.loop.size(), words );
  return oracle.holds( f, 0 ) & 1u;
}

/// Brute-force first disagreement over all lassos up to max_len, in the
/// documented enumeration order, one lasso at a time.
inline std::optional<ltl::LassoTrace> brute_force_witness( ltl::Formula const& f, ltl::Formula const& g,
                                                           std::vector<std::string> const& atoms,
                                                           std::size_t max_len )
{
  std::size_t const d = atoms.size();
  for ( std::size_t k = 1; k <= max_len; ++k )
  {
    for ( std::size_t stem = k; stem-- > 0; )
    {
      for ( std::uint64_t index = 0; index < ( std::uint64_t{ 1 } << ( d * k ) ); ++index )
      {
        ltl::LassoTrace t;
        t.atoms = atoms;
        for ( std::size_t p = 0; p < k; ++p )
        {
          std::vector<bool> v( d );
          for ( std::size_t i = 0; i < d; ++i )
            v[i] = ( index >> ( ( k - 1 - p ) * d + ( d - 1 - i ) ) ) & 1u;
          ( p < stem ? t.stem : t.loop ).push_back( v );
        }
        if ( oracle_eval( f, t ) != oracle_eval( g, t ) )
          return t;
      }
    }
  }
  return std::nullopt;
}

} // namespace natsyn::testing
