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

#pragma once

#include <natsyn/ltl.hpp>

#include <random>

namespace natsyn::testing
{

/// Seeded generator of formulas with an exact node count, and of lassos.
class RandomFormulas
{
public:
  RandomFormulas( unsigned seed, std::vector<std::string> atoms ) : rng_( seed ), atoms_( std::move( atoms ) ) {}

  ltl::Formula formula( std::size_t size )
  {
    using namespace ltl;
    if ( size <= 1 )
    {
      auto const pick = pick_index( atoms_.size() + 2 );
      if ( pick < atoms_.size() )
        return atom( atoms_[pick] );
      return constant( pick == atoms_.size() );
    }
    if ( size == 2 || pick_index( 3 ) == 0 )
    {
      static constexpr Op unary[] = { Op::Not, Op::Next, Op::Globally, Op::Finally };
      return Formula::make( unary[pick_index( 4 )], { formula( size - 1 ) } );
    }
    static constexpr Op binary[] = { Op::And, Op::Or, Op::Implies, Op::Iff, Op::Until, Op::WeakUntil, Op::Release };
    auto const left = 1 + pick_index( size - 2 );
    return Formula::make( binary[pick_index( 7 )], { formula( left ), formula( size - 1 - left ) } );
  }

  ltl::LassoTrace lasso( std::size_t length )
  {
    ltl::LassoTrace t;
    t.atoms = atoms_;
    auto const stem = pick_index( length );
    for ( std::size_t p = 0; p < length; ++p )
    {
      std::vector<bool> v( atoms_.size() );
      for ( std::size_t i = 0; i < v.size(); ++i )
        v[i] = pick_index( 2 ) == 1;
      ( p < stem ? t.stem : t.loop ).push_back( v );
    }
    return t;
  }

  std::size_t pick_index( std::size_t n ) { return std::uniform_int_distribution<std::size_t>( 0, n - 1 )( rng_ ); }

  std::mt19937& rng() { return rng_; }

private:
  std::mt19937 rng_;
  std::vector<std::string> atoms_;
};

} // namespace natsyn::testing
