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
#include <bit>
#include <limits>

namespace natsyn::ltl
{

std::uint64_t lasso_space( std::size_t atom_count, std::size_t max_len )
{
  constexpr auto cap = std::numeric_limits<std::uint64_t>::max();
  std::uint64_t total = 0;
  for ( std::size_t k = 1; k <= max_len; ++k )
  {
    std::size_t const bits = atom_count * k;
    if ( bits >= 58 )
    {
      return cap;
    }
    std::uint64_t const per_shape = std::uint64_t{ 1 } << bits;
    std::uint64_t const shape_total = per_shape * k;
    if ( total > cap - shape_total )
    {
      return cap;
    }
    total += shape_total;
  }
  return total;
}

namespace
{

// Lane j of a batch starting at `base` carries valuation index base + j.
// Bit (p, i) of the index sits at (k-1-p)*d + (d-1-i).
void fill_atom_words( std::size_t k, std::size_t d, std::uint64_t base, std::vector<std::uint64_t>& words )
{
  static constexpr std::uint64_t low_patterns[6] = {
      0xaaaaaaaaaaaaaaaaull, 0xccccccccccccccccull, 0xf0f0f0f0f0f0f0f0ull,
      0xff00ff00ff00ff00ull, 0xffff0000ffff0000ull, 0xffffffff00000000ull,
  };
  words.assign( k * d, 0 );
  for ( std::size_t p = 0; p < k; ++p )
  {
    for ( std::size_t i = 0; i < d; ++i )
    {
      std::size_t const bit = ( k - 1 - p ) * d + ( d - 1 - i );
      words[p * d + i] = bit < 6 ? low_patterns[bit] : ( ( base >> bit ) & 1u ) ? ~std::uint64_t{ 0 } : 0;
    }
  }
}

LassoTrace decode( std::vector<std::string> const& atoms, std::size_t k, std::size_t stem, std::uint64_t index )
{
  std::size_t const d = atoms.size();
  LassoTrace t;
  t.atoms = atoms;
  for ( std::size_t p = 0; p < k; ++p )
  {
    std::vector<bool> v( d );
    for ( std::size_t i = 0; i < d; ++i )
    {
      v[i] = ( index >> ( ( k - 1 - p ) * d + ( d - 1 - i ) ) ) & 1u;
    }
    ( p < stem ? t.stem : t.loop ).push_back( std::move( v ) );
  }
  return t;
}

} // namespace

InequivResult bounded_inequiv( Formula const& f, Formula const& g, std::span<std::string const> atoms,
                               InequivOptions const& options )
{
  std::size_t const d = atoms.size();
  if ( d > options.max_atoms )
  {
    throw BudgetExceeded( "bounded_inequiv: " + std::to_string( d ) + " atoms exceed the limit of " +
                          std::to_string( options.max_atoms ) );
  }
  if ( lasso_space( d, options.max_len ) > options.lasso_cap )
  {
    throw BudgetExceeded( "bounded_inequiv: lasso space exceeds the configured cap" );
  }

  auto const cf = compile( f, atoms );
  auto const cg = compile( g, atoms );
  std::vector<std::string> const atom_list( atoms.begin(), atoms.end() );

  InequivResult result;
  std::vector<std::uint64_t> words;
  std::vector<std::uint64_t> out_f( options.max_len ), out_g( options.max_len );
  std::uint64_t batches = 0;

  for ( std::size_t k = 1; k <= options.max_len; ++k )
  {
    std::uint64_t const count = std::uint64_t{ 1 } << ( d * k );
    for ( std::size_t stem = k; stem-- > 0; )
    {
      for ( std::uint64_t base = 0; base < count; base += 64 )
      {
        if ( options.deadline && ( ++batches & 0xff ) == 0 && std::chrono::steady_clock::now() > *options.deadline )
        {
          result.status = InequivResult::Status::DeadlineReached;
          return result;
        }
        fill_atom_words( k, d, base, words );
        eval_batch( cf, stem, k - stem, words, out_f );
        eval_batch( cg, stem, k - stem, words, out_g );
        std::uint64_t const lanes = std::min<std::uint64_t>( 64, count - base );
        std::uint64_t const mask = lanes == 64 ? ~std::uint64_t{ 0 } : ( ( std::uint64_t{ 1 } << lanes ) - 1 );
        std::uint64_t const diff = ( out_f[0] ^ out_g[0] ) & mask;
        if ( diff != 0 )
        {
          auto const lane = static_cast<std::uint64_t>( std::countr_zero( diff ) );
          result.lassos_checked += lane + 1;
          result.status = InequivResult::Status::Witness;
          result.witness = decode( atom_list, k, stem, base + lane );
          return result;
        }
        result.lassos_checked += lanes;
      }
    }
  }
  if ( options.deadline && std::chrono::steady_clock::now() > *options.deadline )
  {
    result.status = InequivResult::Status::DeadlineReached;
  }
  return result;
}

InequivResult bounded_inequiv( Formula const& f, Formula const& g, InequivOptions const& options )
{
  auto atoms = atoms_of( f );
  for ( auto const& a : atoms_of( g ) )
  {
    if ( std::find( atoms.begin(), atoms.end(), a ) == atoms.end() )
    {
      atoms.push_back( a );
    }
  }
  return bounded_inequiv( f, g, atoms, options );
}

} // namespace natsyn::ltl
