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

namespace natsyn::ltl
{

Formula fold_prefix( Prefix const& prefix, Formula x )
{
  Formula body = std::move( x );
  if ( prefix.strict_safety )
  {
    body = conj( *prefix.strict_safety, body );
  }
  if ( prefix.preset )
  {
    body = conj( *prefix.preset, body );
  }
  if ( prefix.initially )
  {
    body = implies( *prefix.initially, body );
  }
  return body;
}

std::vector<Formula> decompose_realizable( LtlProblem const& p )
{
  if ( p.guarantees.empty() )
  {
    return { fold_prefix( p.prefix, constant( true ) ) };
  }
  Formula const antecedent = conj_all( p.assumptions );
  std::vector<Formula> out;
  out.reserve( p.guarantees.size() );
  for ( auto const& g : p.guarantees )
  {
    out.push_back( fold_prefix( p.prefix, implies( antecedent, g ) ) );
  }
  return out;
}

std::vector<Formula> decompose_unrealizable( LtlProblem const& p )
{
  Formula const consequent = conj_all( p.guarantees );
  if ( p.assumptions.empty() )
  {
    return { negate( fold_prefix( p.prefix, implies( constant( true ), consequent ) ) ) };
  }
  std::vector<Formula> out;
  out.reserve( p.assumptions.size() );
  for ( auto const& a : p.assumptions )
  {
    out.push_back( negate( fold_prefix( p.prefix, implies( a, consequent ) ) ) );
  }
  return out;
}

} // namespace natsyn::ltl
