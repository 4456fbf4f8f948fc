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

using namespace natsyn::ltl;

LtlProblem expand_semantics( GroundSpec const& ground )
{
  auto const& initially = ground.section( SectionKind::Initially );
  auto const& preset = ground.section( SectionKind::Preset );
  auto const& require = ground.section( SectionKind::Require );
  auto const& assert_ = ground.section( SectionKind::Assert );
  auto const& assume = ground.section( SectionKind::Assume );
  auto const& guarantee = ground.section( SectionKind::Guarantee );

  Formula const f_initially = conj_all( initially );
  Formula const f_preset = conj_all( preset );
  Formula const f_require = conj_all( require );
  Formula const f_assert = conj_all( assert_ );
  Formula const f_assume = conj_all( assume );
  Formula const f_guarantee = conj_all( guarantee );
  Formula const antecedent = conj( globally( f_require ), f_assume );

  LtlProblem p;
  p.input_signals = ground.inputs;
  p.output_signals = ground.outputs;
  for ( auto const& s : ground.inputs )
  {
    for ( auto& a : s.bit_atoms() )
      p.inputs.push_back( std::move( a ) );
  }
  for ( auto const& s : ground.outputs )
  {
    for ( auto& a : s.bit_atoms() )
      p.outputs.push_back( std::move( a ) );
  }

  bool const strict = is_strict( ground.semantics );
  // The safety conjunct disappears only when both of its sections are empty.
  bool const has_strict_safety = strict && ( !require.empty() || !assert_.empty() );
  std::optional<Formula> strict_safety;
  if ( has_strict_safety )
  {
    strict_safety = weak_until( f_assert, negate( f_require ) );
  }

  if ( !strict )
  {
    p.phi = implies( f_initially, conj( f_preset, implies( antecedent, conj( globally( f_assert ), f_guarantee ) ) ) );
  }
  else if ( strict_safety )
  {
    p.phi = implies( f_initially, conj( conj( f_preset, *strict_safety ), implies( antecedent, f_guarantee ) ) );
  }
  else
  {
    p.phi = implies( f_initially, conj( f_preset, implies( antecedent, f_guarantee ) ) );
  }

  for ( auto const& r : require )
  {
    p.assumptions.push_back( globally( r ) );
  }
  p.assumptions.insert( p.assumptions.end(), assume.begin(), assume.end() );
  if ( !strict )
  {
    for ( auto const& a : assert_ )
    {
      p.guarantees.push_back( globally( a ) );
    }
  }
  p.guarantees.insert( p.guarantees.end(), guarantee.begin(), guarantee.end() );

  if ( !initially.empty() )
  {
    p.prefix.initially = f_initially;
  }
  if ( !preset.empty() )
  {
    p.prefix.preset = f_preset;
  }
  p.prefix.strict_safety = strict_safety;
  return p;
}

} // namespace natsyn::tlsf
