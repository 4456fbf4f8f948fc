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
#include <natsyn/verilog.hpp>

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace natsyn::testing
{

/// Reference search: every lasso of the circuit's own run graph with at most
/// `max_len` steps, driven input-first from the reset state, checked with
/// eval_lasso. A run is a lasso when the latch state after the last step
/// equals the state at the loop start.
inline std::optional<ltl::LassoTrace> brute_force_violation( verilog::AigerCircuit const& c, ltl::Formula const& f,
                                                             std::size_t max_len )
{
  std::size_t const ni = c.inputs.size();
  std::vector<std::string> atoms;
  for ( std::size_t k = 0; k < ni; ++k )
    atoms.push_back( c.input_atom( k ) );
  for ( std::size_t k = 0; k < c.outputs.size(); ++k )
    atoms.push_back( c.output_atom( k ) );

  for ( std::size_t len = 1; len <= max_len; ++len )
  {
    std::uint64_t const words = std::uint64_t{ 1 } << ( ni * len );
    for ( std::uint64_t w = 0; w < words; ++w )
    {
      std::vector<std::vector<bool>> inputs( len, std::vector<bool>( ni ) );
      for ( std::size_t p = 0; p < len; ++p )
        for ( std::size_t k = 0; k < ni; ++k )
          inputs[p][k] = w >> ( p * ni + k ) & 1u;
      // One extra step exposes the state after the last valuation.
      auto padded = inputs;
      padded.emplace_back( ni );
      auto const steps = verilog::simulate( c, padded );
      for ( std::size_t start = 0; start < len; ++start )
      {
        if ( steps[start].latches != steps[len].latches )
          continue;
        ltl::LassoTrace t;
        t.atoms = atoms;
        for ( std::size_t p = 0; p < len; ++p )
        {
          std::vector<bool> v = steps[p].inputs;
          v.insert( v.end(), steps[p].outputs.begin(), steps[p].outputs.end() );
          ( p < start ? t.stem : t.loop ).push_back( std::move( v ) );
        }
        if ( !ltl::eval_lasso( f, t ) )
          return t;
      }
    }
  }
  return std::nullopt;
}

} // namespace natsyn::testing
