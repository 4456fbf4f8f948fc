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

#include <natsyn/engine.hpp>

#include <sstream>

namespace natsyn::engine
{

namespace
{

using ltl::Formula;
using ltl::Op;

/// Syntactic safety: eventualities occur only under negative polarity and
/// invariances only under positive polarity.
bool is_safety( Formula const& f, bool positive = true )
{
  switch ( f.op() )
  {
  case Op::True:
  case Op::False:
  case Op::Atom:
    return true;
  case Op::Not:
    return is_safety( f.child(), !positive );
  case Op::And:
  case Op::Or:
    return is_safety( f.lhs(), positive ) && is_safety( f.rhs(), positive );
  case Op::Implies:
    return is_safety( f.lhs(), !positive ) && is_safety( f.rhs(), positive );
  case Op::Iff:
    return is_safety( f.lhs(), true ) && is_safety( f.lhs(), false ) && is_safety( f.rhs(), true ) &&
           is_safety( f.rhs(), false );
  case Op::Next:
    return is_safety( f.child(), positive );
  case Op::Until:
  case Op::Finally:
    if ( positive )
      return false;
    break;
  case Op::WeakUntil:
  case Op::Release:
  case Op::Globally:
    if ( !positive )
      return false;
    break;
  }
  if ( f.op() == Op::Finally || f.op() == Op::Globally )
    return is_safety( f.child(), positive );
  return is_safety( f.lhs(), positive ) && is_safety( f.rhs(), positive );
}

/// The part of a violated formula that the trace falsifies: implications
/// with a true antecedent and conjunctions are descended.
Formula violated_core( Formula f, ltl::LassoTrace const& trace )
{
  for ( ;; )
  {
    if ( f.op() == Op::Implies && ltl::eval_lasso( f.lhs(), trace ) )
      f = f.rhs();
    else if ( f.op() == Op::And )
      f = ltl::eval_lasso( f.lhs(), trace ) ? f.rhs() : f.lhs();
    else
      return f;
  }
}

std::optional<std::size_t> first_violation( Formula const& core, ltl::LassoTrace const& trace )
{
  if ( core.op() != Op::Globally || !is_safety( core.child() ) )
    return std::nullopt;
  auto const values = ltl::eval_positions( core.child(), trace );
  for ( std::size_t k = 0; k < values.size(); ++k )
    if ( !values[k] )
      return k;
  return std::nullopt;
}

} // namespace

std::string format_trace_table( ltl::LassoTrace const& trace )
{
  std::ostringstream out;
  out << "| step |";
  for ( auto const& a : trace.atoms )
    out << ' ' << a << " |";
  out << "  |\n|---|";
  for ( std::size_t i = 0; i < trace.atoms.size(); ++i )
    out << "---|";
  out << "---|\n";
  auto const row = [&]( std::size_t step, std::vector<bool> const& values, bool loop_start ) {
    out << "| " << step << " |";
    for ( bool v : values )
      out << ' ' << ( v ? 1 : 0 ) << " |";
    out << ( loop_start ? " loop |\n" : "  |\n" );
  };
  std::size_t step = 0;
  for ( auto const& v : trace.stem )
    row( step++, v, false );
  for ( std::size_t i = 0; i < trace.loop.size(); ++i )
    row( step++, trace.loop[i], i == 0 );
  return out.str();
}

std::string format_feedback( std::vector<ltl::Formula> const& subproperties,
                             std::vector<toolchain::CheckVerdict> const& verdicts, ltl::LtlProblem const& problem )
{
  if ( subproperties.size() != verdicts.size() )
    throw std::invalid_argument( "format_feedback: one verdict per subproperty is required" );
  std::ostringstream out;
  bool any = false;
  for ( std::size_t i = 0; i < verdicts.size(); ++i )
  {
    auto const& v = verdicts[i];
    if ( v.kind != toolchain::CheckVerdict::Kind::Fail || !v.trace )
      continue;
    if ( any )
      out << '\n';
    any = true;
    out << "Violated subproperty " << ( i + 1 ) << " of " << subproperties.size() << ":\n\n    "
        << ltl::render( subproperties[i], ltl::Dialect::TlsfExpr ) << "\n\n";
    out << "Counterexample (inputs: ";
    for ( std::size_t k = 0; k < problem.inputs.size(); ++k )
      out << ( k ? ", " : "" ) << problem.inputs[k];
    if ( problem.inputs.empty() )
      out << "none";
    out << "; outputs: ";
    for ( std::size_t k = 0; k < problem.outputs.size(); ++k )
      out << ( k ? ", " : "" ) << problem.outputs[k];
    if ( problem.outputs.empty() )
      out << "none";
    out << "):\n\n" << format_trace_table( *v.trace );
    auto const core = violated_core( subproperties[i], *v.trace );
    if ( auto const step = first_violation( core, *v.trace ) )
      out << "\nThe property " << ltl::render( core, ltl::Dialect::TlsfExpr ) << " is violated at step " << *step
          << ".\n";
  }
  if ( !any )
    throw std::invalid_argument( "format_feedback: no failing verdict with a trace" );
  return out.str();
}

} // namespace natsyn::engine
