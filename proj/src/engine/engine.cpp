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

#include <algorithm>
#include <regex>
#include <sstream>

namespace natsyn::engine
{

namespace
{

using clock = std::chrono::steady_clock;
using toolchain::CheckVerdict;
using verilog::Role;

enum class Result
{
  Pass,
  Fail,         // feedback available
  Inconclusive, // no counterexample and no proof
  Error,
};

std::string tail( std::string const& text, std::size_t limit )
{
  return text.size() <= limit ? text : "..." + text.substr( text.size() - limit );
}

ltl::LtlProblem problem_of( tlsf::TlsfSpec const& spec, std::map<std::string, std::int64_t> const& bindings = {} )
{
  return tlsf::expand_semantics( tlsf::instantiate( spec, bindings ) );
}

std::string strip_or_keep( std::string_view text )
{
  try
  {
    return tlsf::strip_metadata( text );
  }
  catch ( std::exception const& )
  {
    return std::string( text );
  }
}

std::optional<std::int64_t> integer_literal( std::string const& text )
{
  try
  {
    std::size_t used = 0;
    auto const v = std::stoll( text, &used );
    if ( used == text.size() && v > 0 )
      return v;
  }
  catch ( std::exception const& )
  {
  }
  return std::nullopt;
}

/// Contents of the first ```tlsf fence; the whole text without one.
std::string tlsf_block( std::string const& response )
{
  static std::regex const fence( "```[ \\t]*tlsf[ \\t]*\\r?\\n([\\s\\S]*?)```", std::regex::icase );
  std::smatch m;
  if ( std::regex_search( response, m, fence ) )
    return m[1].str();
  return response;
}


} // namespace

std::string_view status_name( Status s )
{
  switch ( s )
  {
  case Status::Solved:
    return "solved";
  case Status::Unsolved:
    return "unsolved";
  case Status::Error:
    return "error";
  }
  return "unknown";
}

std::string_view stage_name( Stage s )
{
  switch ( s )
  {
  case Stage::None:
    return "none";
  case Stage::Parse:
    return "parse";
  case Stage::Backend:
    return "backend";
  case Stage::Extract:
    return "extract";
  case Stage::Lint:
    return "lint";
  case Stage::Translate:
    return "translate";
  case Stage::Check:
    return "check";
  case Stage::Deadline:
    return "deadline";
  }
  return "unknown";
}

std::string_view route_name( Route r ) { return r == Route::Direct ? "natural-direct" : "natural-auto"; }

std::string_view kind_name( TargetVerdict::Kind k )
{
  switch ( k )
  {
  case TargetVerdict::Kind::Pass:
    return "pass";
  case TargetVerdict::Kind::Fail:
    return "fail";
  case TargetVerdict::Kind::Unavailable:
    return "unavailable";
  case TargetVerdict::Kind::Error:
    return "error";
  }
  return "unknown";
}

std::string wrap_parameterized( verilog::VerilogModule const& m, ltl::LtlProblem const& problem,
                                std::string const& parameter, std::int64_t value )
{
  auto const name = std::string( verilog::role_name( m.role ) );
  std::regex const header( "\\bmodule(\\s+)" + name + "\\b" );
  std::smatch match;
  if ( !std::regex_search( m.source, match, header ) )
    throw std::invalid_argument( "module " + name + " not found in source" );
  std::string out = match.prefix().str() + "module" + match[1].str() + name + "_impl" + match.suffix().str();
  if ( !out.empty() && out.back() != '\n' )
    out += '\n';

  auto const& ins = m.role == Role::Solution ? problem.input_signals : problem.output_signals;
  auto const& outs = m.role == Role::Solution ? problem.output_signals : problem.input_signals;
  std::vector<std::string> decls{ "input clk" };
  std::vector<std::string> names{ "clk" };
  auto const add = [&]( char const* dir, ltl::Signal const& s ) {
    auto const range = s.width ? "[" + std::to_string( *s.width - 1 ) + ":0] " : std::string{};
    decls.push_back( std::string( dir ) + " " + range + s.name );
    names.push_back( s.name );
  };
  for ( auto const& s : ins )
    add( "input", s );
  for ( auto const& s : outs )
    add( "output", s );

  out += "\nmodule " + name + " (\n";
  for ( std::size_t i = 0; i < decls.size(); ++i )
    out += "    " + decls[i] + ( i + 1 < decls.size() ? ",\n" : "\n" );
  out += ");\n    " + name + "_impl #(." + parameter + "(" + std::to_string( value ) + ")) impl (\n";
  for ( std::size_t i = 0; i < names.size(); ++i )
    out += "        ." + names[i] + "(" + names[i] + ")" + ( i + 1 < names.size() ? ",\n" : "\n" );
  out += "    );\nendmodule\n";
  return out;
}

// ---- the loop -----------------------------------------------------------------------

/// Prompts, extracts and evaluates until a pass, an error or the budget.
struct Engine::Loop
{
  Engine& engine;
  backend::ReasoningLevel level;
  unsigned budget;
  InstanceHints hints;
  std::function<backend::PromptBundle( unsigned )> first;
  std::function<backend::PromptBundle( verilog::VerilogModule const&, std::string const&, unsigned )> repair;
  /// Fills the iteration record. A null evaluator accepts any module as
  /// Inconclusive.
  std::function<Result( verilog::VerilogModule const&, Iteration& )> evaluate;

  Outcome run()
  {
    Outcome out;
    auto const started = clock::now();
    std::optional<verilog::VerilogModule> last_module;
    std::string last_feedback;

    auto finish = [&]( Status s ) {
      out.status = s;
      out.iterations_used = out.iterations.empty() ? 0 : static_cast<unsigned>( out.iterations.size() - 1 );
      out.wall_seconds = std::chrono::duration<double>( clock::now() - started ).count();
      return out;
    };

    for ( unsigned it = 0; it <= budget; ++it )
    {
      if ( clock::now() - started >= engine.options_.instance_ceiling )
      {
        out.error_stage = Stage::Deadline;
        out.detail = "instance wall-clock ceiling reached";
        return finish( Status::Unsolved );
      }

      Iteration rec;
      rec.index = it;
      auto const prompt = last_module ? repair( *last_module, last_feedback, it ) : first( it );
      rec.prompt_kind = prompt.kind;
      rec.prompt_hash = backend::content_hash( prompt.text );

      backend::BackendResponse response;
      try
      {
        response = engine.backend_.complete( prompt, level );
      }
      catch ( backend::BackendError const& e )
      {
        rec.stopped_at = Stage::Backend;
        rec.detail = e.what();
        out.iterations.push_back( std::move( rec ) );
        out.error_stage = Stage::Backend;
        out.detail = e.what();
        return finish( Status::Error );
      }
      rec.tokens = { response.reasoning_tokens, response.output_tokens };
      rec.latency_seconds = response.latency_seconds;
      out.tokens += rec.tokens;

      verilog::VerilogModule m;
      try
      {
        m = verilog::extract_verilog( response.text );
      }
      catch ( verilog::ExtractionError const& e )
      {
        // Without a module there is nothing to repair; the next iteration
        // asks afresh.
        rec.stopped_at = Stage::Extract;
        rec.detail = e.what();
        out.iterations.push_back( std::move( rec ) );
        last_module.reset();
        last_feedback.clear();
        continue;
      }
      rec.role = m.role;
      rec.module_source = m.source;
      out.role = m.role;
      out.final_module = m;
      if ( hints.expected_role && *hints.expected_role != m.role )
      {
        out.role_mismatch = true;
        engine.note( "claimed role " + std::string( verilog::role_name( m.role ) ) + " contradicts expected role " +
                     std::string( verilog::role_name( *hints.expected_role ) ) );
      }

      auto const result = evaluate ? evaluate( m, rec ) : Result::Inconclusive;
      auto const stage = rec.stopped_at;
      auto const detail = rec.detail;
      last_feedback = rec.feedback;
      out.iterations.push_back( std::move( rec ) );
      switch ( result )
      {
      case Result::Pass:
        return finish( Status::Solved );
      case Result::Error:
        out.error_stage = stage;
        out.detail = detail;
        return finish( Status::Error );
      case Result::Inconclusive:
        out.detail = detail;
        return finish( Status::Unsolved );
      case Result::Fail:
        last_module = m;
        break;
      }
    }
    return finish( Status::Unsolved );
  }
};

Engine::Engine( backend::Backend& backend, toolchain::Toolchain const& tools, EngineOptions options )
    : backend_( backend ), tools_( tools ), options_( std::move( options ) )
{
}

void Engine::note( std::string const& message ) const
{
  if ( options_.log )
    options_.log( message );
}

namespace
{

/// Lint, translate and check one module; shared by every workflow.
struct ModuleCheck
{
  toolchain::Toolchain const& tools;
  EngineOptions const& options;

  Result operator()( verilog::VerilogModule const& m, ltl::LtlProblem const& problem, Iteration& rec ) const
  {
    rec.verdicts.clear();
    rec.subproperties.clear();
    auto const issues = verilog::lint_ports( m, problem );
    if ( !issues.empty() )
    {
      rec.stopped_at = Stage::Lint;
      std::string text = "The module interface does not match the specification:\n";
      for ( auto const& i : issues )
        text += "- " + verilog::describe( i ) + "\n";
      rec.detail = text;
      rec.feedback = text;
      return Result::Fail;
    }

    bool const solution = m.role == Role::Solution;
    rec.decomposition = solution ? "realizable" : "unrealizable";
    rec.subproperties = solution ? ltl::decompose_realizable( problem ) : ltl::decompose_unrealizable( problem );

    verilog::AigerCircuit circuit;
    try
    {
      circuit = tools.translate_to_aiger( m, options.translate_limits );
    }
    catch ( toolchain::ToolFailed const& e )
    {
      rec.stopped_at = Stage::Translate;
      rec.detail = e.what();
      rec.feedback = "Yosys could not process the module:\n\n" + tail( e.report.err + e.report.out, 4000 ) + "\n";
      return Result::Fail;
    }
    catch ( toolchain::ToolTimeout const& e )
    {
      rec.stopped_at = Stage::Translate;
      rec.detail = e.what();
      rec.feedback = "Yosys did not finish processing the module within the time limit.\n";
      return Result::Fail;
    }
    catch ( std::exception const& e ) // ToolMissing, unreadable tool output
    {
      rec.stopped_at = Stage::Translate;
      rec.detail = e.what();
      return Result::Error;
    }

    auto check = options.check;
    check.atoms = problem.atoms();
    rec.verdicts = tools.verify( circuit, rec.subproperties, check );

    bool any_fail = false;
    bool any_timeout = false;
    for ( std::size_t i = 0; i < rec.verdicts.size(); ++i )
    {
      auto const& v = rec.verdicts[i];
      switch ( v.kind )
      {
      case CheckVerdict::Kind::Pass:
        break;
      case CheckVerdict::Kind::Fail:
        // The checker contract: every counterexample replays and violates.
        if ( !v.trace || !verilog::replays( circuit, *v.trace ) || ltl::eval_lasso( rec.subproperties[i], *v.trace ) )
        {
          rec.stopped_at = Stage::Check;
          rec.detail = "checker " + v.checker + " returned an invalid counterexample for subproperty " +
                       std::to_string( i + 1 );
          return Result::Error;
        }
        any_fail = true;
        break;
      case CheckVerdict::Kind::Timeout:
        any_timeout = true;
        break;
      case CheckVerdict::Kind::ToolError:
        rec.stopped_at = Stage::Check;
        rec.detail = "subproperty " + std::to_string( i + 1 ) + ": " + v.detail;
        return Result::Error;
      }
    }
    if ( any_fail )
    {
      rec.feedback = format_feedback( rec.subproperties, rec.verdicts, problem );
      return Result::Fail;
    }
    if ( any_timeout )
    {
      rec.stopped_at = Stage::Check;
      rec.detail = "model checking timed out";
      return Result::Inconclusive;
    }
    return Result::Pass;
  }
};

} // namespace

Outcome Engine::run_instance( std::string_view spec_text, backend::ReasoningLevel level, unsigned cex_budget,
                              InstanceHints const& hints )
{
  std::string stripped;
  ltl::LtlProblem problem;
  try
  {
    stripped = tlsf::strip_metadata( spec_text );
    problem = problem_of( tlsf::parse_tlsf( stripped ) );
  }
  catch ( std::exception const& e )
  {
    Outcome out;
    out.error_stage = Stage::Parse;
    out.detail = e.what();
    return out;
  }

  ModuleCheck const check{ tools_, options_ };
  Loop loop{ *this, level, cex_budget, hints, {}, {}, {} };
  loop.first = [&]( unsigned attempt ) { return backend::build_synthesis_prompt( stripped, attempt ); };
  loop.repair = [&]( verilog::VerilogModule const& m, std::string const& feedback, unsigned attempt ) {
    return backend::build_repair_prompt( stripped, m, feedback, attempt );
  };
  loop.evaluate = [&]( verilog::VerilogModule const& m, Iteration& rec ) { return check( m, problem, rec ); };
  return loop.run();
}

ParamOutcome Engine::run_parameterized( std::string_view spec_text, std::vector<std::int64_t> const& values,
                                        backend::ReasoningLevel level, unsigned cex_budget,
                                        InstanceHints const& hints )
{
  if ( values.empty() )
    throw PreconditionError( "run_parameterized: the value list is empty" );
  if ( !std::is_sorted( values.begin(), values.end() ) ||
       std::adjacent_find( values.begin(), values.end() ) != values.end() )
    throw PreconditionError( "run_parameterized: values must be strictly ascending" );

  ParamOutcome po;
  po.values = values;

  std::string stripped;
  tlsf::TlsfSpec spec;
  ltl::LtlProblem default_problem;
  try
  {
    stripped = tlsf::strip_metadata( spec_text );
    spec = tlsf::parse_tlsf( stripped );
    if ( spec.parameters.empty() )
      throw backend::NoParameters( "the specification declares no parameters" );
    default_problem = problem_of( spec );
  }
  catch ( std::exception const& e )
  {
    po.outcome.error_stage = Stage::Parse;
    po.outcome.detail = e.what();
    return po;
  }
  po.parameter = spec.parameters.front().name;

  ModuleCheck const check{ tools_, options_ };
  Loop loop{ *this, level, cex_budget, hints, {}, {}, {} };
  loop.first = [&]( unsigned attempt ) { return backend::build_param_prompt( stripped, attempt ); };
  loop.repair = [&]( verilog::VerilogModule const& m, std::string const& feedback, unsigned attempt ) {
    return backend::build_repair_prompt( stripped, m, feedback, attempt, backend::RepairBase::Parameterized );
  };
  loop.evaluate = [&]( verilog::VerilogModule const& m, Iteration& rec ) {
    auto const declared = std::find_if( m.parameters.begin(), m.parameters.end(),
                                        [&]( verilog::ModuleParameter const& p ) { return p.name == po.parameter; } );
    if ( declared == m.parameters.end() )
    {
      rec.stopped_at = Stage::Lint;
      rec.detail = "module does not declare parameter " + po.parameter;
      rec.feedback = "The module must declare the parameter " + po.parameter +
                     " in its header parameter list and derive all widths from it.\n";
      return Result::Fail;
    }
    // Port widths are evaluated under the module's own default.
    auto lint_problem = default_problem;
    if ( auto const d = integer_literal( declared->default_value ) )
    {
      try
      {
        lint_problem = problem_of( spec, { { po.parameter, *d } } );
      }
      catch ( std::exception const& )
      {
      }
    }
    if ( auto const issues = verilog::lint_ports( m, lint_problem ); !issues.empty() )
      return check( m, lint_problem, rec ); // reports the interface issues

    for ( auto const v : values )
    {
      ltl::LtlProblem problem;
      std::string wrapped;
      verilog::VerilogModule top;
      try
      {
        problem = problem_of( spec, { { po.parameter, v } } );
        wrapped = wrap_parameterized( m, problem, po.parameter, v );
        top = verilog::parse_module( wrapped );
      }
      catch ( std::exception const& e )
      {
        rec.stopped_at = Stage::Parse;
        rec.detail = po.parameter + " = " + std::to_string( v ) + ": " + e.what();
        return Result::Error;
      }
      auto const r = check( top, problem, rec );
      if ( r == Result::Pass )
      {
        rec.values_passed.push_back( v );
        continue;
      }
      rec.parameter_value = v;
      if ( r == Result::Fail )
        rec.feedback = "With parameter " + po.parameter + " = " + std::to_string( v ) +
                       " the module does not satisfy the specification.\n\n" + rec.feedback;
      if ( !rec.detail.empty() )
        rec.detail = po.parameter + " = " + std::to_string( v ) + ": " + rec.detail;
      return r;
    }
    rec.stopped_at = Stage::None;
    return Result::Pass;
  };
  po.outcome = loop.run();
  if ( !po.outcome.iterations.empty() )
  {
    auto const& last = po.outcome.iterations.back();
    po.tested = last.values_passed;
    if ( last.parameter_value )
    {
      po.tested.push_back( *last.parameter_value );
      po.first_failing = last.parameter_value;
    }
  }
  return po;
}

Autoformalization Engine::autoformalize( std::string_view nl_text, backend::ReasoningLevel level,
                                         unsigned max_attempts )
{
  Autoformalization af;
  for ( unsigned k = 0; k < max_attempts; ++k )
  {
    auto const prompt = k == 0 ? backend::build_autoformalization_prompt( nl_text, 0 )
                               : backend::build_autoformalization_repair_prompt(
                                     nl_text, af.attempts.back().spec_text, af.attempts.back().diagnostic, k );
    AutoformalizationAttempt a;
    try
    {
      auto const r = backend_.complete( prompt, level );
      a.response = r.text;
      a.tokens = { r.reasoning_tokens, r.output_tokens };
    }
    catch ( backend::BackendError const& e )
    {
      a.diagnostic = std::string( "backend error: " ) + e.what();
      af.attempts.push_back( std::move( a ) );
      break;
    }
    a.spec_text = tlsf_block( a.response );
    try
    {
      problem_of( tlsf::parse_tlsf( tlsf::strip_metadata( a.spec_text ) ) );
      a.parsed = true;
    }
    catch ( tlsf::SyntaxError const& e )
    {
      a.diagnostic = e.what();
    }
    catch ( tlsf::InstantiationError const& e )
    {
      a.diagnostic = e.what();
    }
    catch ( std::exception const& e )
    {
      a.diagnostic = e.what();
    }
    auto const parsed = a.parsed;
    af.attempts.push_back( std::move( a ) );
    if ( parsed )
    {
      af.repaired_text = af.attempts.back().spec_text;
      break;
    }
  }
  if ( !af.attempts.empty() )
    af.first_text = af.attempts.front().spec_text;
  return af;
}

TargetVerdict Engine::verify_against( verilog::VerilogModule const& m, ltl::LtlProblem const& problem ) const
{
  TargetVerdict tv;
  Iteration rec;
  auto const r = ModuleCheck{ tools_, options_ }( m, problem, rec );
  tv.verdicts = rec.verdicts;
  tv.detail = rec.detail;
  switch ( r )
  {
  case Result::Pass:
    tv.kind = TargetVerdict::Kind::Pass;
    break;
  case Result::Fail:
    tv.kind = TargetVerdict::Kind::Fail;
    if ( tv.detail.empty() )
      tv.detail = "counterexample found";
    break;
  case Result::Inconclusive:
  case Result::Error:
    tv.kind = TargetVerdict::Kind::Error;
    break;
  }
  return tv;
}

NaturalOutcome Engine::run_natural( std::string_view nl_text, std::string_view ground_truth_spec,
                                    backend::ReasoningLevel level, Route route, unsigned cex_budget,
                                    InstanceHints const& hints )
{
  NaturalOutcome no;
  no.route = route;

  ltl::LtlProblem truth;
  try
  {
    truth = problem_of( tlsf::parse_tlsf( tlsf::strip_metadata( ground_truth_spec ) ) );
  }
  catch ( std::exception const& e )
  {
    no.synthesis.error_stage = Stage::Parse;
    no.synthesis.detail = std::string( "ground truth: " ) + e.what();
    no.against_ground_truth.detail = no.synthesis.detail;
    no.against_autoformalized.detail = "not attempted";
    return no;
  }

  no.autoformalization = autoformalize( nl_text, level );
  std::optional<ltl::LtlProblem> formalized;
  if ( no.autoformalization.repaired_text )
  {
    formalized = problem_of( tlsf::parse_tlsf( tlsf::strip_metadata( *no.autoformalization.repaired_text ) ) );
    no.equivalence = tools_.equivalence_check( truth.phi, formalized->phi );
  }

  auto const first_spec = strip_or_keep( no.autoformalization.first_text );
  ModuleCheck const check{ tools_, options_ };
  Loop loop{ *this, level, cex_budget, hints, {}, {}, {} };
  if ( route == Route::ViaAutoformalization )
  {
    if ( first_spec.find_first_not_of( " \t\r\n" ) == std::string::npos )
    {
      no.synthesis.error_stage = Stage::Parse;
      no.synthesis.detail = "autoformalization produced no text";
      no.against_ground_truth.detail = "no module";
      no.against_autoformalized.detail = "no module";
      return no;
    }
    loop.first = [&]( unsigned attempt ) { return backend::build_synthesis_prompt( first_spec, attempt ); };
    loop.repair = [&]( verilog::VerilogModule const& m, std::string const& feedback, unsigned attempt ) {
      return backend::build_repair_prompt( first_spec, m, feedback, attempt );
    };
  }
  else
  {
    loop.first = [&]( unsigned attempt ) { return backend::build_directnl_prompt( nl_text, attempt ); };
    loop.repair = [&]( verilog::VerilogModule const& m, std::string const& feedback, unsigned attempt ) {
      return backend::build_repair_prompt( nl_text, m, feedback, attempt, backend::RepairBase::DirectNL );
    };
  }
  // The ground truth stays held out: repair feedback comes from the
  // autoformalized target only.
  if ( formalized )
    loop.evaluate = [&]( verilog::VerilogModule const& m, Iteration& rec ) { return check( m, *formalized, rec ); };
  else
    loop.evaluate = [&]( verilog::VerilogModule const&, Iteration& rec ) {
      rec.detail = "no parseable autoformalized specification to verify against";
      return Result::Inconclusive;
    };
  no.synthesis = loop.run();

  if ( no.synthesis.final_module )
  {
    no.against_ground_truth = verify_against( *no.synthesis.final_module, truth );
    if ( formalized )
      no.against_autoformalized = verify_against( *no.synthesis.final_module, *formalized );
    else
      no.against_autoformalized.detail = "autoformalized specification did not parse";
  }
  else
  {
    no.against_ground_truth.detail = "no module";
    no.against_autoformalized.detail = formalized ? "no module" : "autoformalized specification did not parse";
  }
  return no;
}

} // namespace natsyn::engine
