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
#include <natsyn/toolchain.hpp>

#include <catch2/catch_amalgamated.hpp>
#include <fixtures.hpp>

#include <csignal>
#include <cstdlib>

using namespace natsyn;
using namespace natsyn::toolchain;
using natsyn::testing::fixture_path;
using natsyn::testing::read_fixture;

namespace
{

ToolLimits seconds( double s ) { return ToolLimits{ std::chrono::duration<double>( s ) }; }

struct ScratchDir
{
  std::filesystem::path path;
  ScratchDir()
  {
    std::string pattern = ( std::filesystem::temp_directory_path() / "natsyn-test-XXXXXX" ).string();
    REQUIRE( ::mkdtemp( pattern.data() ) != nullptr );
    path = pattern;
  }
  ~ScratchDir()
  {
    std::error_code ec;
    std::filesystem::remove_all( path, ec );
  }
};

ToolchainConfig fake_tools( std::filesystem::path const& work_root )
{
  ToolchainConfig config;
  config.configured.yosys = fixture_path( "tools/fake-yosys" );
  config.configured.aigtosmv = fixture_path( "tools/fake-aigtosmv" );
  config.configured.nuxmv = fixture_path( "tools/fake-nuxmv" );
  config.configured.ltlfilt = std::filesystem::path( "/nonexistent/ltlfilt" );
  config.work_root = work_root;
  config.checker = CheckerChoice::External;
  return config;
}

void fake_checker_output( std::string const& fixture )
{
  ::setenv( "NATSYN_FAKE_NUXMV_OUT", fixture_path( "nuxmv/" + fixture ).c_str(), 1 );
}

verilog::VerilogModule module_from( std::string const& source )
{
  return verilog::parse_module( source );
}

} // namespace

TEST_CASE( "subprocess basics", "[process]" )
{
  auto const echo = run_process( { "sh", "-c", "echo out; echo err >&2; exit 3" }, "", seconds( 10 ) );
  CHECK( echo.out == "out\n" );
  CHECK( echo.err == "err\n" );
  CHECK( echo.exit_status == 3 );
  CHECK( !echo.timed_out );
  CHECK( echo.tool == "sh" );

  std::string big( 1 << 20, 'x' );
  for ( std::size_t i = 0; i < big.size(); i += 97 )
    big[i] = '\n';
  auto const cat = run_process( { "cat" }, big, seconds( 10 ) );
  CHECK( cat.out == big );
  CHECK( cat.exit_status == 0 );

  ScratchDir dir;
  auto const pwd = run_process( { "sh", "-c", "pwd -P" }, "", seconds( 10 ), dir.path );
  CHECK( pwd.out == std::filesystem::canonical( dir.path ).string() + "\n" );

  CHECK_THROWS_AS( run_process( { "natsyn-no-such-tool" }, "", seconds( 1 ) ), ToolMissing );
  CHECK_THROWS_AS( run_process( { "/nonexistent/tool" }, "", seconds( 1 ) ), ToolMissing );
  CHECK_THROWS_AS( run_process( {}, "", seconds( 1 ) ), std::invalid_argument );
  try
  {
    run_process( { "natsyn-no-such-tool" }, "", seconds( 1 ) );
  }
  catch ( ToolMissing const& e )
  {
    CHECK( e.executable == "natsyn-no-such-tool" );
    CHECK( std::string( e.what() ).find( "natsyn-no-such-tool" ) != std::string::npos );
  }
}

TEST_CASE( "subprocess limits", "[process]" )
{
  SECTION( "wall clock" )
  {
    auto const start = std::chrono::steady_clock::now();
    auto const r = run_process( { "sleep", "20" }, "", seconds( 0.2 ) );
    auto const elapsed = std::chrono::duration<double>( std::chrono::steady_clock::now() - start ).count();
    CHECK( r.timed_out );
    CHECK( r.signal == SIGKILL );
    CHECK( elapsed < 1.2 );
  }
  SECTION( "descendants die with the group" )
  {
    auto const start = std::chrono::steady_clock::now();
    auto const r = run_process( { "sh", "-c", "sleep 20 & sleep 20; wait" }, "", seconds( 0.2 ) );
    auto const elapsed = std::chrono::duration<double>( std::chrono::steady_clock::now() - start ).count();
    CHECK( r.timed_out );
    CHECK( elapsed < 1.2 );
  }
  SECTION( "background child keeps output open" )
  {
    auto const start = std::chrono::steady_clock::now();
    auto const r = run_process( { "sh", "-c", "echo started; sleep 20 &" }, "", seconds( 0.3 ) );
    auto const elapsed = std::chrono::duration<double>( std::chrono::steady_clock::now() - start ).count();
    CHECK( r.out == "started\n" );
    CHECK( elapsed < 1.3 );
  }
  SECTION( "address space" )
  {
    ToolLimits limits = seconds( 10 );
    limits.memory_cap = std::uint64_t{ 512 } << 20;
    auto const r = run_process( { "sh", "-c", "ulimit -v" }, "", limits );
    CHECK( r.out == std::to_string( 512 * 1024 ) + "\n" );
  }
  CHECK_THROWS_AS( run_process( { "true" }, "", seconds( 0 ) ), std::invalid_argument );
}

TEST_CASE( "tool scripts", "[scripts]" )
{
  CHECK( yosys_script( "solution" ) == "hierarchy -check -top solution\n"
                                       "proc\n"
                                       "flatten\n"
                                       "opt\n"
                                       "memory; opt\n"
                                       "techmap; opt\n"
                                       "dffunmap\n"
                                       "abc -g AND\n"
                                       "delete -port solution/clk\n"
                                       "write_aiger -ascii -symbols circuit.aag\n" );
  auto const env = yosys_script( "environment" );
  CHECK( env.find( "hierarchy -check -top environment\n" ) == 0 );
  CHECK( env.find( "delete -port environment/clk\n" ) != std::string::npos );
  CHECK( yosys_script( "solution" ) == yosys_script( "solution" ) );

  CHECK( nuxmv_script() == "read_model\nflatten_hierarchy\nencode_variables\nbuild_boolean_model\n"
                           "check_ltlspec_ic3\nquit\n" );
  CHECK( nuxmv_script() == nuxmv_script() );
}

TEST_CASE( "model checker output parsing", "[smv]" )
{
  auto const pass = parse_nuxmv_output( read_fixture( "nuxmv/toggle_often_true.txt" ) );
  CHECK( pass.verdict == SmvOutput::Verdict::True );
  CHECK( !pass.counterexample );

  auto const garbage = parse_nuxmv_output( read_fixture( "nuxmv/garbage.txt" ) );
  CHECK( garbage.verdict == SmvOutput::Verdict::Unknown );

  std::vector<std::string> const out_only{ "out" };
  SECTION( "loop as listed" )
  {
    auto const fail = parse_nuxmv_output( read_fixture( "nuxmv/toggle_never_false.txt" ) );
    REQUIRE( fail.verdict == SmvOutput::Verdict::False );
    REQUIRE( fail.counterexample );
    CHECK( fail.counterexample->states.size() == 3 );
    CHECK( fail.counterexample->loop_start == 1 );
    CHECK( fail.counterexample->states[1].assignments.at( "l0" ) == "TRUE" );
    auto const lassos = counterexample_lassos( *fail.counterexample, out_only );
    REQUIRE( lassos.size() == 1 );
    CHECK( lassos[0] == ltl::LassoTrace{ out_only, { { false } }, { { true }, { false } } } );
  }
  SECTION( "trailing repeat of the loop start" )
  {
    auto const fail = parse_nuxmv_output( read_fixture( "nuxmv/toggle_never_false_repeat.txt" ) );
    REQUIRE( fail.counterexample );
    CHECK( fail.counterexample->loop_start == 0 );
    auto const lassos = counterexample_lassos( *fail.counterexample, out_only );
    REQUIRE( lassos.size() == 2 );
    CHECK( lassos[0] == ltl::LassoTrace{ out_only, {}, { { false }, { true } } } );
    CHECK( lassos[1].loop.size() == 3 );
  }
  SECTION( "sparse listing with input blocks" )
  {
    auto const fail = parse_nuxmv_output( read_fixture( "nuxmv/sparse_inputs.txt" ) );
    REQUIRE( fail.counterexample );
    REQUIRE( fail.counterexample->states.size() == 4 );
    CHECK( fail.counterexample->loop_start == 2 );
    CHECK( fail.counterexample->states[1].assignments.at( "finished_0" ) == "TRUE" );
    std::vector<std::string> const atoms{ "finished_0", "finished_1", "allFinished" };
    auto const lassos = counterexample_lassos( *fail.counterexample, atoms );
    REQUIRE( lassos.size() == 2 );
    ltl::LassoTrace const expected{ atoms,
                                    { { false, false, false }, { true, false, false } },
                                    { { false, false, false }, { false, false, false } } };
    CHECK( lassos[1] == expected );
    CHECK( lassos[0].loop.size() == 1 );
    CHECK_THROWS_AS( counterexample_lassos( *fail.counterexample, { "missing" } ), std::invalid_argument );
  }
  SECTION( "no loop marker" )
  {
    SmvCounterexample cex;
    cex.states.resize( 1 );
    CHECK_THROWS_AS( counterexample_lassos( cex, {} ), std::invalid_argument );
  }
}

TEST_CASE( "translation cache", "[cache]" )
{
  // Reference values from an independent FNV-1a-64 implementation.
  CHECK( TranslationCache::key( "solution", "module solution(input clk);\nendmodule\n" ) == "1ad3c7a060cb539c" );
  CHECK( TranslationCache::key( "", "" ) == "af63bd4c8601b7df" );

  ScratchDir dir;
  TranslationCache cache( dir.path / "cache" );
  auto const m = module_from( "module solution(input clk, output out);\nendmodule\n" );
  CHECK( !cache.lookup( m ) );
  auto const toggle = verilog::parse_aiger( read_fixture( "aiger/toggle.aag" ) );
  cache.store( m, toggle );
  auto const hit = cache.lookup( m );
  REQUIRE( hit );
  CHECK( verilog::render_aiger( *hit ) == verilog::render_aiger( toggle ) );
  auto other = m;
  other.source += "// changed\n";
  CHECK( !cache.lookup( other ) );
}

TEST_CASE( "tool discovery", "[discovery]" )
{
  auto const fake = fixture_path( "tools/fake-yosys" );
  CHECK( find_tool( fake, { "natsyn-no-such-tool" } ) == fake );
  CHECK( find_tool( std::filesystem::path( "/nonexistent/yosys" ), { "natsyn-no-such-tool" } ) == std::nullopt );
  CHECK( find_tool( std::nullopt, { "natsyn-no-such-tool", "sh" } ).has_value() );
}

TEST_CASE( "translation through the synthesis tool", "[toolchain]" )
{
  ScratchDir dir;
  Toolchain tc( fake_tools( dir.path ) );
  REQUIRE( tc.can_translate() );
  ::setenv( "NATSYN_FAKE_AAG", fixture_path( "aiger/detector_n2.aag" ).c_str(), 1 );

  auto const good = module_from( "module solution(input clk, input [1:0] finished, output allFinished);\nendmodule\n" );
  std::vector<ToolReport> reports;
  auto const c = tc.translate_to_aiger( good, seconds( 10 ), &reports );
  CHECK( c.inputs.size() == 2 );
  CHECK( c.input_names[0] == "finished_0" );
  REQUIRE( reports.size() == 1 );
  CHECK( reports[0].exit_status == 0 );
  CHECK( std::filesystem::is_empty( dir.path ) );

  auto const broken =
      module_from( "module solution(input clk, output o);\n  syntax_error here\nendmodule\n" );
  try
  {
    tc.translate_to_aiger( broken, seconds( 10 ) );
    FAIL( "expected ToolFailed" );
  }
  catch ( ToolFailed const& e )
  {
    CHECK( e.report.err.find( "syntax error" ) != std::string::npos );
    CHECK( std::string( e.what() ).find( "syntax error" ) != std::string::npos );
  }
  CHECK_THROWS_AS( tc.translate_to_aiger( module_from( "module solution(input clk);\n hang_forever\nendmodule\n" ),
                                          seconds( 0.3 ) ),
                   ToolTimeout );

  auto config = fake_tools( dir.path );
  config.configured.yosys = std::filesystem::path( "/nonexistent/yosys" );
  Toolchain without( config );
  if ( !without.can_translate() )
  {
    try
    {
      without.translate_to_aiger( good );
      FAIL( "expected ToolMissing" );
    }
    catch ( ToolMissing const& e )
    {
      CHECK( e.executable == "yosys" );
    }
  }

  config.translation_cache = dir.path / "cache";
  Toolchain cached( config );
  TranslationCache( dir.path / "cache" ).store( good, verilog::parse_aiger( read_fixture( "aiger/detector_n2.aag" ) ) );
  CHECK( cached.translate_to_aiger( good ).latches.size() == 2 );

  config.keep_artifacts = true;
  config.configured.yosys = fixture_path( "tools/fake-yosys" );
  Toolchain keeping( config );
  ::setenv( "NATSYN_FAKE_AAG", fixture_path( "aiger/toggle.aag" ).c_str(), 1 );
  auto const fresh = module_from( "module solution(input clk, output out);\nendmodule\n" );
  keeping.translate_to_aiger( fresh );
  CHECK( TranslationCache( dir.path / "cache" ).lookup( fresh ).has_value() );
  bool kept = false;
  for ( auto const& entry : std::filesystem::directory_iterator( dir.path ) )
    kept = kept || entry.path().filename().string().rfind( "natsyn-yosys-", 0 ) == 0;
  CHECK( kept );
}

TEST_CASE( "model checking through the external tools", "[toolchain]" )
{
  ScratchDir dir;
  Toolchain tc( fake_tools( dir.path ) );
  REQUIRE( tc.can_check() );
  auto const toggle = verilog::parse_aiger( read_fixture( "aiger/toggle.aag" ) );
  auto const often = tlsf::parse_ltl( "G F out" );
  auto const never = tlsf::parse_ltl( "G !out" );

  fake_checker_output( "toggle_often_true.txt" );
  auto v = tc.check_properties( toggle, { often } );
  REQUIRE( v.size() == 1 );
  CHECK( v[0].kind == CheckVerdict::Kind::Pass );
  CHECK( v[0].checker == "nuxmv" );
  CHECK( v[0].reports.size() == 2 );

  for ( auto const* fixture : { "toggle_never_false.txt", "toggle_never_false_repeat.txt" } )
  {
    INFO( fixture );
    fake_checker_output( fixture );
    v = tc.check_properties( toggle, { never } );
    REQUIRE( v[0].kind == CheckVerdict::Kind::Fail );
    CHECK( verilog::replays( toggle, *v[0].trace ) );
    CHECK( !ltl::eval_lasso( never, *v[0].trace ) );
    CHECK( ltl::same_word( *v[0].trace, ltl::LassoTrace{ { "out" }, { { false } }, { { true }, { false } } } ) );
  }

  fake_checker_output( "toggle_bogus_trace.txt" );
  v = tc.check_properties( toggle, { never } );
  CHECK( v[0].kind == CheckVerdict::Kind::ToolError );
  CHECK( !v[0].trace );

  fake_checker_output( "garbage.txt" );
  CHECK( tc.check_properties( toggle, { never } )[0].kind == CheckVerdict::Kind::ToolError );

  v = tc.check_properties( toggle, { tlsf::parse_ltl( "G absent" ), often } );
  REQUIRE( v.size() == 2 );
  CHECK( v[0].kind == CheckVerdict::Kind::ToolError );
  CHECK( v[0].detail.find( "absent" ) != std::string::npos );

  fake_checker_output( "toggle_often_true.txt" );
  ::setenv( "NATSYN_FAKE_NUXMV_SLEEP", "20", 1 );
  CheckOptions tight;
  tight.limits = seconds( 0.3 );
  CHECK( tc.check_properties( toggle, { often }, tight )[0].kind == CheckVerdict::Kind::Timeout );
  ::unsetenv( "NATSYN_FAKE_NUXMV_SLEEP" );
}

TEST_CASE( "checker selection", "[toolchain]" )
{
  ScratchDir dir;
  auto const toggle = verilog::parse_aiger( read_fixture( "aiger/toggle.aag" ) );
  auto const never = tlsf::parse_ltl( "G !out" );
  auto const often = tlsf::parse_ltl( "G F out" );

  auto config = fake_tools( dir.path );
  config.checker = CheckerChoice::Builtin;
  auto v = Toolchain( config ).verify( toggle, { often, never } );
  REQUIRE( v.size() == 2 );
  CHECK( v[0].kind == CheckVerdict::Kind::Pass );
  CHECK( v[0].checker == "builtin" );
  CHECK( v[1].kind == CheckVerdict::Kind::Fail );

  config.checker = CheckerChoice::Both;
  fake_checker_output( "toggle_often_true.txt" ); // wrong for G !out
  v = Toolchain( config ).verify( toggle, { often, never } );
  CHECK( v[0].kind == CheckVerdict::Kind::Pass );
  CHECK( v[1].kind == CheckVerdict::Kind::ToolError );
  CHECK( v[1].detail.find( "disagreement" ) != std::string::npos );

  fake_checker_output( "toggle_never_false.txt" );
  v = Toolchain( config ).verify( toggle, { never } );
  CHECK( v[0].kind == CheckVerdict::Kind::Fail );
  CHECK( v[0].checker == "nuxmv" );

  config.checker = CheckerChoice::Auto;
  config.configured.nuxmv = std::filesystem::path( "/nonexistent/nuXmv" );
  Toolchain fallback( config );
  if ( !fallback.can_check() )
    CHECK( fallback.verify( toggle, { never } )[0].checker == "builtin" );

  CheckOptions small;
  small.builtin.state_input_budget = 1;
  CHECK( Toolchain( config ).check_builtin( toggle, { never }, small )[0].kind == CheckVerdict::Kind::ToolError );
}

TEST_CASE( "formula equivalence", "[equivalence]" )
{
  ScratchDir dir;
  Toolchain tc( fake_tools( dir.path ) );
  REQUIRE( !tc.can_filter() );
  auto const a = tlsf::parse_ltl( "a" );
  auto const ga = tlsf::parse_ltl( "G a" );

  CHECK( tc.equivalence_check( ga, tlsf::parse_ltl( "G a" ) ).kind == Equivalence::Kind::Equivalent );

  auto const r = tc.equivalence_check( ga, a );
  REQUIRE( r.kind == Equivalence::Kind::Inequivalent );
  CHECK( *r.witness == ltl::LassoTrace{ { "a" }, { { true } }, { { false } } } );

  auto const same = tc.equivalence_check( tlsf::parse_ltl( "F a" ), tlsf::parse_ltl( "true U a" ) );
  CHECK( same.kind == Equivalence::Kind::Unknown );

  ltl::InequivOptions wide;
  wide.max_len = 6;
  auto const slow = tc.equivalence_check( tlsf::parse_ltl( "G F (a && b) && G F (c || d)" ),
                                          tlsf::parse_ltl( "G F (b && a) && G F (d || c)" ), seconds( 0.001 ), wide );
  CHECK( slow.kind == Equivalence::Kind::Timeout );

  ltl::InequivOptions off;
  off.max_len = 0;
  CHECK( tc.equivalence_check( ga, a, seconds( 1 ), off ).kind == Equivalence::Kind::ToolMissing );
  CHECK( kind_name( Equivalence::Kind::Inequivalent ) == "inequivalent" );
}
