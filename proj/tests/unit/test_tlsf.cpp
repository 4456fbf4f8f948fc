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

#include <catch2/catch_amalgamated.hpp>

#include <natsyn/tlsf.hpp>

#include "fixtures.hpp"

#include <filesystem>
#include <set>
#include <sstream>

using namespace natsyn;
using namespace natsyn::tlsf;
using natsyn::testing::read_fixture;

namespace
{

void collect( ltl::Formula const& f, ltl::Op op, std::vector<ltl::Formula>& out )
{
  if ( f.op() == op )
  {
    collect( f.lhs(), op, out );
    collect( f.rhs(), op, out );
  }
  else
  {
    out.push_back( f );
  }
}

std::vector<ltl::Formula> flatten( ltl::Formula const& f, ltl::Op op )
{
  std::vector<ltl::Formula> out;
  collect( f, op, out );
  return out;
}

void scan_atoms( ltl::Formula const& f, std::set<std::string>& out )
{
  if ( f.op() == ltl::Op::Atom )
  {
    out.insert( f.name() );
  }
  else if ( ltl::is_unary( f.op() ) )
  {
    scan_atoms( f.child(), out );
  }
  else if ( ltl::is_binary( f.op() ) )
  {
    scan_atoms( f.lhs(), out );
    scan_atoms( f.rhs(), out );
  }
}

std::vector<std::string> tlsf_fixtures()
{
  std::vector<std::string> names;
  for ( auto const& entry : std::filesystem::directory_iterator( natsyn::testing::fixture_path( "tlsf" ) ) )
  {
    if ( entry.path().extension() == ".tlsf" )
    {
      names.push_back( "tlsf/" + entry.path().filename().string() );
    }
  }
  std::sort( names.begin(), names.end() );
  return names;
}

std::string with_width_param( std::int64_t k )
{
  std::ostringstream s;
  s << "GLOBAL { PARAMETERS { k = " << k << "; w = " << std::max<std::int64_t>( k, 1 )
    << "; } }\nMAIN { INPUTS { p[w]; } OUTPUTS { o; } GUARANTEE { &&[0<=i<k] p[i]; } }";
  return s.str();
}

} // namespace

TEST_CASE( "detector parses into the expected structure", "[tlsf][parse]" )
{
  auto const spec = parse_tlsf( read_fixture( "tlsf/detector.tlsf" ) );
  REQUIRE( spec.parameters.size() == 1 );
  CHECK( spec.parameters[0].name == "n" );
  CHECK( spec.parameters[0].value == 27 );
  REQUIRE( spec.inputs.size() == 1 );
  CHECK( spec.inputs[0].name == "finished" );
  CHECK( spec.inputs[0].width );
  REQUIRE( spec.outputs.size() == 1 );
  CHECK_FALSE( spec.outputs[0].width );
  CHECK( spec.section( SectionKind::Initially ).size() == 1 );
  CHECK( spec.section( SectionKind::Assert ).size() == 2 );
  CHECK( spec.sections.size() == 2 );
  CHECK( spec.semantics == Semantics::Mealy );
  CHECK_FALSE( spec.semantics_declared );
}

TEST_CASE( "detector instantiation at n = 27", "[tlsf][instantiate]" )
{
  auto const ground = instantiate( parse_tlsf( read_fixture( "tlsf/detector.tlsf" ) ) );
  REQUIRE( ground.inputs.size() == 1 );
  auto const atoms = ground.inputs[0].bit_atoms();
  REQUIRE( atoms.size() == 27 );
  CHECK( atoms.front() == "finished_0" );
  CHECK( atoms.back() == "finished_26" );

  auto const& first = ground.section( SectionKind::Assert ).at( 0 );
  REQUIRE( first.op() == ltl::Op::Implies );
  auto const disjuncts = flatten( first.rhs(), ltl::Op::Or );
  REQUIRE( disjuncts.size() == 27 );
  for ( std::size_t i = 0; i < disjuncts.size(); ++i )
  {
    CHECK( disjuncts[i] == ltl::globally( ltl::negate( ltl::atom( "finished_" + std::to_string( i ) ) ) ) );
  }
  CHECK( flatten( ground.section( SectionKind::Initially ).at( 0 ), ltl::Op::And ).size() == 27 );
}

TEST_CASE( "detector expansion at n = 2 is byte-stable", "[tlsf][semantics]" )
{
  auto const problem =
      expand_semantics( instantiate( parse_tlsf( read_fixture( "tlsf/detector.tlsf" ) ), { { "n", 2 } } ) );
  std::string const init = "((!allFinished W finished_0) && (!allFinished W finished_1))";
  std::string const first = "(G !allFinished -> (G !finished_0 || G !finished_1))";
  std::string const second =
      "((allFinished -> X (!allFinished W finished_0)) && (allFinished -> X (!allFinished W finished_1)))";
  std::string const expected =
      init + " -> (true && ((G true && true) -> (G (" + first + " && " + second + ") && true)))";
  CHECK( ltl::render( problem.phi, ltl::Dialect::TlsfExpr ) == expected );
  CHECK( problem.inputs == std::vector<std::string>{ "finished_0", "finished_1" } );
  CHECK( problem.outputs == std::vector<std::string>{ "allFinished" } );
  CHECK( problem.assumptions.empty() );
  REQUIRE( problem.guarantees.size() == 2 );
  CHECK( ltl::render( problem.guarantees[0], ltl::Dialect::TlsfExpr ) == "G " + first );
  REQUIRE( problem.prefix.initially );
  CHECK_FALSE( problem.prefix.preset );
  CHECK_FALSE( problem.prefix.strict_safety );
}

TEST_CASE( "expansion matches the section templates for every combination", "[tlsf][semantics][golden]" )
{
  static std::pair<SectionKind, char> const sections[] = {
      { SectionKind::Initially, 'i' }, { SectionKind::Preset, 'p' }, { SectionKind::Require, 'r' },
      { SectionKind::Assert, 's' },    { SectionKind::Assume, 'm' },  { SectionKind::Guarantee, 'g' },
  };
  std::istringstream golden( read_fixture( "golden/semantics.golden" ) );
  std::string line;
  int rows = 0;
  while ( std::getline( golden, line ) )
  {
    auto const t1 = line.find( '\t' );
    auto const t2 = line.find( '\t', t1 + 1 );
    std::string const semantics = line.substr( 0, t1 );
    int const mask = std::stoi( line.substr( t1 + 1, t2 - t1 - 1 ) );
    std::string const formula = line.substr( t2 + 1 );

    std::string text = "INFO { SEMANTICS: " + semantics + " }\nMAIN {\n"
                       "  INPUTS { i0; i1; r0; r1; m0; m1; }\n  OUTPUTS { p0; p1; s0; s1; g0; g1; }\n";
    for ( int bit = 0; bit < 6; ++bit )
    {
      if ( mask >> bit & 1 )
      {
        std::string const a( 1, sections[bit].second );
        text += "  " + std::string( section_keyword( sections[bit].first ) ) + " { " + a + "0; " + a + "1; }\n";
      }
    }
    text += "}\n";

    INFO( semantics << " " << mask );
    auto const problem = expand_semantics( instantiate( parse_tlsf( text ) ) );
    REQUIRE( problem.phi == parse_ltl( formula ) );
    REQUIRE( ltl::render( problem.phi, ltl::Dialect::TlsfExpr ) == formula );

    bool const strict = semantics.find( "Strict" ) != std::string::npos;
    bool const safety_sections = ( mask & 0b1100 ) != 0;
    REQUIRE( problem.prefix.strict_safety.has_value() == ( strict && safety_sections ) );
    ++rows;
  }
  CHECK( rows == 256 );
}

TEST_CASE( "strict expansion carries the safety conjunct", "[tlsf][semantics]" )
{
  auto const problem = expand_semantics( instantiate(
      parse_tlsf( "INFO { SEMANTICS: Mealy,Strict }\n"
                  "MAIN { INPUTS { r; } OUTPUTS { s; } REQUIRE { r; } ASSERT { s; } }" ) ) );
  auto const w = ltl::weak_until( ltl::atom( "s" ), ltl::negate( ltl::atom( "r" ) ) );
  REQUIRE( problem.prefix.strict_safety );
  CHECK( *problem.prefix.strict_safety == w );
  // phi = true -> ((true && (s W !r)) && ((G r && true) -> true))
  CHECK( problem.phi.rhs().lhs().rhs() == w );
  CHECK( problem.assumptions == std::vector<ltl::Formula>{ ltl::globally( ltl::atom( "r" ) ) } );
  CHECK( problem.guarantees.empty() );
}

TEST_CASE( "minimal specification and neutral folding", "[tlsf][semantics]" )
{
  auto const spec = parse_tlsf( "MAIN { INPUTS { a; } OUTPUTS { b; } GUARANTEE { G (a -> X b); } }" );
  CHECK( spec.parameters.empty() );
  auto const problem = expand_semantics( instantiate( spec ) );
  CHECK( ltl::render( problem.phi, ltl::Dialect::TlsfExpr ) ==
         "true -> (true && ((G true && true) -> (G true && G (a -> X b))))" );
  CHECK( problem.guarantees == std::vector<ltl::Formula>{ parse_ltl( "G (a -> X b)" ) } );
}

TEST_CASE( "ranges expand to their neutral elements", "[tlsf][instantiate]" )
{
  auto const ground = instantiate( parse_tlsf(
      "GLOBAL { PARAMETERS { n = 5; } }\n"
      "MAIN { INPUTS { p[n]; } OUTPUTS { o; } GUARANTEE { &&[0<=i<2] p[i]; ||[0<=i<0] p[i]; &&[3<=i<3] p[i]; } }" ) );
  auto const& g = ground.section( SectionKind::Guarantee );
  REQUIRE( g.size() == 3 );
  CHECK( g[0] == ltl::conj( ltl::atom( "p_0" ), ltl::atom( "p_1" ) ) );
  CHECK( g[1] == ltl::constant( false ) );
  CHECK( g[2] == ltl::constant( true ) );
}

TEST_CASE( "range expansion produces k atoms", "[tlsf][instantiate][property]" )
{
  for ( std::int64_t k = 0; k <= 40; ++k )
  {
    auto const ground = instantiate( parse_tlsf( with_width_param( k ) ) );
    std::set<std::string> atoms;
    scan_atoms( ground.section( SectionKind::Guarantee ).at( 0 ), atoms );
    REQUIRE( atoms.size() == static_cast<std::size_t>( k ) );
  }
}

TEST_CASE( "definitions expand with their arguments", "[tlsf][instantiate]" )
{
  auto const ground = instantiate( parse_tlsf( read_fixture( "tlsf/arbiter.tlsf" ) ), { { "n", 3 } } );
  auto const& assert_ = ground.section( SectionKind::Assert ).at( 0 );
  auto const pairs = flatten( assert_, ltl::Op::And );
  // 9 (i, j) combinations; the 3 with i < j keep a mutual exclusion constraint.
  CHECK( pairs.size() == 9 );
  auto const guarantee = ground.section( SectionKind::Guarantee ).at( 0 );
  CHECK( flatten( guarantee, ltl::Op::And ).back() == parse_ltl( "G (r_2 -> F g_2)" ) );

  auto const ranges = instantiate( parse_tlsf( read_fixture( "tlsf/ranges.tlsf" ) ) );
  CHECK( ranges.outputs[0].width == 5 );
  auto const& gs = ranges.section( SectionKind::Guarantee );
  CHECK( gs[0] == parse_ltl( "G (z <-> y_4)" ) );
  CHECK( gs[1] == parse_ltl( "G (x_1 -> X y_2) && G (x_2 -> X y_4)" ) );
  CHECK( gs[2] == ltl::constant( false ) );
  CHECK( ranges.section( SectionKind::Assume ).at( 0 ) == parse_ltl( "G F (x_0 || x_1 || x_2)" ) );
}

TEST_CASE( "instantiation errors", "[tlsf][instantiate]" )
{
  auto const base = std::string( "GLOBAL { PARAMETERS { n = 2; } }\nMAIN { INPUTS { p[n]; } OUTPUTS { o; }\n" );
  CHECK_THROWS_AS( instantiate( parse_tlsf( base + "GUARANTEE { p[2]; } }" ) ), IndexOutOfRange );
  CHECK_THROWS_AS( instantiate( parse_tlsf( base + "GUARANTEE { &&[0<=i<=n] p[i]; } }" ) ), IndexOutOfRange );
  CHECK_THROWS_AS( instantiate( parse_tlsf( base + "GUARANTEE { p[0]; } }" ), { { "n", -1 } } ), EvaluationError );
  CHECK_THROWS_AS( instantiate( parse_tlsf( base + "GUARANTEE { p[0]; } }" ), { { "m", 1 } } ), EvaluationError );
  CHECK_THROWS_AS( instantiate( parse_tlsf( base + "GUARANTEE { p[0]; } }" ), { { "n", 0 } } ), EvaluationError );
  CHECK_THROWS_AS( instantiate( parse_tlsf( base + "GUARANTEE { p[n / (n - 2)]; } }" ) ), EvaluationError );
  CHECK_THROWS_AS(
      instantiate( parse_tlsf( base + "GUARANTEE { p[9223372036854775807 + n]; } }" ) ), EvaluationError );
  CHECK_THROWS_AS( instantiate( parse_tlsf( base + "GUARANTEE { n + 1; } }" ) ), EvaluationError );

  std::string chain = "GLOBAL { DEFINITIONS {\n";
  for ( int i = 0; i < 70; ++i )
  {
    chain += "  d" + std::to_string( i ) + " = d" + std::to_string( i + 1 ) + ";\n";
  }
  chain += "  d70 = a;\n} }\nMAIN { INPUTS { a; } OUTPUTS { b; } GUARANTEE { d0; } }";
  CHECK_THROWS_AS( instantiate( parse_tlsf( chain ) ), NonTerminatingDefinition );
}

TEST_CASE( "ground specifications contain only declared atoms", "[tlsf][instantiate][property]" )
{
  for ( auto const& name : tlsf_fixtures() )
  {
    INFO( name );
    auto const ground = instantiate( parse_tlsf( read_fixture( name ) ) );
    auto const problem = expand_semantics( ground );
    std::set<std::string> declared;
    for ( auto const& a : problem.atoms() )
      declared.insert( a );
    std::set<std::string> used;
    scan_atoms( problem.phi, used );
    for ( auto const& a : used )
    {
      CHECK( declared.count( a ) == 1 );
    }
  }
}

TEST_CASE( "syntax errors carry position and expected set", "[tlsf][parse]" )
{
  try
  {
    parse_tlsf( "MAIN { INPUTS { a } }" );
    FAIL( "expected a syntax error" );
  }
  catch ( SyntaxError const& e )
  {
    CHECK( std::string( e.what() ) == "1:19: expected {'[', ';'}, found '}'" );
  }

  try
  {
    parse_tlsf( "MAIN {\n  INPUTS { a; }\n  OUTPUTS { b; }\n  GUARANTEE { G (a -> X b);\n}\n" );
    FAIL( "expected a syntax error" );
  }
  catch ( SyntaxError const& e )
  {
    CHECK( e.at.line == 6 );
    CHECK( e.found == "end of input" );
    CHECK( std::find( e.expected.begin(), e.expected.end(), "'}'" ) != e.expected.end() );
  }

  CHECK_THROWS_AS( parse_tlsf( "MAIN { INPUTS { a; } OUTPUTS { b; } GUARANTEE { G c; } }" ), SyntaxError );
  CHECK_THROWS_AS( parse_tlsf( "MAIN { INPUTS { a; } OUTPUTS { b; } GUARANTEE { a; } } trailing" ), SyntaxError );
  CHECK_THROWS_AS( parse_tlsf( "MAIN { INPUTS { a; } OUTPUTS { a; } }" ), SyntaxError );
  CHECK_THROWS_AS( parse_tlsf( "MAIN { GUARANTEE { a; } GUARANTEE { a; } }" ), SyntaxError );
  CHECK_THROWS_AS( parse_tlsf( "MAIN { INPUTS { a; } OUTPUTS { b; } GUARANTEE { a[0]; } }" ), SyntaxError );
  CHECK_THROWS_AS( parse_tlsf( "GLOBAL { PARAMETERS { n = 0 - 1; } } MAIN { }" ), SyntaxError );
  CHECK_THROWS_AS( parse_tlsf( "GLOBAL { DEFINITIONS { f = g; g = f; } } MAIN { GUARANTEE { f; } }" ), SyntaxError );
  CHECK_THROWS_AS( instantiate( parse_tlsf( "MAIN { GUARANTEE { &&[0<=i<2] i; } }" ) ), EvaluationError );
}

TEST_CASE( "render is a fixpoint after one pass", "[tlsf][render]" )
{
  for ( auto const& name : tlsf_fixtures() )
  {
    INFO( name );
    auto const parsed = parse_tlsf( read_fixture( name ) );
    auto const once = render_tlsf( parsed );
    auto const reparsed = parse_tlsf( once );
    CHECK( reparsed == parsed );
    CHECK( render_tlsf( reparsed ) == once );
  }
  auto const ranged = render_tlsf( parse_tlsf( read_fixture( "tlsf/detector.tlsf" ) ) );
  CHECK( ranged.find( "&&[0 <= i < n] (!allFinished W finished[i]);" ) != std::string::npos );
  CHECK( ranged.find( "||[0 <= i < n] G !finished[i]" ) != std::string::npos );
}

TEST_CASE( "rendering keeps precedence unambiguous", "[tlsf][render]" )
{
  auto const spec = parse_tlsf( "MAIN { INPUTS { a; b; c; } OUTPUTS { o; } GUARANTEE {\n"
                                "  (a -> b) -> c;\n  a -> b -> c;\n  (a U b) U c;\n  !(a && b);\n"
                                "  X (a || b) && c;\n  (a <-> b) <-> c;\n  a <-> (b <-> c);\n  G (a W (b R c));\n"
                                "} }" );
  std::vector<std::string> rendered;
  for ( auto const& e : spec.section( SectionKind::Guarantee ) )
  {
    rendered.push_back( render_expr( *e ) );
  }
  CHECK( rendered == std::vector<std::string>{ "(a -> b) -> c", "a -> b -> c", "(a U b) U c", "!(a && b)",
                                               "X (a || b) && c", "a <-> b <-> c", "a <-> (b <-> c)",
                                               "G (a W b R c)" } );
  CHECK( parse_tlsf( render_tlsf( spec ) ) == spec );
}

TEST_CASE( "strip_metadata", "[tlsf][strip]" )
{
  auto const plain = read_fixture( "tlsf/detector.tlsf" );
  CHECK( strip_metadata( plain ) == plain );
  CHECK( strip_metadata( "// only\n/* comments\n here */\n" ).empty() );

  std::string commented;
  std::istringstream lines( plain );
  std::string line;
  int k = 0;
  while ( std::getline( lines, line ) )
  {
    commented += line + ( k % 2 ? " // note " + std::to_string( k ) : "" ) + "\n";
    if ( k % 3 == 0 )
      commented += "// between lines\n";
    ++k;
  }
  auto const stripped = strip_metadata( commented );
  CHECK( stripped.find( "//" ) == std::string::npos );
  CHECK( parse_tlsf( stripped ) == parse_tlsf( plain ) );
  CHECK( parse_tlsf( commented ) == parse_tlsf( plain ) );

  auto const annotated = read_fixture( "tlsf/detector_annotated.tlsf" );
  auto const clean = strip_metadata( annotated );
  CHECK( clean.find( "TITLE" ) == std::string::npos );
  CHECK( clean.find( "DESCRIPTION" ) == std::string::npos );
  CHECK( clean.find( "TAGS" ) == std::string::npos );
  CHECK( clean.find( "request" ) == std::string::npos );
  CHECK( clean.find( "SEMANTICS:   Mealy" ) != std::string::npos );
  CHECK( parse_tlsf( clean ) == parse_tlsf( annotated ) );
  CHECK( strip_metadata( clean ) == clean );

  // Comment markers inside strings are not comments.
  CHECK( strip_metadata( "INFO { SEMANTICS: Mealy }\nX \"a // b\"\n" ) == "INFO { SEMANTICS: Mealy }\nX \"a // b\"\n" );
}

TEST_CASE( "parse_ltl reads ground formulas", "[tlsf][parse]" )
{
  CHECK( parse_ltl( "G (req -> F grant)" ) ==
         ltl::globally( ltl::implies( ltl::atom( "req" ), ltl::eventually( ltl::atom( "grant" ) ) ) ) );
  CHECK( parse_ltl( "x[3] && !y" ) == ltl::conj( ltl::atom( "x_3" ), ltl::negate( ltl::atom( "y" ) ) ) );
  CHECK( parse_ltl( "a U b U c" ) ==
         ltl::until( ltl::atom( "a" ), ltl::until( ltl::atom( "b" ), ltl::atom( "c" ) ) ) );
  CHECK( parse_ltl( "&&[0<=i<3] p[i]" ) ==
         ltl::conj( ltl::conj( ltl::atom( "p_0" ), ltl::atom( "p_1" ) ), ltl::atom( "p_2" ) ) );
  CHECK_THROWS_AS( parse_ltl( "a &&" ), SyntaxError );
}

TEST_CASE( "grammar reference matches the documentation", "[tlsf]" )
{
  auto const doc = natsyn::testing::read_file( std::filesystem::path( NATSYN_SOURCE_DIR ) / "docs/tlsf-subset.md" );
  CHECK( grammar_reference() == doc );
  CHECK( grammar_reference().find( "line:col: expected <set>, found <token>" ) != std::string_view::npos );
}
