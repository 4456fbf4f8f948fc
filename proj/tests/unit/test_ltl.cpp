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

#include <natsyn/ltl.hpp>

#include "lasso_oracle.hpp"
#include "random_formula.hpp"

using namespace natsyn::ltl;
using natsyn::testing::brute_force_witness;
using natsyn::testing::oracle_eval;

namespace
{

LassoTrace trace( std::vector<std::string> atoms, std::vector<std::vector<bool>> stem,
                  std::vector<std::vector<bool>> loop )
{
  return LassoTrace{ std::move( atoms ), std::move( stem ), std::move( loop ) };
}

} // namespace

TEST_CASE( "formulas compare structurally", "[ltl]" )
{
  auto const a = atom( "a" );
  CHECK( globally( implies( a, atom( "b" ) ) ) == globally( implies( atom( "a" ), atom( "b" ) ) ) );
  CHECK( globally( a ) != eventually( a ) );
  CHECK( conj_all( {} ) == constant( true ) );
  CHECK( disj_all( {} ) == constant( false ) );
  CHECK_THROWS_AS( atom( "" ), std::invalid_argument );
  CHECK( atoms_of( until( atom( "q" ), conj( atom( "p" ), atom( "q" ) ) ) ) == std::vector<std::string>{ "q", "p" } );
}

TEST_CASE( "rendering in tool dialects", "[ltl][render]" )
{
  auto const req = atom( "req" );
  auto const grant = atom( "grant" );
  CHECK( render( globally( implies( req, eventually( grant ) ) ), Dialect::Smv ) == "G (req -> F grant)" );
  CHECK( render( weak_until( atom( "a" ), atom( "b" ) ), Dialect::Smv ) == "(a U b) | G a" );
  CHECK( render( weak_until( atom( "a" ), atom( "b" ) ), Dialect::Spot ) == "a W b" );
  CHECK( render( release( atom( "a" ), atom( "b" ) ), Dialect::Smv ) == "a V b" );
  CHECK( render( conj( negate( atom( "a" ) ), constant( true ) ), Dialect::Smv ) == "!a & TRUE" );
  CHECK( render( conj( negate( atom( "a" ) ), disj( atom( "b" ), constant( false ) ) ), Dialect::TlsfExpr ) ==
         "!a && (b || false)" );
  CHECK( render( next( weak_until( atom( "a" ), atom( "b" ) ) ), Dialect::Smv ) == "X ((a U b) | G a)" );
}

TEST_CASE( "eval_lasso examples", "[ltl][eval]" )
{
  CHECK( eval_lasso( globally( atom( "a" ) ), trace( { "a" }, {}, { { true } } ) ) );
  CHECK_FALSE( eval_lasso( eventually( atom( "b" ) ), trace( { "b" }, { { false } }, { { false } } ) ) );

  // (!allFinished W finished_0), stem [f0=0, af=0], loop [f0=1, af=1]
  auto const f = weak_until( negate( atom( "allFinished" ) ), atom( "finished_0" ) );
  auto const t = trace( { "finished_0", "allFinished" }, { { false, false } }, { { true, true } } );
  REQUIRE( oracle_eval( f, t ) );
  CHECK( eval_lasso( f, t ) );

  CHECK_THROWS_AS( eval_lasso( atom( "zz" ), t ), UnknownAtom );
  CHECK_THROWS_AS( eval_lasso( atom( "a" ), trace( { "a" }, { { true } }, {} ) ), std::invalid_argument );
}

TEST_CASE( "eval_positions reports every suffix", "[ltl][eval]" )
{
  auto const t = trace( { "a" }, { { false }, { true } }, { { false } } );
  CHECK( eval_positions( atom( "a" ), t ) == std::vector<bool>{ false, true, false } );
  CHECK( eval_positions( eventually( atom( "a" ) ), t ) == std::vector<bool>{ true, true, false } );
  CHECK( eval_positions( next( atom( "a" ) ), t ) == std::vector<bool>{ true, false, false } );
}

TEST_CASE( "eval_lasso agrees with the unrolling oracle on random formulas", "[ltl][eval][property]" )
{
  natsyn::testing::RandomFormulas gen( 7, { "p", "q", "r" } );
  for ( int i = 0; i < 3000; ++i )
  {
    auto const f = gen.formula( 1 + i % 9 );
    auto const t = gen.lasso( 1 + i % 7 );
    INFO( render( f, Dialect::Spot ) );
    REQUIRE( eval_lasso( f, t ) == oracle_eval( f, t ) );
    REQUIRE( eval_lasso( f, t ) == !eval_lasso( negate( f ), t ) );
  }
}

TEST_CASE( "unrolling one loop iteration into the stem preserves verdicts", "[ltl][eval][property]" )
{
  natsyn::testing::RandomFormulas gen( 11, { "p", "q" } );
  for ( int i = 0; i < 2000; ++i )
  {
    auto f = gen.formula( 1 + i % 7 );
    f = i % 2 ? globally( f ) : eventually( f );
    auto const t = gen.lasso( 1 + i % 6 );
    LassoTrace rotated = t;
    rotated.stem.push_back( t.loop.front() );
    rotated.loop.erase( rotated.loop.begin() );
    rotated.loop.push_back( t.loop.front() );
    REQUIRE( same_word( t, rotated ) );
    REQUIRE( eval_lasso( f, t ) == eval_lasso( f, rotated ) );
  }
}

TEST_CASE( "bounded_inequiv examples", "[ltl][inequiv]" )
{
  auto const a = atom( "a" );
  SECTION( "G a vs a && X G a" )
  {
    auto const r = bounded_inequiv( globally( a ), conj( a, next( globally( a ) ) ) );
    CHECK( r.status == InequivResult::Status::NoneFound );
    CHECK( r.lassos_checked == lasso_space( 1, 6 ) );
  }
  SECTION( "F a vs a" )
  {
    auto const r = bounded_inequiv( eventually( a ), a );
    REQUIRE( r.status == InequivResult::Status::Witness );
    auto const expected = brute_force_witness( eventually( a ), a, { "a" }, 6 );
    REQUIRE( expected );
    CHECK( *r.witness == *expected );
    CHECK( *r.witness == trace( { "a" }, { { false } }, { { true } } ) );
  }
  SECTION( "identical formulas" )
  {
    auto const f = until( a, atom( "b" ) );
    CHECK( bounded_inequiv( f, f ).status == InequivResult::Status::NoneFound );
  }
  SECTION( "G a vs a" )
  {
    auto const r = bounded_inequiv( globally( a ), a );
    REQUIRE( r.witness );
    CHECK( *r.witness == trace( { "a" }, { { true } }, { { false } } ) );
  }
}

TEST_CASE( "bounded_inequiv finds the brute-force first witness", "[ltl][inequiv][property]" )
{
  natsyn::testing::RandomFormulas gen( 3, { "p", "q" } );
  InequivOptions opts;
  opts.max_len = 3;
  for ( int i = 0; i < 150; ++i )
  {
    auto const f = gen.formula( 1 + i % 6 );
    auto const g = gen.formula( 1 + ( i * 7 ) % 6 );
    std::vector<std::string> atoms{ "p", "q" };
    auto const r = bounded_inequiv( f, g, atoms, opts );
    auto const expected = brute_force_witness( f, g, atoms, opts.max_len );
    REQUIRE( r.witness.has_value() == expected.has_value() );
    if ( expected )
    {
      REQUIRE( *r.witness == *expected );
    }
  }
}

TEST_CASE( "bounded_inequiv respects budgets", "[ltl][inequiv]" )
{
  std::vector<std::string> five{ "a", "b", "c", "d", "e" };
  auto const f = conj_all( std::vector<Formula>{ atom( "a" ), atom( "b" ), atom( "c" ), atom( "d" ), atom( "e" ) } );
  CHECK_THROWS_AS( bounded_inequiv( f, f ), BudgetExceeded );

  InequivOptions tight;
  tight.lasso_cap = 100;
  CHECK_THROWS_AS( bounded_inequiv( atom( "a" ), atom( "b" ), tight ), BudgetExceeded );

  InequivOptions late;
  late.deadline = std::chrono::steady_clock::now() - std::chrono::seconds( 1 );
  auto const g = conj_all( std::vector<Formula>{ atom( "a" ), atom( "b" ), atom( "c" ), atom( "d" ) } );
  CHECK( bounded_inequiv( g, g, late ).status == InequivResult::Status::DeadlineReached );
}

TEST_CASE( "realizable decomposition", "[ltl][decompose]" )
{
  LtlProblem p;
  auto const a1 = atom( "a1" ), a2 = atom( "a2" );
  auto const g1 = atom( "g1" ), g2 = atom( "g2" ), g3 = atom( "g3" );

  p.assumptions = { a1, a2 };
  p.guarantees = { g1, g2, g3 };
  auto const ante = conj( a1, a2 );
  CHECK( decompose_realizable( p ) ==
         std::vector<Formula>{ implies( ante, g1 ), implies( ante, g2 ), implies( ante, g3 ) } );

  p.assumptions = {};
  p.guarantees = { g1 };
  CHECK( decompose_realizable( p ) == std::vector<Formula>{ implies( constant( true ), g1 ) } );

  p.guarantees = {};
  CHECK( decompose_realizable( p ) == std::vector<Formula>{ constant( true ) } );

  p.prefix.initially = atom( "i" );
  p.prefix.preset = atom( "s" );
  CHECK( decompose_realizable( p ) ==
         std::vector<Formula>{ implies( atom( "i" ), conj( atom( "s" ), constant( true ) ) ) } );
}

TEST_CASE( "unrealizable decomposition", "[ltl][decompose]" )
{
  LtlProblem p;
  auto const a1 = atom( "a1" ), a2 = atom( "a2" ), g1 = atom( "g1" );

  p.assumptions = { a1 };
  p.guarantees = { g1 };
  CHECK( decompose_unrealizable( p ) == std::vector<Formula>{ negate( implies( a1, g1 ) ) } );

  p.assumptions = { a1, a2 };
  auto const parts = decompose_unrealizable( p );
  REQUIRE( parts.size() == 2 );
  auto const monolithic = conj( conj( a1, a2 ), negate( g1 ) );
  CHECK( bounded_inequiv( conj_all( parts ), monolithic ).status == InequivResult::Status::NoneFound );

  p.assumptions = {};
  auto const none = decompose_unrealizable( p );
  CHECK( none == std::vector<Formula>{ negate( implies( constant( true ), g1 ) ) } );
  CHECK( bounded_inequiv( none.front(), negate( g1 ) ).status == InequivResult::Status::NoneFound );
}

TEST_CASE( "bit atoms follow the underscore convention", "[ltl]" )
{
  CHECK( Signal{ "finished", 3 }.bit_atoms() == std::vector<std::string>{ "finished_0", "finished_1", "finished_2" } );
  CHECK( Signal{ "go", std::nullopt }.bit_atoms() == std::vector<std::string>{ "go" } );
}
