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

/*!
  \file tlsf.hpp
  \brief TLSF frontend: metadata stripping, parsing, parameter instantiation
         and expansion of the section structure into an LTL problem.

  The accepted subset is described in docs/tlsf-subset.md (the same text is
  available at runtime through grammar_reference()).
*/

#pragma once

#include <natsyn/ltl.hpp>

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace natsyn::tlsf
{

struct SourceSpan
{
  int line = 0;
  int col = 0;
};

enum class SectionKind
{
  Initially,
  Preset,
  Require,
  Assert,
  Assume,
  Guarantee,
};

std::string_view section_keyword( SectionKind kind );

enum class Semantics
{
  Mealy,
  Moore,
  MealyStrict,
  MooreStrict,
};

std::string_view semantics_name( Semantics s ); // "Mealy", "Mealy,Strict", ...
bool is_strict( Semantics s );

struct SpecExpr;
using ExprPtr = std::shared_ptr<SpecExpr const>;

/// One node of a (non-ground) specification expression. Equality ignores
/// source spans.
struct SpecExpr
{
  enum class Kind
  {
    Int,
    Bool,
    Name,  // identifier
    Index, // name[arg0]
    Call,  // name(args...)
    Unary, // op in {!, X, G, F, -}
    Binary,
    Range, // op in {&&, ||}; args = {lo, hi, body}; name = index variable
  };

  Kind kind = Kind::Int;
  std::int64_t value = 0;
  bool truth = false;
  std::string name;
  std::string op;
  std::string lo_rel; // "<" or "<="
  std::string hi_rel;
  std::vector<ExprPtr> args;
  SourceSpan span;

  friend bool operator==( SpecExpr const& a, SpecExpr const& b );
};

bool equal( ExprPtr const& a, ExprPtr const& b );

struct SignalDecl
{
  std::string name;
  ExprPtr width; // null for scalars
  SourceSpan span;
};

struct Definition
{
  std::string name;
  std::vector<std::string> params;
  ExprPtr body;
  SourceSpan span;
};

struct Parameter
{
  std::string name;
  ExprPtr expr;
  std::int64_t value = 0; // value under the declared defaults
  SourceSpan span;
};

struct TlsfSpec
{
  std::vector<Parameter> parameters;
  std::vector<Definition> definitions;
  std::vector<SignalDecl> inputs;
  std::vector<SignalDecl> outputs;
  std::map<SectionKind, std::vector<ExprPtr>> sections;
  Semantics semantics = Semantics::Mealy;
  bool semantics_declared = false;
  std::optional<Semantics> target;

  std::vector<ExprPtr> const& section( SectionKind kind ) const;

  friend bool operator==( TlsfSpec const& a, TlsfSpec const& b );
};

struct GroundSpec
{
  std::vector<ltl::Signal> inputs;
  std::vector<ltl::Signal> outputs;
  std::map<SectionKind, std::vector<ltl::Formula>> sections;
  Semantics semantics = Semantics::Mealy;
  bool semantics_declared = false;

  std::vector<ltl::Formula> const& section( SectionKind kind ) const;
};

/// Parse failure. what() is "line:col: expected <set>, found <token>".
struct SyntaxError : std::runtime_error
{
  SyntaxError( SourceSpan at, std::vector<std::string> expected, std::string found );
  SourceSpan at;
  std::vector<std::string> expected;
  std::string found;
};

struct InstantiationError : std::runtime_error
{
  InstantiationError( SourceSpan at, std::string const& message );
  SourceSpan at;
};

struct IndexOutOfRange : InstantiationError
{
  using InstantiationError::InstantiationError;
};

struct NonTerminatingDefinition : InstantiationError
{
  using InstantiationError::InstantiationError;
};

/// Overflow, division by zero, negative parameters, non-positive widths and
/// type confusion between integers and formulas.
struct EvaluationError : InstantiationError
{
  using InstantiationError::InstantiationError;
};

/// Removes comments and the TITLE/DESCRIPTION/TAGS fields of INFO; keeps
/// SEMANTICS and TARGET. Text without any of these is returned unchanged.
std::string strip_metadata( std::string_view text );

TlsfSpec parse_tlsf( std::string_view text );

/// Parses a single ground formula in TLSF expression syntax; every
/// identifier is an atom and `x[k]` with constant k names atom `x_k`.
ltl::Formula parse_ltl( std::string_view text );

/// Binds parameters (bindings override declared values), expands ranges and
/// definitions and names vector bits `sig_i`.
GroundSpec instantiate( TlsfSpec const& spec, std::map<std::string, std::int64_t> const& bindings = {} );

/// Folds the sections into one formula; see docs/tlsf-subset.md for the
/// Mealy/Moore and strict interpretations.
ltl::LtlProblem expand_semantics( GroundSpec const& ground );

std::string render_tlsf( TlsfSpec const& spec );
std::string render_expr( SpecExpr const& e );

/// The supported grammar, as documented in docs/tlsf-subset.md.
std::string_view grammar_reference();

/// Maximum nesting of definition expansions before instantiation gives up.
inline constexpr int max_definition_depth = 64;

} // namespace natsyn::tlsf
