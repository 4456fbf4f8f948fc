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

#include <chrono>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace natsyn::ltl
{

enum class Op : std::uint8_t
{
  True,
  False,
  Atom,
  Not,
  And,
  Or,
  Implies,
  Iff,
  Next,
  Until,
  WeakUntil,
  Release,
  Globally,
  Finally,
};

bool is_unary( Op op );
bool is_binary( Op op );

/// Immutable LTL formula. Copies share structure; equality is syntactic.
class Formula
{
public:
  Formula(); // the constant `true`

  Op op() const { return node_->op; }
  std::string const& name() const { return node_->name; }
  Formula const& lhs() const { return node_->children[0]; }
  Formula const& rhs() const { return node_->children[1]; }
  Formula const& child() const { return node_->children[0]; }
  std::size_t size() const { return node_->size; }

  friend bool operator==( Formula const& a, Formula const& b );
  friend bool operator!=( Formula const& a, Formula const& b ) { return !( a == b ); }

  static Formula make( Op op, std::vector<Formula> children, std::string name = {} );

private:
  struct Node
  {
    Op op;
    std::string name;
    std::vector<Formula> children;
    std::size_t size;
    std::size_t hash;
  };
  explicit Formula( std::shared_ptr<Node const> node ) : node_( std::move( node ) ) {}
  std::shared_ptr<Node const> node_;

  friend struct FormulaHash;
};

struct FormulaHash
{
  std::size_t operator()( Formula const& f ) const { return f.node_->hash; }
};

Formula atom( std::string name );
Formula constant( bool value );
Formula negate( Formula f );
Formula conj( Formula a, Formula b );
Formula disj( Formula a, Formula b );
Formula implies( Formula a, Formula b );
Formula iff( Formula a, Formula b );
Formula next( Formula f );
Formula until( Formula a, Formula b );
Formula weak_until( Formula a, Formula b );
Formula release( Formula a, Formula b );
Formula globally( Formula f );
Formula eventually( Formula f );

/// Left-folded conjunction; the empty conjunction is `true`.
Formula conj_all( std::span<Formula const> fs );
/// Left-folded disjunction; the empty disjunction is `false`.
Formula disj_all( std::span<Formula const> fs );

/// Atoms in order of first occurrence (left-to-right, pre-order).
std::vector<std::string> atoms_of( Formula const& f );

enum class Dialect
{
  Smv,
  Spot,
  TlsfExpr,
};

/// Renders `f` in a tool dialect. Binary operators are parenthesized except
/// at the root. SMV has no weak until, so `a W b` becomes `(a U b) | G a`.
std::string render( Formula const& f, Dialect dialect );

/// Ultimately periodic word stem . loop^omega over a fixed atom order.
struct LassoTrace
{
  std::vector<std::string> atoms;
  std::vector<std::vector<bool>> stem;
  std::vector<std::vector<bool>> loop;

  std::size_t length() const { return stem.size() + loop.size(); }
  /// Valuation at an arbitrary position of the infinite word.
  std::vector<bool> const& at( std::size_t position ) const;

  friend bool operator==( LassoTrace const&, LassoTrace const& ) = default;
};

/// Throws std::invalid_argument unless every valuation covers the atom set
/// and the loop is nonempty.
void validate_trace( LassoTrace const& t );

/// True iff the two traces denote the same infinite word (after projecting
/// `b` onto the atoms of `a`).
bool same_word( LassoTrace const& a, LassoTrace const& b );

struct UnknownAtom : std::runtime_error
{
  explicit UnknownAtom( std::string const& atom );
  std::string atom;
};

struct BudgetExceeded : std::runtime_error
{
  using std::runtime_error::runtime_error;
};

/// Flattened, post-ordered formula for repeated evaluation. Atom leaves
/// refer to indices into `atoms`.
struct CompiledFormula
{
  struct Instr
  {
    Op op;
    std::uint32_t a = 0; // operand instruction or atom index
    std::uint32_t b = 0;
  };
  std::vector<Instr> code;
  std::vector<std::string> atoms;
};

/// Compiles against a fixed atom order; throws UnknownAtom for atoms of `f`
/// that are missing from `atoms`.
CompiledFormula compile( Formula const& f, std::span<std::string const> atoms );

/// Bit-parallel lasso evaluation: lane k of every word describes an
/// independent lasso of the same shape. `atom_words[p * atoms + i]` holds
/// atom i at position p. Writes the root's truth value per position into
/// `out` (size stem + loop).
void eval_batch( CompiledFormula const& cf, std::size_t stem, std::size_t loop,
                 std::span<std::uint64_t const> atom_words, std::span<std::uint64_t> out );

/// Whether stem . loop^omega satisfies `f`.
bool eval_lasso( Formula const& f, LassoTrace const& t );

/// Truth value of `f` at each position 0 .. |stem|+|loop|-1.
std::vector<bool> eval_positions( Formula const& f, LassoTrace const& t );

struct InequivOptions
{
  std::size_t max_len = 6;
  std::size_t max_atoms = 4;
  std::uint64_t lasso_cap = std::uint64_t{ 1 } << 28;
  std::optional<std::chrono::steady_clock::time_point> deadline;
};

struct InequivResult
{
  enum class Status
  {
    Witness,
    NoneFound,
    DeadlineReached,
  };
  Status status = Status::NoneFound;
  std::optional<LassoTrace> witness;
  std::uint64_t lassos_checked = 0;
};

/// Enumerates every lasso with |stem|+|loop| <= max_len over the joint atom
/// set and returns the first one on which `f` and `g` disagree. Order:
/// shorter total length first, longer stems first, then valuations
/// lexicographically (position 0 most significant, atoms in order, 0 < 1).
/// NoneFound is not a proof of equivalence.
InequivResult bounded_inequiv( Formula const& f, Formula const& g, InequivOptions const& options = {} );

/// Same as above with an explicit atom order (must cover both formulas).
InequivResult bounded_inequiv( Formula const& f, Formula const& g, std::span<std::string const> atoms,
                               InequivOptions const& options );

/// Number of lassos of total length <= max_len over `atom_count` atoms;
/// saturates at UINT64_MAX.
std::uint64_t lasso_space( std::size_t atom_count, std::size_t max_len );

/// Pieces that every decomposed subproblem repeats. Absent parts are left
/// out of the fold instead of being replaced by `true`.
struct Prefix
{
  std::optional<Formula> initially;
  std::optional<Formula> preset;
  std::optional<Formula> strict_safety; // f_assert W !f_require
};

struct Signal
{
  std::string name;
  std::optional<std::int64_t> width; // absent for scalars

  std::vector<std::string> bit_atoms() const;
  friend bool operator==( Signal const&, Signal const& ) = default;
};

/// Atom name of bit `index` of a vector signal.
std::string bit_atom( std::string_view signal, std::int64_t index );

struct LtlProblem
{
  std::vector<Signal> input_signals;
  std::vector<Signal> output_signals;
  std::vector<std::string> inputs;
  std::vector<std::string> outputs;
  Formula phi;
  std::vector<Formula> assumptions;
  std::vector<Formula> guarantees;
  Prefix prefix;

  /// inputs followed by outputs
  std::vector<std::string> atoms() const;
};

/// prefix-fold(x) = initially -> (preset && strict_safety && x), dropping
/// absent parts; returns `x` when the prefix is empty.
Formula fold_prefix( Prefix const& prefix, Formula x );

/// One subproblem per guarantee: fold(a_1 && .. && a_n -> g_j).
std::vector<Formula> decompose_realizable( LtlProblem const& p );

/// One subproblem per assumption: !fold(a_i -> g_1 && .. && g_m).
std::vector<Formula> decompose_unrealizable( LtlProblem const& p );

} // namespace natsyn::ltl
