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

#include <natsyn/verilog.hpp>

#include <algorithm>
#include <deque>
#include <map>
#include <set>
#include <unordered_map>

namespace natsyn::verilog
{

namespace
{

using ltl::Formula;
using ltl::Op;

// ---- negation normal form -----------------------------------------------------

enum class NK : std::uint8_t
{
  True,
  False,
  Pos,
  Neg,
  And,
  Or,
  Next,
  Until,
  Release,
};

struct NNode
{
  NK kind;
  int atom = -1;
  int a = -1;
  int b = -1;
};

class Nnf
{
public:
  std::vector<NNode> nodes;
  std::vector<std::string> atoms;
  std::map<int, int> until_bit; // node -> acceptance bit

  explicit Nnf( std::vector<std::string> formula_atoms ) : atoms( std::move( formula_atoms ) )
  {
    for ( std::size_t i = 0; i < atoms.size(); ++i )
      atom_index_[atoms[i]] = static_cast<int>( i );
  }

  int build( Formula const& f, bool neg )
  {
    auto& memo = neg ? neg_memo_ : pos_memo_;
    if ( auto it = memo.find( f ); it != memo.end() )
      return it->second;
    int const id = build_uncached( f, neg );
    memo.emplace( f, id );
    return id;
  }

private:
  std::map<std::tuple<NK, int, int, int>, int> interned_;
  std::unordered_map<std::string, int> atom_index_;
  std::unordered_map<Formula, int, ltl::FormulaHash> pos_memo_, neg_memo_;

  int make( NK k, int atom = -1, int a = -1, int b = -1 )
  {
    if ( k == NK::And || k == NK::Or )
    {
      NK const absorbing = k == NK::And ? NK::False : NK::True;
      NK const neutral = k == NK::And ? NK::True : NK::False;
      if ( nodes[a].kind == absorbing || nodes[b].kind == absorbing )
        return make( absorbing );
      if ( nodes[a].kind == neutral )
        return b;
      if ( nodes[b].kind == neutral || a == b )
        return a;
    }
    auto const key = std::make_tuple( k, atom, a, b );
    if ( auto it = interned_.find( key ); it != interned_.end() )
      return it->second;
    int const id = static_cast<int>( nodes.size() );
    nodes.push_back( NNode{ k, atom, a, b } );
    interned_.emplace( key, id );
    if ( k == NK::Until )
    {
      int const bit = static_cast<int>( until_bit.size() );
      until_bit.emplace( id, bit );
    }
    return id;
  }

  int build_uncached( Formula const& f, bool neg )
  {
    switch ( f.op() )
    {
    case Op::True:
      return make( neg ? NK::False : NK::True );
    case Op::False:
      return make( neg ? NK::True : NK::False );
    case Op::Atom:
      return make( neg ? NK::Neg : NK::Pos, atom_index_.at( f.name() ) );
    case Op::Not:
      return build( f.child(), !neg );
    case Op::And:
      return make( neg ? NK::Or : NK::And, -1, build( f.lhs(), neg ), build( f.rhs(), neg ) );
    case Op::Or:
      return make( neg ? NK::And : NK::Or, -1, build( f.lhs(), neg ), build( f.rhs(), neg ) );
    case Op::Implies:
      return neg ? make( NK::And, -1, build( f.lhs(), false ), build( f.rhs(), true ) )
                 : make( NK::Or, -1, build( f.lhs(), true ), build( f.rhs(), false ) );
    case Op::Iff:
    {
      int const ap = build( f.lhs(), false ), an = build( f.lhs(), true );
      int const bp = build( f.rhs(), false ), bn = build( f.rhs(), true );
      return neg ? make( NK::Or, -1, make( NK::And, -1, ap, bn ), make( NK::And, -1, an, bp ) )
                 : make( NK::Or, -1, make( NK::And, -1, ap, bp ), make( NK::And, -1, an, bn ) );
    }
    case Op::Next:
      return make( NK::Next, -1, build( f.child(), neg ) );
    case Op::Until:
      return make( neg ? NK::Release : NK::Until, -1, build( f.lhs(), neg ), build( f.rhs(), neg ) );
    case Op::Release:
      return make( neg ? NK::Until : NK::Release, -1, build( f.lhs(), neg ), build( f.rhs(), neg ) );
    case Op::WeakUntil:
      // a W b = b R (a || b); its negation is !b U (!a && !b).
      if ( neg )
        return make( NK::Until, -1, build( f.rhs(), true ),
                     make( NK::And, -1, build( f.lhs(), true ), build( f.rhs(), true ) ) );
      return make( NK::Release, -1, build( f.rhs(), false ),
                   make( NK::Or, -1, build( f.lhs(), false ), build( f.rhs(), false ) ) );
    case Op::Globally:
      return neg ? make( NK::Until, -1, make( NK::True ), build( f.child(), true ) )
                 : make( NK::Release, -1, make( NK::False ), build( f.child(), false ) );
    case Op::Finally:
      return neg ? make( NK::Release, -1, make( NK::False ), build( f.child(), true ) )
                 : make( NK::Until, -1, make( NK::True ), build( f.child(), false ) );
    }
    throw std::logic_error( "falsify_small: unhandled operator" );
  }
};

// ---- tableau: transition-based generalized Buechi automaton ---------------------

struct Cover
{
  std::uint64_t pos = 0;
  std::uint64_t neg = 0;
  std::vector<int> next; // sorted obligations for the successor position
  std::uint64_t pending = 0; // untils postponed by this transition

  auto key() const { return std::tie( pos, neg, next, pending ); }
  bool operator<( Cover const& o ) const { return key() < o.key(); }
  bool operator==( Cover const& o ) const { return key() == o.key(); }
};

class Tableau
{
public:
  explicit Tableau( Nnf const& nnf ) : nnf_( nnf ) {}

  int state_of( std::vector<int> obligations )
  {
    std::sort( obligations.begin(), obligations.end() );
    obligations.erase( std::unique( obligations.begin(), obligations.end() ), obligations.end() );
    auto [it, inserted] = ids_.emplace( obligations, static_cast<int>( states_.size() ) );
    if ( inserted )
    {
      states_.push_back( obligations );
      covers_.emplace_back();
      expanded_.push_back( false );
    }
    return it->second;
  }

  std::vector<Cover> const& covers( int state )
  {
    if ( !expanded_[state] )
    {
      std::vector<Cover> out;
      expand( states_[state], Cover{}, {}, out );
      std::sort( out.begin(), out.end() );
      out.erase( std::unique( out.begin(), out.end() ), out.end() );
      covers_[state] = std::move( out );
      expanded_[state] = true;
    }
    return covers_[state];
  }

private:
  Nnf const& nnf_;
  std::map<std::vector<int>, int> ids_;
  std::vector<std::vector<int>> states_;
  std::vector<std::vector<Cover>> covers_;
  std::vector<bool> expanded_;

  static void add_next( Cover& c, int f )
  {
    auto it = std::lower_bound( c.next.begin(), c.next.end(), f );
    if ( it == c.next.end() || *it != f )
      c.next.insert( it, f );
  }

  void expand( std::vector<int> todo, Cover cur, std::set<int> done, std::vector<Cover>& out )
  {
    while ( !todo.empty() )
    {
      int const f = todo.back();
      todo.pop_back();
      if ( !done.insert( f ).second )
        continue;
      auto const& n = nnf_.nodes[f];
      switch ( n.kind )
      {
      case NK::True:
        break;
      case NK::False:
        return;
      case NK::Pos:
        if ( cur.neg >> n.atom & 1u )
          return;
        cur.pos |= std::uint64_t{ 1 } << n.atom;
        break;
      case NK::Neg:
        if ( cur.pos >> n.atom & 1u )
          return;
        cur.neg |= std::uint64_t{ 1 } << n.atom;
        break;
      case NK::And:
        todo.push_back( n.a );
        todo.push_back( n.b );
        break;
      case NK::Or:
      {
        auto alt = todo;
        alt.push_back( n.a );
        expand( std::move( alt ), cur, done, out );
        todo.push_back( n.b );
        break;
      }
      case NK::Next:
        add_next( cur, n.a );
        break;
      case NK::Until:
      {
        auto alt = todo;
        alt.push_back( n.b );
        expand( std::move( alt ), cur, done, out );
        todo.push_back( n.a );
        add_next( cur, f );
        cur.pending |= std::uint64_t{ 1 } << nnf_.until_bit.at( f );
        break;
      }
      case NK::Release:
      {
        auto alt = todo;
        alt.push_back( n.a );
        alt.push_back( n.b );
        expand( std::move( alt ), cur, done, out );
        todo.push_back( n.b );
        add_next( cur, f );
        break;
      }
      }
    }
    out.push_back( std::move( cur ) );
  }
};

// ---- product search -------------------------------------------------------------

struct Edge
{
  int to;
  std::uint32_t combo; // latch * 2^I + input valuation
  std::uint64_t acc;   // satisfied acceptance bits
};

struct AtomSource
{
  bool is_input;
  std::size_t index;
};

std::vector<int> path_edges_to_combos( std::vector<std::pair<int, int>> const& path,
                                       std::vector<std::vector<Edge>> const& edges )
{
  std::vector<int> combos;
  for ( auto const& [node, e] : path )
    combos.push_back( static_cast<int>( edges[node][e].combo ) );
  return combos;
}

void canonicalize( ltl::LassoTrace& t )
{
  std::size_t const n = t.loop.size();
  for ( std::size_t p = 1; p <= n; ++p )
  {
    if ( n % p != 0 )
      continue;
    bool periodic = true;
    for ( std::size_t i = p; i < n && periodic; ++i )
      periodic = t.loop[i] == t.loop[i % p];
    if ( periodic )
    {
      t.loop.resize( p );
      break;
    }
  }
  while ( !t.stem.empty() && t.stem.back() == t.loop.back() )
  {
    std::rotate( t.loop.rbegin(), t.loop.rbegin() + 1, t.loop.rend() );
    t.stem.pop_back();
  }
}

} // namespace

FalsifyResult falsify_small( AigerCircuit const& c, ltl::Formula const& f, FalsifyOptions const& options )
{
  std::size_t const ni = c.inputs.size();
  std::size_t const nl = c.latches.size();
  if ( ni + nl >= 63 || ( std::uint64_t{ 1 } << ( ni + nl ) ) > options.state_input_budget )
  {
    throw ltl::BudgetExceeded( "falsify_small: 2^(" + std::to_string( nl ) + " latches + " + std::to_string( ni ) +
                               " inputs) exceeds the state-input budget of " +
                               std::to_string( options.state_input_budget ) );
  }

  // Atom wiring.
  std::map<std::string, AtomSource> circuit_atoms;
  std::vector<std::string> default_atoms;
  for ( std::size_t k = 0; k < ni; ++k )
  {
    circuit_atoms.emplace( c.input_atom( k ), AtomSource{ true, k } );
    default_atoms.push_back( c.input_atom( k ) );
  }
  for ( std::size_t k = 0; k < c.outputs.size(); ++k )
  {
    circuit_atoms.emplace( c.output_atom( k ), AtomSource{ false, k } );
    default_atoms.push_back( c.output_atom( k ) );
  }
  std::vector<std::string> const trace_atoms = options.atoms.empty() ? default_atoms : options.atoms;
  auto source_of = [&]( std::string const& a ) {
    auto it = circuit_atoms.find( a );
    if ( it == circuit_atoms.end() )
      throw ltl::UnknownAtom( a );
    return it->second;
  };
  auto const formula_atoms = ltl::atoms_of( f );
  if ( formula_atoms.size() > 64 )
  {
    throw ltl::BudgetExceeded( "falsify_small: more than 64 atoms in the formula" );
  }
  for ( auto const& a : formula_atoms )
  {
    if ( std::find( trace_atoms.begin(), trace_atoms.end(), a ) == trace_atoms.end() )
      throw ltl::UnknownAtom( a );
  }

  // One circuit step per (latch state, input valuation).
  std::size_t const combos = std::size_t{ 1 } << ( ni + nl );
  std::vector<std::uint64_t> letter( combos );
  std::vector<std::uint32_t> next_latch( combos );
  std::vector<std::vector<bool>> valuation( combos );
  {
    std::vector<bool> in( ni ), state( nl );
    for ( std::size_t combo = 0; combo < combos; ++combo )
    {
      std::size_t const latch = combo >> ni;
      std::size_t const input = combo & ( ( std::size_t{ 1 } << ni ) - 1 );
      for ( std::size_t k = 0; k < nl; ++k )
        state[k] = latch >> k & 1u;
      for ( std::size_t k = 0; k < ni; ++k )
        in[k] = input >> ( ni - 1 - k ) & 1u;
      Step s;
      auto const succ = step_from( c, state, in, s );
      auto value = [&]( AtomSource src ) { return src.is_input ? s.inputs[src.index] : s.outputs[src.index]; };
      for ( std::size_t i = 0; i < formula_atoms.size(); ++i )
      {
        if ( value( source_of( formula_atoms[i] ) ) )
          letter[combo] |= std::uint64_t{ 1 } << i;
      }
      for ( auto const& a : trace_atoms )
        valuation[combo].push_back( value( source_of( a ) ) );
      std::uint32_t nxt = 0;
      for ( std::size_t k = 0; k < nl; ++k )
      {
        if ( succ[k] )
          nxt |= std::uint32_t{ 1 } << k;
      }
      next_latch[combo] = nxt;
    }
  }

  Nnf nnf( formula_atoms );
  int const root = nnf.build( f, true );
  if ( nnf.until_bit.size() > 64 )
  {
    throw ltl::BudgetExceeded( "falsify_small: more than 64 eventualities in the formula" );
  }
  std::uint64_t const all_acc =
      nnf.until_bit.size() == 64 ? ~std::uint64_t{ 0 } : ( std::uint64_t{ 1 } << nnf.until_bit.size() ) - 1;
  Tableau tableau( nnf );

  std::uint32_t reset = 0;
  for ( std::size_t k = 0; k < nl; ++k )
  {
    if ( c.latches[k].reset == 1 )
      reset |= std::uint32_t{ 1 } << k;
  }

  // Breadth-first construction; node ids follow discovery order.
  std::unordered_map<std::uint64_t, int> node_id;
  std::vector<std::uint64_t> node_key;
  std::vector<std::vector<Edge>> edges;
  std::vector<std::pair<int, int>> parent; // (node, edge index)
  auto key_of = []( std::uint32_t latch, int state ) {
    return ( std::uint64_t{ latch } << 32 ) | static_cast<std::uint32_t>( state );
  };
  auto intern = [&]( std::uint32_t latch, int state ) -> int {
    auto const key = key_of( latch, state );
    if ( auto it = node_id.find( key ); it != node_id.end() )
      return it->second;
    if ( node_key.size() >= options.product_cap )
      return -1;
    int const id = static_cast<int>( node_key.size() );
    node_id.emplace( key, id );
    node_key.push_back( key );
    edges.emplace_back();
    parent.emplace_back( -1, -1 );
    return id;
  };

  FalsifyResult result;
  bool complete = true;
  intern( reset, tableau.state_of( { root } ) );
  for ( std::size_t u = 0; u < node_key.size(); ++u )
  {
    if ( options.deadline && ( u & 0x3ff ) == 0 && std::chrono::steady_clock::now() > *options.deadline )
    {
      complete = false;
      break;
    }
    auto const latch = static_cast<std::uint32_t>( node_key[u] >> 32 );
    int const state = static_cast<int>( node_key[u] & 0xffffffffu );
    auto const covers = tableau.covers( state ); // copied: state_of may grow the table
    for ( std::size_t input = 0; input < ( std::size_t{ 1 } << ni ); ++input )
    {
      auto const combo = static_cast<std::uint32_t>( ( std::size_t{ latch } << ni ) | input );
      std::uint64_t const l = letter[combo];
      for ( auto const& cover : covers )
      {
        if ( ( cover.pos & ~l ) != 0 || ( cover.neg & l ) != 0 )
          continue;
        int const to = intern( next_latch[combo], tableau.state_of( cover.next ) );
        if ( to < 0 )
        {
          complete = false;
          continue;
        }
        edges[u].push_back( Edge{ to, combo, ~cover.pending & all_acc } );
        if ( parent[to].first < 0 && to != 0 )
          parent[to] = { static_cast<int>( u ), static_cast<int>( edges[u].size() - 1 ) };
      }
    }
  }
  std::size_t const n = node_key.size();
  result.product_nodes = n;

  // Tarjan's SCCs, iteratively.
  std::vector<int> index( n, -1 ), low( n, 0 ), comp( n, -1 );
  std::vector<bool> on_stack( n, false );
  std::vector<int> scc_stack;
  int counter = 0, comps = 0;
  for ( std::size_t s = 0; s < n; ++s )
  {
    if ( index[s] >= 0 )
      continue;
    std::vector<std::pair<int, std::size_t>> call{ { static_cast<int>( s ), 0 } };
    index[s] = low[s] = counter++;
    scc_stack.push_back( static_cast<int>( s ) );
    on_stack[s] = true;
    while ( !call.empty() )
    {
      auto& [v, ei] = call.back();
      if ( ei < edges[v].size() )
      {
        int const w = edges[v][ei++].to;
        if ( index[w] < 0 )
        {
          index[w] = low[w] = counter++;
          scc_stack.push_back( w );
          on_stack[w] = true;
          call.push_back( { w, 0 } );
        }
        else if ( on_stack[w] )
        {
          low[v] = std::min( low[v], index[w] );
        }
        continue;
      }
      if ( low[v] == index[v] )
      {
        int w;
        do
        {
          w = scc_stack.back();
          scc_stack.pop_back();
          on_stack[w] = false;
          comp[w] = comps;
        } while ( w != v );
        ++comps;
      }
      int const finished = v;
      call.pop_back();
      if ( !call.empty() )
        low[call.back().first] = std::min( low[call.back().first], low[finished] );
    }
  }

  std::vector<std::uint64_t> comp_acc( comps, 0 );
  std::vector<bool> comp_cyclic( comps, false );
  for ( std::size_t u = 0; u < n; ++u )
  {
    for ( auto const& e : edges[u] )
    {
      if ( comp[e.to] == comp[u] )
      {
        comp_cyclic[comp[u]] = true;
        comp_acc[comp[u]] |= e.acc;
      }
    }
  }
  int start = -1;
  for ( std::size_t u = 0; u < n && start < 0; ++u )
  {
    if ( comp_cyclic[comp[u]] && comp_acc[comp[u]] == all_acc )
      start = static_cast<int>( u );
  }
  if ( start < 0 )
  {
    result.status = FalsifyResult::Status::NoneFound;
    result.complete = complete;
    return result;
  }

  // Stem along the breadth-first tree.
  std::vector<std::pair<int, int>> stem_path;
  for ( int v = start; v != 0; v = parent[v].first )
    stem_path.push_back( parent[v] );
  std::reverse( stem_path.begin(), stem_path.end() );

  // Cycle through `start` collecting every acceptance bit.
  int const target_comp = comp[start];
  auto bfs = [&]( int from, auto&& goal ) {
    std::vector<std::pair<int, int>> via( n, { -1, -1 } );
    std::vector<bool> seen( n, false );
    std::deque<int> queue{ from };
    seen[from] = true;
    while ( !queue.empty() )
    {
      int const u = queue.front();
      queue.pop_front();
      for ( std::size_t e = 0; e < edges[u].size(); ++e )
      {
        auto const& edge = edges[u][e];
        if ( comp[edge.to] != target_comp )
          continue;
        if ( goal( edge ) )
        {
          std::vector<std::pair<int, int>> path{ { u, static_cast<int>( e ) } };
          for ( int v = u; v != from; v = via[v].first )
            path.push_back( via[v] );
          std::reverse( path.begin(), path.end() );
          return path;
        }
        if ( !seen[edge.to] )
        {
          seen[edge.to] = true;
          via[edge.to] = { u, static_cast<int>( e ) };
          queue.push_back( edge.to );
        }
      }
    }
    throw std::logic_error( "falsify_small: accepting component lost its cycle" );
  };

  std::vector<std::pair<int, int>> cycle;
  int cur = start;
  std::uint64_t covered = 0;
  while ( covered != all_acc )
  {
    auto const part = bfs( cur, [&]( Edge const& e ) { return ( e.acc & ~covered ) != 0; } );
    for ( auto const& [node, e] : part )
      covered |= edges[node][e].acc;
    cur = edges[part.back().first][part.back().second].to;
    cycle.insert( cycle.end(), part.begin(), part.end() );
  }
  if ( cycle.empty() || cur != start )
  {
    auto const back = bfs( cur, [&]( Edge const& e ) { return e.to == start; } );
    cycle.insert( cycle.end(), back.begin(), back.end() );
  }

  ltl::LassoTrace trace;
  trace.atoms = trace_atoms;
  for ( int combo : path_edges_to_combos( stem_path, edges ) )
    trace.stem.push_back( valuation[combo] );
  for ( int combo : path_edges_to_combos( cycle, edges ) )
    trace.loop.push_back( valuation[combo] );
  canonicalize( trace );

  if ( !replays( c, trace ) || ltl::eval_lasso( f, trace ) )
  {
    throw std::logic_error( "falsify_small: counterexample failed re-validation" );
  }
  result.status = FalsifyResult::Status::Fail;
  result.trace = std::move( trace );
  result.complete = true;
  return result;
}

} // namespace natsyn::verilog
