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

#include "internal.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <functional>
#include <limits>
#include <map>
#include <set>

namespace natsyn::tlsf
{

namespace
{

enum class Tok
{
  Ident,
  Int,
  String,
  Punct,
  End,
};

struct Token
{
  Tok kind = Tok::End;
  std::string text;
  std::int64_t value = 0;
  SourceSpan span;
};

std::string describe( Token const& t )
{
  switch ( t.kind )
  {
  case Tok::End:
    return "end of input";
  case Tok::String:
    return "string literal";
  default:
    return "'" + t.text + "'";
  }
}

// Longest match first.
constexpr std::array<std::string_view, 25> puncts = {
    "<->", "->", "&&", "||", "==", "!=", "<=", ">=", "{", "}", "(", ")", "[",
    "]",   ";",  ",",  ":",  "=",  "<",  ">",  "+",  "-", "*", "/", "!",
};

std::vector<Token> lex( std::string_view src )
{
  std::vector<Token> out;
  int line = 1;
  int col = 1;
  std::size_t i = 0;
  auto bump = [&]( std::size_t n ) {
    for ( std::size_t k = 0; k < n && i < src.size(); ++k, ++i )
    {
      if ( src[i] == '\n' )
      {
        ++line;
        col = 1;
      }
      else
      {
        ++col;
      }
    }
  };

  while ( i < src.size() )
  {
    char const c = src[i];
    if ( std::isspace( static_cast<unsigned char>( c ) ) )
    {
      bump( 1 );
      continue;
    }
    if ( src.substr( i, 2 ) == "//" )
    {
      while ( i < src.size() && src[i] != '\n' )
        bump( 1 );
      continue;
    }
    if ( src.substr( i, 2 ) == "/*" )
    {
      SourceSpan const at{ line, col };
      auto const end = src.find( "*/", i + 2 );
      if ( end == std::string_view::npos )
      {
        throw SyntaxError( at, { "'*/'" }, "end of input" );
      }
      bump( end + 2 - i );
      continue;
    }

    Token t;
    t.span = { line, col };
    if ( std::isalpha( static_cast<unsigned char>( c ) ) || c == '_' )
    {
      std::size_t j = i;
      while ( j < src.size() && ( std::isalnum( static_cast<unsigned char>( src[j] ) ) || src[j] == '_' ) )
        ++j;
      t.kind = Tok::Ident;
      t.text = std::string( src.substr( i, j - i ) );
      bump( j - i );
    }
    else if ( std::isdigit( static_cast<unsigned char>( c ) ) )
    {
      std::size_t j = i;
      while ( j < src.size() && std::isdigit( static_cast<unsigned char>( src[j] ) ) )
        ++j;
      t.kind = Tok::Int;
      t.text = std::string( src.substr( i, j - i ) );
      auto const [ptr, ec] = std::from_chars( src.data() + i, src.data() + j, t.value );
      if ( ec != std::errc{} )
      {
        throw SyntaxError( t.span, { "integer within 64-bit range" }, describe( t ) );
      }
      bump( j - i );
    }
    else if ( c == '"' )
    {
      std::size_t j = i + 1;
      while ( j < src.size() && src[j] != '"' )
      {
        j += src[j] == '\\' ? 2 : 1;
      }
      if ( j >= src.size() )
      {
        throw SyntaxError( t.span, { "'\"'" }, "end of input" );
      }
      t.kind = Tok::String;
      t.text = std::string( src.substr( i + 1, j - i - 1 ) );
      bump( j + 1 - i );
    }
    else
    {
      auto const it = std::find_if( puncts.begin(), puncts.end(),
                                    [&]( std::string_view p ) { return src.substr( i, p.size() ) == p; } );
      if ( it == puncts.end() )
      {
        throw SyntaxError( t.span, { "token" }, "'" + std::string( 1, c ) + "'" );
      }
      t.kind = Tok::Punct;
      t.text = std::string( *it );
      bump( it->size() );
    }
    out.push_back( std::move( t ) );
  }
  Token end;
  end.span = { line, col };
  out.push_back( end );
  return out;
}

bool is_reserved( std::string_view word )
{
  return word == "X" || word == "G" || word == "F" || word == "U" || word == "W" || word == "R" || word == "true" ||
         word == "false";
}

ExprPtr make_node( SpecExpr e ) { return std::make_shared<SpecExpr const>( std::move( e ) ); }

ExprPtr make_binary( std::string op, ExprPtr l, ExprPtr r, SourceSpan at )
{
  SpecExpr e;
  e.kind = SpecExpr::Kind::Binary;
  e.op = std::move( op );
  e.args = { std::move( l ), std::move( r ) };
  e.span = at;
  return make_node( std::move( e ) );
}

ExprPtr make_unary( std::string op, ExprPtr x, SourceSpan at )
{
  SpecExpr e;
  e.kind = SpecExpr::Kind::Unary;
  e.op = std::move( op );
  e.args = { std::move( x ) };
  e.span = at;
  return make_node( std::move( e ) );
}

class Parser
{
public:
  explicit Parser( std::string_view text ) : tokens_( lex( text ) ) {}

  TlsfSpec spec()
  {
    TlsfSpec s;
    bool seen_info = false, seen_global = false, seen_main = false;
    while ( cur().kind != Tok::End )
    {
      if ( !seen_info && at_keyword( "INFO" ) )
      {
        info( s );
        seen_info = true;
      }
      else if ( !seen_global && at_keyword( "GLOBAL" ) )
      {
        global( s );
        seen_global = true;
      }
      else if ( !seen_main && at_keyword( "MAIN" ) )
      {
        main( s );
        seen_main = true;
      }
      else
      {
        fail();
      }
    }
    if ( !seen_main )
    {
      expected_.push_back( "'MAIN'" );
      fail();
    }
    return s;
  }

  ExprPtr standalone()
  {
    auto e = expr();
    if ( cur().kind != Tok::End )
    {
      expected_.push_back( "end of input" );
      fail();
    }
    return e;
  }

private:
  std::vector<Token> tokens_;
  std::size_t pos_ = 0;
  std::vector<std::string> expected_;

  Token const& cur() const { return tokens_[pos_]; }
  Token const& peek( std::size_t ahead ) const { return tokens_[std::min( pos_ + ahead, tokens_.size() - 1 )]; }

  Token advance()
  {
    expected_.clear();
    Token t = cur();
    if ( pos_ + 1 < tokens_.size() )
    {
      ++pos_;
    }
    return t;
  }

  [[noreturn]] void fail()
  {
    std::vector<std::string> set;
    for ( auto const& e : expected_ )
    {
      if ( std::find( set.begin(), set.end(), e ) == set.end() )
      {
        set.push_back( e );
      }
    }
    throw SyntaxError( cur().span, std::move( set ), describe( cur() ) );
  }

  bool at_punct( std::string_view p )
  {
    if ( cur().kind == Tok::Punct && cur().text == p )
    {
      return true;
    }
    expected_.push_back( "'" + std::string( p ) + "'" );
    return false;
  }

  bool at_keyword( std::string_view k )
  {
    if ( cur().kind == Tok::Ident && cur().text == k )
    {
      return true;
    }
    expected_.push_back( "'" + std::string( k ) + "'" );
    return false;
  }

  bool accept_punct( std::string_view p )
  {
    if ( at_punct( p ) )
    {
      advance();
      return true;
    }
    return false;
  }

  Token expect_punct( std::string_view p )
  {
    if ( !at_punct( p ) )
    {
      fail();
    }
    return advance();
  }

  Token expect_keyword( std::string_view k )
  {
    if ( !at_keyword( k ) )
    {
      fail();
    }
    return advance();
  }

  Token expect_ident()
  {
    if ( cur().kind != Tok::Ident || is_reserved( cur().text ) )
    {
      expected_.push_back( "identifier" );
      fail();
    }
    return advance();
  }

  // ---- blocks ------------------------------------------------------------

  Semantics semantics_value()
  {
    Semantics base;
    if ( at_keyword( "Mealy" ) )
    {
      base = Semantics::Mealy;
    }
    else if ( at_keyword( "Moore" ) )
    {
      base = Semantics::Moore;
    }
    else
    {
      fail();
    }
    advance();
    if ( accept_punct( "," ) )
    {
      expect_keyword( "Strict" );
      return base == Semantics::Mealy ? Semantics::MealyStrict : Semantics::MooreStrict;
    }
    return base;
  }

  void info( TlsfSpec& s )
  {
    advance();
    expect_punct( "{" );
    while ( !accept_punct( "}" ) )
    {
      if ( at_keyword( "TITLE" ) || at_keyword( "DESCRIPTION" ) )
      {
        advance();
        expect_punct( ":" );
        expect_string();
      }
      else if ( at_keyword( "TAGS" ) )
      {
        advance();
        expect_punct( ":" );
        expect_string();
        while ( accept_punct( "," ) )
          expect_string();
      }
      else if ( at_keyword( "SEMANTICS" ) )
      {
        advance();
        expect_punct( ":" );
        s.semantics = semantics_value();
        s.semantics_declared = true;
      }
      else if ( at_keyword( "TARGET" ) )
      {
        advance();
        expect_punct( ":" );
        s.target = semantics_value();
      }
      else
      {
        fail();
      }
    }
  }

  void expect_string()
  {
    if ( cur().kind != Tok::String )
    {
      expected_.push_back( "string literal" );
      fail();
    }
    advance();
  }

  void global( TlsfSpec& s )
  {
    advance();
    expect_punct( "{" );
    bool seen_params = false, seen_defs = false;
    while ( !accept_punct( "}" ) )
    {
      if ( !seen_params && at_keyword( "PARAMETERS" ) )
      {
        advance();
        seen_params = true;
        expect_punct( "{" );
        while ( !accept_punct( "}" ) )
        {
          Parameter p;
          auto const name = expect_ident();
          p.name = name.text;
          p.span = name.span;
          expect_punct( "=" );
          p.expr = expr();
          expect_punct( ";" );
          s.parameters.push_back( std::move( p ) );
        }
      }
      else if ( !seen_defs && at_keyword( "DEFINITIONS" ) )
      {
        advance();
        seen_defs = true;
        expect_punct( "{" );
        while ( !accept_punct( "}" ) )
        {
          Definition d;
          auto const name = expect_ident();
          d.name = name.text;
          d.span = name.span;
          if ( accept_punct( "(" ) )
          {
            d.params.push_back( expect_ident().text );
            while ( accept_punct( "," ) )
              d.params.push_back( expect_ident().text );
            expect_punct( ")" );
          }
          expect_punct( "=" );
          d.body = expr();
          expect_punct( ";" );
          s.definitions.push_back( std::move( d ) );
        }
      }
      else
      {
        fail();
      }
    }
  }

  void signals( std::vector<SignalDecl>& out )
  {
    advance();
    expect_punct( "{" );
    while ( !accept_punct( "}" ) )
    {
      SignalDecl d;
      auto const name = expect_ident();
      d.name = name.text;
      d.span = name.span;
      if ( accept_punct( "[" ) )
      {
        d.width = expr();
        expect_punct( "]" );
      }
      expect_punct( ";" );
      out.push_back( std::move( d ) );
    }
  }

  std::optional<SectionKind> at_section()
  {
    static constexpr std::pair<std::string_view, SectionKind> names[] = {
        { "INITIALLY", SectionKind::Initially }, { "PRESET", SectionKind::Preset },
        { "REQUIRE", SectionKind::Require },     { "ASSERT", SectionKind::Assert },
        { "INVARIANTS", SectionKind::Assert },   { "ASSUME", SectionKind::Assume },
        { "ASSUMPTIONS", SectionKind::Assume },  { "GUARANTEE", SectionKind::Guarantee },
        { "GUARANTEES", SectionKind::Guarantee },
    };
    for ( auto const& [word, kind] : names )
    {
      if ( at_keyword( word ) )
      {
        return kind;
      }
    }
    return std::nullopt;
  }

  void main( TlsfSpec& s )
  {
    advance();
    expect_punct( "{" );
    bool seen_inputs = false, seen_outputs = false;
    while ( !accept_punct( "}" ) )
    {
      if ( !seen_inputs && at_keyword( "INPUTS" ) )
      {
        signals( s.inputs );
        seen_inputs = true;
      }
      else if ( !seen_outputs && at_keyword( "OUTPUTS" ) )
      {
        signals( s.outputs );
        seen_outputs = true;
      }
      else if ( auto kind = at_section(); kind && !s.sections.count( *kind ) )
      {
        advance();
        expect_punct( "{" );
        auto& list = s.sections[*kind];
        while ( !accept_punct( "}" ) )
        {
          list.push_back( expr() );
          expect_punct( ";" );
        }
      }
      else
      {
        fail();
      }
    }
  }

  // ---- expressions -------------------------------------------------------

  ExprPtr expr() { return iff(); }

  ExprPtr iff()
  {
    auto l = implication();
    while ( at_punct( "<->" ) )
    {
      advance();
      auto r = implication();
      auto const at = l->span;
      l = make_binary( "<->", std::move( l ), std::move( r ), at );
    }
    return l;
  }

  ExprPtr implication()
  {
    auto l = disjunction();
    if ( at_punct( "->" ) )
    {
      advance();
      auto r = implication();
      auto const at = l->span;
      return make_binary( "->", std::move( l ), std::move( r ), at );
    }
    return l;
  }

  ExprPtr disjunction()
  {
    auto l = conjunction();
    while ( at_punct( "||" ) )
    {
      advance();
      auto r = conjunction();
      auto const at = l->span;
      l = make_binary( "||", std::move( l ), std::move( r ), at );
    }
    return l;
  }

  ExprPtr conjunction()
  {
    auto l = temporal();
    while ( at_punct( "&&" ) )
    {
      advance();
      auto r = temporal();
      auto const at = l->span;
      l = make_binary( "&&", std::move( l ), std::move( r ), at );
    }
    return l;
  }

  ExprPtr temporal()
  {
    auto l = unary();
    if ( at_keyword( "U" ) || at_keyword( "W" ) || at_keyword( "R" ) )
    {
      auto const op = advance().text;
      auto r = temporal();
      auto const at = l->span;
      return make_binary( op, std::move( l ), std::move( r ), at );
    }
    return l;
  }

  ExprPtr unary()
  {
    if ( at_punct( "!" ) || at_keyword( "X" ) || at_keyword( "G" ) || at_keyword( "F" ) )
    {
      auto const t = advance();
      auto x = unary();
      return make_unary( t.text, std::move( x ), t.span );
    }
    if ( ( at_punct( "&&" ) || at_punct( "||" ) ) && peek( 1 ).kind == Tok::Punct && peek( 1 ).text == "[" )
    {
      return range();
    }
    return comparison();
  }

  std::string bound_relation()
  {
    if ( at_punct( "<" ) || at_punct( "<=" ) )
    {
      return advance().text;
    }
    fail();
  }

  ExprPtr range()
  {
    auto const t = advance();
    expect_punct( "[" );
    SpecExpr e;
    e.kind = SpecExpr::Kind::Range;
    e.op = t.text;
    e.span = t.span;
    auto lo = additive();
    e.lo_rel = bound_relation();
    e.name = expect_ident().text;
    e.hi_rel = bound_relation();
    auto hi = additive();
    expect_punct( "]" );
    auto body = unary();
    e.args = { std::move( lo ), std::move( hi ), std::move( body ) };
    return make_node( std::move( e ) );
  }

  ExprPtr comparison()
  {
    auto l = additive();
    for ( std::string_view op : { "==", "!=", "<=", ">=", "<", ">" } )
    {
      if ( at_punct( op ) )
      {
        advance();
        auto r = additive();
        auto const at = l->span;
        return make_binary( std::string( op ), std::move( l ), std::move( r ), at );
      }
    }
    return l;
  }

  ExprPtr additive()
  {
    auto l = multiplicative();
    while ( at_punct( "+" ) || at_punct( "-" ) )
    {
      auto const op = advance().text;
      auto r = multiplicative();
      auto const at = l->span;
      l = make_binary( op, std::move( l ), std::move( r ), at );
    }
    return l;
  }

  ExprPtr multiplicative()
  {
    auto l = negation();
    while ( at_punct( "*" ) || at_punct( "/" ) )
    {
      auto const op = advance().text;
      auto r = negation();
      auto const at = l->span;
      l = make_binary( op, std::move( l ), std::move( r ), at );
    }
    return l;
  }

  ExprPtr negation()
  {
    if ( at_punct( "-" ) )
    {
      auto const t = advance();
      return make_unary( "-", negation(), t.span );
    }
    return primary();
  }

  ExprPtr primary()
  {
    SpecExpr e;
    e.span = cur().span;
    if ( cur().kind == Tok::Int )
    {
      e.kind = SpecExpr::Kind::Int;
      e.value = advance().value;
      return make_node( std::move( e ) );
    }
    if ( at_keyword( "true" ) || at_keyword( "false" ) )
    {
      e.kind = SpecExpr::Kind::Bool;
      e.truth = advance().text == "true";
      return make_node( std::move( e ) );
    }
    if ( at_punct( "(" ) )
    {
      advance();
      auto inner = expr();
      expect_punct( ")" );
      return inner;
    }
    if ( cur().kind == Tok::Ident && !is_reserved( cur().text ) )
    {
      e.name = advance().text;
      if ( accept_punct( "[" ) )
      {
        e.kind = SpecExpr::Kind::Index;
        e.args.push_back( expr() );
        expect_punct( "]" );
      }
      else if ( accept_punct( "(" ) )
      {
        e.kind = SpecExpr::Kind::Call;
        e.args.push_back( expr() );
        while ( accept_punct( "," ) )
          e.args.push_back( expr() );
        expect_punct( ")" );
      }
      else
      {
        e.kind = SpecExpr::Kind::Name;
      }
      return make_node( std::move( e ) );
    }
    expected_.push_back( "integer" );
    expected_.push_back( "identifier" );
    fail();
  }
};

// ---- identifier resolution --------------------------------------------------

[[noreturn]] void reject( SourceSpan at, std::string expected, std::string const& name )
{
  throw SyntaxError( at, { std::move( expected ) }, "'" + name + "'" );
}

class Resolver
{
public:
  explicit Resolver( TlsfSpec& s ) : s_( s ) {}

  void run()
  {
    std::set<std::string> names;
    auto fresh = [&]( std::string const& name, SourceSpan at ) {
      if ( !names.insert( name ).second )
      {
        reject( at, "fresh identifier", name );
      }
    };

    std::map<std::string, std::int64_t> env;
    for ( auto& p : s_.parameters )
    {
      fresh( p.name, p.span );
      p.value = default_value( *p.expr, env );
      if ( p.value < 0 )
      {
        throw SyntaxError( p.expr->span, { "nonnegative parameter value" }, std::to_string( p.value ) );
      }
      env[p.name] = p.value;
      params_.insert( p.name );
    }
    for ( auto const& d : s_.definitions )
    {
      fresh( d.name, d.span );
      defs_[d.name] = &d;
    }
    for ( auto const* list : { &s_.inputs, &s_.outputs } )
    {
      for ( auto const& sig : *list )
      {
        fresh( sig.name, sig.span );
        signals_[sig.name] = static_cast<bool>( sig.width );
        if ( sig.width )
        {
          check_params_only( *sig.width );
        }
      }
    }

    for ( auto const& d : s_.definitions )
    {
      std::vector<std::string> locals( d.params.begin(), d.params.end() );
      check( *d.body, locals );
    }
    reject_recursion();
    for ( auto const& [kind, exprs] : s_.sections )
    {
      for ( auto const& e : exprs )
      {
        std::vector<std::string> locals;
        check( *e, locals );
      }
    }
  }

private:
  TlsfSpec& s_;
  std::set<std::string> params_;
  std::map<std::string, Definition const*> defs_;
  std::map<std::string, bool> signals_; // name -> is vector

  static std::int64_t default_value( SpecExpr const& e, std::map<std::string, std::int64_t> const& env )
  {
    using K = SpecExpr::Kind;
    switch ( e.kind )
    {
    case K::Int:
      return e.value;
    case K::Name:
      if ( auto it = env.find( e.name ); it != env.end() )
      {
        return it->second;
      }
      reject( e.span, "previously declared parameter", e.name );
    case K::Unary:
      if ( e.op == "-" )
      {
        return checked_or_reject( "-", 0, default_value( *e.args[0], env ), e.span );
      }
      break;
    case K::Binary:
      if ( e.op == "+" || e.op == "-" || e.op == "*" || e.op == "/" )
      {
        return checked_or_reject( e.op, default_value( *e.args[0], env ), default_value( *e.args[1], env ), e.span );
      }
      break;
    default:
      break;
    }
    throw SyntaxError( e.span, { "arithmetic expression" }, "'" + render_expr( e ) + "'" );
  }

  static std::int64_t checked_or_reject( std::string_view op, std::int64_t a, std::int64_t b, SourceSpan at )
  {
    try
    {
      return detail::checked_arith( op, a, b, at );
    }
    catch ( EvaluationError const& )
    {
      throw SyntaxError( at, { "parameter value within 64-bit range" }, "'" + std::string( op ) + "'" );
    }
  }

  void check_params_only( SpecExpr const& e )
  {
    if ( e.kind == SpecExpr::Kind::Name && !params_.count( e.name ) )
    {
      reject( e.span, "parameter", e.name );
    }
    bool const arithmetic = e.kind == SpecExpr::Kind::Name || e.kind == SpecExpr::Kind::Int ||
                            ( e.kind == SpecExpr::Kind::Unary && e.op == "-" ) ||
                            ( e.kind == SpecExpr::Kind::Binary && detail::level_of( e ) >= detail::LevelAdd );
    if ( !arithmetic )
    {
      throw SyntaxError( e.span, { "arithmetic expression" }, "'" + render_expr( e ) + "'" );
    }
    for ( auto const& a : e.args )
    {
      check_params_only( *a );
    }
  }

  static bool is_local( std::vector<std::string> const& locals, std::string const& name )
  {
    return std::find( locals.begin(), locals.end(), name ) != locals.end();
  }

  void check( SpecExpr const& e, std::vector<std::string>& locals )
  {
    using K = SpecExpr::Kind;
    switch ( e.kind )
    {
    case K::Int:
    case K::Bool:
      return;
    case K::Name:
      if ( is_local( locals, e.name ) || params_.count( e.name ) || signals_.count( e.name ) )
      {
        return;
      }
      if ( auto it = defs_.find( e.name ); it != defs_.end() )
      {
        if ( it->second->params.empty() )
        {
          return;
        }
        reject( e.span, "call with " + std::to_string( it->second->params.size() ) + " arguments", e.name );
      }
      reject( e.span, "declared identifier", e.name );
    case K::Index:
      if ( !is_local( locals, e.name ) )
      {
        auto it = signals_.find( e.name );
        if ( it == signals_.end() )
        {
          reject( e.span, "declared vector signal", e.name );
        }
        if ( !it->second )
        {
          reject( e.span, "vector signal", e.name );
        }
      }
      break;
    case K::Call:
    {
      auto it = defs_.find( e.name );
      if ( it == defs_.end() || it->second->params.size() != e.args.size() )
      {
        reject( e.span, "definition taking " + std::to_string( e.args.size() ) + " arguments", e.name );
      }
      break;
    }
    case K::Range:
      check( *e.args[0], locals );
      check( *e.args[1], locals );
      locals.push_back( e.name );
      check( *e.args[2], locals );
      locals.pop_back();
      return;
    default:
      break;
    }
    for ( auto const& a : e.args )
    {
      check( *a, locals );
    }
  }

  void collect_calls( SpecExpr const& e, std::vector<std::string> const& params, std::set<std::string>& out )
  {
    if ( ( e.kind == SpecExpr::Kind::Call || e.kind == SpecExpr::Kind::Name ) && defs_.count( e.name ) &&
         std::find( params.begin(), params.end(), e.name ) == params.end() )
    {
      out.insert( e.name );
    }
    for ( auto const& a : e.args )
    {
      collect_calls( *a, params, out );
    }
  }

  void reject_recursion()
  {
    std::map<std::string, std::set<std::string>> graph;
    for ( auto const& d : s_.definitions )
    {
      collect_calls( *d.body, d.params, graph[d.name] );
    }
    std::map<std::string, int> state; // 1 = on stack, 2 = done
    std::function<void( Definition const& )> visit = [&]( Definition const& d ) {
      state[d.name] = 1;
      for ( auto const& callee : graph[d.name] )
      {
        if ( state[callee] == 1 )
        {
          reject( d.span, "non-recursive definition", d.name );
        }
        if ( state[callee] == 0 )
        {
          visit( *defs_.at( callee ) );
        }
      }
      state[d.name] = 2;
    };
    for ( auto const& d : s_.definitions )
    {
      if ( state[d.name] == 0 )
      {
        visit( d );
      }
    }
  }
};

} // namespace

namespace detail
{

std::int64_t checked_arith( std::string_view op, std::int64_t a, std::int64_t b, SourceSpan at )
{
  std::int64_t r = 0;
  bool overflow = false;
  if ( op == "+" )
    overflow = __builtin_add_overflow( a, b, &r );
  else if ( op == "-" )
    overflow = __builtin_sub_overflow( a, b, &r );
  else if ( op == "*" )
    overflow = __builtin_mul_overflow( a, b, &r );
  else if ( op == "/" )
  {
    if ( b == 0 )
    {
      throw EvaluationError( at, "division by zero" );
    }
    overflow = a == std::numeric_limits<std::int64_t>::min() && b == -1;
    r = overflow ? 0 : a / b;
  }
  if ( overflow )
  {
    throw EvaluationError( at, "integer overflow in '" + std::string( op ) + "'" );
  }
  return r;
}

ExprPtr parse_standalone_expression( std::string_view text ) { return Parser( text ).standalone(); }

int level_of( SpecExpr const& e )
{
  using K = SpecExpr::Kind;
  switch ( e.kind )
  {
  case K::Unary:
    return e.op == "-" ? LevelNeg : LevelUnary;
  case K::Range:
    return LevelUnary;
  case K::Binary:
    if ( e.op == "<->" )
      return LevelIff;
    if ( e.op == "->" )
      return LevelImplies;
    if ( e.op == "||" )
      return LevelOr;
    if ( e.op == "&&" )
      return LevelAnd;
    if ( e.op == "U" || e.op == "W" || e.op == "R" )
      return LevelTemporal;
    if ( e.op == "+" || e.op == "-" )
      return LevelAdd;
    if ( e.op == "*" || e.op == "/" )
      return LevelMul;
    return LevelCompare;
  default:
    return LevelPrimary;
  }
}

} // namespace detail

TlsfSpec parse_tlsf( std::string_view text )
{
  TlsfSpec s = Parser( text ).spec();
  Resolver( s ).run();
  return s;
}

} // namespace natsyn::tlsf
