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
#include <cctype>
#include <map>
#include <regex>

namespace natsyn::verilog
{

std::string_view role_name( Role r ) { return r == Role::Solution ? "solution" : "environment"; }

Port const* VerilogModule::find_port( std::string_view port_name ) const
{
  auto it = std::find_if( ports.begin(), ports.end(), [&]( Port const& p ) { return p.name == port_name; } );
  return it == ports.end() ? nullptr : &*it;
}

namespace
{

std::string strip_comments( std::string_view src )
{
  std::string out;
  out.reserve( src.size() );
  for ( std::size_t i = 0; i < src.size(); )
  {
    if ( src.substr( i, 2 ) == "//" )
    {
      while ( i < src.size() && src[i] != '\n' )
        ++i;
    }
    else if ( src.substr( i, 2 ) == "/*" )
    {
      auto const end = src.find( "*/", i + 2 );
      i = end == std::string_view::npos ? src.size() : end + 2;
      out.push_back( ' ' );
    }
    else if ( src[i] == '"' )
    {
      std::size_t j = i + 1;
      while ( j < src.size() && src[j] != '"' )
        j += src[j] == '\\' ? 2 : 1;
      j = std::min( j + 1, src.size() );
      out.append( src.substr( i, j - i ) );
      i = j;
    }
    else
    {
      out.push_back( src[i++] );
    }
  }
  return out;
}

// Identifiers (including $system names), numbers with optional size/base,
// and single-character punctuation.
std::vector<std::string> tokenize( std::string_view src )
{
  std::vector<std::string> toks;
  auto ident_char = []( char c ) { return std::isalnum( static_cast<unsigned char>( c ) ) || c == '_' || c == '$'; };
  for ( std::size_t i = 0; i < src.size(); )
  {
    char const c = src[i];
    if ( std::isspace( static_cast<unsigned char>( c ) ) )
    {
      ++i;
    }
    else if ( ident_char( c ) || c == '\'' )
    {
      std::size_t j = i;
      while ( j < src.size() && ( ident_char( src[j] ) || src[j] == '\'' ) )
        ++j;
      toks.emplace_back( src.substr( i, j - i ) );
      i = j;
    }
    else if ( c == '"' )
    {
      std::size_t j = i + 1;
      while ( j < src.size() && src[j] != '"' )
        j += src[j] == '\\' ? 2 : 1;
      j = std::min( j + 1, src.size() );
      toks.emplace_back( src.substr( i, j - i ) );
      i = j;
    }
    else
    {
      toks.emplace_back( 1, c );
      ++i;
    }
  }
  return toks;
}

bool is_identifier( std::string const& t )
{
  return !t.empty() && ( std::isalpha( static_cast<unsigned char>( t[0] ) ) || t[0] == '_' );
}

std::optional<std::int64_t> parse_number( std::string const& t )
{
  auto const tick = t.find( '\'' );
  try
  {
    if ( tick == std::string::npos )
    {
      std::size_t used = 0;
      auto const v = std::stoll( t, &used, 10 );
      return used == t.size() ? std::optional<std::int64_t>( v ) : std::nullopt;
    }
    if ( tick + 1 >= t.size() )
      return std::nullopt;
    std::size_t k = tick + 1;
    if ( t[k] == 's' || t[k] == 'S' )
      ++k;
    int base = 10;
    switch ( std::tolower( static_cast<unsigned char>( t[k] ) ) )
    {
    case 'b':
      base = 2;
      break;
    case 'o':
      base = 8;
      break;
    case 'd':
      base = 10;
      break;
    case 'h':
      base = 16;
      break;
    default:
      return std::nullopt;
    }
    std::string digits;
    for ( char ch : t.substr( k + 1 ) )
    {
      if ( ch != '_' )
        digits.push_back( ch );
    }
    std::size_t used = 0;
    auto const v = std::stoll( digits, &used, base );
    return used == digits.size() ? std::optional<std::int64_t>( v ) : std::nullopt;
  }
  catch ( std::exception const& )
  {
    return std::nullopt;
  }
}

// Constant arithmetic over parameter defaults; nullopt when not evaluable.
class ConstEval
{
public:
  ConstEval( std::vector<std::string> const& toks, std::map<std::string, std::int64_t> const& env )
      : toks_( toks ), env_( env )
  {
  }

  std::optional<std::int64_t> run()
  {
    auto v = sum();
    return pos_ == toks_.size() ? v : std::nullopt;
  }

private:
  std::vector<std::string> const& toks_;
  std::map<std::string, std::int64_t> const& env_;
  std::size_t pos_ = 0;

  bool at( char c ) const { return pos_ < toks_.size() && toks_[pos_].size() == 1 && toks_[pos_][0] == c; }

  std::optional<std::int64_t> sum()
  {
    auto v = product();
    while ( v && ( at( '+' ) || at( '-' ) ) )
    {
      char const op = toks_[pos_++][0];
      auto r = product();
      if ( !r )
        return std::nullopt;
      v = op == '+' ? *v + *r : *v - *r;
    }
    return v;
  }

  std::optional<std::int64_t> product()
  {
    auto v = factor();
    while ( v && ( at( '*' ) || at( '/' ) ) )
    {
      char const op = toks_[pos_++][0];
      auto r = factor();
      if ( !r || ( op == '/' && *r == 0 ) )
        return std::nullopt;
      v = op == '*' ? *v * *r : *v / *r;
    }
    return v;
  }

  std::optional<std::int64_t> factor()
  {
    if ( pos_ >= toks_.size() )
      return std::nullopt;
    if ( at( '-' ) )
    {
      ++pos_;
      auto v = factor();
      return v ? std::optional<std::int64_t>( -*v ) : std::nullopt;
    }
    if ( at( '(' ) )
    {
      ++pos_;
      auto v = sum();
      if ( !at( ')' ) )
        return std::nullopt;
      ++pos_;
      return v;
    }
    auto const& t = toks_[pos_++];
    if ( auto it = env_.find( t ); it != env_.end() )
      return it->second;
    return parse_number( t );
  }
};

std::string join( std::vector<std::string> const& toks, std::size_t from, std::size_t to )
{
  std::string s;
  for ( std::size_t i = from; i < to; ++i )
  {
    if ( !s.empty() && ( is_identifier( toks[i] ) || std::isdigit( static_cast<unsigned char>( toks[i][0] ) ) ) &&
         ( is_identifier( toks[i - 1] ) || std::isdigit( static_cast<unsigned char>( toks[i - 1][0] ) ) ) )
    {
      s += ' ';
    }
    s += toks[i];
  }
  return s;
}

std::optional<std::int64_t> range_width( std::vector<std::string> const& toks, std::size_t open, std::size_t close,
                                         std::map<std::string, std::int64_t> const& env )
{
  auto const colon = std::find( toks.begin() + open, toks.begin() + close, ":" ) - toks.begin();
  if ( static_cast<std::size_t>( colon ) >= close )
    return std::nullopt;
  std::vector<std::string> msb( toks.begin() + open + 1, toks.begin() + colon );
  std::vector<std::string> lsb( toks.begin() + colon + 1, toks.begin() + close );
  auto const hi = ConstEval( msb, env ).run();
  auto const lo = ConstEval( lsb, env ).run();
  if ( !hi || !lo )
    return std::nullopt;
  return ( *hi >= *lo ? *hi - *lo : *lo - *hi ) + 1;
}

std::size_t matching( std::vector<std::string> const& toks, std::size_t open, std::string const& l,
                      std::string const& r )
{
  int depth = 0;
  for ( std::size_t i = open; i < toks.size(); ++i )
  {
    if ( toks[i] == l )
      ++depth;
    else if ( toks[i] == r && --depth == 0 )
      return i;
  }
  return toks.size();
}

bool is_net_keyword( std::string const& t )
{
  static char const* const words[] = { "wire", "reg", "logic", "signed", "unsigned", "var", "integer", "bit" };
  return std::any_of( std::begin( words ), std::end( words ), [&]( char const* w ) { return t == w; } );
}

// Declarations `input|output [net] [range] a, b, ...` starting at `i`;
// returns the position after the last name.
std::size_t read_declaration( std::vector<std::string> const& toks, std::size_t i, std::size_t end,
                              std::map<std::string, std::int64_t> const& env, std::vector<Port>& out,
                              bool stop_at_direction )
{
  Direction const dir = toks[i] == "input" ? Direction::Input : Direction::Output;
  ++i;
  std::string range;
  std::optional<std::int64_t> width = 1;
  while ( i < end && is_net_keyword( toks[i] ) )
    ++i;
  if ( i < end && toks[i] == "[" )
  {
    auto const close = matching( toks, i, "[", "]" );
    range = join( toks, i, close + 1 );
    width = range_width( toks, i, close, env );
    i = close + 1;
  }
  while ( i < end )
  {
    if ( is_identifier( toks[i] ) && !is_net_keyword( toks[i] ) )
    {
      out.push_back( Port{ dir, toks[i], range, width } );
      ++i;
    }
    if ( i < end && toks[i] == "," )
    {
      if ( stop_at_direction && i + 1 < end && ( toks[i + 1] == "input" || toks[i + 1] == "output" ) )
        return i + 1;
      ++i;
      continue;
    }
    break;
  }
  return i;
}

struct ModuleSpan
{
  std::string name;
  std::size_t begin; // token after the name
  std::size_t end;   // endmodule token
};

std::vector<ModuleSpan> find_modules( std::vector<std::string> const& toks )
{
  std::vector<ModuleSpan> mods;
  for ( std::size_t i = 0; i + 1 < toks.size(); ++i )
  {
    if ( toks[i] == "module" && is_identifier( toks[i + 1] ) )
    {
      auto end = std::find( toks.begin() + i + 2, toks.end(), "endmodule" ) - toks.begin();
      mods.push_back( ModuleSpan{ toks[i + 1], i + 2, static_cast<std::size_t>( end ) } );
      i = end;
    }
  }
  return mods;
}

void read_parameters( std::vector<std::string> const& toks, std::size_t begin, std::size_t end,
                      std::vector<ModuleParameter>& params, std::map<std::string, std::int64_t>& env )
{
  // Items separated by top-level commas: [parameter] [type] name = value
  std::size_t i = begin;
  while ( i < end )
  {
    std::size_t j = i;
    int depth = 0;
    while ( j < end && !( depth == 0 && ( toks[j] == "," || toks[j] == ";" ) ) )
    {
      if ( toks[j] == "(" || toks[j] == "[" || toks[j] == "{" )
        ++depth;
      else if ( toks[j] == ")" || toks[j] == "]" || toks[j] == "}" )
        --depth;
      ++j;
    }
    auto const eq = std::find( toks.begin() + i, toks.begin() + j, "=" ) - toks.begin();
    if ( static_cast<std::size_t>( eq ) < j && eq > static_cast<std::ptrdiff_t>( i ) )
    {
      std::string const& name = toks[eq - 1];
      std::vector<std::string> value( toks.begin() + eq + 1, toks.begin() + j );
      params.push_back( ModuleParameter{ name, join( toks, eq + 1, j ) } );
      if ( auto v = ConstEval( value, env ).run() )
        env[name] = *v;
    }
    i = j + 1;
  }
}

VerilogModule read_module( std::string_view source, std::vector<std::string> const& toks, ModuleSpan const& span )
{
  VerilogModule m;
  m.source = std::string( source );
  m.name = span.name;
  m.role = span.name == "environment" ? Role::Environment : Role::Solution;

  std::map<std::string, std::int64_t> env;
  std::size_t i = span.begin;
  if ( i < span.end && toks[i] == "#" && i + 1 < span.end && toks[i + 1] == "(" )
  {
    auto const close = matching( toks, i + 1, "(", ")" );
    read_parameters( toks, i + 2, close, m.parameters, env );
    i = close + 1;
  }
  // Body-level `parameter x = v;` declarations also count.
  std::size_t body_start = i;
  if ( i < span.end && toks[i] == "(" )
  {
    body_start = matching( toks, i, "(", ")" ) + 1;
  }
  for ( std::size_t k = body_start; k < span.end; ++k )
  {
    if ( toks[k] == "parameter" )
    {
      auto const semi = std::find( toks.begin() + k, toks.begin() + span.end, ";" ) - toks.begin();
      read_parameters( toks, k + 1, semi, m.parameters, env );
      k = semi;
    }
  }

  std::vector<std::string> plain_names;
  if ( i < span.end && toks[i] == "(" )
  {
    auto const close = matching( toks, i, "(", ")" );
    std::size_t k = i + 1;
    while ( k < close )
    {
      if ( toks[k] == "input" || toks[k] == "output" )
      {
        k = read_declaration( toks, k, close, env, m.ports, true );
      }
      else if ( toks[k] == "inout" )
      {
        ++k;
      }
      else
      {
        if ( is_identifier( toks[k] ) )
          plain_names.push_back( toks[k] );
        ++k;
      }
    }
  }
  if ( !plain_names.empty() )
  {
    // Non-ANSI header: directions come from body declarations.
    std::vector<Port> declared;
    for ( std::size_t k = body_start; k < span.end; ++k )
    {
      if ( ( toks[k] == "input" || toks[k] == "output" ) && ( k == body_start || toks[k - 1] == ";" ) )
      {
        k = read_declaration( toks, k, span.end, env, declared, false );
      }
    }
    for ( auto const& name : plain_names )
    {
      auto it = std::find_if( declared.begin(), declared.end(), [&]( Port const& p ) { return p.name == name; } );
      if ( it != declared.end() && !m.find_port( name ) )
        m.ports.push_back( *it );
    }
  }
  auto const* clk = m.find_port( "clk" );
  m.has_clk = clk && clk->direction == Direction::Input;
  return m;
}

} // namespace

VerilogModule parse_module( std::string_view source )
{
  auto const toks = tokenize( strip_comments( source ) );
  auto const mods = find_modules( toks );
  if ( mods.empty() )
  {
    throw BadModuleName( "no module declaration found in the Verilog code" );
  }
  auto top = std::find_if( mods.begin(), mods.end(),
                           []( ModuleSpan const& s ) { return s.name == "solution" || s.name == "environment"; } );
  if ( top == mods.end() )
  {
    throw BadModuleName( "the module must be named \"solution\" (realizable) or \"environment\" (unrealizable), "
                         "found \"" +
                         mods.front().name + "\"" );
  }
  auto m = read_module( source, toks, *top );
  if ( !m.has_clk )
  {
    throw MissingClock( "the module \"" + m.name + "\" must have a single clock input named \"clk\"" );
  }
  return m;
}

VerilogModule extract_verilog( std::string_view response )
{
  static std::regex const fence( R"(```[ \t]*[Vv]erilog[^\n]*\n)" );
  std::string const text( response );
  std::smatch match;
  if ( !std::regex_search( text, match, fence ) )
  {
    throw NoCodeBlock( "no Verilog code block found; enclose the module in ```verilog ... ```" );
  }
  auto const start = static_cast<std::size_t>( match.position( 0 ) + match.length( 0 ) );
  auto end = text.find( "```", start );
  end = end == std::string::npos ? text.size() : end;
  return parse_module( std::string_view( text ).substr( start, end - start ) );
}

std::string describe( PortIssue const& issue )
{
  switch ( issue.kind )
  {
  case IssueKind::MissingPort:
    return "missing port '" + issue.port + "' (" + issue.detail + ")";
  case IssueKind::ExtraPort:
    return "unexpected port '" + issue.port + "' (" + issue.detail + ")";
  case IssueKind::WrongDirection:
    return "port '" + issue.port + "' has the wrong direction (" + issue.detail + ")";
  case IssueKind::RoleMismatch:
    return "port '" + issue.port + "' does not match the module role (" + issue.detail + ")";
  case IssueKind::WidthMismatch:
    return "port '" + issue.port + "' has the wrong width (" + issue.detail + ")";
  }
  return {};
}

std::vector<PortIssue> lint_ports( VerilogModule const& m, ltl::LtlProblem const& p )
{
  bool const env = m.role == Role::Environment;
  auto const& ins = env ? p.output_signals : p.input_signals;
  auto const& outs = env ? p.input_signals : p.output_signals;
  std::vector<PortIssue> issues;

  auto check = [&]( ltl::Signal const& s, Direction want ) {
    std::string const want_name = want == Direction::Input ? "input" : "output";
    auto const* port = m.find_port( s.name );
    if ( !port )
    {
      issues.push_back( { IssueKind::MissingPort, s.name, "expected " + want_name } );
      return;
    }
    if ( port->direction != want )
    {
      auto const kind = env ? IssueKind::RoleMismatch : IssueKind::WrongDirection;
      std::string detail = "expected " + want_name;
      if ( env )
        detail += "; an environment module swaps the inputs and outputs of the specification";
      issues.push_back( { kind, s.name, detail } );
      return;
    }
    std::int64_t const want_width = s.width.value_or( 1 );
    if ( port->width && *port->width != want_width )
    {
      issues.push_back( { IssueKind::WidthMismatch, s.name,
                          "expected " + std::to_string( want_width ) + " bits, found " +
                              std::to_string( *port->width ) } );
    }
  };
  for ( auto const& s : ins )
    check( s, Direction::Input );
  for ( auto const& s : outs )
    check( s, Direction::Output );

  for ( auto const& port : m.ports )
  {
    if ( port.name == "clk" )
      continue;
    auto const known = [&]( std::vector<ltl::Signal> const& v ) {
      return std::any_of( v.begin(), v.end(), [&]( ltl::Signal const& s ) { return s.name == port.name; } );
    };
    if ( !known( ins ) && !known( outs ) )
    {
      issues.push_back( { IssueKind::ExtraPort, port.name, "not a signal of the specification" } );
    }
  }
  return issues;
}

} // namespace natsyn::verilog
