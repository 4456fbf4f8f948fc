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

#include <cctype>
#include <set>

namespace natsyn::tlsf
{

namespace
{

// Both passes keep the line structure intact so that the touched-line sets
// refer to the same line numbers.
struct Edit
{
  std::string text;
  std::set<std::size_t> touched;
  std::size_t line = 0;

  void put( char c )
  {
    text.push_back( c );
    if ( c == '\n' )
      ++line;
  }

  // Replaces a removed span: its newlines survive, a single-line span
  // becomes one space so that neighbouring tokens stay apart.
  void drop( std::string_view removed )
  {
    touched.insert( line );
    bool newline = false;
    for ( char c : removed )
    {
      if ( c == '\n' )
      {
        put( '\n' );
        touched.insert( line );
        newline = true;
      }
    }
    if ( !newline )
    {
      put( ' ' );
    }
  }
};

std::size_t skip_string( std::string_view s, std::size_t i )
{
  ++i;
  while ( i < s.size() && s[i] != '"' )
  {
    i += s[i] == '\\' ? 2 : 1;
  }
  return std::min( i + 1, s.size() );
}

bool is_ident_char( char c ) { return std::isalnum( static_cast<unsigned char>( c ) ) || c == '_'; }

std::size_t skip_space( std::string_view s, std::size_t i )
{
  while ( i < s.size() && std::isspace( static_cast<unsigned char>( s[i] ) ) )
    ++i;
  return i;
}

void remove_comments( std::string_view src, Edit& out )
{
  std::size_t i = 0;
  while ( i < src.size() )
  {
    if ( src[i] == '"' )
    {
      auto const end = skip_string( src, i );
      for ( ; i < end; ++i )
        out.put( src[i] );
    }
    else if ( src.substr( i, 2 ) == "//" )
    {
      auto end = src.find( '\n', i );
      end = end == std::string_view::npos ? src.size() : end;
      out.drop( src.substr( i, end - i ) );
      i = end;
    }
    else if ( src.substr( i, 2 ) == "/*" )
    {
      auto end = src.find( "*/", i + 2 );
      end = end == std::string_view::npos ? src.size() : end + 2;
      out.drop( src.substr( i, end - i ) );
      i = end;
    }
    else
    {
      out.put( src[i++] );
    }
  }
}

// Removes `TITLE: "..."`, `DESCRIPTION: "..."` and `TAGS: "..", ".."` inside
// the INFO block.
void remove_info_fields( std::string_view src, Edit& out )
{
  std::size_t i = 0;
  int info_depth = -1; // brace depth of the INFO block, -1 outside
  int depth = 0;
  while ( i < src.size() )
  {
    char const c = src[i];
    if ( c == '"' )
    {
      auto const end = skip_string( src, i );
      for ( ; i < end; ++i )
        out.put( src[i] );
      continue;
    }
    if ( c == '{' || c == '}' )
    {
      depth += c == '{' ? 1 : -1;
      if ( depth < info_depth )
        info_depth = -1;
      out.put( src[i++] );
      continue;
    }
    if ( !is_ident_char( c ) || ( i > 0 && is_ident_char( src[i - 1] ) ) )
    {
      out.put( src[i++] );
      continue;
    }
    std::size_t j = i;
    while ( j < src.size() && is_ident_char( src[j] ) )
      ++j;
    std::string_view const word = src.substr( i, j - i );
    if ( word == "INFO" && info_depth < 0 )
    {
      std::size_t const brace = skip_space( src, j );
      if ( brace < src.size() && src[brace] == '{' )
      {
        info_depth = depth + 1;
      }
    }
    else if ( info_depth == depth && ( word == "TITLE" || word == "DESCRIPTION" || word == "TAGS" ) )
    {
      std::size_t k = skip_space( src, j );
      if ( k < src.size() && src[k] == ':' )
      {
        k = skip_space( src, k + 1 );
        std::size_t end = k;
        while ( end < src.size() && src[end] == '"' )
        {
          end = skip_string( src, end );
          std::size_t const comma = skip_space( src, end );
          if ( word != "TAGS" || comma >= src.size() || src[comma] != ',' )
            break;
          end = skip_space( src, comma + 1 );
        }
        if ( end > k )
        {
          out.drop( src.substr( i, end - i ) );
          i = end;
          continue;
        }
      }
    }
    for ( ; i < j; ++i )
      out.put( src[i] );
  }
}

} // namespace

std::string strip_metadata( std::string_view text )
{
  Edit first;
  remove_comments( text, first );
  Edit second;
  remove_info_fields( first.text, second );

  std::set<std::size_t> touched = first.touched;
  touched.insert( second.touched.begin(), second.touched.end() );

  std::string out;
  std::size_t line = 0;
  std::size_t start = 0;
  std::string_view const s = second.text;
  while ( start <= s.size() )
  {
    auto end = s.find( '\n', start );
    bool const last = end == std::string_view::npos;
    end = last ? s.size() : end;
    std::string_view content = s.substr( start, end - start );
    bool keep = true;
    if ( touched.count( line ) )
    {
      while ( !content.empty() && std::isspace( static_cast<unsigned char>( content.back() ) ) )
        content.remove_suffix( 1 );
      keep = !content.empty();
    }
    if ( keep )
    {
      out += content;
      if ( !last )
        out += '\n';
    }
    if ( last )
      break;
    start = end + 1;
    ++line;
  }
  return out;
}

} // namespace natsyn::tlsf
