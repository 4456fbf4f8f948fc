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

#include <natsyn/backend.hpp>
#include <natsyn/tlsf.hpp>

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <map>
#include <set>
#include <utility>

namespace natsyn::backend
{

namespace detail
{
extern std::pair<std::string_view, std::string_view> const prompt_table[];
}

namespace
{

bool blank( std::string_view text )
{
  return std::all_of( text.begin(), text.end(), []( unsigned char c ) { return std::isspace( c ); } );
}

void require_text( std::string_view text, char const* what )
{
  if ( blank( text ) )
    throw EmptyInput( std::string( what ) + " is empty" );
}

bool placeholder_char( char c )
{
  return ( c >= 'a' && c <= 'z' ) || c == '_';
}

/// Single pass; substituted text is never rescanned. Every placeholder in the
/// template must be bound and every binding must be used.
std::string fill( std::string_view tmpl, std::map<std::string_view, std::string_view> const& values )
{
  std::string out;
  std::set<std::string_view> used;
  std::size_t i = 0;
  while ( i < tmpl.size() )
  {
    if ( tmpl[i] == '{' )
    {
      auto j = i + 1;
      while ( j < tmpl.size() && placeholder_char( tmpl[j] ) )
        ++j;
      if ( j < tmpl.size() && tmpl[j] == '}' && j > i + 1 )
      {
        auto const name = tmpl.substr( i + 1, j - i - 1 );
        auto const it = values.find( name );
        if ( it == values.end() )
          throw std::logic_error( "unbound prompt placeholder {" + std::string( name ) + "}" );
        out += it->second;
        used.insert( name );
        i = j + 1;
        continue;
      }
    }
    out += tmpl[i++];
  }
  for ( auto const& [name, _] : values )
    if ( !used.count( name ) )
      throw std::logic_error( "prompt template lacks placeholder {" + std::string( name ) + "}" );
  return out;
}

PromptBundle bundle( PromptKind kind, std::string text, std::string_view template_id, std::string_view hashed,
                     unsigned attempt )
{
  return { kind, std::move( text ), std::string( template_id ), content_hash( hashed ), attempt };
}

std::string_view const param_bullet_prefix = "- When the TLSF specification contains a PARAMETERS subsection";

/// Synthesis template with the parameter bullet replaced.
std::string param_template( std::string const& header )
{
  auto const base = prompt_template( "synthesis" );
  auto const at = base.find( param_bullet_prefix );
  if ( at == std::string_view::npos )
    throw std::logic_error( "synthesis template lacks the parameter bullet" );
  auto const end = base.find( '\n', at );
  auto rule = std::string( prompt_template( "param-rule" ) );
  while ( !rule.empty() && rule.back() == '\n' )
    rule.pop_back();
  auto const filled = fill( rule, { { "parameter_header", header } } );
  return std::string( base.substr( 0, at ) ) + filled + std::string( base.substr( end ) );
}

std::string parameter_header( std::vector<tlsf::Parameter> const& params )
{
  std::string out = "module solution #(\n";
  for ( std::size_t i = 0; i < params.size(); ++i )
  {
    out += "    parameter " + params[i].name + " = " + std::to_string( params[i].value );
    out += i + 1 < params.size() ? ",\n" : "\n";
  }
  return out + ")";
}

std::string param_prompt_text( std::string_view spec_text )
{
  auto const spec = tlsf::parse_tlsf( spec_text );
  if ( spec.parameters.empty() )
    throw NoParameters( "the specification declares no parameters" );
  return fill( param_template( parameter_header( spec.parameters ) ), { { "specification", spec_text } } );
}

/// The bullet lines of the synthesis template.
std::string guidelines()
{
  auto const base = prompt_template( "synthesis" );
  std::string out = "Follow these guidelines:\n\n";
  std::size_t pos = 0;
  while ( pos < base.size() )
  {
    auto end = base.find( '\n', pos );
    if ( end == std::string_view::npos )
      end = base.size();
    auto const line = base.substr( pos, end - pos );
    if ( line.starts_with( "- " ) )
      out += std::string( line ) + "\n";
    pos = end + 1;
  }
  return out;
}

} // namespace

std::string_view kind_name( PromptKind k )
{
  switch ( k )
  {
  case PromptKind::Synthesis:
    return "synthesis";
  case PromptKind::Repair:
    return "repair";
  case PromptKind::ParamSynthesis:
    return "param-synthesis";
  case PromptKind::Autoformalize:
    return "autoformalize";
  case PromptKind::AutoformalizeRepair:
    return "autoformalize-repair";
  case PromptKind::DirectNL:
    return "direct-nl";
  }
  return "unknown";
}

std::string content_hash( std::string_view text )
{
  std::uint64_t h = 0xcbf29ce484222325ull;
  for ( unsigned char c : text )
  {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  char buf[17];
  std::snprintf( buf, sizeof buf, "%016llx", static_cast<unsigned long long>( h ) );
  return buf;
}

std::string_view prompt_template( std::string_view id )
{
  for ( auto const* e = detail::prompt_table; !e->first.empty(); ++e )
    if ( e->first == id )
      return e->second;
  throw std::invalid_argument( "unknown prompt template " + std::string( id ) );
}

PromptBundle build_synthesis_prompt( std::string_view spec_text, unsigned attempt )
{
  require_text( spec_text, "specification" );
  return bundle( PromptKind::Synthesis, fill( prompt_template( "synthesis" ), { { "specification", spec_text } } ),
                 "synthesis", spec_text, attempt );
}

PromptBundle build_repair_prompt( std::string_view spec_text, verilog::VerilogModule const& module,
                                  std::string_view feedback, unsigned attempt, RepairBase base )
{
  require_text( spec_text, "specification" );
  require_text( feedback, "feedback" );
  std::string base_text;
  switch ( base )
  {
  case RepairBase::Synthesis:
    base_text = fill( prompt_template( "synthesis" ), { { "specification", spec_text } } );
    break;
  case RepairBase::Parameterized:
    base_text = param_prompt_text( spec_text );
    break;
  case RepairBase::DirectNL:
    base_text = fill( prompt_template( "direct-nl" ), { { "guidelines", guidelines() }, { "description", spec_text } } );
    break;
  }
  auto module_text = module.source;
  while ( !module_text.empty() && module_text.back() == '\n' )
    module_text.pop_back();
  auto text = fill( prompt_template( "repair" ),
                    { { "base_prompt", base_text }, { "module", module_text }, { "feedback", feedback } } );
  return bundle( PromptKind::Repair, std::move( text ), "repair", spec_text, attempt );
}

PromptBundle build_param_prompt( std::string_view spec_text, unsigned attempt )
{
  require_text( spec_text, "specification" );
  return bundle( PromptKind::ParamSynthesis, param_prompt_text( spec_text ), "synthesis+param-rule", spec_text,
                 attempt );
}

PromptBundle build_autoformalization_prompt( std::string_view nl_text, unsigned attempt )
{
  require_text( nl_text, "description" );
  auto text = fill( prompt_template( "autoformalize" ),
                    { { "grammar", tlsf::grammar_reference() }, { "description", nl_text } } );
  return bundle( PromptKind::Autoformalize, std::move( text ), "autoformalize", nl_text, attempt );
}

PromptBundle build_autoformalization_repair_prompt( std::string_view nl_text, std::string_view previous,
                                                    std::string_view diagnostic, unsigned attempt )
{
  require_text( nl_text, "description" );
  require_text( diagnostic, "diagnostic" );
  auto const base = fill( prompt_template( "autoformalize" ),
                          { { "grammar", tlsf::grammar_reference() }, { "description", nl_text } } );
  auto text = fill( prompt_template( "autoformalize-repair" ),
                    { { "base_prompt", base }, { "previous", previous }, { "diagnostic", diagnostic } } );
  return bundle( PromptKind::AutoformalizeRepair, std::move( text ), "autoformalize-repair", nl_text, attempt );
}

PromptBundle build_directnl_prompt( std::string_view nl_text, unsigned attempt )
{
  require_text( nl_text, "description" );
  auto text = fill( prompt_template( "direct-nl" ), { { "guidelines", guidelines() }, { "description", nl_text } } );
  return bundle( PromptKind::DirectNL, std::move( text ), "direct-nl", nl_text, attempt );
}

std::string_view level_name( ReasoningLevel l )
{
  switch ( l )
  {
  case ReasoningLevel::None:
    return "none";
  case ReasoningLevel::Low:
    return "low";
  case ReasoningLevel::Medium:
    return "medium";
  case ReasoningLevel::High:
    return "high";
  case ReasoningLevel::XHigh:
    return "xhigh";
  }
  return "unknown";
}

std::optional<ReasoningLevel> parse_level( std::string_view text )
{
  for ( auto l : { ReasoningLevel::None, ReasoningLevel::Low, ReasoningLevel::Medium, ReasoningLevel::High,
                   ReasoningLevel::XHigh } )
    if ( level_name( l ) == text )
      return l;
  return std::nullopt;
}

} // namespace natsyn::backend
