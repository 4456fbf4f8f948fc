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

#include <natsyn/harness.hpp>

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <set>
#include <sstream>
#include <tuple>

namespace natsyn::harness
{

namespace
{

using Group = std::tuple<std::string, std::string, std::string, unsigned>; // workflow, backend, level, budget

double mean( std::vector<double> const& xs )
{
  if ( xs.empty() )
    return 0.0;
  double s = 0.0;
  for ( auto x : xs )
    s += x;
  return s / static_cast<double>( xs.size() );
}

double sample_std( std::vector<double> const& xs )
{
  if ( xs.size() < 2 )
    return 0.0;
  auto const m = mean( xs );
  double s = 0.0;
  for ( auto x : xs )
    s += ( x - m ) * ( x - m );
  return std::sqrt( s / static_cast<double>( xs.size() - 1 ) );
}

/// Integers print bare; other values with two decimals.
/// Display width of UTF-8 text: continuation bytes take no column.
std::size_t columns( std::string const& text )
{
  return static_cast<std::size_t>(
      std::count_if( text.begin(), text.end(), []( char c ) { return ( static_cast<unsigned char>( c ) & 0xC0 ) != 0x80; } ) );
}

std::string num( double x )
{
  char buf[64];
  if ( std::abs( x - std::round( x ) ) < 1e-9 )
    std::snprintf( buf, sizeof buf, "%.0f", std::round( x ) );
  else
    std::snprintf( buf, sizeof buf, "%.2f", x );
  return buf;
}

std::string with_std( double m, double s, std::size_t runs )
{
  return runs > 1 ? num( m ) + " ± " + num( s ) : num( m );
}

std::string target_verdict( LedgerRecord const& r, char const* field )
{
  try
  {
    auto const j = nlohmann::json::parse( r.extra.empty() ? "{}" : r.extra );
    return j.value( field, std::string{} );
  }
  catch ( nlohmann::json::exception const& )
  {
    return {};
  }
}

std::string one_line( std::string text )
{
  for ( auto& c : text )
    if ( c == '\n' || c == '\t' || c == '\r' )
      c = ' ';
  return text;
}

} // namespace

std::vector<LedgerRecord> latest( std::vector<LedgerRecord> const& records )
{
  std::map<std::string, LedgerRecord> by_key;
  for ( auto const& r : records )
    by_key[r.key()] = r;
  std::vector<LedgerRecord> out;
  out.reserve( by_key.size() );
  for ( auto& [_, r] : by_key )
    out.push_back( std::move( r ) );
  return out;
}

Report summarize( std::vector<LedgerRecord> const& records )
{
  auto const rows = latest( records );
  // group -> run -> records
  std::map<Group, std::map<unsigned, std::vector<LedgerRecord const*>>> groups;
  for ( auto const& r : rows )
    groups[{ r.workflow, r.backend, r.level, r.budget }][r.run].push_back( &r );

  Report report;
  for ( auto const& [group, runs] : groups )
  {
    auto const& [workflow, backend_id, level, budget] = group;
    std::size_t total = 0;
    for ( auto const& [_, rs] : runs )
      total = std::max( total, rs.size() );
    bool const natural = workflow == "natural-auto" || workflow == "natural-direct";

    for ( unsigned k = 0; k <= budget; ++k )
    {
      SolvedRow row;
      row.workflow = workflow;
      row.backend = backend_id;
      row.level = level;
      row.budget = budget;
      row.cex = k;
      row.runs = runs.size();
      row.total = total;
      std::vector<double> solved;
      std::map<std::string, std::vector<double>> by_class;
      std::map<std::string, std::size_t> class_total;
      std::map<std::string, std::vector<double>> by_target;
      for ( auto const& [_, rs] : runs )
      {
        double s = 0;
        std::map<std::string, double> cls;
        std::map<std::string, std::size_t> cls_total;
        double gt = 0, af = 0;
        for ( auto const* r : rs )
        {
          bool const ok = r->status == "solved" && r->iterations_used <= k;
          s += ok;
          cls[r->realizability] += ok;
          ++cls_total[r->realizability];
          gt += target_verdict( *r, "against_ground_truth" ) == "pass";
          af += target_verdict( *r, "against_autoformalized" ) == "pass";
        }
        solved.push_back( s );
        for ( auto const& name : { "realizable", "unrealizable", "unknown" } )
        {
          by_class[name].push_back( cls[name] );
          class_total[name] = std::max( class_total[name], cls_total[name] );
        }
        by_target["ground-truth"].push_back( gt );
        by_target["autoformalized"].push_back( af );
      }
      row.solved_mean = mean( solved );
      row.solved_std = sample_std( solved );
      for ( auto const& [name, xs] : by_class )
        row.by_realizability[name] = { mean( xs ), class_total[name] };
      if ( natural && k == budget )
        for ( auto const& [name, xs] : by_target )
          row.by_target[name] = mean( xs );
      report.solved.push_back( std::move( row ) );
    }

    TokenRow tr;
    tr.workflow = workflow;
    tr.backend = backend_id;
    tr.level = level;
    tr.budget = budget;
    tr.total = total;
    std::vector<double> tokens;
    std::vector<double> solved;
    for ( auto const& [_, rs] : runs )
    {
      double s = 0;
      for ( auto const* r : rs )
      {
        tokens.push_back( static_cast<double>( r->reasoning_tokens ) );
        s += r->status == "solved";
      }
      solved.push_back( s );
    }
    tr.reasoning_mean = mean( tokens );
    tr.reasoning_std = sample_std( tokens );
    tr.solved_mean = mean( solved );
    report.tokens.push_back( std::move( tr ) );
  }
  return report;
}

std::string render_table( Report const& r )
{
  std::vector<std::vector<std::string>> cells{
      { "workflow", "backend", "level", "budget", "cex", "solved", "realizable", "unrealizable", "unknown", "targets" } };
  for ( auto const& row : r.solved )
  {
    auto cls = [&]( char const* name ) {
      auto const it = row.by_realizability.find( name );
      if ( it == row.by_realizability.end() || it->second.second == 0 )
        return std::string( "-" );
      return num( it->second.first ) + "/" + std::to_string( it->second.second );
    };
    std::string targets = "-";
    if ( !row.by_target.empty() )
      targets = "ground-truth " + num( row.by_target.at( "ground-truth" ) ) + ", autoformalized " +
                num( row.by_target.at( "autoformalized" ) );
    cells.push_back( { row.workflow, row.backend, row.level, std::to_string( row.budget ), std::to_string( row.cex ),
                       with_std( row.solved_mean, row.solved_std, row.runs ) + "/" + std::to_string( row.total ),
                       cls( "realizable" ), cls( "unrealizable" ), cls( "unknown" ), targets } );
  }
  std::vector<std::size_t> width( cells[0].size(), 0 );
  for ( auto const& line : cells )
    for ( std::size_t c = 0; c < line.size(); ++c )
      width[c] = std::max( width[c], columns( line[c] ) );
  std::ostringstream out;
  for ( auto const& line : cells )
  {
    std::string text;
    for ( std::size_t c = 0; c < line.size(); ++c )
    {
      text += line[c];
      if ( c + 1 < line.size() )
        text += std::string( width[c] - columns( line[c] ) + 2, ' ' );
    }
    out << text << '\n';
  }
  return out.str();
}

std::string render_token_csv( Report const& r )
{
  std::ostringstream out;
  out << "workflow,backend,level,budget,avg_reasoning_tokens,std_reasoning_tokens,solved,total\n";
  for ( auto const& t : r.tokens )
    out << t.workflow << ',' << t.backend << ',' << t.level << ',' << t.budget << ',' << num( t.reasoning_mean )
        << ',' << num( t.reasoning_std ) << ',' << num( t.solved_mean ) << ',' << t.total << '\n';
  return out.str();
}

std::string render_audit( std::vector<LedgerRecord> const& records )
{
  std::ostringstream out;
  out << "instance\tworkflow\tbackend\tlevel\tbudget\trun\trealizability\tstatus\trole\titerations\t"
         "reasoning_tokens\toutput_tokens\tdetail\n";
  for ( auto const& r : latest( records ) )
    out << r.instance << '\t' << r.workflow << '\t' << r.backend << '\t' << r.level << '\t' << r.budget << '\t'
        << r.run << '\t' << r.realizability << '\t' << r.status << '\t' << ( r.role.empty() ? "-" : r.role ) << '\t'
        << r.iterations_used << '\t' << r.reasoning_tokens << '\t' << r.output_tokens << '\t'
        << ( r.error_stage.empty() ? std::string( "-" ) : one_line( r.error_stage + ": " + r.detail ) ) << '\n';
  return out.str();
}

} // namespace natsyn::harness
