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
#include <cstdio>
#include <fstream>
#include <sstream>

namespace natsyn::harness
{

namespace
{

std::string slurp( std::filesystem::path const& p )
{
  std::ifstream in( p, std::ios::binary );
  if ( !in )
    throw std::runtime_error( "cannot read " + p.string() );
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

} // namespace

std::string_view realizability_name( Realizability r )
{
  switch ( r )
  {
  case Realizability::Realizable:
    return "realizable";
  case Realizability::Unrealizable:
    return "unrealizable";
  case Realizability::Unknown:
    return "unknown";
  }
  return "unknown";
}

std::optional<Realizability> parse_realizability( std::string_view text )
{
  for ( auto r : { Realizability::Realizable, Realizability::Unrealizable, Realizability::Unknown } )
    if ( realizability_name( r ) == text )
      return r;
  return std::nullopt;
}

std::string family_key( tlsf::TlsfSpec const& spec )
{
  auto normalized = spec;
  for ( auto& p : normalized.parameters )
  {
    if ( p.expr && p.expr->kind == tlsf::SpecExpr::Kind::Int )
    {
      auto placeholder = std::make_shared<tlsf::SpecExpr>();
      placeholder->kind = tlsf::SpecExpr::Kind::Name;
      placeholder->name = "_";
      p.expr = placeholder;
    }
    p.value = 0;
  }
  return backend::content_hash( tlsf::render_tlsf( normalized ) );
}

std::map<std::string, std::vector<DatasetInstance const*>> Dataset::families() const
{
  std::map<std::string, std::vector<DatasetInstance const*>> all;
  for ( auto const& i : instances )
    if ( i.parameter_value )
      all[i.family].push_back( &i );
  std::map<std::string, std::vector<DatasetInstance const*>> out;
  for ( auto& [key, members] : all )
  {
    if ( members.size() < 2 )
      continue;
    std::sort( members.begin(), members.end(), []( auto const* a, auto const* b ) {
      return std::tie( *a->parameter_value, a->id ) < std::tie( *b->parameter_value, b->id );
    } );
    out.emplace( key, std::move( members ) );
  }
  return out;
}

DatasetInstance const* Dataset::find( std::string_view id ) const
{
  for ( auto const& i : instances )
    if ( i.id == id )
      return &i;
  return nullptr;
}

Dataset load_dataset( std::filesystem::path const& dir, std::optional<std::filesystem::path> metadata )
{
  Dataset ds;
  std::error_code ec;
  if ( !std::filesystem::is_directory( dir, ec ) )
  {
    ds.quarantined.push_back( { dir, "not a directory" } );
    return ds;
  }

  nlohmann::json meta = nlohmann::json::object();
  auto const meta_path = metadata.value_or( dir / "metadata.json" );
  if ( std::filesystem::exists( meta_path, ec ) )
  {
    try
    {
      meta = nlohmann::json::parse( slurp( meta_path ) );
      if ( !meta.is_object() )
        throw std::runtime_error( "metadata is not a JSON object" );
    }
    catch ( std::exception const& e )
    {
      ds.quarantined.push_back( { meta_path, std::string( "metadata ignored: " ) + e.what() } );
      meta = nlohmann::json::object();
    }
  }
  auto const meta_dir = meta_path.parent_path();

  std::vector<std::filesystem::path> files;
  for ( auto const& entry : std::filesystem::directory_iterator( dir, ec ) )
    if ( entry.is_regular_file() && entry.path().extension() == ".tlsf" )
      files.push_back( entry.path() );
  std::sort( files.begin(), files.end() );

  for ( auto const& file : files )
  {
    DatasetInstance inst;
    inst.id = file.stem().string();
    inst.spec_path = file;
    try
    {
      auto const spec = tlsf::parse_tlsf( tlsf::strip_metadata( slurp( file ) ) );
      tlsf::expand_semantics( tlsf::instantiate( spec ) );
      inst.family = family_key( spec );
      if ( !spec.parameters.empty() )
        inst.parameter_value = spec.parameters.front().value;
    }
    catch ( std::exception const& e )
    {
      ds.quarantined.push_back( { file, e.what() } );
      continue;
    }
    if ( auto const m = meta.find( inst.id ); m != meta.end() && m->is_object() )
    {
      if ( auto const r = m->find( "realizability" ); r != m->end() && r->is_string() )
      {
        auto const parsed = parse_realizability( r->get<std::string>() );
        if ( !parsed )
        {
          ds.quarantined.push_back( { file, "unknown realizability " + r->get<std::string>() } );
          continue;
        }
        inst.realizability = *parsed;
      }
      if ( auto const nl = m->find( "nl" ); nl != m->end() && nl->is_string() )
        inst.nl_path = meta_dir / nl->get<std::string>();
      if ( auto const gt = m->find( "ground_truth" ); gt != m->end() && gt->is_string() )
        inst.ground_truth_path = meta_dir / gt->get<std::string>();
    }
    ds.instances.push_back( std::move( inst ) );
  }
  return ds;
}

} // namespace natsyn::harness
