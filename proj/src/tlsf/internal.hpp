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

#include <natsyn/tlsf.hpp>

namespace natsyn::tlsf::detail
{

/// Parses one expression spanning the whole input; no identifier checks.
ExprPtr parse_standalone_expression( std::string_view text );

/// Integer arithmetic for + - * /; overflow and division by zero throw
/// EvaluationError.
std::int64_t checked_arith( std::string_view op, std::int64_t a, std::int64_t b, SourceSpan at );

/// Binding strength used by both the parser and the renderer.
enum Level : int
{
  LevelIff = 1,
  LevelImplies,
  LevelOr,
  LevelAnd,
  LevelTemporal,
  LevelUnary,
  LevelCompare,
  LevelAdd,
  LevelMul,
  LevelNeg,
  LevelPrimary,
};

int level_of( SpecExpr const& e );

} // namespace natsyn::tlsf::detail
