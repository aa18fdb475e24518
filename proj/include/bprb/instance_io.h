// Copyright 2026 the bprb Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef BPRB_INSTANCE_IO_H_
#define BPRB_INSTANCE_IO_H_

#include <string>
#include <string_view>

#include "bprb/mip.h"

namespace bprb {

// Canonical text format:
//
//   bpmip 1 <name> <min|max> <n_vars> <n_cons>
//   var <idx> bin | var <idx> int <lb> <ub> | var <idx> cont <lb> <ub>
//   const <value>                      (optional, objective constant)
//   obj <idx> <coef>                   (one per nonzero)
//   row <idx> <rhs>
//   e <var> <coef>                     (entries of the preceding row)
//
// Objective coefficients are written in the original sense of the problem;
// maximization instances are negated on parse. Numbers are written in their
// shortest round-trip decimal form so parse(serialize(x)) == x exactly.
// Blank lines and lines starting with '#' are ignored.
MipInstance ParseInstance(std::string_view text);
std::string SerializeInstance(const MipInstance& instance);

// Minimal MPS subset: NAME, OBJSENSE (MIN/MAX), ROWS (N/L/G/E), COLUMNS with
// INTORG/INTEND markers, RHS, BOUNDS (UP/LO/FX/BV) and ENDATA. Fields are
// whitespace separated, which also accepts fixed-format files whose names
// contain no blanks. Integer columns without bounds are binary; columns
// outside integer markers are continuous with bounds [0, +inf).
MipInstance ParseMps(std::string_view text);
std::string WriteMps(const MipInstance& instance);

MipInstance ReadInstanceFile(const std::string& path);
void WriteInstanceFile(const MipInstance& instance, const std::string& path);

// Shortest decimal representation that parses back to exactly `value`.
std::string FormatDouble(double value);

}  // namespace bprb

#endif  // BPRB_INSTANCE_IO_H_
