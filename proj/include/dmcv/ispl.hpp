// Copyright 2026 The dmcv Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// ISPL output and a reader for the subset it produces.

#ifndef DMCV_ISPL_HPP
#define DMCV_ISPL_HPP

#include <stdexcept>
#include <string>

#include "dmcv/interpreted_system.hpp"

namespace dmcv::ispl {

class DomainTooLarge : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

class ParseError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

struct EmitOptions {
    std::size_t maxDomain = 4096;
};

/// Sections in order: Environment, agents, Evaluation, InitStates, Groups, Formulae.
std::string emit(const is::InterpretedSystem& is, const EmitOptions& options = {});

/// Reads text produced by emit. Proposition atoms are not recoverable and
/// come back as NamedProp.
is::InterpretedSystem parse(const std::string& text);

/// Equality up to what ISPL can express: proposition atoms are ignored and
/// `othersWait` only counts when some agent is left unnamed.
bool structurallyEqual(const is::InterpretedSystem& a, const is::InterpretedSystem& b);

/// Formula in the target checker's syntax.
std::string formulaText(const logic::Formula& f);

}  // namespace dmcv::ispl

#endif  // DMCV_ISPL_HPP
