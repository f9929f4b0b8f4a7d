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

// End-to-end run: parse, validate, explore, assemble, crosscheck, check.

#ifndef DMCV_PIPELINE_HPP
#define DMCV_PIPELINE_HPP

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "dmcv/interpreted_system.hpp"
#include "dmcv/model_checker.hpp"
#include "dmcv/network.hpp"
#include "dmcv/semantics.hpp"

namespace dmcv::pipeline {

inline constexpr const char* kVersion = "0.1.0";
inline constexpr int kReportSchema = 1;

struct InputOverride {
    std::string qubit;
    std::vector<quantum::Amplitude> amplitudes;
};

struct Options {
    std::size_t maxStates = semantics::kDefaultMaxStates;
    std::optional<std::uint64_t> seed;
    bool crosscheck = true;
    std::vector<InputOverride> inputs;
};

struct Phase {
    std::string name;
    double seconds = 0.0;
};

/// Products of the compile phases.
struct Compiled {
    std::string digest;
    dmc::ValidatedNetwork net;
    semantics::ConfigGraph graph;
    is::Assembly assembly;
    std::vector<Phase> timing;
};

struct Checked {
    std::optional<is::CrosscheckReport> crosscheck;
    is::Reachable reachable;
    mc::StateGraph stateGraph;
    mc::VerificationReport verification;
    /// Configuration id of each reachable system state.
    std::vector<std::size_t> configurationOf;
    std::vector<Phase> timing;
};

/// Line endings to LF, trailing blanks stripped, exactly one final newline.
std::string normalizeSource(const std::string& source);

/// Lowercase hex SHA-256 of the normalized source.
std::string digest(const std::string& source);

/// Throws SyntaxError, ValidationError, UntranslatableAtom, StateBudgetExceeded
/// or std::invalid_argument for a bad override.
Compiled compile(const std::string& source, const Options& options);

Checked check(const Compiled& compiled, const Options& options);

/// Distinct tuples of agent-local states among the reachable system states.
std::size_t classicalStateCount(const is::Reachable& r);

/// Short label such as `C5^00` for a configuration.
std::string configurationLabel(const Compiled& c, std::size_t node);

/// JSON run report. Wall times live only under the top-level "timing" key.
std::string reportJson(const Compiled& c, const Checked& k, bool includeTiming = true);

/// Human readable verdict table with witnesses of failed formulas.
std::string reportTable(const Compiled& c, const Checked& k);

/// One line per configuration: label, classical stores, factor names.
std::string dumpStates(const Compiled& c);

}  // namespace dmcv::pipeline

#endif  // DMCV_PIPELINE_HPP
