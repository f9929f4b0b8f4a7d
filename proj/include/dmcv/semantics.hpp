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

// Small-step execution of a validated network and the reachable
// configuration graph.

#ifndef DMCV_SEMANTICS_HPP
#define DMCV_SEMANTICS_HPP

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "dmcv/network.hpp"
#include "dmcv/quantum.hpp"

namespace dmcv::semantics {

using dmc::QubitSet;

/// Value of an undefined classical variable.
inline constexpr std::int8_t kUndefined = -1;

inline constexpr std::size_t kDefaultMaxStates = 10'000'000;

class StateBudgetExceeded : public std::runtime_error {
  public:
    explicit StateBudgetExceeded(std::size_t limit);
    std::size_t limit() const { return limit_; }

  private:
    std::size_t limit_;
};

class IllegalStep : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

struct AgentState {
    std::vector<std::int8_t> gamma;
    /// 0-based position of the next event.
    std::size_t eventIndex = 0;
    QubitSet owned = 0;
    QubitSet known = 0;

    bool operator==(const AgentState&) const = default;
};

/// A minimal factor of sigma: its qubits and the registry index of its
/// amplitudes, listed in ascending global qubit order.
struct Factor {
    QubitSet mask = 0;
    std::size_t state = 0;

    bool operator==(const Factor&) const = default;
};

struct Configuration {
    std::vector<AgentState> agents;
    /// Sorted by lowest qubit.
    std::vector<Factor> sigma;
    std::size_t step = 0;

    bool operator==(const Configuration&) const = default;

    const Factor& factorOf(std::size_t qubit) const;
};

enum class StepKind { Local, Classical, Quantum, Idle };

struct StepDescriptor {
    StepKind kind = StepKind::Idle;
    /// Acting agent; the sender for communication.
    std::size_t agent = 0;
    /// Receiver for communication.
    std::size_t peer = 0;
    /// Measurement outcome, or -1.
    int outcome = -1;

    bool operator==(const StepDescriptor&) const = default;
    auto operator<=>(const StepDescriptor&) const = default;
};

struct Edge {
    std::size_t from = 0;
    std::size_t to = 0;
    StepDescriptor step;
};

struct ConfigGraph {
    std::vector<Configuration> nodes;
    /// Grouped by source node, in descriptor order.
    std::vector<Edge> edges;
    /// edges[edgeBegin[n] .. edgeBegin[n+1]) leave node n.
    std::vector<std::size_t> edgeBegin;
    std::vector<std::size_t> initial;
    quantum::StateRegistry registry;

    std::size_t maxStep() const;
};

struct ExploreOptions {
    std::size_t maxStates = kDefaultMaxStates;
    /// When set, frontier and successor order are shuffled with this seed.
    std::optional<std::uint64_t> seed;
};

/// Execution context: the network plus the registry that holds factor states.
class Machine {
  public:
    Machine(const dmc::ValidatedNetwork& net, quantum::StateRegistry& registry) : net_(net), registry_(registry) {}

    std::vector<Configuration> initialConfigurations();
    std::vector<StepDescriptor> enabledSteps(const Configuration& c) const;
    Configuration applyStep(const Configuration& c, const StepDescriptor& d);

    /// Amplitudes of a factor with qubits named in ascending global order.
    quantum::PureStateVector factorState(const Factor& f) const;

  private:
    std::vector<Factor> internFactors(const quantum::PureStateVector& state);
    double angleFor(const AgentState& a, const dmc::step::Measure& m) const;

    const dmc::ValidatedNetwork& net_;
    quantum::StateRegistry& registry_;
};

/// Reachable configuration graph. Node numbering and registry names depend
/// only on the network, not on exploration order.
ConfigGraph explore(const dmc::ValidatedNetwork& net, const ExploreOptions& options = {});

std::string describeStep(const dmc::ValidatedNetwork& net, const Configuration& from, const StepDescriptor& d);

/// Concatenated defined signal bits of all agents, in agent and variable order.
std::string outcomeBits(const dmc::ValidatedNetwork& net, const Configuration& c);

/// Configuration ids grouped by agent-local view (gamma and event index).
std::vector<std::size_t> localClasses(const ConfigGraph& g, std::size_t agent);

void writeDot(std::ostream& out, const dmc::ValidatedNetwork& net, const ConfigGraph& g, bool epistemic = true);

/// Registry index of the single-qubit factor holding `qubit`, if any.
std::optional<std::size_t> qubitName(const Configuration& c, std::size_t qubit);

/// Atom truth on a configuration. Throws std::invalid_argument on unknown names.
bool evalAtom(const dmc::ValidatedNetwork& net, const ConfigGraph& g, const Configuration& c, const logic::Atom& atom);

}  // namespace dmcv::semantics

#endif  // DMCV_SEMANTICS_HPP
