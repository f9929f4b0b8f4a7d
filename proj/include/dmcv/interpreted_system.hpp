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

// Interpreted systems and the translation of configuration graphs into them.

#ifndef DMCV_INTERPRETED_SYSTEM_HPP
#define DMCV_INTERPRETED_SYSTEM_HPP

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "dmcv/formula.hpp"
#include "dmcv/network.hpp"
#include "dmcv/semantics.hpp"

namespace dmcv::is {

/// Encoded value of ⊥ in every domain that has it.
inline constexpr int kUndef = -1;

enum class VarKind {
    Bit,         // {0, 1}
    BitOrUndef,  // {0, 1, ⊥}
    Name,        // registry indexes in `names`, plus ⊥
    Int,         // lo..hi
};

struct Var {
    std::string name;
    VarKind kind = VarKind::Int;
    int lo = 0;
    int hi = 0;
    std::vector<int> names;

    std::vector<int> values() const;
    bool operator==(const Var&) const = default;
};

struct Test {
    std::size_t var = 0;
    int value = 0;
    bool operator==(const Test&) const = default;
    auto operator<=>(const Test&) const = default;
};

/// Conjunction of equality tests on one template's variables.
using Conjunction = std::vector<Test>;

struct ProtocolLine {
    Conjunction guard;
    std::vector<std::string> actions;
    bool operator==(const ProtocolLine&) const = default;
};

/// Owner index of the environment in action conditions and global tests.
inline constexpr std::size_t kEnvironment = SIZE_MAX;

/// `owner.Action` must be one of `allowed`.
struct ActionCond {
    std::size_t owner = 0;
    std::vector<std::string> allowed;
    bool operator==(const ActionCond&) const = default;
    auto operator<=>(const ActionCond&) const = default;
};

enum class AssignOp { Set, Increment };

struct Assignment {
    std::size_t var = 0;
    AssignOp op = AssignOp::Set;
    int value = 0;
    bool operator==(const Assignment&) const = default;
    auto operator<=>(const Assignment&) const = default;
};

struct EvolutionLine {
    Conjunction guard;
    std::vector<ActionCond> actions;
    /// Every agent not named in `actions` takes `wait`.
    bool othersWait = false;
    std::vector<Assignment> assign;
    bool operator==(const EvolutionLine&) const = default;
    auto operator<=>(const EvolutionLine&) const = default;
};

struct Template {
    std::string name;
    std::vector<Var> vars;
    std::vector<std::string> actions;
    std::vector<ProtocolLine> protocol;
    /// Actions enabled when no protocol line applies.
    std::vector<std::string> otherwise;
    std::vector<EvolutionLine> evolution;

    std::optional<std::size_t> varIndex(const std::string& name) const;
    bool operator==(const Template&) const = default;
};

using LocalState = std::vector<int>;

struct GlobalState {
    LocalState env;
    std::vector<LocalState> agents;
    bool operator==(const GlobalState&) const = default;
    auto operator<=>(const GlobalState&) const = default;
};

struct GlobalTest {
    std::size_t owner = kEnvironment;
    std::size_t var = 0;
    int value = 0;
    bool operator==(const GlobalTest&) const = default;
};

/// Named proposition defined as a disjunction of conjunctions.
struct Prop {
    std::string name;
    logic::Atom atom;
    std::vector<std::vector<GlobalTest>> dnf;
};

struct Group {
    std::string name;
    std::vector<std::size_t> members;
    bool operator==(const Group&) const = default;
};

struct InterpretedSystem {
    std::string name;
    Template environment;
    std::vector<Template> agents;
    std::vector<GlobalState> initial;
    std::vector<Prop> props;
    std::vector<Group> groups;
    /// Network formulas with atoms replaced by NamedProp references.
    std::vector<logic::FormulaPtr> formulas;
    /// Registry names indexed by registry index.
    std::vector<std::string> stateNames;

    const Template& owner(std::size_t index) const { return index == kEnvironment ? environment : agents.at(index); }
    std::optional<std::size_t> agentIndex(const std::string& name) const;
    std::optional<std::size_t> groupIndex(const std::string& name) const;
    const Prop* prop(const std::string& name) const;
};

class UntranslatableAtom : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Literal text of `value` in `var`'s domain: b0, b1, undef, qsN or an integer.
std::string literal(const InterpretedSystem& is, const Var& var, int value);

// ---------------------------------------------------------------------------
// Construction

/// Variable positions shared by the fragment builders.
struct Layout {
    struct AgentVars {
        std::vector<std::size_t> classical;  // network var index -> template var
        std::vector<std::size_t> flag;       // qubit index -> template var
        std::size_t pc = 0;
    };
    std::vector<AgentVars> agents;
    std::vector<std::size_t> qubit;  // qubit index -> environment var
    std::vector<std::size_t> init;   // qubit index -> environment var
    std::map<dmc::QubitSet, std::size_t> factor;  // factor mask -> environment var
    std::size_t gc = 0;
};

/// Lines added to one template.
struct Fragment {
    std::size_t owner = kEnvironment;
    std::vector<std::string> actions;
    std::vector<ProtocolLine> protocol;
    std::vector<EvolutionLine> evolution;
};

/// One measurement mode: a qubit measured at an effective angle.
struct MeasureMode {
    std::size_t qubit = 0;
    double angle = 0.0;
};

/// Forced outcomes of environment states: which mode yields which bit with
/// certainty. Each distinct fact set gets an environment action.
struct ForcedTable {
    std::vector<MeasureMode> modes;
    /// Environment action name -> facts (mode index, outcome bit).
    std::vector<std::pair<std::string, std::vector<std::pair<std::size_t, int>>>> signatures;

    std::optional<std::size_t> modeIndex(std::size_t qubit, double angle) const;
    /// Environment actions that force `mode` to `bit`.
    std::vector<std::string> forcing(std::size_t mode, int bit) const;
    /// Environment actions, `none` included, that force nothing for `mode`.
    std::vector<std::string> free(std::size_t mode) const;
};

std::string angleTag(double radians);
std::string measureAction(const dmc::ValidatedNetwork& net, const dmc::step::Measure& m, std::optional<int> s,
                          std::optional<int> t, int outcome);

std::vector<Fragment> buildClassicalComm(const dmc::ValidatedNetwork& net, const Layout& layout, std::size_t sender,
                                         std::size_t receiver, std::size_t sendIndex, std::size_t recvIndex);
std::vector<Fragment> buildQuantumComm(const dmc::ValidatedNetwork& net, const Layout& layout, std::size_t sender,
                                       std::size_t receiver, std::size_t sendIndex, std::size_t recvIndex);
/// Agent fragment plus the environment's `skip` bookkeeping line.
std::vector<Fragment> buildCorrection(const dmc::ValidatedNetwork& net, const Layout& layout, std::size_t agent,
                                      std::size_t eventIndex);
Fragment buildEntangle(const dmc::ValidatedNetwork& net, const Layout& layout, std::size_t agent,
                       std::size_t eventIndex);
Fragment buildMeasurement(const dmc::ValidatedNetwork& net, const Layout& layout, const ForcedTable& forced,
                          std::size_t agent, std::size_t eventIndex);

/// Environment line for one quantum step of the configuration graph.
EvolutionLine buildEnvironmentStep(const dmc::ValidatedNetwork& net, const Layout& layout,
                                   const semantics::Configuration& from, const semantics::Configuration& to,
                                   std::vector<ActionCond> actions, dmc::QubitSet touched);

/// The translation f of a configuration into a global state.
GlobalState translate(const dmc::ValidatedNetwork& net, const Layout& layout, const InterpretedSystem& is,
                      const semantics::ConfigGraph& graph, const semantics::Configuration& c);

struct Assembly {
    InterpretedSystem system;
    Layout layout;
    ForcedTable forced;
};

/// Full translation. Throws UntranslatableAtom for formulas naming unknown
/// agents, groups, variables or qubits.
Assembly assemble(const dmc::ValidatedNetwork& net, const semantics::ConfigGraph& graph);

/// Lowers one atom to a disjunction of global tests.
Prop lowerAtom(const dmc::ValidatedNetwork& net, const Assembly& assembly, const semantics::ConfigGraph& graph,
               const logic::Atom& atom, std::string name);

// ---------------------------------------------------------------------------
// Execution

bool holds(const Conjunction& guard, const LocalState& local);
bool holds(const Prop& prop, const GlobalState& s);

/// Enabled action sets: environment first, then agents.
std::vector<std::vector<std::string>> enabledActions(const InterpretedSystem& is, const GlobalState& s);

struct JointAction {
    std::string env;
    std::vector<std::string> agents;
    bool operator==(const JointAction&) const = default;
};

class EvolutionConflict : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Successor for one joint action, or nullopt when no evolution line fires.
std::optional<GlobalState> apply(const InterpretedSystem& is, const GlobalState& s, const JointAction& a);

/// Distinct successors of `s`; a state with none gets itself.
std::vector<GlobalState> successors(const InterpretedSystem& is, const GlobalState& s);

/// Reachable part of an interpreted system.
struct Reachable {
    std::vector<GlobalState> states;
    std::vector<std::vector<std::size_t>> successors;
    std::vector<std::size_t> initial;
};

/// Breadth-first closure from the initial states. Throws StateBudgetExceeded.
Reachable reachable(const InterpretedSystem& is, std::size_t maxStates = semantics::kDefaultMaxStates);

/// Human readable `Agent.var=value` listing.
std::string describe(const InterpretedSystem& is, const GlobalState& s);

/// Full system as JSON with stable key order.
std::string toJson(const InterpretedSystem& is);

// ---------------------------------------------------------------------------
// Translation check

struct CrosscheckReport {
    bool isomorphic = false;
    bool partitionsMatch = false;
    bool atomsAgree = false;
    std::size_t configurations = 0;
    std::size_t systemStates = 0;
    std::size_t atomsChecked = 0;
    std::vector<std::string> mismatches;

    bool ok() const { return isomorphic && partitionsMatch && atomsAgree; }
};

/// Compares the configuration graph against the reachable part of `is`.
CrosscheckReport crosscheck(const dmc::ValidatedNetwork& net, const semantics::ConfigGraph& graph,
                            const Assembly& assembly, std::size_t maxStates = semantics::kDefaultMaxStates);

}  // namespace dmcv::is

#endif  // DMCV_INTERPRETED_SYSTEM_HPP
