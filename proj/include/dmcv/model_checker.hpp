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

// Explicit-state CTLK model checking by bit-set labeling.

#ifndef DMCV_MODEL_CHECKER_HPP
#define DMCV_MODEL_CHECKER_HPP

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "dmcv/formula.hpp"
#include "dmcv/interpreted_system.hpp"
#include "dmcv/semantics.hpp"

namespace dmcv::mc {

using StateSet = std::vector<bool>;

/// Finite Kripke structure with per-agent indistinguishability classes.
struct StateGraph {
    std::vector<std::vector<std::size_t>> successors;
    std::vector<std::size_t> initial;
    std::vector<std::string> agents;
    /// localClass[agent][state]: equal ids iff equal local projections.
    std::vector<std::vector<std::size_t>> localClass;
    std::map<std::string, std::vector<std::size_t>> groups;
    /// Labels of named propositions.
    std::map<std::string, StateSet> labels;
    /// Labels for unnamed atoms; may be empty.
    std::function<StateSet(const logic::Atom&)> atomLabeler;
    /// Printable form of a state; may be empty.
    std::function<std::string(std::size_t)> describe;

    std::size_t size() const { return successors.size(); }
    std::optional<std::size_t> agentIndex(const std::string& name) const;
};

/// Reachable global states of `is`, one label per proposition.
StateGraph buildStateGraph(const is::InterpretedSystem& is, std::size_t maxStates = semantics::kDefaultMaxStates);
StateGraph buildStateGraph(const is::InterpretedSystem& is, is::Reachable reachable);

/// Same structure read directly off a configuration graph.
StateGraph fromConfigGraph(const dmc::ValidatedNetwork& net, const semantics::ConfigGraph& graph);

class UnknownName : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Evidence for a verdict: a path from an initial state, optionally closing
/// into a loop, and optionally a pair of indistinguishable states.
struct Witness {
    std::vector<std::size_t> path;
    /// Index into `path` where the loop re-enters; the last state steps there.
    std::optional<std::size_t> loopStart;
    std::optional<std::pair<std::size_t, std::size_t>> pair;
    /// Agent or group whose relation relates `pair`.
    std::string relation;

    bool empty() const { return path.empty() && !pair; }
};

struct FormulaResult {
    std::string formula;
    bool verdict = false;
    std::size_t satisfyingStates = 0;
    std::optional<Witness> witness;
    double seconds = 0.0;
};

class Checker {
  public:
    explicit Checker(const StateGraph& graph);

    /// States satisfying `f`. Throws UnknownName for agents, groups or
    /// propositions missing from the graph.
    const StateSet& sat(const logic::Formula& f);

    FormulaResult check(const logic::FormulaPtr& f);

    /// Shortest witness explaining why `f` fails (wanted == false) or holds
    /// (wanted == true) at `state`, when one exists.
    std::optional<Witness> explain(const logic::Formula& f, std::size_t state, bool wanted);

  private:
    StateSet compute(const logic::Formula& f);
    StateSet pre(const StateSet& s) const;
    StateSet until(const StateSet& a, const StateSet& b) const;
    StateSet globally(const StateSet& a) const;
    StateSet knows(const std::vector<std::size_t>& classOf, const StateSet& s) const;
    const std::vector<std::size_t>& classesOf(const std::string& who, logic::Op op);
    std::vector<std::size_t> members(const std::string& group) const;

    std::optional<std::vector<std::size_t>> pathTo(std::size_t from, const StateSet& through,
                                                   const StateSet& target) const;
    Witness lasso(std::size_t from, const StateSet& inside) const;
    std::optional<std::size_t> partner(const std::vector<std::size_t>& classOf, std::size_t s, const StateSet& want,
                                       bool preferDistinct) const;

    const StateGraph& g_;
    std::vector<std::vector<std::size_t>> preds_;
    /// Keyed by formula text.
    std::map<std::string, StateSet> cache_;
    std::map<std::string, std::vector<std::size_t>> distributed_;
};

struct VerificationReport {
    std::vector<FormulaResult> results;
    bool allTrue() const;
};

VerificationReport checkAll(const StateGraph& graph, const std::vector<logic::FormulaPtr>& formulas);

/// `s0 -> s1 -> ... (loop to sK)` plus the pair, one line per state.
std::string formatWitness(const StateGraph& graph, const Witness& w);

}  // namespace dmcv::mc

#endif  // DMCV_MODEL_CHECKER_HPP
