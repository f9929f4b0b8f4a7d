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

// DMC protocol front end: syntax tree, parser, printer, macro expansion and
// validation into a resolved network.

#ifndef DMCV_NETWORK_HPP
#define DMCV_NETWORK_HPP

#include <cstdint>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "dmcv/formula.hpp"
#include "dmcv/quantum.hpp"

namespace dmcv::dmc {

struct SourceLocation {
    int line = 0;
    int column = 0;
};

struct QubitInit {
    std::vector<std::string> qubits;
    std::vector<quantum::Amplitude> amplitudes;
    SourceLocation loc;
};

/// Measurement angle in radians. `symbol` keeps the source spelling of the
/// tokens 0, pi/4, pi/2 and pi so printing does not drift.
struct Angle {
    double radians = 0.0;
    std::string symbol;
    bool operator==(const Angle&) const = default;
};

struct Entangle {
    std::string q;
    std::string r;
    bool operator==(const Entangle&) const = default;
};

struct Measure {
    std::string qubit;
    Angle angle;
    std::optional<std::string> sDep;
    std::optional<std::string> tDep;
    std::string outcome;
    bool operator==(const Measure&) const = default;
};

struct Correction {
    quantum::Pauli pauli = quantum::Pauli::X;
    std::string qubit;
    std::optional<std::string> condition;
    bool operator==(const Correction&) const = default;
};

struct ClassicalSend {
    std::string to;
    std::vector<std::string> vars;
    bool operator==(const ClassicalSend&) const = default;
};

struct ClassicalRecv {
    std::string from;
    std::vector<std::string> vars;
    bool operator==(const ClassicalRecv&) const = default;
};

struct QuantumSend {
    std::string to;
    std::string qubit;
    bool operator==(const QuantumSend&) const = default;
};

struct QuantumRecv {
    std::string from;
    std::string bound;
    bool operator==(const QuantumRecv&) const = default;
};

struct MacroCall {
    std::string name;
    std::vector<std::string> args;
    bool operator==(const MacroCall&) const = default;
};

using EventBody =
    std::variant<Entangle, Measure, Correction, ClassicalSend, ClassicalRecv, QuantumSend, QuantumRecv, MacroCall>;

struct Event {
    EventBody body;
    SourceLocation loc;
};

struct Input {
    std::string name;
    std::optional<int> pinned;
    bool operator==(const Input&) const = default;
};

struct AgentSpec {
    std::string name;
    std::vector<Input> inputs;
    std::vector<std::string> owned;
    std::vector<std::string> known;
    std::vector<Event> events;
    SourceLocation loc;
};

struct Group {
    std::string name;
    std::vector<std::string> members;
    SourceLocation loc;
};

struct Macro {
    std::string name;
    std::vector<std::string> params;
    std::vector<Event> body;
    SourceLocation loc;
};

struct NetworkSpec {
    std::string name;
    std::vector<QubitInit> qubits;
    std::vector<AgentSpec> agents;
    std::vector<Group> groups;
    std::vector<logic::FormulaPtr> formulas;
    std::vector<Macro> macros;
};

class SyntaxError : public std::runtime_error {
  public:
    SyntaxError(SourceLocation loc, std::string found, std::vector<std::string> expected);
    SourceLocation location() const { return loc_; }
    const std::vector<std::string>& expected() const { return expected_; }

  private:
    SourceLocation loc_;
    std::vector<std::string> expected_;
};

struct SemanticError {
    std::string message;
    SourceLocation loc;
    bool operator==(const SemanticError& o) const { return message == o.message; }
    bool operator<(const SemanticError& o) const;
};

/// Thrown by validate and expandMacros; carries every problem found.
class ValidationError : public std::runtime_error {
  public:
    explicit ValidationError(std::vector<SemanticError> errors);
    const std::vector<SemanticError>& errors() const { return errors_; }

  private:
    std::vector<SemanticError> errors_;
};

class RecursionError : public ValidationError {
  public:
    using ValidationError::ValidationError;
};

class ArityError : public ValidationError {
  public:
    using ValidationError::ValidationError;
};

NetworkSpec parse(std::string_view source);
logic::FormulaPtr parseFormula(std::string_view source);

/// DMC source text that `parse` maps back to an equal tree.
std::string print(const NetworkSpec& spec);

/// Inlines every macro call; the result carries no macros.
NetworkSpec expandMacros(const NetworkSpec& spec);

bool structurallyEqual(const NetworkSpec& a, const NetworkSpec& b);

// ---------------------------------------------------------------------------
// Resolved network

using QubitSet = std::uint64_t;
inline constexpr std::size_t kMaxQubits = 64;

inline QubitSet qubitBit(std::size_t q) { return QubitSet{1} << q; }

/// Classical variable of an agent. Received bits and signals start undefined;
/// inputs are always defined.
enum class VarRole { Received, Input, Signal };

struct ClassicalVar {
    std::string name;
    VarRole role = VarRole::Signal;
    std::optional<int> pinned;
};

namespace step {

struct Entangle {
    std::size_t q = 0;
    std::size_t r = 0;
};

struct Measure {
    std::size_t qubit = 0;
    Angle angle;
    std::optional<std::size_t> sDep;
    std::optional<std::size_t> tDep;
    std::size_t outcome = 0;
};

struct Correction {
    quantum::Pauli pauli = quantum::Pauli::X;
    std::size_t qubit = 0;
    std::optional<std::size_t> condition;
};

/// One classical bit sent; lists in the source expand to one event per bit.
struct SendBit {
    std::size_t to = 0;
    std::size_t var = 0;
};

struct RecvBit {
    std::size_t from = 0;
    std::size_t var = 0;
};

struct SendQubit {
    std::size_t to = 0;
    std::size_t qubit = 0;
};

struct RecvQubit {
    std::size_t from = 0;
    std::size_t qubit = 0;
};

}  // namespace step

using ResolvedBody =
    std::variant<step::Entangle, step::Measure, step::Correction, step::SendBit, step::RecvBit, step::SendQubit,
                 step::RecvQubit>;

struct ResolvedEvent {
    ResolvedBody body;
    /// 1-based index of the source event (after macro expansion).
    std::size_t sourceIndex = 0;
};

struct ResolvedAgent {
    std::string name;
    /// Ordered received bits, then inputs, then signals.
    std::vector<ClassicalVar> vars;
    QubitSet owned = 0;
    QubitSet known = 0;
    std::vector<ResolvedEvent> events;

    std::optional<std::size_t> varIndex(std::string_view name) const;
};

struct ResolvedGroup {
    std::string name;
    std::vector<std::size_t> members;
};

struct ValidatedNetwork {
    std::string name;
    /// Global qubit order: order of declaration in the qubits section.
    std::vector<std::string> qubits;
    /// Declared initial states with qubits rearranged into global order.
    std::vector<quantum::PureStateVector> inits;
    std::vector<ResolvedAgent> agents;
    std::vector<ResolvedGroup> groups;
    std::vector<logic::FormulaPtr> formulas;

    std::optional<std::size_t> qubitIndex(std::string_view name) const;
    std::optional<std::size_t> agentIndex(std::string_view name) const;
    std::optional<std::size_t> groupIndex(std::string_view name) const;
};

/// All semantic errors of a macro-free spec, sorted.
std::vector<SemanticError> collectErrors(const NetworkSpec& spec);

/// Expands macros, checks the spec and resolves names. Throws ValidationError.
ValidatedNetwork validate(const NetworkSpec& spec);

/// Replaces the initial state of the single-qubit declaration of `qubit`.
void overrideInput(NetworkSpec& spec, const std::string& qubit, std::vector<quantum::Amplitude> amplitudes);

}  // namespace dmcv::dmc

#endif  // DMCV_NETWORK_HPP
