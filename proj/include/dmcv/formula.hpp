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

// CTLK formula syntax tree.

#ifndef DMCV_FORMULA_HPP
#define DMCV_FORMULA_HPP

#include <memory>
#include <string>
#include <variant>
#include <vector>

#include "dmcv/quantum.hpp"

namespace dmcv::logic {

struct VarRef {
    std::string agent;
    std::string var;
    bool operator==(const VarRef&) const = default;
};

/// `A.x == 0`
struct VarEq {
    VarRef var;
    int value = 0;
    bool operator==(const VarEq&) const = default;
};

/// `A.x == B.y`; false unless both sides are defined.
struct VarEqVar {
    VarRef lhs;
    VarRef rhs;
    bool operator==(const VarEqVar&) const = default;
};

/// `has(A, q)`
struct Has {
    std::string agent;
    std::string qubit;
    bool operator==(const Has&) const = default;
};

/// `q == ket[...]`
struct QubitIsKet {
    std::string qubit;
    std::vector<quantum::Amplitude> amplitudes;
    bool operator==(const QubitIsKet&) const = default;
};

/// `q1 == q2`
struct QubitEqQubit {
    std::string lhs;
    std::string rhs;
    bool operator==(const QubitEqQubit&) const = default;
};

/// `q3 == init(q1)`
struct QubitEqInit {
    std::string qubit;
    std::string initOf;
    bool operator==(const QubitEqInit&) const = default;
};

/// Opaque proposition referenced by name; produced when lowering to an
/// interpreted system, whose evaluation table defines it.
struct NamedProp {
    std::string name;
    bool operator==(const NamedProp&) const = default;
};

using Atom = std::variant<VarEq, VarEqVar, Has, QubitIsKet, QubitEqQubit, QubitEqInit, NamedProp>;

enum class Op { Atom, True, Not, And, Or, Implies, EX, EF, EG, AX, AF, AG, EU, AU, K, GK, CK, DK };

struct Formula;
using FormulaPtr = std::shared_ptr<const Formula>;

struct Formula {
    Op op = Op::True;
    Atom atom;
    /// Agent for K, group for GK/CK/DK.
    std::string who;
    std::vector<FormulaPtr> children;
};

FormulaPtr makeAtom(Atom atom);
FormulaPtr makeTrue();
FormulaPtr makeUnary(Op op, FormulaPtr child);
FormulaPtr makeBinary(Op op, FormulaPtr lhs, FormulaPtr rhs);
FormulaPtr makeEpistemic(Op op, std::string who, FormulaPtr child);

bool structurallyEqual(const Formula& a, const Formula& b);

/// Concrete syntax accepted by `parseFormula`; fully parenthesized binaries.
std::string toString(const Formula& f);
std::string toString(const Atom& a);

/// Rebuilds `f` with every atom replaced by `rewrite(atom)`.
template <typename Fn>
FormulaPtr mapAtoms(const FormulaPtr& f, Fn&& rewrite) {
    auto out = std::make_shared<Formula>(*f);
    if (f->op == Op::Atom) {
        out->atom = rewrite(f->atom);
    }
    for (auto& c : out->children) {
        c = mapAtoms(c, rewrite);
    }
    return out;
}

/// Every atom in `f`, in left-to-right order, with duplicates.
void collectAtoms(const Formula& f, std::vector<Atom>& out);

}  // namespace dmcv::logic

#endif  // DMCV_FORMULA_HPP
