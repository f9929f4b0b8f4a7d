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

#include "dmcv/formula.hpp"

#include "dmcv/text.hpp"

namespace dmcv::logic {

FormulaPtr makeAtom(Atom atom) {
    auto f = std::make_shared<Formula>();
    f->op = Op::Atom;
    f->atom = std::move(atom);
    return f;
}

FormulaPtr makeTrue() {
    auto f = std::make_shared<Formula>();
    f->op = Op::True;
    return f;
}

FormulaPtr makeUnary(Op op, FormulaPtr child) {
    auto f = std::make_shared<Formula>();
    f->op = op;
    f->children = {std::move(child)};
    return f;
}

FormulaPtr makeBinary(Op op, FormulaPtr lhs, FormulaPtr rhs) {
    auto f = std::make_shared<Formula>();
    f->op = op;
    f->children = {std::move(lhs), std::move(rhs)};
    return f;
}

FormulaPtr makeEpistemic(Op op, std::string who, FormulaPtr child) {
    auto f = std::make_shared<Formula>();
    f->op = op;
    f->who = std::move(who);
    f->children = {std::move(child)};
    return f;
}

bool structurallyEqual(const Formula& a, const Formula& b) {
    if (a.op != b.op || a.who != b.who || a.children.size() != b.children.size()) {
        return false;
    }
    if (a.op == Op::Atom && !(a.atom == b.atom)) {
        return false;
    }
    for (std::size_t i = 0; i < a.children.size(); ++i) {
        if (!structurallyEqual(*a.children[i], *b.children[i])) {
            return false;
        }
    }
    return true;
}

namespace {

std::string varRef(const VarRef& v) { return v.agent + "." + v.var; }

struct AtomPrinter {
    std::string operator()(const VarEq& a) const { return varRef(a.var) + " == " + std::to_string(a.value); }
    std::string operator()(const VarEqVar& a) const { return varRef(a.lhs) + " == " + varRef(a.rhs); }
    std::string operator()(const Has& a) const { return "has(" + a.agent + ", " + a.qubit + ")"; }
    std::string operator()(const QubitIsKet& a) const { return a.qubit + " == ket" + text::amplitudeList(a.amplitudes); }
    std::string operator()(const QubitEqQubit& a) const { return a.lhs + " == " + a.rhs; }
    std::string operator()(const QubitEqInit& a) const { return a.qubit + " == init(" + a.initOf + ")"; }
    std::string operator()(const NamedProp& a) const { return a.name; }
};

const char* unaryName(Op op) {
    switch (op) {
        case Op::EX: return "EX";
        case Op::EF: return "EF";
        case Op::EG: return "EG";
        case Op::AX: return "AX";
        case Op::AF: return "AF";
        case Op::AG: return "AG";
        default: return "";
    }
}

const char* epistemicName(Op op) {
    switch (op) {
        case Op::K: return "K";
        case Op::GK: return "GK";
        case Op::CK: return "CK";
        case Op::DK: return "DK";
        default: return "";
    }
}

}  // namespace

std::string toString(const Atom& a) { return std::visit(AtomPrinter{}, a); }

std::string toString(const Formula& f) {
    switch (f.op) {
        case Op::Atom: return toString(f.atom);
        case Op::True: return "true";
        case Op::Not: return "!" + toString(*f.children[0]);
        case Op::And: return "(" + toString(*f.children[0]) + " and " + toString(*f.children[1]) + ")";
        case Op::Or: return "(" + toString(*f.children[0]) + " or " + toString(*f.children[1]) + ")";
        case Op::Implies: return "(" + toString(*f.children[0]) + " -> " + toString(*f.children[1]) + ")";
        case Op::EU: return "E[" + toString(*f.children[0]) + " U " + toString(*f.children[1]) + "]";
        case Op::AU: return "A[" + toString(*f.children[0]) + " U " + toString(*f.children[1]) + "]";
        case Op::K:
        case Op::GK:
        case Op::CK:
        case Op::DK:
            return std::string(epistemicName(f.op)) + "(" + f.who + ", " + toString(*f.children[0]) + ")";
        default: return std::string(unaryName(f.op)) + " " + toString(*f.children[0]);
    }
}

void collectAtoms(const Formula& f, std::vector<Atom>& out) {
    if (f.op == Op::Atom) {
        out.push_back(f.atom);
    }
    for (const auto& c : f.children) {
        collectAtoms(*c, out);
    }
}

}  // namespace dmcv::logic
