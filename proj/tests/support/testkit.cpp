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

#include "testkit.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <numbers>
#include <set>
#include <sstream>
#include <stdexcept>

#ifndef DMCV_PROTOCOL_DIR
#error "DMCV_PROTOCOL_DIR must be defined"
#endif

namespace testkit {

namespace {

using dmcv::logic::Formula;
using dmcv::logic::FormulaPtr;
using dmcv::logic::Op;
using dmcv::mc::StateGraph;
using dmcv::mc::StateSet;

const double kHalfRoot = 1.0 / std::numbers::sqrt2;

int bitOf(std::size_t index, int n, int q) { return static_cast<int>((index >> (n - 1 - q)) & 1U); }

}  // namespace

std::string readProtocol(const std::string& name) {
    std::ifstream in(std::string(DMCV_PROTOCOL_DIR) + "/" + name, std::ios::binary);
    if (!in) {
        throw std::runtime_error("missing protocol " + name);
    }
    std::ostringstream out;
    out << in.rdbuf();
    return out.str();
}

Vec kron(const Vec& a, const Vec& b) {
    Vec out;
    out.reserve(a.size() * b.size());
    for (const auto& x : a) {
        for (const auto& y : b) {
            out.push_back(x * y);
        }
    }
    return out;
}

Vec applyCz(const Vec& v, int n, int q, int r) {
    Vec out = v;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (bitOf(i, n, q) && bitOf(i, n, r)) {
            out[i] = -out[i];
        }
    }
    return out;
}

Vec applyX(const Vec& v, int n, int q) {
    Vec out(v.size());
    std::size_t flip = std::size_t{1} << (n - 1 - q);
    for (std::size_t i = 0; i < v.size(); ++i) {
        out[i ^ flip] = v[i];
    }
    return out;
}

Vec applyZ(const Vec& v, int n, int q) {
    Vec out = v;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (bitOf(i, n, q)) {
            out[i] = -out[i];
        }
    }
    return out;
}

namespace {

/// <b|_q applied to v, where |b> is the basis vector for the outcome.
Vec project(const Vec& v, int n, int q, double angle, int bit) {
    Amp phase = std::polar(1.0, angle) * (bit ? -1.0 : 1.0);
    // <±_a| = (<0| ± e^{-ia}<1|)/sqrt2
    Amp c0 = kHalfRoot;
    Amp c1 = std::conj(phase) * kHalfRoot;
    Vec out(v.size() / 2);
    for (std::size_t i = 0; i < v.size(); ++i) {
        std::size_t high = i >> (n - q);
        std::size_t low = i & ((std::size_t{1} << (n - 1 - q)) - 1);
        std::size_t j = (high << (n - 1 - q)) | low;
        out[j] += (bitOf(i, n, q) ? c1 : c0) * v[i];
    }
    return out;
}

}  // namespace

double measureProbability(const Vec& v, int n, int q, double angle, int bit) {
    return norm2(project(v, n, q, angle, bit));
}

Vec residual(const Vec& v, int n, int q, double angle, int bit) {
    Vec out = project(v, n, q, angle, bit);
    double p = norm2(out);
    if (p < 1e-9 || n == 1) {
        return {};
    }
    for (auto& x : out) {
        x /= std::sqrt(p);
    }
    return canonical(out);
}

int schmidtRank(const Vec& v, int n, const std::vector<int>& subset, double tol) {
    std::vector<int> rest;
    for (int q = 0; q < n; ++q) {
        if (std::find(subset.begin(), subset.end(), q) == subset.end()) {
            rest.push_back(q);
        }
    }
    std::size_t rows = std::size_t{1} << subset.size();
    std::size_t cols = std::size_t{1} << rest.size();
    std::vector<Vec> m(rows, Vec(cols));
    for (std::size_t i = 0; i < v.size(); ++i) {
        std::size_t r = 0;
        std::size_t c = 0;
        for (int q : subset) {
            r = (r << 1) | bitOf(i, n, q);
        }
        for (int q : rest) {
            c = (c << 1) | bitOf(i, n, q);
        }
        m[r][c] = v[i];
    }
    int rank = 0;
    std::vector<bool> used(rows, false);
    for (std::size_t c = 0; c < cols; ++c) {
        std::size_t pivot = rows;
        double best = tol;
        for (std::size_t r = 0; r < rows; ++r) {
            if (!used[r] && std::abs(m[r][c]) > best) {
                best = std::abs(m[r][c]);
                pivot = r;
            }
        }
        if (pivot == rows) {
            continue;
        }
        used[pivot] = true;
        ++rank;
        for (std::size_t r = 0; r < rows; ++r) {
            if (r != pivot) {
                Amp f = m[r][c] / m[pivot][c];
                for (std::size_t k = c; k < cols; ++k) {
                    m[r][k] -= f * m[pivot][k];
                }
            }
        }
    }
    return rank;
}

double norm2(const Vec& v) {
    double s = 0.0;
    for (const auto& x : v) {
        s += std::norm(x);
    }
    return s;
}

Vec canonical(Vec v) {
    for (const auto& x : v) {
        if (std::abs(x) > 1e-9) {
            Amp phase = std::conj(x) / std::abs(x);
            for (auto& y : v) {
                y *= phase;
            }
            break;
        }
    }
    return v;
}

double distanceUpToPhase(const Vec& a, const Vec& b) {
    if (a.size() != b.size()) {
        return INFINITY;
    }
    Vec ca = canonical(a);
    Vec cb = canonical(b);
    double d = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        d = std::max(d, std::abs(ca[i] - cb[i]));
    }
    return d;
}

Vec randomState(std::mt19937_64& rng, int n) {
    std::normal_distribution<double> g;
    Vec v(std::size_t{1} << n);
    for (auto& x : v) {
        x = Amp(g(rng), g(rng));
    }
    double s = std::sqrt(norm2(v));
    for (auto& x : v) {
        x /= s;
    }
    return v;
}

Vec randomProductState(std::mt19937_64& rng, int n) {
    Vec v{Amp(1.0)};
    int left = n;
    while (left > 0) {
        int k = std::uniform_int_distribution<int>(1, left)(rng);
        v = kron(v, randomState(rng, k));
        left -= k;
    }
    return v;
}

// ---------------------------------------------------------------------------

namespace {

std::string fmt(double x) {
    std::ostringstream out;
    out.precision(17);
    out << x;
    return out.str();
}

std::string vecText(const std::vector<double>& v) {
    std::string s = "[";
    for (std::size_t i = 0; i < v.size(); ++i) {
        s += (i ? ", " : "") + fmt(v[i]);
    }
    return s + "]";
}

std::vector<double> singlePool(std::mt19937_64& rng) {
    static const std::vector<std::vector<double>> pool = {
        {1, 0}, {0, 1}, {kHalfRoot, kHalfRoot}, {kHalfRoot, -kHalfRoot}, {0.6, 0.8}, {0.8, -0.6}};
    auto k = std::uniform_int_distribution<std::size_t>(0, pool.size())(rng);
    if (k < pool.size()) {
        return pool[k];
    }
    std::normal_distribution<double> g;
    double a = g(rng);
    double b = g(rng);
    double s = std::hypot(a, b);
    return {a / s, b / s};
}

std::vector<double> pairPool(std::mt19937_64& rng) {
    static const std::vector<std::vector<double>> pool = {
        {0.5, 0.5, 0.5, -0.5}, {kHalfRoot, 0, 0, kHalfRoot}, {0, kHalfRoot, kHalfRoot, 0}, {0.5, 0.5, 0.5, 0.5}};
    auto k = std::uniform_int_distribution<std::size_t>(0, pool.size() - 1)(rng);
    return pool[k];
}

template <typename T>
const T& pick(std::mt19937_64& rng, const std::vector<T>& v) {
    return v[std::uniform_int_distribution<std::size_t>(0, v.size() - 1)(rng)];
}

struct AgentDraft {
    std::string name;
    std::vector<std::string> inputs;
    std::vector<std::string> owned;
    std::vector<std::string> known;
    std::set<std::string> holding;
    std::vector<std::string> bits;  // defined classical variables
    std::vector<std::string> events;
};

}  // namespace

RandomNetwork randomNetwork(std::mt19937_64& rng, int index) {
    auto coin = [&](double p) { return std::bernoulli_distribution(p)(rng); };
    auto upto = [&](int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); };

    RandomNetwork out;
    out.agents = upto(1, 3);
    out.qubits = upto(1, 4);
    int budget = upto(1, 8);

    std::vector<std::string> qubits;
    for (int q = 1; q <= out.qubits; ++q) {
        qubits.push_back("q" + std::to_string(q));
    }
    std::string src = "network R" + std::to_string(index) + " {\n  qubits {\n";
    for (int q = 0; q < out.qubits;) {
        if (q + 1 < out.qubits && coin(0.4)) {
            src += "    " + qubits[q] + ", " + qubits[q + 1] + " = " + vecText(pairPool(rng)) + ";\n";
            q += 2;
        } else {
            src += "    " + qubits[q] + " = " + vecText(singlePool(rng)) + ";\n";
            q += 1;
        }
    }
    src += "  }\n";

    std::vector<AgentDraft> agents(out.agents);
    static const char* names[] = {"Alice", "Bob", "Carol"};
    int counter = 0;
    auto fresh = [&](const char* prefix) { return prefix + std::to_string(++counter); };
    for (int a = 0; a < out.agents; ++a) {
        agents[a].name = names[a];
        if (coin(0.3)) {
            std::string v = fresh("i");
            agents[a].inputs.push_back(v);
            agents[a].bits.push_back(v);
        }
    }
    for (const auto& q : qubits) {
        auto& owner = agents[upto(0, out.agents - 1)];
        owner.owned.push_back(q);
        owner.holding.insert(q);
        if (coin(0.2)) {
            owner.known.push_back(q);
        }
    }

    static const std::vector<std::string> angles = {"0", "pi/4", "pi/2", "pi", "0.3"};
    int attempts = 0;
    while (out.events < budget && attempts++ < 200) {
        auto& a = agents[upto(0, out.agents - 1)];
        std::vector<std::string> held(a.holding.begin(), a.holding.end());
        int kind = upto(0, 5);
        if (kind == 0 && held.size() >= 2) {
            std::string q = pick(rng, held);
            std::string r = pick(rng, held);
            if (q == r) {
                continue;
            }
            a.events.push_back("E(" + q + ", " + r + ")");
            out.events += 1;
        } else if (kind == 1 && !held.empty()) {
            std::string e = fresh("s");
            std::string ev = e + " = M(" + pick(rng, held) + ", " + pick(rng, angles);
            if (!a.bits.empty() && coin(0.3)) {
                ev += ", s = " + pick(rng, a.bits);
            }
            if (!a.bits.empty() && coin(0.3)) {
                ev += ", t = " + pick(rng, a.bits);
            }
            a.events.push_back(ev + ")");
            a.bits.push_back(e);
            out.events += 1;
        } else if (kind == 2 && !held.empty()) {
            std::string ev = std::string(coin(0.5) ? "X" : "Z") + "(" + pick(rng, held) + ")";
            if (!a.bits.empty() && coin(0.6)) {
                ev += " if " + pick(rng, a.bits);
            }
            a.events.push_back(ev);
            out.events += 1;
        } else if (kind == 3 && out.agents > 1 && !a.bits.empty() && out.events + 2 <= budget) {
            auto& b = agents[upto(0, out.agents - 1)];
            if (&a == &b) {
                continue;
            }
            std::vector<std::string> sent{pick(rng, a.bits)};
            if (a.bits.size() > 1 && coin(0.3)) {
                std::string extra = pick(rng, a.bits);
                if (extra != sent[0]) {
                    sent.push_back(extra);
                }
            }
            std::vector<std::string> got;
            for (std::size_t k = 0; k < sent.size(); ++k) {
                got.push_back(fresh("x"));
            }
            std::string s = "send " + b.name + " classical(";
            std::string r = "receive " + a.name + " classical(";
            for (std::size_t k = 0; k < sent.size(); ++k) {
                s += (k ? ", " : "") + sent[k];
                r += (k ? ", " : "") + got[k];
                b.bits.push_back(got[k]);
            }
            a.events.push_back(s + ")");
            b.events.push_back(r + ")");
            out.events += 2;
        } else if (kind == 4 && out.agents > 1 && !held.empty() && out.events + 2 <= budget) {
            auto& b = agents[upto(0, out.agents - 1)];
            if (&a == &b) {
                continue;
            }
            std::string q = pick(rng, held);
            a.events.push_back("qsend " + b.name + " " + q);
            b.events.push_back("qreceive " + a.name + " " + q);
            a.holding.erase(q);
            b.holding.insert(q);
            out.events += 2;
        }
    }

    auto list = [](const std::vector<std::string>& v) {
        std::string s;
        for (std::size_t i = 0; i < v.size(); ++i) {
            s += (i ? ", " : "") + v[i];
        }
        return s;
    };
    for (const auto& a : agents) {
        src += "  agent " + a.name;
        if (!a.inputs.empty()) {
            src += " (inputs: " + list(a.inputs) + ")";
        }
        if (!a.owned.empty()) {
            src += " owns " + list(a.owned);
        }
        if (!a.known.empty()) {
            src += " knows " + list(a.known);
        }
        src += " {\n";
        for (const auto& e : a.events) {
            src += "    " + e + ";\n";
        }
        src += "  }\n";
    }
    std::vector<std::string> agentNames;
    for (const auto& a : agents) {
        agentNames.push_back(a.name);
    }
    src += "  groups {\n    G = {" + list(agentNames) + "};\n  }\n";

    // Formulas over the atom kinds the network offers.
    std::vector<std::string> atoms;
    for (const auto& a : agents) {
        for (const auto& q : qubits) {
            atoms.push_back("has(" + a.name + ", " + q + ")");
        }
        for (const auto& v : a.bits) {
            atoms.push_back(a.name + "." + v + " == " + std::to_string(upto(0, 1)));
        }
    }
    for (const auto& a : agents) {
        for (const auto& b : agents) {
            if (&a != &b && !a.bits.empty() && !b.bits.empty()) {
                atoms.push_back(a.name + "." + pick(rng, a.bits) + " == " + b.name + "." + pick(rng, b.bits));
            }
        }
    }
    for (const auto& q : qubits) {
        atoms.push_back(q + " == init(" + pick(rng, qubits) + ")");
        atoms.push_back(q + " == " + pick(rng, qubits));
        atoms.push_back(q + " == ket" + vecText(singlePool(rng)));
    }
    std::function<std::string(int)> formula = [&](int depth) -> std::string {
        if (depth == 0 || coin(0.25)) {
            return pick(rng, atoms);
        }
        switch (upto(0, 11)) {
            case 0: return "!" + formula(depth - 1);
            case 1: return "(" + formula(depth - 1) + " and " + formula(depth - 1) + ")";
            case 2: return "(" + formula(depth - 1) + " -> " + formula(depth - 1) + ")";
            case 3: return "EF " + formula(depth - 1);
            case 4: return "AF " + formula(depth - 1);
            case 5: return "AG " + formula(depth - 1);
            case 6: return "EX " + formula(depth - 1);
            case 7: return "E[" + formula(depth - 1) + " U " + formula(depth - 1) + "]";
            case 8: return "K(" + pick(rng, agentNames) + ", " + formula(depth - 1) + ")";
            case 9: return "CK(G, " + formula(depth - 1) + ")";
            case 10: return "DK(G, " + formula(depth - 1) + ")";
            default: return "EG " + formula(depth - 1);
        }
    };
    src += "  formulae {\n";
    for (int k = upto(1, 3); k > 0; --k) {
        src += "    " + formula(3) + ";\n";
    }
    src += "  }\n}\n";
    out.source = src;
    return out;
}

// ---------------------------------------------------------------------------

StateGraph randomGraph(std::mt19937_64& rng, std::size_t n) {
    auto upto = [&](std::size_t lo, std::size_t hi) { return std::uniform_int_distribution<std::size_t>(lo, hi)(rng); };
    StateGraph g;
    g.successors.resize(n);
    for (std::size_t s = 0; s < n; ++s) {
        std::set<std::size_t> succ;
        for (std::size_t k = upto(1, 3); k > 0; --k) {
            // Bias towards nearby states so long chains and cycles both occur.
            std::size_t t = std::bernoulli_distribution(0.7)(rng)
                                ? std::min(n - 1, s + upto(0, 3))
                                : upto(0, n - 1);
            succ.insert(t);
        }
        g.successors[s].assign(succ.begin(), succ.end());
    }
    for (std::size_t k = upto(1, std::min<std::size_t>(3, n)); k > 0; --k) {
        g.initial.push_back(upto(0, n - 1));
    }
    std::sort(g.initial.begin(), g.initial.end());
    g.initial.erase(std::unique(g.initial.begin(), g.initial.end()), g.initial.end());

    std::size_t agents = upto(2, 3);
    std::vector<std::size_t> all;
    for (std::size_t i = 0; i < agents; ++i) {
        g.agents.push_back("a" + std::to_string(i));
        std::size_t classes = upto(1, std::max<std::size_t>(1, n / 2));
        std::vector<std::size_t> cls(n);
        for (auto& c : cls) {
            c = upto(0, classes - 1);
        }
        g.localClass.push_back(cls);
        all.push_back(i);
    }
    g.groups["G"] = all;
    g.groups["H"] = {0, 1};
    for (const char* p : {"p", "q"}) {
        double density = std::uniform_real_distribution<double>(0.2, 0.8)(rng);
        StateSet label(n);
        for (std::size_t s = 0; s < n; ++s) {
            label[s] = std::bernoulli_distribution(density)(rng);
        }
        g.labels[p] = label;
    }
    return g;
}

FormulaPtr randomFormula(std::mt19937_64& rng, int depth, const std::vector<std::string>& agents) {
    using namespace dmcv::logic;
    auto upto = [&](int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); };
    if (depth == 0 || upto(0, 4) == 0) {
        int k = upto(0, 4);
        if (k == 4) {
            return makeTrue();
        }
        return makeAtom(NamedProp{k % 2 ? "q" : "p"});
    }
    auto sub = [&] { return randomFormula(rng, depth - 1, agents); };
    switch (upto(0, 17)) {
        case 0: return makeUnary(Op::Not, sub());
        case 1: return makeBinary(Op::And, sub(), sub());
        case 2: return makeBinary(Op::Or, sub(), sub());
        case 3: return makeBinary(Op::Implies, sub(), sub());
        case 4: return makeUnary(Op::EX, sub());
        case 5: return makeUnary(Op::EF, sub());
        case 6: return makeUnary(Op::EG, sub());
        case 7: return makeUnary(Op::AX, sub());
        case 8: return makeUnary(Op::AF, sub());
        case 9: return makeUnary(Op::AG, sub());
        case 10: return makeBinary(Op::EU, sub(), sub());
        case 11: return makeBinary(Op::AU, sub(), sub());
        case 12:
        case 13: return makeEpistemic(Op::K, agents[upto(0, static_cast<int>(agents.size()) - 1)], sub());
        case 14: return makeEpistemic(Op::GK, upto(0, 1) ? "G" : "H", sub());
        case 15: return makeEpistemic(Op::DK, upto(0, 1) ? "G" : "H", sub());
        default: return makeEpistemic(Op::CK, upto(0, 1) ? "G" : "H", sub());
    }
}

namespace {

/// States reachable from `s` by paths of length >= 0 that stay in `through`
/// except possibly at the last state. Plain depth-first search.
std::vector<bool> forwardFrom(const StateGraph& g, std::size_t s, const StateSet& through) {
    std::vector<bool> seen(g.size(), false);
    std::vector<std::size_t> stack{s};
    seen[s] = true;
    while (!stack.empty()) {
        std::size_t x = stack.back();
        stack.pop_back();
        if (!through[x]) {
            continue;
        }
        for (auto t : g.successors[x]) {
            if (!seen[t]) {
                seen[t] = true;
                stack.push_back(t);
            }
        }
    }
    return seen;
}

/// True when an infinite path from `s` stays inside `region`.
bool infiniteInside(const StateGraph& g, std::size_t s, const StateSet& region) {
    if (!region[s]) {
        return false;
    }
    auto reach = forwardFrom(g, s, region);
    for (std::size_t t = 0; t < g.size(); ++t) {
        if (!reach[t] || !region[t]) {
            continue;
        }
        // Does t return to itself through region states?
        for (auto u : g.successors[t]) {
            if (region[u] && forwardFrom(g, u, region)[t]) {
                return true;
            }
        }
    }
    return false;
}

std::vector<std::size_t> membersOf(const StateGraph& g, const std::string& who) {
    if (auto it = g.groups.find(who); it != g.groups.end()) {
        return it->second;
    }
    for (std::size_t i = 0; i < g.agents.size(); ++i) {
        if (g.agents[i] == who) {
            return {i};
        }
    }
    throw std::runtime_error("unknown agent or group " + who);
}

}  // namespace

StateSet bruteForce(const StateGraph& g, const Formula& f) {
    const std::size_t n = g.size();
    StateSet out(n, false);
    auto sub = [&](std::size_t i) { return bruteForce(g, *f.children.at(i)); };
    switch (f.op) {
        case Op::True: return StateSet(n, true);
        case Op::Atom: {
            const auto* p = std::get_if<dmcv::logic::NamedProp>(&f.atom);
            if (!p) {
                throw std::runtime_error("brute force handles named propositions only");
            }
            return g.labels.at(p->name);
        }
        case Op::Not: {
            auto a = sub(0);
            for (std::size_t s = 0; s < n; ++s) {
                out[s] = !a[s];
            }
            return out;
        }
        case Op::And:
        case Op::Or:
        case Op::Implies: {
            auto a = sub(0);
            auto b = sub(1);
            for (std::size_t s = 0; s < n; ++s) {
                out[s] = f.op == Op::And ? (a[s] && b[s]) : f.op == Op::Or ? (a[s] || b[s]) : (!a[s] || b[s]);
            }
            return out;
        }
        case Op::EX:
        case Op::AX: {
            auto a = sub(0);
            for (std::size_t s = 0; s < n; ++s) {
                bool any = false;
                bool all = true;
                for (auto t : g.successors[s]) {
                    any = any || a[t];
                    all = all && a[t];
                }
                out[s] = f.op == Op::EX ? any : all;
            }
            return out;
        }
        case Op::EF:
        case Op::AG: {
            auto a = sub(0);
            StateSet everywhere(n, true);
            for (std::size_t s = 0; s < n; ++s) {
                auto reach = forwardFrom(g, s, everywhere);
                bool any = false;
                bool all = true;
                for (std::size_t t = 0; t < n; ++t) {
                    if (reach[t]) {
                        any = any || a[t];
                        all = all && a[t];
                    }
                }
                out[s] = f.op == Op::EF ? any : all;
            }
            return out;
        }
        case Op::EG: {
            auto a = sub(0);
            for (std::size_t s = 0; s < n; ++s) {
                out[s] = infiniteInside(g, s, a);
            }
            return out;
        }
        case Op::AF: {
            // Fails exactly when some infinite path avoids the operand forever.
            auto a = sub(0);
            StateSet avoid(n);
            for (std::size_t s = 0; s < n; ++s) {
                avoid[s] = !a[s];
            }
            for (std::size_t s = 0; s < n; ++s) {
                out[s] = !infiniteInside(g, s, avoid);
            }
            return out;
        }
        case Op::EU: {
            auto a = sub(0);
            auto b = sub(1);
            for (std::size_t s = 0; s < n; ++s) {
                // Walk through a-states that are not yet b; stop at any b.
                StateSet through(n);
                for (std::size_t t = 0; t < n; ++t) {
                    through[t] = a[t] && !b[t];
                }
                auto reach = forwardFrom(g, s, through);
                for (std::size_t t = 0; t < n && !out[s]; ++t) {
                    out[s] = reach[t] && b[t];
                }
            }
            return out;
        }
        case Op::AU: {
            auto a = sub(0);
            auto b = sub(1);
            StateSet waiting(n);
            for (std::size_t t = 0; t < n; ++t) {
                waiting[t] = a[t] && !b[t];
            }
            for (std::size_t s = 0; s < n; ++s) {
                if (b[s]) {
                    out[s] = true;
                    continue;
                }
                if (!a[s]) {
                    continue;
                }
                auto reach = forwardFrom(g, s, waiting);
                bool stuck = false;
                for (std::size_t t = 0; t < n && !stuck; ++t) {
                    stuck = reach[t] && !a[t] && !b[t];
                }
                out[s] = !stuck && !infiniteInside(g, s, waiting);
            }
            return out;
        }
        case Op::K:
        case Op::GK:
        case Op::DK: {
            auto a = sub(0);
            auto members = membersOf(g, f.who);
            for (std::size_t s = 0; s < n; ++s) {
                bool all = true;
                for (std::size_t t = 0; t < n && all; ++t) {
                    bool related = f.op == Op::DK;
                    for (auto i : members) {
                        bool same = g.localClass[i][s] == g.localClass[i][t];
                        related = f.op == Op::DK ? related && same : related || same;
                    }
                    all = !related || a[t];
                }
                out[s] = all;
            }
            return out;
        }
        case Op::CK: {
            // Connected components of the union of the members' relations.
            auto a = sub(0);
            auto members = membersOf(g, f.who);
            std::vector<std::size_t> parent(n);
            for (std::size_t s = 0; s < n; ++s) {
                parent[s] = s;
            }
            std::function<std::size_t(std::size_t)> root = [&](std::size_t x) {
                return parent[x] == x ? x : parent[x] = root(parent[x]);
            };
            for (auto i : members) {
                std::map<std::size_t, std::size_t> first;
                for (std::size_t s = 0; s < n; ++s) {
                    auto [it, fresh] = first.emplace(g.localClass[i][s], s);
                    if (!fresh) {
                        parent[root(s)] = root(it->second);
                    }
                }
            }
            std::map<std::size_t, bool> good;
            for (std::size_t s = 0; s < n; ++s) {
                auto [it, fresh] = good.emplace(root(s), true);
                it->second = it->second && a[s];
            }
            for (std::size_t s = 0; s < n; ++s) {
                out[s] = good[root(s)];
            }
            return out;
        }
    }
    throw std::runtime_error("unhandled operator");
}

bool subset(const StateSet& a, const StateSet& b) {
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i] && !b[i]) {
            return false;
        }
    }
    return true;
}

}  // namespace testkit
