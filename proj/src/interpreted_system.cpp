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

#include "dmcv/interpreted_system.hpp"

#include <algorithm>
#include <bit>
#include <cctype>
#include <cmath>
#include <functional>
#include <numbers>
#include <set>

#include "json.hpp"

#include "dmcv/text.hpp"

namespace dmcv::is {

namespace {

using dmc::qubitBit;
using semantics::Configuration;

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double angleDistance(double a, double b) {
    double d = std::fmod(std::abs(a - b), kTwoPi);
    return std::min(d, kTwoPi - d);
}

template <typename T>
void appendUnique(std::vector<T>& into, const T& value) {
    if (std::find(into.begin(), into.end(), value) == into.end()) {
        into.push_back(value);
    }
}

Assignment set(std::size_t var, int value) { return {var, AssignOp::Set, value}; }
Assignment increment(std::size_t var) { return {var, AssignOp::Increment, 1}; }

int flagOf(const semantics::AgentState& a, std::size_t q) {
    if (!(a.owned & qubitBit(q))) {
        return 0;
    }
    return (a.known & qubitBit(q)) ? 2 : 1;
}

std::string factorVarName(const dmc::ValidatedNetwork& net, dmc::QubitSet mask) {
    std::vector<std::string> names;
    bool digits = true;
    for (std::size_t q = 0; q < net.qubits.size(); ++q) {
        if (mask & qubitBit(q)) {
            const std::string& n = net.qubits[q];
            names.push_back(n);
            digits = digits && n.size() >= 2 && n[0] == 'q' &&
                     std::all_of(n.begin() + 1, n.end(), [](char c) { return std::isdigit(static_cast<unsigned char>(c)); });
        }
    }
    if (digits) {
        std::string out = "e";
        for (const auto& n : names) {
            out += n.substr(1);
        }
        return out;
    }
    return "e_" + text::join(names, "_");
}

/// Pairs each send event with the receive it synchronizes with.
struct Pairing {
    std::size_t sender, receiver, sendIndex, recvIndex;
    bool quantum;
};

std::vector<Pairing> pairEvents(const dmc::ValidatedNetwork& net) {
    std::vector<Pairing> out;
    for (std::size_t s = 0; s < net.agents.size(); ++s) {
        for (std::size_t r = 0; r < net.agents.size(); ++r) {
            if (s == r) {
                continue;
            }
            for (bool quantum : {false, true}) {
                std::vector<std::size_t> sends, recvs;
                for (std::size_t k = 0; k < net.agents[s].events.size(); ++k) {
                    const auto& b = net.agents[s].events[k].body;
                    if (quantum ? (std::holds_alternative<dmc::step::SendQubit>(b) &&
                                   std::get<dmc::step::SendQubit>(b).to == r)
                                : (std::holds_alternative<dmc::step::SendBit>(b) &&
                                   std::get<dmc::step::SendBit>(b).to == r)) {
                        sends.push_back(k);
                    }
                }
                for (std::size_t k = 0; k < net.agents[r].events.size(); ++k) {
                    const auto& b = net.agents[r].events[k].body;
                    if (quantum ? (std::holds_alternative<dmc::step::RecvQubit>(b) &&
                                   std::get<dmc::step::RecvQubit>(b).from == s)
                                : (std::holds_alternative<dmc::step::RecvBit>(b) &&
                                   std::get<dmc::step::RecvBit>(b).from == s)) {
                        recvs.push_back(k);
                    }
                }
                for (std::size_t i = 0; i < std::min(sends.size(), recvs.size()); ++i) {
                    out.push_back({s, r, sends[i], recvs[i], quantum});
                }
            }
        }
    }
    std::sort(out.begin(), out.end(), [](const Pairing& a, const Pairing& b) {
        return std::tie(a.sender, a.sendIndex) < std::tie(b.sender, b.sendIndex);
    });
    return out;
}

void merge(Template& t, const Fragment& f) {
    for (const auto& a : f.actions) {
        appendUnique(t.actions, a);
    }
    for (const auto& p : f.protocol) {
        appendUnique(t.protocol, p);
    }
    for (const auto& e : f.evolution) {
        appendUnique(t.evolution, e);
    }
}

std::vector<int> namesWithQubits(const semantics::ConfigGraph& g, std::size_t count) {
    std::vector<int> out;
    for (std::size_t i = 0; i < g.registry.size(); ++i) {
        if (g.registry.entry(i).qubitCount == count) {
            out.push_back(static_cast<int>(i));
        }
    }
    return out;
}

/// Environment quantum part of `c`: q and e variables in layout order.
std::vector<Test> quantumPart(const Layout& layout, const Configuration& c) {
    std::vector<Test> out;
    for (const auto& [mask, var] : layout.factor) {
        int value = kUndef;
        for (const auto& f : c.sigma) {
            if (f.mask == mask) {
                value = static_cast<int>(f.state);
            }
        }
        out.push_back({var, value});
    }
    std::sort(out.begin(), out.end());
    return out;
}

}  // namespace

std::vector<int> Var::values() const {
    switch (kind) {
        case VarKind::Bit: return {0, 1};
        case VarKind::BitOrUndef: return {0, 1, kUndef};
        case VarKind::Name: {
            std::vector<int> out{kUndef};
            out.insert(out.end(), names.begin(), names.end());
            return out;
        }
        case VarKind::Int: {
            std::vector<int> out;
            for (int v = lo; v <= hi; ++v) {
                out.push_back(v);
            }
            return out;
        }
    }
    return {};
}

std::optional<std::size_t> Template::varIndex(const std::string& n) const {
    for (std::size_t i = 0; i < vars.size(); ++i) {
        if (vars[i].name == n) {
            return i;
        }
    }
    return std::nullopt;
}

std::optional<std::size_t> InterpretedSystem::agentIndex(const std::string& n) const {
    for (std::size_t i = 0; i < agents.size(); ++i) {
        if (agents[i].name == n) {
            return i;
        }
    }
    return std::nullopt;
}

std::optional<std::size_t> InterpretedSystem::groupIndex(const std::string& n) const {
    for (std::size_t i = 0; i < groups.size(); ++i) {
        if (groups[i].name == n) {
            return i;
        }
    }
    return std::nullopt;
}

const Prop* InterpretedSystem::prop(const std::string& n) const {
    for (const auto& p : props) {
        if (p.name == n) {
            return &p;
        }
    }
    return nullptr;
}

std::string literal(const InterpretedSystem& is, const Var& var, int value) {
    switch (var.kind) {
        case VarKind::Bit:
        case VarKind::BitOrUndef:
            return value == kUndef ? "undef" : (value == 1 ? "b1" : "b0");
        case VarKind::Name:
            if (value == kUndef) {
                return "undef";
            }
            return static_cast<std::size_t>(value) < is.stateNames.size() ? is.stateNames[value]
                                                                          : "qs?" + std::to_string(value);
        case VarKind::Int: return std::to_string(value);
    }
    return "?";
}

// ---------------------------------------------------------------------------
// Measurement modes

std::optional<std::size_t> ForcedTable::modeIndex(std::size_t qubit, double angle) const {
    for (std::size_t i = 0; i < modes.size(); ++i) {
        if (modes[i].qubit == qubit && angleDistance(modes[i].angle, angle) < 1e-9) {
            return i;
        }
    }
    return std::nullopt;
}

std::vector<std::string> ForcedTable::forcing(std::size_t mode, int bit) const {
    std::vector<std::string> out;
    for (const auto& [name, facts] : signatures) {
        if (std::find(facts.begin(), facts.end(), std::make_pair(mode, bit)) != facts.end()) {
            out.push_back(name);
        }
    }
    return out;
}

std::vector<std::string> ForcedTable::free(std::size_t mode) const {
    std::vector<std::string> out{"none"};
    for (const auto& [name, facts] : signatures) {
        bool touches = std::any_of(facts.begin(), facts.end(), [&](const auto& f) { return f.first == mode; });
        if (!touches) {
            out.push_back(name);
        }
    }
    return out;
}

std::string angleTag(double radians) {
    static const char* tags[] = {"0", "pi4", "pi2", "3pi4", "pi", "5pi4", "3pi2", "7pi4"};
    double x = std::fmod(radians, kTwoPi);
    if (x < 0) {
        x += kTwoPi;
    }
    double k = std::round(x / (std::numbers::pi / 4));
    if (std::abs(x - k * std::numbers::pi / 4) < 1e-12) {
        return tags[static_cast<int>(k) % 8];
    }
    return "r" + std::to_string(std::llround(x * 1e6));
}

std::string measureAction(const dmc::ValidatedNetwork& net, const dmc::step::Measure& m, std::optional<int> s,
                          std::optional<int> t, int outcome) {
    std::string out = "m_" + net.qubits[m.qubit];
    if (s) {
        out += "_s" + std::to_string(*s);
    }
    if (t) {
        out += "_t" + std::to_string(*t);
    }
    out += outcome == 0 ? "_plus_" : "_minus_";
    return out + angleTag(m.angle.radians);
}

// ---------------------------------------------------------------------------
// Fragments

std::vector<Fragment> buildClassicalComm(const dmc::ValidatedNetwork& net, const Layout& layout, std::size_t sender,
                                         std::size_t receiver, std::size_t sendIndex, std::size_t recvIndex) {
    const auto& send = std::get<dmc::step::SendBit>(net.agents[sender].events[sendIndex].body);
    const auto& recv = std::get<dmc::step::RecvBit>(net.agents[receiver].events[recvIndex].body);
    const auto& sl = layout.agents[sender];
    const auto& rl = layout.agents[receiver];
    std::string base = "snd_" + net.agents[receiver].name + "_" + net.agents[sender].vars[send.var].name + "_";
    std::string snd[2] = {base + "0", base + "1"};
    std::string rcv = "rcv_" + net.agents[sender].name + "_" + net.agents[receiver].vars[recv.var].name;
    int v = static_cast<int>(sendIndex) + 1;
    int w = static_cast<int>(recvIndex) + 1;

    Fragment fs{sender, {snd[0], snd[1]}, {}, {}};
    for (int b = 0; b < 2; ++b) {
        fs.protocol.push_back({{{sl.pc, v}, {sl.classical[send.var], b}}, {snd[b], "wait"}});
    }
    fs.evolution.push_back({{{sl.pc, v}}, {{sender, {snd[0], snd[1]}}, {receiver, {rcv}}}, true, {increment(sl.pc)}});

    Fragment fr{receiver, {rcv}, {{{{rl.pc, w}}, {rcv, "wait"}}}, {}};
    for (int b = 0; b < 2; ++b) {
        fr.evolution.push_back({{{rl.pc, w}},
                                {{sender, {snd[b]}}, {receiver, {rcv}}},
                                true,
                                {set(rl.classical[recv.var], b), increment(rl.pc)}});
    }
    std::sort(fr.evolution.back().assign.begin(), fr.evolution.back().assign.end());
    std::sort(fr.evolution.front().assign.begin(), fr.evolution.front().assign.end());

    Fragment fe{kEnvironment, {}, {}, {{{}, {{sender, {snd[0], snd[1]}}, {receiver, {rcv}}}, true, {increment(layout.gc)}}}};
    return {fs, fr, fe};
}

std::vector<Fragment> buildQuantumComm(const dmc::ValidatedNetwork& net, const Layout& layout, std::size_t sender,
                                       std::size_t receiver, std::size_t sendIndex, std::size_t recvIndex) {
    const auto& send = std::get<dmc::step::SendQubit>(net.agents[sender].events[sendIndex].body);
    const auto& sl = layout.agents[sender];
    const auto& rl = layout.agents[receiver];
    std::string q = net.qubits[send.qubit];
    std::string qsnd = "qsnd_" + net.agents[receiver].name + "_" + q;
    std::string qrcv = "qrcv_" + net.agents[sender].name + "_" + q;
    int v = static_cast<int>(sendIndex) + 1;
    int w = static_cast<int>(recvIndex) + 1;
    std::vector<ActionCond> conds{{sender, {qsnd}}, {receiver, {qrcv}}};

    Fragment fs{sender, {qsnd}, {{{{sl.pc, v}}, {qsnd, "wait"}}}, {}};
    fs.evolution.push_back({{{sl.pc, v}}, conds, true, {set(sl.flag[send.qubit], 0), increment(sl.pc)}});
    Fragment fr{receiver, {qrcv}, {{{{rl.pc, w}}, {qrcv, "wait"}}}, {}};
    fr.evolution.push_back({{{rl.pc, w}}, conds, true, {set(rl.flag[send.qubit], 1), increment(rl.pc)}});
    for (auto* f : {&fs, &fr}) {
        std::sort(f->evolution[0].assign.begin(), f->evolution[0].assign.end());
    }
    Fragment fe{kEnvironment, {}, {}, {{{}, conds, true, {increment(layout.gc)}}}};
    return {fs, fr, fe};
}

std::vector<Fragment> buildCorrection(const dmc::ValidatedNetwork& net, const Layout& layout, std::size_t agent,
                                      std::size_t eventIndex) {
    const auto& c = std::get<dmc::step::Correction>(net.agents[agent].events[eventIndex].body);
    const auto& al = layout.agents[agent];
    std::string u = (c.pauli == quantum::Pauli::X ? "x_" : "z_") + net.qubits[c.qubit];
    int v = static_cast<int>(eventIndex) + 1;
    Fragment f{agent, {u}, {}, {}};
    if (c.condition) {
        std::size_t cv = al.classical[*c.condition];
        f.actions.push_back("skip");
        f.protocol.push_back({{{al.pc, v}, {cv, 1}}, {u, "wait"}});
        f.protocol.push_back({{{al.pc, v}, {cv, 0}}, {"skip", "wait"}});
        f.evolution.push_back({{{al.pc, v}}, {{agent, {u}}}, true, {increment(al.pc)}});
        f.evolution.push_back({{{al.pc, v}}, {{agent, {"skip"}}}, true, {increment(al.pc)}});
        Fragment fe{kEnvironment, {}, {}, {{{}, {{agent, {"skip"}}}, true, {increment(layout.gc)}}}};
        return {f, fe};
    }
    f.protocol.push_back({{{al.pc, v}}, {u, "wait"}});
    f.evolution.push_back({{{al.pc, v}}, {{agent, {u}}}, true, {increment(al.pc)}});
    return {f};
}

Fragment buildEntangle(const dmc::ValidatedNetwork& net, const Layout& layout, std::size_t agent,
                       std::size_t eventIndex) {
    const auto& e = std::get<dmc::step::Entangle>(net.agents[agent].events[eventIndex].body);
    const auto& al = layout.agents[agent];
    std::string ent = "ent_" + net.qubits[e.q] + "_" + net.qubits[e.r];
    int v = static_cast<int>(eventIndex) + 1;
    Fragment f{agent, {ent}, {{{{al.pc, v}}, {ent, "wait"}}}, {}};
    std::vector<Assignment> assign{set(al.flag[e.q], 1), set(al.flag[e.r], 1), increment(al.pc)};
    std::sort(assign.begin(), assign.end());
    f.evolution.push_back({{{al.pc, v}}, {{agent, {ent}}}, true, assign});
    return f;
}

Fragment buildMeasurement(const dmc::ValidatedNetwork& net, const Layout& layout, const ForcedTable& forced,
                          std::size_t agent, std::size_t eventIndex) {
    const auto& m = std::get<dmc::step::Measure>(net.agents[agent].events[eventIndex].body);
    const auto& al = layout.agents[agent];
    int v = static_cast<int>(eventIndex) + 1;
    std::vector<std::optional<int>> sOpts{std::nullopt}, tOpts{std::nullopt};
    if (m.sDep) {
        sOpts = {0, 1};
    }
    if (m.tDep) {
        tOpts = {0, 1};
    }
    std::vector<std::string> allEnv{"none"};
    for (const auto& sig : forced.signatures) {
        allEnv.push_back(sig.first);
    }
    Fragment f{agent, {}, {}, {}};
    for (auto s : sOpts) {
        for (auto t : tOpts) {
            std::string plus = measureAction(net, m, s, t, 0);
            std::string minus = measureAction(net, m, s, t, 1);
            f.actions.push_back(plus);
            f.actions.push_back(minus);
            Conjunction guard{{al.pc, v}};
            if (s) {
                guard.push_back({al.classical[*m.sDep], *s});
            }
            if (t) {
                guard.push_back({al.classical[*m.tDep], *t});
            }
            f.protocol.push_back({guard, {plus, minus, "wait"}});
            auto outcome = [&](int bit) {
                std::vector<Assignment> a{set(al.classical[m.outcome], bit), set(al.flag[m.qubit], 2),
                                          increment(al.pc)};
                std::sort(a.begin(), a.end());
                return a;
            };
            auto mode = forced.modeIndex(m.qubit, quantum::effectiveAngle(m.angle.radians, s, t));
            std::vector<std::string> free = mode ? forced.free(*mode) : allEnv;
            f.evolution.push_back({{{al.pc, v}}, {{kEnvironment, free}, {agent, {plus}}}, true, outcome(0)});
            f.evolution.push_back({{{al.pc, v}}, {{kEnvironment, free}, {agent, {minus}}}, true, outcome(1)});
            for (int bit = 0; mode && bit < 2; ++bit) {
                auto forcing = forced.forcing(*mode, bit);
                if (!forcing.empty()) {
                    f.evolution.push_back(
                        {{{al.pc, v}}, {{kEnvironment, forcing}, {agent, {plus, minus}}}, true, outcome(bit)});
                }
            }
        }
    }
    return f;
}

EvolutionLine buildEnvironmentStep(const dmc::ValidatedNetwork& net, const Layout& layout, const Configuration& from,
                                   const Configuration& to, std::vector<ActionCond> actions, dmc::QubitSet touched) {
    (void)net;
    EvolutionLine line;
    for (const auto& f : from.sigma) {
        if ((f.mask & touched) && std::find(to.sigma.begin(), to.sigma.end(), f) != to.sigma.end()) {
            line.guard.push_back({layout.factor.at(f.mask), static_cast<int>(f.state)});
        }
    }
    line.actions = std::move(actions);
    line.othersWait = true;
    std::set<std::size_t> added;
    for (const auto& f : to.sigma) {
        if (std::find(from.sigma.begin(), from.sigma.end(), f) == from.sigma.end()) {
            std::size_t var = layout.factor.at(f.mask);
            line.assign.push_back(set(var, static_cast<int>(f.state)));
            added.insert(var);
        }
    }
    for (const auto& f : from.sigma) {
        if (std::find(to.sigma.begin(), to.sigma.end(), f) == to.sigma.end()) {
            std::size_t var = layout.factor.at(f.mask);
            line.guard.push_back({var, static_cast<int>(f.state)});
            if (!added.count(var)) {
                line.assign.push_back(set(var, kUndef));
            }
        }
    }
    line.assign.push_back(increment(layout.gc));
    std::sort(line.guard.begin(), line.guard.end());
    std::sort(line.assign.begin(), line.assign.end());
    return line;
}

GlobalState translate(const dmc::ValidatedNetwork& net, const Layout& layout, const InterpretedSystem& is,
                      const semantics::ConfigGraph& graph, const Configuration& c) {
    GlobalState s;
    s.env.assign(is.environment.vars.size(), kUndef);
    for (const auto& t : quantumPart(layout, c)) {
        s.env[t.var] = t.value;
    }
    if (!graph.initial.empty()) {
        const auto& init = graph.nodes[graph.initial.front()];
        for (std::size_t q = 0; q < net.qubits.size(); ++q) {
            auto name = semantics::qubitName(init, q);
            s.env[layout.init[q]] = name ? static_cast<int>(*name) : kUndef;
        }
    }
    s.env[layout.gc] = static_cast<int>(c.step) + 1;
    for (std::size_t i = 0; i < net.agents.size(); ++i) {
        const auto& al = layout.agents[i];
        LocalState l(is.agents[i].vars.size(), kUndef);
        const auto& a = c.agents[i];
        for (std::size_t v = 0; v < a.gamma.size(); ++v) {
            l[al.classical[v]] = a.gamma[v];
        }
        for (std::size_t q = 0; q < net.qubits.size(); ++q) {
            l[al.flag[q]] = flagOf(a, q);
        }
        l[al.pc] = static_cast<int>(a.eventIndex) + 1;
        s.agents.push_back(std::move(l));
    }
    return s;
}

// ---------------------------------------------------------------------------
// Atoms

Prop lowerAtom(const dmc::ValidatedNetwork& net, const Assembly& assembly, const semantics::ConfigGraph& graph,
               const logic::Atom& atom, std::string name) {
    const Layout& layout = assembly.layout;
    Prop p{std::move(name), atom, {}};
    auto agent = [&](const std::string& n) {
        auto i = net.agentIndex(n);
        if (!i) {
            throw UntranslatableAtom("unknown agent " + n + " in " + logic::toString(atom));
        }
        return *i;
    };
    auto qubit = [&](const std::string& n) {
        auto i = net.qubitIndex(n);
        if (!i) {
            throw UntranslatableAtom("unknown qubit " + n + " in " + logic::toString(atom));
        }
        return *i;
    };
    auto var = [&](const logic::VarRef& r) {
        std::size_t a = agent(r.agent);
        auto v = net.agents[a].varIndex(r.var);
        if (!v) {
            throw UntranslatableAtom("unknown variable " + r.agent + "." + r.var);
        }
        return GlobalTest{a, layout.agents[a].classical[*v], 0};
    };
    auto oneQubitNames = namesWithQubits(graph, 1);
    std::visit(
        [&](const auto& a) {
            using T = std::decay_t<decltype(a)>;
            if constexpr (std::is_same_v<T, logic::VarEq>) {
                GlobalTest t = var(a.var);
                if (a.value == 0 || a.value == 1) {
                    t.value = a.value;
                    p.dnf.push_back({t});
                }
            } else if constexpr (std::is_same_v<T, logic::VarEqVar>) {
                GlobalTest l = var(a.lhs);
                GlobalTest r = var(a.rhs);
                for (int b = 0; b < 2; ++b) {
                    l.value = b;
                    r.value = b;
                    if (l.owner == r.owner && l.var == r.var) {
                        p.dnf.push_back({l});
                    } else {
                        p.dnf.push_back({l, r});
                    }
                }
            } else if constexpr (std::is_same_v<T, logic::Has>) {
                std::size_t i = agent(a.agent);
                std::size_t flag = layout.agents[i].flag[qubit(a.qubit)];
                p.dnf.push_back({{i, flag, 1}});
                p.dnf.push_back({{i, flag, 2}});
            } else if constexpr (std::is_same_v<T, logic::QubitIsKet>) {
                std::size_t q = qubit(a.qubit);
                if (a.amplitudes.size() != 2) {
                    throw UntranslatableAtom("ket for " + a.qubit + " needs 2 amplitudes");
                }
                std::vector<quantum::Amplitude> amps;
                try {
                    amps = quantum::PureStateVector::make({a.qubit}, a.amplitudes).amplitudes;
                } catch (const quantum::QuantumError& e) {
                    throw UntranslatableAtom(std::string("invalid ket: ") + e.what());
                }
                if (auto id = graph.registry.find(amps); id && graph.registry.entry(*id).qubitCount == 1) {
                    p.dnf.push_back({{kEnvironment, layout.qubit[q], static_cast<int>(*id)}});
                }
            } else if constexpr (std::is_same_v<T, logic::QubitEqQubit>) {
                std::size_t l = qubit(a.lhs);
                std::size_t r = qubit(a.rhs);
                for (int n : oneQubitNames) {
                    if (l == r) {
                        p.dnf.push_back({{kEnvironment, layout.qubit[l], n}});
                    } else {
                        p.dnf.push_back({{kEnvironment, layout.qubit[l], n}, {kEnvironment, layout.qubit[r], n}});
                    }
                }
            } else if constexpr (std::is_same_v<T, logic::QubitEqInit>) {
                std::size_t q = qubit(a.qubit);
                std::size_t i = qubit(a.initOf);
                for (int n : oneQubitNames) {
                    p.dnf.push_back({{kEnvironment, layout.qubit[q], n}, {kEnvironment, layout.init[i], n}});
                }
            } else {
                throw UntranslatableAtom("named proposition " + logic::toString(atom) + " cannot be lowered");
            }
        },
        atom);
    return p;
}

// ---------------------------------------------------------------------------
// Assembly

Assembly assemble(const dmc::ValidatedNetwork& net, const semantics::ConfigGraph& graph) {
    Assembly out;
    InterpretedSystem& is = out.system;
    Layout& layout = out.layout;
    is.name = net.name;
    for (const auto& e : graph.registry.entries()) {
        is.stateNames.push_back(e.name);
    }

    // Environment variables.
    Template& env = is.environment;
    env.name = "Environment";
    auto oneQubit = namesWithQubits(graph, 1);
    for (std::size_t q = 0; q < net.qubits.size(); ++q) {
        layout.qubit.push_back(env.vars.size());
        layout.factor[qubitBit(q)] = env.vars.size();
        env.vars.push_back({net.qubits[q], VarKind::Name, 0, 0, oneQubit});
    }
    for (std::size_t q = 0; q < net.qubits.size(); ++q) {
        layout.init.push_back(env.vars.size());
        env.vars.push_back({"init_" + net.qubits[q], VarKind::Name, 0, 0, oneQubit});
    }
    std::set<dmc::QubitSet> masks;
    for (const auto& n : graph.nodes) {
        for (const auto& f : n.sigma) {
            if (std::popcount(f.mask) > 1) {
                masks.insert(f.mask);
            }
        }
    }
    std::vector<dmc::QubitSet> ordered(masks.begin(), masks.end());
    auto qubitList = [&](dmc::QubitSet m) {
        std::vector<std::size_t> qs;
        for (std::size_t q = 0; q < net.qubits.size(); ++q) {
            if (m & qubitBit(q)) {
                qs.push_back(q);
            }
        }
        return qs;
    };
    std::sort(ordered.begin(), ordered.end(), [&](dmc::QubitSet a, dmc::QubitSet b) {
        auto pa = std::popcount(a);
        auto pb = std::popcount(b);
        return pa != pb ? pa < pb : qubitList(a) < qubitList(b);
    });
    for (auto m : ordered) {
        layout.factor[m] = env.vars.size();
        env.vars.push_back({factorVarName(net, m), VarKind::Name, 0, 0,
                            namesWithQubits(graph, static_cast<std::size_t>(std::popcount(m)))});
    }
    layout.gc = env.vars.size();
    env.vars.push_back({"gc", VarKind::Int, 1, static_cast<int>(graph.maxStep()) + 1, {}});
    env.actions.push_back("none");
    env.otherwise = {"none"};

    // Agent variables.
    for (const auto& a : net.agents) {
        Template t;
        t.name = a.name;
        Layout::AgentVars al;
        for (const auto& v : a.vars) {
            al.classical.push_back(t.vars.size());
            t.vars.push_back({v.name, v.role == dmc::VarRole::Input ? VarKind::Bit : VarKind::BitOrUndef, 0, 0, {}});
        }
        for (const auto& q : net.qubits) {
            al.flag.push_back(t.vars.size());
            t.vars.push_back({q, VarKind::Int, 0, 2, {}});
        }
        al.pc = t.vars.size();
        t.vars.push_back({"pc", VarKind::Int, 1, static_cast<int>(a.events.size()) + 1, {}});
        t.actions.push_back("wait");
        t.otherwise = {"wait"};
        is.agents.push_back(std::move(t));
        layout.agents.push_back(std::move(al));
    }

    // Forced outcomes.
    ForcedTable& forced = out.forced;
    for (const auto& a : net.agents) {
        for (const auto& e : a.events) {
            if (const auto* m = std::get_if<dmc::step::Measure>(&e.body)) {
                for (int s = 0; s < (m->sDep ? 2 : 1); ++s) {
                    for (int t = 0; t < (m->tDep ? 2 : 1); ++t) {
                        double angle = quantum::effectiveAngle(m->angle.radians, m->sDep ? std::optional(s) : std::nullopt,
                                                               m->tDep ? std::optional(t) : std::nullopt);
                        if (!forced.modeIndex(m->qubit, angle)) {
                            forced.modes.push_back({m->qubit, angle});
                        }
                    }
                }
            }
        }
    }
    quantum::StateRegistry scratch = graph.registry;
    semantics::Machine machine(net, scratch);
    std::set<std::vector<Test>> seenParts;
    for (const auto& n : graph.nodes) {
        auto part = quantumPart(layout, n);
        if (!seenParts.insert(part).second) {
            continue;
        }
        std::vector<std::pair<std::size_t, int>> facts;
        for (std::size_t mi = 0; mi < forced.modes.size(); ++mi) {
            const auto& mode = forced.modes[mi];
            auto state = machine.factorState(n.factorOf(mode.qubit));
            auto [plus, minus] = quantum::measure(state, net.qubits[mode.qubit], mode.angle);
            if (minus.probability < quantum::kZeroProbability) {
                facts.push_back({mi, 0});
            } else if (plus.probability < quantum::kZeroProbability) {
                facts.push_back({mi, 1});
            }
        }
        if (facts.empty()) {
            continue;
        }
        std::string name;
        for (const auto& [sigName, sigFacts] : forced.signatures) {
            if (sigFacts == facts) {
                name = sigName;
            }
        }
        if (name.empty()) {
            name = "env_" + std::to_string(forced.signatures.size() + 1);
            forced.signatures.push_back({name, facts});
            env.actions.push_back(name);
        }
        env.protocol.push_back({part, {name}});
    }

    // Agent fragments.
    for (std::size_t i = 0; i < net.agents.size(); ++i) {
        for (std::size_t k = 0; k < net.agents[i].events.size(); ++k) {
            const auto& body = net.agents[i].events[k].body;
            if (std::holds_alternative<dmc::step::Entangle>(body)) {
                merge(is.agents[i], buildEntangle(net, layout, i, k));
            } else if (std::holds_alternative<dmc::step::Measure>(body)) {
                merge(is.agents[i], buildMeasurement(net, layout, forced, i, k));
            } else if (std::holds_alternative<dmc::step::Correction>(body)) {
                for (const auto& f : buildCorrection(net, layout, i, k)) {
                    merge(f.owner == kEnvironment ? env : is.agents[i], f);
                }
            }
        }
    }
    for (const auto& p : pairEvents(net)) {
        auto frags = p.quantum ? buildQuantumComm(net, layout, p.sender, p.receiver, p.sendIndex, p.recvIndex)
                               : buildClassicalComm(net, layout, p.sender, p.receiver, p.sendIndex, p.recvIndex);
        for (const auto& f : frags) {
            merge(f.owner == kEnvironment ? env : is.agents[f.owner], f);
        }
    }

    // Environment lines for quantum steps, from the graph.
    for (const auto& e : graph.edges) {
        if (e.step.kind != semantics::StepKind::Local) {
            continue;
        }
        const Configuration& from = graph.nodes[e.from];
        const Configuration& to = graph.nodes[e.to];
        const auto& event = net.agents[e.step.agent].events[from.agents[e.step.agent].eventIndex].body;
        std::vector<std::string> allowed;
        dmc::QubitSet touched = 0;
        if (const auto* en = std::get_if<dmc::step::Entangle>(&event)) {
            touched = dmc::qubitBit(en->q) | dmc::qubitBit(en->r);
            allowed = {"ent_" + net.qubits[en->q] + "_" + net.qubits[en->r]};
        } else if (const auto* c = std::get_if<dmc::step::Correction>(&event)) {
            if (c->condition && from.agents[e.step.agent].gamma[*c->condition] != 1) {
                continue;  // skip line already present
            }
            touched = dmc::qubitBit(c->qubit);
            allowed = {(c->pauli == quantum::Pauli::X ? "x_" : "z_") + net.qubits[c->qubit]};
        } else if (const auto* m = std::get_if<dmc::step::Measure>(&event)) {
            touched = dmc::qubitBit(m->qubit);
            const auto& gamma = from.agents[e.step.agent].gamma;
            std::optional<int> s, t;
            if (m->sDep) {
                s = gamma[*m->sDep];
            }
            if (m->tDep) {
                t = gamma[*m->tDep];
            }
            std::size_t outcomes = 0;
            for (std::size_t k = graph.edgeBegin[e.from]; k < graph.edgeBegin[e.from + 1]; ++k) {
                outcomes += graph.edges[k].step.agent == e.step.agent && graph.edges[k].step.kind == e.step.kind;
            }
            allowed = {measureAction(net, *m, s, t, e.step.outcome)};
            if (outcomes == 1) {
                allowed = {measureAction(net, *m, s, t, 0), measureAction(net, *m, s, t, 1)};
            }
        }
        appendUnique(env.evolution, buildEnvironmentStep(net, layout, from, to, {{e.step.agent, allowed}}, touched));
    }

    // Initial states.
    for (std::size_t id : graph.initial) {
        is.initial.push_back(translate(net, layout, is, graph, graph.nodes[id]));
    }

    // Groups and formulas.
    for (const auto& g : net.groups) {
        is.groups.push_back({g.name, g.members});
    }
    std::vector<logic::Atom> atoms;
    std::function<void(const logic::Formula&)> checkNames = [&](const logic::Formula& f) {
        if (f.op == logic::Op::K && !net.agentIndex(f.who)) {
            throw UntranslatableAtom("unknown agent " + f.who + " in K");
        }
        if ((f.op == logic::Op::GK || f.op == logic::Op::CK || f.op == logic::Op::DK) && !net.groupIndex(f.who)) {
            throw UntranslatableAtom("unknown group " + f.who);
        }
        for (const auto& c : f.children) {
            checkNames(*c);
        }
    };
    for (const auto& f : net.formulas) {
        checkNames(*f);
        logic::collectAtoms(*f, atoms);
    }
    for (const auto& a : atoms) {
        bool seen = std::any_of(is.props.begin(), is.props.end(), [&](const Prop& p) { return p.atom == a; });
        if (!seen) {
            is.props.push_back(lowerAtom(net, out, graph, a, "p" + std::to_string(is.props.size() + 1)));
        }
    }
    for (const auto& f : net.formulas) {
        is.formulas.push_back(logic::mapAtoms(f, [&](const logic::Atom& a) -> logic::Atom {
            for (const auto& p : is.props) {
                if (p.atom == a) {
                    return logic::NamedProp{p.name};
                }
            }
            return a;
        }));
    }
    return out;
}

// ---------------------------------------------------------------------------
// Execution

bool holds(const Conjunction& guard, const LocalState& local) {
    return std::all_of(guard.begin(), guard.end(), [&](const Test& t) { return local[t.var] == t.value; });
}

bool holds(const Prop& prop, const GlobalState& s) {
    for (const auto& conj : prop.dnf) {
        bool all = std::all_of(conj.begin(), conj.end(), [&](const GlobalTest& t) {
            const LocalState& l = t.owner == kEnvironment ? s.env : s.agents[t.owner];
            return l[t.var] == t.value;
        });
        if (all) {
            return true;
        }
    }
    return false;
}

namespace {

std::vector<std::string> enabledFor(const Template& t, const LocalState& l) {
    std::vector<std::string> out;
    for (const auto& line : t.protocol) {
        if (holds(line.guard, l)) {
            for (const auto& a : line.actions) {
                appendUnique(out, a);
            }
        }
    }
    if (out.empty()) {
        out = t.otherwise;
    }
    return out;
}

}  // namespace

std::vector<std::vector<std::string>> enabledActions(const InterpretedSystem& is, const GlobalState& s) {
    std::vector<std::vector<std::string>> out{enabledFor(is.environment, s.env)};
    for (std::size_t i = 0; i < is.agents.size(); ++i) {
        out.push_back(enabledFor(is.agents[i], s.agents[i]));
    }
    return out;
}

std::optional<GlobalState> apply(const InterpretedSystem& is, const GlobalState& s, const JointAction& a) {
    GlobalState next = s;
    bool fired = false;
    auto actionOf = [&](std::size_t owner) -> const std::string& {
        return owner == kEnvironment ? a.env : a.agents[owner];
    };
    auto run = [&](const Template& t, const LocalState& before, LocalState& after) {
        std::vector<int> written(before.size(), 0);
        for (const auto& line : t.evolution) {
            if (!holds(line.guard, before)) {
                continue;
            }
            bool ok = true;
            std::vector<bool> named(is.agents.size(), false);
            for (const auto& c : line.actions) {
                if (c.owner != kEnvironment) {
                    named[c.owner] = true;
                }
                if (std::find(c.allowed.begin(), c.allowed.end(), actionOf(c.owner)) == c.allowed.end()) {
                    ok = false;
                    break;
                }
            }
            if (ok && line.othersWait) {
                for (std::size_t i = 0; i < is.agents.size(); ++i) {
                    if (!named[i] && a.agents[i] != "wait") {
                        ok = false;
                        break;
                    }
                }
            }
            if (!ok) {
                continue;
            }
            fired = true;
            for (const auto& as : line.assign) {
                int value = as.op == AssignOp::Set ? as.value : before[as.var] + as.value;
                if (written[as.var] && after[as.var] != value) {
                    throw EvolutionConflict(t.name + "." + t.vars[as.var].name + " assigned twice");
                }
                written[as.var] = 1;
                after[as.var] = value;
            }
        }
    };
    run(is.environment, s.env, next.env);
    for (std::size_t i = 0; i < is.agents.size(); ++i) {
        run(is.agents[i], s.agents[i], next.agents[i]);
    }
    if (!fired) {
        return std::nullopt;
    }
    return next;
}

std::vector<GlobalState> successors(const InterpretedSystem& is, const GlobalState& s) {
    auto enabled = enabledActions(is, s);
    std::vector<GlobalState> out;
    std::vector<std::size_t> idx(enabled.size(), 0);
    while (true) {
        JointAction a;
        a.env = enabled[0][idx[0]];
        for (std::size_t i = 1; i < enabled.size(); ++i) {
            a.agents.push_back(enabled[i][idx[i]]);
        }
        if (auto n = apply(is, s, a)) {
            appendUnique(out, *n);
        }
        std::size_t k = 0;
        while (k < idx.size() && ++idx[k] == enabled[k].size()) {
            idx[k] = 0;
            ++k;
        }
        if (k == idx.size()) {
            break;
        }
    }
    if (out.empty()) {
        out.push_back(s);
    }
    std::sort(out.begin(), out.end());
    return out;
}

Reachable reachable(const InterpretedSystem& is, std::size_t maxStates) {
    Reachable r;
    std::map<GlobalState, std::size_t> index;
    auto add = [&](const GlobalState& s) {
        auto [it, fresh] = index.emplace(s, r.states.size());
        if (fresh) {
            if (r.states.size() >= maxStates) {
                throw semantics::StateBudgetExceeded(maxStates);
            }
            r.states.push_back(s);
            r.successors.emplace_back();
        }
        return it->second;
    };
    for (const auto& s : is.initial) {
        std::size_t id = add(s);
        appendUnique(r.initial, id);
    }
    for (std::size_t k = 0; k < r.states.size(); ++k) {
        for (const auto& n : successors(is, r.states[k])) {
            std::size_t id = add(n);
            r.successors[k].push_back(id);
        }
    }
    return r;
}

std::string describe(const InterpretedSystem& is, const GlobalState& s) {
    auto local = [&](const Template& t, const LocalState& l) {
        std::vector<std::string> parts;
        for (std::size_t v = 0; v < t.vars.size(); ++v) {
            parts.push_back(t.vars[v].name + "=" + literal(is, t.vars[v], l[v]));
        }
        return t.name + "(" + text::join(parts, ", ") + ")";
    };
    std::string out = local(is.environment, s.env);
    for (std::size_t i = 0; i < is.agents.size(); ++i) {
        out += " " + local(is.agents[i], s.agents[i]);
    }
    return out;
}

// ---------------------------------------------------------------------------
// JSON

namespace {

using Json = nlohmann::ordered_json;

std::string ownerName(const InterpretedSystem& is, std::size_t owner) {
    return owner == kEnvironment ? is.environment.name : is.agents[owner].name;
}

Json templateJson(const InterpretedSystem& is, const Template& t) {
    auto test = [&](const Test& x) { return t.vars[x.var].name + "=" + literal(is, t.vars[x.var], x.value); };
    auto guard = [&](const Conjunction& c) {
        Json out = Json::array();
        for (const auto& x : c) {
            out.push_back(test(x));
        }
        return out;
    };
    Json vars = Json::array();
    for (const auto& v : t.vars) {
        Json domain = Json::array();
        for (int x : v.values()) {
            domain.push_back(literal(is, v, x));
        }
        vars.push_back(Json{{"name", v.name}, {"domain", domain}});
    }
    Json protocol = Json::array();
    for (const auto& p : t.protocol) {
        protocol.push_back(Json{{"guard", guard(p.guard)}, {"actions", p.actions}});
    }
    Json evolution = Json::array();
    for (const auto& e : t.evolution) {
        Json actions = Json::array();
        for (const auto& c : e.actions) {
            actions.push_back(Json{{"owner", ownerName(is, c.owner)}, {"allowed", c.allowed}});
        }
        Json assign = Json::array();
        for (const auto& a : e.assign) {
            const Var& v = t.vars[a.var];
            assign.push_back(a.op == AssignOp::Increment ? v.name + "=" + v.name + "+" + std::to_string(a.value)
                                                          : v.name + "=" + literal(is, v, a.value));
        }
        evolution.push_back(
            Json{{"guard", guard(e.guard)}, {"actions", actions}, {"othersWait", e.othersWait}, {"assign", assign}});
    }
    return Json{{"name", t.name},         {"vars", vars},           {"actions", t.actions},
                {"protocol", protocol},   {"otherwise", t.otherwise}, {"evolution", evolution}};
}

Json localJson(const InterpretedSystem& is, const Template& t, const LocalState& l) {
    Json out = Json::object();
    for (std::size_t v = 0; v < t.vars.size(); ++v) {
        out[t.vars[v].name] = literal(is, t.vars[v], l[v]);
    }
    return out;
}

}  // namespace

std::string toJson(const InterpretedSystem& is) {
    Json agents = Json::array();
    for (const auto& a : is.agents) {
        agents.push_back(templateJson(is, a));
    }
    Json initial = Json::array();
    for (const auto& s : is.initial) {
        Json state{{is.environment.name, localJson(is, is.environment, s.env)}};
        for (std::size_t i = 0; i < is.agents.size(); ++i) {
            state[is.agents[i].name] = localJson(is, is.agents[i], s.agents[i]);
        }
        initial.push_back(state);
    }
    Json props = Json::array();
    for (const auto& p : is.props) {
        Json dnf = Json::array();
        for (const auto& conj : p.dnf) {
            Json c = Json::array();
            for (const auto& t : conj) {
                const Template& owner = is.owner(t.owner);
                c.push_back(owner.name + "." + owner.vars[t.var].name + "=" + literal(is, owner.vars[t.var], t.value));
            }
            dnf.push_back(c);
        }
        props.push_back(Json{{"name", p.name}, {"atom", logic::toString(p.atom)}, {"dnf", dnf}});
    }
    Json groups = Json::array();
    for (const auto& g : is.groups) {
        Json members = Json::array();
        for (auto m : g.members) {
            members.push_back(is.agents[m].name);
        }
        groups.push_back(Json{{"name", g.name}, {"members", members}});
    }
    Json formulas = Json::array();
    for (const auto& f : is.formulas) {
        formulas.push_back(logic::toString(*f));
    }
    Json out{{"name", is.name},       {"environment", templateJson(is, is.environment)},
             {"agents", agents},      {"initial", initial},
             {"props", props},        {"groups", groups},
             {"formulas", formulas}};
    return out.dump(2);
}

// ---------------------------------------------------------------------------
// Crosscheck

CrosscheckReport crosscheck(const dmc::ValidatedNetwork& net, const semantics::ConfigGraph& graph,
                            const Assembly& assembly, std::size_t maxStates) {
    const InterpretedSystem& is = assembly.system;
    CrosscheckReport report;
    report.configurations = graph.nodes.size();
    auto complain = [&](std::string m) {
        if (report.mismatches.size() < 50) {
            report.mismatches.push_back(std::move(m));
        }
    };

    std::vector<GlobalState> image;
    std::map<GlobalState, std::size_t> preimage;
    for (std::size_t n = 0; n < graph.nodes.size(); ++n) {
        image.push_back(translate(net, assembly.layout, is, graph, graph.nodes[n]));
        if (!preimage.emplace(image.back(), n).second) {
            complain("configurations " + std::to_string(preimage[image.back()]) + " and " + std::to_string(n) +
                     " map to the same state");
        }
    }
    bool injective = preimage.size() == graph.nodes.size();

    Reachable r;
    try {
        r = reachable(is, maxStates);
    } catch (const EvolutionConflict& e) {
        complain(e.what());
        return report;
    }
    report.systemStates = r.states.size();
    bool iso = injective && r.states.size() == graph.nodes.size();
    if (r.states.size() != graph.nodes.size()) {
        complain("system has " + std::to_string(r.states.size()) + " reachable states, graph has " +
                 std::to_string(graph.nodes.size()) + " configurations");
    }
    std::set<GlobalState> initA, initB;
    for (auto id : graph.initial) {
        initA.insert(image[id]);
    }
    for (auto id : r.initial) {
        initB.insert(r.states[id]);
    }
    if (initA != initB) {
        iso = false;
        complain("initial states differ");
    }
    for (std::size_t n = 0; n < graph.nodes.size(); ++n) {
        std::set<GlobalState> expected;
        for (std::size_t k = graph.edgeBegin[n]; k < graph.edgeBegin[n + 1]; ++k) {
            expected.insert(image[graph.edges[k].to]);
        }
        std::set<GlobalState> actual;
        try {
            auto succ = successors(is, image[n]);
            actual.insert(succ.begin(), succ.end());
        } catch (const EvolutionConflict& e) {
            complain(std::string("configuration ") + std::to_string(n) + ": " + e.what());
            iso = false;
            continue;
        }
        if (expected != actual) {
            iso = false;
            complain("successors of configuration " + std::to_string(n) + " differ: " + describe(is, image[n]));
        }
    }
    for (const auto& s : r.states) {
        if (!preimage.count(s)) {
            iso = false;
            complain("unmatched system state " + describe(is, s));
            break;
        }
    }
    report.isomorphic = iso;

    report.partitionsMatch = true;
    for (std::size_t i = 0; i < net.agents.size(); ++i) {
        auto classes = semantics::localClasses(graph, i);
        std::map<std::size_t, LocalState> forward;
        std::map<LocalState, std::size_t> backward;
        for (std::size_t n = 0; n < graph.nodes.size(); ++n) {
            const LocalState& l = image[n].agents[i];
            auto [f, fNew] = forward.emplace(classes[n], l);
            auto [b, bNew] = backward.emplace(l, classes[n]);
            if (f->second != l || b->second != classes[n]) {
                report.partitionsMatch = false;
                complain("local view of " + net.agents[i].name + " differs at configuration " + std::to_string(n));
                break;
            }
        }
    }

    std::vector<logic::Atom> atoms;
    for (const auto& p : is.props) {
        atoms.push_back(p.atom);
    }
    for (const auto& a : net.agents) {
        for (const auto& v : a.vars) {
            for (int b = 0; b < 2; ++b) {
                atoms.push_back(logic::VarEq{{a.name, v.name}, b});
            }
        }
        for (const auto& q : net.qubits) {
            atoms.push_back(logic::Has{a.name, q});
        }
    }
    for (const auto& q : net.qubits) {
        for (const auto& r2 : net.qubits) {
            atoms.push_back(logic::QubitEqInit{q, r2});
            atoms.push_back(logic::QubitEqQubit{q, r2});
        }
        for (const auto& e : graph.registry.entries()) {
            if (e.qubitCount == 1) {
                atoms.push_back(logic::QubitIsKet{q, e.amplitudes});
            }
        }
    }
    std::vector<logic::VarRef> refs;
    for (const auto& a : net.agents) {
        for (const auto& v : a.vars) {
            refs.push_back({a.name, v.name});
        }
    }
    for (std::size_t x = 0; x < refs.size(); ++x) {
        for (std::size_t y = x + 1; y < refs.size(); ++y) {
            atoms.push_back(logic::VarEqVar{refs[x], refs[y]});
        }
    }
    report.atomsAgree = true;
    for (const auto& atom : atoms) {
        Prop p = lowerAtom(net, assembly, graph, atom, "check");
        ++report.atomsChecked;
        for (std::size_t n = 0; n < graph.nodes.size(); ++n) {
            if (semantics::evalAtom(net, graph, graph.nodes[n], atom) != holds(p, image[n])) {
                report.atomsAgree = false;
                complain("atom " + logic::toString(atom) + " disagrees at configuration " + std::to_string(n));
                break;
            }
        }
    }
    return report;
}

}  // namespace dmcv::is
