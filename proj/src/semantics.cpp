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

#include "dmcv/semantics.hpp"

#include <algorithm>
#include <bit>
#include <deque>
#include <map>
#include <ostream>
#include <random>
#include <tuple>
#include <unordered_map>

namespace dmcv::semantics {

namespace {

std::size_t lowestQubit(QubitSet mask) { return static_cast<std::size_t>(std::countr_zero(mask)); }

void sortSigma(std::vector<Factor>& sigma) {
    std::sort(sigma.begin(), sigma.end(),
              [](const Factor& a, const Factor& b) { return lowestQubit(a.mask) < lowestQubit(b.mask); });
}

std::vector<std::int64_t> keyOf(const Configuration& c) {
    std::vector<std::int64_t> key;
    key.push_back(static_cast<std::int64_t>(c.step));
    for (const auto& a : c.agents) {
        key.push_back(static_cast<std::int64_t>(a.eventIndex));
        key.push_back(static_cast<std::int64_t>(a.owned));
        key.push_back(static_cast<std::int64_t>(a.known));
        for (auto v : a.gamma) {
            key.push_back(v);
        }
    }
    for (const auto& f : c.sigma) {
        key.push_back(static_cast<std::int64_t>(f.mask));
        key.push_back(static_cast<std::int64_t>(f.state));
    }
    return key;
}

struct KeyHash {
    std::size_t operator()(const std::vector<std::int64_t>& k) const {
        std::size_t h = 1469598103934665603ull;
        for (auto v : k) {
            h ^= static_cast<std::size_t>(v) + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
        }
        return h;
    }
};

const dmc::ResolvedEvent* nextEvent(const dmc::ValidatedNetwork& net, const Configuration& c, std::size_t agent) {
    const auto& events = net.agents[agent].events;
    std::size_t k = c.agents[agent].eventIndex;
    return k < events.size() ? &events[k] : nullptr;
}

std::vector<std::string> qubitNames(const dmc::ValidatedNetwork& net, QubitSet mask) {
    std::vector<std::string> out;
    for (std::size_t q = 0; q < net.qubits.size(); ++q) {
        if (mask & dmc::qubitBit(q)) {
            out.push_back(net.qubits[q]);
        }
    }
    return out;
}

}  // namespace

StateBudgetExceeded::StateBudgetExceeded(std::size_t limit)
    : std::runtime_error("state budget of " + std::to_string(limit) + " exceeded"), limit_(limit) {}

const Factor& Configuration::factorOf(std::size_t qubit) const {
    for (const auto& f : sigma) {
        if (f.mask & dmc::qubitBit(qubit)) {
            return f;
        }
    }
    throw quantum::UnknownQubitError("qubit index " + std::to_string(qubit) + " not in sigma");
}

std::size_t ConfigGraph::maxStep() const {
    std::size_t m = 0;
    for (const auto& n : nodes) {
        m = std::max(m, n.step);
    }
    return m;
}

quantum::PureStateVector Machine::factorState(const Factor& f) const {
    quantum::PureStateVector s;
    s.qubits = qubitNames(net_, f.mask);
    s.amplitudes = registry_.entry(f.state).amplitudes;
    return s;
}

std::vector<Factor> Machine::internFactors(const quantum::PureStateVector& state) {
    std::vector<Factor> out;
    for (auto& part : quantum::factorize(state).factors) {
        QubitSet mask = 0;
        for (const auto& q : part.qubits) {
            mask |= dmc::qubitBit(*net_.qubitIndex(q));
        }
        auto ordered = quantum::permute(part, qubitNames(net_, mask));
        out.push_back({mask, registry_.internIndex(ordered)});
    }
    return out;
}

std::vector<Configuration> Machine::initialConfigurations() {
    if (net_.agents.empty()) {
        return {};
    }
    Configuration base;
    for (const auto& init : net_.inits) {
        for (const auto& f : internFactors(init)) {
            base.sigma.push_back(f);
        }
    }
    sortSigma(base.sigma);
    std::vector<std::pair<std::size_t, std::size_t>> free;
    for (std::size_t i = 0; i < net_.agents.size(); ++i) {
        const auto& a = net_.agents[i];
        AgentState s;
        s.gamma.assign(a.vars.size(), kUndefined);
        for (std::size_t v = 0; v < a.vars.size(); ++v) {
            if (a.vars[v].role == dmc::VarRole::Input) {
                if (a.vars[v].pinned) {
                    s.gamma[v] = static_cast<std::int8_t>(*a.vars[v].pinned);
                } else {
                    free.push_back({i, v});
                }
            }
        }
        s.owned = a.owned;
        s.known = a.known;
        base.agents.push_back(std::move(s));
    }
    if (free.size() >= 31) {
        throw StateBudgetExceeded(std::size_t{1} << 31);
    }
    std::vector<Configuration> out;
    for (std::size_t bits = 0; bits < (std::size_t{1} << free.size()); ++bits) {
        Configuration c = base;
        for (std::size_t k = 0; k < free.size(); ++k) {
            auto [agent, var] = free[k];
            c.agents[agent].gamma[var] = static_cast<std::int8_t>((bits >> (free.size() - 1 - k)) & 1);
        }
        out.push_back(std::move(c));
    }
    return out;
}

double Machine::angleFor(const AgentState& a, const dmc::step::Measure& m) const {
    std::optional<int> s, t;
    if (m.sDep) {
        s = a.gamma[*m.sDep];
    }
    if (m.tDep) {
        t = a.gamma[*m.tDep];
    }
    return quantum::effectiveAngle(m.angle.radians, s, t);
}

std::vector<StepDescriptor> Machine::enabledSteps(const Configuration& c) const {
    std::vector<StepDescriptor> out;
    for (std::size_t i = 0; i < net_.agents.size(); ++i) {
        const auto* e = nextEvent(net_, c, i);
        if (!e) {
            continue;
        }
        std::visit(
            [&](const auto& ev) {
                using T = std::decay_t<decltype(ev)>;
                if constexpr (std::is_same_v<T, dmc::step::Entangle> || std::is_same_v<T, dmc::step::Correction>) {
                    out.push_back({StepKind::Local, i, i, -1});
                } else if constexpr (std::is_same_v<T, dmc::step::Measure>) {
                    auto state = factorState(c.factorOf(ev.qubit));
                    auto [plus, minus] =
                        quantum::measure(state, net_.qubits[ev.qubit], angleFor(c.agents[i], ev));
                    if (plus.probability >= quantum::kZeroProbability) {
                        out.push_back({StepKind::Local, i, i, 0});
                    }
                    if (minus.probability >= quantum::kZeroProbability) {
                        out.push_back({StepKind::Local, i, i, 1});
                    }
                } else if constexpr (std::is_same_v<T, dmc::step::SendBit>) {
                    const auto* r = nextEvent(net_, c, ev.to);
                    if (r) {
                        if (const auto* rb = std::get_if<dmc::step::RecvBit>(&r->body); rb && rb->from == i) {
                            out.push_back({StepKind::Classical, i, ev.to, -1});
                        }
                    }
                } else if constexpr (std::is_same_v<T, dmc::step::SendQubit>) {
                    const auto* r = nextEvent(net_, c, ev.to);
                    if (r) {
                        if (const auto* rq = std::get_if<dmc::step::RecvQubit>(&r->body); rq && rq->from == i) {
                            out.push_back({StepKind::Quantum, i, ev.to, -1});
                        }
                    }
                }
            },
            e->body);
    }
    std::sort(out.begin(), out.end());
    return out;
}

Configuration Machine::applyStep(const Configuration& c, const StepDescriptor& d) {
    auto enabled = enabledSteps(c);
    if (d.kind == StepKind::Idle) {
        if (!enabled.empty()) {
            throw IllegalStep("idle step in a configuration with enabled steps");
        }
        return c;
    }
    if (std::find(enabled.begin(), enabled.end(), d) == enabled.end()) {
        throw IllegalStep("step not enabled");
    }
    Configuration n = c;
    n.step = c.step + 1;
    AgentState& actor = n.agents[d.agent];
    const auto& event = *nextEvent(net_, c, d.agent);
    auto replace = [&](std::vector<QubitSet> drop, const std::vector<Factor>& add) {
        std::erase_if(n.sigma, [&](const Factor& f) {
            return std::find(drop.begin(), drop.end(), f.mask) != drop.end();
        });
        n.sigma.insert(n.sigma.end(), add.begin(), add.end());
        sortSigma(n.sigma);
    };
    if (const auto* en = std::get_if<dmc::step::Entangle>(&event.body)) {
        const Factor fq = c.factorOf(en->q);
        const Factor fr = c.factorOf(en->r);
        quantum::PureStateVector joint = factorState(fq);
        std::vector<QubitSet> drop{fq.mask};
        if (!(fq == fr)) {
            joint = quantum::tensor(joint, factorState(fr));
            drop.push_back(fr.mask);
        }
        joint = quantum::permute(joint, qubitNames(net_, fq.mask | fr.mask));
        joint = quantum::applyEntangle(joint, net_.qubits[en->q], net_.qubits[en->r]);
        replace(drop, internFactors(joint));
        actor.known &= ~(dmc::qubitBit(en->q) | dmc::qubitBit(en->r));
    } else if (const auto* m = std::get_if<dmc::step::Measure>(&event.body)) {
        const Factor f = c.factorOf(m->qubit);
        auto state = factorState(f);
        auto outcomes = quantum::measure(state, net_.qubits[m->qubit], angleFor(c.agents[d.agent], *m));
        const auto& o = d.outcome == 0 ? outcomes.first : outcomes.second;
        std::vector<Factor> add{{dmc::qubitBit(m->qubit), registry_.internIndex(o.collapsedQubitState)}};
        if (o.residual) {
            for (const auto& r : internFactors(*o.residual)) {
                add.push_back(r);
            }
        }
        replace({f.mask}, add);
        actor.gamma[m->outcome] = static_cast<std::int8_t>(d.outcome);
        actor.known |= dmc::qubitBit(m->qubit);
    } else if (const auto* corr = std::get_if<dmc::step::Correction>(&event.body)) {
        bool apply = !corr->condition || c.agents[d.agent].gamma[*corr->condition] == 1;
        if (apply) {
            const Factor f = c.factorOf(corr->qubit);
            auto state = quantum::applyCorrection(factorState(f), net_.qubits[corr->qubit], corr->pauli);
            replace({f.mask}, {{f.mask, registry_.internIndex(state)}});
        }
    } else if (const auto* sb = std::get_if<dmc::step::SendBit>(&event.body)) {
        const auto& recv = std::get<dmc::step::RecvBit>(nextEvent(net_, c, d.peer)->body);
        n.agents[d.peer].gamma[recv.var] = c.agents[d.agent].gamma[sb->var];
        n.agents[d.peer].eventIndex += 1;
    } else if (const auto* sq = std::get_if<dmc::step::SendQubit>(&event.body)) {
        actor.owned &= ~dmc::qubitBit(sq->qubit);
        actor.known &= ~dmc::qubitBit(sq->qubit);
        n.agents[d.peer].owned |= dmc::qubitBit(sq->qubit);
        n.agents[d.peer].eventIndex += 1;
    }
    actor.eventIndex += 1;
    return n;
}

namespace {

struct RawGraph {
    std::vector<Configuration> nodes;
    std::vector<std::vector<std::pair<StepDescriptor, std::size_t>>> succ;
    std::vector<std::size_t> initial;
};

RawGraph exploreRaw(const dmc::ValidatedNetwork& net, quantum::StateRegistry& registry, const ExploreOptions& opt) {
    Machine machine(net, registry);
    RawGraph g;
    std::unordered_map<std::vector<std::int64_t>, std::size_t, KeyHash> index;
    std::mt19937_64 rng(opt.seed.value_or(0));
    auto add = [&](Configuration c) -> std::size_t {
        auto key = keyOf(c);
        auto it = index.find(key);
        if (it != index.end()) {
            return it->second;
        }
        if (g.nodes.size() >= opt.maxStates) {
            throw StateBudgetExceeded(opt.maxStates);
        }
        std::size_t id = g.nodes.size();
        index.emplace(std::move(key), id);
        g.nodes.push_back(std::move(c));
        g.succ.emplace_back();
        return id;
    };
    std::vector<std::size_t> layer;
    for (auto& c : machine.initialConfigurations()) {
        std::size_t id = add(std::move(c));
        if (std::find(g.initial.begin(), g.initial.end(), id) == g.initial.end()) {
            g.initial.push_back(id);
            layer.push_back(id);
        }
    }
    while (!layer.empty()) {
        if (opt.seed) {
            std::shuffle(layer.begin(), layer.end(), rng);
        }
        std::vector<std::size_t> nextLayer;
        for (std::size_t id : layer) {
            auto steps = machine.enabledSteps(g.nodes[id]);
            if (steps.empty()) {
                g.succ[id].push_back({StepDescriptor{}, id});
                continue;
            }
            if (opt.seed) {
                std::shuffle(steps.begin(), steps.end(), rng);
            }
            for (const auto& d : steps) {
                std::size_t before = g.nodes.size();
                Configuration target = machine.applyStep(g.nodes[id], d);
                std::size_t to = add(std::move(target));
                if (to == before) {
                    nextLayer.push_back(to);
                }
                g.succ[id].push_back({d, to});
            }
        }
        layer = std::move(nextLayer);
    }
    return g;
}

}  // namespace

ConfigGraph explore(const dmc::ValidatedNetwork& net, const ExploreOptions& options) {
    quantum::StateRegistry provisional;
    RawGraph raw = exploreRaw(net, provisional, options);
    for (auto& s : raw.succ) {
        std::sort(s.begin(), s.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
    }

    // Canonical numbering: breadth first from the initial nodes, successors in descriptor order.
    std::vector<std::size_t> order;
    std::vector<std::size_t> newId(raw.nodes.size(), SIZE_MAX);
    for (std::size_t id : raw.initial) {
        newId[id] = order.size();
        order.push_back(id);
    }
    for (std::size_t k = 0; k < order.size(); ++k) {
        for (const auto& [d, to] : raw.succ[order[k]]) {
            if (newId[to] == SIZE_MAX) {
                newId[to] = order.size();
                order.push_back(to);
            }
        }
    }

    ConfigGraph g;
    // Names: initial factors first, then per layer the factors each edge creates.
    auto entryState = [&](std::size_t provisionalId) {
        const auto& e = provisional.entry(provisionalId);
        quantum::PureStateVector s;
        s.qubits.resize(e.qubitCount);
        for (std::size_t i = 0; i < e.qubitCount; ++i) {
            s.qubits[i] = "q" + std::to_string(i);
        }
        s.amplitudes = e.amplitudes;
        return s;
    };
    std::vector<std::size_t> finalId(provisional.size(), SIZE_MAX);
    auto name = [&](std::size_t provisionalId) {
        if (finalId[provisionalId] == SIZE_MAX) {
            finalId[provisionalId] = g.registry.internIndex(entryState(provisionalId));
        }
    };
    for (std::size_t id : raw.initial) {
        for (const auto& f : raw.nodes[id].sigma) {
            name(f.state);
        }
    }
    using Candidate = std::tuple<int, int, std::size_t, std::size_t, std::size_t, std::size_t>;
    std::size_t k = 0;
    while (k < order.size()) {
        std::size_t step = raw.nodes[order[k]].step;
        std::vector<Candidate> candidates;
        for (; k < order.size() && raw.nodes[order[k]].step == step; ++k) {
            const auto& src = raw.nodes[order[k]];
            const auto& succ = raw.succ[order[k]];
            for (std::size_t di = 0; di < succ.size(); ++di) {
                const auto& [d, to] = succ[di];
                if (d.kind == StepKind::Idle) {
                    continue;
                }
                const auto& dst = raw.nodes[to];
                std::optional<std::size_t> measured;
                if (d.outcome >= 0) {
                    const auto& ev = std::get<dmc::step::Measure>(nextEvent(net, src, d.agent)->body);
                    measured = ev.qubit;
                }
                for (std::size_t pos = 0; pos < dst.sigma.size(); ++pos) {
                    const Factor& f = dst.sigma[pos];
                    if (std::find(src.sigma.begin(), src.sigma.end(), f) != src.sigma.end()) {
                        continue;
                    }
                    int category = (measured && f.mask == dmc::qubitBit(*measured)) ? 0 : 1;
                    candidates.emplace_back(category, std::max(d.outcome, 0), newId[order[k]], di, pos, f.state);
                }
            }
        }
        std::sort(candidates.begin(), candidates.end());
        for (const auto& c : candidates) {
            name(std::get<5>(c));
        }
    }
    for (std::size_t p = 0; p < provisional.size(); ++p) {
        name(p);
    }

    g.nodes.resize(order.size());
    g.edgeBegin.assign(order.size() + 1, 0);
    for (std::size_t n = 0; n < order.size(); ++n) {
        Configuration c = raw.nodes[order[n]];
        for (auto& f : c.sigma) {
            f.state = finalId[f.state];
        }
        g.nodes[n] = std::move(c);
        g.edgeBegin[n] = g.edges.size();
        for (const auto& [d, to] : raw.succ[order[n]]) {
            g.edges.push_back({n, newId[to], d});
        }
    }
    g.edgeBegin[order.size()] = g.edges.size();
    for (std::size_t id : raw.initial) {
        g.initial.push_back(newId[id]);
    }
    return g;
}

std::string describeStep(const dmc::ValidatedNetwork& net, const Configuration& from, const StepDescriptor& d) {
    if (d.kind == StepKind::Idle) {
        return "idle";
    }
    const auto& agent = net.agents[d.agent];
    const auto& event = *nextEvent(net, from, d.agent);
    auto var = [&](const dmc::ResolvedAgent& a, std::size_t v) { return a.vars[v].name; };
    return std::visit(
        [&](const auto& ev) -> std::string {
            using T = std::decay_t<decltype(ev)>;
            if constexpr (std::is_same_v<T, dmc::step::Entangle>) {
                return agent.name + ": E(" + net.qubits[ev.q] + "," + net.qubits[ev.r] + ")";
            } else if constexpr (std::is_same_v<T, dmc::step::Measure>) {
                return agent.name + ": " + var(agent, ev.outcome) + "=M(" + net.qubits[ev.qubit] + ")=" +
                       std::to_string(d.outcome);
            } else if constexpr (std::is_same_v<T, dmc::step::Correction>) {
                std::string op = std::string(ev.pauli == quantum::Pauli::X ? "X(" : "Z(") + net.qubits[ev.qubit] + ")";
                bool apply = !ev.condition || from.agents[d.agent].gamma[*ev.condition] == 1;
                return agent.name + ": " + (apply ? op : "skip " + op);
            } else if constexpr (std::is_same_v<T, dmc::step::SendBit>) {
                const auto& recv = std::get<dmc::step::RecvBit>(nextEvent(net, from, d.peer)->body);
                return agent.name + "->" + net.agents[d.peer].name + ": " + var(agent, ev.var) + "=" +
                       std::to_string(from.agents[d.agent].gamma[ev.var]) + " into " +
                       var(net.agents[d.peer], recv.var);
            } else if constexpr (std::is_same_v<T, dmc::step::SendQubit>) {
                return agent.name + "->" + net.agents[d.peer].name + ": " + net.qubits[ev.qubit];
            } else {
                return agent.name + ": ?";
            }
        },
        event.body);
}

std::string outcomeBits(const dmc::ValidatedNetwork& net, const Configuration& c) {
    std::string out;
    for (std::size_t i = 0; i < net.agents.size(); ++i) {
        for (std::size_t v = 0; v < net.agents[i].vars.size(); ++v) {
            if (net.agents[i].vars[v].role == dmc::VarRole::Signal && c.agents[i].gamma[v] != kUndefined) {
                out += static_cast<char>('0' + c.agents[i].gamma[v]);
            }
        }
    }
    return out;
}

std::vector<std::size_t> localClasses(const ConfigGraph& g, std::size_t agent) {
    std::map<std::pair<std::vector<std::int8_t>, std::size_t>, std::size_t> ids;
    std::vector<std::size_t> out(g.nodes.size());
    for (std::size_t n = 0; n < g.nodes.size(); ++n) {
        const auto& a = g.nodes[n].agents[agent];
        auto [it, fresh] = ids.emplace(std::make_pair(a.gamma, a.eventIndex), ids.size());
        out[n] = it->second;
    }
    return out;
}

void writeDot(std::ostream& out, const dmc::ValidatedNetwork& net, const ConfigGraph& g, bool epistemic) {
    out << "digraph \"" << net.name << "\" {\n";
    out << "  node [shape=ellipse];\n";
    for (std::size_t n = 0; n < g.nodes.size(); ++n) {
        out << "  n" << n << " [label=<C<sub>" << g.nodes[n].step << "</sub><sup>" << outcomeBits(net, g.nodes[n])
            << "</sup>>";
        if (std::find(g.initial.begin(), g.initial.end(), n) != g.initial.end()) {
            out << ", peripheries=2";
        }
        out << "];\n";
    }
    for (const auto& e : g.edges) {
        out << "  n" << e.from << " -> n" << e.to << " [label=\"" << describeStep(net, g.nodes[e.from], e.step)
            << "\"];\n";
    }
    if (epistemic) {
        for (std::size_t a = 0; a < net.agents.size(); ++a) {
            auto classes = localClasses(g, a);
            std::map<std::size_t, std::size_t> last;
            for (std::size_t n = 0; n < g.nodes.size(); ++n) {
                auto it = last.find(classes[n]);
                if (it != last.end()) {
                    out << "  n" << it->second << " -> n" << n << " [style=dashed, dir=none, color=gray, label=\""
                        << net.agents[a].name << "\"];\n";
                }
                last[classes[n]] = n;
            }
        }
    }
    out << "}\n";
}

std::optional<std::size_t> qubitName(const Configuration& c, std::size_t qubit) {
    const Factor& f = c.factorOf(qubit);
    if (f.mask != dmc::qubitBit(qubit)) {
        return std::nullopt;
    }
    return f.state;
}

namespace {

struct AtomEval {
    const dmc::ValidatedNetwork& net;
    const ConfigGraph& g;
    const Configuration& c;

    std::size_t agent(const std::string& name) const {
        auto i = net.agentIndex(name);
        if (!i) {
            throw std::invalid_argument("unknown agent " + name);
        }
        return *i;
    }
    std::size_t qubit(const std::string& name) const {
        auto i = net.qubitIndex(name);
        if (!i) {
            throw std::invalid_argument("unknown qubit " + name);
        }
        return *i;
    }
    int value(const logic::VarRef& v) const {
        std::size_t a = agent(v.agent);
        auto i = net.agents[a].varIndex(v.var);
        if (!i) {
            throw std::invalid_argument("unknown variable " + v.agent + "." + v.var);
        }
        return c.agents[a].gamma[*i];
    }

    bool operator()(const logic::VarEq& a) const { return value(a.var) == a.value; }
    bool operator()(const logic::VarEqVar& a) const {
        int l = value(a.lhs);
        int r = value(a.rhs);
        return l != kUndefined && l == r;
    }
    bool operator()(const logic::Has& a) const {
        return (c.agents[agent(a.agent)].owned & dmc::qubitBit(qubit(a.qubit))) != 0;
    }
    bool operator()(const logic::QubitIsKet& a) const {
        std::size_t q = qubit(a.qubit);
        if (a.amplitudes.size() != 2) {
            throw std::invalid_argument("ket for " + a.qubit + " needs 2 amplitudes");
        }
        auto ket = quantum::PureStateVector::make({a.qubit}, a.amplitudes);
        auto id = g.registry.find(ket.amplitudes);
        auto name = qubitName(c, q);
        return id && name && *id == *name;
    }
    bool operator()(const logic::QubitEqQubit& a) const {
        auto l = qubitName(c, qubit(a.lhs));
        auto r = qubitName(c, qubit(a.rhs));
        return l && r && *l == *r;
    }
    bool operator()(const logic::QubitEqInit& a) const {
        std::size_t q = qubit(a.qubit);
        std::size_t p = qubit(a.initOf);
        if (g.initial.empty()) {
            return false;
        }
        auto init = qubitName(g.nodes[g.initial.front()], p);
        auto now = qubitName(c, q);
        return init && now && *init == *now;
    }
    bool operator()(const logic::NamedProp& a) const {
        throw std::invalid_argument("named proposition " + a.name + " has no configuration meaning");
    }
};

}  // namespace

bool evalAtom(const dmc::ValidatedNetwork& net, const ConfigGraph& g, const Configuration& c, const logic::Atom& atom) {
    return std::visit(AtomEval{net, g, c}, atom);
}

}  // namespace dmcv::semantics
