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

#include "dmcv/model_checker.hpp"

#include <algorithm>
#include <chrono>
#include <deque>
#include <memory>
#include <sstream>

namespace dmcv::mc {

namespace {

using logic::Op;

StateSet negate(StateSet s) {
    s.flip();
    return s;
}

StateSet meet(StateSet a, const StateSet& b) {
    for (std::size_t i = 0; i < a.size(); ++i) {
        a[i] = a[i] && b[i];
    }
    return a;
}

StateSet join(StateSet a, const StateSet& b) {
    for (std::size_t i = 0; i < a.size(); ++i) {
        a[i] = a[i] || b[i];
    }
    return a;
}

std::size_t count(const StateSet& s) { return static_cast<std::size_t>(std::count(s.begin(), s.end(), true)); }

/// Dense ids for equal keys, in first-appearance order.
template <typename Key>
std::vector<std::size_t> classify(const std::vector<Key>& keys) {
    std::map<Key, std::size_t> ids;
    std::vector<std::size_t> out;
    out.reserve(keys.size());
    for (const auto& k : keys) {
        out.push_back(ids.emplace(k, ids.size()).first->second);
    }
    return out;
}

}  // namespace

std::optional<std::size_t> StateGraph::agentIndex(const std::string& name) const {
    for (std::size_t i = 0; i < agents.size(); ++i) {
        if (agents[i] == name) {
            return i;
        }
    }
    return std::nullopt;
}

StateGraph buildStateGraph(const is::InterpretedSystem& is, std::size_t maxStates) {
    return buildStateGraph(is, is::reachable(is, maxStates));
}

StateGraph buildStateGraph(const is::InterpretedSystem& is, is::Reachable reachable) {
    auto r = std::make_shared<is::Reachable>(std::move(reachable));
    StateGraph g;
    g.successors = r->successors;
    g.initial = r->initial;
    for (std::size_t i = 0; i < is.agents.size(); ++i) {
        g.agents.push_back(is.agents[i].name);
        std::vector<is::LocalState> keys;
        keys.reserve(r->states.size());
        for (const auto& s : r->states) {
            keys.push_back(s.agents[i]);
        }
        g.localClass.push_back(classify(keys));
    }
    for (const auto& grp : is.groups) {
        g.groups[grp.name] = grp.members;
    }
    for (const auto& p : is.props) {
        StateSet label(r->states.size());
        for (std::size_t s = 0; s < r->states.size(); ++s) {
            label[s] = is::holds(p, r->states[s]);
        }
        g.labels[p.name] = std::move(label);
    }
    auto system = std::make_shared<is::InterpretedSystem>(is);
    g.describe = [system, r](std::size_t s) { return is::describe(*system, r->states[s]); };
    return g;
}

StateGraph fromConfigGraph(const dmc::ValidatedNetwork& net, const semantics::ConfigGraph& graph) {
    StateGraph g;
    g.successors.resize(graph.nodes.size());
    for (const auto& e : graph.edges) {
        auto& succ = g.successors[e.from];
        if (std::find(succ.begin(), succ.end(), e.to) == succ.end()) {
            succ.push_back(e.to);
        }
    }
    g.initial = graph.initial;
    for (std::size_t i = 0; i < net.agents.size(); ++i) {
        g.agents.push_back(net.agents[i].name);
        g.localClass.push_back(semantics::localClasses(graph, i));
    }
    for (const auto& grp : net.groups) {
        g.groups[grp.name] = grp.members;
    }
    auto netCopy = std::make_shared<dmc::ValidatedNetwork>(net);
    auto graphCopy = std::make_shared<semantics::ConfigGraph>(graph);
    g.atomLabeler = [netCopy, graphCopy](const logic::Atom& a) {
        StateSet out(graphCopy->nodes.size());
        for (std::size_t n = 0; n < out.size(); ++n) {
            out[n] = semantics::evalAtom(*netCopy, *graphCopy, graphCopy->nodes[n], a);
        }
        return out;
    };
    g.describe = [netCopy, graphCopy](std::size_t n) {
        const auto& c = graphCopy->nodes[n];
        std::string bits = semantics::outcomeBits(*netCopy, c);
        return "C" + std::to_string(c.step) + (bits.empty() ? "" : "^" + bits) + " #" + std::to_string(n);
    };
    return g;
}

// ---------------------------------------------------------------------------

Checker::Checker(const StateGraph& graph) : g_(graph), preds_(graph.size()) {
    for (std::size_t s = 0; s < g_.size(); ++s) {
        for (auto t : g_.successors[s]) {
            preds_[t].push_back(s);
        }
    }
}

StateSet Checker::pre(const StateSet& s) const {
    StateSet out(g_.size());
    for (std::size_t t = 0; t < g_.size(); ++t) {
        if (s[t]) {
            for (auto p : preds_[t]) {
                out[p] = true;
            }
        }
    }
    return out;
}

StateSet Checker::until(const StateSet& a, const StateSet& b) const {
    StateSet out = b;
    std::deque<std::size_t> work;
    for (std::size_t s = 0; s < g_.size(); ++s) {
        if (b[s]) {
            work.push_back(s);
        }
    }
    while (!work.empty()) {
        std::size_t t = work.front();
        work.pop_front();
        for (auto p : preds_[t]) {
            if (!out[p] && a[p]) {
                out[p] = true;
                work.push_back(p);
            }
        }
    }
    return out;
}

StateSet Checker::globally(const StateSet& a) const {
    StateSet out = a;
    std::vector<std::size_t> live(g_.size(), 0);
    std::deque<std::size_t> work;
    for (std::size_t s = 0; s < g_.size(); ++s) {
        if (!out[s]) {
            continue;
        }
        for (auto t : g_.successors[s]) {
            live[s] += out[t] ? 1 : 0;
        }
        if (live[s] == 0) {
            work.push_back(s);
        }
    }
    while (!work.empty()) {
        std::size_t t = work.front();
        work.pop_front();
        if (!out[t]) {
            continue;
        }
        out[t] = false;
        for (auto p : preds_[t]) {
            if (out[p] && --live[p] == 0) {
                work.push_back(p);
            }
        }
    }
    return out;
}

StateSet Checker::knows(const std::vector<std::size_t>& classOf, const StateSet& s) const {
    std::size_t classes = classOf.empty() ? 0 : *std::max_element(classOf.begin(), classOf.end()) + 1;
    std::vector<bool> all(classes, true);
    for (std::size_t x = 0; x < g_.size(); ++x) {
        if (!s[x]) {
            all[classOf[x]] = false;
        }
    }
    StateSet out(g_.size());
    for (std::size_t x = 0; x < g_.size(); ++x) {
        out[x] = all[classOf[x]];
    }
    return out;
}

std::vector<std::size_t> Checker::members(const std::string& group) const {
    auto it = g_.groups.find(group);
    if (it == g_.groups.end()) {
        throw UnknownName("unknown group " + group);
    }
    return it->second;
}

const std::vector<std::size_t>& Checker::classesOf(const std::string& who, Op op) {
    if (op == Op::K) {
        auto i = g_.agentIndex(who);
        if (!i) {
            throw UnknownName("unknown agent " + who);
        }
        return g_.localClass[*i];
    }
    auto it = distributed_.find(who);
    if (it != distributed_.end()) {
        return it->second;
    }
    auto m = members(who);
    std::vector<std::vector<std::size_t>> keys(g_.size());
    for (std::size_t s = 0; s < g_.size(); ++s) {
        for (auto i : m) {
            keys[s].push_back(g_.localClass[i][s]);
        }
    }
    return distributed_[who] = classify(keys);
}

const StateSet& Checker::sat(const logic::Formula& f) {
    std::string key = logic::toString(f);
    auto it = cache_.find(key);
    if (it != cache_.end()) {
        return it->second;
    }
    StateSet s = compute(f);
    return cache_[key] = std::move(s);
}

StateSet Checker::compute(const logic::Formula& f) {
    const std::size_t n = g_.size();
    auto child = [&](std::size_t i) -> const StateSet& { return sat(*f.children.at(i)); };
    switch (f.op) {
        case Op::True: return StateSet(n, true);
        case Op::Atom: {
            if (const auto* p = std::get_if<logic::NamedProp>(&f.atom)) {
                auto it = g_.labels.find(p->name);
                if (it == g_.labels.end()) {
                    throw UnknownName("unknown proposition " + p->name);
                }
                return it->second;
            }
            if (!g_.atomLabeler) {
                throw UnknownName("no labeling for atom " + logic::toString(f.atom));
            }
            return g_.atomLabeler(f.atom);
        }
        case Op::Not: return negate(child(0));
        case Op::And: return meet(child(0), child(1));
        case Op::Or: return join(child(0), child(1));
        case Op::Implies: return join(negate(child(0)), child(1));
        case Op::EX: return pre(child(0));
        case Op::AX: return negate(pre(negate(child(0))));
        case Op::EF: return until(StateSet(n, true), child(0));
        case Op::AF: return negate(globally(negate(child(0))));
        case Op::EG: return globally(child(0));
        case Op::AG: return negate(until(StateSet(n, true), negate(child(0))));
        case Op::EU: return until(child(0), child(1));
        case Op::AU: {
            StateSet notB = negate(child(1));
            StateSet bad = join(until(notB, meet(negate(child(0)), notB)), globally(notB));
            return negate(bad);
        }
        case Op::K:
        case Op::DK: return knows(classesOf(f.who, f.op), child(0));
        case Op::GK: {
            StateSet out(n, true);
            for (auto i : members(f.who)) {
                out = meet(out, knows(g_.localClass[i], child(0)));
            }
            return out;
        }
        case Op::CK: {
            auto m = members(f.who);
            const StateSet& phi = child(0);
            StateSet x(n, true);
            while (true) {
                StateSet target = meet(phi, x);
                StateSet next(n, true);
                for (auto i : m) {
                    next = meet(next, knows(g_.localClass[i], target));
                }
                if (next == x) {
                    return x;
                }
                x = std::move(next);
            }
        }
    }
    return StateSet(n);
}

// ---------------------------------------------------------------------------
// Witnesses

std::optional<std::vector<std::size_t>> Checker::pathTo(std::size_t from, const StateSet& through,
                                                        const StateSet& target) const {
    std::vector<std::size_t> parent(g_.size(), SIZE_MAX);
    std::deque<std::size_t> work{from};
    parent[from] = from;
    while (!work.empty()) {
        std::size_t s = work.front();
        work.pop_front();
        if (target[s]) {
            std::vector<std::size_t> path{s};
            while (path.back() != from) {
                path.push_back(parent[path.back()]);
            }
            std::reverse(path.begin(), path.end());
            return path;
        }
        if (!through[s]) {
            continue;
        }
        for (auto t : g_.successors[s]) {
            if (parent[t] == SIZE_MAX) {
                parent[t] = s;
                work.push_back(t);
            }
        }
    }
    return std::nullopt;
}

Witness Checker::lasso(std::size_t from, const StateSet& inside) const {
    Witness w;
    std::vector<std::size_t> position(g_.size(), SIZE_MAX);
    std::size_t s = from;
    while (position[s] == SIZE_MAX) {
        position[s] = w.path.size();
        w.path.push_back(s);
        for (auto t : g_.successors[s]) {
            if (inside[t]) {
                s = t;
                break;
            }
        }
    }
    w.loopStart = position[s];
    return w;
}

std::optional<std::size_t> Checker::partner(const std::vector<std::size_t>& classOf, std::size_t s,
                                            const StateSet& want, bool preferDistinct) const {
    std::optional<std::size_t> fallback;
    for (std::size_t t = 0; t < g_.size(); ++t) {
        if (classOf[t] == classOf[s] && want[t]) {
            if (t != s || !preferDistinct) {
                return t;
            }
            fallback = t;
        }
    }
    return fallback;
}

std::optional<Witness> Checker::explain(const logic::Formula& f, std::size_t s, bool wanted) {
    const std::size_t n = g_.size();
    auto child = [&](std::size_t i) -> const logic::Formula& { return *f.children.at(i); };
    auto extend = [&](std::vector<std::size_t> path, const logic::Formula& tail, bool tailWanted) {
        Witness w;
        w.path = std::move(path);
        if (auto sub = explain(tail, w.path.back(), tailWanted)) {
            if (!sub->path.empty()) {
                std::size_t offset = w.path.size() - 1;
                w.path.insert(w.path.end(), sub->path.begin() + 1, sub->path.end());
                if (sub->loopStart) {
                    w.loopStart = *sub->loopStart + offset;
                }
            }
            w.pair = sub->pair;
            w.relation = sub->relation;
        }
        return w;
    };
    auto pairWith = [&](const std::vector<std::size_t>& classOf, const StateSet& want, bool distinct,
                        const std::string& relation) -> std::optional<Witness> {
        auto t = partner(classOf, s, want, distinct);
        if (!t) {
            return std::nullopt;
        }
        Witness w;
        w.path = {s};
        w.pair = std::make_pair(s, *t);
        w.relation = relation;
        return w;
    };

    switch (f.op) {
        case Op::Not: return explain(child(0), s, !wanted);
        case Op::And:
            if (!wanted) {
                for (const auto& c : f.children) {
                    if (!sat(*c)[s]) {
                        return explain(*c, s, false);
                    }
                }
            }
            return explain(child(0), s, true);
        case Op::Or:
            if (wanted) {
                for (const auto& c : f.children) {
                    if (sat(*c)[s]) {
                        return explain(*c, s, true);
                    }
                }
            }
            return std::nullopt;
        case Op::Implies:
            if (!wanted) {
                return explain(child(1), s, false);
            }
            return sat(child(1))[s] ? explain(child(1), s, true) : explain(child(0), s, false);
        case Op::EX:
        case Op::AX: {
            bool existential = f.op == Op::EX;
            if (existential != wanted) {
                return std::nullopt;
            }
            const StateSet& c = sat(child(0));
            for (auto t : g_.successors[s]) {
                if (c[t] == wanted) {
                    return extend({s, t}, child(0), wanted);
                }
            }
            return std::nullopt;
        }
        case Op::EF:
        case Op::AG: {
            bool existential = f.op == Op::EF;
            if (existential != wanted) {
                return std::nullopt;
            }
            StateSet target = existential ? sat(child(0)) : negate(sat(child(0)));
            std::optional<std::vector<std::size_t>> path;
            if (existential && (child(0).op == Op::K || child(0).op == Op::DK)) {
                const auto& classOf = classesOf(child(0).who, child(0).op);
                std::vector<std::size_t> size(n, 0);
                for (auto c : classOf) {
                    ++size[c];
                }
                StateSet shared(n);
                for (std::size_t x = 0; x < n; ++x) {
                    shared[x] = target[x] && size[classOf[x]] > 1;
                }
                path = pathTo(s, StateSet(n, true), shared);
            }
            if (!path) {
                path = pathTo(s, StateSet(n, true), target);
            }
            if (!path) {
                return std::nullopt;
            }
            return extend(*path, child(0), wanted);
        }
        case Op::EG:
        case Op::AF: {
            bool existential = f.op == Op::EG;
            if (existential != wanted) {
                return std::nullopt;
            }
            StateSet inside = globally(existential ? sat(child(0)) : negate(sat(child(0))));
            if (!inside[s]) {
                return std::nullopt;
            }
            return lasso(s, inside);
        }
        case Op::EU: {
            if (!wanted) {
                return std::nullopt;
            }
            auto path = pathTo(s, sat(child(0)), sat(child(1)));
            if (!path) {
                return std::nullopt;
            }
            Witness w;
            w.path = *path;
            return w;
        }
        case Op::AU: {
            if (wanted) {
                return std::nullopt;
            }
            StateSet notA = negate(sat(child(0)));
            StateSet notB = negate(sat(child(1)));
            if (auto path = pathTo(s, meet(sat(child(0)), notB), meet(notA, notB))) {
                Witness w;
                w.path = *path;
                return w;
            }
            StateSet inside = globally(notB);
            if (!inside[s]) {
                return std::nullopt;
            }
            return lasso(s, inside);
        }
        case Op::K:
        case Op::DK: {
            const auto& classOf = classesOf(f.who, f.op);
            const StateSet& c = sat(child(0));
            return wanted ? pairWith(classOf, c, true, f.who) : pairWith(classOf, negate(c), false, f.who);
        }
        case Op::GK: {
            const StateSet& c = sat(child(0));
            for (auto i : members(f.who)) {
                if (wanted) {
                    return pairWith(g_.localClass[i], c, true, g_.agents[i]);
                }
                if (auto w = pairWith(g_.localClass[i], negate(c), false, g_.agents[i])) {
                    return w;
                }
            }
            return std::nullopt;
        }
        case Op::CK: {
            if (wanted) {
                return std::nullopt;
            }
            const StateSet& c = sat(child(0));
            StateSet x = sat(f);
            for (auto i : members(f.who)) {
                StateSet bad = negate(meet(c, x));
                if (auto w = pairWith(g_.localClass[i], bad, false, g_.agents[i])) {
                    return w;
                }
            }
            return std::nullopt;
        }
        case Op::True:
        case Op::Atom: return std::nullopt;
    }
    return std::nullopt;
}

FormulaResult Checker::check(const logic::FormulaPtr& f) {
    cache_.clear();
    auto start = std::chrono::steady_clock::now();
    FormulaResult r;
    r.formula = logic::toString(*f);
    const StateSet& s = sat(*f);
    r.satisfyingStates = count(s);
    r.verdict = std::all_of(g_.initial.begin(), g_.initial.end(), [&](std::size_t i) { return s[i]; });
    if (!r.verdict) {
        for (auto i : g_.initial) {
            if (!s[i]) {
                r.witness = explain(*f, i, false);
                break;
            }
        }
    }
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return r;
}

bool VerificationReport::allTrue() const {
    return std::all_of(results.begin(), results.end(), [](const FormulaResult& r) { return r.verdict; });
}

VerificationReport checkAll(const StateGraph& graph, const std::vector<logic::FormulaPtr>& formulas) {
    Checker checker(graph);
    VerificationReport out;
    for (const auto& f : formulas) {
        out.results.push_back(checker.check(f));
    }
    return out;
}

std::string formatWitness(const StateGraph& graph, const Witness& w) {
    auto name = [&](std::size_t s) {
        return graph.describe ? graph.describe(s) : "s" + std::to_string(s);
    };
    std::ostringstream out;
    for (std::size_t i = 0; i < w.path.size(); ++i) {
        out << (i == 0 ? "  " : "  -> ") << name(w.path[i]);
        if (w.loopStart && *w.loopStart == i) {
            out << "  [loop start]";
        }
        out << "\n";
    }
    if (w.loopStart) {
        out << "  -> back to step " << *w.loopStart << "\n";
    }
    if (w.pair) {
        out << "  indistinguishable for " << w.relation << ":\n    " << name(w.pair->first) << "\n    "
            << name(w.pair->second) << "\n";
    }
    return out.str();
}

}  // namespace dmcv::mc
