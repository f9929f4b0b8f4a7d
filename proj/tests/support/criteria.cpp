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

#include "criteria.hpp"

#include <chrono>
#include <cmath>
#include <map>
#include <memory>
#include <numbers>
#include <set>
#include <sstream>

#include "dmcv/dmcv.h"
#include "dmcv/pipeline.hpp"
#include "testkit.hpp"

namespace criteria {

namespace {

using Clock = std::chrono::steady_clock;
using testkit::Amp;
using testkit::Vec;

struct SessionDeleter {
    void operator()(dmcv_session* s) const { dmcv_session_destroy(s); }
};
using Session = std::unique_ptr<dmcv_session, SessionDeleter>;

Session openSession(const std::string& protocol, std::optional<std::uint64_t> seed = std::nullopt) {
    dmcv_session* raw = nullptr;
    if (dmcv_session_create(&raw) != DMCV_OK) {
        throw std::runtime_error("cannot create session");
    }
    Session s(raw);
    std::string src = testkit::readProtocol(protocol);
    dmcv_load_source(raw, src.data(), src.size());
    if (seed) {
        dmcv_set_seed(raw, *seed);
    }
    return s;
}

struct Run {
    std::vector<int> verdicts;
    double seconds = 0.0;
    int crosscheck = -1;
    dmcv_status status = DMCV_OK;
};

Run runCheck(const std::string& protocol) {
    Run r;
    auto t0 = Clock::now();
    Session s = openSession(protocol);
    r.status = dmcv_check(s.get());
    r.seconds = std::chrono::duration<double>(Clock::now() - t0).count();
    for (std::size_t i = 0; i < dmcv_formula_count(s.get()); ++i) {
        r.verdicts.push_back(dmcv_formula_verdict(s.get(), i));
    }
    r.crosscheck = dmcv_crosscheck_ok(s.get());
    return r;
}

std::string verdictText(const std::vector<int>& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) {
        s += (i ? "," : "") + std::string(v[i] == 1 ? "T" : v[i] == 0 ? "F" : "?");
    }
    return s;
}

std::string seconds(double x) {
    std::ostringstream out;
    out.precision(3);
    out << std::fixed << x << " s";
    return out.str();
}

Outcome verdictsMatch(const std::string& protocol, const std::vector<int>& expected) {
    Run r = runCheck(protocol);
    bool ok = r.verdicts == expected && r.seconds < kRuntimeLimitSeconds &&
              (r.status == DMCV_OK || r.status == DMCV_FORMULA_FALSE);
    return {ok, protocol + " " + verdictText(r.verdicts) + " expected " + verdictText(expected) + " in " +
                    seconds(r.seconds)};
}

dmcv::pipeline::Options defaults() { return {}; }

}  // namespace

Outcome qtpVerdicts() { return verdictsMatch("qtp.dmc", {1, 1, 1, 0}); }

Outcome qtpRegistry() {
    const double a = 0.6;
    const double b = 0.8;
    const double h = std::numbers::sqrt2 / 2.0;
    std::vector<std::pair<std::string, Vec>> table = {
        {"qs1", {a, b}},
        {"qs2", {0.5, 0.5, 0.5, -0.5}},
        {"qs3", {a / 2, a / 2, a / 2, -a / 2, b / 2, b / 2, -b / 2, b / 2}},
        {"qs4", {h, h}},
        {"qs5", {h, -h}},
        {"qs6", {(a + b) / 2, (a + b) / 2, (a - b) / 2, (-a + b) / 2}},
        {"qs7", {(a - b) / 2, (a - b) / 2, (a + b) / 2, (-a - b) / 2}},
        {"qs8", {a, -b}},
        {"qs9", {b, a}},
        {"qs10", {-b, a}},
    };
    auto c = dmcv::pipeline::compile(testkit::readProtocol("qtp.dmc"), defaults());
    const auto& reg = c.graph.registry;
    std::ostringstream detail;
    bool ok = reg.size() == table.size();
    double worst = 0.0;
    for (const auto& [name, vec] : table) {
        Vec want = testkit::canonical(vec);
        bool found = false;
        for (const auto& e : reg.entries()) {
            if (e.name != name) {
                continue;
            }
            found = true;
            double d = INFINITY;
            if (e.amplitudes.size() == want.size()) {
                d = 0.0;
                for (std::size_t i = 0; i < want.size(); ++i) {
                    d = std::max(d, std::abs(e.amplitudes[i] - want[i]));
                }
            }
            worst = std::max(worst, d);
            if (!(d <= kRegistryTolerance)) {
                ok = false;
                detail << name << " off by " << d << "; ";
            }
        }
        if (!found) {
            ok = false;
            detail << name << " missing; ";
        }
    }
    detail << reg.size() << " names, max deviation " << worst;
    return {ok, detail.str()};
}

Outcome qtpWitness() {
    auto opts = defaults();
    auto c = dmcv::pipeline::compile(testkit::readProtocol("qtp.dmc"), opts);
    auto k = dmcv::pipeline::check(c, opts);
    const auto& results = k.verification.results;
    if (results.size() != 4 || results[3].verdict || !results[3].witness || !results[3].witness->pair) {
        return {false, "fourth formula has no indistinguishable pair"};
    }
    const auto& sys = c.assembly.system;
    const auto& states = k.reachable.states;
    const auto& w = *results[3].witness;
    auto [s, t] = *w.pair;
    auto alice = sys.agentIndex("Alice");
    auto q3 = sys.environment.varIndex("q3");
    auto init1 = sys.environment.varIndex("init_q1");
    if (!alice || !q3 || !init1) {
        return {false, "missing Alice, q3 or init_q1 in the system"};
    }
    auto holds = [&](std::size_t x) {
        const auto& env = states[x].env;
        return env[*q3] != dmcv::is::kUndef && env[*q3] == env[*init1];
    };
    bool sameView = states[s].agents[*alice] == states[t].agents[*alice];
    bool pathOk = !w.path.empty() && w.path.back() == s &&
                  std::find(k.reachable.initial.begin(), k.reachable.initial.end(), w.path.front()) !=
                      k.reachable.initial.end();
    for (std::size_t i = 0; pathOk && i + 1 < w.path.size(); ++i) {
        const auto& succ = k.reachable.successors[w.path[i]];
        pathOk = std::find(succ.begin(), succ.end(), w.path[i + 1]) != succ.end();
    }
    bool ok = s != t && sameView && holds(s) && holds(t) && pathOk && w.relation == "Alice";
    std::ostringstream detail;
    detail << "pair " << dmcv::pipeline::configurationLabel(c, k.configurationOf[s]) << " / "
           << dmcv::pipeline::configurationLabel(c, k.configurationOf[t]) << ", same Alice view "
           << (sameView ? "yes" : "no") << ", q3 = init(q1) in both " << (holds(s) && holds(t) ? "yes" : "no")
           << ", path " << (pathOk ? "valid" : "invalid");
    return {ok, detail.str()};
}

Outcome qkdSdcVerdicts() {
    Outcome qkd = verdictsMatch("qkd.dmc", {1, 1});
    Outcome sdc = verdictsMatch("sdc.dmc", {1, 1, 1});
    return {qkd.pass && sdc.pass, qkd.detail + "; " + sdc.detail};
}

Outcome translationCrosscheck() {
    std::ostringstream detail;
    bool ok = true;
    std::size_t mismatches = 0;
    auto run = [&](const std::string& label, const std::string& source) {
        try {
            auto opts = defaults();
            auto c = dmcv::pipeline::compile(source, opts);
            auto r = dmcv::is::crosscheck(c.net, c.graph, c.assembly);
            mismatches += r.mismatches.size();
            if (!r.ok()) {
                ok = false;
                detail << label << " mismatch";
                if (!r.mismatches.empty()) {
                    detail << " (" << r.mismatches.front() << ")";
                }
                detail << "; ";
            }
        } catch (const std::exception& e) {
            ok = false;
            detail << label << " failed: " << e.what() << "; ";
        }
    };
    for (const char* p : {"qtp.dmc", "qkd.dmc", "sdc.dmc"}) {
        run(p, testkit::readProtocol(p));
    }
    std::mt19937_64 rng(kSeed);
    int maxAgents = 0;
    int maxQubits = 0;
    int maxEvents = 0;
    for (int i = 0; i < kRandomNetworks; ++i) {
        auto net = testkit::randomNetwork(rng, i);
        maxAgents = std::max(maxAgents, net.agents);
        maxQubits = std::max(maxQubits, net.qubits);
        maxEvents = std::max(maxEvents, net.events);
        run("random " + std::to_string(i), net.source);
    }
    detail << "3 protocols + " << kRandomNetworks << " random networks (up to " << maxAgents << " agents, "
           << maxQubits << " qubits, " << maxEvents << " events), " << mismatches << " mismatches";
    return {ok && mismatches == 0, detail.str()};
}

Outcome quantumInvariants() {
    using namespace dmcv::quantum;
    std::mt19937_64 rng(kSeed);
    std::uniform_int_distribution<int> qubitCount(1, 4);
    std::uniform_real_distribution<double> angle(0.0, 2 * std::numbers::pi);
    double normErr = 0.0;
    double probErr = 0.0;
    double factorErr = 0.0;
    double involErr = 0.0;
    auto dist = [](const PureStateVector& x, const PureStateVector& y) {
        return maxNormDistance(x.amplitudes, y.amplitudes);
    };
    for (int i = 0; i < kQuantumSamples; ++i) {
        int n = qubitCount(rng);
        std::vector<std::string> names;
        for (int q = 0; q < n; ++q) {
            names.push_back("q" + std::to_string(q));
        }
        Vec raw = i % 2 ? testkit::randomState(rng, n) : testkit::randomProductState(rng, n);
        auto psi = PureStateVector::make(names, raw);
        int qi = std::uniform_int_distribution<int>(0, n - 1)(rng);
        const std::string& q = names[qi];

        for (auto kind : {Pauli::X, Pauli::Z}) {
            auto once = applyCorrection(psi, q, kind);
            normErr = std::max(normErr, std::abs(once.squaredNorm() - 1.0));
            involErr = std::max(involErr, dist(applyCorrection(once, q, kind), psi));
        }
        if (n >= 2) {
            const std::string& r = names[(qi + 1 + std::uniform_int_distribution<int>(0, n - 2)(rng)) % n];
            auto once = applyEntangle(psi, q, r);
            normErr = std::max(normErr, std::abs(once.squaredNorm() - 1.0));
            involErr = std::max(involErr, dist(applyEntangle(once, q, r), psi));
        }
        auto [zero, one] = measure(psi, q, angle(rng));
        probErr = std::max(probErr, std::abs(zero.probability + one.probability - 1.0));

        auto parts = factorize(psi);
        PureStateVector joined = PureStateVector::empty();
        for (const auto& f : parts.factors) {
            joined = tensor(joined, f);
        }
        joined = permute(joined, psi.qubits);
        factorErr = std::max(factorErr, testkit::distanceUpToPhase(joined.amplitudes, psi.amplitudes));
    }
    bool ok = normErr <= kNormTolerance && probErr <= kNormTolerance && factorErr <= kFactorTolerance &&
              involErr <= kInvolutionTolerance;
    std::ostringstream detail;
    detail << kQuantumSamples << " states: norm " << normErr << ", probability sum " << probErr << ", factor round-trip "
           << factorErr << ", involutions " << involErr;
    return {ok, detail.str()};
}

Outcome checkerOracle() {
    using namespace dmcv::logic;
    std::mt19937_64 rng(kSeed);
    std::uniform_int_distribution<std::size_t> size(1, kMaxGraphStates);
    std::size_t compared = 0;
    std::size_t wrong = 0;
    std::size_t s5Failures = 0;
    std::size_t largest = 0;
    auto p = makeAtom(NamedProp{"p"});
    auto q = makeAtom(NamedProp{"q"});
    for (int i = 0; i < kRandomGraphs; ++i) {
        std::size_t n = i == 0 ? kMaxGraphStates : size(rng);
        auto g = testkit::randomGraph(rng, n);
        largest = std::max(largest, g.size());
        dmcv::mc::Checker checker(g);
        std::vector<FormulaPtr> formulas = {
            makeUnary(Op::EX, p), makeUnary(Op::EG, p), makeBinary(Op::EU, p, q),
            makeUnary(Op::EG, makeUnary(Op::Not, q)), makeBinary(Op::EU, q, makeUnary(Op::EX, p))};
        for (int k = 0; k < 5; ++k) {
            formulas.push_back(testkit::randomFormula(rng, 3, g.agents));
        }
        for (const auto& f : formulas) {
            ++compared;
            if (checker.sat(*f) != testkit::bruteForce(g, *f)) {
                ++wrong;
            }
        }
        for (const auto& agent : g.agents) {
            for (const auto& phi : {p, q, testkit::randomFormula(rng, 2, g.agents)}) {
                auto k = makeEpistemic(Op::K, agent, phi);
                auto kk = makeEpistemic(Op::K, agent, k);
                auto notK = makeUnary(Op::Not, k);
                auto kNotK = makeEpistemic(Op::K, agent, notK);
                bool t = testkit::subset(checker.sat(*k), checker.sat(*phi));
                bool four = testkit::subset(checker.sat(*k), checker.sat(*kk));
                bool five = testkit::subset(checker.sat(*notK), checker.sat(*kNotK));
                s5Failures += !t + !four + !five;
            }
        }
    }
    std::ostringstream detail;
    detail << kRandomGraphs << " graphs up to " << largest << " states, " << compared << " formulas, " << wrong
           << " label differences, " << s5Failures << " S5 failures";
    return {wrong == 0 && s5Failures == 0, detail.str()};
}

Outcome determinism() {
    std::ostringstream detail;
    bool ok = true;
    for (const char* p : {"qtp.dmc", "qkd.dmc", "sdc.dmc"}) {
        std::set<std::string> reports;
        std::size_t runs = 0;
        for (std::optional<std::uint64_t> seed :
             {std::optional<std::uint64_t>{}, std::optional<std::uint64_t>{}, std::optional<std::uint64_t>{1},
              std::optional<std::uint64_t>{42}, std::optional<std::uint64_t>{987654321}}) {
            Session s = openSession(p, seed);
            const char* json = dmcv_report_json(s.get(), 0);
            reports.insert(json ? json : "");
            ++runs;
        }
        if (reports.size() != 1 || reports.begin()->empty()) {
            ok = false;
            detail << p << " produced " << reports.size() << " distinct reports; ";
        }
    }
    detail << "each protocol: 2 default runs and 3 shuffled exploration orders";
    return {ok, detail.str()};
}

Outcome stateCounts() {
    std::ostringstream detail;
    bool ok = true;
    for (const char* p : {"qtp.dmc", "qkd.dmc", "sdc.dmc"}) {
        std::set<std::size_t> counts;
        for (std::optional<std::uint64_t> seed : {std::optional<std::uint64_t>{}, std::optional<std::uint64_t>{},
                                                  std::optional<std::uint64_t>{3}}) {
            dmcv::pipeline::Options opts;
            opts.seed = seed;
            auto c = dmcv::pipeline::compile(testkit::readProtocol(p), opts);
            auto k = dmcv::pipeline::check(c, opts);
            counts.insert(dmcv::pipeline::classicalStateCount(k.reachable));
        }
        ok = ok && counts.size() == 1;
        detail << p << " classical states " << *counts.begin() << (counts.size() == 1 ? "" : " (unstable)") << "; ";
    }

    auto c = dmcv::pipeline::compile(testkit::readProtocol("qtp.dmc"), defaults());
    const auto& g = c.graph;
    auto q3 = *c.net.qubitIndex("q3");
    std::set<std::string> branches;
    bool allQs1 = true;
    std::size_t terminals = 0;
    for (std::size_t n = 0; n < g.nodes.size(); ++n) {
        bool terminal = true;
        for (std::size_t e = g.edgeBegin[n]; e < g.edgeBegin[n + 1]; ++e) {
            terminal = terminal && g.edges[e].step.kind == dmcv::semantics::StepKind::Idle;
        }
        if (!terminal) {
            continue;
        }
        ++terminals;
        branches.insert(dmcv::semantics::outcomeBits(c.net, g.nodes[n]));
        auto name = dmcv::semantics::qubitName(g.nodes[n], q3);
        allQs1 = allQs1 && name && g.registry.entry(*name).name == "qs1";
    }
    bool qtpOk = terminals == 4 && branches.size() == 4 && allQs1;
    detail << "QTP " << terminals << " terminal branches over " << branches.size() << " outcome strings, q3 named qs1 in all: "
           << (allQs1 ? "yes" : "no");
    return {ok && qtpOk, detail.str()};
}

const std::vector<Entry>& all() {
    static const std::vector<Entry> entries = {
        {1, "QTP verdicts", qtpVerdicts},
        {2, "QTP enumeration", qtpRegistry},
        {3, "witness soundness", qtpWitness},
        {4, "QKD and SDC verdicts", qkdSdcVerdicts},
        {5, "translation crosscheck", translationCrosscheck},
        {6, "quantum invariants", quantumInvariants},
        {7, "checker oracle equivalence", checkerOracle},
        {8, "determinism", determinism},
        {9, "state counts", stateCounts},
    };
    return entries;
}

}  // namespace criteria
