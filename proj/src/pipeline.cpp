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

#include "dmcv/pipeline.hpp"

#include <openssl/evp.h>

#include <chrono>
#include <cmath>
#include <iomanip>
#include <map>
#include <set>
#include <sstream>

#include "dmcv/text.hpp"
#include "json.hpp"

namespace dmcv::pipeline {

namespace {

// Amplitudes rounded to 12 decimals.
std::string stableAmplitudes(const std::vector<quantum::Amplitude>& amplitudes) {
    std::vector<quantum::Amplitude> out;
    for (const auto& a : amplitudes) {
        auto r = [](double x) { return std::round(x * 1e12) / 1e12 + 0.0; };
        out.emplace_back(r(a.real()), r(a.imag()));
    }
    return text::amplitudeList(out);
}

using Json = nlohmann::ordered_json;
using Clock = std::chrono::steady_clock;

class Stopwatch {
  public:
    explicit Stopwatch(std::vector<Phase>& into) : into_(into), start_(Clock::now()) {}
    void lap(const std::string& name) {
        auto now = Clock::now();
        into_.push_back({name, std::chrono::duration<double>(now - start_).count()});
        start_ = now;
    }

  private:
    std::vector<Phase>& into_;
    Clock::time_point start_;
};

std::string localText(const dmc::ValidatedNetwork& net, const semantics::Configuration& c, std::size_t i) {
    const auto& a = c.agents[i];
    std::vector<std::string> parts;
    for (std::size_t v = 0; v < a.gamma.size(); ++v) {
        parts.push_back(net.agents[i].vars[v].name + "=" +
                        (a.gamma[v] == semantics::kUndefined ? std::string("undef") : std::to_string(a.gamma[v])));
    }
    parts.push_back("pc=" + std::to_string(a.eventIndex + 1));
    std::vector<std::string> owned;
    for (std::size_t q = 0; q < net.qubits.size(); ++q) {
        if (a.owned & dmc::qubitBit(q)) {
            owned.push_back(net.qubits[q] + ((a.known & dmc::qubitBit(q)) ? "*" : ""));
        }
    }
    parts.push_back("owns={" + text::join(owned, ",") + "}");
    return net.agents[i].name + "(" + text::join(parts, " ") + ")";
}

std::string sigmaText(const Compiled& c, const semantics::Configuration& n) {
    std::vector<std::string> parts;
    for (const auto& f : n.sigma) {
        std::vector<std::string> qs;
        for (std::size_t q = 0; q < c.net.qubits.size(); ++q) {
            if (f.mask & dmc::qubitBit(q)) {
                qs.push_back(c.net.qubits[q]);
            }
        }
        parts.push_back(text::join(qs, ",") + "=" + c.graph.registry.entry(f.state).name);
    }
    return text::join(parts, " ");
}

std::string stateLabel(const Compiled& c, const Checked& k, std::size_t state) {
    std::size_t node = k.configurationOf.at(state);
    return node == SIZE_MAX ? "s" + std::to_string(state) : configurationLabel(c, node) + " #" + std::to_string(node);
}

Json stateJson(const Compiled& c, const Checked& k, std::size_t state) {
    std::size_t node = k.configurationOf.at(state);
    Json out{{"state", state}};
    if (node != SIZE_MAX) {
        out["configuration"] = node;
        out["label"] = configurationLabel(c, node);
    }
    return out;
}

std::string agentLocal(const Compiled& c, const is::GlobalState& s, std::size_t agent) {
    const auto& t = c.assembly.system.agents[agent];
    std::vector<std::string> parts;
    for (std::size_t v = 0; v < t.vars.size(); ++v) {
        parts.push_back(t.vars[v].name + "=" + is::literal(c.assembly.system, t.vars[v], s.agents[agent][v]));
    }
    return text::join(parts, " ");
}

Json witnessJson(const Compiled& c, const Checked& k, const mc::Witness& w) {
    Json path = Json::array();
    for (auto s : w.path) {
        path.push_back(stateJson(c, k, s));
    }
    Json out{{"path", path}, {"loopStart", w.loopStart ? Json(*w.loopStart) : Json(nullptr)}};
    if (w.pair) {
        Json states = Json::array();
        for (auto s : {w.pair->first, w.pair->second}) {
            Json j = stateJson(c, k, s);
            auto agent = k.stateGraph.agentIndex(w.relation);
            if (agent) {
                j["local"] = agentLocal(c, k.reachable.states[s], *agent);
            }
            states.push_back(j);
        }
        out["pair"] = Json{{"relation", w.relation}, {"states", states}};
    } else {
        out["pair"] = nullptr;
    }
    return out;
}

}  // namespace

std::string normalizeSource(const std::string& source) {
    std::string out;
    std::istringstream in(source);
    std::string line;
    while (std::getline(in, line)) {
        while (!line.empty() && (line.back() == '\r' || line.back() == ' ' || line.back() == '\t')) {
            line.pop_back();
        }
        out += line;
        out += '\n';
    }
    while (out.size() > 1 && out[out.size() - 1] == '\n' && out[out.size() - 2] == '\n') {
        out.pop_back();
    }
    return out;
}

std::string digest(const std::string& source) {
    std::string norm = normalizeSource(source);
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(norm.data(), norm.size(), md, &len, EVP_sha256(), nullptr) != 1) {
        throw std::runtime_error("sha256 failed");
    }
    std::ostringstream hex;
    for (unsigned int i = 0; i < len; ++i) {
        hex << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(md[i]);
    }
    return hex.str();
}

Compiled compile(const std::string& source, const Options& options) {
    Compiled c;
    Stopwatch watch(c.timing);
    c.digest = digest(source);
    auto spec = dmc::parse(source);
    for (const auto& o : options.inputs) {
        dmc::overrideInput(spec, o.qubit, o.amplitudes);
    }
    watch.lap("parse");
    c.net = dmc::validate(spec);
    watch.lap("validate");
    c.graph = semantics::explore(c.net, {options.maxStates, options.seed});
    watch.lap("explore");
    c.assembly = is::assemble(c.net, c.graph);
    watch.lap("assemble");
    return c;
}

Checked check(const Compiled& c, const Options& options) {
    Checked k;
    Stopwatch watch(k.timing);
    if (options.crosscheck) {
        k.crosscheck = is::crosscheck(c.net, c.graph, c.assembly, options.maxStates);
        watch.lap("crosscheck");
    }
    k.reachable = is::reachable(c.assembly.system, options.maxStates);
    std::map<is::GlobalState, std::size_t> node;
    for (std::size_t n = 0; n < c.graph.nodes.size(); ++n) {
        node.emplace(is::translate(c.net, c.assembly.layout, c.assembly.system, c.graph, c.graph.nodes[n]), n);
    }
    for (const auto& s : k.reachable.states) {
        auto it = node.find(s);
        k.configurationOf.push_back(it == node.end() ? SIZE_MAX : it->second);
    }
    k.stateGraph = mc::buildStateGraph(c.assembly.system, k.reachable);
    watch.lap("states");
    k.verification = mc::checkAll(k.stateGraph, c.assembly.system.formulas);
    watch.lap("check");
    return k;
}

std::size_t classicalStateCount(const is::Reachable& r) {
    std::set<std::vector<is::LocalState>> seen;
    for (const auto& s : r.states) {
        seen.insert(s.agents);
    }
    return seen.size();
}

std::string configurationLabel(const Compiled& c, std::size_t node) {
    const auto& n = c.graph.nodes.at(node);
    std::string bits = semantics::outcomeBits(c.net, n);
    return "C" + std::to_string(n.step) + (bits.empty() ? "" : "^" + bits);
}

std::string reportJson(const Compiled& c, const Checked& k, bool includeTiming) {
    Json registry = Json::array();
    for (const auto& e : c.graph.registry.entries()) {
        registry.push_back(Json{{"name", e.name}, {"qubits", e.qubitCount}, {"amplitudes", stableAmplitudes(e.amplitudes)}});
    }
    Json cross = nullptr;
    if (k.crosscheck) {
        const auto& x = *k.crosscheck;
        cross = Json{{"isomorphic", x.isomorphic},   {"partitionsMatch", x.partitionsMatch},
                     {"atomsAgree", x.atomsAgree},   {"configurations", x.configurations},
                     {"systemStates", x.systemStates}, {"atomsChecked", x.atomsChecked},
                     {"mismatches", x.mismatches}};
    }
    Json formulas = Json::array();
    for (std::size_t i = 0; i < k.verification.results.size(); ++i) {
        const auto& r = k.verification.results[i];
        formulas.push_back(Json{{"index", i + 1},
                                {"formula", logic::toString(*c.net.formulas[i])},
                                {"verdict", r.verdict},
                                {"satisfyingStates", r.satisfyingStates},
                                {"witness", r.witness ? witnessJson(c, k, *r.witness) : Json(nullptr)}});
    }
    Json out{{"schema", kReportSchema},
             {"tool", Json{{"name", "dmcv"}, {"version", kVersion}}},
             {"network", c.net.name},
             {"inputDigest", "sha256:" + c.digest},
             {"counts", Json{{"configurations", c.graph.nodes.size()},
                             {"transitions", c.graph.edges.size()},
                             {"registryStates", c.graph.registry.size()},
                             {"reachableStates", k.reachable.states.size()},
                             {"classicalStates", classicalStateCount(k.reachable)}}},
             {"registry", registry},
             {"crosscheck", cross},
             {"formulas", formulas},
             {"allTrue", k.verification.allTrue()}};
    if (includeTiming) {
        Json phases = Json::object();
        double total = 0.0;
        for (const auto* list : {&c.timing, &k.timing}) {
            for (const auto& p : *list) {
                phases[p.name] = p.seconds;
                total += p.seconds;
            }
        }
        Json perFormula = Json::array();
        for (const auto& r : k.verification.results) {
            perFormula.push_back(r.seconds);
        }
        out["timing"] = Json{{"phases", phases}, {"formulas", perFormula}, {"total", total}};
    }
    return out.dump(2) + "\n";
}

std::string reportTable(const Compiled& c, const Checked& k) {
    std::ostringstream out;
    out << "network " << c.net.name << ": " << c.graph.nodes.size() << " configurations, "
        << k.reachable.states.size() << " reachable states, " << classicalStateCount(k.reachable)
        << " classical states, " << c.graph.registry.size() << " named quantum states\n";
    if (k.crosscheck) {
        const auto& x = *k.crosscheck;
        out << "crosscheck: " << (x.ok() ? "ok" : "MISMATCH") << " (isomorphic " << (x.isomorphic ? "yes" : "no")
            << ", partitions " << (x.partitionsMatch ? "match" : "differ") << ", " << x.atomsChecked << " atoms "
            << (x.atomsAgree ? "agree" : "disagree") << ")\n";
        for (const auto& m : x.mismatches) {
            out << "  " << m << "\n";
        }
    }
    out << "\n  #  verdict  states  formula\n";
    for (std::size_t i = 0; i < k.verification.results.size(); ++i) {
        const auto& r = k.verification.results[i];
        std::string states = std::to_string(r.satisfyingStates) + "/" + std::to_string(k.reachable.states.size());
        out << std::setw(3) << i + 1 << "  " << std::left << std::setw(7) << (r.verdict ? "true" : "false") << "  "
            << std::setw(6) << states << std::right << "  " << logic::toString(*c.net.formulas[i]) << "\n";
    }
    for (std::size_t i = 0; i < k.verification.results.size(); ++i) {
        const auto& r = k.verification.results[i];
        if (!r.witness || r.witness->empty()) {
            continue;
        }
        const auto& w = *r.witness;
        out << "\nwitness for formula " << i + 1 << ":\n";
        for (std::size_t j = 0; j < w.path.size(); ++j) {
            out << (j == 0 ? "    " : " -> ") << stateLabel(c, k, w.path[j]);
        }
        if (w.loopStart) {
            out << " -> back to " << stateLabel(c, k, w.path[*w.loopStart]);
        }
        out << "\n";
        if (w.pair) {
            out << "  indistinguishable for " << w.relation << ": " << stateLabel(c, k, w.pair->first) << " and "
                << stateLabel(c, k, w.pair->second) << "\n";
        }
    }
    return out.str();
}

std::string dumpStates(const Compiled& c) {
    std::ostringstream out;
    for (std::size_t n = 0; n < c.graph.nodes.size(); ++n) {
        const auto& node = c.graph.nodes[n];
        out << "#" << n << " " << configurationLabel(c, n);
        for (std::size_t i = 0; i < c.net.agents.size(); ++i) {
            out << " " << localText(c.net, node, i);
        }
        out << " sigma[" << sigmaText(c, node) << "]\n";
    }
    return out.str();
}

}  // namespace dmcv::pipeline
