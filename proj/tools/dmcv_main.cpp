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

// Command-line driver over the C interface.
//
// Exit codes: 0 all formulas true, 1 some formula false, 2 compile or input
// error, 3 state budget exceeded, 4 crosscheck mismatch or internal error.

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "dmcv/dmcv.h"

namespace {

constexpr int kExitTrue = 0;
constexpr int kExitFalse = 1;
constexpr int kExitCompile = 2;
constexpr int kExitBudget = 3;
constexpr int kExitInternal = 4;

struct Common {
    std::string file;
    std::vector<std::string> inputs;
    std::uint64_t maxStates = 10'000'000;
    std::optional<std::uint64_t> seed;
    std::string out;
};

using Session = std::unique_ptr<dmcv_session, decltype(&dmcv_session_destroy)>;

int exitCode(dmcv_status st) {
    switch (st) {
        case DMCV_OK: return kExitTrue;
        case DMCV_FORMULA_FALSE: return kExitFalse;
        case DMCV_ERR_BUDGET: return kExitBudget;
        case DMCV_ERR_COMPILE:
        case DMCV_ERR_IO:
        case DMCV_ERR_ARGUMENT: return kExitCompile;
        default: return kExitInternal;
    }
}

int report(const Session& s, dmcv_status st, const std::string& file) {
    std::cerr << "dmcv: " << file << ": " << dmcv_status_name(st) << ": " << dmcv_last_error(s.get()) << "\n";
    return exitCode(st);
}

/// `q1=0.6,0.8` into a qubit name and real amplitudes.
bool parseOverride(const std::string& text, std::string& qubit, std::vector<double>& amps) {
    auto eq = text.find('=');
    if (eq == std::string::npos || eq == 0) {
        return false;
    }
    qubit = text.substr(0, eq);
    std::string rest = text.substr(eq + 1);
    std::size_t pos = 0;
    while (pos <= rest.size()) {
        auto comma = rest.find(',', pos);
        std::string item = rest.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos);
        try {
            std::size_t used = 0;
            amps.push_back(std::stod(item, &used));
            if (used != item.size()) {
                return false;
            }
        } catch (const std::exception&) {
            return false;
        }
        if (comma == std::string::npos) {
            break;
        }
        pos = comma + 1;
    }
    return !amps.empty();
}

/// Creates a session with the file and common options applied.
int open(const Common& c, Session& s) {
    dmcv_session* raw = nullptr;
    if (dmcv_session_create(&raw) != DMCV_OK) {
        std::cerr << "dmcv: cannot create session\n";
        return kExitInternal;
    }
    s.reset(raw);
    dmcv_status st = dmcv_load_file(raw, c.file.c_str());
    if (st != DMCV_OK) {
        return report(s, st, c.file);
    }
    for (const auto& text : c.inputs) {
        std::string qubit;
        std::vector<double> amps;
        if (!parseOverride(text, qubit, amps)) {
            std::cerr << "dmcv: bad --input-qubit value '" << text << "', expected q=a0,a1,...\n";
            return kExitCompile;
        }
        dmcv_override_input(raw, qubit.c_str(), amps.data(), nullptr, amps.size());
    }
    if ((st = dmcv_set_max_states(raw, c.maxStates)) != DMCV_OK) {
        return report(s, st, c.file);
    }
    if (c.seed) {
        dmcv_set_seed(raw, *c.seed);
    }
    return -1;
}

int write(const std::string& path, const char* text) {
    if (path.empty() || path == "-") {
        std::cout << text;
        return kExitTrue;
    }
    std::ofstream out(path, std::ios::binary);
    out << text;
    if (!out) {
        std::cerr << "dmcv: cannot write " << path << "\n";
        return kExitCompile;
    }
    return kExitTrue;
}

void addCommon(CLI::App* app, Common& c, bool withOut) {
    app->add_option("file", c.file, "protocol source")->required();
    app->add_option("--input-qubit", c.inputs, "replace a single-qubit input, e.g. q1=0.6,0.8")
        ->type_name("Q=A0,A1");
    app->add_option("--max-states", c.maxStates, "state budget")->check(CLI::PositiveNumber);
    app->add_option("--seed-order", c.seed, "shuffle exploration order with this seed");
    if (withOut) {
        app->add_option("-o,--output", c.out, "output file (default stdout)");
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Compiler and CTLK verifier for distributed measurement-based quantum protocols"};
    app.set_version_flag("--version", std::string(dmcv_version()));
    app.require_subcommand(1);

    Common check;
    bool json = false;
    bool noTiming = false;
    bool noCrosscheck = false;
    std::string dumpIs;
    auto* checkCmd = app.add_subcommand("check", "verify every formula of a protocol");
    addCommon(checkCmd, check, false);
    checkCmd->add_flag("--json", json, "print the JSON report instead of the table");
    checkCmd->add_flag("--no-timing", noTiming, "leave wall times out of the JSON report");
    checkCmd->add_flag("--no-crosscheck", noCrosscheck, "skip the translation crosscheck");
    checkCmd->add_option("--dump-is", dumpIs, "write the interpreted system as JSON to this file");

    Common emit;
    std::size_t maxDomain = 4096;
    auto* emitCmd = app.add_subcommand("emit", "write ISPL");
    addCommon(emitCmd, emit, true);
    emitCmd->add_option("--max-domain", maxDomain, "largest enumeration allowed")->check(CLI::PositiveNumber);

    Common states;
    auto* statesCmd = app.add_subcommand("dump-states", "list reachable configurations");
    addCommon(statesCmd, states, true);

    Common enumeration;
    auto* enumCmd = app.add_subcommand("dump-enum", "write the named quantum states as CSV");
    addCommon(enumCmd, enumeration, true);

    Common graph;
    bool noEpistemic = false;
    auto* graphCmd = app.add_subcommand("graph", "write the configuration graph as DOT");
    addCommon(graphCmd, graph, true);
    graphCmd->add_flag("--no-epistemic", noEpistemic, "omit indistinguishability edges");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : kExitCompile;
    }

    Session s(nullptr, &dmcv_session_destroy);
    auto simple = [&](const Common& c, auto produce) {
        if (int rc = open(c, s); rc >= 0) {
            return rc;
        }
        const char* text = produce(s.get());
        if (!text) {
            return report(s, dmcv_last_status(s.get()), c.file);
        }
        return write(c.out, text);
    };

    if (*checkCmd) {
        if (int rc = open(check, s); rc >= 0) {
            return rc;
        }
        dmcv_set_crosscheck(s.get(), noCrosscheck ? 0 : 1);
        dmcv_status st = dmcv_check(s.get());
        if (st != DMCV_OK && st != DMCV_FORMULA_FALSE) {
            return report(s, st, check.file);
        }
        const char* text = json ? dmcv_report_json(s.get(), noTiming ? 0 : 1) : dmcv_report_table(s.get());
        if (!text) {
            return report(s, dmcv_last_status(s.get()), check.file);
        }
        std::cout << text;
        if (!dumpIs.empty()) {
            const char* system = dmcv_system_json(s.get());
            if (!system || write(dumpIs, system) != kExitTrue) {
                return system ? kExitCompile : report(s, dmcv_last_status(s.get()), check.file);
            }
        }
        if (dmcv_crosscheck_ok(s.get()) == 0) {
            std::cerr << "dmcv: crosscheck found mismatches\n";
            return kExitInternal;
        }
        return exitCode(st);
    }
    if (*emitCmd) {
        return simple(emit, [&](dmcv_session* x) { return dmcv_emit_ispl(x, maxDomain); });
    }
    if (*statesCmd) {
        return simple(states, [](dmcv_session* x) { return dmcv_dump_states(x); });
    }
    if (*enumCmd) {
        return simple(enumeration, [](dmcv_session* x) { return dmcv_registry_csv(x); });
    }
    if (*graphCmd) {
        return simple(graph, [&](dmcv_session* x) { return dmcv_graph_dot(x, noEpistemic ? 0 : 1); });
    }
    return kExitCompile;
}
