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

#include "dmcv/dmcv.h"

#include <fstream>
#include <memory>
#include <new>
#include <sstream>

#include "dmcv/ispl.hpp"
#include "dmcv/pipeline.hpp"

struct dmcv_session {
    std::string source;
    bool loaded = false;
    dmcv::pipeline::Options options;
    std::unique_ptr<dmcv::pipeline::Compiled> compiled;
    std::unique_ptr<dmcv::pipeline::Checked> checked;
    std::string error;
    dmcv_status status = DMCV_OK;
    std::string formulaText, json, table, ispl, csv, dot, states, system;
};

namespace {

struct CallOrder : std::logic_error {
    using std::logic_error::logic_error;
};

template <typename F>
dmcv_status guarded(dmcv_session* s, F&& body) {
    s->error.clear();
    try {
        s->status = body();
    } catch (const CallOrder& e) {
        s->error = e.what();
        s->status = DMCV_ERR_STATE;
    } catch (const dmcv::semantics::StateBudgetExceeded& e) {
        s->error = e.what();
        s->status = DMCV_ERR_BUDGET;
    } catch (const dmcv::dmc::SyntaxError& e) {
        s->error = e.what();
        s->status = DMCV_ERR_COMPILE;
    } catch (const dmcv::dmc::ValidationError& e) {
        s->error = e.what();
        s->status = DMCV_ERR_COMPILE;
    } catch (const dmcv::is::UntranslatableAtom& e) {
        s->error = e.what();
        s->status = DMCV_ERR_COMPILE;
    } catch (const dmcv::quantum::QuantumError& e) {
        s->error = e.what();
        s->status = DMCV_ERR_COMPILE;
    } catch (const dmcv::ispl::DomainTooLarge& e) {
        s->error = e.what();
        s->status = DMCV_ERR_COMPILE;
    } catch (const std::invalid_argument& e) {
        s->error = e.what();
        s->status = DMCV_ERR_ARGUMENT;
    } catch (const std::bad_alloc&) {
        s->error = "out of memory";
        s->status = DMCV_ERR_INTERNAL;
    } catch (const std::exception& e) {
        s->error = e.what();
        s->status = DMCV_ERR_INTERNAL;
    }
    return s->status;
}

dmcv_status fail(dmcv_session* s, dmcv_status status, const std::string& message) {
    s->error = message;
    s->status = status;
    return status;
}

void reset(dmcv_session* s) {
    s->compiled.reset();
    s->checked.reset();
}

dmcv_status ensureCompiled(dmcv_session* s) {
    if (!s->loaded) {
        throw CallOrder("no protocol loaded");
    }
    if (!s->compiled) {
        s->compiled = std::make_unique<dmcv::pipeline::Compiled>(dmcv::pipeline::compile(s->source, s->options));
    }
    return DMCV_OK;
}

dmcv_status ensureChecked(dmcv_session* s) {
    ensureCompiled(s);
    if (!s->checked) {
        s->checked = std::make_unique<dmcv::pipeline::Checked>(dmcv::pipeline::check(*s->compiled, s->options));
    }
    return s->checked->verification.allTrue() ? DMCV_OK : DMCV_FORMULA_FALSE;
}

/// Runs `produce` into `slot` and returns its text, or NULL on error.
template <typename F>
const char* output(dmcv_session* s, std::string& slot, F&& produce) {
    dmcv_status st = guarded(s, [&] {
        slot = produce();
        return DMCV_OK;
    });
    return st == DMCV_OK ? slot.c_str() : nullptr;
}

}  // namespace

extern "C" {

const char* dmcv_version(void) { return dmcv::pipeline::kVersion; }

const char* dmcv_status_name(dmcv_status status) {
    switch (status) {
        case DMCV_OK: return "ok";
        case DMCV_FORMULA_FALSE: return "formula false";
        case DMCV_ERR_COMPILE: return "compile error";
        case DMCV_ERR_BUDGET: return "state budget exceeded";
        case DMCV_ERR_IO: return "i/o error";
        case DMCV_ERR_ARGUMENT: return "invalid argument";
        case DMCV_ERR_INTERNAL: return "internal error";
        case DMCV_ERR_STATE: return "invalid call order";
    }
    return "unknown";
}

dmcv_status dmcv_session_create(dmcv_session** out) {
    if (!out) {
        return DMCV_ERR_ARGUMENT;
    }
    *out = new (std::nothrow) dmcv_session();
    return *out ? DMCV_OK : DMCV_ERR_INTERNAL;
}

void dmcv_session_destroy(dmcv_session* session) { delete session; }

const char* dmcv_last_error(const dmcv_session* session) { return session ? session->error.c_str() : ""; }

dmcv_status dmcv_last_status(const dmcv_session* session) { return session ? session->status : DMCV_ERR_ARGUMENT; }

dmcv_status dmcv_load_file(dmcv_session* s, const char* path) {
    if (!s || !path) {
        return DMCV_ERR_ARGUMENT;
    }
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        return fail(s, DMCV_ERR_IO, std::string("cannot open ") + path);
    }
    std::ostringstream text;
    text << in.rdbuf();
    if (in.bad()) {
        return fail(s, DMCV_ERR_IO, std::string("cannot read ") + path);
    }
    std::string source = text.str();
    return dmcv_load_source(s, source.data(), source.size());
}

dmcv_status dmcv_load_source(dmcv_session* s, const char* source, size_t length) {
    if (!s || (!source && length > 0)) {
        return DMCV_ERR_ARGUMENT;
    }
    s->source.assign(source ? source : "", length);
    s->loaded = true;
    reset(s);
    s->error.clear();
    return s->status = DMCV_OK;
}

dmcv_status dmcv_set_max_states(dmcv_session* s, uint64_t maxStates) {
    if (!s || maxStates == 0) {
        return s ? fail(s, DMCV_ERR_ARGUMENT, "state budget must be positive") : DMCV_ERR_ARGUMENT;
    }
    s->options.maxStates = static_cast<std::size_t>(maxStates);
    reset(s);
    return DMCV_OK;
}

dmcv_status dmcv_set_seed(dmcv_session* s, uint64_t seed) {
    if (!s) {
        return DMCV_ERR_ARGUMENT;
    }
    s->options.seed = seed;
    reset(s);
    return DMCV_OK;
}

dmcv_status dmcv_set_crosscheck(dmcv_session* s, int enabled) {
    if (!s) {
        return DMCV_ERR_ARGUMENT;
    }
    s->options.crosscheck = enabled != 0;
    s->checked.reset();
    return DMCV_OK;
}

dmcv_status dmcv_override_input(dmcv_session* s, const char* qubit, const double* re, const double* im, size_t count) {
    if (!s || !qubit || !re || count == 0) {
        return s ? fail(s, DMCV_ERR_ARGUMENT, "missing override data") : DMCV_ERR_ARGUMENT;
    }
    dmcv::pipeline::InputOverride o{qubit, {}};
    for (size_t i = 0; i < count; ++i) {
        o.amplitudes.emplace_back(re[i], im ? im[i] : 0.0);
    }
    s->options.inputs.push_back(std::move(o));
    reset(s);
    return DMCV_OK;
}

dmcv_status dmcv_compile(dmcv_session* s) {
    if (!s) {
        return DMCV_ERR_ARGUMENT;
    }
    return guarded(s, [&] { return ensureCompiled(s); });
}

dmcv_status dmcv_check(dmcv_session* s) {
    if (!s) {
        return DMCV_ERR_ARGUMENT;
    }
    return guarded(s, [&] { return ensureChecked(s); });
}

size_t dmcv_formula_count(const dmcv_session* s) {
    return s && s->compiled ? s->compiled->net.formulas.size() : 0;
}

int dmcv_formula_verdict(const dmcv_session* s, size_t index) {
    if (!s || !s->checked || index >= s->checked->verification.results.size()) {
        return -1;
    }
    return s->checked->verification.results[index].verdict ? 1 : 0;
}

const char* dmcv_formula_text(dmcv_session* s, size_t index) {
    if (!s || !s->compiled || index >= s->compiled->net.formulas.size()) {
        return nullptr;
    }
    s->formulaText = dmcv::logic::toString(*s->compiled->net.formulas[index]);
    return s->formulaText.c_str();
}

int dmcv_crosscheck_ok(const dmcv_session* s) {
    if (!s || !s->checked || !s->checked->crosscheck) {
        return -1;
    }
    return s->checked->crosscheck->ok() ? 1 : 0;
}

size_t dmcv_configuration_count(const dmcv_session* s) {
    return s && s->compiled ? s->compiled->graph.nodes.size() : 0;
}

size_t dmcv_reachable_state_count(const dmcv_session* s) {
    return s && s->checked ? s->checked->reachable.states.size() : 0;
}

size_t dmcv_registry_size(const dmcv_session* s) { return s && s->compiled ? s->compiled->graph.registry.size() : 0; }

const char* dmcv_report_json(dmcv_session* s, int includeTiming) {
    if (!s) {
        return nullptr;
    }
    return output(s, s->json, [&] {
        ensureChecked(s);
        return dmcv::pipeline::reportJson(*s->compiled, *s->checked, includeTiming != 0);
    });
}

const char* dmcv_report_table(dmcv_session* s) {
    if (!s) {
        return nullptr;
    }
    return output(s, s->table, [&] {
        ensureChecked(s);
        return dmcv::pipeline::reportTable(*s->compiled, *s->checked);
    });
}

const char* dmcv_emit_ispl(dmcv_session* s, size_t maxDomain) {
    if (!s) {
        return nullptr;
    }
    return output(s, s->ispl, [&] {
        ensureCompiled(s);
        dmcv::ispl::EmitOptions o;
        if (maxDomain > 0) {
            o.maxDomain = maxDomain;
        }
        return dmcv::ispl::emit(s->compiled->assembly.system, o);
    });
}

const char* dmcv_registry_csv(dmcv_session* s) {
    if (!s) {
        return nullptr;
    }
    return output(s, s->csv, [&] {
        ensureCompiled(s);
        std::ostringstream out;
        s->compiled->graph.registry.writeCsv(out);
        return out.str();
    });
}

const char* dmcv_graph_dot(dmcv_session* s, int epistemic) {
    if (!s) {
        return nullptr;
    }
    return output(s, s->dot, [&] {
        ensureCompiled(s);
        std::ostringstream out;
        dmcv::semantics::writeDot(out, s->compiled->net, s->compiled->graph, epistemic != 0);
        return out.str();
    });
}

const char* dmcv_dump_states(dmcv_session* s) {
    if (!s) {
        return nullptr;
    }
    return output(s, s->states, [&] {
        ensureCompiled(s);
        return dmcv::pipeline::dumpStates(*s->compiled);
    });
}

const char* dmcv_system_json(dmcv_session* s) {
    if (!s) {
        return nullptr;
    }
    return output(s, s->system, [&] {
        ensureCompiled(s);
        return dmcv::is::toJson(s->compiled->assembly.system) + "\n";
    });
}

}  // extern "C"
