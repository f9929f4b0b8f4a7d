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

#include <algorithm>
#include <cctype>
#include <charconv>
#include <map>
#include <cmath>
#include <numbers>

#include "dmcv/network.hpp"
#include "dmcv/text.hpp"

namespace dmcv::dmc {

namespace {

enum class Tok { Ident, Number, Punct, End };

struct Token {
    Tok kind = Tok::End;
    std::string text;
    SourceLocation loc;
};

std::string describe(const Token& t) {
    if (t.kind == Tok::End) {
        return "end of input";
    }
    return "'" + t.text + "'";
}

std::string joinExpected(const std::vector<std::string>& expected) {
    std::string out;
    for (std::size_t i = 0; i < expected.size(); ++i) {
        out += (i == 0 ? "" : ", ") + expected[i];
    }
    return out;
}

class Lexer {
  public:
    explicit Lexer(std::string_view src) : src_(src) {}

    std::vector<Token> run() {
        std::vector<Token> out;
        while (true) {
            skipBlank();
            Token t;
            t.loc = {line_, col_};
            if (pos_ >= src_.size()) {
                out.push_back(t);
                return out;
            }
            char c = src_[pos_];
            if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
                t.kind = Tok::Ident;
                while (pos_ < src_.size() &&
                       (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_')) {
                    t.text += take();
                }
            } else if (std::isdigit(static_cast<unsigned char>(c)) ||
                       (c == '.' && pos_ + 1 < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_ + 1])))) {
                t.kind = Tok::Number;
                lexNumber(t.text);
            } else {
                t.kind = Tok::Punct;
                if ((c == '-' && peekChar(1) == '>') || (c == '=' && peekChar(1) == '=')) {
                    t.text += take();
                    t.text += take();
                } else if (std::string_view("{}()[],;=.!:/-*").find(c) != std::string_view::npos) {
                    t.text += take();
                } else {
                    throw SyntaxError(t.loc, std::string("'") + c + "'", {"a valid token"});
                }
            }
            out.push_back(std::move(t));
        }
    }

  private:
    char peekChar(std::size_t ahead) const {
        return pos_ + ahead < src_.size() ? src_[pos_ + ahead] : '\0';
    }

    char take() {
        char c = src_[pos_++];
        if (c == '\n') {
            ++line_;
            col_ = 1;
        } else {
            ++col_;
        }
        return c;
    }

    void lexNumber(std::string& out) {
        auto digits = [&] {
            while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) {
                out += take();
            }
        };
        digits();
        if (peekChar(0) == '.') {
            out += take();
            digits();
        }
        if (peekChar(0) == 'e' || peekChar(0) == 'E') {
            char sign = peekChar(1);
            std::size_t d = (sign == '+' || sign == '-') ? 2 : 1;
            if (std::isdigit(static_cast<unsigned char>(peekChar(d)))) {
                out += take();
                if (d == 2) {
                    out += take();
                }
                digits();
            }
        }
    }

    void skipBlank() {
        while (pos_ < src_.size()) {
            char c = src_[pos_];
            if (std::isspace(static_cast<unsigned char>(c))) {
                take();
            } else if (c == '/' && peekChar(1) == '/') {
                while (pos_ < src_.size() && src_[pos_] != '\n') {
                    take();
                }
            } else if (c == '/' && peekChar(1) == '*') {
                SourceLocation start{line_, col_};
                take();
                take();
                while (pos_ < src_.size() && !(src_[pos_] == '*' && peekChar(1) == '/')) {
                    take();
                }
                if (pos_ >= src_.size()) {
                    throw SyntaxError(start, "unterminated comment", {"'*/'"});
                }
                take();
                take();
            } else {
                return;
            }
        }
    }

    std::string_view src_;
    std::size_t pos_ = 0;
    int line_ = 1;
    int col_ = 1;
};

double parseDouble(const std::string& s) {
    double v = 0.0;
    auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc()) {
        return std::strtod(s.c_str(), nullptr);
    }
    return v;
}

class Parser {
  public:
    explicit Parser(std::string_view src) : toks_(Lexer(src).run()) {}

    NetworkSpec network() {
        NetworkSpec spec;
        expectKeyword("network");
        spec.name = ident("network name");
        expect("{");
        expectKeyword("qubits");
        expect("{");
        while (!at("}")) {
            spec.qubits.push_back(qinit());
            expect(";");
        }
        expect("}");
        while (atKeyword("agent")) {
            spec.agents.push_back(agent());
        }
        if (atKeyword("groups")) {
            next();
            expect("{");
            while (!at("}")) {
                Group g;
                g.loc = peek().loc;
                g.name = ident("group name");
                expect("=");
                expect("{");
                if (!at("}")) {
                    g.members = identList();
                }
                expect("}");
                expect(";");
                spec.groups.push_back(std::move(g));
            }
            expect("}");
        }
        if (atKeyword("formulae")) {
            next();
            expect("{");
            while (!at("}")) {
                spec.formulas.push_back(formula());
                expect(";");
            }
            expect("}");
        }
        if (atKeyword("macros")) {
            next();
            expect("{");
            while (!at("}")) {
                Macro m;
                m.loc = peek().loc;
                m.name = ident("macro name");
                expect("(");
                if (!at(")")) {
                    m.params = identList();
                }
                expect(")");
                expect("=");
                expect("[");
                while (!at("]")) {
                    m.body.push_back(event());
                    expect(";");
                }
                expect("]");
                expect(";");
                spec.macros.push_back(std::move(m));
            }
            expect("}");
        }
        if (!at("}")) {
            fail({"'agent'", "'groups'", "'formulae'", "'macros'", "'}'"});
        }
        next();
        if (peek().kind != Tok::End) {
            fail({"end of input"});
        }
        return spec;
    }

    logic::FormulaPtr formulaOnly() {
        auto f = formula();
        if (peek().kind != Tok::End) {
            fail({"end of input"});
        }
        return f;
    }

  private:
    const Token& peek(std::size_t ahead = 0) const {
        return toks_[std::min(pos_ + ahead, toks_.size() - 1)];
    }

    const Token& next() {
        const Token& t = peek();
        if (pos_ < toks_.size() - 1) {
            ++pos_;
        }
        return t;
    }

    bool at(std::string_view punct, std::size_t ahead = 0) const {
        const Token& t = peek(ahead);
        return t.kind == Tok::Punct && t.text == punct;
    }

    bool atKeyword(std::string_view kw, std::size_t ahead = 0) const {
        const Token& t = peek(ahead);
        return t.kind == Tok::Ident && t.text == kw;
    }

    [[noreturn]] void fail(std::vector<std::string> expected) const {
        throw SyntaxError(peek().loc, describe(peek()), std::move(expected));
    }

    void expect(std::string_view punct) {
        if (!at(punct)) {
            fail({"'" + std::string(punct) + "'"});
        }
        next();
    }

    void expectKeyword(std::string_view kw) {
        if (!atKeyword(kw)) {
            fail({"'" + std::string(kw) + "'"});
        }
        next();
    }

    std::string ident(const char* what) {
        if (peek().kind != Tok::Ident) {
            fail({what});
        }
        return next().text;
    }

    std::vector<std::string> identList() {
        std::vector<std::string> out{ident("identifier")};
        while (at(",")) {
            next();
            out.push_back(ident("identifier"));
        }
        return out;
    }

    int bit() {
        if (peek().kind != Tok::Number || (peek().text != "0" && peek().text != "1")) {
            fail({"'0'", "'1'"});
        }
        return next().text == "1" ? 1 : 0;
    }

    double real() {
        bool negative = false;
        if (at("-")) {
            next();
            negative = true;
        }
        if (peek().kind != Tok::Number) {
            fail({"number"});
        }
        double v = parseDouble(next().text);
        return negative ? -v : v;
    }

    quantum::Amplitude amplitude() {
        if (at("(")) {
            next();
            double re = real();
            expect(",");
            double im = real();
            expect(")");
            return {re, im};
        }
        return {real(), 0.0};
    }

    std::vector<quantum::Amplitude> amplitudeList() {
        expect("[");
        std::vector<quantum::Amplitude> out{amplitude()};
        while (at(",")) {
            next();
            out.push_back(amplitude());
        }
        expect("]");
        return out;
    }

    QubitInit qinit() {
        QubitInit q;
        q.loc = peek().loc;
        q.qubits = identList();
        expect("=");
        q.amplitudes = amplitudeList();
        return q;
    }

    AgentSpec agent() {
        AgentSpec a;
        a.loc = peek().loc;
        expectKeyword("agent");
        a.name = ident("agent name");
        if (at("(")) {
            next();
            expectKeyword("inputs");
            expect(":");
            do {
                if (at(",")) {
                    next();
                }
                Input in{ident("input name"), std::nullopt};
                if (at("=")) {
                    next();
                    in.pinned = bit();
                }
                a.inputs.push_back(std::move(in));
            } while (at(","));
            expect(")");
        }
        if (atKeyword("owns")) {
            next();
            a.owned = identList();
        }
        if (atKeyword("knows")) {
            next();
            a.known = identList();
        }
        expect("{");
        while (!at("}")) {
            a.events.push_back(event());
            expect(";");
        }
        expect("}");
        return a;
    }

    Angle angle() {
        Angle out;
        bool negative = false;
        if (at("-")) {
            next();
            negative = true;
            out.symbol = "-";
        }
        double value = 0.0;
        if (atKeyword("pi")) {
            next();
            value = std::numbers::pi;
            out.symbol += "pi";
        } else if (peek().kind == Tok::Number) {
            std::string num = next().text;
            value = parseDouble(num);
            out.symbol += num;
            if (at("*")) {
                next();
                expectKeyword("pi");
                value *= std::numbers::pi;
                out.symbol += "*pi";
            }
        } else {
            fail({"angle"});
        }
        if (at("/")) {
            next();
            if (peek().kind != Tok::Number) {
                fail({"number"});
            }
            std::string den = next().text;
            value /= parseDouble(den);
            out.symbol += "/" + den;
        }
        out.radians = negative ? -value : value;
        return out;
    }

    Event event() {
        Event e;
        e.loc = peek().loc;
        const Token& t = peek();
        if (t.kind != Tok::Ident) {
            fail({"event"});
        }
        if (t.text == "E" && at("(", 1)) {
            next();
            expect("(");
            Entangle en;
            en.q = ident("qubit");
            expect(",");
            en.r = ident("qubit");
            expect(")");
            e.body = en;
        } else if ((t.text == "X" || t.text == "Z") && at("(", 1)) {
            Correction c;
            c.pauli = t.text == "X" ? quantum::Pauli::X : quantum::Pauli::Z;
            next();
            expect("(");
            c.qubit = ident("qubit");
            expect(")");
            if (atKeyword("if")) {
                next();
                c.condition = ident("signal");
            }
            e.body = c;
        } else if ((t.text == "send" || t.text == "receive") && peek(1).kind == Tok::Ident) {
            bool send = t.text == "send";
            next();
            std::string peer = ident("agent name");
            expectKeyword("classical");
            expect("(");
            std::vector<std::string> vars = identList();
            expect(")");
            if (send) {
                e.body = ClassicalSend{peer, vars};
            } else {
                e.body = ClassicalRecv{peer, vars};
            }
        } else if ((t.text == "qsend" || t.text == "qreceive") && peek(1).kind == Tok::Ident) {
            bool send = t.text == "qsend";
            next();
            std::string peer = ident("agent name");
            std::string q = ident("qubit");
            if (send) {
                e.body = QuantumSend{peer, q};
            } else {
                e.body = QuantumRecv{peer, q};
            }
        } else if (at("=", 1)) {
            Measure m;
            m.outcome = next().text;
            expect("=");
            expectKeyword("M");
            expect("(");
            m.qubit = ident("qubit");
            expect(",");
            m.angle = angle();
            if (at(",") && atKeyword("s", 1)) {
                next();
                next();
                expect("=");
                m.sDep = ident("signal");
            }
            if (at(",") && atKeyword("t", 1)) {
                next();
                next();
                expect("=");
                m.tDep = ident("signal");
            }
            expect(")");
            e.body = m;
        } else if (at("(", 1)) {
            MacroCall call;
            call.name = next().text;
            expect("(");
            if (!at(")")) {
                call.args = identList();
            }
            expect(")");
            e.body = call;
        } else {
            fail({"event"});
        }
        return e;
    }

    // formula := disj ('->' formula)?
    logic::FormulaPtr formula() {
        auto lhs = disjunction();
        if (at("->")) {
            next();
            return logic::makeBinary(logic::Op::Implies, lhs, formula());
        }
        return lhs;
    }

    logic::FormulaPtr disjunction() {
        auto lhs = conjunction();
        while (atKeyword("or")) {
            next();
            lhs = logic::makeBinary(logic::Op::Or, lhs, conjunction());
        }
        return lhs;
    }

    logic::FormulaPtr conjunction() {
        auto lhs = unary();
        while (atKeyword("and")) {
            next();
            lhs = logic::makeBinary(logic::Op::And, lhs, unary());
        }
        return lhs;
    }

    logic::FormulaPtr unary() {
        using logic::Op;
        if (at("!")) {
            next();
            return logic::makeUnary(Op::Not, unary());
        }
        if (peek().kind == Tok::Ident && !at(".", 1) && !at("==", 1)) {
            static const std::pair<const char*, Op> temporal[] = {{"EX", Op::EX}, {"EF", Op::EF}, {"EG", Op::EG},
                                                                  {"AX", Op::AX}, {"AF", Op::AF}, {"AG", Op::AG}};
            for (const auto& [name, op] : temporal) {
                if (peek().text == name) {
                    next();
                    return logic::makeUnary(op, unary());
                }
            }
            static const std::pair<const char*, Op> epistemic[] = {
                {"K", Op::K}, {"GK", Op::GK}, {"CK", Op::CK}, {"DK", Op::DK}};
            for (const auto& [name, op] : epistemic) {
                if (peek().text == name && at("(", 1)) {
                    next();
                    expect("(");
                    std::string who = ident("agent or group name");
                    expect(",");
                    auto body = formula();
                    expect(")");
                    return logic::makeEpistemic(op, who, body);
                }
            }
            if ((peek().text == "E" || peek().text == "A") && at("[", 1)) {
                Op op = peek().text == "E" ? Op::EU : Op::AU;
                next();
                expect("[");
                auto lhs = formula();
                expectKeyword("U");
                auto rhs = formula();
                expect("]");
                return logic::makeBinary(op, lhs, rhs);
            }
        }
        return primary();
    }

    logic::FormulaPtr primary() {
        if (at("(")) {
            next();
            auto f = formula();
            expect(")");
            return f;
        }
        if (atKeyword("true") && !at("==", 1)) {
            next();
            return logic::makeTrue();
        }
        if (atKeyword("has") && at("(", 1)) {
            next();
            expect("(");
            logic::Has h;
            h.agent = ident("agent name");
            expect(",");
            h.qubit = ident("qubit");
            expect(")");
            return logic::makeAtom(h);
        }
        if (peek().kind != Tok::Ident) {
            fail({"formula"});
        }
        std::string first = next().text;
        if (at(".")) {
            next();
            logic::VarRef lhs{first, ident("variable")};
            expect("==");
            if (peek().kind == Tok::Number) {
                return logic::makeAtom(logic::VarEq{lhs, bit()});
            }
            std::string agent = ident("agent name or bit");
            expect(".");
            return logic::makeAtom(logic::VarEqVar{lhs, {agent, ident("variable")}});
        }
        expect("==");
        if (atKeyword("ket") && at("[", 1)) {
            next();
            return logic::makeAtom(logic::QubitIsKet{first, amplitudeList()});
        }
        if (atKeyword("init") && at("(", 1)) {
            next();
            expect("(");
            std::string of = ident("qubit");
            expect(")");
            return logic::makeAtom(logic::QubitEqInit{first, of});
        }
        return logic::makeAtom(logic::QubitEqQubit{first, ident("qubit, 'ket' or 'init'")});
    }

    std::vector<Token> toks_;
    std::size_t pos_ = 0;
};

// ---------------------------------------------------------------------------
// Printer

struct EventPrinter {
    std::string operator()(const Entangle& e) const { return "E(" + e.q + ", " + e.r + ")"; }
    std::string operator()(const Measure& m) const {
        std::string angle = m.angle.symbol.empty() ? text::shortestDouble(m.angle.radians) : m.angle.symbol;
        std::string out = m.outcome + " = M(" + m.qubit + ", " + angle;
        if (m.sDep) {
            out += ", s = " + *m.sDep;
        }
        if (m.tDep) {
            out += ", t = " + *m.tDep;
        }
        return out + ")";
    }
    std::string operator()(const Correction& c) const {
        std::string out = (c.pauli == quantum::Pauli::X ? "X(" : "Z(") + c.qubit + ")";
        if (c.condition) {
            out += " if " + *c.condition;
        }
        return out;
    }
    std::string operator()(const ClassicalSend& s) const {
        return "send " + s.to + " classical(" + text::join(s.vars, ", ") + ")";
    }
    std::string operator()(const ClassicalRecv& r) const {
        return "receive " + r.from + " classical(" + text::join(r.vars, ", ") + ")";
    }
    std::string operator()(const QuantumSend& s) const { return "qsend " + s.to + " " + s.qubit; }
    std::string operator()(const QuantumRecv& r) const { return "qreceive " + r.from + " " + r.bound; }
    std::string operator()(const MacroCall& m) const { return m.name + "(" + text::join(m.args, ", ") + ")"; }
};

std::string printEvent(const Event& e) { return std::visit(EventPrinter{}, e.body); }

bool eventsEqual(const std::vector<Event>& a, const std::vector<Event>& b) {
    if (a.size() != b.size()) {
        return false;
    }
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (!(a[i].body == b[i].body)) {
            return false;
        }
    }
    return true;
}

// ---------------------------------------------------------------------------
// Macro expansion

std::string substitute(const std::string& name, const std::vector<std::string>& params,
                       const std::vector<std::string>& args) {
    for (std::size_t i = 0; i < params.size(); ++i) {
        if (params[i] == name) {
            return args[i];
        }
    }
    return name;
}

EventBody substituteBody(const EventBody& body, const std::vector<std::string>& params,
                         const std::vector<std::string>& args) {
    auto sub = [&](const std::string& s) { return substitute(s, params, args); };
    auto subOpt = [&](const std::optional<std::string>& s) -> std::optional<std::string> {
        if (!s) {
            return std::nullopt;
        }
        return sub(*s);
    };
    return std::visit(
        [&](const auto& e) -> EventBody {
            using T = std::decay_t<decltype(e)>;
            T out = e;
            if constexpr (std::is_same_v<T, Entangle>) {
                out.q = sub(e.q);
                out.r = sub(e.r);
            } else if constexpr (std::is_same_v<T, Measure>) {
                out.qubit = sub(e.qubit);
                out.sDep = subOpt(e.sDep);
                out.tDep = subOpt(e.tDep);
                out.outcome = sub(e.outcome);
            } else if constexpr (std::is_same_v<T, Correction>) {
                out.qubit = sub(e.qubit);
                out.condition = subOpt(e.condition);
            } else if constexpr (std::is_same_v<T, MacroCall>) {
                for (auto& a : out.args) {
                    a = sub(a);
                }
            }
            return out;
        },
        body);
}

class Expander {
  public:
    explicit Expander(const NetworkSpec& spec) : spec_(spec) {}

    NetworkSpec run() {
        checkMacros();
        NetworkSpec out = spec_;
        out.macros.clear();
        std::vector<SemanticError> errors;
        for (auto& agent : out.agents) {
            std::vector<Event> flat;
            for (const auto& e : agent.events) {
                expandInto(e, flat, errors);
            }
            agent.events = std::move(flat);
        }
        if (!errors.empty()) {
            std::sort(errors.begin(), errors.end());
            if (arity_) {
                throw ArityError(std::move(errors));
            }
            throw ValidationError(std::move(errors));
        }
        return out;
    }

  private:
    const Macro* find(const std::string& name) const {
        for (const auto& m : spec_.macros) {
            if (m.name == name) {
                return &m;
            }
        }
        return nullptr;
    }

    void checkMacros() {
        std::vector<SemanticError> errors;
        std::set<std::string> seen;
        for (const auto& m : spec_.macros) {
            if (!seen.insert(m.name).second) {
                errors.push_back({"duplicate macro " + m.name, m.loc});
            }
            for (const auto& e : m.body) {
                if (std::holds_alternative<ClassicalSend>(e.body) || std::holds_alternative<ClassicalRecv>(e.body) ||
                    std::holds_alternative<QuantumSend>(e.body) || std::holds_alternative<QuantumRecv>(e.body)) {
                    errors.push_back({"macro " + m.name + " contains a communication event", e.loc});
                }
            }
        }
        if (!errors.empty()) {
            std::sort(errors.begin(), errors.end());
            throw ValidationError(std::move(errors));
        }
        // Cycle search over the call graph.
        std::vector<SemanticError> cycles;
        for (const auto& m : spec_.macros) {
            std::vector<std::string> stack;
            if (reaches(m.name, m.name, stack)) {
                cycles.push_back({"recursive macro " + m.name, m.loc});
            }
        }
        if (!cycles.empty()) {
            std::sort(cycles.begin(), cycles.end());
            throw RecursionError(std::move(cycles));
        }
    }

    bool reaches(const std::string& from, const std::string& target, std::vector<std::string>& visited) const {
        const Macro* m = find(from);
        if (!m) {
            return false;
        }
        for (const auto& e : m->body) {
            if (const auto* call = std::get_if<MacroCall>(&e.body)) {
                if (call->name == target) {
                    return true;
                }
                if (std::find(visited.begin(), visited.end(), call->name) == visited.end()) {
                    visited.push_back(call->name);
                    if (reaches(call->name, target, visited)) {
                        return true;
                    }
                }
            }
        }
        return false;
    }

    void expandInto(const Event& e, std::vector<Event>& out, std::vector<SemanticError>& errors) {
        const auto* call = std::get_if<MacroCall>(&e.body);
        if (!call) {
            out.push_back(e);
            return;
        }
        const Macro* m = find(call->name);
        if (!m) {
            errors.push_back({"unknown macro " + call->name, e.loc});
            return;
        }
        if (m->params.size() != call->args.size()) {
            arity_ = true;
            errors.push_back({"macro " + m->name + " expects " + std::to_string(m->params.size()) +
                                  " arguments, got " + std::to_string(call->args.size()),
                              e.loc});
            return;
        }
        for (const auto& inner : m->body) {
            Event sub{substituteBody(inner.body, m->params, call->args), e.loc};
            expandInto(sub, out, errors);
        }
    }

    const NetworkSpec& spec_;
    bool arity_ = false;
};

// ---------------------------------------------------------------------------
// Validation

std::string errorList(const std::vector<SemanticError>& errors) {
    std::string out;
    for (const auto& e : errors) {
        if (!out.empty()) {
            out += "; ";
        }
        out += e.message;
    }
    return out;
}

template <typename T>
std::optional<std::size_t> indexOf(const std::vector<T>& items, std::string_view name) {
    for (std::size_t i = 0; i < items.size(); ++i) {
        if (items[i].name == name) {
            return i;
        }
    }
    return std::nullopt;
}

/// Pairing key: (sender, receiver).
struct Channel {
    std::string from;
    std::string to;
    auto operator<=>(const Channel&) const = default;
};

/// Replaces each qreceive binder, and later uses of it, by the qubit the
/// paired qsend transfers. Binders that name a different declared qubit are
/// reported.
NetworkSpec dealias(const NetworkSpec& spec, std::vector<SemanticError>& errors) {
    std::set<std::string> declared;
    for (const auto& init : spec.qubits) {
        declared.insert(init.qubits.begin(), init.qubits.end());
    }
    NetworkSpec out = spec;
    std::map<std::pair<Channel, std::size_t>, std::string> sent;
    bool changed = true;
    for (std::size_t round = 0; changed && round <= spec.agents.size() + 1; ++round) {
        changed = false;
        out = spec;
        for (auto& a : out.agents) {
            std::map<std::string, std::string> alias;
            std::map<Channel, std::size_t> sendOrd, recvOrd;
            auto sub = [&](std::string& name) {
                auto it = alias.find(name);
                if (it != alias.end()) {
                    name = it->second;
                }
            };
            for (auto& e : a.events) {
                if (auto* en = std::get_if<Entangle>(&e.body)) {
                    sub(en->q);
                    sub(en->r);
                } else if (auto* m = std::get_if<Measure>(&e.body)) {
                    sub(m->qubit);
                } else if (auto* c = std::get_if<Correction>(&e.body)) {
                    sub(c->qubit);
                } else if (auto* qs = std::get_if<QuantumSend>(&e.body)) {
                    sub(qs->qubit);
                    Channel ch{a.name, qs->to};
                    auto key = std::make_pair(ch, sendOrd[ch]++);
                    auto it = sent.find(key);
                    if (it == sent.end() || it->second != qs->qubit) {
                        sent[key] = qs->qubit;
                        changed = true;
                    }
                } else if (auto* qr = std::get_if<QuantumRecv>(&e.body)) {
                    Channel ch{qr->from, a.name};
                    auto it = sent.find({ch, recvOrd[ch]++});
                    if (it == sent.end() || it->second == qr->bound) {
                        continue;
                    }
                    if (declared.count(qr->bound)) {
                        continue;  // reported below once the fixpoint settles
                    }
                    alias[qr->bound] = it->second;
                    qr->bound = it->second;
                }
            }
        }
    }
    for (const auto& a : out.agents) {
        std::map<Channel, std::size_t> recvOrd;
        for (std::size_t k = 0; k < a.events.size(); ++k) {
            if (const auto* qr = std::get_if<QuantumRecv>(&a.events[k].body)) {
                Channel ch{qr->from, a.name};
                auto it = sent.find({ch, recvOrd[ch]++});
                if (it != sent.end() && it->second != qr->bound) {
                    errors.push_back({"qreceive binds " + qr->bound + " but receives " + it->second + " at event " +
                                          std::to_string(k + 1) + " of " + a.name,
                                      a.events[k].loc});
                }
            }
        }
    }
    return out;
}

struct Analysis {
    std::vector<SemanticError> errors;
    ValidatedNetwork net;

    void error(std::string message, SourceLocation loc) { errors.push_back({std::move(message), loc}); }
};

struct PendingQuantum {
    std::string qubit;
    SourceLocation loc;
};

void analyze(const NetworkSpec& spec, Analysis& an) {
    ValidatedNetwork& net = an.net;
    net.name = spec.name;

    // Qubits.
    std::map<std::string, std::size_t> qubitIndex;
    for (const auto& init : spec.qubits) {
        bool ok = true;
        for (const auto& q : init.qubits) {
            if (qubitIndex.count(q)) {
                an.error("qubit " + q + " declared twice", init.loc);
                ok = false;
                continue;
            }
            qubitIndex[q] = net.qubits.size();
            net.qubits.push_back(q);
        }
        std::size_t expected = std::size_t{1} << std::min<std::size_t>(init.qubits.size(), 30);
        if (init.amplitudes.size() != expected) {
            an.error("initial state of " + text::join(init.qubits, ",") + " needs " + std::to_string(expected) +
                         " amplitudes, got " + std::to_string(init.amplitudes.size()),
                     init.loc);
            ok = false;
        } else {
            double norm = 0.0;
            for (const auto& a : init.amplitudes) {
                norm += std::norm(a);
            }
            if (std::abs(norm - 1.0) > quantum::kNormTolerance) {
                an.error("initial state of " + text::join(init.qubits, ",") + " is not normalized", init.loc);
                ok = false;
            }
        }
        if (ok) {
            net.inits.push_back(quantum::PureStateVector::make(init.qubits, init.amplitudes));
        }
    }
    if (net.qubits.size() > kMaxQubits) {
        an.error("more than " + std::to_string(kMaxQubits) + " qubits", {});
    }

    auto qubitId = [&](const std::string& q, SourceLocation loc) -> std::optional<std::size_t> {
        auto it = qubitIndex.find(q);
        if (it == qubitIndex.end()) {
            an.error("undeclared qubit " + q, loc);
            return std::nullopt;
        }
        return it->second;
    };

    // Agents and initial ownership.
    std::map<std::string, std::string> initialOwner;
    std::set<std::string> agentNames;
    for (const auto& a : spec.agents) {
        if (!agentNames.insert(a.name).second) {
            an.error("agent " + a.name + " declared twice", a.loc);
        }
        for (const auto& q : a.owned) {
            if (!qubitId(q, a.loc)) {
                continue;
            }
            auto [it, fresh] = initialOwner.emplace(q, a.name);
            if (!fresh) {
                std::string first = std::min(it->second, a.name);
                std::string second = std::max(it->second, a.name);
                an.error("qubit " + q + " owned by both " + first + " and " + second, a.loc);
            }
        }
        for (const auto& q : a.known) {
            if (std::find(a.owned.begin(), a.owned.end(), q) == a.owned.end()) {
                an.error("agent " + a.name + " knows " + q + " without owning it", a.loc);
            }
        }
    }
    if (!spec.agents.empty()) {
        for (const auto& q : net.qubits) {
            if (!initialOwner.count(q)) {
                an.error("qubit " + q + " not owned by any agent", {});
            }
        }
    }

    // Pairing queues: per channel, the ordinal list of classical arities and quantum qubits.
    std::map<Channel, std::vector<std::pair<std::size_t, SourceLocation>>> classicalSends, classicalRecvs;
    std::map<Channel, std::vector<PendingQuantum>> quantumSends;
    std::map<Channel, std::vector<SourceLocation>> quantumRecvs;
    for (const auto& a : spec.agents) {
        for (const auto& e : a.events) {
            auto peerCheck = [&](const std::string& peer) {
                if (!agentNames.count(peer)) {
                    an.error("agent " + a.name + " communicates with unknown agent " + peer, e.loc);
                } else if (peer == a.name) {
                    an.error("agent " + a.name + " communicates with itself", e.loc);
                }
            };
            if (const auto* s = std::get_if<ClassicalSend>(&e.body)) {
                peerCheck(s->to);
                classicalSends[{a.name, s->to}].push_back({s->vars.size(), e.loc});
            } else if (const auto* r = std::get_if<ClassicalRecv>(&e.body)) {
                peerCheck(r->from);
                classicalRecvs[{r->from, a.name}].push_back({r->vars.size(), e.loc});
            } else if (const auto* qs = std::get_if<QuantumSend>(&e.body)) {
                peerCheck(qs->to);
                quantumSends[{a.name, qs->to}].push_back({qs->qubit, e.loc});
            } else if (const auto* qr = std::get_if<QuantumRecv>(&e.body)) {
                peerCheck(qr->from);
                quantumRecvs[{qr->from, a.name}].push_back(e.loc);
            } else if (std::holds_alternative<MacroCall>(e.body)) {
                an.error("unexpanded macro call in agent " + a.name, e.loc);
            }
        }
    }
    auto channelText = [](const Channel& c) { return c.from + " to " + c.to; };
    for (const auto& [ch, sends] : classicalSends) {
        const auto& recvs = classicalRecvs[ch];
        for (std::size_t k = recvs.size(); k < sends.size(); ++k) {
            an.error("unpaired send: classical message " + std::to_string(k + 1) + " from " + channelText(ch),
                     sends[k].second);
        }
        for (std::size_t k = 0; k < std::min(sends.size(), recvs.size()); ++k) {
            if (sends[k].first != recvs[k].first) {
                an.error("classical message " + std::to_string(k + 1) + " from " + channelText(ch) +
                             " sends " + std::to_string(sends[k].first) + " bits but receives " +
                             std::to_string(recvs[k].first),
                         recvs[k].second);
            }
        }
    }
    for (const auto& [ch, recvs] : classicalRecvs) {
        const auto& sends = classicalSends[ch];
        for (std::size_t k = sends.size(); k < recvs.size(); ++k) {
            an.error("unpaired receive: classical message " + std::to_string(k + 1) + " from " + channelText(ch),
                     recvs[k].second);
        }
    }
    for (const auto& [ch, sends] : quantumSends) {
        const auto& recvs = quantumRecvs[ch];
        for (std::size_t k = recvs.size(); k < sends.size(); ++k) {
            an.error("unpaired send: qubit " + sends[k].qubit + " from " + channelText(ch), sends[k].loc);
        }
    }
    for (const auto& [ch, recvs] : quantumRecvs) {
        const auto& sends = quantumSends[ch];
        for (std::size_t k = sends.size(); k < recvs.size(); ++k) {
            an.error("unpaired receive: quantum message " + std::to_string(k + 1) + " from " + channelText(ch),
                     recvs[k]);
        }
    }

    // Per-agent flow analysis and resolution.
    for (const auto& a : spec.agents) {
        ResolvedAgent ra;
        ra.name = a.name;
        std::set<std::string> owned(a.owned.begin(), a.owned.end());
        auto resolveQubit = [](const std::string& name) { return name; };

        // Variable layout: received, inputs, signals.
        std::vector<ClassicalVar> received, inputs, signals;
        std::set<std::string> declared;
        auto declare = [&](std::vector<ClassicalVar>& into, const std::string& name, VarRole role, SourceLocation loc,
                           std::size_t eventNo) {
            if (!declared.insert(name).second) {
                an.error("variable " + name + " of " + a.name + " assigned twice" +
                             (eventNo ? " at event " + std::to_string(eventNo) : std::string()),
                         loc);
                return;
            }
            if (name == "pc" || qubitIndex.count(name)) {
                an.error("variable " + name + " of " + a.name + " clashes with a reserved or qubit name", loc);
            }
            into.push_back({name, role, std::nullopt});
        };
        for (const auto& in : a.inputs) {
            declare(inputs, in.name, VarRole::Input, a.loc, 0);
            if (!inputs.empty() && inputs.back().name == in.name) {
                inputs.back().pinned = in.pinned;
            }
        }
        std::set<std::string> defined;
        for (const auto& in : a.inputs) {
            defined.insert(in.name);
        }
        for (std::size_t k = 0; k < a.events.size(); ++k) {
            const Event& e = a.events[k];
            std::size_t no = k + 1;
            std::string at = " at event " + std::to_string(no) + " of " + a.name;
            auto needOwned = [&](const std::string& q) {
                if (!qubitIndex.count(q)) {
                    an.error("undeclared qubit " + q, e.loc);
                } else if (!owned.count(q)) {
                    an.error("qubit " + q + " not owned at event " + std::to_string(no) + " of " + a.name, e.loc);
                }
            };
            auto needDefined = [&](const std::string& v) {
                if (!defined.count(v)) {
                    an.error("variable " + v + " used before definition" + at, e.loc);
                }
            };
            if (const auto* en = std::get_if<Entangle>(&e.body)) {
                needOwned(resolveQubit(en->q));
                needOwned(resolveQubit(en->r));
                if (resolveQubit(en->q) == resolveQubit(en->r)) {
                    an.error("entangling qubit " + resolveQubit(en->q) + " with itself" + at, e.loc);
                }
            } else if (const auto* m = std::get_if<Measure>(&e.body)) {
                needOwned(resolveQubit(m->qubit));
                if (m->sDep) {
                    needDefined(*m->sDep);
                }
                if (m->tDep) {
                    needDefined(*m->tDep);
                }
                declare(signals, m->outcome, VarRole::Signal, e.loc, no);
                defined.insert(m->outcome);
            } else if (const auto* c = std::get_if<Correction>(&e.body)) {
                needOwned(resolveQubit(c->qubit));
                if (c->condition) {
                    needDefined(*c->condition);
                }
            } else if (const auto* s = std::get_if<ClassicalSend>(&e.body)) {
                for (const auto& v : s->vars) {
                    needDefined(v);
                }
            } else if (const auto* r = std::get_if<ClassicalRecv>(&e.body)) {
                for (const auto& v : r->vars) {
                    declare(received, v, VarRole::Received, e.loc, no);
                    defined.insert(v);
                }
            } else if (const auto* qs = std::get_if<QuantumSend>(&e.body)) {
                std::string q = resolveQubit(qs->qubit);
                needOwned(q);
                owned.erase(q);
            } else if (const auto* qr = std::get_if<QuantumRecv>(&e.body)) {
                if (qubitIndex.count(qr->bound)) {
                    owned.insert(qr->bound);
                }
            }
        }
        ra.vars = received;
        ra.vars.insert(ra.vars.end(), inputs.begin(), inputs.end());
        ra.vars.insert(ra.vars.end(), signals.begin(), signals.end());
        net.agents.push_back(std::move(ra));
    }
}

/// Second pass: resolve names into indexes once the spec is known to be valid.
void resolve(const NetworkSpec& spec, ValidatedNetwork& net) {
    for (std::size_t ai = 0; ai < spec.agents.size(); ++ai) {
        const AgentSpec& a = spec.agents[ai];
        ResolvedAgent& ra = net.agents[ai];
        auto q = [&](const std::string& name) { return *net.qubitIndex(name); };
        auto v = [&](const std::string& name) { return *ra.varIndex(name); };
        auto vOpt = [&](const std::optional<std::string>& name) -> std::optional<std::size_t> {
            if (!name) {
                return std::nullopt;
            }
            return v(*name);
        };
        for (const auto& name : a.owned) {
            ra.owned |= qubitBit(*net.qubitIndex(name));
        }
        for (const auto& name : a.known) {
            ra.known |= qubitBit(*net.qubitIndex(name));
        }
        for (std::size_t k = 0; k < a.events.size(); ++k) {
            const Event& e = a.events[k];
            std::size_t src = k + 1;
            auto push = [&](ResolvedBody body) { ra.events.push_back({std::move(body), src}); };
            if (const auto* en = std::get_if<Entangle>(&e.body)) {
                push(step::Entangle{q(en->q), q(en->r)});
            } else if (const auto* m = std::get_if<Measure>(&e.body)) {
                push(step::Measure{q(m->qubit), m->angle, vOpt(m->sDep), vOpt(m->tDep), v(m->outcome)});
            } else if (const auto* c = std::get_if<Correction>(&e.body)) {
                push(step::Correction{c->pauli, q(c->qubit), vOpt(c->condition)});
            } else if (const auto* s = std::get_if<ClassicalSend>(&e.body)) {
                for (const auto& var : s->vars) {
                    push(step::SendBit{*net.agentIndex(s->to), v(var)});
                }
            } else if (const auto* r = std::get_if<ClassicalRecv>(&e.body)) {
                for (const auto& var : r->vars) {
                    push(step::RecvBit{*net.agentIndex(r->from), v(var)});
                }
            } else if (const auto* qs = std::get_if<QuantumSend>(&e.body)) {
                push(step::SendQubit{*net.agentIndex(qs->to), q(qs->qubit)});
            } else if (const auto* qr = std::get_if<QuantumRecv>(&e.body)) {
                push(step::RecvQubit{*net.agentIndex(qr->from), q(qr->bound)});
            }
        }
    }
    for (const auto& g : spec.groups) {
        ResolvedGroup rg{g.name, {}};
        for (const auto& m : g.members) {
            rg.members.push_back(*net.agentIndex(m));
        }
        net.groups.push_back(std::move(rg));
    }
    net.formulas = spec.formulas;
}

}  // namespace

SyntaxError::SyntaxError(SourceLocation loc, std::string found, std::vector<std::string> expected)
    : std::runtime_error("line " + std::to_string(loc.line) + ", column " + std::to_string(loc.column) +
                         ": expected " + joinExpected(expected) + ", found " + found),
      loc_(loc),
      expected_(std::move(expected)) {}

bool SemanticError::operator<(const SemanticError& o) const { return message < o.message; }

ValidationError::ValidationError(std::vector<SemanticError> errors)
    : std::runtime_error(errorList(errors)), errors_(std::move(errors)) {}

NetworkSpec parse(std::string_view source) { return Parser(source).network(); }

logic::FormulaPtr parseFormula(std::string_view source) { return Parser(source).formulaOnly(); }

std::string print(const NetworkSpec& spec) {
    std::string out = "network " + spec.name + " {\n  qubits {\n";
    for (const auto& q : spec.qubits) {
        out += "    " + text::join(q.qubits, ", ") + " = " + text::amplitudeList(q.amplitudes) + ";\n";
    }
    out += "  }\n";
    for (const auto& a : spec.agents) {
        out += "  agent " + a.name;
        if (!a.inputs.empty()) {
            std::vector<std::string> parts;
            for (const auto& in : a.inputs) {
                parts.push_back(in.pinned ? in.name + " = " + std::to_string(*in.pinned) : in.name);
            }
            out += " (inputs: " + text::join(parts, ", ") + ")";
        }
        if (!a.owned.empty()) {
            out += " owns " + text::join(a.owned, ", ");
        }
        if (!a.known.empty()) {
            out += " knows " + text::join(a.known, ", ");
        }
        out += " {\n";
        for (const auto& e : a.events) {
            out += "    " + printEvent(e) + ";\n";
        }
        out += "  }\n";
    }
    if (!spec.groups.empty()) {
        out += "  groups {\n";
        for (const auto& g : spec.groups) {
            out += "    " + g.name + " = {" + text::join(g.members, ", ") + "};\n";
        }
        out += "  }\n";
    }
    if (!spec.formulas.empty()) {
        out += "  formulae {\n";
        for (const auto& f : spec.formulas) {
            out += "    " + logic::toString(*f) + ";\n";
        }
        out += "  }\n";
    }
    if (!spec.macros.empty()) {
        out += "  macros {\n";
        for (const auto& m : spec.macros) {
            out += "    " + m.name + "(" + text::join(m.params, ", ") + ") = [";
            for (const auto& e : m.body) {
                out += printEvent(e) + ";";
            }
            out += "];\n";
        }
        out += "  }\n";
    }
    return out + "}\n";
}

NetworkSpec expandMacros(const NetworkSpec& spec) {
    if (spec.macros.empty()) {
        bool anyCall = false;
        for (const auto& a : spec.agents) {
            for (const auto& e : a.events) {
                anyCall = anyCall || std::holds_alternative<MacroCall>(e.body);
            }
        }
        if (!anyCall) {
            return spec;
        }
    }
    return Expander(spec).run();
}

bool structurallyEqual(const NetworkSpec& a, const NetworkSpec& b) {
    if (a.name != b.name || a.qubits.size() != b.qubits.size() || a.agents.size() != b.agents.size() ||
        a.groups.size() != b.groups.size() || a.formulas.size() != b.formulas.size() ||
        a.macros.size() != b.macros.size()) {
        return false;
    }
    for (std::size_t i = 0; i < a.qubits.size(); ++i) {
        if (a.qubits[i].qubits != b.qubits[i].qubits || a.qubits[i].amplitudes != b.qubits[i].amplitudes) {
            return false;
        }
    }
    for (std::size_t i = 0; i < a.agents.size(); ++i) {
        const auto& x = a.agents[i];
        const auto& y = b.agents[i];
        if (x.name != y.name || x.inputs != y.inputs || x.owned != y.owned || x.known != y.known ||
            !eventsEqual(x.events, y.events)) {
            return false;
        }
    }
    for (std::size_t i = 0; i < a.groups.size(); ++i) {
        if (a.groups[i].name != b.groups[i].name || a.groups[i].members != b.groups[i].members) {
            return false;
        }
    }
    for (std::size_t i = 0; i < a.formulas.size(); ++i) {
        if (!logic::structurallyEqual(*a.formulas[i], *b.formulas[i])) {
            return false;
        }
    }
    for (std::size_t i = 0; i < a.macros.size(); ++i) {
        if (a.macros[i].name != b.macros[i].name || a.macros[i].params != b.macros[i].params ||
            !eventsEqual(a.macros[i].body, b.macros[i].body)) {
            return false;
        }
    }
    return true;
}

std::optional<std::size_t> ResolvedAgent::varIndex(std::string_view n) const { return indexOf(vars, n); }

std::optional<std::size_t> ValidatedNetwork::qubitIndex(std::string_view n) const {
    for (std::size_t i = 0; i < qubits.size(); ++i) {
        if (qubits[i] == n) {
            return i;
        }
    }
    return std::nullopt;
}

std::optional<std::size_t> ValidatedNetwork::agentIndex(std::string_view n) const { return indexOf(agents, n); }

std::optional<std::size_t> ValidatedNetwork::groupIndex(std::string_view n) const { return indexOf(groups, n); }

std::vector<SemanticError> collectErrors(const NetworkSpec& input) {
    Analysis an;
    NetworkSpec spec = dealias(input, an.errors);
    analyze(spec, an);
    std::set<std::string> groupNames;
    std::set<std::string> agentNames;
    for (const auto& a : spec.agents) {
        agentNames.insert(a.name);
    }
    for (const auto& g : spec.groups) {
        if (!groupNames.insert(g.name).second) {
            an.error("group " + g.name + " declared twice", g.loc);
        }
        if (g.members.empty()) {
            an.error("group " + g.name + " is empty", g.loc);
        }
        for (const auto& m : g.members) {
            if (!agentNames.count(m)) {
                an.error("group " + g.name + " names unknown agent " + m, g.loc);
            }
        }
    }
    std::sort(an.errors.begin(), an.errors.end());
    an.errors.erase(std::unique(an.errors.begin(), an.errors.end()), an.errors.end());
    return an.errors;
}

ValidatedNetwork validate(const NetworkSpec& input) {
    NetworkSpec expanded = expandMacros(input);
    auto errors = collectErrors(expanded);
    if (!errors.empty()) {
        throw ValidationError(std::move(errors));
    }
    Analysis an;
    NetworkSpec spec = dealias(expanded, an.errors);
    analyze(spec, an);
    resolve(spec, an.net);
    return std::move(an.net);
}

void overrideInput(NetworkSpec& spec, const std::string& qubit, std::vector<quantum::Amplitude> amplitudes) {
    for (auto& init : spec.qubits) {
        if (init.qubits.size() == 1 && init.qubits[0] == qubit) {
            init.amplitudes = std::move(amplitudes);
            return;
        }
    }
    throw std::invalid_argument("no single-qubit declaration for " + qubit);
}

}  // namespace dmcv::dmc
