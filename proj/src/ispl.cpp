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

#include "dmcv/ispl.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>

#include "dmcv/text.hpp"

namespace dmcv::ispl {

namespace {

using is::InterpretedSystem;
using is::kEnvironment;
using is::Template;
using logic::Op;

constexpr const char* kAlways = "always";

bool mentionsTrue(const logic::Formula& f) {
    if (f.op == Op::True) {
        return true;
    }
    return std::any_of(f.children.begin(), f.children.end(), [](const auto& c) { return mentionsTrue(*c); });
}

std::string ownerPrefix(const InterpretedSystem& is, std::size_t self, std::size_t owner) {
    if (owner == self) {
        return "Action";
    }
    return (owner == kEnvironment ? is.environment.name : is.agents[owner].name) + ".Action";
}

std::string domainText(const InterpretedSystem& is, const is::Var& v, std::size_t limit) {
    if (v.kind == is::VarKind::Int) {
        return std::to_string(v.lo) + ".." + std::to_string(v.hi);
    }
    auto values = v.values();
    if (values.size() > limit) {
        throw DomainTooLarge("variable " + v.name + " has " + std::to_string(values.size()) +
                             " values, limit is " + std::to_string(limit));
    }
    std::vector<std::string> lits;
    for (int x : values) {
        lits.push_back(is::literal(is, v, x));
    }
    return "{" + text::join(lits, ", ") + "}";
}

std::string conjunction(const InterpretedSystem& is, const Template& t, const is::Conjunction& c) {
    std::vector<std::string> parts;
    for (const auto& test : c) {
        parts.push_back(t.vars[test.var].name + "=" + is::literal(is, t.vars[test.var], test.value));
    }
    return text::join(parts, " and ");
}

void emitTemplate(std::ostream& out, const InterpretedSystem& is, const Template& t, std::size_t self,
                  const EmitOptions& options) {
    out << "Agent " << t.name << "\n  Vars:\n";
    for (const auto& v : t.vars) {
        out << "    " << v.name << " : " << domainText(is, v, options.maxDomain) << ";\n";
    }
    out << "  end Vars\n  Actions = {" << text::join(t.actions, ", ") << "};\n  Protocol:\n";
    for (const auto& p : t.protocol) {
        out << "    " << conjunction(is, t, p.guard) << " : {" << text::join(p.actions, ", ") << "};\n";
    }
    out << "    Other : {" << text::join(t.otherwise, ", ") << "};\n  end Protocol\n  Evolution:\n";
    for (const auto& e : t.evolution) {
        std::vector<std::string> assign;
        for (const auto& a : e.assign) {
            const is::Var& v = t.vars[a.var];
            assign.push_back(a.op == is::AssignOp::Increment ? v.name + "=" + v.name + "+" + std::to_string(a.value)
                                                              : v.name + "=" + is::literal(is, v, a.value));
        }
        std::vector<std::string> cond;
        if (!e.guard.empty()) {
            cond.push_back(conjunction(is, t, e.guard));
        }
        std::vector<bool> named(is.agents.size(), false);
        for (const auto& c : e.actions) {
            if (c.owner != kEnvironment) {
                named[c.owner] = true;
            }
            std::vector<std::string> alts;
            for (const auto& a : c.allowed) {
                alts.push_back(ownerPrefix(is, self, c.owner) + "=" + a);
            }
            cond.push_back(alts.size() == 1 ? alts[0] : "(" + text::join(alts, " or ") + ")");
        }
        if (e.othersWait) {
            for (std::size_t i = 0; i < is.agents.size(); ++i) {
                if (!named[i]) {
                    cond.push_back(ownerPrefix(is, self, i) + "=wait");
                }
            }
        }
        out << "    " << text::join(assign, " and ") << " if " << text::join(cond, " and ") << ";\n";
    }
    out << "  end Evolution\nend Agent\n\n";
}

std::string globalTest(const InterpretedSystem& is, const is::GlobalTest& t) {
    const Template& owner = is.owner(t.owner);
    return owner.name + "." + owner.vars[t.var].name + "=" + is::literal(is, owner.vars[t.var], t.value);
}

std::string falseText(const InterpretedSystem& is) { return is.environment.name + ".gc<1"; }

}  // namespace

std::string formulaText(const logic::Formula& f) {
    auto c = [&](std::size_t i) { return formulaText(*f.children.at(i)); };
    switch (f.op) {
        case Op::True: return kAlways;
        case Op::Atom:
            if (const auto* p = std::get_if<logic::NamedProp>(&f.atom)) {
                return p->name;
            }
            throw std::invalid_argument("atom " + logic::toString(f.atom) + " has no proposition name");
        case Op::Not: return "!(" + c(0) + ")";
        case Op::And: return "(" + c(0) + " and " + c(1) + ")";
        case Op::Or: return "(" + c(0) + " or " + c(1) + ")";
        case Op::Implies: return "(" + c(0) + " -> " + c(1) + ")";
        case Op::EX: return "EX(" + c(0) + ")";
        case Op::EF: return "EF(" + c(0) + ")";
        case Op::EG: return "EG(" + c(0) + ")";
        case Op::AX: return "AX(" + c(0) + ")";
        case Op::AF: return "AF(" + c(0) + ")";
        case Op::AG: return "AG(" + c(0) + ")";
        case Op::EU: return "E(" + c(0) + " U " + c(1) + ")";
        case Op::AU: return "A(" + c(0) + " U " + c(1) + ")";
        case Op::K: return "K(" + f.who + ", " + c(0) + ")";
        case Op::GK: return "GK(" + f.who + ", " + c(0) + ")";
        case Op::CK: return "GCK(" + f.who + ", " + c(0) + ")";
        case Op::DK: return "DK(" + f.who + ", " + c(0) + ")";
    }
    return "";
}

std::string emit(const InterpretedSystem& is, const EmitOptions& options) {
    std::ostringstream out;
    out << "-- network " << is.name << "\n\n";
    emitTemplate(out, is, is.environment, kEnvironment, options);
    for (std::size_t i = 0; i < is.agents.size(); ++i) {
        emitTemplate(out, is, is.agents[i], i, options);
    }

    out << "Evaluation\n";
    for (const auto& p : is.props) {
        std::vector<std::string> disj;
        for (const auto& conj : p.dnf) {
            std::vector<std::string> parts;
            for (const auto& t : conj) {
                parts.push_back(globalTest(is, t));
            }
            disj.push_back("(" + text::join(parts, " and ") + ")");
        }
        out << "  " << p.name << " if " << (disj.empty() ? falseText(is) : text::join(disj, " or ")) << ";\n";
    }
    bool always = std::any_of(is.formulas.begin(), is.formulas.end(), [](const auto& f) { return mentionsTrue(*f); });
    if (always) {
        out << "  " << kAlways << " if " << is.environment.name << ".gc>=1;\n";
    }
    out << "end Evaluation\n\nInitStates\n";
    std::vector<std::string> inits;
    for (const auto& s : is.initial) {
        std::vector<std::string> parts;
        for (std::size_t v = 0; v < s.env.size(); ++v) {
            parts.push_back(globalTest(is, {kEnvironment, v, s.env[v]}));
        }
        for (std::size_t i = 0; i < s.agents.size(); ++i) {
            for (std::size_t v = 0; v < s.agents[i].size(); ++v) {
                parts.push_back(globalTest(is, {i, v, s.agents[i][v]}));
            }
        }
        inits.push_back("(" + text::join(parts, " and ") + ")");
    }
    out << "  " << (inits.empty() ? falseText(is) : text::join(inits, " or\n  ")) << ";\nend InitStates\n\nGroups\n";
    for (const auto& g : is.groups) {
        std::vector<std::string> names;
        for (auto m : g.members) {
            names.push_back(is.agents[m].name);
        }
        out << "  " << g.name << " = {" << text::join(names, ", ") << "};\n";
    }
    out << "end Groups\n\nFormulae\n";
    for (const auto& f : is.formulas) {
        out << "  " << formulaText(*f) << ";\n";
    }
    out << "end Formulae\n";
    return out.str();
}

// ---------------------------------------------------------------------------
// Reader

namespace {

struct Token {
    std::string text;
    std::size_t line = 0;
};

std::vector<Token> lex(const std::string& src) {
    std::vector<Token> out;
    std::size_t line = 1;
    for (std::size_t i = 0; i < src.size();) {
        char c = src[i];
        if (c == '\n') {
            ++line;
            ++i;
        } else if (std::isspace(static_cast<unsigned char>(c))) {
            ++i;
        } else if (src.compare(i, 2, "--") == 0) {
            while (i < src.size() && src[i] != '\n') {
                ++i;
            }
        } else if (std::isalnum(static_cast<unsigned char>(c)) || c == '_') {
            std::size_t j = i;
            while (j < src.size() && (std::isalnum(static_cast<unsigned char>(src[j])) || src[j] == '_')) {
                ++j;
            }
            out.push_back({src.substr(i, j - i), line});
            i = j;
        } else {
            static const char* two[] = {"..", ">=", "->"};
            bool matched = false;
            for (const char* t : two) {
                if (src.compare(i, 2, t) == 0) {
                    out.push_back({t, line});
                    i += 2;
                    matched = true;
                    break;
                }
            }
            if (!matched) {
                out.push_back({std::string(1, c), line});
                ++i;
            }
        }
    }
    return out;
}

class Reader {
  public:
    explicit Reader(const std::string& src) : tokens_(lex(src)) {
        auto pos = src.find("-- network ");
        if (pos != std::string::npos) {
            auto end = src.find('\n', pos);
            is_.name = src.substr(pos + 11, end == std::string::npos ? std::string::npos : end - pos - 11);
        }
    }

    InterpretedSystem run() {
        // Templates first, so that agent names resolve in every section.
        std::vector<std::size_t> bodies;
        while (peek() == "Agent") {
            next();
            std::string name = next();
            bodies.push_back(pos_);
            Template t;
            t.name = name;
            (is_.environment.name.empty() ? is_.environment : is_.agents.emplace_back()) = t;
            skipTo("end", "Agent");
        }
        std::size_t after = pos_;
        std::size_t index = 0;
        for (std::size_t body : bodies) {
            pos_ = body;
            std::size_t self = index == 0 ? kEnvironment : index - 1;
            readTemplate(index == 0 ? is_.environment : is_.agents[index - 1], self);
            ++index;
        }
        pos_ = after;
        readEvaluation();
        readInit();
        readGroups();
        readFormulae();
        std::size_t maxName = 0;
        for (const auto& t : allTemplates()) {
            for (const auto& v : t->vars) {
                for (int n : v.names) {
                    maxName = std::max<std::size_t>(maxName, n + 1);
                }
            }
        }
        for (std::size_t i = 0; i < maxName; ++i) {
            is_.stateNames.push_back("qs" + std::to_string(i + 1));
        }
        return std::move(is_);
    }

  private:
    const std::string& peek(std::size_t ahead = 0) const {
        static const std::string eof;
        return pos_ + ahead < tokens_.size() ? tokens_[pos_ + ahead].text : eof;
    }
    std::string next() {
        if (pos_ >= tokens_.size()) {
            throw ParseError("unexpected end of input");
        }
        return tokens_[pos_++].text;
    }
    [[noreturn]] void fail(const std::string& what) const {
        std::size_t line = pos_ < tokens_.size() ? tokens_[pos_].line : 0;
        throw ParseError("line " + std::to_string(line) + ": expected " + what + ", found '" + peek() + "'");
    }
    void expect(const std::string& t) {
        if (peek() != t) {
            fail("'" + t + "'");
        }
        ++pos_;
    }
    bool accept(const std::string& t) {
        if (peek() == t) {
            ++pos_;
            return true;
        }
        return false;
    }
    void skipTo(const std::string& a, const std::string& b) {
        while (pos_ + 1 < tokens_.size() && !(peek() == a && peek(1) == b)) {
            ++pos_;
        }
        expect(a);
        expect(b);
    }
    std::vector<Template*> allTemplates() {
        std::vector<Template*> out{&is_.environment};
        for (auto& a : is_.agents) {
            out.push_back(&a);
        }
        return out;
    }

    std::size_t ownerIndex(const std::string& name) const {
        if (name == is_.environment.name) {
            return kEnvironment;
        }
        for (std::size_t i = 0; i < is_.agents.size(); ++i) {
            if (is_.agents[i].name == name) {
                return i;
            }
        }
        throw ParseError("unknown agent " + name);
    }

    int value(const is::Var& v, const std::string& lit) const {
        if (lit == "undef") {
            return is::kUndef;
        }
        switch (v.kind) {
            case is::VarKind::Bit:
            case is::VarKind::BitOrUndef:
                if (lit == "b0" || lit == "b1") {
                    return lit == "b1" ? 1 : 0;
                }
                break;
            case is::VarKind::Name:
                if (lit.size() > 2 && lit.compare(0, 2, "qs") == 0) {
                    return std::stoi(lit.substr(2)) - 1;
                }
                break;
            case is::VarKind::Int: return std::stoi(lit);
        }
        throw ParseError("bad value " + lit + " for " + v.name);
    }

    std::size_t varOf(const Template& t, const std::string& name) const {
        auto v = t.varIndex(name);
        if (!v) {
            throw ParseError("unknown variable " + t.name + "." + name);
        }
        return *v;
    }

    std::vector<std::string> idList() {
        std::vector<std::string> out;
        expect("{");
        if (!accept("}")) {
            do {
                out.push_back(next());
            } while (accept(","));
            expect("}");
        }
        return out;
    }

    void readTemplate(Template& t, std::size_t self) {
        expect("Vars");
        expect(":");
        while (!(peek() == "end" && peek(1) == "Vars")) {
            is::Var v;
            v.name = next();
            expect(":");
            if (peek() == "{") {
                auto lits = idList();
                std::vector<std::string> bits{"b0", "b1"};
                std::vector<std::string> bitsUndef{"b0", "b1", "undef"};
                if (lits == bits) {
                    v.kind = is::VarKind::Bit;
                } else if (lits == bitsUndef) {
                    v.kind = is::VarKind::BitOrUndef;
                } else {
                    v.kind = is::VarKind::Name;
                    for (const auto& l : lits) {
                        if (l != "undef") {
                            v.names.push_back(value(v, l));
                        }
                    }
                }
            } else {
                v.kind = is::VarKind::Int;
                v.lo = std::stoi(next());
                expect("..");
                v.hi = std::stoi(next());
            }
            expect(";");
            t.vars.push_back(std::move(v));
        }
        expect("end");
        expect("Vars");
        expect("Actions");
        expect("=");
        t.actions = idList();
        expect(";");
        expect("Protocol");
        expect(":");
        while (!(peek() == "end" && peek(1) == "Protocol")) {
            if (accept("Other")) {
                expect(":");
                t.otherwise = idList();
                expect(";");
                continue;
            }
            is::ProtocolLine line;
            line.guard = tests(t);
            expect(":");
            line.actions = idList();
            expect(";");
            t.protocol.push_back(std::move(line));
        }
        expect("end");
        expect("Protocol");
        expect("Evolution");
        expect(":");
        while (!(peek() == "end" && peek(1) == "Evolution")) {
            t.evolution.push_back(evolutionLine(t, self));
        }
        expect("end");
        expect("Evolution");
        expect("end");
        expect("Agent");
    }

    is::Test test(const Template& t) {
        std::size_t var = varOf(t, next());
        expect("=");
        return {var, value(t.vars[var], next())};
    }

    is::Conjunction tests(const Template& t) {
        is::Conjunction out{test(t)};
        while (accept("and")) {
            out.push_back(test(t));
        }
        return out;
    }

    /// `Action` or `Owner.Action`; returns the owner index.
    std::size_t actionRef(std::size_t self) {
        if (accept("Action")) {
            return self;
        }
        std::size_t owner = ownerIndex(next());
        expect(".");
        expect("Action");
        return owner;
    }

    is::EvolutionLine evolutionLine(const Template& t, std::size_t self) {
        is::EvolutionLine line;
        do {
            std::size_t var = varOf(t, next());
            expect("=");
            if (peek() == t.vars[var].name && peek(1) == "+") {
                next();
                next();
                line.assign.push_back({var, is::AssignOp::Increment, std::stoi(next())});
            } else {
                line.assign.push_back({var, is::AssignOp::Set, value(t.vars[var], next())});
            }
        } while (accept("and"));
        expect("if");
        do {
            if (accept("(")) {
                is::ActionCond c;
                do {
                    c.owner = actionRef(self);
                    expect("=");
                    c.allowed.push_back(next());
                } while (accept("or"));
                expect(")");
                line.actions.push_back(std::move(c));
            } else if (peek() == "Action" || peek(1) == ".") {
                is::ActionCond c;
                c.owner = actionRef(self);
                expect("=");
                c.allowed.push_back(next());
                if (c.owner != kEnvironment && c.allowed == std::vector<std::string>{"wait"}) {
                    line.othersWait = true;
                } else {
                    line.actions.push_back(std::move(c));
                }
            } else {
                line.guard.push_back(test(t));
            }
        } while (accept("and"));
        expect(";");
        return line;
    }

    is::GlobalTest globalTest() {
        std::size_t owner = ownerIndex(next());
        expect(".");
        const Template& t = is_.owner(owner);
        std::size_t var = varOf(t, next());
        expect("=");
        return {owner, var, value(t.vars[var], next())};
    }

    bool acceptFalse() {
        if (peek() == is_.environment.name && peek(1) == "." && peek(2) == "gc" && peek(3) == "<") {
            pos_ += 5;
            return true;
        }
        return false;
    }

    std::vector<std::vector<is::GlobalTest>> dnf() {
        std::vector<std::vector<is::GlobalTest>> out;
        if (acceptFalse()) {
            return out;
        }
        do {
            expect("(");
            std::vector<is::GlobalTest> conj{globalTest()};
            while (accept("and")) {
                conj.push_back(globalTest());
            }
            expect(")");
            out.push_back(std::move(conj));
        } while (accept("or"));
        return out;
    }

    void readEvaluation() {
        expect("Evaluation");
        while (!(peek() == "end" && peek(1) == "Evaluation")) {
            std::string name = next();
            expect("if");
            if (name == kAlways) {
                pos_ += 5;
                expect(";");
                continue;
            }
            is::Prop p{name, logic::NamedProp{name}, dnf()};
            expect(";");
            is_.props.push_back(std::move(p));
        }
        expect("end");
        expect("Evaluation");
    }

    void readInit() {
        expect("InitStates");
        for (const auto& conj : dnf()) {
            is::GlobalState s;
            s.env.assign(is_.environment.vars.size(), is::kUndef);
            for (const auto& a : is_.agents) {
                s.agents.emplace_back(a.vars.size(), is::kUndef);
            }
            for (const auto& t : conj) {
                (t.owner == kEnvironment ? s.env : s.agents[t.owner])[t.var] = t.value;
            }
            is_.initial.push_back(std::move(s));
        }
        expect(";");
        expect("end");
        expect("InitStates");
    }

    void readGroups() {
        expect("Groups");
        while (!(peek() == "end" && peek(1) == "Groups")) {
            is::Group g;
            g.name = next();
            expect("=");
            for (const auto& m : idList()) {
                g.members.push_back(ownerIndex(m));
            }
            expect(";");
            is_.groups.push_back(std::move(g));
        }
        expect("end");
        expect("Groups");
    }

    void readFormulae() {
        expect("Formulae");
        while (!(peek() == "end" && peek(1) == "Formulae")) {
            is_.formulas.push_back(implies());
            expect(";");
        }
        expect("end");
        expect("Formulae");
    }

    logic::FormulaPtr implies() {
        auto lhs = disjunction();
        if (accept("->")) {
            return logic::makeBinary(Op::Implies, lhs, implies());
        }
        return lhs;
    }
    logic::FormulaPtr disjunction() {
        auto lhs = conj();
        while (accept("or")) {
            lhs = logic::makeBinary(Op::Or, lhs, conj());
        }
        return lhs;
    }
    logic::FormulaPtr conj() {
        auto lhs = unary();
        while (accept("and")) {
            lhs = logic::makeBinary(Op::And, lhs, unary());
        }
        return lhs;
    }
    logic::FormulaPtr unary() {
        static const std::vector<std::pair<std::string, Op>> temporal{
            {"EX", Op::EX}, {"EF", Op::EF}, {"EG", Op::EG}, {"AX", Op::AX}, {"AF", Op::AF}, {"AG", Op::AG}};
        static const std::vector<std::pair<std::string, Op>> epistemic{
            {"K", Op::K}, {"GK", Op::GK}, {"GCK", Op::CK}, {"DK", Op::DK}};
        if (accept("!")) {
            return logic::makeUnary(Op::Not, unary());
        }
        for (const auto& [kw, op] : temporal) {
            if (accept(kw)) {
                return logic::makeUnary(op, unary());
            }
        }
        for (const auto& [kw, op] : epistemic) {
            if (peek() == kw && peek(1) == "(") {
                pos_ += 2;
                std::string who = next();
                expect(",");
                auto body = implies();
                expect(")");
                return logic::makeEpistemic(op, who, body);
            }
        }
        if ((peek() == "E" || peek() == "A") && peek(1) == "(") {
            Op op = next() == "E" ? Op::EU : Op::AU;
            next();
            auto lhs = implies();
            expect("U");
            auto rhs = implies();
            expect(")");
            return logic::makeBinary(op, lhs, rhs);
        }
        if (accept("(")) {
            auto f = implies();
            expect(")");
            return f;
        }
        std::string name = next();
        if (name == kAlways) {
            return logic::makeTrue();
        }
        return logic::makeAtom(logic::NamedProp{name});
    }

    std::vector<Token> tokens_;
    std::size_t pos_ = 0;
    InterpretedSystem is_;
};

std::vector<is::EvolutionLine> normalized(const InterpretedSystem& is, std::vector<is::EvolutionLine> lines) {
    for (auto& l : lines) {
        std::vector<bool> named(is.agents.size(), false);
        for (const auto& c : l.actions) {
            if (c.owner != kEnvironment) {
                named[c.owner] = true;
            }
        }
        l.othersWait = l.othersWait && std::find(named.begin(), named.end(), false) != named.end();
    }
    return lines;
}

bool sameTemplate(const InterpretedSystem& a, const InterpretedSystem& b, const Template& x, const Template& y) {
    return x.name == y.name && x.vars == y.vars && x.actions == y.actions && x.protocol == y.protocol &&
           x.otherwise == y.otherwise && normalized(a, x.evolution) == normalized(b, y.evolution);
}

}  // namespace

InterpretedSystem parse(const std::string& text) { return Reader(text).run(); }

bool structurallyEqual(const InterpretedSystem& a, const InterpretedSystem& b) {
    if (a.name != b.name || a.agents.size() != b.agents.size() || a.initial != b.initial || a.groups != b.groups ||
        a.props.size() != b.props.size() || a.formulas.size() != b.formulas.size()) {
        return false;
    }
    if (!sameTemplate(a, b, a.environment, b.environment)) {
        return false;
    }
    for (std::size_t i = 0; i < a.agents.size(); ++i) {
        if (!sameTemplate(a, b, a.agents[i], b.agents[i])) {
            return false;
        }
    }
    for (std::size_t i = 0; i < a.props.size(); ++i) {
        if (a.props[i].name != b.props[i].name || a.props[i].dnf != b.props[i].dnf) {
            return false;
        }
    }
    for (std::size_t i = 0; i < a.formulas.size(); ++i) {
        if (formulaText(*a.formulas[i]) != formulaText(*b.formulas[i])) {
            return false;
        }
    }
    return true;
}

}  // namespace dmcv::ispl
