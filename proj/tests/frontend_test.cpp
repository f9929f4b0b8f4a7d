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

#include <gtest/gtest.h>

#include <algorithm>
#include <random>
#include <set>

#include "dmcv/network.hpp"
#include "testkit.hpp"

using namespace dmcv::dmc;

namespace {

std::vector<std::string> messages(const std::string& source) {
    std::vector<std::string> out;
    for (const auto& e : collectErrors(expandMacros(parse(source)))) {
        out.push_back(e.message);
    }
    return out;
}

bool mentions(const std::vector<std::string>& msgs, const std::string& needle) {
    return std::any_of(msgs.begin(), msgs.end(), [&](const auto& m) { return m.find(needle) != std::string::npos; });
}

std::string replace(std::string s, const std::string& from, const std::string& to) {
    auto pos = s.find(from);
    EXPECT_NE(pos, std::string::npos) << from;
    return s.replace(pos, from.size(), to);
}

}  // namespace

TEST(Parse, TeleportationShape) {
    auto spec = parse(testkit::readProtocol("qtp.dmc"));
    EXPECT_EQ(spec.name, "QTP");
    EXPECT_EQ(spec.agents.size(), 2U);
    std::size_t qubits = 0;
    for (const auto& q : spec.qubits) {
        qubits += q.qubits.size();
    }
    EXPECT_EQ(qubits, 3U);
    EXPECT_EQ(spec.formulas.size(), 4U);
    EXPECT_GT(spec.agents[0].events[0].loc.line, 0);
}

TEST(Parse, EmptyInputNeedsHeader) {
    try {
        parse("");
        FAIL() << "expected a syntax error";
    } catch (const SyntaxError& e) {
        EXPECT_EQ(e.location().line, 1);
        EXPECT_NE(std::find(e.expected().begin(), e.expected().end(), "'network'"), e.expected().end());
    }
}

TEST(Parse, CommentsAreStripped) {
    std::string src = "/* head */ network N { // x\n qubits { q = [1, 0]; } agent A owns q { /* e */ } }";
    EXPECT_EQ(parse(src).name, "N");
}

TEST(Parse, ComplexAmplitudesAndAngles) {
    auto spec = parse(
        "network N { qubits { q = [(0.6, 0), (0, 0.8)]; } agent A owns q { s = M(q, pi/2); t = M(q, 0.25); } }");
    EXPECT_EQ(spec.qubits[0].amplitudes[1], std::complex<double>(0, 0.8));
    const auto& m = std::get<Measure>(spec.agents[0].events[0].body);
    EXPECT_EQ(m.angle.symbol, "pi/2");
    EXPECT_NEAR(std::get<Measure>(spec.agents[0].events[1].body).angle.radians, 0.25, 1e-15);
}

TEST(Parse, BadTokenReportsPosition) {
    try {
        parse("network N {\n  qubits { q = [1, 0] }\n}");
        FAIL();
    } catch (const SyntaxError& e) {
        EXPECT_EQ(e.location().line, 2);
    }
}

TEST(Validate, BundledProtocolsAreValid) {
    for (const char* p : {"qtp.dmc", "qkd.dmc", "sdc.dmc"}) {
        EXPECT_NO_THROW(validate(parse(testkit::readProtocol(p)))) << p;
    }
}

TEST(Validate, UndeclaredQubit) {
    auto src = replace(testkit::readProtocol("qtp.dmc"), "E(q1, q2)", "E(q1, q9)");
    EXPECT_TRUE(mentions(messages(src), "undeclared qubit q9"));
    EXPECT_THROW(validate(parse(src)), ValidationError);
}

TEST(Validate, OwnershipFlow) {
    std::string src =
        "network N { qubits { q1 = [1, 0]; q2 = [1, 0]; }\n"
        "  agent Alice owns q1, q2 { E(q1, q2); qsend Bob q2; s = M(q2, 0); }\n"
        "  agent Bob { qreceive Alice q2; } }";
    EXPECT_TRUE(mentions(messages(src), "qubit q2 not owned at event 3"));
}

TEST(Validate, UnpairedReceive) {
    std::string src =
        "network N { qubits { q = [1, 0]; }\n"
        "  agent Alice owns q { }\n"
        "  agent Bob { receive Alice classical(x1); } }";
    EXPECT_TRUE(mentions(messages(src), "unpaired receive"));
}

TEST(Validate, CollectsEveryError) {
    std::string src =
        "network N { qubits { q = [1, 0]; }\n"
        "  agent Alice owns q { X(q) if s; E(q, r); }\n"
        "  agent Bob { receive Alice classical(x1); } }";
    auto msgs = messages(src);
    EXPECT_GE(msgs.size(), 3U);
    EXPECT_TRUE(mentions(msgs, "used before definition"));
    EXPECT_TRUE(mentions(msgs, "undeclared qubit r"));
    EXPECT_TRUE(mentions(msgs, "unpaired receive"));
}

TEST(Validate, NamesMustNotClash) {
    auto src = replace(testkit::readProtocol("qtp.dmc"), "s1 = M(q1, 0)", "q3 = M(q1, 0)");
    EXPECT_TRUE(mentions(messages(src), "variable q3 of Alice clashes"));
    auto pc = replace(testkit::readProtocol("qtp.dmc"), "receive Alice classical(x1, x2)",
                      "receive Alice classical(pc, x2)");
    EXPECT_TRUE(mentions(messages(pc), "variable pc of Bob clashes"));
}

TEST(Validate, SignalsAssignedOnce) {
    auto src = replace(testkit::readProtocol("qtp.dmc"), "s2 = M(q2, 0)", "s1 = M(q2, 0)");
    EXPECT_TRUE(mentions(messages(src), "variable s1 of Alice assigned twice"));
}

TEST(Validate, GroupsNameAgents) {
    std::string src =
        "network N { qubits { q = [1, 0]; } agent A owns q { } groups { G = {A, Z}; } }";
    EXPECT_TRUE(mentions(messages(src), "group G names unknown agent Z"));
}

TEST(Validate, ErrorsIndependentOfAgentOrder) {
    std::string a =
        "  agent Alice owns q1 { X(q1) if s; send Bob classical(t); E(q1, q7); }\n";
    std::string b = "  agent Bob owns q2 { receive Alice classical(x, y); qsend Alice q1; }\n";
    std::string head = "network N { qubits { q1 = [1, 0]; q2 = [0, 1]; }\n";
    auto first = messages(head + a + b + "}");
    auto second = messages(head + b + a + "}");
    std::sort(first.begin(), first.end());
    std::sort(second.begin(), second.end());
    EXPECT_FALSE(first.empty());
    EXPECT_EQ(first, second);
}

TEST(Validate, NormalizationIsChecked) {
    EXPECT_TRUE(mentions(messages("network N { qubits { q = [0.6, 0.6]; } agent A owns q { } }"), "not normalized"));
}

TEST(Macros, OneStepSubstitution) {
    auto spec = parse(
        "network N { qubits { q1, q2 = [1, 0, 0, 0]; } agent A owns q1, q2 { bell(q1, q2); }\n"
        "  macros { bell(a, b) = [E(a, b);]; } }");
    auto out = expandMacros(spec);
    ASSERT_EQ(out.agents[0].events.size(), 1U);
    EXPECT_EQ(std::get<Entangle>(out.agents[0].events[0].body), (Entangle{"q1", "q2"}));
    EXPECT_TRUE(out.macros.empty());
}

TEST(Macros, NoMacrosIsIdentity) {
    auto spec = parse(testkit::readProtocol("qtp.dmc"));
    EXPECT_TRUE(structurallyEqual(expandMacros(spec), spec));
}

TEST(Macros, RecursionAndArity) {
    auto rec = parse("network N { qubits { q = [1, 0]; } agent A owns q { m(); } macros { m() = [m();]; } }");
    EXPECT_THROW(expandMacros(rec), RecursionError);
    auto mutual = parse(
        "network N { qubits { q = [1, 0]; } agent A owns q { m(); } macros { m() = [n();]; n() = [m();]; } }");
    EXPECT_THROW(expandMacros(mutual), RecursionError);
    auto arity = parse(
        "network N { qubits { q = [1, 0]; } agent A owns q { m(q, q); } macros { m(a) = [X(a);]; } }");
    EXPECT_THROW(expandMacros(arity), ArityError);
}

TEST(Print, RoundTripBundled) {
    for (const char* p : {"qtp.dmc", "qkd.dmc", "sdc.dmc"}) {
        auto spec = parse(testkit::readProtocol(p));
        auto again = parse(print(spec));
        EXPECT_TRUE(structurallyEqual(spec, again)) << p;
        EXPECT_EQ(print(again), print(spec));
    }
}

TEST(Print, RoundTripRandomNetworks) {
    std::mt19937_64 rng(29);
    for (int i = 0; i < 100; ++i) {
        auto net = testkit::randomNetwork(rng, i);
        auto spec = parse(net.source);
        EXPECT_TRUE(structurallyEqual(spec, parse(print(spec)))) << net.source;
    }
}

TEST(Print, RoundTripWithMacrosAndGroups) {
    auto spec = parse(
        "network N { qubits { q1, q2 = [0.5, 0.5, 0.5, -0.5]; }\n"
        "  agent A (inputs: y = 1) owns q1, q2 knows q1 { fix(q1); s = M(q2, pi/4, s = y, t = y); }\n"
        "  groups { G = {A}; }\n"
        "  formulae { CK(G, A.s == 1) -> A[has(A, q1) U q1 == ket[1, 0]]; }\n"
        "  macros { fix(a) = [X(a); Z(a);]; } }");
    EXPECT_TRUE(structurallyEqual(spec, parse(print(spec))));
}

TEST(Flow, OwnershipFollowsTransfers) {
    std::mt19937_64 rng(31);
    for (int i = 0; i < 100; ++i) {
        auto net = validate(parse(testkit::randomNetwork(rng, i).source));
        // Replay each agent: a qubit is used only while held, sends drop it and
        // receives add it.
        for (const auto& a : net.agents) {
            QubitSet held = a.owned;
            for (const auto& e : a.events) {
                std::visit(
                    [&](const auto& body) {
                        using T = std::decay_t<decltype(body)>;
                        if constexpr (std::is_same_v<T, step::Entangle>) {
                            EXPECT_TRUE(held & qubitBit(body.q));
                            EXPECT_TRUE(held & qubitBit(body.r));
                        } else if constexpr (std::is_same_v<T, step::Measure> ||
                                             std::is_same_v<T, step::Correction>) {
                            EXPECT_TRUE(held & qubitBit(body.qubit));
                        } else if constexpr (std::is_same_v<T, step::SendQubit>) {
                            EXPECT_TRUE(held & qubitBit(body.qubit));
                            held &= ~qubitBit(body.qubit);
                        } else if constexpr (std::is_same_v<T, step::RecvQubit>) {
                            EXPECT_FALSE(held & qubitBit(body.qubit));
                            held |= qubitBit(body.qubit);
                        }
                    },
                    e.body);
            }
        }
    }
}
