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

#include "dmcv/model_checker.hpp"
#include "dmcv/pipeline.hpp"
#include "testkit.hpp"

using namespace dmcv;
using logic::Op;

namespace {

logic::FormulaPtr p() { return logic::makeAtom(logic::NamedProp{"p"}); }
logic::FormulaPtr q() { return logic::makeAtom(logic::NamedProp{"q"}); }
logic::FormulaPtr neg(logic::FormulaPtr f) { return logic::makeUnary(Op::Not, std::move(f)); }

mc::StateGraph twoStates() {
    mc::StateGraph g;
    g.successors = {{1}, {1}};
    g.initial = {0};
    g.agents = {"a"};
    g.localClass = {{0, 0}};
    g.groups["G"] = {0};
    g.labels["p"] = {false, true};
    g.labels["q"] = {true, false};
    return g;
}

mc::StateSet complement(const mc::StateSet& s) {
    mc::StateSet out(s.size());
    for (std::size_t i = 0; i < s.size(); ++i) {
        out[i] = !s[i];
    }
    return out;
}

}  // namespace

TEST(Operators, NextOnTwoStates) {
    auto g = twoStates();
    mc::Checker c(g);
    EXPECT_EQ(c.sat(*logic::makeUnary(Op::EX, p())), (mc::StateSet{true, true}));
    EXPECT_EQ(c.sat(*logic::makeUnary(Op::EX, q())), (mc::StateSet{false, false}));
    EXPECT_EQ(c.sat(*logic::makeUnary(Op::EG, p())), (mc::StateSet{false, true}));
    EXPECT_EQ(c.sat(*logic::makeBinary(Op::EU, q(), p())), (mc::StateSet{true, true}));
    EXPECT_EQ(c.sat(*logic::makeEpistemic(Op::K, "a", p())), (mc::StateSet{false, false}));
    EXPECT_TRUE(c.check(logic::makeUnary(Op::AF, p())).verdict);
}

TEST(Operators, UnknownNamesThrow) {
    auto g = twoStates();
    mc::Checker c(g);
    EXPECT_THROW(c.sat(*logic::makeEpistemic(Op::K, "zed", p())), mc::UnknownName);
    EXPECT_THROW(c.sat(*logic::makeEpistemic(Op::CK, "H", p())), mc::UnknownName);
    EXPECT_THROW(c.sat(*logic::makeAtom(logic::NamedProp{"r"})), mc::UnknownName);
}

TEST(Operators, AgreeWithBruteForceOnRandomGraphs) {
    std::mt19937_64 rng(5);
    for (int i = 0; i < 200; ++i) {
        auto g = testkit::randomGraph(rng, 1 + rng() % 40);
        mc::Checker c(g);
        for (int k = 0; k < 8; ++k) {
            auto f = testkit::randomFormula(rng, 3, g.agents);
            ASSERT_EQ(c.sat(*f), testkit::bruteForce(g, *f)) << logic::toString(*f);
        }
    }
}

TEST(Operators, Dualities) {
    std::mt19937_64 rng(6);
    for (int i = 0; i < 100; ++i) {
        auto g = testkit::randomGraph(rng, 1 + rng() % 30);
        mc::Checker c(g);
        auto f = testkit::randomFormula(rng, 2, g.agents);
        auto nf = neg(f);
        EXPECT_EQ(c.sat(*logic::makeUnary(Op::AX, f)), complement(c.sat(*logic::makeUnary(Op::EX, nf))));
        EXPECT_EQ(c.sat(*logic::makeUnary(Op::AG, f)), complement(c.sat(*logic::makeUnary(Op::EF, nf))));
        EXPECT_EQ(c.sat(*logic::makeUnary(Op::AF, f)), complement(c.sat(*logic::makeUnary(Op::EG, nf))));
        EXPECT_EQ(c.sat(*logic::makeUnary(Op::EF, f)), c.sat(*logic::makeBinary(Op::EU, logic::makeTrue(), f)));
        EXPECT_EQ(c.sat(*logic::makeUnary(Op::AF, f)), c.sat(*logic::makeBinary(Op::AU, logic::makeTrue(), f)));
    }
}

TEST(Epistemic, S5AndInclusionChain) {
    std::mt19937_64 rng(7);
    for (int i = 0; i < 100; ++i) {
        auto g = testkit::randomGraph(rng, 1 + rng() % 30);
        mc::Checker c(g);
        auto f = testkit::randomFormula(rng, 2, g.agents);
        const auto phi = c.sat(*f);
        for (const auto& a : g.agents) {
            auto k = logic::makeEpistemic(Op::K, a, f);
            const auto ks = c.sat(*k);
            EXPECT_TRUE(testkit::subset(ks, phi));
            EXPECT_EQ(c.sat(*logic::makeEpistemic(Op::K, a, k)), ks);
            EXPECT_TRUE(testkit::subset(complement(ks), c.sat(*logic::makeEpistemic(Op::K, a, neg(k)))));
        }
        const auto ck = c.sat(*logic::makeEpistemic(Op::CK, "G", f));
        const auto gk = c.sat(*logic::makeEpistemic(Op::GK, "G", f));
        const auto dk = c.sat(*logic::makeEpistemic(Op::DK, "G", f));
        EXPECT_TRUE(testkit::subset(ck, gk));
        EXPECT_TRUE(testkit::subset(dk, phi));
        for (const auto& a : g.agents) {
            const auto ks = c.sat(*logic::makeEpistemic(Op::K, a, f));
            EXPECT_TRUE(testkit::subset(gk, ks));
            EXPECT_TRUE(testkit::subset(ks, dk));
        }
        // Common knowledge is a fixed point of everybody-knows.
        EXPECT_EQ(c.sat(*logic::makeEpistemic(Op::GK, "G", logic::makeEpistemic(Op::CK, "G", f))), ck);
    }
}

TEST(Witness, PathsFollowEdges) {
    std::mt19937_64 rng(8);
    for (int i = 0; i < 60; ++i) {
        auto g = testkit::randomGraph(rng, 2 + rng() % 20);
        mc::Checker c(g);
        auto f = logic::makeUnary(Op::AG, p());
        auto r = c.check(f);
        if (r.verdict) {
            continue;
        }
        ASSERT_TRUE(r.witness);
        const auto& path = r.witness->path;
        ASSERT_FALSE(path.empty());
        EXPECT_NE(std::find(g.initial.begin(), g.initial.end(), path.front()), g.initial.end());
        for (std::size_t k = 1; k < path.size(); ++k) {
            const auto& s = g.successors[path[k - 1]];
            EXPECT_NE(std::find(s.begin(), s.end(), path[k]), s.end());
        }
        EXPECT_FALSE(g.labels.at("p")[path.back()]);
    }
}

namespace {

pipeline::Checked checkProtocol(const std::string& name, pipeline::Compiled& compiled) {
    pipeline::Options o;
    compiled = pipeline::compile(testkit::readProtocol(name), o);
    return pipeline::check(compiled, o);
}

}  // namespace

TEST(Protocols, TeleportationFormulas) {
    pipeline::Compiled c;
    auto k = checkProtocol("qtp.dmc", c);
    const auto& r = k.verification.results;
    ASSERT_EQ(r.size(), 4U);
    EXPECT_TRUE(r[0].verdict);
    EXPECT_TRUE(r[2].verdict);
    EXPECT_FALSE(r[3].verdict);
}

TEST(Protocols, TeleportationIndistinguishablePair) {
    pipeline::Compiled c;
    auto k = checkProtocol("qtp.dmc", c);
    const auto& r = k.verification.results[3];
    ASSERT_TRUE(r.witness && r.witness->pair);
    auto [s, t] = *r.witness->pair;
    EXPECT_NE(s, t);
    EXPECT_EQ(r.witness->relation, "Alice");
    const auto& states = k.reachable.states;
    EXPECT_EQ(states[s].agents[0], states[t].agents[0]);
    // Both sides already carry the input state on q3.
    const auto& env = c.assembly.system.environment;
    std::size_t q3 = *env.varIndex("q3");
    std::size_t init = *env.varIndex("init_q1");
    for (auto x : {s, t}) {
        EXPECT_NE(states[x].env[q3], is::kUndef);
        EXPECT_EQ(states[x].env[q3], states[x].env[init]);
    }
}

TEST(Protocols, KeyDistributionAndDenseCoding) {
    for (const char* name : {"qkd.dmc", "sdc.dmc"}) {
        pipeline::Compiled c;
        auto k = checkProtocol(name, c);
        EXPECT_TRUE(k.verification.allTrue()) << name;
        ASSERT_TRUE(k.crosscheck);
        EXPECT_TRUE(k.crosscheck->ok()) << name;
    }
}

TEST(Protocols, DenseCodingComponents) {
    pipeline::Compiled c;
    auto k = checkProtocol("sdc.dmc", c);
    const auto& g = k.stateGraph;
    ASSERT_EQ(g.initial.size(), 4U);
    // Four disjoint runs, one per input pair.
    std::vector<int> comp(g.size(), -1);
    for (std::size_t i = 0; i < g.initial.size(); ++i) {
        std::vector<std::size_t> stack{g.initial[i]};
        while (!stack.empty()) {
            auto s = stack.back();
            stack.pop_back();
            if (comp[s] >= 0) {
                EXPECT_EQ(comp[s], static_cast<int>(i));
                continue;
            }
            comp[s] = static_cast<int>(i);
            for (auto t : g.successors[s]) {
                stack.push_back(t);
            }
        }
    }
    // Bob's initial class spans all four.
    std::set<int> reached;
    for (std::size_t s = 0; s < g.size(); ++s) {
        if (g.localClass[1][s] == g.localClass[1][g.initial[0]]) {
            reached.insert(comp[s]);
        }
    }
    EXPECT_EQ(reached.size(), 4U);
}

TEST(Protocols, ConfigurationGraphMatchesSystemVerdicts) {
    for (const char* name : {"qtp.dmc", "qkd.dmc", "sdc.dmc"}) {
        pipeline::Compiled c;
        auto k = checkProtocol(name, c);
        auto viaGraph = mc::checkAll(mc::fromConfigGraph(c.net, c.graph), c.net.formulas);
        ASSERT_EQ(viaGraph.results.size(), k.verification.results.size());
        for (std::size_t i = 0; i < viaGraph.results.size(); ++i) {
            EXPECT_EQ(viaGraph.results[i].verdict, k.verification.results[i].verdict) << name << " " << i;
        }
    }
}
