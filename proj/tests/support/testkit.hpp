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

// Shared fixtures, generators and reference implementations for the tests
// and the acceptance runner.

#ifndef DMCV_TESTKIT_HPP
#define DMCV_TESTKIT_HPP

#include <complex>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "dmcv/model_checker.hpp"
#include "dmcv/quantum.hpp"

namespace testkit {

using Amp = std::complex<double>;
using Vec = std::vector<Amp>;

/// Contents of a bundled protocol file.
std::string readProtocol(const std::string& name);

// ---------------------------------------------------------------------------
// Quantum reference arithmetic on raw vectors, first qubit most significant.

Vec kron(const Vec& a, const Vec& b);
Vec applyCz(const Vec& v, int n, int q, int r);
Vec applyX(const Vec& v, int n, int q);
Vec applyZ(const Vec& v, int n, int q);
/// Probability of outcome `bit` when measuring qubit q at `angle`.
double measureProbability(const Vec& v, int n, int q, double angle, int bit);
/// Renormalized state of the other qubits after the outcome, or empty.
Vec residual(const Vec& v, int n, int q, double angle, int bit);
/// Operator rank of the reshaped amplitude matrix by Gaussian elimination.
int schmidtRank(const Vec& v, int n, const std::vector<int>& subset, double tol = 1e-7);
/// Max |a_k - c b_k| minimized over unit phases c.
double distanceUpToPhase(const Vec& a, const Vec& b);
double norm2(const Vec& v);
Vec canonical(Vec v);

Vec randomState(std::mt19937_64& rng, int n);
/// Random state that is a product of random blocks, to exercise factoring.
Vec randomProductState(std::mt19937_64& rng, int n);

// ---------------------------------------------------------------------------
// Random networks.

struct RandomNetwork {
    std::string source;
    int agents = 0;
    int qubits = 0;
    int events = 0;
};

/// Valid DMC source with at most 3 agents, 4 qubits and 8 events.
RandomNetwork randomNetwork(std::mt19937_64& rng, int index);

// ---------------------------------------------------------------------------
// Random Kripke structures and the brute-force labeler.

/// Graph with `n` states, every state with 1 to 3 successors, propositions
/// p and q, 2 or 3 agents with random local classes, group G of all agents
/// and group H of the first two.
dmcv::mc::StateGraph randomGraph(std::mt19937_64& rng, std::size_t n);

dmcv::logic::FormulaPtr randomFormula(std::mt19937_64& rng, int depth, const std::vector<std::string>& agents);

/// Labels by forward search from each state and explicit class scans.
dmcv::mc::StateSet bruteForce(const dmcv::mc::StateGraph& g, const dmcv::logic::Formula& f);

/// Every member of `a` is in `b`.
bool subset(const dmcv::mc::StateSet& a, const dmcv::mc::StateSet& b);

}  // namespace testkit

#endif  // DMCV_TESTKIT_HPP
