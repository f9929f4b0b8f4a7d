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

#ifndef DMCV_QUANTUM_HPP
#define DMCV_QUANTUM_HPP

#include <complex>
#include <cstddef>
#include <iosfwd>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace dmcv::quantum {

using Amplitude = std::complex<double>;

/// Tolerance on the squared-norm sum of a declared or computed state.
inline constexpr double kNormTolerance = 1e-9;
/// Two canonical vectors intern to the same name within this max-norm distance.
inline constexpr double kInternTolerance = 1e-6;
/// Singular values at or below this are treated as zero when testing separability.
inline constexpr double kSchmidtTolerance = 1e-7;
/// Measurement outcomes with probability below this are impossible.
inline constexpr double kZeroProbability = 1e-9;
/// Amplitudes at or below this magnitude are skipped when fixing the global phase.
inline constexpr double kSignificantAmplitude = 1e-9;

class QuantumError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

class OverlapError : public QuantumError {
  public:
    using QuantumError::QuantumError;
};

class UnknownQubitError : public QuantumError {
  public:
    using QuantumError::QuantumError;
};

class NormalizationError : public QuantumError {
  public:
    using QuantumError::QuantumError;
};

enum class Pauli { X, Z };

/// Pure state of an ordered list of named qubits. The first qubit is the most
/// significant bit of the amplitude index. Instances built through `make` are
/// normalized and carry the canonical global phase: the first amplitude with
/// magnitude above kSignificantAmplitude is real and positive.
struct PureStateVector {
    std::vector<std::string> qubits;
    std::vector<Amplitude> amplitudes{Amplitude{1.0, 0.0}};

    /// Validates dimension and norm, then canonicalizes the phase.
    static PureStateVector make(std::vector<std::string> qubits, std::vector<Amplitude> amplitudes);

    /// The 0-qubit state [1].
    static PureStateVector empty() { return {}; }

    std::size_t qubitCount() const { return qubits.size(); }
    /// Position of `qubit` in `qubits`, or nullopt.
    std::optional<std::size_t> position(const std::string& qubit) const;
    double squaredNorm() const;
};

/// Multiplies by the unit scalar that makes the first significant amplitude
/// real and positive. No-op on the zero vector.
void canonicalizePhase(std::vector<Amplitude>& amplitudes);

/// Largest |a_k - b_k|; infinity when dimensions differ.
double maxNormDistance(std::span<const Amplitude> a, std::span<const Amplitude> b);

/// Kronecker product over the concatenated qubit order.
PureStateVector tensor(const PureStateVector& a, const PureStateVector& b);

/// Reorders the tensor factors so that qubits appear in `order` (a permutation
/// of a.qubits).
PureStateVector permute(const PureStateVector& a, const std::vector<std::string>& order);

/// Controlled-Z between `q` and `r`.
PureStateVector applyEntangle(const PureStateVector& state, const std::string& q, const std::string& r);

PureStateVector applyCorrection(const PureStateVector& state, const std::string& q, Pauli kind);

struct MeasurementOutcome {
    int outcomeBit = 0;
    double probability = 0.0;
    PureStateVector collapsedQubitState;
    /// Renormalized state of the other qubits. Absent for single-qubit inputs
    /// and for outcomes with probability below kZeroProbability.
    std::optional<PureStateVector> residual;
};

/// |+_a> = (|0> + e^{ia}|1>)/sqrt2 and |-_a> = (|0> - e^{ia}|1>)/sqrt2.
PureStateVector basisState(const std::string& qubit, double angle, int outcomeBit);

/// Measures `q` in the {|+_a>, |-_a>} basis. first is outcome 0, second outcome 1.
std::pair<MeasurementOutcome, MeasurementOutcome> measure(const PureStateVector& state, const std::string& q,
                                                          double angle);

/// (-1)^s * alpha + t * pi reduced to [0, 2pi). Missing dependencies count as 0.
double effectiveAngle(double alpha, std::optional<int> sValue, std::optional<int> tValue);

struct FactoredQuantumState {
    std::vector<PureStateVector> factors;
};

/// Splits a state into its minimal tensor factors. Each factor keeps the
/// relative qubit order of the input; factors are ordered by their first qubit.
FactoredQuantumState factorize(const PureStateVector& state);

/// Number of singular values above kSchmidtTolerance across the cut
/// `subset | rest`, with `subset` given as qubit positions.
std::size_t schmidtRank(const PureStateVector& state, const std::vector<std::size_t>& subset);

/// Interns canonical vectors to names qs1, qs2, ... in first-encounter order.
class StateRegistry {
  public:
    struct Entry {
        std::string name;
        std::size_t qubitCount = 0;
        std::vector<Amplitude> amplitudes;
    };

    explicit StateRegistry(std::string prefix = "qs") : prefix_(std::move(prefix)) {}

    /// Index of the matching entry, allocating a new one when none matches.
    std::size_t internIndex(const PureStateVector& state);
    std::string intern(const PureStateVector& state) { return entries_[internIndex(state)].name; }

    std::optional<std::size_t> find(std::span<const Amplitude> amplitudes) const;
    std::optional<std::string> lookup(const PureStateVector& state) const;

    const std::vector<Entry>& entries() const { return entries_; }
    const Entry& entry(std::size_t index) const { return entries_.at(index); }
    std::size_t size() const { return entries_.size(); }

    /// `name,qubits,amplitudes` rows, amplitudes as `re+imi` with 9 significant digits.
    void writeCsv(std::ostream& out) const;

  private:
    std::string prefix_;
    std::vector<Entry> entries_;
};

/// `re+imi` with the given number of significant digits.
std::string formatAmplitude(Amplitude value, int significantDigits = 9);

}  // namespace dmcv::quantum

#endif  // DMCV_QUANTUM_HPP
