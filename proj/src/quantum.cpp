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

#include "dmcv/quantum.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <numbers>
#include <ostream>
#include <unordered_set>

namespace dmcv::quantum {

namespace {

std::size_t bitOf(std::size_t index, std::size_t position, std::size_t qubitCount) {
    return (index >> (qubitCount - 1 - position)) & 1U;
}

std::size_t requirePosition(const PureStateVector& state, const std::string& qubit) {
    auto pos = state.position(qubit);
    if (!pos) {
        throw UnknownQubitError("unknown qubit " + qubit);
    }
    return *pos;
}

// Gathers the amplitudes of `state` into a (2^|rows|) x (2^|cols|) matrix.
Eigen::MatrixXcd reshape(const PureStateVector& state, const std::vector<std::size_t>& rows,
                         const std::vector<std::size_t>& cols) {
    const std::size_t n = state.qubitCount();
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(Eigen::Index{1} << rows.size(), Eigen::Index{1} << cols.size());
    for (std::size_t k = 0; k < state.amplitudes.size(); ++k) {
        std::size_t r = 0;
        for (auto p : rows) {
            r = (r << 1U) | bitOf(k, p, n);
        }
        std::size_t c = 0;
        for (auto p : cols) {
            c = (c << 1U) | bitOf(k, p, n);
        }
        m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = state.amplitudes[k];
    }
    return m;
}

std::vector<std::size_t> complementOf(const std::vector<std::size_t>& subset, std::size_t n) {
    std::vector<std::size_t> rest;
    for (std::size_t p = 0; p < n; ++p) {
        if (std::find(subset.begin(), subset.end(), p) == subset.end()) {
            rest.push_back(p);
        }
    }
    return rest;
}

PureStateVector fromColumn(const PureStateVector& state, const std::vector<std::size_t>& positions,
                           const Eigen::VectorXcd& column) {
    PureStateVector out;
    out.qubits.clear();
    for (auto p : positions) {
        out.qubits.push_back(state.qubits[p]);
    }
    out.amplitudes.assign(column.data(), column.data() + column.size());
    double norm = 0.0;
    for (const auto& a : out.amplitudes) {
        norm += std::norm(a);
    }
    norm = std::sqrt(norm);
    for (auto& a : out.amplitudes) {
        a /= norm;
    }
    canonicalizePhase(out.amplitudes);
    return out;
}

// Advances `subset` (sorted, first element fixed at 0) to the next combination
// of the same size drawn from [1, n). Returns false when exhausted.
bool nextCombination(std::vector<std::size_t>& subset, std::size_t n) {
    const std::size_t k = subset.size();
    for (std::size_t i = k; i-- > 1;) {
        if (subset[i] < n - (k - i)) {
            ++subset[i];
            for (std::size_t j = i + 1; j < k; ++j) {
                subset[j] = subset[j - 1] + 1;
            }
            return true;
        }
    }
    return false;
}

}  // namespace

PureStateVector PureStateVector::make(std::vector<std::string> qubits, std::vector<Amplitude> amplitudes) {
    std::unordered_set<std::string> seen;
    for (const auto& q : qubits) {
        if (!seen.insert(q).second) {
            throw OverlapError("qubit " + q + " listed twice");
        }
    }
    if (qubits.size() >= 8 * sizeof(std::size_t) || amplitudes.size() != (std::size_t{1} << qubits.size())) {
        throw QuantumError("expected " + std::to_string(std::size_t{1} << std::min<std::size_t>(qubits.size(), 62)) +
                           " amplitudes, got " + std::to_string(amplitudes.size()));
    }
    PureStateVector s;
    s.qubits = std::move(qubits);
    s.amplitudes = std::move(amplitudes);
    if (std::abs(s.squaredNorm() - 1.0) > kNormTolerance) {
        throw NormalizationError("squared norm " + std::to_string(s.squaredNorm()) + " differs from 1");
    }
    canonicalizePhase(s.amplitudes);
    return s;
}

std::optional<std::size_t> PureStateVector::position(const std::string& qubit) const {
    auto it = std::find(qubits.begin(), qubits.end(), qubit);
    if (it == qubits.end()) {
        return std::nullopt;
    }
    return static_cast<std::size_t>(it - qubits.begin());
}

double PureStateVector::squaredNorm() const {
    double sum = 0.0;
    for (const auto& a : amplitudes) {
        sum += std::norm(a);
    }
    return sum;
}

void canonicalizePhase(std::vector<Amplitude>& amplitudes) {
    for (const auto& a : amplitudes) {
        if (std::abs(a) > kSignificantAmplitude) {
            const Amplitude phase = std::conj(a) / std::abs(a);
            for (auto& b : amplitudes) {
                b *= phase;
            }
            return;
        }
    }
}

double maxNormDistance(std::span<const Amplitude> a, std::span<const Amplitude> b) {
    if (a.size() != b.size()) {
        return std::numeric_limits<double>::infinity();
    }
    double worst = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) {
        worst = std::max(worst, std::abs(a[k] - b[k]));
    }
    return worst;
}

PureStateVector tensor(const PureStateVector& a, const PureStateVector& b) {
    for (const auto& q : b.qubits) {
        if (a.position(q)) {
            throw OverlapError("qubit " + q + " appears in both operands");
        }
    }
    PureStateVector out;
    out.qubits = a.qubits;
    out.qubits.insert(out.qubits.end(), b.qubits.begin(), b.qubits.end());
    out.amplitudes.clear();
    out.amplitudes.reserve(a.amplitudes.size() * b.amplitudes.size());
    for (const auto& x : a.amplitudes) {
        for (const auto& y : b.amplitudes) {
            out.amplitudes.push_back(x * y);
        }
    }
    canonicalizePhase(out.amplitudes);
    return out;
}

PureStateVector permute(const PureStateVector& a, const std::vector<std::string>& order) {
    const std::size_t n = a.qubitCount();
    if (order.size() != n) {
        throw QuantumError("permutation has wrong length");
    }
    std::vector<std::size_t> source(n);
    for (std::size_t i = 0; i < n; ++i) {
        source[i] = requirePosition(a, order[i]);
    }
    PureStateVector out;
    out.qubits = order;
    out.amplitudes.assign(a.amplitudes.size(), Amplitude{});
    for (std::size_t k = 0; k < a.amplitudes.size(); ++k) {
        std::size_t j = 0;
        for (std::size_t i = 0; i < n; ++i) {
            j = (j << 1U) | bitOf(k, source[i], n);
        }
        out.amplitudes[j] = a.amplitudes[k];
    }
    return out;
}

PureStateVector applyEntangle(const PureStateVector& state, const std::string& q, const std::string& r) {
    const std::size_t pq = requirePosition(state, q);
    const std::size_t pr = requirePosition(state, r);
    if (pq == pr) {
        throw QuantumError("entangling " + q + " with itself");
    }
    const std::size_t n = state.qubitCount();
    PureStateVector out = state;
    for (std::size_t k = 0; k < out.amplitudes.size(); ++k) {
        if (bitOf(k, pq, n) == 1 && bitOf(k, pr, n) == 1) {
            out.amplitudes[k] = -out.amplitudes[k];
        }
    }
    canonicalizePhase(out.amplitudes);
    return out;
}

PureStateVector applyCorrection(const PureStateVector& state, const std::string& q, Pauli kind) {
    const std::size_t p = requirePosition(state, q);
    const std::size_t n = state.qubitCount();
    const std::size_t mask = std::size_t{1} << (n - 1 - p);
    PureStateVector out = state;
    for (std::size_t k = 0; k < out.amplitudes.size(); ++k) {
        if (kind == Pauli::X) {
            out.amplitudes[k] = state.amplitudes[k ^ mask];
        } else if ((k & mask) != 0) {
            out.amplitudes[k] = -state.amplitudes[k];
        }
    }
    canonicalizePhase(out.amplitudes);
    return out;
}

PureStateVector basisState(const std::string& qubit, double angle, int outcomeBit) {
    const double sign = outcomeBit == 0 ? 1.0 : -1.0;
    PureStateVector out;
    out.qubits = {qubit};
    out.amplitudes = {Amplitude{(1.0 / std::numbers::sqrt2), 0.0}, sign * std::polar((1.0 / std::numbers::sqrt2), angle)};
    canonicalizePhase(out.amplitudes);
    return out;
}

std::pair<MeasurementOutcome, MeasurementOutcome> measure(const PureStateVector& state, const std::string& q,
                                                          double angle) {
    const std::size_t p = requirePosition(state, q);
    const std::size_t n = state.qubitCount();
    const std::vector<std::size_t> rest = complementOf({p}, n);
    const Eigen::MatrixXcd m = reshape(state, {p}, rest);
    const Amplitude phase = std::polar(1.0, -angle);

    auto outcome = [&](int bit) {
        MeasurementOutcome o;
        o.outcomeBit = bit;
        o.collapsedQubitState = basisState(q, angle, bit);
        // <±_a| = (<0| ± e^{-ia}<1|)/sqrt2 applied to the measured row.
        const double sign = bit == 0 ? 1.0 : -1.0;
        Eigen::VectorXcd projected = (m.row(0) + sign * phase * m.row(1)).transpose() * (1.0 / std::numbers::sqrt2);
        o.probability = projected.squaredNorm();
        if (n > 1 && o.probability >= kZeroProbability) {
            o.residual = fromColumn(state, rest, projected);
        }
        return o;
    };
    return {outcome(0), outcome(1)};
}

double effectiveAngle(double alpha, std::optional<int> sValue, std::optional<int> tValue) {
    double a = (sValue.value_or(0) % 2 != 0 ? -alpha : alpha) + (tValue.value_or(0) % 2 != 0 ? std::numbers::pi : 0.0);
    constexpr double twoPi = 2.0 * std::numbers::pi;
    a = std::fmod(a, twoPi);
    if (a < 0.0) {
        a += twoPi;
    }
    if (a >= twoPi) {
        a -= twoPi;
    }
    return a;
}

std::size_t schmidtRank(const PureStateVector& state, const std::vector<std::size_t>& subset) {
    const auto rest = complementOf(subset, state.qubitCount());
    if (subset.empty() || rest.empty()) {
        return 1;
    }
    const Eigen::MatrixXcd m = reshape(state, subset, rest);
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(m);
    std::size_t rank = 0;
    for (Eigen::Index i = 0; i < svd.singularValues().size(); ++i) {
        if (svd.singularValues()(i) > kSchmidtTolerance) {
            ++rank;
        }
    }
    return rank;
}

FactoredQuantumState factorize(const PureStateVector& state) {
    FactoredQuantumState result;
    PureStateVector remaining = state;
    while (remaining.qubitCount() > 0) {
        const std::size_t n = remaining.qubitCount();
        bool split = false;
        // The smallest subset containing the first qubit that splits off is irreducible.
        for (std::size_t k = 1; k < n && !split; ++k) {
            std::vector<std::size_t> subset(k);
            for (std::size_t i = 0; i < k; ++i) {
                subset[i] = i;
            }
            do {
                const auto rest = complementOf(subset, n);
                const Eigen::MatrixXcd m = reshape(remaining, subset, rest);
                Eigen::JacobiSVD<Eigen::MatrixXcd> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
                const auto& sv = svd.singularValues();
                if (sv.size() < 2 || sv(1) <= kSchmidtTolerance) {
                    result.factors.push_back(fromColumn(remaining, subset, svd.matrixU().col(0)));
                    remaining = fromColumn(remaining, rest, svd.matrixV().col(0).conjugate());
                    split = true;
                    break;
                }
            } while (nextCombination(subset, n));
        }
        if (!split) {
            canonicalizePhase(remaining.amplitudes);
            result.factors.push_back(std::move(remaining));
            break;
        }
    }
    return result;
}

std::size_t StateRegistry::internIndex(const PureStateVector& state) {
    if (auto found = find(state.amplitudes)) {
        return *found;
    }
    Entry e;
    e.name = prefix_ + std::to_string(entries_.size() + 1);
    e.qubitCount = state.qubitCount();
    e.amplitudes = state.amplitudes;
    canonicalizePhase(e.amplitudes);
    entries_.push_back(std::move(e));
    return entries_.size() - 1;
}

std::optional<std::size_t> StateRegistry::find(std::span<const Amplitude> amplitudes) const {
    std::vector<Amplitude> canonical(amplitudes.begin(), amplitudes.end());
    canonicalizePhase(canonical);
    for (std::size_t i = 0; i < entries_.size(); ++i) {
        if (maxNormDistance(entries_[i].amplitudes, canonical) <= kInternTolerance) {
            return i;
        }
    }
    return std::nullopt;
}

std::optional<std::string> StateRegistry::lookup(const PureStateVector& state) const {
    if (auto i = find(state.amplitudes)) {
        return entries_[*i].name;
    }
    return std::nullopt;
}

std::string formatAmplitude(Amplitude value, int significantDigits) {
    auto format = [&](double x) {
        if (std::abs(x) < 1e-15) {
            x = 0.0;
        }
        char buf[64];
        auto res = std::to_chars(buf, buf + sizeof(buf), x, std::chars_format::general, significantDigits);
        return std::string(buf, res.ptr);
    };
    std::string im = format(value.imag());
    if (im.front() != '-') {
        im.insert(im.begin(), '+');
    }
    return format(value.real()) + im + "i";
}

void StateRegistry::writeCsv(std::ostream& out) const {
    out << "name,qubits,amplitudes\n";
    for (const auto& e : entries_) {
        out << e.name << ',' << e.qubitCount << ',';
        for (std::size_t k = 0; k < e.amplitudes.size(); ++k) {
            out << (k == 0 ? "" : " ") << formatAmplitude(e.amplitudes[k]);
        }
        out << '\n';
    }
}

}  // namespace dmcv::quantum
