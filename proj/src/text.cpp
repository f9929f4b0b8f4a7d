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

#include "dmcv/text.hpp"

#include <charconv>

namespace dmcv::text {

std::string shortestDouble(double x) {
    if (x == 0.0) {
        x = 0.0;  // drop the sign of -0
    }
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), x);
    return std::string(buf, res.ptr);
}

std::string amplitudeList(std::span<const quantum::Amplitude> amplitudes) {
    std::string out = "[";
    for (std::size_t k = 0; k < amplitudes.size(); ++k) {
        if (k > 0) {
            out += ", ";
        }
        const auto& a = amplitudes[k];
        if (a.imag() == 0.0) {
            out += shortestDouble(a.real());
        } else {
            out += "(" + shortestDouble(a.real()) + ", " + shortestDouble(a.imag()) + ")";
        }
    }
    return out + "]";
}

std::string join(const std::vector<std::string>& parts, std::string_view separator) {
    std::string out;
    for (std::size_t i = 0; i < parts.size(); ++i) {
        if (i > 0) {
            out += separator;
        }
        out += parts[i];
    }
    return out;
}

}  // namespace dmcv::text
