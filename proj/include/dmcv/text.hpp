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

#ifndef DMCV_TEXT_HPP
#define DMCV_TEXT_HPP

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "dmcv/quantum.hpp"

namespace dmcv::text {

/// Shortest decimal text that parses back to exactly `x`.
std::string shortestDouble(double x);

/// `[a, (re, im), ...]` as accepted by the DMC amplitude grammar.
std::string amplitudeList(std::span<const quantum::Amplitude> amplitudes);

std::string join(const std::vector<std::string>& parts, std::string_view separator);

}  // namespace dmcv::text

#endif  // DMCV_TEXT_HPP
