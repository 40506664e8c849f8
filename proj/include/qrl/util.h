// Copyright 2026 The QRL Simulator Authors
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

#ifndef QRL_UTIL_H
#define QRL_UTIL_H

#include <cstdint>
#include <string>

namespace qrl {

/// Shortest-safe decimal rendering: 17 significant digits, round-trips through strtod.
std::string format_real(double v);

/// FNV-1a 64-bit hash.
uint64_t fnv1a64(const std::string &bytes);
std::string hex64(uint64_t v);

}  // namespace qrl

#endif
