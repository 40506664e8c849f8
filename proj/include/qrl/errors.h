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

#ifndef QRL_ERRORS_H
#define QRL_ERRORS_H

#include <cstddef>
#include <stdexcept>
#include <string>

namespace qrl {

struct InvalidArgument : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct SingularParameter : InvalidArgument {
    using InvalidArgument::InvalidArgument;
};

/// Raised when a homodyne angle pair makes L (and V) diverge.
struct DegenerateTeleportation : std::domain_error {
    using std::domain_error::domain_error;
};

struct ScheduleOrderError : std::logic_error {
    using std::logic_error::logic_error;
};

struct MisuseError : std::logic_error {
    using std::logic_error::logic_error;
};

struct EstimationSingularity : std::domain_error {
    using std::domain_error::domain_error;
};

struct IllConditionedGain : std::domain_error {
    using std::domain_error::domain_error;
};

struct AdjacencyError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct CapacityError : std::length_error {
    using std::length_error::length_error;
};

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ParseError : std::runtime_error {
    ParseError(const std::string &msg, size_t line, size_t column)
        : std::runtime_error("line " + std::to_string(line) + ", column " + std::to_string(column) + ": " + msg),
          line(line),
          column(column) {
    }
    size_t line;
    size_t column;
};

}  // namespace qrl

#endif
