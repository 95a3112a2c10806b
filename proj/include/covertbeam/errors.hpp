// SPDX-License-Identifier: Apache-2.0
//
// Copyright 2026 The covertbeam Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <stdexcept>
#include <string>

namespace covertbeam {

/// Argument outside the mathematical domain of a function.
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Iterative numerical routine that failed to reach its tolerance.
/// Carries the last estimate so callers can decide whether it is usable.
class NumericalError : public std::runtime_error {
public:
    NumericalError(const std::string& what, double last_estimate)
        : std::runtime_error(what), last_estimate_(last_estimate) {}

    double last_estimate() const noexcept { return last_estimate_; }

private:
    double last_estimate_;
};

/// Invalid system or solver configuration.
class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

} // namespace covertbeam
