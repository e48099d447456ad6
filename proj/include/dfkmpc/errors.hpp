/*
 Copyright 2026 The dfkmpc Authors

 Licensed under the Apache License, Version 2.0 (the "License");
 you may not use this file except in compliance with the License.
 You may obtain a copy of the License at

      https://www.apache.org/licenses/LICENSE-2.0

 Unless required by applicable law or agreed to in writing, software
 distributed under the License is distributed on an "AS IS" BASIS,
 WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 See the License for the specific language governing permissions and
 limitations under the License.
*/
#ifndef DFKMPC_ERRORS_HPP
#define DFKMPC_ERRORS_HPP

#include <cstddef>
#include <stdexcept>
#include <string>

namespace dfkmpc {

/// Bad shapes, out-of-range counts, invalid model parameters.
class ParameterError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A sequence is too short for the requested Hankel depth.
class InsufficientDataError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// An iterative decomposition did not converge.
class ConvergenceError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// The plant produced a non-finite state.
class DivergenceError : public std::runtime_error {
public:
    DivergenceError(const std::string &what, std::size_t step)
        : std::runtime_error(what + " (step " + std::to_string(step) + ")"), step_(step) {}

    std::size_t step() const noexcept { return step_; }

private:
    std::size_t step_;
};

} // namespace dfkmpc

#endif // DFKMPC_ERRORS_HPP
