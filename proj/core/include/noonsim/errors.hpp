/**
 * Copyright 2026 The noonsim authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <stdexcept>
#include <string>

namespace noonsim {

/// Base class for all errors raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Invalid configuration: unregistered modes, bad parameters, malformed
/// experiment descriptions. Maps to CLI exit code 2.
class ConfigError : public Error {
public:
    using Error::Error;
};

/// Failure while parsing an input file; the message carries the line number.
class ParseError : public ConfigError {
public:
    ParseError(const std::string& path, std::size_t line, const std::string& what)
        : ConfigError(path + ":" + std::to_string(line) + ": " + what) {}
};

/// Numerical or runtime failure (empty post-selection sector where a state
/// was required, fit non-convergence, ...). Maps to CLI exit code 3.
class RuntimeError : public Error {
public:
    using Error::Error;
};

} // namespace noonsim
