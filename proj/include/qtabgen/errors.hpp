// Copyright 2026 The qtabgen Authors
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

#include <functional>
#include <stdexcept>
#include <string>

namespace qtabgen {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Invalid configuration: bad sizes, hyperparameters, qubit counts. CLI exit code 3.
class ConfigError : public Error {
  public:
    using Error::Error;
};

/// Input data does not fit the schema or cannot be used. CLI exit code 2.
class DataError : public Error {
  public:
    using Error::Error;
};

/// A caller passed arguments that violate an operation's contract.
class ArgumentError : public Error {
  public:
    using Error::Error;
};

/// File could not be read, written or parsed.
class IoError : public Error {
  public:
    using Error::Error;
};

/// Checkpoint written by an incompatible format version.
class VersionError : public IoError {
  public:
    using IoError::IoError;
};

/// A metric is mathematically undefined for the given inputs (e.g. zero target variance).
class MetricUndefined : public Error {
  public:
    using Error::Error;
};

namespace log {

using WarningSink = std::function<void(const std::string &)>;

/// Emits a warning through the installed sink (stderr by default).
void warn(const std::string &message);

/// Replaces the warning sink and returns the previous one. Passing an empty
/// function restores the stderr sink.
WarningSink set_warning_sink(WarningSink sink);

} // namespace log
} // namespace qtabgen
