// Copyright 2026 The dissim-knn Authors
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
//
#pragma once

#include <stdexcept>
#include <string>

namespace dissim {

/// Invalid user-supplied configuration: unknown preset, out-of-range
/// fraction or lambda, malformed format descriptor.
class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Problems with the data itself: unreadable input, no valid records,
/// missing timestamps where a temporal split needs them.
class DataError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class IoError : public DataError {
public:
    using DataError::DataError;
};

class EmptyInputError : public DataError {
public:
    using DataError::DataError;
};

/// Too few paired observations for a significance test.
class InsufficientDataError : public DataError {
public:
    using DataError::DataError;
};

class IndexError : public std::out_of_range {
public:
    using std::out_of_range::out_of_range;
};

} // namespace dissim
