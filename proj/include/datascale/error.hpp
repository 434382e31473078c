/*
 * Copyright 2026 The datascale Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef DATASCALE_ERROR_HPP_
#define DATASCALE_ERROR_HPP_

#include <stdexcept>
#include <string>

namespace datascale {

// Bad user input: malformed files, schema violations, inconsistent records.
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Argument outside the mathematical domain of an operation.
class DomainError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

// Source cost model missing a required parameter.
class ConfigError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

// Broken internal invariant. Reaching this is a bug.
class InvariantError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

}  // namespace datascale

#endif  // DATASCALE_ERROR_HPP_
