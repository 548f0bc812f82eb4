/*
 *   Copyright 2026 The fabsp Authors.
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

#ifndef FABSP_ERROR_HPP
#define FABSP_ERROR_HPP

#include <stdexcept>
#include <string>

namespace fabsp {

/// Misuse of the runtime API: send after done, double done, spawning into a
/// closed finish scope, regressing a conveyor's done flag, and so on.
class UsageError : public std::logic_error {
public:
  using std::logic_error::logic_error;
};

/// Second put into a single-assignment promise.
class SingleAssignmentError : public UsageError {
public:
  using UsageError::UsageError;
};

/// Raised on every PE once any PE has failed; carries the originating PE's
/// diagnostic so that blocked peers unwind instead of hanging.
class RunAborted : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// A collective or wait did not complete within the configured deadline.
class DeadlockTimeout : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

} // namespace fabsp

#endif
