// Copyright 2026 The holodyn Authors
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

namespace holodyn {

// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A malformed configuration document (CLI exit code 2).
class SchemaError : public Error {
 public:
  using Error::Error;
};

// A caller-supplied input violates an operation's precondition: shape
// mismatch, parameter out of range, stability guard (CLI exit code 2).
class PreconditionError : public Error {
 public:
  using Error::Error;
};

// The decoherence-free subspace is missing, changes dimension, or its gap
// collapses.
class DfsError : public PreconditionError {
 public:
  using PreconditionError::PreconditionError;
};

// A numerical invariant drifted beyond tolerance during a computation
// (CLI exit code 3).
class InvariantError : public Error {
 public:
  using Error::Error;
};

}  // namespace holodyn
