// Copyright 2026 The kloshadows Authors
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

namespace kloshadows {

/** Base class of every exception thrown by the library. */
class Error : public std::runtime_error {
   public:
    using std::runtime_error::runtime_error;
};

/** Operand shapes do not fit together (non-square, wrong qubit count, ...). */
class DimensionError : public Error {
   public:
    using Error::Error;
};

/** A qubit or outcome index lies outside its valid range. */
class IndexError : public Error {
   public:
    using Error::Error;
};

/** Input violates a domain invariant (not PSD, not normalized, ...). */
class ValidationError : public Error {
   public:
    using Error::Error;
};

/** A numerical routine hit a singular or ill-conditioned problem. */
class NumericalError : public Error {
   public:
    using Error::Error;
};

/** A configured size cap (qubits, alphabet, term pairs) was exceeded. */
class CapacityError : public Error {
   public:
    using Error::Error;
};

/** Malformed text or binary input. */
class ParseError : public Error {
   public:
    using Error::Error;
};

}  // namespace kloshadows
