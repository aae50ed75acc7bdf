// Copyright 2026 The nvextract Authors
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

#ifndef NVX_ERROR_HPP_
#define NVX_ERROR_HPP_

#include <stdexcept>
#include <string>

namespace nvx {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Phase-1 similarity against an empty target suffix.
class EmptyTargetError : public Error {
 public:
  EmptyTargetError() : Error("target sequence is empty") {}
};

// Recall is undefined for an empty reference document.
class EmptyReferenceError : public Error {
 public:
  EmptyReferenceError() : Error("reference document has no words") {}
};

// Block sets must be strictly increasing and disjoint in both texts.
class NonMonotoneError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

class NoCorpusError : public Error {
 public:
  NoCorpusError() : Error("oracle corpus is empty") {}
};

}  // namespace nvx

#endif  // NVX_ERROR_HPP_
