// Copyright 2026 The lungseg Authors
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

namespace lungseg {

/// Root of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A caller broke a documented precondition (mismatched shapes, channel counts).
class ContractError : public Error {
 public:
  using Error::Error;
};

/// Invalid hyperparameter or option value.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Input image dimensions incompatible with the network geometry.
class InputShapeError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

/// File exists but its contents could not be decoded.
class DecodeError : public IoError {
 public:
  using IoError::IoError;
};

class FileNotFoundError : public IoError {
 public:
  using IoError::IoError;
};

/// Multi-channel image whose channels differ, where a grayscale image was required.
class ColorImageError : public DecodeError {
 public:
  using DecodeError::DecodeError;
};

// Weight file parse failures. Each names the offending record.
class ParseError : public Error {
 public:
  using Error::Error;
};

/// Wrong magic bytes or unsupported format version.
class FormatError : public ParseError {
 public:
  using ParseError::ParseError;
};

class TruncatedError : public ParseError {
 public:
  using ParseError::ParseError;
};

class ShapeMismatchError : public ParseError {
 public:
  using ParseError::ParseError;
};

}  // namespace lungseg
