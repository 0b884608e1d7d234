// ramdec/base.h

// Copyright 2026  The ramdec Authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#ifndef RAMDEC_BASE_H_
#define RAMDEC_BASE_H_

#include <cstdint>
#include <stdexcept>
#include <string>

namespace ramdec {

/// Base class of every error raised for bad data, bad files or failed
/// computations.  The command-line tool maps these to exit status 1.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string &what) : std::runtime_error(what) {}
};

/// Malformed archive content; carries the byte offset of the failing entry.
class ArchiveError : public Error {
 public:
  ArchiveError(const std::string &msg, std::int64_t offset,
               const std::string &key);
  std::int64_t Offset() const { return offset_; }
  const std::string &Key() const { return key_; }

 private:
  std::int64_t offset_;
  std::string key_;
};

/// The serving endpoint answered with an {"error": ...} body.
class RemoteError : public Error {
 public:
  explicit RemoteError(const std::string &message)
      : Error("remote error: " + message), message_(message) {}
  const std::string &Message() const { return message_; }

 private:
  std::string message_;
};

/// The serving endpoint answered with something that violates the wire
/// protocol (bad JSON, wrong shape, rows not summing to one).
class ProtocolError : public Error {
 public:
  explicit ProtocolError(const std::string &what)
      : Error("protocol error: " + what) {}
};

/// Prints a float with 9 significant digits, which round-trips any
/// 32-bit float.
std::string FormatFloat(float value);

/// Same as FormatFloat but always contains a '.' or exponent, so the text is
/// read back as a JSON number with a fractional part ("1.0", not "1").
std::string FormatJsonFloat(float value);

/// 17 significant digits; round-trips any double.
std::string FormatDouble(double value);

}  // namespace ramdec

#endif  // RAMDEC_BASE_H_
