/*
Copyright 2026 The pitchbench Authors. All rights reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
*/

// Exception types and the warning sink shared by every module.

#pragma once

#include <functional>
#include <iostream>
#include <mutex>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>

namespace pitchbench {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Unsupported or inconsistent file contents (WAV encodings, CSV hop ratios).
class FormatError : public Error {
 public:
  using Error::Error;
};

// Malformed or truncated input; the message names the offset or line.
class ParseError : public Error {
 public:
  using Error::Error;
};

// A value outside the domain an operation is defined on.
class DomainError : public Error {
 public:
  using Error::Error;
};

class BoundsError : public Error {
 public:
  using Error::Error;
};

// Contours or signals that cannot be aligned (hop or sample-rate mismatch).
class AlignmentError : public Error {
 public:
  using Error::Error;
};

class InfeasibleRoomError : public Error {
 public:
  InfeasibleRoomError(const std::string& what, double min_t60)
      : Error(what), min_t60_(min_t60) {}
  double min_t60() const { return min_t60_; }

 private:
  double min_t60_;
};

using WarningHandler = std::function<void(std::string_view)>;

namespace detail {

struct WarningSink {
  std::mutex mutex;
  WarningHandler handler = [](std::string_view msg) {
    std::cerr << "warning: " << msg << '\n';
  };
};

inline WarningSink& warning_sink() {
  static WarningSink sink;
  return sink;
}

}  // namespace detail

// Replaces the process-wide warning handler and returns the previous one.
inline WarningHandler set_warning_handler(WarningHandler handler) {
  auto& sink = detail::warning_sink();
  std::lock_guard<std::mutex> lock(sink.mutex);
  std::swap(sink.handler, handler);
  return handler;
}

inline void warn(std::string_view message) {
  auto& sink = detail::warning_sink();
  std::lock_guard<std::mutex> lock(sink.mutex);
  if (sink.handler) sink.handler(message);
}

}  // namespace pitchbench
