// Copyright 2026 The BPGAN Codec Authors
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

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>

namespace bpgan {

/// Error categories. Values double as process exit codes for the CLI.
enum class Errc : int {
  internal = 1,  // bug or broken internal invariant
  io = 2,        // missing/unreadable files, bad user input
  format = 3,    // malformed container, digest/model-id mismatch, shape break
  numeric = 4,   // NaN/Inf encountered where finite values are required
};

/// Exception carrying a category, the originating module, and a short
/// machine-readable reason token next to the human-readable message.
class Error : public std::runtime_error {
 public:
  Error(Errc code, std::string module, std::string reason, const std::string& message)
      : std::runtime_error(message),
        code_(code),
        module_(std::move(module)),
        reason_(std::move(reason)) {}

  Errc code() const noexcept { return code_; }
  const std::string& module() const noexcept { return module_; }
  const std::string& reason() const noexcept { return reason_; }

  /// Single-line diagnostic: code=N module=M reason=R message="..."
  std::string diagnostic() const {
    std::string out = "code=" + std::to_string(static_cast<int>(code_));
    out += " module=" + module_;
    out += " reason=" + reason_;
    out += " message=\"";
    out += what();
    out += "\"";
    return out;
  }

 private:
  Errc code_;
  std::string module_;
  std::string reason_;
};

[[noreturn]] inline void fail(Errc code, std::string_view module, std::string_view reason,
                              const std::string& message) {
  throw Error(code, std::string(module), std::string(reason), message);
}

}  // namespace bpgan
