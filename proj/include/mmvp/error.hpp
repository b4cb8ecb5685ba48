// Copyright (c) 2026 The MMVP Authors. All Rights Reserved.
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

namespace mmvp {

// Values mirror mmvp_status in the C API header.
enum class ErrorCode : int {
    kInvalidArgument = 1,
    kShapeMismatch = 2,
    kIo = 3,
    kBadMagic = 4,
    kUnsupportedVersion = 5,
    kUnsupportedDtype = 6,
    kTruncatedPayload = 7,
    kUnknownKey = 8,
    kTypeMismatch = 9,
    kConfigInvalid = 10,
    kOutOfRange = 11,
    kInternal = 12,
};

const char* error_code_name(ErrorCode code);

class Error : public std::runtime_error {
  public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(message), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

  private:
    ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& message) {
    throw Error(code, message);
}

}  // namespace mmvp
