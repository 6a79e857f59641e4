// Copyright 2026 The sflx Authors
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

#ifndef SFLX_ERRORS_H_
#define SFLX_ERRORS_H_

#include <stdexcept>
#include <string>

namespace sflx {

enum class ErrorCode {
  kInvalidArgument = 1,
  kUnsupportedFormat = 2,
  kIo = 3,
  kClassifierIo = 4,
};

// Every failure raised by the core library is an Error carrying a code that
// the C API maps one-to-one onto sflx_status.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void ThrowInvalidArgument(const std::string& message) {
  throw Error(ErrorCode::kInvalidArgument, message);
}

}  // namespace sflx

#endif  // SFLX_ERRORS_H_
