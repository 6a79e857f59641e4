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

#ifndef SFLX_SELFTEST_H_
#define SFLX_SELFTEST_H_

#include <string>
#include <vector>

namespace sflx {

struct SelftestCheck {
  std::string name;
  bool passed;
  std::string detail;
};

// Installation check: the four measures against a separate direct evaluation
// over every count vector in [0,10]^4, and the explanation pipeline against
// exhaustive enumeration on 3x3 images.
std::vector<SelftestCheck> RunSelftest();

}  // namespace sflx

#endif  // SFLX_SELFTEST_H_
