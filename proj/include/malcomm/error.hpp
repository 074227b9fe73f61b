// Copyright 2026 The malcomm Authors.
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

#ifndef MALCOMM_ERROR_HPP_
#define MALCOMM_ERROR_HPP_

#include <stdexcept>
#include <string>

namespace malcomm {

// Malformed input file or record. The CLI maps this to exit code 1.
class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Out-of-domain parameter. The CLI maps this to exit code 2.
class ParameterError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

}  // namespace malcomm

#endif  // MALCOMM_ERROR_HPP_
