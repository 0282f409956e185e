// Copyright 2026 The diffden authors
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

#ifndef DIFFDEN_ERRORS_HPP_
#define DIFFDEN_ERRORS_HPP_

#include <stdexcept>
#include <string>

namespace diffden {

// File and format problems (bad PGM header, truncated payload, unreadable
// checkpoint). Everything else that is a caller mistake is reported with
// std::invalid_argument / std::domain_error from <stdexcept>.
class io_error : public std::runtime_error {
 public:
  explicit io_error(const std::string& what) : std::runtime_error(what) {}
};

// Training aborted (non-finite loss). Carries the failing step in the message.
class training_error : public std::runtime_error {
 public:
  explicit training_error(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace diffden

#endif  // DIFFDEN_ERRORS_HPP_
