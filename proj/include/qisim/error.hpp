/*
    Licensed under the Apache License, Version 2.0 (the "License");
    you may not use this file except in compliance with the License.
    You may obtain a copy of the License at

        https://www.apache.org/licenses/LICENSE-2.0

    Unless required by applicable law or agreed to in writing, software
    distributed under the License is distributed on an "AS IS" BASIS,
    WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
    See the License for the specific language governing permissions and
    limitations under the License.
*/
#pragma once

#include <stdexcept>
#include <string>

namespace qisim {

/// Configuration value violates a type invariant. `field()` names the offending key.
class ConfigError : public std::invalid_argument {
  public:
    ConfigError(std::string field, const std::string& message)
        : std::invalid_argument(message), field_(std::move(field)) {}

    const std::string& field() const noexcept { return field_; }

  private:
    std::string field_;
};

/// A statistic or formula is undefined for the given inputs (zero denominators etc).
class DomainError : public std::domain_error {
  public:
    using std::domain_error::domain_error;
};

/// Malformed input file (tag stream, scene, config text).
class FormatError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

} // namespace qisim
