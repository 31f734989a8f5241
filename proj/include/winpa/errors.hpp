// Copyright 2026 The winpa-sim Authors
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
#include <string_view>

namespace winpa {

enum class Errc {
  invalid_config,
  bad_interval,
  index_out_of_range,
  deadlock,
  unknown_policy,
  policy_violation,
  instance_too_large,
  invalid_grid_point,
  parse_error,
  io_error,
};

constexpr std::string_view to_string(Errc code) {
  switch (code) {
    case Errc::invalid_config: return "invalid_config";
    case Errc::bad_interval: return "bad_interval";
    case Errc::index_out_of_range: return "index_out_of_range";
    case Errc::deadlock: return "deadlock";
    case Errc::unknown_policy: return "unknown_policy";
    case Errc::policy_violation: return "policy_violation";
    case Errc::instance_too_large: return "instance_too_large";
    case Errc::invalid_grid_point: return "invalid_grid_point";
    case Errc::parse_error: return "parse_error";
    case Errc::io_error: return "io_error";
  }
  return "unknown";
}

// Every failure surfaced by the library carries a machine-readable code.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

class InvalidConfig : public Error {
 public:
  InvalidConfig(std::string field, std::string reason)
      : Error(Errc::invalid_config, field + " (" + reason + ")"),
        field_(std::move(field)),
        reason_(std::move(reason)) {}

  const std::string& field() const noexcept { return field_; }
  const std::string& reason() const noexcept { return reason_; }

 private:
  std::string field_;
  std::string reason_;
};

}  // namespace winpa
