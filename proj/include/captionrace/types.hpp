// Copyright 2026 The captionrace Authors.
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

#include <chrono>
#include <compare>
#include <cstdint>
#include <functional>
#include <ostream>
#include <string>
#include <utility>

#include <nlohmann/json.hpp>

namespace captionrace {

// Injected time. The engine never reads a clock; callers pass `now`.
using Duration = std::chrono::milliseconds;
using TimePoint = std::chrono::sys_time<Duration>;

inline std::int64_t to_epoch_ms(TimePoint t) { return t.time_since_epoch().count(); }
inline TimePoint from_epoch_ms(std::int64_t ms) { return TimePoint{Duration{ms}}; }
inline TimePoint wall_now() {
  return std::chrono::time_point_cast<Duration>(std::chrono::system_clock::now());
}

template <class Tag>
class StrongId {
 public:
  StrongId() = default;
  explicit StrongId(std::string value) : value_(std::move(value)) {}

  const std::string& str() const noexcept { return value_; }
  bool empty() const noexcept { return value_.empty(); }

  friend auto operator<=>(const StrongId&, const StrongId&) = default;
  friend std::ostream& operator<<(std::ostream& os, const StrongId& id) { return os << id.value_; }

  friend void to_json(nlohmann::json& j, const StrongId& id) { j = id.value_; }
  friend void from_json(const nlohmann::json& j, StrongId& id) { id.value_ = j.get<std::string>(); }

 private:
  std::string value_;
};

using PlayerId = StrongId<struct PlayerIdTag>;
using ImageId = StrongId<struct ImageIdTag>;
using RoomId = StrongId<struct RoomIdTag>;

}  // namespace captionrace

template <class Tag>
struct std::hash<captionrace::StrongId<Tag>> {
  std::size_t operator()(const captionrace::StrongId<Tag>& id) const noexcept {
    return std::hash<std::string>{}(id.str());
  }
};
