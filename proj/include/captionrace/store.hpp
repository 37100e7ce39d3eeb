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

#include <fcntl.h>
#include <sys/file.h>
#include <sys/stat.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>
#include <deque>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <memory>
#include <mutex>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "captionrace/error.hpp"
#include "captionrace/lexic.hpp"
#include "captionrace/round_record.hpp"

namespace captionrace::store {

/// Serializes with invalid UTF-8 replaced so a dump never throws.
inline std::string dump_line(const nlohmann::json& j) {
  return j.dump(-1, ' ', false, nlohmann::json::error_handler_t::replace);
}

class RoundStore {
 public:
  virtual ~RoundStore() = default;
  /// Durable when it returns; throws STORAGE_FAILURE otherwise.
  virtual void append(const RoundRecord& record) = 0;
  virtual std::vector<RoundRecord> load() const = 0;
};

class MemoryRoundStore final : public RoundStore {
 public:
  void append(const RoundRecord& record) override {
    std::lock_guard lock(mu_);
    records_.push_back(record);
  }
  std::vector<RoundRecord> load() const override {
    std::lock_guard lock(mu_);
    return records_;
  }

 private:
  mutable std::mutex mu_;
  std::vector<RoundRecord> records_;
};

/// Reads a round log without modifying it. An unterminated final line was
/// never acknowledged and is skipped; a missing file is an empty log.
inline std::vector<RoundRecord> read_round_log(const std::filesystem::path& path) {
  std::vector<RoundRecord> out;
  std::ifstream in(path, std::ios::binary);
  if (!in) return out;
  std::string content((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  std::size_t start = 0;
  std::size_t lineno = 0;
  while (start < content.size()) {
    const auto nl = content.find('\n', start);
    if (nl == std::string::npos) break;
    ++lineno;
    std::string_view line(content.data() + start, nl - start);
    start = nl + 1;
    if (lexic::trim(line).empty()) continue;
    try {
      out.push_back(nlohmann::json::parse(line).get<RoundRecord>());
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorCode::kParseError, path.string() + ":" + std::to_string(lineno) + ": " + e.what());
    }
  }
  return out;
}

/// Append-only JSON Lines file. Each append takes an exclusive advisory lock
/// (non-blocking), writes one line and fsyncs before returning. A torn final
/// line left by a crash is never acknowledged and is cut off on open.
class JsonlRoundStore final : public RoundStore {
 public:
  explicit JsonlRoundStore(std::filesystem::path path) : path_(std::move(path)) { repair_tail(); }

  const std::filesystem::path& path() const noexcept { return path_; }

  void append(const RoundRecord& record) override {
    const std::string line = dump_line(nlohmann::json(record)) + "\n";
    std::lock_guard lock(mu_);
    const int fd = ::open(path_.c_str(), O_WRONLY | O_APPEND | O_CREAT | O_CLOEXEC, 0644);
    if (fd < 0) fail("open");
    if (::flock(fd, LOCK_EX | LOCK_NB) != 0) {
      const int err = errno;
      ::close(fd);
      throw Error(ErrorCode::kStorageFailure,
                  path_.string() + (err == EWOULDBLOCK ? ": store is locked" : ": flock: " + std::string(std::strerror(err))));
    }
    std::size_t written = 0;
    while (written < line.size()) {
      const auto n = ::write(fd, line.data() + written, line.size() - written);
      if (n < 0) {
        if (errno == EINTR) continue;
        const int err = errno;
        ::close(fd);
        throw Error(ErrorCode::kStorageFailure, path_.string() + ": write: " + std::strerror(err));
      }
      written += static_cast<std::size_t>(n);
    }
    if (::fsync(fd) != 0) {
      const int err = errno;
      ::close(fd);
      throw Error(ErrorCode::kStorageFailure, path_.string() + ": fsync: " + std::strerror(err));
    }
    ::close(fd);  // releases the lock
  }

  std::vector<RoundRecord> load() const override {
    std::lock_guard lock(mu_);
    return read_round_log(path_);
  }

 private:
  [[noreturn]] void fail(const char* what) const {
    throw Error(ErrorCode::kStorageFailure, path_.string() + ": " + what + ": " + std::strerror(errno));
  }

  void repair_tail() {
    std::error_code ec;
    if (!std::filesystem::exists(path_, ec)) return;
    std::ifstream in(path_, std::ios::binary);
    std::string content((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    if (content.empty() || content.back() == '\n') return;
    const auto last_nl = content.rfind('\n');
    std::filesystem::resize_file(path_, last_nl == std::string::npos ? 0 : last_nl + 1, ec);
    if (ec) throw Error(ErrorCode::kStorageFailure, path_.string() + ": cannot repair torn tail: " + ec.message());
  }

  std::filesystem::path path_;
  mutable std::mutex mu_;
};

/// Writes records in order; a failed write keeps the record (and anything
/// after it) queued and retries on the next call.
class RoundPersister {
 public:
  using AlertSink = std::function<void(const std::string&)>;

  explicit RoundPersister(std::shared_ptr<RoundStore> store, AlertSink alert = nullptr)
      : store_(std::move(store)), alert_(alert ? std::move(alert) : [](const std::string& msg) {
          std::cerr << "[alert] " << msg << std::endl;
        }) {}

  /// True when `record` is durable.
  bool persist(RoundRecord record) {
    pending_.push_back(std::move(record));
    return flush();
  }

  /// Retries queued records; true when nothing is pending.
  bool flush() {
    while (!pending_.empty()) {
      try {
        store_->append(pending_.front());
      } catch (const Error& e) {
        alert_("round " + pending_.front().round_id + " not persisted, " + std::to_string(pending_.size()) +
               " queued for retry: " + e.what());
        return false;
      }
      pending_.pop_front();
    }
    return true;
  }

  std::size_t pending() const noexcept { return pending_.size(); }
  RoundStore& store() const noexcept { return *store_; }

 private:
  std::shared_ptr<RoundStore> store_;
  AlertSink alert_;
  std::deque<RoundRecord> pending_;
};

/// Public dataset view of one round.
struct ExportRow {
  ImageId image_id;
  std::string sentence;
  int blanks_remaining = 0;
  bool sr_verified = false;
  std::int64_t ended_at_ms = 0;

  static ExportRow from(const RoundRecord& r) {
    return {r.image_id, r.raw_sentence, r.blanks_remaining, r.sr_verified, to_epoch_ms(r.ended_at)};
  }
  friend bool operator==(const ExportRow&, const ExportRow&) = default;
};

inline std::string export_line(const ExportRow& row) {
  nlohmann::json j = {{"imageId", row.image_id},
                      {"sentence", row.sentence},
                      {"blanksRemaining", row.blanks_remaining},
                      {"srVerified", row.sr_verified},
                      {"endedAt", row.ended_at_ms}};
  return dump_line(j);
}

inline ExportRow parse_export_line(std::string_view line) {
  try {
    const auto j = nlohmann::json::parse(line);
    return {j.at("imageId").get<ImageId>(), j.at("sentence").get<std::string>(), j.at("blanksRemaining").get<int>(),
            j.at("srVerified").get<bool>(), j.at("endedAt").get<std::int64_t>()};
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kParseError, e.what());
  }
}

/// One JSON line per round, in store order.
inline std::size_t export_dataset(const RoundStore& store, bool verified_only, std::ostream& out) {
  std::size_t n = 0;
  for (const auto& r : store.load()) {
    if (verified_only && !r.sr_verified) continue;
    out << export_line(ExportRow::from(r)) << '\n';
    ++n;
  }
  return n;
}

}  // namespace captionrace::store
