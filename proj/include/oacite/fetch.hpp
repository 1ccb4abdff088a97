#pragma once

// Fetching abstractions shared by the live and mock webs: results as values,
// clocks, a per-host rate limiter, and the fetch log record.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdint>
#include <ctime>
#include <map>
#include <mutex>
#include <string>
#include <thread>

#include <json.hpp>

#include "oacite/extract.hpp"

namespace oacite {

struct FetchResult {
  int status = 0;  // HTTP status; 0 when no response arrived
  Format format = Format::Unknown;
  std::string body;
  std::string error;  // transport error, timeout, robots exclusion, ...

  bool ok() const noexcept { return status >= 200 && status < 300; }
};

class Fetcher {
 public:
  virtual ~Fetcher() = default;
  // Must return within the implementation's timeout; never throws for
  // network-level failures.
  virtual FetchResult fetch(const std::string& url) const = 0;
};

using TimePoint = std::chrono::system_clock::time_point;

class Clock {
 public:
  virtual ~Clock() = default;
  virtual TimePoint now() const = 0;
  virtual void sleep_until(TimePoint t) = 0;
};

class SystemClock final : public Clock {
 public:
  TimePoint now() const override { return std::chrono::system_clock::now(); }
  void sleep_until(TimePoint t) override { std::this_thread::sleep_until(t); }
};

// Logical clock for tests and offline runs: sleeping jumps time forward.
class ManualClock final : public Clock {
 public:
  explicit ManualClock(TimePoint start = TimePoint{}) : now_(start) {}

  TimePoint now() const override {
    std::lock_guard lock(mu_);
    return now_;
  }
  void sleep_until(TimePoint t) override {
    std::lock_guard lock(mu_);
    if (t > now_) now_ = t;
  }
  void advance(std::chrono::nanoseconds d) {
    std::lock_guard lock(mu_);
    now_ += d;
  }

 private:
  mutable std::mutex mu_;
  TimePoint now_;
};

// ISO-8601 UTC with millisecond precision.
inline std::string format_timestamp(TimePoint t) {
  using namespace std::chrono;
  const auto ms = duration_cast<milliseconds>(t.time_since_epoch()).count();
  std::time_t secs = static_cast<std::time_t>(ms / 1000);
  long frac = static_cast<long>(ms % 1000);
  if (frac < 0) frac += 1000, --secs;
  std::tm tm{};
  gmtime_r(&secs, &tm);
  char buf[96];
  std::snprintf(buf, sizeof buf, "%04d-%02d-%02dT%02d:%02d:%02d.%03ldZ", tm.tm_year + 1900,
                tm.tm_mon + 1, tm.tm_mday, tm.tm_hour, tm.tm_min, tm.tm_sec, frac);
  return buf;
}

// Spaces requests to one host at least 1/rate seconds apart, so any
// half-open one-second window sees at most ceil(rate) of them.
class HostRateLimiter {
 public:
  HostRateLimiter(double requests_per_second, Clock& clock)
      : rate_(requests_per_second), clock_(clock) {}

  // Blocks (on the clock) until `host` may be contacted; returns the slot time.
  TimePoint acquire(const std::string& host) {
    TimePoint slot;
    {
      std::lock_guard lock(mu_);
      const TimePoint now = clock_.now();
      if (rate_ <= 0.0) return now;
      const auto interval = std::chrono::nanoseconds(
          static_cast<std::int64_t>(std::ceil(1e9 / rate_)));
      auto it = next_.find(host);
      slot = (it == next_.end() || it->second < now) ? now : it->second;
      next_[host] = slot + std::chrono::duration_cast<TimePoint::duration>(interval) +
                    TimePoint::duration(1);
    }
    clock_.sleep_until(slot);
    return slot;
  }

  double rate() const noexcept { return rate_; }
  Clock& clock() noexcept { return clock_; }

 private:
  double rate_;
  Clock& clock_;
  std::mutex mu_;
  std::map<std::string, TimePoint> next_;
};

struct FetchLogEntry {
  TimePoint at;
  std::string url;
  int status = 0;
  std::string host;
};

inline nlohmann::ordered_json to_json(const FetchLogEntry& e) {
  nlohmann::ordered_json j;
  j["timestamp"] = format_timestamp(e.at);
  j["url"] = e.url;
  j["status"] = e.status;
  j["host"] = e.host;
  return j;
}

}  // namespace oacite
