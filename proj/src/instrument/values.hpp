#pragma once

#include <chrono>
#include <cstdint>
#include <deque>
#include <functional>
#include <map>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

namespace trellis {

struct ValueEvent {
  std::uint64_t node = 0;
  nlohmann::json value;
  std::uint64_t sequence = 0;
  std::int64_t timestamp_ms = 0;
};

inline constexpr std::size_t kHistoryCap = 64;
inline constexpr int kValueDepthCap = 4;
inline constexpr std::size_t kValueStringCap = 1024;

// Truncates nesting past `depth` and strings past `max_string` bytes.
nlohmann::json cap_value(const nlohmann::json& value, int depth = kValueDepthCap,
                         std::size_t max_string = kValueStringCap);

using SubscriptionId = std::uint64_t;
using ValueCallback = std::function<void(const ValueEvent&)>;

/// Per-node value streams. `post` may be called from any thread; events are
/// delivered to subscribers only from `pump`, on the owner's loop.
class ValueHub {
 public:
  // Ids that `post` accepts. Others are acknowledged and dropped.
  void set_known(std::set<std::uint64_t> ids);
  void add_known(std::uint64_t id);

  // Thread-safe. Returns false when the id is unknown (counted as dropped).
  bool post(std::uint64_t id, const nlohmann::json& value);

  // Moves queued events into histories and delivers them. Returns the count.
  std::size_t pump();

  // Replays the history to `callback` immediately, then delivers live events.
  SubscriptionId subscribe(std::uint64_t node, ValueCallback callback);
  void unsubscribe(SubscriptionId id);

  std::vector<ValueEvent> history(std::uint64_t node) const;
  std::optional<nlohmann::json> last(std::uint64_t node) const;
  std::uint64_t dropped_count() const;
  std::uint64_t received_count() const;

 private:
  mutable std::mutex mutex_;  // guards known_, queue_, dropped_, sequence_
  std::set<std::uint64_t> known_;
  std::deque<ValueEvent> queue_;
  std::uint64_t dropped_ = 0;
  std::uint64_t sequence_ = 0;

  std::map<std::uint64_t, std::deque<ValueEvent>> histories_;
  struct Subscriber {
    std::uint64_t node;
    ValueCallback callback;
  };
  std::map<SubscriptionId, Subscriber> subscribers_;
  SubscriptionId next_subscription_ = 1;
};

// Validates a POST /watch body and posts it. Returns the HTTP status:
// 204 on success (unknown ids included), 400 on a malformed body.
int collect_value(ValueHub& hub, std::string_view body);

}  // namespace trellis
