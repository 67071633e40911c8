#include "instrument/values.hpp"

namespace trellis {

nlohmann::json cap_value(const nlohmann::json& value, int depth, std::size_t max_string) {
  if (value.is_string()) {
    const auto& s = value.get_ref<const std::string&>();
    if (s.size() <= max_string) return value;
    std::size_t cut = max_string;
    while (cut > 0 && (static_cast<unsigned char>(s[cut]) & 0xC0) == 0x80) --cut;
    return s.substr(0, cut);
  }
  if (!value.is_structured()) return value;
  if (depth <= 0) return value.is_array() ? "[Array]" : "[Object]";
  nlohmann::json out = value.is_array() ? nlohmann::json::array() : nlohmann::json::object();
  for (auto it = value.begin(); it != value.end(); ++it) {
    auto v = cap_value(*it, depth - 1, max_string);
    if (value.is_array()) {
      out.push_back(std::move(v));
    } else {
      out[it.key()] = std::move(v);
    }
  }
  return out;
}

void ValueHub::set_known(std::set<std::uint64_t> ids) {
  std::lock_guard lock(mutex_);
  known_ = std::move(ids);
}

void ValueHub::add_known(std::uint64_t id) {
  std::lock_guard lock(mutex_);
  known_.insert(id);
}

bool ValueHub::post(std::uint64_t id, const nlohmann::json& value) {
  const auto now = std::chrono::duration_cast<std::chrono::milliseconds>(
                       std::chrono::system_clock::now().time_since_epoch())
                       .count();
  std::lock_guard lock(mutex_);
  if (!known_.count(id)) {
    ++dropped_;
    return false;
  }
  queue_.push_back({id, cap_value(value), ++sequence_, now});
  return true;
}

std::size_t ValueHub::pump() {
  std::deque<ValueEvent> batch;
  {
    std::lock_guard lock(mutex_);
    batch.swap(queue_);
  }
  for (const auto& e : batch) {
    auto& h = histories_[e.node];
    h.push_back(e);
    if (h.size() > kHistoryCap) h.pop_front();
    // Callbacks may unsubscribe; iterate over a snapshot of ids.
    std::vector<SubscriptionId> ids;
    for (const auto& [id, s] : subscribers_) {
      if (s.node == e.node) ids.push_back(id);
    }
    for (auto id : ids) {
      auto it = subscribers_.find(id);
      if (it != subscribers_.end()) it->second.callback(e);
    }
  }
  return batch.size();
}

SubscriptionId ValueHub::subscribe(std::uint64_t node, ValueCallback callback) {
  auto it = histories_.find(node);
  if (it != histories_.end()) {
    for (const auto& e : it->second) callback(e);
  }
  const SubscriptionId id = next_subscription_++;
  subscribers_.emplace(id, Subscriber{node, std::move(callback)});
  return id;
}

void ValueHub::unsubscribe(SubscriptionId id) { subscribers_.erase(id); }

std::vector<ValueEvent> ValueHub::history(std::uint64_t node) const {
  auto it = histories_.find(node);
  if (it == histories_.end()) return {};
  return {it->second.begin(), it->second.end()};
}

std::optional<nlohmann::json> ValueHub::last(std::uint64_t node) const {
  auto it = histories_.find(node);
  if (it == histories_.end() || it->second.empty()) return std::nullopt;
  return std::optional<nlohmann::json>(std::in_place, it->second.back().value);
}

std::uint64_t ValueHub::dropped_count() const {
  std::lock_guard lock(mutex_);
  return dropped_;
}

std::uint64_t ValueHub::received_count() const {
  std::lock_guard lock(mutex_);
  return sequence_;
}

int collect_value(ValueHub& hub, std::string_view body) {
  auto j = nlohmann::json::parse(body, nullptr, false);
  if (j.is_discarded() || !j.is_object() || !j.contains("id") || !j["id"].is_number_integer() ||
      j["id"].get<long long>() < 0) {
    return 400;
  }
  hub.post(j["id"].get<std::uint64_t>(), j.contains("e") ? j["e"] : nlohmann::json(nullptr));
  return 204;
}

}  // namespace trellis
