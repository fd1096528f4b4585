#include "hapsim/cache.hpp"

#include <algorithm>

namespace hapsim {

bool RsuCache::contains(int content_id) const {
  return std::any_of(entries_.begin(), entries_.end(),
                     [content_id](const Entry& e) { return e.content_id == content_id; });
}

void RsuCache::insert(int content_id, double size_bits) {
  if (size_bits > capacity_bits_)
    throw CapExceededError("content of " + std::to_string(size_bits) +
                           " bits exceeds cache capacity of " +
                           std::to_string(capacity_bits_) + " bits");
  if (contains(content_id)) return;
  while (used_bits_ + size_bits > capacity_bits_ && !entries_.empty()) {
    used_bits_ -= entries_.front().size_bits;
    entries_.pop_front();
  }
  entries_.push_back({content_id, size_bits});
  used_bits_ += size_bits;
}

void RsuCache::apply_caching_decisions(const std::vector<std::pair<int, double>>& decided) {
  std::vector<int> seen;
  for (const auto& [content_id, size_bits] : decided) {
    if (std::find(seen.begin(), seen.end(), content_id) != seen.end()) continue;
    seen.push_back(content_id);
    insert(content_id, size_bits);
  }
}

void RsuCache::clear() {
  entries_.clear();
  used_bits_ = 0.0;
}

std::vector<int> RsuCache::contents_in_order() const {
  std::vector<int> out;
  out.reserve(entries_.size());
  for (const auto& e : entries_) out.push_back(e.content_id);
  return out;
}

}  // namespace hapsim
