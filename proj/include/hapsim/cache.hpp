#pragma once

#include <deque>
#include <string>
#include <vector>

#include "hapsim/common.hpp"

namespace hapsim {

// Per-RSU content store with first-in-first-out replacement: when space runs
// out, the oldest stored content goes first, regardless of access pattern.
class RsuCache {
 public:
  explicit RsuCache(double capacity_bits) : capacity_bits_(capacity_bits) {}

  bool contains(int content_id) const;

  // Inserts one content, evicting oldest entries until it fits. Re-inserting
  // a present content is a no-op and does not refresh its position.
  void insert(int content_id, double size_bits);

  // End-of-slot application of all y=1 decisions at this RSU; duplicates in
  // the batch collapse to one insertion.
  void apply_caching_decisions(const std::vector<std::pair<int, double>>& decided);

  double used_bits() const { return used_bits_; }
  double capacity_bits() const { return capacity_bits_; }
  std::size_t size() const { return entries_.size(); }
  void clear();

  // Content ids in insertion order (oldest first), for state dumps.
  std::vector<int> contents_in_order() const;

 private:
  struct Entry {
    int content_id;
    double size_bits;
  };
  double capacity_bits_;
  double used_bits_ = 0.0;
  std::deque<Entry> entries_;
};

}  // namespace hapsim
