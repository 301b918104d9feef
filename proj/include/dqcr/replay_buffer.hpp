// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <vector>

#include "dqcr/actions.hpp"
#include "dqcr/errors.hpp"
#include "dqcr/rng.hpp"

namespace dqcr {

struct Experience {
  std::vector<std::int16_t> state;
  int action = 0;
  double reward = 0.0;
  std::vector<std::int16_t> next_state;
  bool done = false;
  ActionMask next_mask;  // admissible set of next_state; unused when done
};

// Fixed-capacity ring buffer; the oldest experience is evicted first.
class ReplayBuffer {
 public:
  explicit ReplayBuffer(std::size_t capacity) : capacity_(capacity) {
    if (capacity_ == 0) throw ValidationError("replay buffer capacity must be positive");
    items_.reserve(std::min<std::size_t>(capacity_, 1 << 16));
  }

  void push(Experience e) {
    if (items_.size() < capacity_) {
      items_.push_back(std::move(e));
    } else {
      items_[head_] = std::move(e);
    }
    head_ = (head_ + 1) % capacity_;
    ++pushed_;
  }

  std::size_t size() const { return items_.size(); }
  std::size_t capacity() const { return capacity_; }
  std::uint64_t total_pushed() const { return pushed_; }

  // age 0 is the newest experience.
  const Experience& recent(std::size_t age) const {
    if (age >= items_.size()) throw ContractViolation("replay buffer age out of range");
    return items_[(head_ + capacity_ - 1 - age) % capacity_];
  }

  // Uniform draw with replacement. Throws ContractViolation if fewer than
  // `batch` experiences are stored.
  std::vector<const Experience*> sample(std::size_t batch, Rng& rng) const {
    if (items_.size() < batch) throw ContractViolation("replay buffer holds fewer experiences than the batch size");
    std::vector<const Experience*> out;
    out.reserve(batch);
    for (std::size_t k = 0; k < batch; ++k) out.push_back(&items_[rng.uniform(items_.size())]);
    return out;
  }

 private:
  std::size_t capacity_;
  std::size_t head_ = 0;
  std::uint64_t pushed_ = 0;
  std::vector<Experience> items_;
};

}  // namespace dqcr
