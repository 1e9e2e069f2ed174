#pragma once

#include <cstddef>
#include <stdexcept>
#include <vector>

namespace selfish {

// One replay record. `action` is the action index for DQN and the executed
// turn in degrees for DDPG.
struct Transition {
  std::vector<double> obs;
  double action = 0.0;
  double reward = 0.0;
  std::vector<double> next_obs;
  bool terminal = false;
};

// Fixed-capacity ring with strict FIFO eviction.
class ReplayBuffer {
 public:
  explicit ReplayBuffer(std::size_t capacity) : capacity_(capacity) {
    if (capacity == 0) throw std::invalid_argument("replay capacity must be > 0");
  }

  void push(Transition t) {
    if (data_.size() < capacity_) {
      data_.push_back(std::move(t));
    } else {
      data_[head_] = std::move(t);
      head_ = (head_ + 1) % capacity_;
    }
  }

  std::size_t size() const { return data_.size(); }
  std::size_t capacity() const { return capacity_; }

  // i = 0 is the oldest stored transition.
  const Transition& operator[](std::size_t i) const {
    return data_[(head_ + i) % data_.size()];
  }

 private:
  std::size_t capacity_;
  std::size_t head_ = 0;
  std::vector<Transition> data_;
};

}  // namespace selfish
