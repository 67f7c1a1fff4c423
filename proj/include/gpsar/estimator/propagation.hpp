#pragma once

#include <memory>
#include <mutex>

#include "gpsar/estimator/preintegration.hpp"

namespace gpsar::est {

// Latest solved state as published by the solver task. Immutable once
// published; the propagation task only ever swaps the pointer.
struct StateSnapshot {
  NavState state;
  Vec6 bias = Vec6::Zero();
};

// High-rate odometry task: integrates incoming IMU measurements on top of
// the newest snapshot. The solver thread publishes, this side consumes;
// neither blocks the other beyond the pointer exchange.
class Propagator {
 public:
  explicit Propagator(const Vec3& gravity) : gravity_(gravity) {}

  void publish(const StateSnapshot& snapshot) {
    auto next = std::make_shared<const StateSnapshot>(snapshot);
    std::lock_guard<std::mutex> lock(mutex_);
    snapshot_ = std::move(next);
  }

  std::shared_ptr<const StateSnapshot> snapshot() const {
    std::lock_guard<std::mutex> lock(mutex_);
    return snapshot_;
  }

  // Forward-integrates the samples (time-ordered, first at or after the
  // snapshot stamp) and returns the propagated state.
  NavState propagate(const std::vector<ImuMeasurement>& samples) const;

 private:
  mutable std::mutex mutex_;
  std::shared_ptr<const StateSnapshot> snapshot_;
  Vec3 gravity_;
};

}  // namespace gpsar::est
