#include "gpsar/estimator/propagation.hpp"

namespace gpsar::est {

NavState Propagator::propagate(const std::vector<ImuMeasurement>& samples) const {
  const auto snap = snapshot();
  if (!snap) {
    throw NumericalError("no state snapshot published yet");
  }
  NavState x = snap->state;
  if (samples.size() < 2) return x;

  const Vec3 ba = snap->bias.head<3>();
  const Vec3 bg = snap->bias.tail<3>();
  Rot3 r = x.rotation;
  Vec3 v = x.velocity;
  Vec3 p = x.position;
  for (size_t k = 0; k + 1 < samples.size(); ++k) {
    ImuStepInput step{samples[k].accel - ba, samples[k + 1].accel - ba,
                      samples[k].gyro - bg, samples[k + 1].gyro - bg,
                      samples[k + 1].t - samples[k].t};
    imu_forward_step(step, gravity_, &r, &v, &p);
  }
  x.rotation = r;
  x.velocity = v;
  x.position = p;
  x.t = samples.back().t;
  return x;
}

}  // namespace gpsar::est
