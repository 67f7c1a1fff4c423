#include "gpsar/core/pose3.hpp"

// Pose3 is header-only; this TU anchors the target.
