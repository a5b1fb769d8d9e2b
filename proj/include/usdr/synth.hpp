#pragma once

#include "usdr/dataset.hpp"

#include <cstdint>
#include <vector>

namespace usdr {

enum class SegmentKind { Normal, Fault };

struct Segment {
  SegmentKind kind;
  std::size_t length;
};

// Concatenated normal/fault regimes. Each feature is an AR(1) process
// e_t = ar_coeff * e_{t-1} + noise * eps_t around a per-feature baseline;
// fault samples add shift * sign_k to the mean and scale e_t by
// fault_noise_gain. Labels are 1 exactly on fault segments.
struct AbruptConfig {
  std::size_t n_features = 40;
  std::vector<Segment> segments;
  double shift = 0.5;
  double noise = 1.0;
  double ar_coeff = 0.0;
  double fault_noise_gain = 1.5;
  std::uint64_t seed = 0;
};

enum class DegradationShape { Linear, Exponential };

// Healthy plateau of round(knee * n) samples (h = 1), then a decline to
// h = 0 at the last sample. Features drift along one unit direction by
// effect * (1 - h) on top of AR(1) noise.
struct DegradationConfig {
  std::size_t n_features = 19;
  std::size_t n = 1000;
  double knee = 0.2;
  double effect = 80.0;
  DegradationShape shape = DegradationShape::Exponential;
  double noise = 1.0;
  double ar_coeff = 0.0;
  std::uint64_t seed = 0;
};

// Curvature of the exponential decline: h = 1 - expm1(k s) / expm1(k).
inline constexpr double kExponentialRate = 3.0;

void validate(const AbruptConfig& cfg);
void validate(const DegradationConfig& cfg);

Dataset gen_abrupt(const AbruptConfig& cfg);
Dataset gen_degradation(const DegradationConfig& cfg);

// Health trajectory only; independent of the noise draws.
std::vector<double> health_curve(const DegradationConfig& cfg);

std::vector<int> segment_labels(const std::vector<Segment>& segments);

}  // namespace usdr
