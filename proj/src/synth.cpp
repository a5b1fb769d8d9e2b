#include "usdr/synth.hpp"

#include "usdr/error.hpp"

#include <cmath>
#include <random>
#include <string>

namespace usdr {

namespace {

std::vector<std::string> feature_names(std::size_t d) {
  std::vector<std::string> names;
  for (std::size_t k = 0; k < d; ++k) names.push_back("x" + std::to_string(k));
  return names;
}

// Per-feature AR(1) state started from its stationary distribution.
class ArNoise {
 public:
  ArNoise(std::size_t d, double coeff, double noise, std::mt19937_64& rng)
      : coeff_(coeff), noise_(noise), state_(static_cast<Eigen::Index>(d)), rng_(rng) {
    const double sd = noise / std::sqrt(1.0 - coeff * coeff);
    for (Eigen::Index k = 0; k < state_.size(); ++k) state_(k) = sd * normal_(rng_);
  }

  const Vector& state() const { return state_; }

  void step() {
    for (Eigen::Index k = 0; k < state_.size(); ++k)
      state_(k) = coeff_ * state_(k) + noise_ * normal_(rng_);
  }

 private:
  double coeff_;
  double noise_;
  Vector state_;
  std::mt19937_64& rng_;
  std::normal_distribution<double> normal_{0.0, 1.0};
};

}  // namespace

void validate(const AbruptConfig& cfg) {
  if (cfg.n_features < 1) throw Error(Errc::InvalidArgument, "n_features must be >= 1");
  std::size_t total = 0;
  bool any_normal = false;
  for (const auto& s : cfg.segments) {
    total += s.length;
    any_normal |= s.kind == SegmentKind::Normal && s.length > 0;
  }
  if (total < 1) throw Error(Errc::InvalidArgument, "segments must cover at least one sample");
  if (!any_normal) throw Error(Errc::InvalidArgument, "at least one normal segment is required");
  if (!(cfg.shift >= 0.0)) throw Error(Errc::InvalidArgument, "shift must be >= 0");
  if (!(cfg.noise >= 0.0)) throw Error(Errc::InvalidArgument, "noise must be >= 0");
  if (!(cfg.ar_coeff >= 0.0 && cfg.ar_coeff < 1.0))
    throw Error(Errc::InvalidArgument, "ar_coeff must lie in [0,1)");
  if (!(cfg.fault_noise_gain >= 0.0))
    throw Error(Errc::InvalidArgument, "fault_noise_gain must be >= 0");
}

void validate(const DegradationConfig& cfg) {
  if (cfg.n_features < 1) throw Error(Errc::InvalidArgument, "n_features must be >= 1");
  if (cfg.n < 10) throw Error(Errc::InvalidArgument, "degradation series needs n >= 10");
  if (!(cfg.knee > 0.0 && cfg.knee < 1.0))
    throw Error(Errc::InvalidArgument, "knee must lie in (0,1)");
  if (!(cfg.noise >= 0.0)) throw Error(Errc::InvalidArgument, "noise must be >= 0");
  if (!(cfg.ar_coeff >= 0.0 && cfg.ar_coeff < 1.0))
    throw Error(Errc::InvalidArgument, "ar_coeff must lie in [0,1)");
}

std::vector<int> segment_labels(const std::vector<Segment>& segments) {
  std::vector<int> labels;
  for (const auto& s : segments)
    labels.insert(labels.end(), s.length, s.kind == SegmentKind::Fault ? 1 : 0);
  return labels;
}

Dataset gen_abrupt(const AbruptConfig& cfg) {
  validate(cfg);
  const auto d = static_cast<Eigen::Index>(cfg.n_features);
  std::mt19937_64 rng(cfg.seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::bernoulli_distribution coin(0.5);

  Vector baseline(d), sign(d);
  for (Eigen::Index k = 0; k < d; ++k) baseline(k) = normal(rng);
  for (Eigen::Index k = 0; k < d; ++k) sign(k) = coin(rng) ? 1.0 : -1.0;

  const auto labels = segment_labels(cfg.segments);
  const auto n = static_cast<Eigen::Index>(labels.size());
  Dataset out;
  out.inputs.resize(n, d);
  ArNoise ar(cfg.n_features, cfg.ar_coeff, cfg.noise, rng);
  for (Eigen::Index i = 0; i < n; ++i) {
    if (i > 0) ar.step();
    if (labels[static_cast<std::size_t>(i)] == 1)
      out.inputs.row(i) = (baseline + cfg.shift * sign + cfg.fault_noise_gain * ar.state()).transpose();
    else
      out.inputs.row(i) = (baseline + ar.state()).transpose();
  }
  out.targets = out.inputs;
  out.labels = labels;
  out.feature_names = feature_names(cfg.n_features);
  return out;
}

std::vector<double> health_curve(const DegradationConfig& cfg) {
  validate(cfg);
  const auto plateau = static_cast<std::size_t>(std::llround(cfg.knee * static_cast<double>(cfg.n)));
  std::vector<double> h(cfg.n, 1.0);
  const double span = static_cast<double>(cfg.n - plateau);
  for (std::size_t i = plateau; i < cfg.n; ++i) {
    const double s = static_cast<double>(i - plateau + 1) / span;
    h[i] = cfg.shape == DegradationShape::Linear
               ? 1.0 - s
               : 1.0 - std::expm1(kExponentialRate * s) / std::expm1(kExponentialRate);
  }
  h.back() = 0.0;
  return h;
}

Dataset gen_degradation(const DegradationConfig& cfg) {
  const auto h = health_curve(cfg);
  const auto d = static_cast<Eigen::Index>(cfg.n_features);
  std::mt19937_64 rng(cfg.seed);
  std::normal_distribution<double> normal(0.0, 1.0);

  Vector baseline(d), direction(d);
  for (Eigen::Index k = 0; k < d; ++k) baseline(k) = normal(rng);
  for (Eigen::Index k = 0; k < d; ++k) direction(k) = normal(rng);
  direction.normalize();

  Dataset out;
  const auto n = static_cast<Eigen::Index>(cfg.n);
  out.inputs.resize(n, d);
  ArNoise ar(cfg.n_features, cfg.ar_coeff, cfg.noise, rng);
  for (Eigen::Index i = 0; i < n; ++i) {
    if (i > 0) ar.step();
    const double drift = cfg.effect * (1.0 - h[static_cast<std::size_t>(i)]);
    out.inputs.row(i) = (baseline + drift * direction + ar.state()).transpose();
  }
  out.targets = out.inputs;
  out.health = h;
  out.feature_names = feature_names(cfg.n_features);
  return out;
}

}  // namespace usdr
