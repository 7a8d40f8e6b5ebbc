#pragma once

#include <cstdint>

#include "leadframe/panel.hpp"

namespace leadframe {

/// SplitMix64 (Steele, Lea, Flood 2014). State advances by the golden-ratio
/// increment 0x9E3779B97F4A7C15; each output is the state passed through
///   z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9
///   z = (z ^ (z >> 27)) * 0x94D049BB133111EB
///   z =  z ^ (z >> 31)
/// Every derived draw below is defined in terms of next() only, so panels are
/// reproducible across platforms and standard libraries.
class SplitMix64 {
public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next();

  /// Uniform in [0, 1) with 53 bits: (next() >> 11) * 2^-53.
  double uniform();

  /// Uniform integer in [0, bound) by rejection of the biased tail.
  std::uint64_t below(std::uint64_t bound);

  /// Knuth's product-of-uniforms method, applied in chunks of mean <= 16
  /// (Poisson variables are additive).
  std::uint64_t poisson(double mean);

  static std::uint64_t mix(std::uint64_t z);

private:
  std::uint64_t state_;
};

/// Independent stream for entity `index`: seeded with mix(seed + (index + 1) * 0x9E3779B97F4A7C15).
SplitMix64 entity_stream(std::uint64_t seed, std::uint64_t index);

struct SynthConfig {
  std::int64_t n_entities = 500;
  std::int64_t n_periods = 24;
  double event_rate = 0.3;
  std::int64_t ramp_length = 3;
  double signal_strength = 3.0;
  double noise_rate = 0.5;
  std::uint64_t seed = 7;

  void validate() const;
};

/// The five customer columns shared by the synthetic generator and the
/// bundled example panel.
PanelSchema default_schema();

/// Entity i (ids "E0000"...) draws, in order: the event coin, the event
/// period T uniform in [ramp_length + 1, n_periods] for event entities, then
/// per period 1..last the five feature counts. Ramp periods [T - ramp_length,
/// T - 1] use mean noise_rate + signal_strength, all others noise_rate.
PanelDataset generate_panel(const SynthConfig& config);

}  // namespace leadframe
