#include "leadframe/synth.hpp"

#include <cmath>
#include <string>

#include "leadframe/errors.hpp"

namespace leadframe {

namespace {
constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;
constexpr double kPoissonChunk = 16.0;
}  // namespace

std::uint64_t SplitMix64::mix(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

std::uint64_t SplitMix64::next() {
  state_ += kGolden;
  return mix(state_);
}

double SplitMix64::uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

std::uint64_t SplitMix64::below(std::uint64_t bound) {
  if (bound == 0) throw Error(ErrorKind::InvalidConfig, "empty range");
  // Largest multiple of bound representable; draws at or above it are rejected.
  const std::uint64_t limit = (~std::uint64_t{0}) - ((~std::uint64_t{0}) % bound);
  std::uint64_t r;
  do {
    r = next();
  } while (r >= limit);
  return r % bound;
}

std::uint64_t SplitMix64::poisson(double mean) {
  std::uint64_t total = 0;
  double remaining = mean;
  while (remaining > 0.0) {
    const double chunk = std::min(remaining, kPoissonChunk);
    remaining -= chunk;
    const double floor_p = std::exp(-chunk);
    double p = 1.0;
    std::uint64_t k = 0;
    while (true) {
      p *= uniform();
      if (p <= floor_p) break;
      ++k;
    }
    total += k;
  }
  return total;
}

SplitMix64 entity_stream(std::uint64_t seed, std::uint64_t index) {
  return SplitMix64(SplitMix64::mix(seed + (index + 1) * kGolden));
}

void SynthConfig::validate() const {
  auto fail = [](const std::string& what) { throw Error(ErrorKind::InvalidConfig, what); };
  if (n_entities < 1) fail("n_entities must be positive");
  if (n_periods < 1) fail("n_periods must be positive");
  if (!(event_rate > 0.0 && event_rate < 1.0)) fail("event_rate must lie strictly between 0 and 1");
  if (ramp_length < 1) fail("ramp_length must be positive");
  if (ramp_length >= n_periods) fail("ramp_length must be smaller than n_periods");
  if (!(signal_strength >= 0.0) || !std::isfinite(signal_strength)) {
    fail("signal_strength must be a non-negative finite number");
  }
  if (!(noise_rate >= 0.0) || !std::isfinite(noise_rate)) {
    fail("noise_rate must be a non-negative finite number");
  }
}

PanelSchema default_schema() {
  return {"customer",
          "period",
          "churn",
          {"outbound_calls", "complaints", "service_interruptions", "fault_resolution_time",
           "promotions_offered"}};
}

PanelDataset generate_panel(const SynthConfig& config) {
  config.validate();
  PanelDataset dataset;
  dataset.schema = default_schema();
  const std::size_t n_features = dataset.schema.feature_columns.size();

  const std::size_t width = std::max<std::size_t>(4, std::to_string(config.n_entities - 1).size());

  for (std::int64_t i = 0; i < config.n_entities; ++i) {
    SplitMix64 rng = entity_stream(config.seed, static_cast<std::uint64_t>(i));
    std::string id = std::to_string(i);
    id = "E" + std::string(width - id.size(), '0') + id;

    const bool is_event = rng.uniform() < config.event_rate;
    std::int64_t event_period = 0;
    if (is_event) {
      const auto span = static_cast<std::uint64_t>(config.n_periods - config.ramp_length);
      event_period = config.ramp_length + 1 + static_cast<std::int64_t>(rng.below(span));
    }
    const std::int64_t last = is_event ? event_period : config.n_periods;

    for (std::int64_t p = 1; p <= last; ++p) {
      const bool in_ramp =
          is_event && p >= event_period - config.ramp_length && p <= event_period - 1;
      const double mean = config.noise_rate + (in_ramp ? config.signal_strength : 0.0);
      PanelRecord rec;
      rec.entity_id = id;
      rec.period = {p, std::to_string(p)};
      rec.features.reserve(n_features);
      for (std::size_t k = 0; k < n_features; ++k) {
        rec.features.push_back(static_cast<double>(rng.poisson(mean)));
      }
      rec.event_flag = (is_event && p == event_period) ? 1 : 0;
      dataset.records.push_back(std::move(rec));
    }
  }
  return dataset;
}

}  // namespace leadframe
