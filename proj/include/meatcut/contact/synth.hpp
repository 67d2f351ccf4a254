#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "meatcut/contact/sensor.hpp"

namespace meatcut::contact {

/// Physical contact over [start_ms, end_ms). The ground-truth button is
/// released `release_lag_ms` later, so the contact column reads 1 over
/// [start_ms, end_ms + release_lag_ms).
struct ContactInterval {
  double start_ms = 0.0;
  double end_ms = 0.0;
  double release_lag_ms = 0.0;

  double label_end_ms() const { return end_ms + release_lag_ms; }
};

/// Noise-free shape of the planted signatures.
struct SignalProfile {
  double proximity_far = 255.0;     ///< out-of-range reading
  double proximity_edge = 200.0;    ///< reading when the board enters range
  double proximity_near = 60.0;     ///< reading just before contact
  double proximity_contact = 20.0;  ///< reading while in contact
  double range_ms = 105.0;          ///< how long before onset the meat is in range
  double descent_ms = 300.0;        ///< downward motion before onset
  double retreat_ms = 60.0;         ///< upward motion after contact ends
  double descent_rate = 8.0;        ///< gx magnitude while descending / retreating
  double descent_accel = 4.0;       ///< az magnitude while descending / retreating
  double impact_accel = 15.0;       ///< az spike at onset
  double impact_decay_ms = 30.0;
  double saw_amplitude = 3.0;  ///< ax / gy oscillation while in contact
  double saw_hz = 3.0;
};

struct NoiseProfile {
  double proximity = 1.5;
  double imu = 0.6;
  double mag = 0.5;
};

/// Replicate-level nuisance: constant offsets and slow random walks that differ
/// between replicates, so a model can memorize a replicate without learning
/// the contact signature.
struct DriftProfile {
  double offset_sd = 0.0;         ///< per-replicate offset of mx, my, mz
  double walk_sd = 0.0;           ///< per-sample random-walk step of mx, my, mz and gz
  double contact_level_sd = 0.0;  ///< per-replicate shift of proximity_contact
};

struct SynthSpec {
  std::string id;
  CutType cut_type = CutType::Slicing;
  double duration_ms = 0.0;
  double period_ms = 10.0;
  std::vector<ContactInterval> contacts;
  SignalProfile signal;
  NoiseProfile noise;
  DriftProfile drift;
};

/// Samples at t = 0, period, 2*period, ... < duration. Throws Errc::Spec for
/// empty or overlapping intervals (button release included), intervals
/// outside the duration, a negative lag, or a non-positive period or duration.
Replicate synth_sensor_stream(const SynthSpec& spec, std::uint64_t seed);

struct CorpusSpec {
  std::array<int, 3> replicates_per_type{8, 9, 9};  ///< slicing, trimming, cubing
  double mean_duration_ms = 14620.0;
  double duration_jitter = 0.05;  ///< relative, uniform
  double contact_fraction = 0.70;
  int min_contacts = 3;
  int max_contacts = 6;
  double max_release_lag_ms = 120.0;  ///< uniform in [0, max], whole periods
  SignalProfile signal;
  NoiseProfile noise;
  DriftProfile drift{20.0, 0.4, 8.0};
  std::uint64_t seed = 0;
};

std::vector<Replicate> synth_corpus(const CorpusSpec& spec);

}  // namespace meatcut::contact
