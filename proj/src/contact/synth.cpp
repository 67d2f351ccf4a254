#include "meatcut/contact/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <numeric>
#include <random>

#include "meatcut/error.hpp"

namespace meatcut::contact {

namespace {

enum Feature { kProx, kAx, kAy, kAz, kGx, kGy, kGz, kMx, kMy, kMz };

std::vector<ContactInterval> checked_intervals(const SynthSpec& spec) {
  if (!(spec.duration_ms > 0.0) || !(spec.period_ms > 0.0)) {
    throw Error(Errc::Spec, "duration and period must be positive");
  }
  std::vector<ContactInterval> iv = spec.contacts;
  std::sort(iv.begin(), iv.end(), [](auto& a, auto& b) { return a.start_ms < b.start_ms; });
  for (std::size_t i = 0; i < iv.size(); ++i) {
    if (!(iv[i].end_ms > iv[i].start_ms)) throw Error(Errc::Spec, "contact interval must have end > start");
    if (!(iv[i].release_lag_ms >= 0.0)) throw Error(Errc::Spec, "release lag must be non-negative");
    if (iv[i].start_ms < 0.0 || iv[i].label_end_ms() > spec.duration_ms) {
      throw Error(Errc::Spec, "contact interval outside the replicate duration");
    }
    if (i > 0 && iv[i].start_ms < iv[i - 1].label_end_ms()) throw Error(Errc::Spec, "contact intervals overlap");
  }
  return iv;
}

}  // namespace

Replicate synth_sensor_stream(const SynthSpec& spec, std::uint64_t seed) {
  const std::vector<ContactInterval> iv = checked_intervals(spec);
  const SignalProfile& sig = spec.signal;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);

  std::array<double, 3> mag_offset{};
  for (double& m : mag_offset) m = spec.drift.offset_sd * gauss(rng);
  const double contact_level = sig.proximity_contact + spec.drift.contact_level_sd * gauss(rng);
  std::array<double, 4> walk{};  // mx, my, mz, gz

  Replicate rep{spec.id, spec.cut_type, {}};
  std::size_t next = 0;  // first interval not yet finished
  for (long k = 0;; ++k) {
    const double t = static_cast<double>(k) * spec.period_ms;
    if (t >= spec.duration_ms) break;
    while (next < iv.size() && t >= iv[next].label_end_ms()) ++next;

    Features f{};
    f[kProx] = sig.proximity_far;
    const int contact = next < iv.size() && t >= iv[next].start_ms ? 1 : 0;
    const bool inside = contact == 1 && t < iv[next].end_ms;
    if (inside) {
      const double since = t - iv[next].start_ms;
      const double phase = 2.0 * std::numbers::pi * sig.saw_hz * since / 1000.0;
      f[kProx] = contact_level;
      f[kAz] = sig.impact_accel * std::exp(-since / sig.impact_decay_ms);
      f[kAx] = sig.saw_amplitude * std::sin(phase);
      f[kGy] = sig.saw_amplitude * std::cos(phase);
    } else {
      // A held button means physical contact ended within the current interval.
      const double since_end = contact ? t - iv[next].end_ms : next > 0 ? t - iv[next - 1].end_ms : INFINITY;
      const std::size_t upcoming = contact ? next + 1 : next;
      const double until_onset = upcoming < iv.size() ? iv[upcoming].start_ms - t : INFINITY;
      if (since_end < sig.retreat_ms) {
        const double u = since_end / sig.retreat_ms;
        f[kProx] = sig.proximity_near + (sig.proximity_edge - sig.proximity_near) * u;
        f[kGx] = sig.descent_rate;
        f[kAz] = sig.descent_accel - 0.5 * sig.impact_accel * std::exp(-since_end / sig.impact_decay_ms);
      } else if (until_onset <= sig.descent_ms) {
        f[kGx] = -sig.descent_rate;
        f[kAz] = -sig.descent_accel;
        if (until_onset <= sig.range_ms) {
          const double u = until_onset / sig.range_ms;
          f[kProx] = sig.proximity_near + (sig.proximity_edge - sig.proximity_near) * u;
        }
      }
    }

    for (double& w : walk) w += spec.drift.walk_sd * gauss(rng);
    f[kMx] = mag_offset[0] + walk[0];
    f[kMy] = mag_offset[1] + walk[1];
    f[kMz] = mag_offset[2] + walk[2];
    f[kGz] += walk[3];

    if (spec.noise.proximity > 0.0) f[kProx] += spec.noise.proximity * gauss(rng);
    if (spec.noise.imu > 0.0) {
      for (int j : {kAx, kAy, kAz, kGx, kGy, kGz}) f[j] += spec.noise.imu * gauss(rng);
    }
    if (spec.noise.mag > 0.0) {
      for (int j : {kMx, kMy, kMz}) f[j] += spec.noise.mag * gauss(rng);
    }
    rep.samples.push_back({t, f, contact});
  }
  return rep;
}

std::vector<Replicate> synth_corpus(const CorpusSpec& spec) {
  if (spec.min_contacts < 1 || spec.max_contacts < spec.min_contacts) {
    throw Error(Errc::Spec, "contact count range is empty");
  }
  if (!(spec.contact_fraction > 0.0 && spec.contact_fraction < 1.0)) {
    throw Error(Errc::Spec, "contact fraction must lie in (0, 1)");
  }
  std::mt19937_64 rng(spec.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  auto round10 = [](double v) { return 10.0 * std::round(v / 10.0); };

  std::vector<Replicate> out;
  for (std::size_t ti = 0; ti < kCutTypes.size(); ++ti) {
    for (int r = 0; r < spec.replicates_per_type[ti]; ++r) {
      SynthSpec s;
      char id[64];
      std::snprintf(id, sizeof id, "%s-%02d", std::string(to_string(kCutTypes[ti])).c_str(), r + 1);
      s.id = id;
      s.cut_type = kCutTypes[ti];
      s.signal = spec.signal;
      s.noise = spec.noise;
      s.drift = spec.drift;
      s.duration_ms = round10(spec.mean_duration_ms * (1.0 + spec.duration_jitter * (2.0 * unit(rng) - 1.0)));

      const int k = spec.min_contacts +
                    static_cast<int>(unit(rng) * (spec.max_contacts - spec.min_contacts + 1) - 1e-12);
      std::vector<double> on(static_cast<std::size_t>(k)), off(static_cast<std::size_t>(k + 1));
      for (double& w : on) w = 0.7 + 0.6 * unit(rng);
      for (double& w : off) w = 0.7 + 0.6 * unit(rng);
      const double on_sum = std::accumulate(on.begin(), on.end(), 0.0);
      const double off_sum = std::accumulate(off.begin(), off.end(), 0.0);
      const double contact_total = spec.contact_fraction * s.duration_ms;
      const double idle_total = s.duration_ms - contact_total;
      double t = 0.0;
      for (int c = 0; c < k; ++c) {
        t += idle_total * off[static_cast<std::size_t>(c)] / off_sum;
        const double start = round10(t);
        t += contact_total * on[static_cast<std::size_t>(c)] / on_sum;
        const double lag = round10(spec.max_release_lag_ms * unit(rng));
        s.contacts.push_back({start, round10(t) - lag, lag});
      }
      const std::uint64_t stream_seed = rng();
      out.push_back(synth_sensor_stream(s, stream_seed));
    }
  }
  return out;
}

}  // namespace meatcut::contact
