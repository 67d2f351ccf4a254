#include <cmath>
#include <random>
#include <set>
#include <sstream>

#include "doctest.h"

#include "meatcut/contact/evaluate.hpp"
#include "meatcut/contact/experiment.hpp"
#include "meatcut/contact/forest.hpp"
#include "meatcut/contact/preprocess.hpp"
#include "meatcut/contact/sensor.hpp"
#include "meatcut/contact/split.hpp"
#include "meatcut/contact/synth.hpp"
#include "meatcut/error.hpp"

using namespace meatcut;
using namespace meatcut::contact;

namespace {

const char* kHeader = "t_ms,proximity,ax,ay,az,gx,gy,gz,mx,my,mz,contact\n";

Replicate gaussian_replicate(std::mt19937_64& rng, const std::string& id, CutType type, std::size_t n) {
  std::normal_distribution<double> g(0.0, 1.0);
  Replicate r{id, type, {}};
  for (std::size_t i = 0; i < n; ++i) {
    SensorSample s;
    s.t_ms = 10.0 * i;
    for (double& f : s.features) f = 3.0 + 2.0 * g(rng);
    s.contact = i % 3 == 0;
    r.samples.push_back(s);
  }
  return r;
}

Dataset separable(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Dataset d;
  for (std::size_t i = 0; i < n; ++i) {
    SensorSample s;
    for (double& f : s.features) f = u(rng);
    s.contact = s.features[0] + 0.5 * s.features[1] > 0.0;
    d.push(s, {0, std::uint32_t(i)});
  }
  return d;
}

}  // namespace

TEST_CASE("CSV parse and integrity") {
  std::ostringstream csv;
  csv << "# id: r1\n# cut_type: trimming\n" << kHeader;
  csv << "0,255,0,0,0,0,0,0,1,2,3,0\n10,200,0,0,0,0,0,0,1,2,3,0\n20,20,1,0,5,0,0,0,1,2,3,1\n";
  std::istringstream in(csv.str());
  const Replicate r = read_replicate(in, "r1.csv");
  CHECK(r.id == "r1");
  CHECK(r.cut_type == CutType::Trimming);
  REQUIRE(r.samples.size() == 3);
  CHECK(r.samples[2].contact == 1);
  CHECK(r.samples[2].features[3] == 5.0);

  std::ostringstream back;
  write_replicate(back, r);
  std::istringstream again(back.str());
  const Replicate r2 = read_replicate(again);
  CHECK(r2.samples.size() == 3);
  CHECK(r2.samples[1].features == r.samples[1].features);

  std::string shuffled = csv.str();
  shuffled.replace(shuffled.find("\n10,"), 4, "\n30,");
  std::istringstream bad(shuffled);
  try {
    read_replicate(bad, "bad.csv");
    FAIL("non-increasing timestamps accepted");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::Integrity);
  }
  std::istringstream no_preamble(std::string(kHeader) + "0,1,2,3,4,5,6,7,8,9,10,0\n");
  CHECK_THROWS_AS(read_replicate(no_preamble), Error);
  std::istringstream bad_contact(std::string("# id: x\n# cut_type: slicing\n") + kHeader + "0,1,2,3,4,5,6,7,8,9,10,2\n");
  CHECK_THROWS_AS(read_replicate(bad_contact), Error);
}

TEST_CASE("standardization statistics and spike removal") {
  std::mt19937_64 rng(1);
  const Replicate r = gaussian_replicate(rng, "a", CutType::Slicing, 400);
  PreprocessReport report;
  PreprocessOptions opts;
  opts.outlier_sd = 1e9;
  const auto z = preprocess(std::span(&r, 1), opts, &report);
  REQUIRE(z[0].samples.size() == 400);
  for (std::size_t f = 0; f < kFeatureCount; ++f) {
    double mean = 0.0, ss = 0.0, raw_mean = 0.0, raw_ss = 0.0;
    for (const auto& s : r.samples) raw_mean += s.features[f] / 400.0;
    for (const auto& s : r.samples) raw_ss += std::pow(s.features[f] - raw_mean, 2);
    const double sd = std::sqrt(raw_ss / 399.0);
    for (const auto& s : z[0].samples) mean += s.features[f] / 400.0;
    for (const auto& s : z[0].samples) ss += s.features[f] * s.features[f];
    CHECK(std::abs(mean) < 1e-9);
    CHECK(std::sqrt(ss / 399.0) == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(z[0].samples[7].features[f] == doctest::Approx((r.samples[7].features[f] - raw_mean) / sd));
  }

  // Constant feature: centered to zero, kept, warned about.
  Replicate flat = r;
  for (auto& s : flat.samples) s.features[4] = 7.0;
  const auto zf = preprocess(std::span(&flat, 1), {}, &report);
  CHECK_FALSE(report.warnings.empty());
  for (const auto& s : zf[0].samples) CHECK(s.features[4] == 0.0);

  // Planted spike far beyond the threshold.
  Replicate spiked = r;
  spiked.samples[123].features[2] = 3.0 + 2.0 * 60.0;
  const auto zs = preprocess(std::span(&spiked, 1), {}, &report);
  bool gone = true;
  for (const auto& s : zs[0].samples) gone = gone && s.t_ms != spiked.samples[123].t_ms;
  CHECK(gone);
  CHECK(report.removed_total >= 1);
  CHECK(report.removed[0] == spiked.samples.size() - zs[0].samples.size());
  CHECK_THROWS_AS(preprocess(std::span<const Replicate>{}), Error);
}

TEST_CASE("approaching-contact window") {
  Replicate r{"w", CutType::Cubing, {}};
  for (int t = 0; t <= 1200; t += 5) {
    SensorSample s;
    s.t_ms = t;
    s.contact = t >= 1000 && t < 1100;
    r.samples.push_back(s);
  }
  const Replicate a = label_approaching(r);
  auto label_at = [&](double t) {
    for (const auto& s : a.samples)
      if (s.t_ms == t) return s.contact;
    return -1;
  };
  CHECK(label_at(950) == 1);
  CHECK(label_at(990) == 1);
  CHECK(label_at(900) == 1);
  CHECK(label_at(995) == 0);
  CHECK(label_at(880) == 0);
  CHECK(label_at(1050) == -1);  // in contact: dropped
  CHECK(label_at(1150) == 0);
}

TEST_CASE("splits partition the data") {
  std::mt19937_64 rng(3);
  std::vector<Replicate> reps;
  for (int i = 0; i < 10; ++i) reps.push_back(gaussian_replicate(rng, "s" + std::to_string(i), CutType::Slicing, 100));
  for (int i = 0; i < 5; ++i) reps.push_back(gaussian_replicate(rng, "c" + std::to_string(i), CutType::Cubing, 80));

  for (SplitKind kind : {SplitKind::SWT, SplitKind::RWT, SplitKind::SAT}) {
    const auto parts = build_split(reps, {kind, 0.6, 5});
    CHECK(parts.size() == (kind == SplitKind::SAT ? 1u : 2u));
    std::set<SampleRef> seen;
    std::size_t count = 0;
    for (const SplitPart& p : parts) {
      for (const auto* d : {&p.train, &p.test}) {
        for (const SampleRef& ref : d->refs) seen.insert(ref);
        count += d->size();
      }
      std::set<SampleRef> train(p.train.refs.begin(), p.train.refs.end());
      for (const SampleRef& ref : p.test.refs) CHECK_FALSE(train.count(ref));
    }
    CHECK(count == 1400);
    CHECK(seen.size() == 1400);
    CHECK(build_split(reps, {kind, 0.6, 5})[0].train.refs == parts[0].train.refs);
  }

  const auto swt = build_split(reps, {SplitKind::SWT, 0.6, 1});
  CHECK(swt[0].label == "slicing");
  CHECK(swt[0].train.size() == 600);
  CHECK(swt[0].test.size() == 400);

  const auto rwt = build_split(reps, {SplitKind::RWT, 0.6, 1});
  CHECK(rwt[0].train_replicates.size() == 6);
  CHECK(rwt[0].test_replicates.size() == 4);
  for (const SplitPart& p : rwt) {
    std::set<std::uint32_t> train_ids, test_ids;
    for (const SampleRef& r : p.train.refs) train_ids.insert(r.replicate);
    for (const SampleRef& r : p.test.refs) CHECK_FALSE(train_ids.count(r.replicate));
  }

  std::vector<Replicate> lonely{reps[0], reps[10]};
  try {
    build_split(lonely, {SplitKind::RWT, 0.6, 1});
    FAIL("single-replicate RWT accepted");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::InfeasibleSplit);
  }
  CHECK_THROWS_AS(build_split(reps, {SplitKind::SWT, 1.0, 1}), Error);
}

TEST_CASE("forest fits separable data, is deterministic and round-trips") {
  const Dataset train = separable(400, 1);
  ForestParams params{50, 3, 9, 4};
  const ForestModel m = train_forest(train, params);
  CHECK(m.trees.size() == 50);
  CHECK(evaluate(m, train).error_rate() == 0.0);
  CHECK(evaluate(m, separable(400, 2)).error_rate() < 0.1);

  params.threads = 1;
  const ForestModel single = train_forest(train, params);
  std::ostringstream a, b;
  save_forest(a, m);
  save_forest(b, single);
  CHECK(a.str() == b.str());

  std::istringstream in(a.str());
  const ForestModel loaded = load_forest(in);
  const Dataset probe = separable(200, 3);
  for (const auto& x : probe.x) CHECK(loaded.predict(x) == m.predict(x));

  // Reversing tree order changes no prediction.
  ForestModel reversed = m;
  std::reverse(reversed.trees.begin(), reversed.trees.end());
  for (const auto& x : probe.x) CHECK(reversed.predict(x) == m.predict(x));

  Dataset one_class = train;
  for (int& y : one_class.y) y = 1;
  try {
    train_forest(one_class, params);
    FAIL("single-class data accepted");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::DegenerateModel);
  }
  CHECK_THROWS_AS(train_forest(train, {10, 11, 0, 1}), Error);
}

TEST_CASE("out-of-bag error tracks holdout error") {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> g(0.0, 1.0);
  auto noisy = [&](std::size_t n) {
    Dataset d;
    for (std::size_t i = 0; i < n; ++i) {
      SensorSample s;
      for (double& f : s.features) f = g(rng);
      s.contact = s.features[0] + 0.8 * g(rng) > 0.0;
      d.push(s, {0, std::uint32_t(i)});
    }
    return d;
  };
  const Dataset train = noisy(1500);
  const ForestModel m = train_forest(train, {200, 3, 2, 0});
  const double holdout = evaluate(m, noisy(1500)).error_rate();
  CHECK(std::abs(m.oob_error - holdout) < 0.02);
}

TEST_CASE("mtry tuning") {
  const Dataset train = separable(300, 4);
  Dataset one_class = train;
  for (int& y : one_class.y) y = 0;
  const MtryTuning flat = tune_mtry(one_class, 1);
  CHECK(flat.best == 2);
  for (const auto& [mtry, oob] : flat.oob_by_mtry) CHECK(oob == 0.0);
  const std::vector<int> candidates{2, 4, 6};
  const MtryTuning t = tune_mtry(train, candidates, 1, 30);
  CHECK(t.oob_by_mtry.size() == 3);
  double best = 1.0;
  for (const auto& [mtry, oob] : t.oob_by_mtry) best = std::min(best, oob);
  for (const auto& [mtry, oob] : t.oob_by_mtry)
    if (mtry == t.best) CHECK(oob == best);
}

TEST_CASE("published table rows follow the error-rate formula") {
  struct Row {
    std::uint64_t fp, fn, total;
    double printed;  // as printed in the table
    bool fraction;   // approaching rows print the fraction, not the percentage
  };
  const Row rows[] = {
      {86, 168, 13670, 1.86, false},  {143, 300, 11998, 3.69, false}, {236, 328, 18779, 3.00, false},
      {30, 304, 8123, 4.11, false},   {147, 79, 11948, 1.89, false},  {826, 779, 16769, 9.57, false},
      {802, 1148, 44090, 4.42, false}, {0, 88, 13438, 0.007, true},   {2, 91, 12135, 0.008, true},
      {0, 108, 18924, 0.006, true},   {0, 87, 8123, 0.011, true},     {0, 17, 12135, 0.001, true},
      {0, 133, 16769, 0.008, true},   {5, 305, 44448, 0.007, true},
  };
  for (const Row& r : rows) {
    const double rate = error_rate(r.fp, r.fn, r.total);
    const double shown = r.fraction ? rate : 100.0 * rate;
    const double step = r.fraction ? 0.001 : 0.01;
    CHECK(std::abs(shown - r.printed) <= 0.5 * step + 1e-12);
  }
  ConfusionStats s{86, 168, 0, 13670 - 254};
  CHECK(s.error_rate() == (86.0 + 168.0) / 13670.0);
  CHECK(error_rate(0, 0, 0) == 0.0);
}

TEST_CASE("report formatting") {
  std::vector<ReportRow> rows{{"SWT", "slicing", {86, 168, 100, 13316}}};
  std::ostringstream out;
  write_report(out, rows);
  CHECK(out.str().find("1.86%") != std::string::npos);
  CHECK(out.str().find("13670") != std::string::npos);
}

TEST_CASE("noise-free synthetic stream follows the planted intervals") {
  SynthSpec spec;
  spec.id = "z";
  spec.duration_ms = 3000.0;
  spec.contacts = {{1000.0, 1500.0, 30.0}, {2200.0, 2600.0, 0.0}};
  spec.noise = {0.0, 0.0, 0.0};
  const Replicate r = synth_sensor_stream(spec, 7);
  REQUIRE(r.samples.size() == 300);
  for (const auto& s : r.samples) {
    const double t = s.t_ms;
    const bool held = (t >= 1000 && t < 1530) || (t >= 2200 && t < 2600);
    CHECK(s.contact == int(held));
    const bool touching = (t >= 1000 && t < 1500) || (t >= 2200 && t < 2600);
    if (touching) CHECK(s.features[0] == spec.signal.proximity_contact);
    if (t < 1000 - spec.signal.descent_ms) CHECK(s.features[0] == spec.signal.proximity_far);
    if (t < 1000 - spec.signal.descent_ms) CHECK(s.features[5] == 0.0);
    for (std::size_t f = 7; f < 10; ++f) CHECK(s.features[f] == 0.0);
  }
  CHECK(synth_sensor_stream(spec, 7).samples[150].features == r.samples[150].features);

  SynthSpec overlap = spec;
  overlap.contacts = {{1000.0, 1500.0, 100.0}, {1550.0, 1700.0, 0.0}};
  try {
    synth_sensor_stream(overlap, 1);
    FAIL("overlapping intervals accepted");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::Spec);
  }
  SynthSpec outside = spec;
  outside.contacts = {{2900.0, 3100.0, 0.0}};
  CHECK_THROWS_AS(synth_sensor_stream(outside, 1), Error);
}

TEST_CASE("small end-to-end experiment") {
  CorpusSpec corpus;
  corpus.replicates_per_type = {3, 3, 3};
  corpus.mean_duration_ms = 4000.0;
  corpus.seed = 2;
  const auto reps = synth_corpus(corpus);
  CHECK(reps.size() == 9);
  ExperimentOptions opts;
  opts.forest = {60, 4, 3, 0};
  const ExperimentResult res = run_experiment(reps, opts);
  CHECK(res.parts.size() == 3);
  CHECK(res.rows("SWT").size() == 4);
  CHECK(res.pooled.total() == res.parts[0].stats.total() + res.parts[1].stats.total() + res.parts[2].stats.total());
  CHECK(res.pooled.error_rate() < 0.1);
}
