#include "meatcut/contact/forest.hpp"

#include <algorithm>
#include <cstdlib>
#include <istream>
#include <numeric>
#include <ostream>
#include <random>
#include <string>
#include <thread>

#include "meatcut/error.hpp"

namespace meatcut::contact {

int DecisionTree::predict(const Features& x) const {
  const TreeNode* n = &nodes.front();
  while (!n->leaf()) n = &nodes[static_cast<std::size_t>(x[n->feature] <= n->threshold ? n->left : n->right)];
  return n->counts[1] > n->counts[0] ? 1 : 0;
}

std::array<int, 2> ForestModel::votes(const Features& x) const {
  std::array<int, 2> v{};
  for (const DecisionTree& t : trees) ++v[t.predict(x)];
  return v;
}

int ForestModel::predict(const Features& x) const {
  const auto v = votes(x);
  return v[1] > v[0] ? 1 : 0;
}

namespace {

std::uint64_t splitmix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Column-major copy of the training rows plus each feature's sort order.
struct Columns {
  std::size_t n = 0;
  std::array<std::vector<double>, kFeatureCount> col;
  std::array<std::vector<std::uint32_t>, kFeatureCount> order;
  std::vector<std::uint8_t> y;

  explicit Columns(const Dataset& d) : n(d.size()), y(d.y.begin(), d.y.end()) {
    for (std::size_t f = 0; f < kFeatureCount; ++f) {
      col[f].resize(n);
      for (std::size_t i = 0; i < n; ++i) col[f][i] = d.x[i][f];
      order[f].resize(n);
      std::iota(order[f].begin(), order[f].end(), 0U);
      std::stable_sort(order[f].begin(), order[f].end(),
                       [&](std::uint32_t a, std::uint32_t b) { return col[f][a] < col[f][b]; });
    }
  }
};

// Scratch space reused across the trees one worker grows.
struct Grower {
  const Columns& data;
  int mtry;
  std::array<std::vector<std::uint32_t>, kFeatureCount> idx;
  std::vector<std::uint32_t> scratch;
  std::vector<std::uint8_t> goes_left;
  std::vector<std::uint32_t> inbag;

  Grower(const Columns& d, int m) : data(d), mtry(m), scratch(d.n), goes_left(d.n), inbag(d.n) {
    for (auto& v : idx) v.resize(d.n);
  }

  DecisionTree grow(std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    const std::size_t n = data.n;
    std::fill(inbag.begin(), inbag.end(), 0U);
    std::uniform_int_distribution<std::size_t> pick(0, n - 1);
    for (std::size_t k = 0; k < n; ++k) ++inbag[pick(rng)];
    for (std::size_t f = 0; f < kFeatureCount; ++f) {
      std::size_t w = 0;
      for (std::uint32_t i : data.order[f]) {
        for (std::uint32_t c = 0; c < inbag[i]; ++c) idx[f][w++] = i;
      }
    }

    DecisionTree tree;
    struct Pending {
      int node;
      std::size_t lo, hi;
    };
    std::vector<Pending> stack{{0, 0, n}};
    tree.nodes.emplace_back();
    std::array<int, kFeatureCount> features;
    std::iota(features.begin(), features.end(), 0);

    while (!stack.empty()) {
      const Pending p = stack.back();
      stack.pop_back();
      std::array<std::uint32_t, 2> counts{};
      for (std::size_t j = p.lo; j < p.hi; ++j) ++counts[data.y[idx[0][j]]];
      tree.nodes[p.node].counts = counts;
      if (counts[0] == 0 || counts[1] == 0) continue;

      const double total = static_cast<double>(p.hi - p.lo);
      const double parent = (double(counts[0]) * counts[0] + double(counts[1]) * counts[1]) / total;
      double best_score = parent * (1.0 + 1e-12);
      int best_feature = -1;
      double best_threshold = 0.0;
      std::size_t best_left = 0;

      for (int k = 0; k < mtry; ++k) {
        std::uniform_int_distribution<int> d(k, static_cast<int>(kFeatureCount) - 1);
        std::swap(features[k], features[d(rng)]);
        const int f = features[k];
        const std::vector<double>& col = data.col[f];
        const std::vector<std::uint32_t>& seg = idx[f];
        std::array<double, 2> left{0.0, 0.0};
        for (std::size_t j = p.lo; j + 1 < p.hi; ++j) {
          left[data.y[seg[j]]] += 1.0;
          const double v = col[seg[j]];
          const double v_next = col[seg[j + 1]];
          if (!(v < v_next)) continue;
          const double nl = static_cast<double>(j + 1 - p.lo);
          const double nr = total - nl;
          const double r0 = counts[0] - left[0];
          const double r1 = counts[1] - left[1];
          const double score = (left[0] * left[0] + left[1] * left[1]) / nl + (r0 * r0 + r1 * r1) / nr;
          if (score > best_score) {
            best_score = score;
            best_feature = f;
            best_threshold = 0.5 * (v + v_next);
            if (!(best_threshold < v_next)) best_threshold = v;
            best_left = j + 1 - p.lo;
          }
        }
      }
      if (best_feature < 0) continue;

      const std::vector<double>& split_col = data.col[best_feature];
      for (std::size_t j = p.lo; j < p.hi; ++j) {
        const std::uint32_t i = idx[best_feature][j];
        goes_left[i] = split_col[i] <= best_threshold ? 1 : 0;
      }
      for (std::size_t f = 0; f < kFeatureCount; ++f) {
        std::vector<std::uint32_t>& seg = idx[f];
        std::size_t l = p.lo, r = 0;
        for (std::size_t j = p.lo; j < p.hi; ++j) {
          const std::uint32_t i = seg[j];
          if (goes_left[i]) {
            seg[l++] = i;
          } else {
            scratch[r++] = i;
          }
        }
        std::copy(scratch.begin(), scratch.begin() + static_cast<std::ptrdiff_t>(r), seg.begin() + static_cast<std::ptrdiff_t>(l));
      }

      const int left_id = static_cast<int>(tree.nodes.size());
      tree.nodes.emplace_back();
      tree.nodes.emplace_back();
      TreeNode& node = tree.nodes[p.node];
      node.feature = best_feature;
      node.threshold = best_threshold;
      node.left = left_id;
      node.right = left_id + 1;
      const std::size_t mid = p.lo + best_left;
      stack.push_back({left_id + 1, mid, p.hi});
      stack.push_back({left_id, p.lo, mid});
    }
    return tree;
  }
};

void check_params(const Dataset& train, int n_trees, int mtry) {
  if (train.empty()) throw Error(Errc::InvalidArgument, "training set is empty");
  if (n_trees < 1) throw Error(Errc::InvalidArgument, "forest needs at least one tree");
  if (mtry < 1 || mtry > static_cast<int>(kFeatureCount)) {
    throw Error(Errc::InvalidArgument, "mtry must lie in [1, " + std::to_string(kFeatureCount) + "]");
  }
  if (train.x.size() != train.y.size()) throw Error(Errc::InvalidArgument, "feature and label counts differ");
  for (int y : train.y) {
    if (y != 0 && y != 1) throw Error(Errc::InvalidArgument, "labels must be 0 or 1");
  }
}

ForestModel grow_forest(const Dataset& train, const ForestParams& params) {
  const Columns data(train);
  ForestModel model;
  model.params = params;
  model.train_size = data.n;
  model.trees.resize(static_cast<std::size_t>(params.n_trees));

  unsigned workers = params.threads ? params.threads : std::max(1U, std::thread::hardware_concurrency());
  workers = std::min<unsigned>(workers, static_cast<unsigned>(params.n_trees));
  std::vector<std::vector<std::array<std::uint32_t, 2>>> oob(workers,
                                                             std::vector<std::array<std::uint32_t, 2>>(data.n));

  auto work = [&](unsigned w) {
    Grower g(data, params.mtry);
    for (std::size_t t = w; t < model.trees.size(); t += workers) {
      model.trees[t] = g.grow(splitmix64(params.seed ^ splitmix64(t)));
      for (std::size_t i = 0; i < data.n; ++i) {
        if (g.inbag[i] == 0) ++oob[w][i][model.trees[t].predict(train.x[i])];
      }
    }
  };
  if (workers == 1) {
    work(0);
  } else {
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work, w);
    for (auto& th : pool) th.join();
  }

  std::size_t scored = 0, wrong = 0;
  for (std::size_t i = 0; i < data.n; ++i) {
    std::array<std::uint32_t, 2> v{};
    for (const auto& per_worker : oob) {
      v[0] += per_worker[i][0];
      v[1] += per_worker[i][1];
    }
    if (v[0] + v[1] == 0) continue;
    ++scored;
    if ((v[1] > v[0] ? 1 : 0) != train.y[i]) ++wrong;
  }
  model.oob_error = scored ? static_cast<double>(wrong) / static_cast<double>(scored) : 0.0;
  return model;
}

bool single_class(const Dataset& d) {
  return std::all_of(d.y.begin(), d.y.end(), [&](int y) { return y == d.y.front(); });
}

}  // namespace

ForestModel train_forest(const Dataset& train, const ForestParams& params) {
  check_params(train, params.n_trees, params.mtry);
  if (single_class(train)) throw Error(Errc::DegenerateModel, "training labels contain a single class");
  return grow_forest(train, params);
}

MtryTuning tune_mtry(const Dataset& train, std::span<const int> candidates, std::uint64_t seed, int probe_trees) {
  if (candidates.empty()) throw Error(Errc::InvalidArgument, "no mtry candidates");
  std::vector<int> sorted(candidates.begin(), candidates.end());
  std::sort(sorted.begin(), sorted.end());
  MtryTuning out;
  double best = 2.0;
  for (int m : sorted) {
    check_params(train, probe_trees, m);
    const double err = single_class(train) ? 0.0 : grow_forest(train, {probe_trees, m, seed, 0}).oob_error;
    out.oob_by_mtry.emplace_back(m, err);
    if (err < best) {
      best = err;
      out.best = m;
    }
  }
  return out;
}

MtryTuning tune_mtry(const Dataset& train, std::uint64_t seed) {
  static constexpr int kCandidates[] = {2, 3, 4, 5, 6, 7, 8};
  return tune_mtry(train, kCandidates, seed);
}

namespace {
constexpr const char* kMagic = "meatcut-forest";
constexpr int kVersion = 1;

double parse_double(const std::string& token) {
  char* end = nullptr;
  const double v = std::strtod(token.c_str(), &end);
  if (token.empty() || end != token.c_str() + token.size()) throw Error(Errc::Parse, "bad number '" + token + "' in model");
  return v;
}
}  // namespace

void save_forest(std::ostream& out, const ForestModel& model) {
  out << kMagic << ' ' << kVersion << '\n';
  out << "n_trees " << model.trees.size() << "\nmtry " << model.params.mtry << "\nseed " << model.params.seed
      << "\ntrain_size " << model.train_size << "\noob_error " << std::hexfloat << model.oob_error
      << std::defaultfloat << '\n';
  for (const DecisionTree& t : model.trees) {
    out << "tree " << t.nodes.size() << '\n';
    for (const TreeNode& n : t.nodes) {
      out << n.feature << ' ' << std::hexfloat << n.threshold << std::defaultfloat << ' ' << n.left << ' ' << n.right
          << ' ' << n.counts[0] << ' ' << n.counts[1] << '\n';
    }
  }
}

ForestModel load_forest(std::istream& in) {
  auto expect = [&](const char* key) {
    std::string k;
    if (!(in >> k) || k != key) throw Error(Errc::Parse, std::string("model: expected '") + key + "'");
  };
  std::string magic;
  int version = 0;
  if (!(in >> magic >> version) || magic != kMagic) throw Error(Errc::Parse, "not a meatcut forest model");
  if (version != kVersion) throw Error(Errc::Parse, "unsupported model version " + std::to_string(version));
  ForestModel m;
  std::size_t n_trees = 0;
  std::string oob;
  expect("n_trees");
  in >> n_trees;
  expect("mtry");
  in >> m.params.mtry;
  expect("seed");
  in >> m.params.seed;
  expect("train_size");
  in >> m.train_size;
  expect("oob_error");
  in >> oob;
  if (!in) throw Error(Errc::Parse, "model: truncated header");
  m.oob_error = parse_double(oob);
  m.params.n_trees = static_cast<int>(n_trees);
  m.trees.resize(n_trees);
  for (DecisionTree& t : m.trees) {
    std::size_t n_nodes = 0;
    expect("tree");
    if (!(in >> n_nodes) || n_nodes == 0) throw Error(Errc::Parse, "model: bad node count");
    t.nodes.resize(n_nodes);
    for (TreeNode& n : t.nodes) {
      std::string thr;
      if (!(in >> n.feature >> thr >> n.left >> n.right >> n.counts[0] >> n.counts[1])) {
        throw Error(Errc::Parse, "model: truncated tree");
      }
      n.threshold = parse_double(thr);
      const bool bad_feature = n.feature >= static_cast<int>(kFeatureCount);
      const bool bad_child = !n.leaf() && (n.left <= 0 || n.right <= 0 || std::size_t(n.left) >= n_nodes ||
                                           std::size_t(n.right) >= n_nodes);
      if (bad_feature || bad_child) throw Error(Errc::Integrity, "model: node references out of range");
    }
  }
  return m;
}

}  // namespace meatcut::contact
