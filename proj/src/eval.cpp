#include "xtinct/eval.hpp"

#include "xtinct/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

namespace xtinct {

double topk_accuracy(const PredictionSet& p, int k) {
  if (k < 1)
    throw std::invalid_argument("k must be >= 1");
  if (p.empty())
    return 0.0;
  long hits = 0;
  for (const Prediction& pr : p) {
    auto end = pr.ranked.begin() + std::min<long>(k, static_cast<long>(pr.ranked.size()));
    if (std::find(pr.ranked.begin(), end, pr.truth) != end)
      ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(p.size());
}

ConfusionMatrix confusion(const PredictionSet& p) {
  std::set<int> labels;
  for (const Prediction& pr : p) {
    labels.insert(pr.truth);
    if (!pr.ranked.empty())
      labels.insert(pr.ranked.front());
  }
  ConfusionMatrix cm;
  cm.labels.assign(labels.begin(), labels.end());
  const auto n = static_cast<Eigen::Index>(cm.labels.size());
  cm.counts = Eigen::MatrixX<long>::Zero(n, n);
  auto index = [&](int label) {
    return static_cast<Eigen::Index>(
        std::lower_bound(cm.labels.begin(), cm.labels.end(), label) - cm.labels.begin());
  };
  for (const Prediction& pr : p)
    if (!pr.ranked.empty())
      ++cm.counts(index(pr.truth), index(pr.ranked.front()));
  return cm;
}

PredictionSet relabel_predictions(const PredictionSet& p, const Partition& partition) {
  PredictionSet out;
  out.reserve(p.size());
  for (const Prediction& pr : p) {
    Prediction r;
    r.truth = relabel(std::span<const int>(&pr.truth, 1), partition).front();
    for (int c : relabel(pr.ranked, partition))
      if (std::find(r.ranked.begin(), r.ranked.end(), c) == r.ranked.end())
        r.ranked.push_back(c);
    out.push_back(std::move(r));
  }
  return out;
}

namespace {

// Test rows per matrix product. Fixed, so results never depend on the
// number of workers.
constexpr Eigen::Index kQueryBlock = 64;
// Extra neighbours whose distance is recomputed exactly after the fast pass.
constexpr size_t kRefineMargin = 32;

double exact_distance(const SampleMatrix& a, Eigen::Index i, const SampleMatrix& b,
                      Eigen::Index j) {
  double sum = 0;
  for (Eigen::Index c = 0; c < a.cols(); ++c) {
    const double d = static_cast<double>(a(i, c)) - static_cast<double>(b(j, c));
    sum += d * d;
  }
  return std::sqrt(sum);
}

}  // namespace

PredictionSet knn_classify(const SampleMatrix& train, std::span<const int> train_labels,
                           const SampleMatrix& test, std::span<const int> test_labels,
                           int neighbors, unsigned threads) {
  if (train.rows() == 0)
    throw std::invalid_argument("k-NN needs a non-empty training set");
  if (neighbors < 1)
    throw std::invalid_argument("neighbors must be >= 1");
  if (train.cols() != test.cols())
    throw std::invalid_argument("train and test patterns differ in length");
  if (static_cast<Eigen::Index>(train_labels.size()) != train.rows() ||
      static_cast<Eigen::Index>(test_labels.size()) != test.rows())
    throw std::invalid_argument("label count does not match sample count");

  std::vector<int> universe(train_labels.begin(), train_labels.end());
  std::sort(universe.begin(), universe.end());
  universe.erase(std::unique(universe.begin(), universe.end()), universe.end());
  const size_t n_train = train_labels.size();
  const size_t k = std::min<size_t>(static_cast<size_t>(neighbors), n_train);
  const size_t n_refine = std::min(n_train, k + kRefineMargin);

  Eigen::VectorXd train_norm(train.rows());
  for (Eigen::Index j = 0; j < train.rows(); ++j)
    train_norm(j) = train.row(j).cast<double>().squaredNorm();

  PredictionSet out(static_cast<size_t>(test.rows()));
  const auto n_blocks = static_cast<size_t>((test.rows() + kQueryBlock - 1) / kQueryBlock);
  parallel_for(n_blocks, threads, [&](size_t b) {
    const Eigen::Index first = static_cast<Eigen::Index>(b) * kQueryBlock;
    const Eigen::Index rows = std::min(kQueryBlock, test.rows() - first);
    // Fast pass: |x - y|^2 = |x|^2 + |y|^2 - 2 x.y with a float product.
    Eigen::MatrixXf dots = test.middleRows(first, rows) * train.transpose();

    struct Hit {
      double dist;
      int label;
      Eigen::Index row;
    };
    auto closer = [](const Hit& x, const Hit& y) {
      if (x.dist != y.dist)
        return x.dist < y.dist;
      return x.label < y.label;
    };
    std::vector<Hit> hits(n_train);
    for (Eigen::Index r = 0; r < rows; ++r) {
      const Eigen::Index i = first + r;
      const double query_norm = test.row(i).cast<double>().squaredNorm();
      std::map<int, double> nearest;
      for (size_t j = 0; j < n_train; ++j) {
        const auto jj = static_cast<Eigen::Index>(j);
        double d2 = query_norm + train_norm(jj) - 2.0 * static_cast<double>(dots(r, jj));
        hits[j] = {std::sqrt(std::max(d2, 0.0)), train_labels[j], jj};
        auto [it, fresh] = nearest.emplace(hits[j].label, hits[j].dist);
        if (!fresh)
          it->second = std::min(it->second, hits[j].dist);
      }
      // Exact distances for the leading candidates decide the vote.
      std::partial_sort(hits.begin(), hits.begin() + static_cast<long>(n_refine), hits.end(),
                        closer);
      for (size_t n = 0; n < n_refine; ++n) {
        hits[n].dist = exact_distance(test, i, train, hits[n].row);
        nearest[hits[n].label] = std::min(nearest[hits[n].label], hits[n].dist);
      }
      std::sort(hits.begin(), hits.begin() + static_cast<long>(n_refine), closer);

      std::map<int, double> votes;
      for (size_t n = 0; n < k; ++n)
        votes[hits[n].label] += 1.0 / std::max(hits[n].dist, 1e-12);

      std::vector<std::pair<double, int>> voted, rest;
      for (auto [label, w] : votes)
        voted.emplace_back(-w, label);
      for (int label : universe)
        if (!votes.count(label))
          rest.emplace_back(nearest[label], label);
      std::sort(voted.begin(), voted.end());
      std::sort(rest.begin(), rest.end());

      Prediction& pr = out[static_cast<size_t>(i)];
      pr.truth = test_labels[static_cast<size_t>(i)];
      for (auto& v : voted)
        pr.ranked.push_back(v.second);
      for (auto& x : rest)
        pr.ranked.push_back(x.second);
    }
  });
  return out;
}

nlohmann::json evaluation_report(const PredictionSet& p, int max_k) {
  nlohmann::json topk = nlohmann::json::object();
  for (int k = 1; k <= max_k; ++k)
    topk[std::to_string(k)] = topk_accuracy(p, k);
  ConfusionMatrix cm = confusion(p);
  nlohmann::json rows = nlohmann::json::array();
  for (Eigen::Index r = 0; r < cm.counts.rows(); ++r) {
    std::vector<long> row(static_cast<size_t>(cm.counts.cols()));
    for (Eigen::Index c = 0; c < cm.counts.cols(); ++c)
      row[static_cast<size_t>(c)] = cm.counts(r, c);
    rows.push_back(row);
  }
  return {{"n_samples", p.size()},
          {"topk_accuracy", topk},
          {"confusion", {{"labels", cm.labels}, {"matrix", rows}}}};
}

}  // namespace xtinct
