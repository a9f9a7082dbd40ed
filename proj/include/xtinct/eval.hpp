// Classifier-agnostic evaluation (top-k accuracy, confusion matrix) and a
// k-nearest-neighbour baseline on raw pattern vectors.

#ifndef XTINCT_EVAL_HPP_
#define XTINCT_EVAL_HPP_

#include "xtinct/dataset_io.hpp"
#include "xtinct/extinction_classes.hpp"

#include <Eigen/Core>
#include <json.hpp>

#include <span>
#include <stdexcept>
#include <vector>

namespace xtinct {

struct Prediction {
  std::vector<int> ranked;  // best first, no duplicates
  int truth = 0;
};

using PredictionSet = std::vector<Prediction>;

/// Fraction of predictions whose true label is among the first k ranked.
double topk_accuracy(const PredictionSet& p, int k);

struct ConfusionMatrix {
  std::vector<int> labels;  // ascending; row/column order
  Eigen::MatrixX<long> counts;  // row = true, column = top-1 prediction

  long total() const { return counts.sum(); }
};

ConfusionMatrix confusion(const PredictionSet& p);

/// Map every label (truth and ranking) through `map`, keeping the first
/// occurrence of each mapped label in the ranking.
PredictionSet relabel_predictions(const PredictionSet& p, const Partition& partition);

/// Euclidean k-NN. Labels among the k nearest are ranked by summed inverse
/// distance; the remaining training labels follow by their nearest distance.
/// Ties go to the smaller label. Throws std::invalid_argument on an empty
/// training set or mismatched vector lengths.
PredictionSet knn_classify(const SampleMatrix& train, std::span<const int> train_labels,
                           const SampleMatrix& test, std::span<const int> test_labels,
                           int neighbors, unsigned threads = 0);

/// JSON report: per-k accuracies and the confusion matrix.
nlohmann::json evaluation_report(const PredictionSet& p, int max_k = 5);

}  // namespace xtinct

#endif  // XTINCT_EVAL_HPP_
