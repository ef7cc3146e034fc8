#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "crosstune/types.hpp"

namespace crosstune {

/// Trainable linear map over frozen embeddings plus a classifier head:
/// z' = normalize(A z), logits = W z' + b.
struct AdapterModel {
  Mat A;  // d' x d, identity at initialization
  Mat W;  // m x d'
  Vec b;  // m
  bool trained = false;

  static AdapterModel init(int d, int m, std::uint64_t seed, int d_prime = -1);

  int input_dim() const { return static_cast<int>(A.cols()); }
  int output_dim() const { return static_cast<int>(A.rows()); }
  int num_classes() const { return static_cast<int>(W.rows()); }
};

struct TrainConfig {
  int epochs = 100;
  int batch_size = 50;
  double learning_rate = 0.01;
  double val_fraction = 0.2;
  double lambda_stoc = 0.01;
  std::uint64_t seed = 1;

  void validate() const;
};

struct LossParts {
  double total = 0.0;
  double softmax_ce = 0.0;
  double stoc_center = 0.0;
};

struct Gradients {
  Mat A;
  Mat W;
  Vec b;
};

struct EpochStats {
  double train_total = 0.0;
  double val_total = 0.0;
};

struct TrainHistory {
  std::vector<EpochStats> epochs;
  double initial_val_loss = 0.0;
  double best_val_loss = 0.0;
  int best_epoch = 0;  // 0 = initialization
  LossParts final_train_parts;
};

/// Soft-label-weighted class means over already-adapted features
/// (n' x d'). Identities with zero soft mass get an absent center.
std::vector<std::optional<Vec>> stochastic_centers(
    const Mat& adapted, const std::vector<SoftLabel>& soft);

/// Composite loss on raw features: soft-target softmax cross-entropy plus
/// lambda_stoc times the stochastic center loss, with centers computed from
/// this batch. `rows` selects the batch (empty = everything).
LossParts loss(const Mat& raw_features, const std::vector<SoftLabel>& soft,
               const AdapterModel& model, double lambda_stoc,
               const std::vector<int>& rows = {});

/// Analytic gradients of the same loss w.r.t. A, W and b. The chain rule
/// runs through the feature normalization; the centers are the soft-mass
/// weighted means, so their own gradient contribution cancels.
Gradients gradients(const Mat& raw_features, const std::vector<SoftLabel>& soft,
                    const AdapterModel& model, double lambda_stoc,
                    const std::vector<int>& rows = {});

/// Minibatch gradient descent with a seeded shuffle and a stratified
/// 8:2-style train/validation split by argmax label; returns the parameters
/// of the epoch with the lowest validation loss. Only samples with
/// vote_count > 0 may be passed in via `rows`.
AdapterModel train_adapter(const Mat& raw_features,
                           const std::vector<SoftLabel>& soft,
                           const std::vector<int>& rows,
                           const AdapterModel& start, const TrainConfig& cfg,
                           TrainHistory* history = nullptr);

/// z' = normalize(A z) per row. Throws on a zero vector.
Mat transform(const Mat& raw_features, const AdapterModel& model);

}  // namespace crosstune
