// SPDX-License-Identifier: Apache-2.0
//
// Cross-entropy plus ranking objective on the toy softmax policy.
#pragma once

#include "toolplanner/common.hpp"
#include "toolplanner/corpus.hpp"
#include "toolplanner/policy.hpp"

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

namespace toolplanner {

struct TrainerConfig {
    double beta = 1.0;
    double learning_rate = 0.5;
    int epochs = 50;
    std::uint64_t seed = 0;
    /// Parameters start uniform in [-init_scale, init_scale], drawn from
    /// `seed`; 0 starts from the uniform policy.
    double init_scale = 0.0;

    void validate() const;
};

struct LossBreakdown {
    double ce = 0.0;
    double rank = 0.0;
    double total = 0.0;

    bool operator==(const LossBreakdown&) const = default;
};

struct ToyExample {
    ToyState state;
    std::size_t action = 0;
};

struct ToyPair {
    ToyState state;
    std::size_t positive = 0;
    std::size_t negative = 0;
};

struct ToyDataset {
    std::vector<ToyExample> positives;
    std::vector<ToyPair> pairs;

    bool empty() const { return positives.empty() && pairs.empty(); }
};

/// Featurizes records; actions outside the vocabulary raise UnknownAction.
ToyDataset build_dataset(std::span<const PositiveRound> positives, std::span<const PairwiseResponse> pairs,
                         const Featurizer& featurizer);

/// Vocabulary covering every action and plan step in the records.
ActionVocab vocab_from_records(std::span<const PositiveRound> positives, std::span<const PairwiseResponse> pairs);

/// -sum log p(action | state).
double ce_loss(const ToySoftmaxPolicy& policy, std::span<const ToyExample> positives);
/// sum max(0, log p(negative) - log p(positive)).
double rank_loss(const ToySoftmaxPolicy& policy, std::span<const ToyPair> pairs);
LossBreakdown total_loss(const ToySoftmaxPolicy& policy, std::span<const ToyExample> positives,
                         std::span<const ToyPair> pairs, const TrainerConfig& config);

/// Analytic gradient of total_loss. At a hinge kink the inactive side is used.
std::vector<double> loss_gradient(const ToySoftmaxPolicy& policy, std::span<const ToyExample> positives,
                                  std::span<const ToyPair> pairs, const TrainerConfig& config);

/// Central finite differences of total_loss with step h.
std::vector<double> numeric_gradient(const ToySoftmaxPolicy& policy, std::span<const ToyExample> positives,
                                     std::span<const ToyPair> pairs, const TrainerConfig& config, double h = 1e-5);

/// Largest componentwise |analytic - numeric| gradient difference.
double grad_check(const ToySoftmaxPolicy& policy, std::span<const ToyExample> positives,
                  std::span<const ToyPair> pairs, const TrainerConfig& config, double h = 1e-5);

/// Smallest |log p(pos) - log p(neg)| over the pairs; grad_check is only
/// meaningful when this exceeds the finite-difference reach.
double min_hinge_margin(const ToySoftmaxPolicy& policy, std::span<const ToyPair> pairs);

/// Fraction of pairs with log p(positive) > log p(negative); 1 when empty.
double ordered_fraction(const ToySoftmaxPolicy& policy, std::span<const ToyPair> pairs);

struct TrainResult {
    ToySoftmaxPolicy policy;
    /// curve[0] is the loss before the first update; curve[e] after epoch e.
    std::vector<LossBreakdown> curve;
};

/// Full-batch gradient descent. Throws Divergence on a non-finite loss.
TrainResult train(const ToySoftmaxPolicy& initial, const ToyDataset& dataset, const TrainerConfig& config);

struct ToyModel {
    ToySoftmaxPolicy policy;
    Featurizer featurizer;
};

/// One JSON line holding the vocabulary, featurizer shape, temperature and
/// parameters. Doubles round-trip exactly.
void save_toy_model(const ToySoftmaxPolicy& policy, const Featurizer& featurizer, const std::filesystem::path& path);
ToyModel load_toy_model(const std::filesystem::path& path);

/// Columnar "epoch ce rank total" text, fixed 17-digit precision.
std::size_t write_loss_curve(std::span<const LossBreakdown> curve, const std::filesystem::path& path);

} // namespace toolplanner
