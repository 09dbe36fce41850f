// SPDX-License-Identifier: Apache-2.0
#include "toolplanner/trainer.hpp"

#include "json_util.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace toolplanner {

void TrainerConfig::validate() const {
    if (!(beta >= 0.0) || !std::isfinite(beta)) fail(ErrorCode::InvalidRequest, "beta must be a finite value >= 0");
    if (!(learning_rate >= 0.0) || !std::isfinite(learning_rate)) {
        fail(ErrorCode::InvalidRequest, "learning rate must be a finite value >= 0");
    }
    if (epochs < 1) fail(ErrorCode::InvalidRequest, "epochs must be positive");
    if (!(init_scale >= 0.0)) fail(ErrorCode::InvalidRequest, "init scale must be >= 0");
}

namespace {

std::vector<RoundProposal> history_of(const std::vector<RoundProposal>& history) { return history; }

} // namespace

ToyDataset build_dataset(std::span<const PositiveRound> positives, std::span<const PairwiseResponse> pairs,
                         const Featurizer& featurizer) {
    ToyDataset dataset;
    const auto& vocab = featurizer.vocab();
    for (const auto& positive : positives) {
        dataset.positives.push_back({featurizer.featurize(positive.path, history_of(positive.history)),
                                     vocab.index_of(positive.round)});
    }
    for (const auto& pair : pairs) {
        dataset.pairs.push_back({featurizer.featurize(pair.path, history_of(pair.history)),
                                 vocab.index_of(pair.positive), vocab.index_of(pair.negative)});
    }
    return dataset;
}

ActionVocab vocab_from_records(std::span<const PositiveRound> positives, std::span<const PairwiseResponse> pairs) {
    std::vector<std::string> apis;
    const auto take = [&](const RoundProposal& round) {
        if (!round.is_finish()) apis.push_back(round.action);
    };
    for (const auto& positive : positives) {
        for (const auto& step : positive.path.apis()) apis.push_back(step);
        for (const auto& round : positive.history) take(round);
        take(positive.round);
    }
    for (const auto& pair : pairs) {
        for (const auto& step : pair.path.apis()) apis.push_back(step);
        for (const auto& round : pair.history) take(round);
        take(pair.positive);
        take(pair.negative);
    }
    return ActionVocab(std::move(apis));
}

double ce_loss(const ToySoftmaxPolicy& policy, std::span<const ToyExample> positives) {
    double loss = 0.0;
    for (const auto& example : positives) loss -= policy.action_logprob(example.state, example.action);
    return loss;
}

double rank_loss(const ToySoftmaxPolicy& policy, std::span<const ToyPair> pairs) {
    double loss = 0.0;
    for (const auto& pair : pairs) {
        const auto lp = policy.log_probs(pair.state);
        if (pair.positive >= lp.size() || pair.negative >= lp.size()) {
            fail(ErrorCode::UnknownAction, "pair action outside the state's action set");
        }
        loss += std::max(0.0, lp[pair.negative] - lp[pair.positive]);
    }
    return loss;
}

LossBreakdown total_loss(const ToySoftmaxPolicy& policy, std::span<const ToyExample> positives,
                         std::span<const ToyPair> pairs, const TrainerConfig& config) {
    LossBreakdown out;
    out.ce = ce_loss(policy, positives);
    out.rank = rank_loss(policy, pairs);
    out.total = out.ce + config.beta * out.rank;
    return out;
}

std::vector<double> loss_gradient(const ToySoftmaxPolicy& policy, std::span<const ToyExample> positives,
                                  std::span<const ToyPair> pairs, const TrainerConfig& config) {
    std::vector<double> grad(policy.dimension(), 0.0);
    const auto add = [&](const std::vector<double>& g, double scale) {
        for (std::size_t i = 0; i < grad.size(); ++i) grad[i] += scale * g[i];
    };
    for (const auto& example : positives) add(policy.grad_logprob(example.state, example.action), -1.0);
    if (config.beta != 0.0) {
        for (const auto& pair : pairs) {
            const auto lp = policy.log_probs(pair.state);
            if (pair.positive >= lp.size() || pair.negative >= lp.size()) {
                fail(ErrorCode::UnknownAction, "pair action outside the state's action set");
            }
            if (lp[pair.negative] - lp[pair.positive] <= 0.0) continue;
            add(policy.grad_logprob(pair.state, pair.negative), config.beta);
            add(policy.grad_logprob(pair.state, pair.positive), -config.beta);
        }
    }
    return grad;
}

std::vector<double> numeric_gradient(const ToySoftmaxPolicy& policy, std::span<const ToyExample> positives,
                                     std::span<const ToyPair> pairs, const TrainerConfig& config, double h) {
    ToySoftmaxPolicy probe = policy;
    std::vector<double> grad(policy.dimension(), 0.0);
    for (std::size_t i = 0; i < grad.size(); ++i) {
        const double saved = probe.parameters()[i];
        probe.parameters()[i] = saved + h;
        const double up = total_loss(probe, positives, pairs, config).total;
        probe.parameters()[i] = saved - h;
        const double down = total_loss(probe, positives, pairs, config).total;
        probe.parameters()[i] = saved;
        grad[i] = (up - down) / (2.0 * h);
    }
    return grad;
}

double grad_check(const ToySoftmaxPolicy& policy, std::span<const ToyExample> positives,
                  std::span<const ToyPair> pairs, const TrainerConfig& config, double h) {
    const auto analytic = loss_gradient(policy, positives, pairs, config);
    const auto numeric = numeric_gradient(policy, positives, pairs, config, h);
    double worst = 0.0;
    for (std::size_t i = 0; i < analytic.size(); ++i) worst = std::max(worst, std::abs(analytic[i] - numeric[i]));
    return worst;
}

double min_hinge_margin(const ToySoftmaxPolicy& policy, std::span<const ToyPair> pairs) {
    double margin = std::numeric_limits<double>::infinity();
    for (const auto& pair : pairs) {
        const auto lp = policy.log_probs(pair.state);
        margin = std::min(margin, std::abs(lp[pair.positive] - lp[pair.negative]));
    }
    return margin;
}

double ordered_fraction(const ToySoftmaxPolicy& policy, std::span<const ToyPair> pairs) {
    if (pairs.empty()) return 1.0;
    std::size_t ordered = 0;
    for (const auto& pair : pairs) {
        const auto lp = policy.log_probs(pair.state);
        if (lp[pair.positive] > lp[pair.negative]) ++ordered;
    }
    return static_cast<double>(ordered) / static_cast<double>(pairs.size());
}

TrainResult train(const ToySoftmaxPolicy& initial, const ToyDataset& dataset, const TrainerConfig& config) {
    config.validate();
    if (dataset.empty()) fail(ErrorCode::InvalidRequest, "training dataset is empty");
    TrainResult result{initial, {}};
    auto& theta = result.policy.parameters();
    if (config.init_scale > 0.0) {
        Rng rng(derive_seed(config.seed, "toy-init"));
        for (double& w : theta) w = config.init_scale * (2.0 * uniform_unit(rng) - 1.0);
    }
    const auto record = [&]() {
        const auto loss = total_loss(result.policy, dataset.positives, dataset.pairs, config);
        const bool finite_theta = std::all_of(result.policy.parameters().begin(), result.policy.parameters().end(),
                                              [](double w) { return std::isfinite(w); });
        if (!std::isfinite(loss.total) || !finite_theta) {
            fail(ErrorCode::Divergence, "loss or parameters became non-finite after " +
                                            std::to_string(result.curve.size()) + " epoch(s)");
        }
        result.curve.push_back(loss);
    };
    record();
    for (int epoch = 0; epoch < config.epochs; ++epoch) {
        const auto grad = loss_gradient(result.policy, dataset.positives, dataset.pairs, config);
        for (std::size_t i = 0; i < theta.size(); ++i) theta[i] -= config.learning_rate * grad[i];
        record();
    }
    return result;
}

void save_toy_model(const ToySoftmaxPolicy& policy, const Featurizer& featurizer, const std::filesystem::path& path) {
    detail::ordered_json doc;
    doc["record"] = "toy_model";
    std::vector<std::string> apis;
    for (const auto& key : featurizer.vocab().keys()) {
        if (key != ActionVocab::kGiveAnswer && key != ActionVocab::kGiveUp) apis.push_back(key);
    }
    doc["vocab"] = apis;
    doc["max_steps"] = featurizer.max_steps();
    doc["path_slots"] = featurizer.path_slots();
    doc["temperature"] = policy.temperature();
    doc["theta"] = policy.parameters();
    const std::vector<std::string> lines{detail::dump_line(doc)};
    write_lines(lines, path);
}

ToyModel load_toy_model(const std::filesystem::path& path) {
    const auto lines = read_lines(path);
    const auto what = path.string();
    if (lines.size() != 1) fail(ErrorCode::MalformedRecord, what + ": expected a single toy_model record");
    const auto doc = detail::parse_json(lines.front(), what);
    if (detail::optional_string(doc, "record") != "toy_model") {
        fail(ErrorCode::MalformedRecord, what + ": not a toy_model record");
    }
    const auto number = [&](const char* key) {
        const auto& value = detail::require(doc, key, what);
        if (!value.is_number()) fail(ErrorCode::MalformedRecord, what + ": '" + key + "' is not a number");
        return value;
    };
    Featurizer featurizer(ActionVocab(detail::string_list(detail::require(doc, "vocab", what), what)),
                          number("max_steps").get<std::size_t>(), number("path_slots").get<std::size_t>());
    ToySoftmaxPolicy policy(featurizer.dimension(), number("temperature").get<double>());
    const auto& theta = detail::require(doc, "theta", what);
    if (!theta.is_array() || theta.size() != policy.dimension()) {
        fail(ErrorCode::MalformedRecord, what + ": theta does not match the vocabulary and featurizer shape");
    }
    for (std::size_t i = 0; i < theta.size(); ++i) {
        if (!theta[i].is_number()) fail(ErrorCode::MalformedRecord, what + ": theta holds a non-number");
        policy.parameters()[i] = theta[i].get<double>();
    }
    return {std::move(policy), std::move(featurizer)};
}

std::size_t write_loss_curve(std::span<const LossBreakdown> curve, const std::filesystem::path& path) {
    std::vector<std::string> lines{"epoch ce rank total"};
    char buf[160];
    for (std::size_t e = 0; e < curve.size(); ++e) {
        std::snprintf(buf, sizeof buf, "%zu %.17g %.17g %.17g", e, curve[e].ce, curve[e].rank, curve[e].total);
        lines.emplace_back(buf);
    }
    write_lines(lines, path);
    return curve.size();
}

} // namespace toolplanner
