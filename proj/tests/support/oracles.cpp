// SPDX-License-Identifier: Apache-2.0
#include "oracles.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <set>

namespace oracles {

TagTable tag_table(const std::vector<RegistryEntry>& entries) {
    TagTable out;
    for (const auto& e : entries) out[e.api] = {e.category, e.tool, e.api};
    return out;
}

std::vector<std::vector<int>> brute_force_paths(const SolutionTree& tree) {
    std::vector<std::vector<int>> out;
    for (std::size_t id = 1; id < tree.nodes.size(); ++id) {
        bool has_child = false;
        for (const auto& other : tree.nodes) {
            if (other.parent == static_cast<int>(id)) has_child = true;
        }
        if (has_child) continue;
        std::vector<int> path;
        for (int at = static_cast<int>(id); at > 0; at = tree.nodes[static_cast<std::size_t>(at)].parent) {
            path.push_back(at);
        }
        std::reverse(path.begin(), path.end());
        out.push_back(path);
    }
    return out;
}

namespace {

std::string lower(std::string s) {
    for (auto& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return s;
}

bool meaningful(const std::string& answer) {
    bool blank = true;
    for (char c : answer) {
        if (!std::isspace(static_cast<unsigned char>(c))) blank = false;
    }
    if (blank) return false;
    const auto text = lower(answer);
    for (const char* bad : {"sorry", "i couldn't", "unable to", "cannot handle"}) {
        if (text.find(bad) != std::string::npos) return false;
    }
    return true;
}

} // namespace

int reward(const std::vector<Round>& rounds, const Instruction& instruction, const TagTable& table) {
    bool pass = false;
    if (!rounds.empty()) {
        const auto& last = rounds.back();
        pass = last.action == "Finish" && last.finish && last.finish->kind == FinishKind::GiveAnswer &&
               last.finish->final_answer && meaningful(*last.finish->final_answer);
    }
    int depth = 0;
    switch (instruction.level) {
    case Level::Statement: depth = 0; break;
    case Level::Category: depth = 1; break;
    case Level::Tool: depth = 2; break;
    case Level::Api:
    case Level::Hybrid: depth = 3; break;
    }
    bool match = true;
    const std::vector<std::string>* gold_lists[3] = {&instruction.gold_tags.categories, &instruction.gold_tags.tools,
                                                     &instruction.gold_tags.apis};
    for (int k = 0; k < depth; ++k) {
        std::set<std::string> used;
        for (const auto& r : rounds) {
            if (r.action == "Finish") continue;
            used.insert(table.at(r.action)[static_cast<std::size_t>(k)]);
        }
        const std::set<std::string> gold(gold_lists[k]->begin(), gold_lists[k]->end());
        if (used != gold) match = false;
    }
    if (pass && match) return 1;
    if (!pass && match) return -1;
    if (pass && !match) return -2;
    return -3;
}

int round_reward(const std::vector<SolutionTree>& trees, int tree_index, int node_id, const Instruction& instruction,
                 const TagTable& table) {
    int best = -100;
    for (const auto& tree : trees) {
        if (tree.tree_index != tree_index) continue;
        for (const auto& path : brute_force_paths(tree)) {
            if (std::find(path.begin(), path.end(), node_id) == path.end()) continue;
            std::vector<Round> rounds;
            for (int id : path) rounds.push_back(tree.nodes[static_cast<std::size_t>(id)].round);
            best = std::max(best, reward(rounds, instruction, table));
        }
    }
    return best;
}

namespace {

std::vector<long double> log_softmax(const std::vector<double>& theta, const ToyState& state, double temperature) {
    std::vector<long double> z;
    for (const auto& row : state.rows) {
        long double s = 0;
        for (std::size_t i = 0; i < row.size(); ++i) s += static_cast<long double>(theta[i]) * row[i];
        z.push_back(s / temperature);
    }
    const long double m = *std::max_element(z.begin(), z.end());
    long double sum = 0;
    for (auto v : z) sum += std::exp(v - m);
    const long double lse = m + std::log(sum);
    for (auto& v : z) v -= lse;
    return z;
}

} // namespace

long double total_loss(const std::vector<double>& theta, const ToyDataset& data, double beta, double temperature) {
    long double ce = 0;
    for (const auto& ex : data.positives) ce -= log_softmax(theta, ex.state, temperature)[ex.action];
    long double rank = 0;
    for (const auto& pair : data.pairs) {
        const auto lp = log_softmax(theta, pair.state, temperature);
        rank += std::max<long double>(0, lp[pair.negative] - lp[pair.positive]);
    }
    return ce + beta * rank;
}

std::vector<double> finite_difference(const std::vector<double>& theta, const ToyDataset& data, double beta,
                                      double h) {
    std::vector<double> grad(theta.size());
    auto probe = theta;
    for (std::size_t i = 0; i < theta.size(); ++i) {
        probe[i] = theta[i] + h;
        const auto up = total_loss(probe, data, beta);
        probe[i] = theta[i] - h;
        const auto down = total_loss(probe, data, beta);
        probe[i] = theta[i];
        grad[i] = static_cast<double>((up - down) / (2 * static_cast<long double>(h)));
    }
    return grad;
}

} // namespace oracles
