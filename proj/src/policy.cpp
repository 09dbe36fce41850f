// SPDX-License-Identifier: Apache-2.0
#include "toolplanner/policy.hpp"

#include "json_util.hpp"
#include "toolplanner/instructions.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

namespace toolplanner {

using detail::ordered_json;

TagList extract_tags(const Instruction& instruction, Policy& policy) {
    if (trim(instruction.text).empty()) fail(ErrorCode::InvalidRequest, "tag extraction needs instruction text");
    auto tags = policy.extract_tags(instruction);
    if (!tags.aligned()) fail(ErrorCode::PolicyFailure, "policy returned misaligned tag lists");
    return tags;
}

SolutionPath plan_path(const Instruction& instruction, const TagList& tags, Policy& policy) {
    auto path = policy.plan_path(instruction, tags);
    if (!path.well_formed()) fail(ErrorCode::PolicyFailure, "policy returned a path without a single final Finish");
    return path;
}

RoundProposal propose_round(const RoundState& state, Policy& policy, Rng& rng) {
    if (!state.task) fail(ErrorCode::InvalidRequest, "round state has no task");
    auto round = policy.propose_round(state, rng);
    if ((round.action == kFinish) != round.finish.has_value()) {
        fail(ErrorCode::PolicyFailure, "proposal action '" + round.action + "' disagrees with its finish payload");
    }
    if (round.action.empty()) fail(ErrorCode::PolicyFailure, "proposal has no action");
    if (round.finish && round.finish->kind == FinishKind::GiveAnswer && !round.finish->final_answer) {
        fail(ErrorCode::PolicyFailure, "give_answer proposal without a final answer");
    }
    return round;
}

std::string summarize_answer(std::span<const Round> history) {
    std::vector<std::string> parts;
    for (const auto& round : history) {
        if (round.is_finish() || !round.observation.ok() || round.observation.response.empty()) continue;
        auto text = round.observation.response;
        if (text.size() > 160) text = text.substr(0, 160) + "...";
        parts.push_back(round.action + ": " + text);
    }
    if (parts.empty()) return "The planned calls completed without returning data.";
    return "Here is what I found. " + join(parts, "; ");
}

namespace {

RoundProposal follow_plan(const RoundState& state) {
    const auto plan = state.task->path.apis();
    const auto h = state.history.size();
    if (h < plan.size()) return call_round(plan[h], "{}", "Next step of the plan: " + plan[h] + ".");
    return finish_round(FinishKind::GiveAnswer, summarize_answer(state.history),
                        "Every planned call is done, so I can answer.");
}

} // namespace

// ---------------------------------------------------------------------------

TagList OraclePolicy::extract_tags(const Instruction& instruction) { return instruction.gold_tags; }

SolutionPath OraclePolicy::plan_path(const Instruction&, const TagList& tags) { return make_path(tags.apis); }

RoundProposal OraclePolicy::propose_round(const RoundState& state, Rng&) { return follow_plan(state); }

// ---------------------------------------------------------------------------

ScriptedPolicy::ScriptedPolicy(std::vector<RoundProposal> script, TagList tags, SolutionPath path)
    : script_(std::move(script)), tags_(std::move(tags)), path_(std::move(path)) {}

ScriptedPolicy ScriptedPolicy::from_trace(const SolutionTrace& trace, TagList tags) {
    std::vector<RoundProposal> script(trace.rounds.begin(), trace.rounds.end());
    return ScriptedPolicy(std::move(script), std::move(tags), make_path(trace.actions()));
}

TagList ScriptedPolicy::extract_tags(const Instruction&) { return tags_; }

SolutionPath ScriptedPolicy::plan_path(const Instruction&, const TagList&) { return path_; }

RoundProposal ScriptedPolicy::propose_round(const RoundState& state, Rng&) {
    if (state.step >= script_.size()) {
        fail(ErrorCode::PolicyFailure, "script exhausted at step " + std::to_string(state.step));
    }
    return script_[state.step];
}

// ---------------------------------------------------------------------------

StochasticPolicy::StochasticPolicy(StochasticConfig config) : config_(std::move(config)) {
    const double mass = config_.give_up + config_.premature_answer + config_.deviate;
    if (config_.give_up < 0 || config_.premature_answer < 0 || config_.deviate < 0 || mass > 1.0) {
        fail(ErrorCode::InvalidRequest, "stochastic policy probabilities must be >= 0 and sum to <= 1");
    }
}

StochasticConfig StochasticPolicy::preset(std::string_view name, std::vector<std::string> action_pool) {
    StochasticConfig config;
    config.action_pool = std::move(action_pool);
    if (name == "never_finish") {
        config.give_up = 0.0;
        config.premature_answer = 0.0;
        config.deviate = 0.3;
        config.never_finish = true;
    } else if (name == "restart_heavy") {
        config.give_up = 0.6;
        config.premature_answer = 0.05;
        config.deviate = 0.2;
    } else if (name == "chaotic") {
        config.give_up = 0.25;
        config.premature_answer = 0.25;
        config.deviate = 0.5;
    } else if (name == "plan_follower") {
        config.give_up = 0.0;
        config.premature_answer = 0.0;
        config.deviate = 0.0;
    } else if (name != "default") {
        fail(ErrorCode::InvalidRequest, "unknown stochastic preset '" + std::string(name) + "'");
    }
    return config;
}

TagList StochasticPolicy::extract_tags(const Instruction& instruction) { return instruction.gold_tags; }

SolutionPath StochasticPolicy::plan_path(const Instruction&, const TagList& tags) { return make_path(tags.apis); }

RoundProposal StochasticPolicy::propose_round(const RoundState& state, Rng& rng) {
    const auto plan = state.task->path.apis();
    const auto& pool = config_.action_pool.empty() ? plan : config_.action_pool;
    const auto random_call = [&]() {
        if (pool.empty()) return finish_round(FinishKind::GiveUpAndRestart, std::nullopt, "Nothing to call.");
        const auto& api = pool[uniform_index(rng, pool.size())];
        return call_round(api, "{}", "Trying " + api + ".");
    };

    double u = uniform_unit(rng);
    if (u < config_.give_up) {
        return finish_round(FinishKind::GiveUpAndRestart, std::nullopt, "This branch looks stuck. I give up and restart.");
    }
    u -= config_.give_up;
    if (!config_.never_finish && u < config_.premature_answer) {
        return finish_round(FinishKind::GiveAnswer, summarize_answer(state.history), "I will answer now.");
    }
    u -= config_.premature_answer;
    if (u < config_.deviate) return random_call();
    if (state.history.size() < plan.size()) return follow_plan(state);
    if (config_.never_finish) return random_call();
    return follow_plan(state);
}

// ---------------------------------------------------------------------------

ActionVocab::ActionVocab(std::vector<std::string> apis) {
    for (auto& api : unique_in_order(apis)) {
        if (api == kFinish) continue;
        keys_.push_back(std::move(api));
    }
    keys_.emplace_back(kGiveAnswer);
    keys_.emplace_back(kGiveUp);
}

std::string ActionVocab::token(const RoundProposal& round) {
    if (round.finish) return std::string(kFinish) + ":" + std::string(to_string(round.finish->kind));
    return round.action;
}

std::size_t ActionVocab::index_of(std::string_view key) const {
    auto it = std::find(keys_.begin(), keys_.end(), key);
    if (it == keys_.end()) fail(ErrorCode::UnknownAction, "action '" + std::string(key) + "' not in vocabulary");
    return static_cast<std::size_t>(it - keys_.begin());
}

bool ActionVocab::contains(std::string_view key) const {
    return std::find(keys_.begin(), keys_.end(), key) != keys_.end();
}

ToySoftmaxPolicy::ToySoftmaxPolicy(std::size_t dimension, double temperature)
    : theta_(dimension, 0.0), temperature_(temperature) {
    if (!(temperature > 0.0) || !std::isfinite(temperature)) {
        fail(ErrorCode::InvalidRequest, "temperature must be positive");
    }
}

void ToySoftmaxPolicy::check(const ToyState& state) const {
    if (state.rows.empty()) fail(ErrorCode::UnknownAction, "state has no actions");
    for (const auto& row : state.rows) {
        if (row.size() != theta_.size()) {
            fail(ErrorCode::InvalidRequest, "feature row width " + std::to_string(row.size()) +
                                                " does not match parameter count " + std::to_string(theta_.size()));
        }
    }
}

std::vector<double> ToySoftmaxPolicy::logits(const ToyState& state) const {
    check(state);
    std::vector<double> out;
    out.reserve(state.rows.size());
    for (const auto& row : state.rows) {
        double dot = 0.0;
        for (std::size_t i = 0; i < row.size(); ++i) dot += theta_[i] * row[i];
        out.push_back(dot / temperature_);
    }
    return out;
}

std::vector<double> ToySoftmaxPolicy::log_probs(const ToyState& state) const {
    auto z = logits(state);
    const double peak = *std::max_element(z.begin(), z.end());
    double sum = 0.0;
    for (double v : z) sum += std::exp(v - peak);
    const double log_norm = peak + std::log(sum);
    for (double& v : z) v -= log_norm;
    return z;
}

double ToySoftmaxPolicy::action_logprob(const ToyState& state, std::size_t action) const {
    if (action >= state.rows.size()) {
        fail(ErrorCode::UnknownAction, "action index " + std::to_string(action) + " outside the state's action set");
    }
    return log_probs(state)[action];
}

std::vector<double> ToySoftmaxPolicy::grad_logprob(const ToyState& state, std::size_t action) const {
    const auto lp = log_probs(state);
    if (action >= lp.size()) {
        fail(ErrorCode::UnknownAction, "action index " + std::to_string(action) + " outside the state's action set");
    }
    std::vector<double> grad(theta_.size(), 0.0);
    for (std::size_t b = 0; b < lp.size(); ++b) {
        const double coeff = ((b == action ? 1.0 : 0.0) - std::exp(lp[b])) / temperature_;
        if (coeff == 0.0) continue;
        const auto& row = state.rows[b];
        for (std::size_t i = 0; i < row.size(); ++i) grad[i] += coeff * row[i];
    }
    return grad;
}

double action_logprob(const ToySoftmaxPolicy& policy, const ToyState& state, std::size_t action) {
    return policy.action_logprob(state, action);
}

Featurizer::Featurizer(ActionVocab vocab, std::size_t max_steps, std::size_t path_slots)
    : vocab_(std::move(vocab)), max_steps_(max_steps), path_slots_(path_slots) {}

std::size_t Featurizer::state_width() const {
    return 1 + (max_steps_ + 1) + (vocab_.size() + 1) + path_slots_;
}

ToyState Featurizer::featurize(const SolutionPath& path, std::span<const RoundProposal> history) const {
    std::vector<double> f(state_width(), 0.0);
    std::size_t at = 0;
    f[at++] = 1.0;
    f[at + std::min(history.size(), max_steps_)] = 1.0;
    at += max_steps_ + 1;
    // Last action slot; index vocab.size() stands for "no previous round".
    std::size_t last = vocab_.size();
    if (!history.empty()) {
        const auto token = ActionVocab::token(history.back());
        if (vocab_.contains(token)) last = vocab_.index_of(token);
    }
    f[at + last] = 1.0;
    at += vocab_.size() + 1;
    const auto plan = path.apis();
    for (std::size_t i = 0; i < std::min(plan.size(), path_slots_); ++i) {
        const bool executed = std::any_of(history.begin(), history.end(),
                                          [&](const RoundProposal& r) { return !r.is_finish() && r.action == plan[i]; });
        f[at + i] = executed ? 1.0 : 0.0;
    }

    ToyState state;
    const auto width = state_width();
    state.rows.assign(vocab_.size(), std::vector<double>(dimension(), 0.0));
    for (std::size_t a = 0; a < vocab_.size(); ++a) {
        std::copy(f.begin(), f.end(), state.rows[a].begin() + static_cast<std::ptrdiff_t>(a * width));
    }
    return state;
}

ToyAgentPolicy::ToyAgentPolicy(const ToySoftmaxPolicy& model, Featurizer featurizer, bool sample)
    : model_(model), featurizer_(std::move(featurizer)), sample_(sample) {
    if (model_.dimension() != featurizer_.dimension()) {
        fail(ErrorCode::InvalidRequest, "toy model and featurizer dimensions differ");
    }
}

TagList ToyAgentPolicy::extract_tags(const Instruction& instruction) { return instruction.gold_tags; }

SolutionPath ToyAgentPolicy::plan_path(const Instruction&, const TagList& tags) { return make_path(tags.apis); }

RoundProposal ToyAgentPolicy::propose_round(const RoundState& state, Rng& rng) {
    const std::vector<RoundProposal> history(state.history.begin(), state.history.end());
    const auto lp = model_.log_probs(featurizer_.featurize(state.task->path, history));
    std::size_t choice = 0;
    if (sample_) {
        double u = uniform_unit(rng);
        choice = lp.size() - 1;
        for (std::size_t a = 0; a < lp.size(); ++a) {
            u -= std::exp(lp[a]);
            if (u < 0.0) {
                choice = a;
                break;
            }
        }
    } else {
        choice = static_cast<std::size_t>(std::max_element(lp.begin(), lp.end()) - lp.begin());
    }
    const auto& key = featurizer_.vocab().key(choice);
    if (key == ActionVocab::kGiveAnswer) {
        return finish_round(FinishKind::GiveAnswer, summarize_answer(state.history));
    }
    if (key == ActionVocab::kGiveUp) return finish_round(FinishKind::GiveUpAndRestart);
    return call_round(key);
}

// ---------------------------------------------------------------------------

PlannerPrompts PlannerPrompts::load(const std::filesystem::path& dir) {
    const auto read = [&](const char* name) {
        std::ifstream in(dir / name, std::ios::binary);
        if (!in) fail(ErrorCode::IoFailure, "cannot read prompt template " + (dir / name).string());
        std::ostringstream buf;
        buf << in.rdbuf();
        return buf.str();
    };
    return {read("tag_extraction.txt"), read("path_planning.txt"), read("tree_generation.txt")};
}

std::string tag_block(const TagList& tags) {
    return "Cate_Tag: " + join(tags.categories, ", ") + ".\nTool_Tag: " + join(tags.tools, ", ") +
           ".\nAPI_Tag: " + join(tags.apis, ", ") + ".";
}

namespace {

std::vector<std::string> name_list(std::string_view text) {
    auto body = trim(text);
    while (!body.empty() && body.back() == '.') body.pop_back();
    std::vector<std::string> out;
    for (auto& item : split(body, ',')) {
        auto name = trim(item);
        if (!name.empty()) out.push_back(std::move(name));
    }
    return out;
}

std::optional<std::string> labelled_line(std::string_view text, std::string_view label) {
    const auto pos = text.find(label);
    if (pos == std::string_view::npos) return std::nullopt;
    auto rest = text.substr(pos + label.size());
    return std::string(rest.substr(0, rest.find('\n')));
}

} // namespace

TagList parse_tag_completion(std::string_view text) {
    const auto cate = labelled_line(text, "Cate_Tag:");
    const auto tool = labelled_line(text, "Tool_Tag:");
    const auto api = labelled_line(text, "API_Tag:");
    if (!cate || !tool || !api) fail(ErrorCode::ParseFailure, "completion lacks a Cate_Tag, Tool_Tag or API_Tag line");
    TagList tags{name_list(*cate), name_list(*tool), name_list(*api)};
    if (!tags.aligned()) fail(ErrorCode::ParseFailure, "tag lines have different lengths");
    if (tags.empty()) fail(ErrorCode::ParseFailure, "tag lines are empty");
    return tags;
}

SolutionPath parse_path_completion(std::string_view text) {
    auto body = text;
    if (const auto pos = body.rfind("Thought:"); pos != std::string_view::npos) body = body.substr(pos + 8);
    // The plan may wrap over several lines; it ends at the first blank line.
    std::string joined;
    for (const auto& line : split(body, '\n')) {
        const auto t = trim(line);
        if (t.empty()) {
            if (!joined.empty()) break;
            continue;
        }
        if (!joined.empty()) joined += ' ';
        joined += t;
    }
    auto steps = name_list(joined);
    if (steps.empty()) fail(ErrorCode::ParseFailure, "completion contains no solution path");
    SolutionPath path;
    for (std::size_t i = 0; i < steps.size(); ++i) {
        if (steps[i] == kFinish && i + 1 != steps.size()) {
            fail(ErrorCode::ParseFailure, "Finish appears before the end of the solution path");
        }
    }
    path.steps = std::move(steps);
    if (path.steps.back() != kFinish) {
        path.steps.emplace_back(kFinish);
        path.repaired = true;
    }
    return path;
}

RemotePolicy::RemotePolicy(ChatClient& client, PlannerPrompts prompts, const Registry& registry)
    : client_(client), prompts_(std::move(prompts)), registry_(registry) {}

std::string RemotePolicy::ask(const std::string& prompt) {
    try {
        return client_.complete(single_turn(prompt));
    } catch (const Error& e) {
        fail(ErrorCode::PolicyFailure, std::string("model call failed: ") + e.what());
    }
}

TagList RemotePolicy::extract_tags(const Instruction& instruction) {
    return parse_tag_completion(ask(fill_placeholder(prompts_.tag_extraction, "request", instruction.text)));
}

SolutionPath RemotePolicy::plan_path(const Instruction& instruction, const TagList& tags) {
    const auto request = instruction.text + "\n" + tag_block(tags);
    return parse_path_completion(ask(fill_placeholder(prompts_.path_planning, "request", request)));
}

std::string RemotePolicy::round_prompt(const RoundState& state) const {
    const auto& task = *state.task;
    std::vector<std::string> tool_lines;
    const auto tools = unique_in_order(task.tags.tools);
    for (std::size_t i = 0; i < tools.size(); ++i) tool_lines.push_back(std::to_string(i + 1) + "." + tools[i]);

    ordered_json api_list = ordered_json::array();
    for (const auto& api : unique_in_order(task.path.apis())) {
        ordered_json entry;
        entry["name"] = api;
        entry["description"] = registry_.has_api(api) ? registry_.description(api) : std::string();
        entry["parameters"] = {{"type", "object"}, {"properties", ordered_json::object()}, {"required", ordered_json::array()}};
        api_list.push_back(std::move(entry));
    }
    ordered_json finish;
    finish["name"] = std::string(kFinish);
    finish["description"] = "Call this function to provide the final answer or to restart.";
    finish["parameters"] = {{"type", "object"},
                            {"properties",
                             {{"return_type", {{"type", "string"}, {"enum", {"give_answer", "give_up_and_restart"}}}},
                              {"final_answer", {{"type", "string"}}}}},
                            {"required", {"return_type"}}};
    api_list.push_back(std::move(finish));

    const auto input = task.instruction.text + "\n" + tag_block(task.tags) +
                       "\nSolution_Path: " + join(task.path.steps, ", ") + ".";
    auto prompt = fill_placeholder(prompts_.tree_generation, "tool_list", join(tool_lines, " "));
    prompt = fill_placeholder(std::move(prompt), "api_list", detail::dump_line(api_list));
    prompt = fill_placeholder(std::move(prompt), "Input", input);

    for (const auto& round : state.history) {
        prompt += "\nThought: " + round.thought + "\nAction: " + round.action + "\nAction Input: " +
                  round.action_input + "\nObservation: " + observation_text(round.observation);
    }
    if (!state.tried.empty()) {
        std::vector<std::string> earlier;
        for (const auto& t : state.tried) earlier.push_back(ActionVocab::token(t));
        prompt += "\n(Earlier attempts from this state: " + join(earlier, ", ") + ". Try something different.)";
    }
    return prompt;
}

RoundProposal RemotePolicy::propose_round(const RoundState& state, Rng&) {
    const auto completion = ask(round_prompt(state));
    auto parsed = parse_react_text(completion);
    if (!parsed.call) fail(ErrorCode::PolicyFailure, "completion has no Action line");
    if (parsed.call->name == kFinish) {
        try {
            const auto info = parse_finish_arguments(parsed.call->arguments);
            return finish_round(info.kind, info.final_answer, parsed.thought);
        } catch (const Error& e) {
            fail(ErrorCode::PolicyFailure, std::string("bad Finish arguments: ") + e.what());
        }
    }
    return call_round(parsed.call->name, parsed.call->arguments.empty() ? "{}" : parsed.call->arguments,
                      parsed.thought);
}

} // namespace toolplanner
