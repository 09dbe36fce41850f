// SPDX-License-Identifier: Apache-2.0
#include "toolplanner/evaluator.hpp"

#include "json_util.hpp"

#include <algorithm>
#include <cstdio>
#include <exception>
#include <thread>
#include <unordered_map>

namespace toolplanner {

using detail::ordered_json;

TaskLabel label_episode(const Episode& episode, const Instruction& instruction, const Registry& registry,
                        const RewardConfig& config) {
    TaskLabel out;
    out.instruction_id = instruction.id;
    out.level = instruction.level;
    if (!episode.final) return out;
    out.has_final = true;
    out.label = label_solution(*episode.final, instruction.gold_tags, registry, config);
    out.final_answer = episode.final->final_answer().value_or("");
    return out;
}

std::vector<TaskLabel> label_episodes(std::span<const Episode> episodes, std::span<const Instruction> instructions,
                                      const Registry& registry, const RewardConfig& config, std::size_t jobs) {
    std::unordered_map<std::string, const Instruction*> by_id;
    for (const auto& instruction : instructions) by_id.emplace(instruction.id, &instruction);
    std::vector<const Instruction*> paired;
    for (const auto& episode : episodes) {
        auto it = by_id.find(episode.instruction_id);
        if (it == by_id.end()) {
            fail(ErrorCode::InvalidRequest, "no instruction for episode '" + episode.instruction_id + "'");
        }
        paired.push_back(it->second);
    }

    std::vector<TaskLabel> out(episodes.size());
    jobs = std::clamp<std::size_t>(jobs, 1, std::max<std::size_t>(1, episodes.size()));
    std::vector<std::exception_ptr> errors(jobs);
    const auto work = [&](std::size_t worker) {
        try {
            for (std::size_t i = worker; i < episodes.size(); i += jobs) {
                out[i] = label_episode(episodes[i], *paired[i], registry, config);
            }
        } catch (...) {
            errors[worker] = std::current_exception();
        }
    };
    if (jobs == 1) {
        work(0);
    } else {
        std::vector<std::thread> pool;
        for (std::size_t w = 0; w < jobs; ++w) pool.emplace_back(work, w);
        for (auto& t : pool) t.join();
    }
    for (const auto& error : errors) {
        if (error) std::rethrow_exception(error);
    }
    return out;
}

double RateCell::rate() const {
    return total == 0 ? 0.0 : static_cast<double>(favorable) / static_cast<double>(total);
}

MatchResult match_rate(std::span<const TaskLabel> tasks, TagLevel level) {
    MatchResult out;
    out.level = level;
    for (auto tag_level : kAllTagLevels) {
        RateCell cell;
        for (const auto& task : tasks) {
            if (task.level == Level::Statement) continue;
            ++cell.total;
            if (task.has_final && task.label.match(tag_level)) ++cell.favorable;
        }
        out.parents[tag_level] = cell;
        if (tag_level == level) break;
    }
    out.overall = out.parents.at(level);
    if (out.overall.total == 0) fail(ErrorCode::EmptyEvalSet, "no tasks with a tag requirement to match");
    return out;
}

MatchResult match_rate(std::span<const Episode> episodes, std::span<const Instruction> instructions, TagLevel level,
                       const Registry& registry) {
    const auto tasks = label_episodes(episodes, instructions, registry);
    return match_rate(tasks, level);
}

RateCell pass_rate(std::span<const TaskLabel> tasks) {
    if (tasks.empty()) fail(ErrorCode::EmptyEvalSet, "no episodes to evaluate");
    RateCell cell;
    for (const auto& task : tasks) {
        ++cell.total;
        if (task.has_final && task.label.pass) ++cell.favorable;
    }
    return cell;
}

std::string_view to_string(Preference preference) {
    switch (preference) {
    case Preference::Candidate: return "candidate";
    case Preference::Reference: return "reference";
    case Preference::Tie: return "tie";
    }
    return "tie";
}

Preference parse_preference(std::string_view text) {
    for (auto p : {Preference::Candidate, Preference::Reference, Preference::Tie}) {
        if (text == to_string(p)) return p;
    }
    fail(ErrorCode::MalformedRecord, "unknown preference '" + std::string(text) + "'");
}

Preference MockJudge::compare(const Instruction&, const std::string& candidate, const std::string& reference) {
    const auto a = trim(candidate).size();
    const auto b = trim(reference).size();
    if (a > b) return Preference::Candidate;
    if (a < b) return Preference::Reference;
    return Preference::Tie;
}

LlmJudge::LlmJudge(ChatClient& client) : client_(client) {}

std::string LlmJudge::prompt(const Instruction& instruction, const std::string& candidate,
                             const std::string& reference) {
    return "You compare two answers to the same user instruction.\n"
           "Instruction: " +
           instruction.text + "\nAnswer A: " + candidate + "\nAnswer B: " + reference +
           "\nWhich answer fulfils the instruction better? Reply with exactly one word: A, B or Tie.";
}

Preference LlmJudge::parse_verdict(std::string_view completion) {
    auto text = to_lower(trim(completion));
    if (text.rfind("answer ", 0) == 0) text = text.substr(7);
    while (!text.empty() && (text.back() == '.' || text.back() == '!')) text.pop_back();
    if (text == "a") return Preference::Candidate;
    if (text == "b") return Preference::Reference;
    if (text == "tie") return Preference::Tie;
    fail(ErrorCode::JudgeFailure, "unreadable judge verdict: '" + std::string(completion) + "'");
}

Preference LlmJudge::compare(const Instruction& instruction, const std::string& candidate,
                             const std::string& reference) {
    std::string completion;
    try {
        completion = client_.complete(single_turn(prompt(instruction, candidate, reference)));
    } catch (const Error& e) {
        fail(ErrorCode::JudgeFailure, std::string("judge request failed: ") + e.what());
    }
    return parse_verdict(completion);
}

double WinTally::rate() const {
    const auto n = total();
    if (n == 0) return 0.0;
    return (static_cast<double>(candidate) + 0.5 * static_cast<double>(tie)) / static_cast<double>(n);
}

WinTally& WinTally::operator+=(const WinTally& other) {
    candidate += other.candidate;
    reference += other.reference;
    tie += other.tie;
    return *this;
}

WinTally win_rate(std::span<const std::string> answers, std::span<const std::string> references,
                  std::span<const Instruction> instructions, Judge& judge) {
    if (answers.size() != references.size() || answers.size() != instructions.size()) {
        fail(ErrorCode::InvalidRequest, "answers, references and instructions differ in length");
    }
    if (answers.empty()) fail(ErrorCode::EmptyEvalSet, "no answers to judge");
    WinTally tally;
    for (std::size_t i = 0; i < answers.size(); ++i) {
        switch (judge.compare(instructions[i], answers[i], references[i])) {
        case Preference::Candidate: ++tally.candidate; break;
        case Preference::Reference: ++tally.reference; break;
        case Preference::Tie: ++tally.tie; break;
        }
    }
    return tally;
}

double f1_score(double precision, double recall) {
    if (precision + recall == 0.0) return 0.0;
    return 2.0 * precision * recall / (precision + recall);
}

PRF prf1_counts(std::size_t overlap, std::size_t predicted, std::size_t gold) {
    if (predicted == 0 && gold == 0) return {1.0, 1.0, 1.0};
    PRF out;
    out.precision = predicted == 0 ? 0.0 : static_cast<double>(overlap) / static_cast<double>(predicted);
    out.recall = gold == 0 ? 0.0 : static_cast<double>(overlap) / static_cast<double>(gold);
    out.f1 = f1_score(out.precision, out.recall);
    return out;
}

PRF prf1(const std::set<std::string>& predicted, const std::set<std::string>& gold) {
    std::size_t overlap = 0;
    for (const auto& name : predicted) overlap += gold.count(name);
    return prf1_counts(overlap, predicted.size(), gold.size());
}

namespace {

struct Pool {
    std::size_t overlap = 0;
    std::size_t predicted = 0;
    std::size_t gold = 0;
    std::size_t tasks = 0;

    void add(const std::set<std::string>& pred, const std::set<std::string>& want) {
        for (const auto& name : pred) overlap += want.count(name);
        predicted += pred.size();
        gold += want.size();
        ++tasks;
    }
};

std::set<std::string> name_set(const std::vector<std::string>& names) { return {names.begin(), names.end()}; }

} // namespace

std::vector<ExtractionRow> compare_extraction(std::span<const Instruction> instructions, Policy& policy,
                                              const Registry& registry, std::span<const std::size_t> ks) {
    static constexpr std::size_t kDefaultKs[] = {1, 3, 5};
    if (ks.empty()) ks = kDefaultKs;

    std::map<Level, std::vector<Pool>> pools;
    for (const auto& instruction : instructions) {
        const auto tag_level = required_tag_level(instruction.level);
        if (!tag_level) continue;
        auto& row = pools[instruction.level];
        row.resize(ks.size() + 1);
        const auto gold = name_set(instruction.gold_tags.at(*tag_level));
        for (std::size_t i = 0; i < ks.size(); ++i) {
            std::set<std::string> retrieved;
            for (const auto& api : lexical_retrieve(instruction.text, registry, ks[i])) {
                retrieved.insert(registry.resolve(api, *tag_level));
            }
            row[i].add(retrieved, gold);
        }
        row[ks.size()].add(name_set(extract_tags(instruction, policy).at(*tag_level)), gold);
    }

    std::vector<ExtractionRow> out;
    for (const auto& [level, row] : pools) {
        for (std::size_t i = 0; i <= ks.size(); ++i) {
            ExtractionRow r;
            r.method = i < ks.size() ? "Retriever@" + std::to_string(ks[i]) : "Tag Extraction";
            r.level = level;
            r.tasks = row[i].tasks;
            r.scores = prf1_counts(row[i].overlap, row[i].predicted, row[i].gold);
            out.push_back(std::move(r));
        }
    }
    return out;
}

namespace {

// Tag levels reported for an instruction level: its required level and the
// coarser ones.
std::vector<TagLevel> reported_tag_levels(Level level) {
    std::vector<TagLevel> out;
    const auto required = required_tag_level(level);
    if (!required) return out;
    for (auto tag_level : kAllTagLevels) {
        out.push_back(tag_level);
        if (tag_level == *required) break;
    }
    return out;
}

double mean(const std::vector<double>& values) {
    if (values.empty()) return 0.0;
    double sum = 0.0;
    for (double v : values) sum += v;
    return sum / static_cast<double>(values.size());
}

std::string percent(double rate) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.1f", rate * 100.0);
    return buf;
}

std::string tag_letter(TagLevel level) {
    switch (level) {
    case TagLevel::Category: return "C";
    case TagLevel::Tool: return "T";
    case TagLevel::Api: return "A";
    }
    return "?";
}

std::string short_name(Level level) {
    switch (level) {
    case Level::Statement: return "State";
    case Level::Category: return "Cate";
    case Level::Tool: return "Tool";
    case Level::Api: return "API";
    case Level::Hybrid: return "Hybrid";
    }
    return "?";
}

std::string columns(const std::vector<std::string>& cells, std::size_t width) {
    std::string out;
    for (std::size_t i = 0; i < cells.size(); ++i) {
        std::string cell = cells[i];
        if (i + 1 < cells.size() && cell.size() < width) cell.append(width - cell.size(), ' ');
        else if (i + 1 < cells.size()) cell += ' ';
        out += cell;
    }
    return out + "\n";
}

} // namespace

double EvalReport::match_average() const {
    std::vector<double> cells;
    for (const auto& [level, metrics] : per_level) {
        for (const auto& [tag_level, cell] : metrics.match) {
            if (cell.total > 0) cells.push_back(cell.rate());
        }
    }
    return mean(cells);
}

double EvalReport::pass_average() const {
    std::vector<double> cells;
    for (const auto& [level, metrics] : per_level) {
        if (metrics.pass.total > 0) cells.push_back(metrics.pass.rate());
    }
    return mean(cells);
}

std::optional<double> EvalReport::win_average() const {
    std::vector<double> cells;
    for (const auto& [level, metrics] : per_level) {
        if (metrics.win && metrics.win->total() > 0) cells.push_back(metrics.win->rate());
    }
    if (cells.empty()) return std::nullopt;
    return mean(cells);
}

EvalReport aggregate_report(std::vector<TaskLabel> tasks) {
    if (tasks.empty()) fail(ErrorCode::EmptyEvalSet, "no episodes to evaluate");
    EvalReport report;
    report.tasks = std::move(tasks);
    report.pass_overall = pass_rate(report.tasks);

    for (const auto& task : report.tasks) {
        auto& metrics = report.per_level[task.level];
        ++metrics.pass.total;
        if (task.has_final && task.label.pass) ++metrics.pass.favorable;
        for (auto tag_level : reported_tag_levels(task.level)) {
            auto& cell = metrics.match[tag_level];
            ++cell.total;
            if (task.has_final && task.label.match(tag_level)) ++cell.favorable;
        }
        if (task.verdict) {
            WinTally one;
            switch (*task.verdict) {
            case Preference::Candidate: one.candidate = 1; break;
            case Preference::Reference: one.reference = 1; break;
            case Preference::Tie: one.tie = 1; break;
            }
            if (!metrics.win) metrics.win = WinTally{};
            *metrics.win += one;
            if (!report.win_overall) report.win_overall = WinTally{};
            *report.win_overall += one;
        }
    }
    const bool any_match = std::any_of(report.tasks.begin(), report.tasks.end(),
                                       [](const TaskLabel& t) { return t.level != Level::Statement; });
    if (any_match) report.match_overall = match_rate(report.tasks, TagLevel::Api).parents;
    return report;
}

EvalReport evaluate(std::span<const Episode> episodes, std::span<const Instruction> instructions,
                    const Registry& registry, const EvalOptions& options) {
    if (episodes.empty()) fail(ErrorCode::EmptyEvalSet, "no episodes to evaluate");
    auto tasks = label_episodes(episodes, instructions, registry, options.reward, options.jobs);
    if (options.judge) {
        std::unordered_map<std::string, const Instruction*> by_id;
        for (const auto& instruction : instructions) by_id.emplace(instruction.id, &instruction);
        // Judging stays sequential: remote judges are rate limited and the
        // mock is cheap.
        for (auto& task : tasks) {
            auto ref = options.references.find(task.instruction_id);
            if (ref == options.references.end()) continue;
            task.verdict = options.judge->compare(*by_id.at(task.instruction_id), task.final_answer, ref->second);
        }
    }
    return aggregate_report(std::move(tasks));
}

std::string format_report(const EvalReport& report, bool level_breakdown) {
    constexpr std::size_t kWidth = 10;
    std::string out;
    const auto cell_text = [](const RateCell& cell) { return cell.total == 0 ? std::string("-") : percent(cell.rate()); };

    out += "Match Rate (%)\n";
    if (level_breakdown) {
        std::vector<std::string> head{"level"};
        std::vector<std::string> row{"match"};
        for (auto level : {Level::Category, Level::Tool, Level::Api, Level::Hybrid}) {
            for (auto tag_level : reported_tag_levels(level)) {
                head.push_back(short_name(level) + "." + tag_letter(tag_level));
                auto it = report.per_level.find(level);
                RateCell cell;
                if (it != report.per_level.end()) {
                    if (auto c = it->second.match.find(tag_level); c != it->second.match.end()) cell = c->second;
                }
                row.push_back(cell_text(cell));
            }
        }
        head.push_back("Avg");
        row.push_back(percent(report.match_average()));
        out += columns(head, kWidth);
        out += columns(row, kWidth);
    }
    {
        std::vector<std::string> head{"overall"};
        std::vector<std::string> row{"match"};
        for (auto tag_level : kAllTagLevels) {
            head.push_back(std::string(to_string(tag_level)));
            auto it = report.match_overall.find(tag_level);
            row.push_back(it == report.match_overall.end() ? "-" : cell_text(it->second));
        }
        out += columns(head, kWidth);
        out += columns(row, kWidth);
    }

    out += "\nPass / Win Rate (%)\n";
    std::vector<std::string> head{"level"};
    std::vector<std::string> pass{"pass"};
    std::vector<std::string> win{"win"};
    if (level_breakdown) {
        for (auto level : kAllLevels) {
            head.push_back(short_name(level));
            auto it = report.per_level.find(level);
            if (it == report.per_level.end()) {
                pass.push_back("-");
                win.push_back("-");
                continue;
            }
            pass.push_back(cell_text(it->second.pass));
            win.push_back(it->second.win && it->second.win->total() > 0 ? percent(it->second.win->rate()) : "-");
        }
        head.push_back("Avg");
        pass.push_back(percent(report.pass_average()));
        const auto win_avg = report.win_average();
        win.push_back(win_avg ? percent(*win_avg) : "-");
    }
    head.push_back("Overall");
    pass.push_back(cell_text(report.pass_overall));
    win.push_back(report.win_overall && report.win_overall->total() > 0 ? percent(report.win_overall->rate()) : "-");
    out += columns(head, kWidth);
    out += columns(pass, kWidth);
    out += columns(win, kWidth);
    out += "\ntasks " + std::to_string(report.tasks.size()) + "\n";
    return out;
}

std::vector<std::string> report_records(const EvalReport& report) {
    std::vector<std::string> lines;
    for (const auto& task : report.tasks) {
        ordered_json doc;
        doc["record"] = "task";
        doc["instruction_id"] = task.instruction_id;
        doc["level"] = std::string(to_string(task.level));
        doc["has_final"] = task.has_final;
        doc["pass"] = task.label.pass;
        doc["match"] = {{"category", task.label.match_category},
                        {"tool", task.label.match_tool},
                        {"api", task.label.match_api}};
        doc["final_answer"] = task.final_answer;
        if (task.verdict) doc["verdict"] = std::string(to_string(*task.verdict));
        lines.push_back(detail::dump_line(doc));
    }
    const auto rate_record = [&](const std::string& metric, const std::string& level, const std::string& tag_level,
                                 std::size_t favorable, std::size_t total, double rate, std::size_t ties) {
        ordered_json doc;
        doc["record"] = "rate";
        doc["metric"] = metric;
        doc["level"] = level;
        if (!tag_level.empty()) doc["tag_level"] = tag_level;
        doc["favorable"] = favorable;
        if (metric == "win") doc["ties"] = ties;
        doc["total"] = total;
        doc["rate"] = rate;
        lines.push_back(detail::dump_line(doc));
    };
    for (const auto& [level, metrics] : report.per_level) {
        const std::string name(to_string(level));
        for (const auto& [tag_level, cell] : metrics.match) {
            rate_record("match", name, std::string(to_string(tag_level)), cell.favorable, cell.total, cell.rate(), 0);
        }
        rate_record("pass", name, "", metrics.pass.favorable, metrics.pass.total, metrics.pass.rate(), 0);
        if (metrics.win) {
            rate_record("win", name, "", metrics.win->candidate, metrics.win->total(), metrics.win->rate(),
                        metrics.win->tie);
        }
    }
    for (const auto& [tag_level, cell] : report.match_overall) {
        rate_record("match", "overall", std::string(to_string(tag_level)), cell.favorable, cell.total, cell.rate(), 0);
    }
    rate_record("pass", "overall", "", report.pass_overall.favorable, report.pass_overall.total,
                report.pass_overall.rate(), 0);
    if (report.win_overall) {
        rate_record("win", "overall", "", report.win_overall->candidate, report.win_overall->total(),
                    report.win_overall->rate(), report.win_overall->tie);
    }
    return lines;
}

std::vector<TaskLabel> parse_task_records(std::span<const std::string> lines) {
    std::vector<TaskLabel> out;
    for (std::size_t i = 0; i < lines.size(); ++i) {
        const auto what = "report record " + std::to_string(i + 1);
        const auto doc = detail::parse_json(lines[i], what);
        if (detail::optional_string(doc, "record") != "task") continue;
        const auto flag = [&](const detail::json& obj, const char* key) {
            const auto& value = detail::require(obj, key, what);
            if (!value.is_boolean()) fail(ErrorCode::MalformedRecord, what + ": '" + key + "' is not a boolean");
            return value.get<bool>();
        };
        TaskLabel task;
        task.instruction_id = detail::require_string(doc, "instruction_id", what);
        task.level = parse_level(detail::require_string(doc, "level", what));
        task.has_final = flag(doc, "has_final");
        task.label.pass = flag(doc, "pass");
        const auto& match = detail::require(doc, "match", what);
        task.label.match_category = flag(match, "category");
        task.label.match_tool = flag(match, "tool");
        task.label.match_api = flag(match, "api");
        task.final_answer = detail::optional_string(doc, "final_answer");
        if (doc.contains("verdict")) task.verdict = parse_preference(detail::require_string(doc, "verdict", what));
        out.push_back(std::move(task));
    }
    return out;
}

std::string format_extraction(std::span<const ExtractionRow> rows) {
    constexpr std::size_t kWidth = 16;
    std::string out = columns({"level", "method", "tasks", "P", "R", "F1"}, kWidth);
    char buf[32];
    const auto num = [&](double v) {
        std::snprintf(buf, sizeof buf, "%.4f", v);
        return std::string(buf);
    };
    for (const auto& row : rows) {
        out += columns({short_name(row.level), row.method, std::to_string(row.tasks), num(row.scores.precision),
                        num(row.scores.recall), num(row.scores.f1)},
                       kWidth);
    }
    return out;
}

} // namespace toolplanner
