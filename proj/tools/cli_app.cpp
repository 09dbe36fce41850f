// SPDX-License-Identifier: Apache-2.0
#include "cli_app.hpp"

#include "toolplanner/corpus.hpp"
#include "toolplanner/evaluator.hpp"
#include "toolplanner/instructions.hpp"
#include "toolplanner/llm_client.hpp"
#include "toolplanner/pair_sampler.hpp"
#include "toolplanner/policy.hpp"
#include "toolplanner/registry.hpp"
#include "toolplanner/reward.hpp"
#include "toolplanner/tool_env.hpp"
#include "toolplanner/trainer.hpp"
#include "toolplanner/tree_engine.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <exception>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <thread>
#include <vector>

namespace toolplanner::cli {

namespace {

namespace fs = std::filesystem;

// Runs f(0..n-1) on `jobs` threads. Results land in caller-owned slots, so
// output order never depends on completion order. The lowest failing index
// wins when several tasks throw.
template <class F>
void parallel_for(std::size_t n, std::size_t jobs, F&& f) {
    jobs = std::clamp<std::size_t>(jobs, 1, std::max<std::size_t>(1, n));
    std::vector<std::exception_ptr> errors(n);
    const auto worker = [&](std::size_t w) {
        for (std::size_t i = w; i < n; i += jobs) {
            try {
                f(i);
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    if (jobs == 1) {
        worker(0);
    } else {
        std::vector<std::thread> pool;
        for (std::size_t w = 0; w < jobs; ++w) pool.emplace_back(worker, w);
        for (auto& t : pool) t.join();
    }
    for (const auto& error : errors) {
        if (error) std::rethrow_exception(error);
    }
}

void write_text(const std::string& text, const fs::path& path) {
    if (path.empty()) {
        std::cout << text;
        return;
    }
    std::vector<std::string> lines;
    std::size_t start = 0;
    while (start < text.size()) {
        auto end = text.find('\n', start);
        if (end == std::string::npos) end = text.size();
        lines.push_back(text.substr(start, end - start));
        start = end + 1;
    }
    write_lines(lines, path);
}

// Chat client for the model-backed options: a replay of a recorded session,
// or the HTTP endpoint from the environment, optionally recorded.
struct ClientHolder {
    std::unique_ptr<ChatClient> inner;
    std::unique_ptr<RecordingClient> recorder;

    ChatClient& get() { return recorder ? static_cast<ChatClient&>(*recorder) : *inner; }
};

ClientHolder make_client(const std::string& session, const std::string& record) {
    ClientHolder holder;
    if (!session.empty()) {
        holder.inner = record_replay(session);
        return holder;
    }
    auto config = config_from_environment();
    if (config.endpoint.empty()) {
        fail(ErrorCode::InvalidRequest, "no model endpoint: set TOOLPLANNER_ENDPOINT or pass --session");
    }
    holder.inner = std::make_unique<HttpChatClient>(std::move(config));
    if (!record.empty()) holder.recorder = std::make_unique<RecordingClient>(*holder.inner, record);
    return holder;
}

struct TaskSet {
    std::vector<MGRecord> records;
    std::vector<Instruction> instructions;
    std::map<std::string, const MGRecord*> by_id;
};

TaskSet load_tasks(const std::string& path, const std::string& levels_filter) {
    TaskSet set;
    std::set<Level> keep;
    for (const auto& part : split(levels_filter, ',')) {
        if (!trim(part).empty()) keep.insert(parse_level(trim(part)));
    }
    for (auto& record : read_mg_records(path)) {
        if (!keep.empty() && !keep.contains(record.instruction.level)) continue;
        set.records.push_back(std::move(record));
    }
    for (const auto& record : set.records) {
        set.instructions.push_back(record.instruction);
        if (!set.by_id.emplace(record.instruction.id, &record).second) {
            fail(ErrorCode::MalformedRecord, "duplicate instruction id '" + record.instruction.id + "'");
        }
    }
    return set;
}

const MGRecord& record_for(const TaskSet& tasks, const std::string& id) {
    auto it = tasks.by_id.find(id);
    if (it == tasks.by_id.end()) fail(ErrorCode::InvalidRequest, "no instruction record for episode '" + id + "'");
    return *it->second;
}

Registry load_registry(const std::string& registry_path, const std::string& seeds_path = {}) {
    if (!registry_path.empty()) return load_registry_file(registry_path);
    if (!seeds_path.empty()) {
        const auto seeds = read_seed_tasks(seeds_path);
        const auto entries = registry_entries_from_seeds(seeds);
        return Registry::load(entries);
    }
    fail(ErrorCode::InvalidRequest, "a --registry file is required");
}

struct PolicyOptions {
    std::string kind = "oracle";
    std::string preset = "default";
    std::string params;
    std::string prompts;
    std::string session;
    std::string record;
};

// Owns whatever a policy choice needs; make() hands out a per-task policy.
class PolicyFactory {
public:
    PolicyFactory(const PolicyOptions& options, const Registry& registry) : options_(options), registry_(registry) {
        if (options.kind == "toy") {
            if (options.params.empty()) fail(ErrorCode::InvalidRequest, "--policy toy needs --params");
            toy_ = std::make_unique<ToyModel>(load_toy_model(options.params));
        } else if (options.kind == "llm") {
            client_ = make_client(options.session, options.record);
            remote_ = std::make_unique<RemotePolicy>(client_.get(), PlannerPrompts::load(options.prompts), registry);
        } else if (options.kind != "oracle" && options.kind != "stochastic") {
            fail(ErrorCode::InvalidRequest, "unknown policy '" + options.kind + "'");
        } else if (options.kind == "stochastic") {
            StochasticPolicy::preset(options.preset, {});
        }
    }

    /// Remote policies share one client and run sequentially.
    bool shared() const { return remote_ != nullptr; }

    std::unique_ptr<Policy> make() const {
        if (options_.kind == "oracle") return std::make_unique<OraclePolicy>();
        if (options_.kind == "stochastic") {
            return std::make_unique<StochasticPolicy>(StochasticPolicy::preset(options_.preset, registry_.apis()));
        }
        if (options_.kind == "toy") return std::make_unique<ToyAgentPolicy>(toy_->policy, toy_->featurizer);
        return nullptr;
    }

    Policy& remote() { return *remote_; }

private:
    PolicyOptions options_;
    const Registry& registry_;
    std::unique_ptr<ToyModel> toy_;
    ClientHolder client_;
    std::unique_ptr<RemotePolicy> remote_;
};

void add_policy_flags(CLI::App* cmd, PolicyOptions& options, const std::string& default_prompts) {
    options.prompts = default_prompts;
    cmd->add_option("--policy", options.kind, "oracle | stochastic | toy | llm")
        ->check(CLI::IsMember({"oracle", "stochastic", "toy", "llm"}));
    cmd->add_option("--preset", options.preset, "stochastic preset: default, never_finish, restart_heavy, chaotic, "
                                                "plan_follower");
    cmd->add_option("--params", options.params, "toy model file from train-toy")->check(CLI::ExistingFile);
    cmd->add_option("--prompts", options.prompts, "directory with the planner prompt templates");
    cmd->add_option("--session", options.session, "replay model completions from a recorded session")
        ->check(CLI::ExistingFile);
    cmd->add_option("--record", options.record, "record model completions to this session file");
}

// ---------------------------------------------------------------------------
// Stages

struct IngestArgs {
    std::string seeds, registry_out, seeds_out;
};

void ingest(const IngestArgs& a) {
    const auto seeds = read_seed_tasks(a.seeds);
    const auto entries = registry_entries_from_seeds(seeds);
    const auto registry = Registry::load(entries);
    write_registry_entries(entries, a.registry_out);
    if (!a.seeds_out.empty()) {
        std::vector<std::string> lines;
        for (const auto& seed : seeds) lines.push_back(serialize_seed_task(seed));
        write_lines(lines, a.seeds_out);
    }
    const auto c = registry.counts();
    std::cout << "seeds " << seeds.size() << " categories " << c.categories << " tools " << c.tools << " apis "
              << c.apis << "\n";
}

struct DatagenArgs {
    std::string seeds, registry, out, generator = "template", prompts, session, record, balance;
    std::uint64_t seed = 0;
    int retries = kDefaultGenerationRetries;
    std::size_t jobs = 1;
};

void datagen(const DatagenArgs& a) {
    const auto seeds = read_seed_tasks(a.seeds);
    const auto registry = load_registry(a.registry, a.seeds);
    std::vector<TaskGroup> groups(seeds.size());

    if (a.generator == "llm") {
        auto client = make_client(a.session, a.record);
        LlmGenerator generator(client.get(), GenerationPrompts::load(a.prompts));
        for (std::size_t i = 0; i < seeds.size(); ++i) groups[i] = expand_seed(seeds[i], registry, generator, a.retries);
    } else {
        parallel_for(seeds.size(), a.jobs, [&](std::size_t i) {
            TemplateGenerator generator;
            groups[i] = expand_seed(seeds[i], registry, generator, a.retries);
        });
    }

    std::vector<MGRecord> records;
    if (a.balance.empty()) {
        for (const auto& group : groups) {
            auto part = group.records();
            records.insert(records.end(), part.begin(), part.end());
        }
    } else {
        records = balance_dataset(groups, parse_balance(a.balance), a.seed);
    }
    write_records(records, a.out);
    std::cout << "seeds " << seeds.size() << " derived " << derived_instruction_count(groups) << " written "
              << records.size() << "\n";
}

struct RunArgs {
    std::string instructions, registry, env, out, levels;
    PolicyOptions policy;
    std::uint64_t seed = 0;
    std::size_t jobs = 1;
    std::size_t chain = 0;
    EngineLimits limits;
};

void run_stage(const RunArgs& a) {
    const auto tasks = load_tasks(a.instructions, a.levels);
    const auto registry = load_registry(a.registry);
    EnvFixture base;
    if (!a.env.empty()) base = load_env_fixture(a.env);
    base.validate(registry);
    const auto limits = a.chain > 0 ? EngineLimits::chain(a.chain) : a.limits;
    limits.validate();
    PolicyFactory factory(a.policy, registry);

    std::vector<Episode> episodes(tasks.records.size());
    const auto solve = [&](std::size_t i, Policy& policy) {
        const auto& record = tasks.records[i];
        EnvFixture env = base;
        for (const auto& [key, observation] : EnvFixture::from_trace(record.solution).responses) {
            env.responses.emplace(key, observation);
        }
        TaskContext task;
        task.instruction = record.instruction;
        task.tags = extract_tags(record.instruction, policy);
        task.path = plan_path(record.instruction, task.tags, policy);
        Rng rng(derive_seed(a.seed, record.instruction.id));
        episodes[i] = generate_tree(task, policy, env, limits, rng);
    };
    if (factory.shared()) {
        for (std::size_t i = 0; i < episodes.size(); ++i) solve(i, factory.remote());
    } else {
        parallel_for(episodes.size(), a.jobs, [&](std::size_t i) {
            auto policy = factory.make();
            solve(i, *policy);
        });
    }
    write_episodes(episodes, a.out);
    std::size_t answered = 0;
    for (const auto& episode : episodes) answered += episode.final ? 1 : 0;
    std::cout << "episodes " << episodes.size() << " answered " << answered << "\n";
}

struct ScoreArgs {
    std::string episodes, instructions, registry, out;
};

void score(const ScoreArgs& a) {
    const auto episodes = read_episodes(a.episodes);
    const auto tasks = load_tasks(a.instructions, "");
    const auto registry = load_registry(a.registry);
    std::vector<std::string> lines;
    std::map<int, std::size_t> histogram;
    std::size_t solutions = 0;
    for (const auto& episode : episodes) {
        const auto& record = record_for(tasks, episode.instruction_id);
        const auto scores = score_episode(episode, record.instruction, registry);
        for (const auto& s : scores) ++histogram[s.score];
        solutions += scores.size();
        auto dump = dump_episode(episode);
        lines.insert(lines.end(), dump.begin(), dump.end());
        auto part = dump_scores(episode.instruction_id, scores);
        lines.insert(lines.end(), part.begin(), part.end());
    }
    write_lines(lines, a.out);
    std::cout << "solutions " << solutions;
    for (const auto& [value, count] : histogram) std::cout << " R(" << value << ")=" << count;
    std::cout << "\n";
}

struct PairArgs {
    std::string episodes, instructions, registry, out, positives_out;
    std::uint64_t seed = 0;
};

void sample_pairs(const PairArgs& a) {
    const auto episodes = read_episodes(a.episodes);
    const auto tasks = load_tasks(a.instructions, "");
    const auto registry = load_registry(a.registry);
    std::vector<PairwiseResponse> pairs;
    for (const auto& episode : episodes) {
        const auto& record = record_for(tasks, episode.instruction_id);
        PairOptions options;
        options.plan = record.solution_path;
        Rng rng(derive_seed(a.seed, "pairs:" + episode.instruction_id));
        auto part = extract_pairs(episode.trees, record.instruction, registry, rng, options);
        pairs.insert(pairs.end(), part.begin(), part.end());
    }
    const auto report = validate_pairs(pairs);
    write_records(pairs, a.out);
    const auto positives = positives_from_pairs(pairs);
    if (!a.positives_out.empty()) write_records(positives, a.positives_out);
    std::cout << "pairs " << report.total;
    for (const auto& [origin, count] : report.by_origin) std::cout << " " << to_string(origin) << "=" << count;
    std::cout << " positives " << positives.size() << "\n";
}

struct TrainArgs {
    std::string pairs, positives, curve_out, params_out;
    TrainerConfig config;
    std::size_t max_steps = 4;
    std::size_t path_slots = 8;
};

void train_toy(const TrainArgs& a) {
    const auto pairs = read_pair_records(a.pairs);
    const auto positives = a.positives.empty() ? positives_from_pairs(pairs) : read_positive_records(a.positives);
    Featurizer featurizer(vocab_from_records(positives, pairs), a.max_steps, a.path_slots);
    const auto dataset = build_dataset(positives, pairs, featurizer);
    const ToySoftmaxPolicy initial(featurizer.dimension());
    const auto result = train(initial, dataset, a.config);
    write_loss_curve(result.curve, a.curve_out);
    if (!a.params_out.empty()) save_toy_model(result.policy, featurizer, a.params_out);
    char buf[160];
    std::snprintf(buf, sizeof buf, "epochs %d loss %.6f -> %.6f ordered %.4f\n", a.config.epochs,
                  result.curve.front().total, result.curve.back().total,
                  ordered_fraction(result.policy, dataset.pairs));
    std::cout << buf;
}

struct EvalArgs {
    std::string episodes, instructions, registry, out, records_out, judge = "mock", session, record;
    bool level_breakdown = false;
    std::size_t jobs = 1;
};

void eval_stage(const EvalArgs& a) {
    const auto episodes = read_episodes(a.episodes);
    const auto tasks = load_tasks(a.instructions, "");
    const auto registry = load_registry(a.registry);
    EvalOptions options;
    options.jobs = a.jobs;
    for (const auto& record : tasks.records) {
        if (record.solution.final && record.solution.final->final_answer) {
            options.references[record.instruction.id] = *record.solution.final->final_answer;
        }
    }
    MockJudge mock;
    ClientHolder client;
    std::unique_ptr<LlmJudge> llm;
    if (a.judge == "llm") {
        client = make_client(a.session, a.record);
        llm = std::make_unique<LlmJudge>(client.get());
        options.judge = llm.get();
    } else {
        options.judge = &mock;
    }
    const auto report = evaluate(episodes, tasks.instructions, registry, options);
    write_text(format_report(report, a.level_breakdown), a.out);
    if (!a.records_out.empty()) write_lines(report_records(report), a.records_out);
}

struct ReportArgs {
    std::string records, instructions, registry, out, levels;
    PolicyOptions policy;
    std::vector<std::size_t> ks{1, 3, 5};
    bool level_breakdown = true;
};

void report_stage(ReportArgs& a) {
    if (a.records.empty() && a.instructions.empty()) {
        fail(ErrorCode::InvalidRequest, "report needs --records and/or --instructions");
    }
    std::string text;
    if (!a.records.empty()) {
        const auto lines = read_lines(a.records);
        text += format_report(aggregate_report(parse_task_records(lines)), a.level_breakdown);
    }
    if (!a.instructions.empty()) {
        const auto tasks = load_tasks(a.instructions, a.levels);
        const auto registry = load_registry(a.registry);
        PolicyFactory factory(a.policy, registry);
        std::unique_ptr<Policy> owned;
        Policy* policy = nullptr;
        if (factory.shared()) {
            policy = &factory.remote();
        } else {
            owned = factory.make();
            policy = owned.get();
        }
        const auto rows = compare_extraction(tasks.instructions, *policy, registry, a.ks);
        if (!text.empty()) text += "\n";
        text += "Tag extraction vs retrieval\n" + format_extraction(rows);
    }
    write_text(text, a.out);
}

} // namespace

int run(int argc, char** argv) {
    CLI::App app{"Multi-granularity tool-use planning pipeline"};
    app.set_config("--config", "", "read flags from a TOML or INI file");
    app.require_subcommand(1);
    const std::string default_prompts = "fixtures/prompts";

    IngestArgs ingest_args;
    auto* ingest_cmd = app.add_subcommand("ingest", "validate seed tasks and build the registry");
    ingest_cmd->add_option("--seeds", ingest_args.seeds, "seed tasks (ToolBench query records)")
        ->required()
        ->check(CLI::ExistingFile);
    ingest_cmd->add_option("--registry-out", ingest_args.registry_out, "registry entries to write")->required();
    ingest_cmd->add_option("--seeds-out", ingest_args.seeds_out, "normalized seed tasks to write");

    DatagenArgs datagen_args;
    datagen_args.prompts = default_prompts;
    auto* datagen_cmd = app.add_subcommand("datagen", "expand seeds into multi-level instructions");
    datagen_cmd->add_option("--seeds", datagen_args.seeds, "seed tasks")->required()->check(CLI::ExistingFile);
    datagen_cmd->add_option("--registry", datagen_args.registry, "registry (default: built from the seeds)")
        ->check(CLI::ExistingFile);
    datagen_cmd->add_option("--out", datagen_args.out, "instruction records to write")->required();
    datagen_cmd->add_option("--seed", datagen_args.seed, "random seed");
    datagen_cmd->add_option("--generator", datagen_args.generator, "template | llm")
        ->check(CLI::IsMember({"template", "llm"}));
    datagen_cmd->add_option("--prompts", datagen_args.prompts, "directory with the generation prompts");
    datagen_cmd->add_option("--session", datagen_args.session, "replay a recorded model session")
        ->check(CLI::ExistingFile);
    datagen_cmd->add_option("--record", datagen_args.record, "record model completions to this file");
    datagen_cmd->add_option("--retries", datagen_args.retries, "generation attempts before the template fallback")
        ->check(CLI::PositiveNumber);
    datagen_cmd->add_option("--balance", datagen_args.balance, "per-level keep ratios, e.g. statement=0.5");
    datagen_cmd->add_option("--jobs", datagen_args.jobs, "worker threads")->check(CLI::PositiveNumber);

    RunArgs run_args;
    auto* run_cmd = app.add_subcommand("run", "generate solution trees");
    run_cmd->add_option("--instructions", run_args.instructions, "instruction records")
        ->required()
        ->check(CLI::ExistingFile);
    run_cmd->add_option("--registry", run_args.registry, "registry entries")->required()->check(CLI::ExistingFile);
    run_cmd->add_option("--env", run_args.env, "simulated tool responses")->check(CLI::ExistingFile);
    run_cmd->add_option("--out", run_args.out, "episode dump to write")->required();
    run_cmd->add_option("--levels", run_args.levels, "comma-separated instruction levels to run");
    run_cmd->add_option("--seed", run_args.seed, "random seed");
    run_cmd->add_option("--jobs", run_args.jobs, "worker threads")->check(CLI::PositiveNumber);
    run_cmd->add_option("--max-rounds-per-path", run_args.limits.max_rounds_per_path)->check(CLI::PositiveNumber);
    run_cmd->add_option("--max-children", run_args.limits.max_children)->check(CLI::PositiveNumber);
    run_cmd->add_option("--max-trees", run_args.limits.max_trees)->check(CLI::PositiveNumber);
    run_cmd->add_option("--max-total-rounds", run_args.limits.max_total_rounds)->check(CLI::PositiveNumber);
    run_cmd->add_option("--chain", run_args.chain, "single-branch baseline with this many attempts")
        ->check(CLI::PositiveNumber);
    add_policy_flags(run_cmd, run_args.policy, default_prompts);

    ScoreArgs score_args;
    auto* score_cmd = app.add_subcommand("score", "score every solution of every episode");
    score_cmd->add_option("--episodes", score_args.episodes)->required()->check(CLI::ExistingFile);
    score_cmd->add_option("--instructions", score_args.instructions)->required()->check(CLI::ExistingFile);
    score_cmd->add_option("--registry", score_args.registry)->required()->check(CLI::ExistingFile);
    score_cmd->add_option("--out", score_args.out, "score records to write")->required();

    PairArgs pair_args;
    auto* pair_cmd = app.add_subcommand("sample-pairs", "extract positive / negative round pairs");
    pair_cmd->add_option("--episodes", pair_args.episodes)->required()->check(CLI::ExistingFile);
    pair_cmd->add_option("--instructions", pair_args.instructions)->required()->check(CLI::ExistingFile);
    pair_cmd->add_option("--registry", pair_args.registry)->required()->check(CLI::ExistingFile);
    pair_cmd->add_option("--out", pair_args.out, "pair records to write")->required();
    pair_cmd->add_option("--positives-out", pair_args.positives_out, "positive rounds to write");
    pair_cmd->add_option("--seed", pair_args.seed, "random seed");

    TrainArgs train_args;
    auto* train_cmd = app.add_subcommand("train-toy", "fit the toy softmax policy on pairs");
    train_cmd->add_option("--pairs", train_args.pairs)->required()->check(CLI::ExistingFile);
    train_cmd->add_option("--positives", train_args.positives, "positive rounds (default: from the pairs)")
        ->check(CLI::ExistingFile);
    train_cmd->add_option("--curve-out", train_args.curve_out, "loss curve to write")->required();
    train_cmd->add_option("--params-out", train_args.params_out, "trained model to write");
    train_cmd->add_option("--epochs", train_args.config.epochs)->check(CLI::PositiveNumber);
    train_cmd->add_option("--lr", train_args.config.learning_rate)->check(CLI::NonNegativeNumber);
    train_cmd->add_option("--beta", train_args.config.beta)->check(CLI::NonNegativeNumber);
    train_cmd->add_option("--seed", train_args.config.seed, "random seed");
    train_cmd->add_option("--init-scale", train_args.config.init_scale)->check(CLI::NonNegativeNumber);
    train_cmd->add_option("--max-steps", train_args.max_steps)->check(CLI::PositiveNumber);
    train_cmd->add_option("--path-slots", train_args.path_slots)->check(CLI::PositiveNumber);

    EvalArgs eval_args;
    auto* eval_cmd = app.add_subcommand("eval", "match, pass and win rates");
    eval_cmd->add_option("--episodes", eval_args.episodes)->required()->check(CLI::ExistingFile);
    eval_cmd->add_option("--instructions", eval_args.instructions)->required()->check(CLI::ExistingFile);
    eval_cmd->add_option("--registry", eval_args.registry)->required()->check(CLI::ExistingFile);
    eval_cmd->add_flag("--level-breakdown", eval_args.level_breakdown, "per-level columns");
    eval_cmd->add_option("--judge", eval_args.judge, "mock | llm")->check(CLI::IsMember({"mock", "llm"}));
    eval_cmd->add_option("--session", eval_args.session, "replay a recorded judge session")
        ->check(CLI::ExistingFile);
    eval_cmd->add_option("--record", eval_args.record, "record judge completions to this file");
    eval_cmd->add_option("--out", eval_args.out, "report table (default: stdout)");
    eval_cmd->add_option("--records-out", eval_args.records_out, "machine-readable report records");
    eval_cmd->add_option("--jobs", eval_args.jobs, "worker threads")->check(CLI::PositiveNumber);

    ReportArgs report_args;
    auto* report_cmd = app.add_subcommand("report", "render saved eval records and compare tag extraction");
    report_cmd->add_option("--records", report_args.records, "records from eval --records-out")
        ->check(CLI::ExistingFile);
    report_cmd->add_option("--instructions", report_args.instructions, "instruction records for the comparison")
        ->check(CLI::ExistingFile);
    report_cmd->add_option("--registry", report_args.registry)->check(CLI::ExistingFile);
    report_cmd->add_option("--levels", report_args.levels, "comma-separated instruction levels");
    report_cmd->add_option("--k", report_args.ks, "retriever cut-offs")->check(CLI::PositiveNumber);
    report_cmd->add_option("--out", report_args.out, "report text (default: stdout)");
    add_policy_flags(report_cmd, report_args.policy, default_prompts);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (*ingest_cmd) ingest(ingest_args);
        else if (*datagen_cmd) datagen(datagen_args);
        else if (*run_cmd) run_stage(run_args);
        else if (*score_cmd) score(score_args);
        else if (*pair_cmd) sample_pairs(pair_args);
        else if (*train_cmd) train_toy(train_args);
        else if (*eval_cmd) eval_stage(eval_args);
        else if (*report_cmd) report_stage(report_args);
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return e.code() == ErrorCode::InvalidRequest ? kExitUsage : kExitDataError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitDataError;
    }
    return kExitOk;
}

} // namespace toolplanner::cli
