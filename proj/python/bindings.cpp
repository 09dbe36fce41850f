// SPDX-License-Identifier: Apache-2.0
#include "toolplanner/common.hpp"
#include "toolplanner/corpus.hpp"
#include "toolplanner/evaluator.hpp"
#include "toolplanner/instructions.hpp"
#include "toolplanner/pair_sampler.hpp"
#include "toolplanner/registry.hpp"
#include "toolplanner/reward.hpp"
#include "toolplanner/tool_env.hpp"
#include "toolplanner/trainer.hpp"
#include "toolplanner/tree_engine.hpp"

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

namespace py = pybind11;
using namespace toolplanner;

namespace {

Registry registry_from_dicts(const std::vector<std::map<std::string, std::string>>& rows) {
    std::vector<RegistryEntry> entries;
    for (const auto& row : rows) {
        const auto get = [&](const char* key) {
            auto it = row.find(key);
            return it == row.end() ? std::string() : it->second;
        };
        entries.push_back({get("category"), get("tool"), get("api"), get("description")});
    }
    return Registry::load(entries);
}

std::vector<std::string> expand_seeds(const std::string& seeds_path) {
    const auto seeds = read_seed_tasks(seeds_path);
    const auto entries = registry_entries_from_seeds(seeds);
    const auto registry = Registry::load(entries);
    TemplateGenerator generator;
    std::vector<std::string> out;
    for (const auto& seed : seeds) {
        for (const auto& record : expand_seed(seed, registry, generator).records()) {
            out.push_back(serialize_mg_record(record));
        }
    }
    return out;
}

std::vector<std::string> run_oracle(const std::vector<std::string>& mg_lines, const std::string& registry_path,
                                    const std::string& env_path, std::uint64_t seed) {
    const auto registry = load_registry_file(registry_path);
    const auto env = env_path.empty() ? EnvFixture{} : load_env_fixture(env_path);
    std::vector<std::string> out;
    for (const auto& line : mg_lines) {
        const auto record = parse_mg_record(line);
        OraclePolicy policy;
        TaskContext task{record.instruction, extract_tags(record.instruction, policy), {}};
        task.path = plan_path(record.instruction, task.tags, policy);
        Rng rng(derive_seed(seed, record.instruction.id));
        const auto episode = generate_tree(task, policy, env, EngineLimits{}, rng);
        for (auto& l : dump_episode(episode)) out.push_back(std::move(l));
    }
    return out;
}

py::dict evaluate_lines(const std::vector<std::string>& episode_lines, const std::vector<std::string>& mg_lines,
                        const std::string& registry_path) {
    const auto registry = load_registry_file(registry_path);
    const auto episodes = parse_episode_dump(episode_lines);
    std::vector<Instruction> instructions;
    for (const auto& line : mg_lines) instructions.push_back(parse_mg_record(line).instruction);
    const auto report = evaluate(episodes, instructions, registry);
    py::dict out;
    out["tasks"] = report.tasks.size();
    out["pass_rate"] = report.pass_overall.rate();
    py::dict match;
    for (const auto& [level, cell] : report.match_overall) match[py::str(std::string(to_string(level)))] = cell.rate();
    out["match_rate"] = match;
    return out;
}

} // namespace

PYBIND11_MODULE(_toolplanner, m) {
    m.doc() = "Multi-granularity tool-use planning core";

    py::register_exception<Error>(m, "ToolplannerError", PyExc_RuntimeError);

    py::enum_<Level>(m, "Level")
        .value("Statement", Level::Statement)
        .value("Category", Level::Category)
        .value("Tool", Level::Tool)
        .value("Api", Level::Api)
        .value("Hybrid", Level::Hybrid);
    py::enum_<TagLevel>(m, "TagLevel")
        .value("Category", TagLevel::Category)
        .value("Tool", TagLevel::Tool)
        .value("Api", TagLevel::Api);

    py::class_<Registry>(m, "Registry")
        .def_static("from_entries", &registry_from_dicts, py::arg("entries"))
        .def_static("from_file", [](const std::string& path) { return load_registry_file(path); })
        .def_static("from_seeds",
                    [](const std::string& seeds_path) {
                        const auto entries = registry_entries_from_seeds(read_seed_tasks(seeds_path));
                        return Registry::load(entries);
                    },
                    py::arg("seeds_path"))
        .def("save", [](const Registry& r, const std::string& path) { return write_registry_entries(r.entries(), path); },
             py::arg("path"))
        .def("counts",
             [](const Registry& r) {
                 const auto c = r.counts();
                 return py::make_tuple(c.categories, c.tools, c.apis);
             })
        .def("resolve", &Registry::resolve, py::arg("api"), py::arg("level"))
        .def_property_readonly("apis", &Registry::apis)
        .def_property_readonly("tools", &Registry::tools)
        .def_property_readonly("categories", &Registry::categories);

    m.def("trim_statement", &trim_statement, py::arg("hybrid_text"));
    m.def("split_sentences", &split_sentences, py::arg("text"));
    m.def("template_instruction",
          [](Level level, const std::string& statement, const std::vector<std::string>& tags) {
              return TemplateGenerator().generate(level, statement, tags);
          },
          py::arg("level"), py::arg("statement"), py::arg("tags"));
    m.def("round_half_up", &round_half_up, py::arg("fraction"), py::arg("count"));
    m.def("reward_value", &reward_value, py::arg("passed"), py::arg("matched"));
    m.def("is_meaningful_answer", [](const std::string& a) { return is_meaningful_answer(a); }, py::arg("answer"));
    m.def("f1_score", &f1_score, py::arg("precision"), py::arg("recall"));
    m.def("prf1",
          [](const std::set<std::string>& pred, const std::set<std::string>& gold) {
              const auto s = prf1(pred, gold);
              return py::make_tuple(s.precision, s.recall, s.f1);
          },
          py::arg("predicted"), py::arg("gold"));
    m.def("derive_seed", py::overload_cast<std::uint64_t, std::string_view>(&derive_seed), py::arg("seed"),
          py::arg("stream"));
    m.def("expand_seeds", &expand_seeds, py::arg("seeds_path"),
          "Instruction records (JSON lines) for every seed, template generator.");
    m.def("run_oracle", &run_oracle, py::arg("mg_lines"), py::arg("registry_path"), py::arg("env_path") = "",
          py::arg("seed") = 0, "Episode dump lines from the oracle policy.");
    m.def("evaluate", &evaluate_lines, py::arg("episode_lines"), py::arg("mg_lines"), py::arg("registry_path"));
}
