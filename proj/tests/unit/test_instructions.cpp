// SPDX-License-Identifier: Apache-2.0
#include "toolplanner/instructions.hpp"
#include "toolplanner/llm_client.hpp"

#include "../support/fixtures.hpp"

#include <doctest.h>

#include <map>

using namespace toolplanner;

namespace {

const std::string kBeachStatement = "I need to plan a beach party for my company.";

// Drops the last tag name on every call.
class ForgetfulGenerator : public InstructionGenerator {
public:
    int calls = 0;
    std::string generate(Level, const std::string& statement, const std::vector<std::string>& tags) override {
        ++calls;
        std::string text = statement + " Use";
        for (std::size_t i = 0; i + 1 < tags.size(); ++i) text += " " + tags[i];
        return text + ".";
    }
};

class BrokenGenerator : public InstructionGenerator {
public:
    std::string generate(Level, const std::string&, const std::vector<std::string>&) override {
        fail(ErrorCode::GeneratorFailure, "backend down");
    }
};

std::vector<TaskGroup> bundled_groups() {
    const auto registry = fixtures::bundled_registry();
    TemplateGenerator generator;
    std::vector<TaskGroup> groups;
    for (const auto& seed : fixtures::bundled_seeds()) groups.push_back(expand_seed(seed, registry, generator));
    return groups;
}

} // namespace

TEST_CASE("statement trimming on the beach-party and trivia seeds") {
    CHECK(trim_statement("I need to plan a beach party for my company. Can you give me the 5-day weather forecast "
                         "for Miami and suggest some cocktail recipes that complement the weather? Also, provide me "
                         "with the detailed recipe for a cocktail with the ID 45.") == kBeachStatement);
    CHECK(trim_statement("I'm planning a trivia night and I need a variety of questions. Can you provide me with a "
                         "music trivia question from the Music Trivia API?") ==
          "I'm planning a trivia night and I need a variety of questions.");
}

TEST_CASE("single request sentence falls back to itself") {
    CHECK(trim_statement("Provide the YEAR-END Top Artists chart.") == "Provide the YEAR-END Top Artists chart.");
}

TEST_CASE("sentence splitting") {
    CHECK(split_sentences("One. Two? Three!") == std::vector<std::string>{"One.", "Two?", "Three!"});
    CHECK(split_sentences("No terminator") == std::vector<std::string>{"No terminator"});
}

TEST_CASE("category instruction text for the beach party") {
    TemplateGenerator generator;
    TagList tags;
    tags.categories = {"Data", "Food", "Food"};
    tags.tools = {"weather", "the_cocktail_db", "the_cocktail_db"};
    tags.apis = {"get_5_day_forecast", "list_of_cocktails", "detailed_cocktail_recipe_by_id"};
    const auto inst = generate_instruction(Level::Category, kBeachStatement, tags, generator, 1001);
    CHECK(inst.text == "I need to plan a beach party for my company. Please provide me with relevant information "
                       "using tools from Data and Food categories.");
    CHECK(inst.level == Level::Category);
    CHECK(inst.gold_tags == tags);
    CHECK(inst.id == instruction_id(1001, Level::Category));

    const auto tool = generate_instruction(Level::Tool, kBeachStatement, tags, generator, 1001);
    CHECK(tool.text.find(kBeachStatement) == 0);
    CHECK(tool.text.find("weather") != std::string::npos);
    CHECK(tool.text.find("the_cocktail_db") != std::string::npos);
    CHECK(instruction_covers(tool.text, kBeachStatement, Level::Tool, tags));

    const auto api = generate_instruction(Level::Api, kBeachStatement, tags, generator, 1001);
    for (const auto& name : tags.apis) CHECK(api.text.find(name) != std::string::npos);
}

TEST_CASE("a generator that omits a tag falls back to the template") {
    ForgetfulGenerator generator;
    TagList tags;
    tags.categories = {"Travel", "Transportation"};
    tags.tools = {"Priceline", "ADSBx"};
    tags.apis = {"A1", "B1"};
    GenerationLog log;
    const auto inst = generate_instruction(Level::Tool, "I fly out tomorrow.", tags, generator, 7, 3, &log);
    CHECK(generator.calls == 3);
    CHECK(log.attempts == 3);
    CHECK(log.omissions == 3);
    CHECK(log.fallback);
    CHECK(inst.text.find("Priceline") != std::string::npos);
    CHECK(inst.text.find("ADSBx") != std::string::npos);
    CHECK(inst.text.find("I fly out tomorrow.") == 0);
}

TEST_CASE("generator errors propagate") {
    BrokenGenerator generator;
    TagList tags;
    tags.categories = {"Travel"};
    tags.tools = {"Priceline"};
    tags.apis = {"A1"};
    try {
        generate_instruction(Level::Category, "Trip.", tags, generator);
        FAIL("generated");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::GeneratorFailure);
    }
}

TEST_CASE("model-backed generator fills the request placeholder") {
    MockClient client;
    client.add_rule("Category: Data, Food, Food.", kBeachStatement + " Using Data and Food tools, help me out.");
    GenerationPrompts prompts{"Rewrite:\n{request}", "Rewrite:\n{request}", "Rewrite:\n{request}"};
    LlmGenerator generator(client, prompts);
    TagList tags;
    tags.categories = {"Data", "Food", "Food"};
    tags.tools = {"weather", "the_cocktail_db", "the_cocktail_db"};
    tags.apis = {"a", "b", "c"};
    CHECK(LlmGenerator::request_block(Level::Category, kBeachStatement, tags.categories) ==
          kBeachStatement + "\nCategory: Data, Food, Food.");
    const auto inst = generate_instruction(Level::Category, kBeachStatement, tags, generator);
    CHECK(inst.text == kBeachStatement + " Using Data and Food tools, help me out.");
    CHECK(client.calls() == 1);
}

TEST_CASE("bundled prompt templates load") {
    const auto prompts = GenerationPrompts::load(fixtures::fixture_path("prompts"));
    for (Level level : {Level::Category, Level::Tool, Level::Api}) {
        CHECK(prompts.for_level(level).find("{request}") != std::string::npos);
    }
}

TEST_CASE("one seed expands into five levels") {
    const auto registry = fixtures::bundled_registry();
    TemplateGenerator generator;
    const auto group = expand_seed(fixtures::beach_seed(), registry, generator);
    CHECK(group.instructions.size() == 5);
    CHECK(group.instructions.at(Level::Statement).text == kBeachStatement);
    CHECK(group.instructions.at(Level::Hybrid).text == fixtures::beach_seed().query);
    CHECK(group.instructions.at(Level::Category).text ==
          kBeachStatement + " Please provide me with relevant information using tools from Data and Food categories.");
    CHECK(group.tags.tools == std::vector<std::string>{"weather", "the_cocktail_db", "the_cocktail_db"});
    for (const auto& [level, inst] : group.instructions) {
        CHECK(inst.gold_tags == group.tags);
        CHECK(inst.source_seed == 1001);
    }
    CHECK(group.records().size() == 5);
}

TEST_CASE("expanding N seeds gives 4N derived instructions") {
    const auto groups = bundled_groups();
    const std::size_t n = groups.size();
    REQUIRE(n == 10);
    CHECK(derived_instruction_count(groups) == 4 * n);
    std::size_t hybrid = 0;
    std::size_t total = 0;
    for (const auto& group : groups) {
        total += group.instructions.size();
        hybrid += group.instructions.count(Level::Hybrid);
    }
    CHECK(hybrid == n);
    CHECK(total == 5 * n);
}

TEST_CASE("every generated instruction contains its statement and level tags") {
    for (const auto& group : bundled_groups()) {
        const auto& statement = group.instructions.at(Level::Statement).text;
        for (Level level : {Level::Category, Level::Tool, Level::Api}) {
            const auto& text = group.instructions.at(level).text;
            CHECK(text.find(statement) != std::string::npos);
            for (const auto& tag : group.tags.at(*required_tag_level(level))) {
                CHECK_MESSAGE(text.find(tag) != std::string::npos, text, " lacks ", tag);
            }
        }
    }
}

TEST_CASE("relevant api resolution") {
    const auto registry = fixtures::bundled_registry();
    CHECK(resolve_relevant_api("Trivia by API-Ninjas", "/v1/trivia", registry) == "v1_trivia_for_trivia_by_api_ninjas");
    CHECK_THROWS_AS(resolve_relevant_api("Nope", "/nothing", registry), Error);
}

TEST_CASE("round half up") {
    CHECK(round_half_up(0.5, 10) == 5);
    CHECK(round_half_up(0.5, 9) == 5);
    CHECK(round_half_up(0.5, 1) == 1);
    CHECK(round_half_up(0.25, 10) == 3);
    CHECK(round_half_up(1.0, 7) == 7);
    CHECK(round_half_up(0.0, 7) == 0);
}

TEST_CASE("balancing halves the statement tasks") {
    const auto groups = bundled_groups();
    const auto ratios = parse_balance("statement=0.5");
    const auto kept = balance_dataset(groups, ratios, 7);
    std::map<Level, std::size_t> per_level;
    for (const auto& record : kept) ++per_level[record.instruction.level];
    CHECK(per_level[Level::Statement] == 5);
    CHECK(per_level[Level::Category] == 10);
    CHECK(per_level[Level::Hybrid] == 10);
    CHECK(balance_dataset(groups, ratios, 7) == kept);
}

TEST_CASE("balancing at full ratio is the identity") {
    const auto groups = bundled_groups();
    BalanceRatios ratios;
    for (Level level : kAllLevels) ratios[level] = 1.0;
    std::vector<MGRecord> all;
    for (const auto& group : groups) {
        for (auto& record : group.records()) all.push_back(record);
    }
    CHECK(balance_dataset(groups, ratios, 3) == all);
}

TEST_CASE("balance ratio parsing") {
    const auto ratios = parse_balance("statement=0.5,category=0.25");
    CHECK(ratios.at(Level::Statement) == 0.5);
    CHECK(ratios.at(Level::Category) == 0.25);
    CHECK_THROWS_AS(parse_balance("statement=1.5"), Error);
    CHECK_THROWS_AS(parse_balance("bogus=0.5"), Error);
}
