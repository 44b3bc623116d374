#include <gtest/gtest.h>

#include <filesystem>
#include <set>

#include "beameval/benchmark.hpp"
#include "beameval/document.hpp"
#include "beameval/fem.hpp"
#include "beameval/statics.hpp"
#include "support/test_models.hpp"

using namespace beameval;

TEST(Benchmark, EightFamilies) {
    const auto cases = generate_benchmark();
    ASSERT_EQ(cases.size(), 8u);
    std::set<std::string> ids;
    for (const auto& c : cases) {
        ids.insert(c.family);
        EXPECT_NO_THROW(validate(c.model));
        EXPECT_EQ(c.model.span_m, 10.0);
        EXPECT_EQ(c.model.supports[0].kind, SupportKind::Pinned);
        EXPECT_EQ(c.model.supports[0].position_m, 0.0);
    }
    EXPECT_EQ(ids.size(), 8u);
    EXPECT_EQ(cases[0].id, "SS-I@4");
    EXPECT_EQ(cases[4].model.supports[1].position_m, 5.0);
    EXPECT_EQ(cases[4].family, "OH-I");
}

TEST(Benchmark, FamilyIds) {
    for (const auto& f : families()) EXPECT_EQ(parse_family(f.id()), f);
    EXPECT_FALSE(parse_family("SS-V"));
}

TEST(Benchmark, LoadConditions) {
    const Family f3{BeamType::SimplySupported, LoadCondition::III};
    const auto m3 = family_model(f3, 7);
    ASSERT_EQ(m3.loads.size(), 2u);
    EXPECT_EQ(std::get<PointLoad>(m3.loads[0]).position_m, 7.0);
    EXPECT_EQ(std::get<DistributedLoad>(m3.loads[1]).start_m, 0.0);
    EXPECT_EQ(std::get<DistributedLoad>(m3.loads[1]).end_m, 10.0);

    const Family f4{BeamType::Overhang, LoadCondition::IV};
    const auto m4 = family_model(f4, 1);
    EXPECT_EQ(std::get<PointLoad>(m4.loads[0]).position_m, 1.5);
    EXPECT_EQ(std::get<DistributedLoad>(m4.loads[1]).start_m, 1.0);
    EXPECT_EQ(std::get<DistributedLoad>(m4.loads[1]).end_m, 2.0);

    BenchmarkOptions anchored;
    anchored.iv_mode = SweepMode::PointMoving;
    const auto a4 = family_model(f4, 8, anchored);
    EXPECT_EQ(std::get<PointLoad>(a4.loads[0]).position_m, 8.0);
    EXPECT_EQ(std::get<DistributedLoad>(a4.loads[1]).start_m, 4.0);
    EXPECT_EQ(generate_sweep(f4, anchored).size(), 11u);
}

TEST(Benchmark, SweepLengthsAndOrder) {
    const std::size_t expected[] = {11, 10, 11, 10};
    std::size_t total = 0;
    for (const auto& f : families()) {
        const auto sweep = generate_sweep(f);
        EXPECT_EQ(sweep.size(), expected[static_cast<int>(f.condition)]) << f.id();
        for (std::size_t i = 1; i < sweep.size(); ++i)
            EXPECT_DOUBLE_EQ(sweep[i - 1].position_m - sweep[i].position_m, 1.0);
        EXPECT_EQ(sweep.back().position_m, 0.0);
        for (const auto& c : sweep) EXPECT_NO_THROW(solve_reactions(c.model));
        total += sweep.size();
    }
    EXPECT_EQ(total, 84u);
    EXPECT_EQ(generate_all_sweeps().size(), 84u);
}

TEST(Benchmark, PointLoadSweepMatchesLeverRule) {
    // R_A = P (L - x) / L, R_B = P x / L for a simply supported span.
    for (const auto& c : generate_sweep({BeamType::SimplySupported, LoadCondition::I})) {
        const auto r = solve_reactions(c.model);
        EXPECT_NEAR(r.entries[0].vertical_kN, 10.0 * (10.0 - c.position_m) / 10.0, 1e-12) << c.id;
        EXPECT_NEAR(r.entries[1].vertical_kN, c.position_m, 1e-12) << c.id;
    }
}

TEST(Benchmark, SweepsAgreeWithBruteForce) {
    for (const auto& c : generate_all_sweeps()) {
        const auto r = solve_reactions(c.model);
        const auto bf = beameval::testing::brute_force_reactions(c.model);
        EXPECT_NEAR(r.entries[0].vertical_kN, bf.first, 1e-8) << c.id;
        EXPECT_NEAR(r.entries[1].vertical_kN, bf.second, 1e-8) << c.id;
    }
}

TEST(Extended, ThreeTasks) {
    const auto tasks = extended_tasks();
    ASSERT_EQ(tasks.size(), 3u);
    EXPECT_FALSE(tasks[0].required.moment);
    EXPECT_FALSE(tasks[1].required.moment);
    EXPECT_TRUE(tasks[2].required.moment);

    const auto a = solve_reactions(tasks[0].model);
    EXPECT_NEAR(a.entries[0].vertical_kN, 22.0, 1e-12);
    EXPECT_NEAR(a.entries[1].vertical_kN, -52.0, 1e-12);

    // Task (b): moments about the pinned support, 10*8.5 + 15*8.95 = 219.25.
    const auto b = solve_reactions(tasks[1].model);
    EXPECT_NEAR(b.entries[1].vertical_kN, 219.25 / 7.0, 1e-12);
    EXPECT_NEAR(b.entries[0].vertical_kN, 25.0 - 219.25 / 7.0, 1e-12);

    const auto c = solve_reactions(tasks[2].model);
    EXPECT_NEAR(c.entries[0].vertical_kN, 60.0, 1e-12);
    EXPECT_NEAR(*c.entries[0].moment_kNm, 340.0, 1e-12);

    for (const auto& t : tasks) {
        const auto fe = fem::analyze(t.model).reactions;
        const auto oracle = solve_reactions(t.model);
        for (std::size_t i = 0; i < oracle.entries.size(); ++i)
            EXPECT_NEAR(fe.entries[i].vertical_kN, oracle.entries[i].vertical_kN, 1e-9 * load_scale(t.model));
    }
}

TEST(ProblemText, ContainsGeometryAndLoads) {
    const auto m = generate_benchmark()[0].model;
    const auto text = render_problem_text(m, {});
    EXPECT_NE(text.find("pinned support at 0 m"), std::string::npos);
    EXPECT_NE(text.find("roller support at 10 m"), std::string::npos);
    EXPECT_NE(text.find("10 kN downward point load at 4 m"), std::string::npos);
    EXPECT_EQ(text.find("fixed-end moment"), std::string::npos);
    EXPECT_EQ(text, render_problem_text(m, {}));
}

TEST(ProblemText, CantileverRequestsMoment) {
    const auto c = extended_tasks()[2];
    const auto text = render_problem_text(c.model, c.required);
    EXPECT_NE(text.find("fixed-end moment M_A"), std::string::npos);
    EXPECT_NE(text.find("10 kN/m downward uniformly distributed load from 2.5 m to 7.5 m"), std::string::npos);
}

TEST(ProblemText, InjectiveOverBenchmark) {
    std::set<std::string> texts;
    auto cases = generate_all_sweeps();
    for (const auto& c : extended_tasks()) cases.push_back(c);
    for (const auto& c : cases) texts.insert(render_problem_text(c.model, c.required));
    EXPECT_EQ(texts.size(), cases.size());
}

TEST(ProblemTree, WriteAndReadBack) {
    const auto dir = std::filesystem::temp_directory_path() / "beameval_tree_test";
    std::filesystem::remove_all(dir);
    auto cases = generate_all_sweeps();
    const auto manifest = write_problem_tree(dir, cases);
    EXPECT_EQ(manifest["cases"].size(), 84u);
    EXPECT_EQ(manifest["cases"][0]["oracle"][0]["V"], 0.0);
    EXPECT_EQ(manifest["cases"][0]["oracle"][1]["V"], 10.0);

    const auto back = read_problem_tree(dir);
    ASSERT_EQ(back.size(), cases.size());
    for (std::size_t i = 0; i < cases.size(); ++i) {
        EXPECT_EQ(back[i].id, cases[i].id);
        EXPECT_EQ(back[i].model, cases[i].model);
        EXPECT_EQ(back[i].required, cases[i].required);
    }
    // Deterministic bytes on a second write.
    const auto first = serialize_problem(cases[5].model);
    write_problem_tree(dir, cases);
    EXPECT_EQ(serialize_problem(read_problem_tree(dir)[5].model), first);
    std::filesystem::remove_all(dir);
}
