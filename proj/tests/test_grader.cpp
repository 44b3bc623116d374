#include <gtest/gtest.h>

#include "beameval/benchmark.hpp"
#include "beameval/document.hpp"
#include "beameval/grader.hpp"
#include "beameval/statics.hpp"
#include "support/test_models.hpp"

using namespace beameval;
using namespace beameval::testing;

namespace {

const BeamModel& ss4() {
    static const BeamModel m = simply_supported({down(10, 4)});
    return m;
}

ReactionSet pair(double a, double b) {
    return {{{0, a, std::nullopt, std::nullopt}, {1, b, std::nullopt, std::nullopt}}};
}

ParsedAnswer expect_parsed(const AnswerParse& p) {
    if (const auto* f = std::get_if<AnswerParseFailure>(&p)) {
        ADD_FAILURE() << f->detail;
        return {};
    }
    return std::get<ParsedAnswer>(p);
}

BackendResponse text(std::string s) {
    BackendResponse r;
    r.raw_text = std::move(s);
    return r;
}

}  // namespace

TEST(ParseAnswer, PayloadSchema) {
    const auto a = expect_parsed(
        parse_payload(nlohmann::json::parse(R"({"reactions":[{"pos":0,"V":6},{"pos":10,"V":4}]})"), ss4()));
    EXPECT_EQ(a.reactions, pair(6, 4));
    const auto b = expect_parsed(parse_payload(
        nlohmann::json::parse(R"({"reactions":[{"position":10,"V":4},{"position":0,"V":6,"H":0}]})"), ss4()));
    ASSERT_EQ(b.reactions.entries.size(), 2u);
    EXPECT_EQ(b.reactions.entries[0].vertical_kN, 6.0);
    EXPECT_EQ(b.reactions.entries[0].horizontal_kN, 0.0);
}

TEST(ParseAnswer, PayloadMissingSupport) {
    const auto p = parse_payload(nlohmann::json::parse(R"({"reactions":[{"pos":0,"V":6}]})"), ss4());
    ASSERT_TRUE(std::holds_alternative<AnswerParseFailure>(p));
    EXPECT_EQ(std::get<AnswerParseFailure>(p).error_class, ErrorClass::MissingComponent);
}

TEST(ParseAnswer, PayloadMalformed) {
    for (const char* doc : {R"([1,2])", R"({"reactions":{}})", R"({"reactions":[{"pos":0,"V":"six"},{"pos":10,"V":4}]})",
                            R"({"reactions":[{"V":6}]})", R"({"units":"lb","reactions":[]})"}) {
        const auto p = parse_payload(nlohmann::json::parse(doc), ss4());
        ASSERT_TRUE(std::holds_alternative<AnswerParseFailure>(p)) << doc;
        EXPECT_EQ(std::get<AnswerParseFailure>(p).error_class, ErrorClass::ParseFailure) << doc;
    }
}

TEST(ParseAnswer, TextDirectionMapping) {
    const auto a = expect_parsed(parse_answer(text("R_A = 6 kN downward\nR_B = 4 kN upward\n"), ss4()));
    EXPECT_EQ(a.reactions, pair(-6, 4));
}

TEST(ParseAnswer, TextLastStatementWinsAndUnitsNormalize) {
    const auto a = expect_parsed(parse_answer(
        text("First guess R_A = 5 kN, R_B = 5 kN.\nCorrecting:\n**R_A = 6000 N (upward)**\nR_B = 4 kN upward"), ss4()));
    EXPECT_NEAR(a.reactions.entries[0].vertical_kN, 6.0, 1e-12);
    EXPECT_EQ(a.reactions.entries[1].vertical_kN, 4.0);
}

TEST(ParseAnswer, TextMoment) {
    const auto c = extended_tasks()[2];
    const auto a = expect_parsed(
        parse_answer(text("V_A = 60 kN upward\nM_A = 340 kN·m counterclockwise\n"), c.model, c.required));
    EXPECT_EQ(*a.reactions.entries[0].moment_kNm, 340.0);
    const auto cw = expect_parsed(parse_answer(text("R_A = 60 kN upward\nM_A = −340000 N·m\n"), c.model, c.required));
    EXPECT_NEAR(*cw.reactions.entries[0].moment_kNm, -340.0, 1e-9);

    const auto missing = parse_answer(text("R_A = 60 kN upward\n"), c.model, c.required);
    ASSERT_TRUE(std::holds_alternative<AnswerParseFailure>(missing));
    EXPECT_EQ(std::get<AnswerParseFailure>(missing).error_class, ErrorClass::MissingComponent);
}

TEST(ParseAnswer, ResultBlockInRawText) {
    const auto a = expect_parsed(parse_answer(
        text("noise\n===RESULT===\n{\"reactions\":[{\"position\":0,\"V\":6},{\"position\":10,\"V\":4}]}\n"), ss4()));
    EXPECT_EQ(a.reactions, pair(6, 4));
    const auto bad = parse_answer(text("===RESULT===\n{oops"), ss4());
    EXPECT_EQ(std::get<AnswerParseFailure>(bad).error_class, ErrorClass::ParseFailure);
}

TEST(ParseAnswer, NothingToParse) {
    const auto p = parse_answer(text("I cannot solve this."), ss4());
    EXPECT_EQ(std::get<AnswerParseFailure>(p).error_class, ErrorClass::ParseFailure);
}

TEST(Grade, Examples) {
    const auto oracle = solve_reactions(ss4());
    EXPECT_TRUE(grade(pair(6, 4), oracle, ss4()).correct);

    const auto flipped = grade(pair(-6, 4), oracle, ss4());
    EXPECT_FALSE(flipped.correct);
    EXPECT_EQ(flipped.error_class, ErrorClass::WrongDirection);

    const auto shared = grade(pair(5, 5), oracle, ss4());
    EXPECT_EQ(shared.error_class, ErrorClass::WrongMagnitude);
    ASSERT_EQ(shared.deltas.size(), 2u);
    EXPECT_FALSE(shared.deltas[0].ok);
}

TEST(Grade, ToleranceBoundary) {
    const auto oracle = solve_reactions(ss4());
    EXPECT_TRUE(grade(pair(6.0059, 4.0039), oracle, ss4()).correct);
    EXPECT_FALSE(grade(pair(6.0061, 4), oracle, ss4()).correct);
}

TEST(Grade, ZeroOracleAcceptsEitherDirection) {
    const auto m = simply_supported({down(10, 10)});
    const auto oracle = solve_reactions(m);
    ASSERT_NEAR(oracle.entries[0].vertical_kN, 0.0, 1e-12);
    EXPECT_TRUE(grade(pair(-0.0, 10), oracle, m).correct);
    EXPECT_TRUE(grade(pair(0.0000005, 10), oracle, m).correct);
    EXPECT_TRUE(grade(expect_parsed(parse_answer(text("R_A = 0 kN downward\nR_B = 10 kN upward"), m)), oracle, m).correct);
}

TEST(Grade, ExtraSupportOutranksEverything) {
    const auto m = overhang({down(10, 9)});
    const auto p = expect_parsed(parse_payload(
        nlohmann::json::parse(R"({"reactions":[{"pos":0,"V":5},{"pos":5,"V":5},{"pos":10,"V":5}]})"), m));
    const auto g = grade(p, solve_reactions(m), m);
    EXPECT_EQ(g.error_class, ErrorClass::ExtraSupport);
}

TEST(Grade, ModelDocumentFidelity) {
    const auto m = simply_supported({down(10, 1.5), udl_down(10, 1, 2)});
    const auto oracle = solve_reactions(m);

    auto with_model = [&](const BeamModel& doc, const ReactionSet& r) {
        nlohmann::json payload;
        payload["reactions"] = nlohmann::json::parse(reactions_to_json(r, doc).dump());
        payload["model"] = nlohmann::json::parse(model_to_json(doc).dump());
        return grade(expect_parsed(parse_payload(payload, m)), oracle, m);
    };
    EXPECT_TRUE(with_model(m, oracle).correct);

    auto extended = m;
    std::get<DistributedLoad>(extended.loads[1]).start_m = 0.0;
    const auto g = with_model(extended, solve_reactions(extended));
    EXPECT_EQ(g.error_class, ErrorClass::LoadMisapplication);

    auto extra = m;
    extra.supports.insert(extra.supports.begin() + 1, Support{SupportKind::Roller, 5.0});
    EXPECT_EQ(with_model(extra, oracle).error_class, ErrorClass::ExtraSupport);

    EXPECT_EQ(with_model(m, pair(10, 10)).error_class, ErrorClass::EquilibriumViolation);
}

TEST(Grade, MissingMomentOnCantilever) {
    const auto c = extended_tasks()[2];
    const ReactionSet no_moment{{{0, 60.0, 0.0, std::nullopt}}};
    EXPECT_EQ(grade(no_moment, solve_reactions(c.model), c.model, c.required).error_class,
              ErrorClass::MissingComponent);
}

TEST(Grade, ResponseFailureIsExecutionFailure) {
    BackendResponse r;
    r.failure = Failure{failure_kind::kCodeExtraction, "no fenced code block"};
    const auto g = grade_response(r, ss4(), solve_reactions(ss4()));
    EXPECT_FALSE(g.correct);
    EXPECT_EQ(g.error_class, ErrorClass::ExecutionFailure);
}

TEST(Grade, SelfConsistencyOverBenchmark) {
    auto cases = generate_all_sweeps();
    for (const auto& c : extended_tasks()) cases.push_back(c);
    for (const auto& c : cases) {
        const auto oracle = solve_reactions(c.model);
        EXPECT_TRUE(grade(oracle, oracle, c.model, c.required).correct) << c.id;
        // The same answer through the payload path.
        nlohmann::json payload{{"reactions", nlohmann::json::parse(reactions_to_json(oracle, c.model).dump())}};
        BackendResponse r;
        r.structured_answer = payload;
        EXPECT_TRUE(grade_response(r, c.model, oracle, c.required).correct) << c.id;
    }
}

TEST(Grade, UnitReformattingIsSymmetric) {
    for (const auto& c : generate_sweep({BeamType::Overhang, LoadCondition::III})) {
        const auto oracle = solve_reactions(c.model);
        auto kn = reactions_to_json(oracle, c.model);
        auto n = kn;
        for (auto& e : n) e["V"] = e["V"].get<double>() * 1000.0;
        BackendResponse a, b;
        a.structured_answer = nlohmann::json{{"reactions", nlohmann::json::parse(kn.dump())}};
        b.structured_answer = nlohmann::json{{"units", "N"}, {"reactions", nlohmann::json::parse(n.dump())}};
        const auto ga = grade_response(a, c.model, oracle), gb = grade_response(b, c.model, oracle);
        EXPECT_EQ(ga.correct, gb.correct);
        EXPECT_TRUE(gb.correct) << c.id;
    }
}

TEST(Grade, JsonRoundTrip) {
    const auto g = grade(pair(5, 5), solve_reactions(ss4()), ss4());
    const auto back = grade_from_json(nlohmann::json::parse(grade_to_json(g).dump()));
    EXPECT_EQ(back.correct, g.correct);
    EXPECT_EQ(back.error_class, g.error_class);
    EXPECT_EQ(back.deltas.size(), g.deltas.size());
    EXPECT_EQ(back.deltas[1].support_index, 1u);
}
