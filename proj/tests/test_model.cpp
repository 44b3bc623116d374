#include <gtest/gtest.h>

#include <random>

#include "beameval/document.hpp"
#include "beameval/model.hpp"
#include "support/test_models.hpp"

using namespace beameval;
using namespace beameval::testing;

namespace {

ValidationErrorKind kind_of(const BeamModel& m) {
    auto err = check(m);
    EXPECT_TRUE(err.has_value());
    return err ? err->kind() : ValidationErrorKind::InvalidSpan;
}

}  // namespace

TEST(Validate, SimplySupportedPointLoadIsAccepted) {
    EXPECT_NO_THROW(validate(simply_supported({down(10, 4)})));
}

TEST(Validate, TwoPinnedSupportsAreIndeterminate) {
    BeamModel m{"pp", 10, {{SupportKind::Pinned, 0}, {SupportKind::Pinned, 10}}, {down(10, 4)}};
    EXPECT_EQ(reaction_components(m), 4);
    EXPECT_EQ(kind_of(m), ValidationErrorKind::Indeterminate);
    EXPECT_THROW(validate(m), ValidationError);
}

TEST(Validate, DegenerateUdlIsRejected) {
    auto m = simply_supported({udl_down(10, 6, 6)});
    EXPECT_EQ(kind_of(m), ValidationErrorKind::InvalidLoad);
}

TEST(Validate, ErrorKinds) {
    EXPECT_EQ(kind_of(simply_supported({down(10, 11)})), ValidationErrorKind::OutOfBounds);
    EXPECT_EQ(kind_of(simply_supported({})), ValidationErrorKind::EmptyLoads);
    EXPECT_EQ(kind_of(simply_supported({down(-1, 4)})), ValidationErrorKind::InvalidLoad);
    EXPECT_EQ(kind_of(simply_supported({udl_down(10, 8, 10.5)})), ValidationErrorKind::OutOfBounds);

    BeamModel dup{"d", 10, {{SupportKind::Pinned, 3}, {SupportKind::Roller, 3}}, {down(1, 1)}};
    EXPECT_EQ(kind_of(dup), ValidationErrorKind::DuplicateSupport);

    BeamModel unordered{"u", 10, {{SupportKind::Pinned, 6}, {SupportKind::Roller, 3}}, {down(1, 1)}};
    EXPECT_EQ(kind_of(unordered), ValidationErrorKind::OutOfBounds);

    BeamModel rollers{"r", 10, {{SupportKind::Roller, 0}, {SupportKind::Roller, 5}, {SupportKind::Roller, 10}},
                      {down(1, 1)}};
    EXPECT_EQ(reaction_components(rollers), 3);
    EXPECT_EQ(kind_of(rollers), ValidationErrorKind::Unstable);

    BeamModel lone_roller{"r", 10, {{SupportKind::Roller, 0}}, {down(1, 1)}};
    EXPECT_EQ(kind_of(lone_roller), ValidationErrorKind::Indeterminate);

    BeamModel bad_span{"s", 0, {{SupportKind::Fixed, 0}}, {down(1, 0)}};
    EXPECT_EQ(kind_of(bad_span), ValidationErrorKind::InvalidSpan);
}

TEST(Validate, LoadsOnSupportsAreLegal) {
    EXPECT_NO_THROW(validate(simply_supported({down(10, 0)})));
    EXPECT_NO_THROW(validate(simply_supported({down(10, 10)})));
    EXPECT_NO_THROW(validate(overhang({down(10, 5)})));
}

TEST(Resultant, Examples) {
    auto r = resultant(Load{udl_down(10, 2, 3)});
    EXPECT_DOUBLE_EQ(r.force_kN, -10.0);
    EXPECT_DOUBLE_EQ(r.centroid_m, 2.5);

    r = resultant(Load{up(10, 9)});
    EXPECT_DOUBLE_EQ(r.force_kN, 10.0);
    EXPECT_DOUBLE_EQ(r.centroid_m, 9.0);
}

TEST(Resultant, UdlMatchesQuadrature) {
    // Simpson's rule on w(x) and x*w(x) over [7.5, 9.5].
    const double a = 7.5, b = 9.5, w = 10.0;
    const int n = 1000;
    const double h = (b - a) / n;
    double force = 0.0, first = 0.0;
    for (int i = 0; i <= n; ++i) {
        const double x = a + i * h;
        const double c = (i == 0 || i == n) ? 1.0 : (i % 2 ? 4.0 : 2.0);
        force += c * w;
        first += c * w * x;
    }
    force *= h / 3.0;
    first *= h / 3.0;
    EXPECT_NEAR(force, 20.0, 1e-9);
    EXPECT_NEAR(first / force, 8.5, 1e-9);

    const auto r = resultant(Load{udl_up(10, 7.5, 9.5)});
    EXPECT_NEAR(r.force_kN, force, 1e-9);
    EXPECT_NEAR(r.centroid_m, first / force, 1e-9);
}

TEST(Resultant, IsAdditive) {
    std::mt19937_64 rng(7);
    for (int i = 0; i < 200; ++i) {
        const auto m = random_model(rng, i);
        double force = 0.0, first = 0.0;
        for (const auto& l : m.loads) {
            const auto r = resultant(l);
            force += r.force_kN;
            first += r.force_kN * r.centroid_m;
        }
        const auto total = resultant(m.loads);
        EXPECT_NEAR(total.force_kN, force, 1e-12 * (1 + std::abs(force)));
        if (std::abs(force) > 1e-6)
            EXPECT_NEAR(total.centroid_m * total.force_kN, first, 1e-9 * (1 + std::abs(first)));
    }
}

TEST(Format, NumbersAndLabels) {
    EXPECT_EQ(format_number(4.0), "4");
    EXPECT_EQ(format_number(7.5), "7.5");
    EXPECT_EQ(format_number(-0.0), "0");
    EXPECT_EQ(format_number(0.1), "0.1");
    EXPECT_EQ(support_label(0), "A");
    EXPECT_EQ(support_label(1), "B");
    EXPECT_EQ(support_label(26), "AA");
}

TEST(Document, RoundTrip) {
    std::mt19937_64 rng(11);
    for (int i = 0; i < 100; ++i) {
        const auto m = random_model(rng, i);
        const auto text = serialize_problem(m);
        EXPECT_EQ(parse_problem(text), m);
        EXPECT_EQ(serialize_problem(parse_problem(text)), text);
    }
}

TEST(Document, MissingSpanReportsField) {
    const std::string doc = R"({"id":"x","supports":[],"loads":[]})";
    try {
        parse_problem(doc);
        FAIL() << "expected ParseError";
    } catch (const ParseError& e) {
        EXPECT_EQ(e.field(), "span_m");
    }
}

TEST(Document, FieldAndLineLocus) {
    try {
        parse_problem(R"({"id":"x","span_m":10,"supports":[{"kind":"hinge","position_m":0}],"loads":[]})");
        FAIL();
    } catch (const ParseError& e) {
        EXPECT_EQ(e.field(), "supports[0].kind");
    }
    try {
        parse_problem("{\n  \"id\": \"x\",\n  \"span_m\": ,\n}");
        FAIL();
    } catch (const ParseError& e) {
        EXPECT_EQ(e.line(), 3u);
    }
    try {
        parse_problem(R"({"id":"x","span_m":10,"supports":[],"loads":[{"type":"udl","intensity_kN_per_m":1,"start_m":0,"end_m":1}]})");
        FAIL();
    } catch (const ParseError& e) {
        EXPECT_EQ(e.field(), "loads[0].direction");
    }
}

TEST(Document, EqualModelsSerializeIdentically) {
    auto a = simply_supported({down(10, 4), udl_down(10, 4, 5)});
    auto b = a;
    b.supports[0].position_m = -0.0;
    EXPECT_EQ(serialize_problem(a), serialize_problem(b));
    EXPECT_EQ(serialize_problem(a), serialize_problem(a));
}

TEST(Document, SerializeRejectsInvalidModel) {
    EXPECT_THROW(serialize_problem(simply_supported({})), ValidationError);
    EXPECT_THROW(load_problem(R"({"id":"x","span_m":10,"supports":[],"loads":[]})"), ValidationError);
}
