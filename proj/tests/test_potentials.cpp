#include <gtest/gtest.h>

#include <cmath>

#include "dirac1d/potentials.hpp"

using namespace dirac1d;

TEST(Potentials, SquareWell) {
    const auto w = make_square_well(2.5, 1.5);
    EXPECT_EQ(w.kind(), PotentialKind::square_well);
    EXPECT_EQ(w.cutoff(), 1.5);
    EXPECT_EQ(w.regular(0.0), -2.5);
    EXPECT_EQ(w.regular(1.5), -2.5);
    EXPECT_EQ(w.regular(1.5000001), 0.0);
    EXPECT_EQ(w.regular_full_line(-1.0), -2.5);
    EXPECT_DOUBLE_EQ(w.regular_integral(), -3.75);
    EXPECT_FALSE(w.has_point_terms());
    EXPECT_FALSE(w.is_free());
    EXPECT_THROW(make_square_well(1.0, 0.0), ValidationError);
    EXPECT_THROW(make_square_well(NAN, 1.0), ValidationError);
}

TEST(Potentials, FreeIsZero) {
    const auto f = make_free();
    EXPECT_TRUE(f.is_free());
    EXPECT_TRUE(f.regular_is_zero());
    EXPECT_EQ(f.regular(0.3), 0.0);
    EXPECT_EQ(f.regular_integral(), 0.0);
}

TEST(Potentials, DeltaFamilies) {
    const auto well = make_delta(1.0, DeltaSign::well);
    ASSERT_TRUE(well.origin_strength());
    EXPECT_EQ(*well.origin_strength(), -1.0);
    EXPECT_EQ(*make_delta(2.0, DeltaSign::barrier).origin_strength(), 2.0);
    EXPECT_THROW(make_delta(0.0, DeltaSign::well), ValidationError);

    const auto pair = make_delta_pair(-0.7, 0.4);
    EXPECT_EQ(pair.cutoff(), 0.4);
    ASSERT_EQ(pair.point_terms().size(), 1u);
    EXPECT_EQ(pair.point_terms()[0], (PointTerm{0.4, -0.7}));
    EXPECT_FALSE(pair.origin_strength());

    const auto dd = make_double_delta_well(1.5, 2.0);
    EXPECT_EQ(dd.point_terms()[0], (PointTerm{2.0, -1.5}));
    EXPECT_THROW(make_double_delta_well(-1.0, 1.0), ValidationError);
    EXPECT_THROW(make_delta_pair(0.0, 1.0), ValidationError);
}

TEST(Potentials, AssemblyRejectsBadPointTerms) {
    PotentialSpec::Parts p;
    p.cutoff = 1.0;
    p.points = {{1.5, 1.0}};
    EXPECT_THROW(PotentialSpec::assemble(p), ValidationError);
    p.points = {{0.5, 1.0}, {0.5, 2.0}};
    EXPECT_THROW(PotentialSpec::assemble(p), ValidationError);
    p.points = {{0.0, 1.0}, {0.0, 2.0}};
    EXPECT_THROW(PotentialSpec::assemble(p), ValidationError);
    p.points = {{0.7, 1.0}, {0.2, 2.0}};
    const auto s = PotentialSpec::assemble(p);
    EXPECT_EQ(s.point_terms()[0].position, 0.2);
}

TEST(Potentials, TabulatedInterpolatesAndJumps) {
    const auto t = load_tabulated({{0.0, -2.0}, {0.5, -1.0}, {0.5, -3.0}, {1.0, 0.0}});
    EXPECT_DOUBLE_EQ(t.regular(0.25), -1.5);
    EXPECT_DOUBLE_EQ(t.regular(0.75), -1.5);
    EXPECT_DOUBLE_EQ(t.regular(0.5 + 1e-12), -3.0 + 6.0 * 1e-12);
    EXPECT_EQ(t.regular(2.0), 0.0);
    EXPECT_DOUBLE_EQ(t.regular_integral(), -0.75 - 0.75);
    EXPECT_EQ(t.breakpoints(), std::vector<double>{0.5});
}

TEST(Potentials, TabulatedValidation) {
    EXPECT_THROW(load_tabulated({{0.0, 1.0}}), ValidationError);
    EXPECT_THROW(load_tabulated({{0.1, 1.0}, {1.0, 0.0}}), ValidationError);
    EXPECT_THROW(load_tabulated({{0.0, 1.0}, {1.0, 0.5}}), ValidationError);
    EXPECT_THROW(load_tabulated({{0.0, 1.0}, {0.6, 1.0}, {0.4, 0.0}}), ValidationError);
    EXPECT_THROW(load_tabulated({{0.0, 1.0}, {0.5, 1.0}, {0.5, 2.0}, {0.5, 3.0}, {1.0, 0.0}}), ValidationError);
    EXPECT_TRUE(load_tabulated({{0.0, 0.0}, {1.0, 0.0}}).is_free());
}

TEST(Potentials, CustomIntegralByQuadrature) {
    // -V0 (1 - x^2)^2 integrates to -8 V0 a / 15; the quadrature must agree with the closed form.
    const auto smooth = make_smooth_well(3.0, 1.2);
    const auto numeric = make_custom([&](double x) { return smooth.regular(x); }, 1.2);
    EXPECT_NEAR(numeric.regular_integral(), smooth.regular_integral(), 1e-12);
    EXPECT_NEAR(smooth.regular_integral(), -3.0 * 1.2 * 8.0 / 15.0, 1e-14);

    // Singular x^(-1/2) at the origin: integral 2 A0 sqrt(a).
    CustomOptions o;
    o.singular_origin = true;
    const auto sing = make_custom([](double x) { return 0.5 / std::sqrt(x); }, 2.0, o);
    EXPECT_NEAR(sing.regular_integral(), std::sqrt(2.0), 1e-10);
    const auto power = make_power_law(0.5, 1.0, 2.0);
    EXPECT_TRUE(power.singular_origin());
    EXPECT_NEAR(power.regular_integral(), std::sqrt(2.0), 1e-14);
    EXPECT_THROW(make_power_law(1.0, 2.5, 1.0), ValidationError);
}

TEST(Potentials, ScaledMultipliesEverything) {
    const auto pair = make_delta_pair(-2.0, 0.5).scaled(0.25);
    EXPECT_EQ(pair.point_terms()[0].strength, -0.5);
    const auto w = make_square_well(4.0, 1.0).scaled(0.5);
    EXPECT_EQ(w.regular(0.5), -2.0);
    EXPECT_DOUBLE_EQ(w.regular_integral(), -2.0);
    EXPECT_TRUE(make_square_well(4.0, 1.0).scaled(0.0).is_free());
}

TEST(Potentials, JsonRoundTrip) {
    const std::vector<PotentialSpec> all = {
        make_free(2.0),
        make_square_well(2.0, 1.0),
        make_delta(1.0, DeltaSign::barrier),
        make_delta(0.5, DeltaSign::well, 3.0),
        make_delta_pair(0.8, 0.3),
        make_double_delta_well(1.2, 0.9),
        load_tabulated({{0.0, -1.0}, {0.5, -0.5}, {1.0, 0.0}}),
        make_power_law(-0.3, 1.0, 1.0),
        make_smooth_well(2.0, 1.0),
        make_square_well(2.0, 1.0).scaled(0.3),
    };
    for (const auto& p : all) {
        const auto j = potential_to_json(p);
        const auto q = potential_from_json(j);
        EXPECT_EQ(q.kind(), p.kind()) << j.dump();
        EXPECT_EQ(q.cutoff(), p.cutoff()) << j.dump();
        EXPECT_EQ(q.point_terms(), p.point_terms()) << j.dump();
        EXPECT_DOUBLE_EQ(q.regular_integral(), p.regular_integral()) << j.dump();
        for (double x : {0.01, 0.2, 0.45, 0.8, 1.5}) EXPECT_DOUBLE_EQ(q.regular(x), p.regular(x)) << j.dump();
        EXPECT_EQ(potential_to_json(q), j);
    }
}

TEST(Potentials, JsonErrors) {
    using nlohmann::json;
    EXPECT_THROW(potential_from_json(json::array()), ValidationError);
    EXPECT_THROW(potential_from_json({{"kind", "nope"}}), ValidationError);
    EXPECT_THROW(potential_from_json({{"kind", "square_well"}, {"params", {{"V0", 1.0}}}}), ValidationError);
    EXPECT_THROW(potential_from_json({{"kind", "delta"}, {"params", {{"U0", 1.0}, {"sign", "up"}}}}),
                 ValidationError);
    EXPECT_THROW(potential_from_json({{"kind", "free"}, {"schema", 99}}), ValidationError);
    EXPECT_THROW(potential_from_json({{"kind", "tabulated"}, {"samples", {{0.0}}}}), ValidationError);
}
