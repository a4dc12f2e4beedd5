#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "knzeta/domain.hpp"
#include "knzeta/errors.hpp"

using namespace knzeta;

namespace {

std::vector<AffineCondition> family(const std::vector<AffineCondition> &all, const std::string &name) {
    std::vector<AffineCondition> out;
    for (const AffineCondition &c : all) {
        if (c.family == name) {
            out.push_back(c);
        }
    }
    return out;
}

Assignment zero_point(const AmplitudeContext &ctx) {
    Assignment a;
    for (const SVar &v : ctx.vars) {
        a[v] = {0, 0};
    }
    return a;
}

} // namespace

TEST_CASE("four-point primed conditions") {
    const AmplitudeContext ctx = AmplitudeContext::make(4);
    const auto conds = convergence_conditions(ctx, ConditionFamily::C_primed);
    const auto c1 = family(conds, "C1'");
    REQUIRE(c1.size() == 1);
    CHECK(c1[0].rel == Relation::Less);
    CHECK(c1[0].constant == 1);
    CHECK(c1[0].coeffs == std::map<SVar, Rational>{{SVar::make(1, 2), 1}, {SVar::make(2, 3), 1}});
    CHECK(c1[0].str(4) == "1 + Re s_1_2 + Re s_3_2 < 0");
    ZetaEngine e(4);
    const auto den = conditions_from_denominators(e.Z1(IndexSet{2}).den());
    REQUIRE(den.size() == 1);
    CHECK(den[0].coeffs == c1[0].coeffs);
    CHECK(den[0].constant == c1[0].constant);
}

TEST_CASE("C4' covers every variable and zero violates every C1'") {
    for (int N = 4; N <= 6; ++N) {
        const AmplitudeContext ctx = AmplitudeContext::make(N);
        const auto conds = convergence_conditions(ctx, ConditionFamily::C_primed);
        const auto c4 = family(conds, "C4'");
        CHECK(c4.size() == ctx.vars.size());
        for (const SVar &v : ctx.vars) {
            const bool found = std::any_of(c4.begin(), c4.end(), [&](const AffineCondition &c) {
                return c.constant == 1 && c.rel == Relation::Greater &&
                       c.coeffs == std::map<SVar, Rational>{{v, 1}};
            });
            CHECK(found);
        }
        const CheckReport rep = check_point(conds, zero_point(ctx));
        CHECK_FALSE(rep.pass);
        const auto c1 = family(conds, "C1'");
        CHECK(rep.families.at("C1'").passed == 0);
        CHECK(rep.families.at("C1'").total == static_cast<int>(c1.size()));
        CHECK(static_cast<int>(c1.size()) == (1 << ctx.T.size()) - 1);
    }
}

TEST_CASE("witness points") {
    const AmplitudeContext c5 = AmplitudeContext::make(5);
    const auto w5 = witness_point(c5);
    CHECK(w5.at(SVar::make(2, 3)) == Rational(-1, 3));
    CHECK(w5.at(SVar::make(1, 2)) == Rational(-7, 12));
    CHECK(w5.at(SVar::make(3, 4)) == Rational(-7, 12));
    const auto w4 = witness_point(AmplitudeContext::make(4));
    CHECK(w4.size() == 2);
    CHECK(1 + w4.at(SVar::make(1, 2)) + w4.at(SVar::make(2, 3)) < 0);
    for (int N = 4; N <= 6; ++N) {
        const AmplitudeContext ctx = AmplitudeContext::make(N);
        const auto conds = convergence_conditions(ctx, ConditionFamily::C_primed);
        const auto w = witness_point(ctx);
        for (const AffineCondition &c : conds) {
            CHECK(c.holds_exact(w));
        }
        CHECK(check_point(conds, to_assignment(w)).pass);
        for (const SVar &v : ctx.vars) {
            for (const Rational &d : {Rational(1, 100), Rational(-1, 100)}) {
                auto moved = w;
                moved[v] += d;
                CHECK(check_point(conds, to_assignment(moved)).pass);
            }
        }
    }
}

TEST_CASE("check_point reports violations and missing variables") {
    const AmplitudeContext ctx = AmplitudeContext::make(5);
    const auto conds = convergence_conditions(ctx, ConditionFamily::C_primed);
    Assignment a = to_assignment(witness_point(ctx));
    a[SVar::make(2, 3)] = {-2, 0};
    const CheckReport rep = check_point(conds, a);
    CHECK_FALSE(rep.pass);
    const bool c4_fail = std::any_of(rep.violated.begin(), rep.violated.end(), [](const AffineCondition &c) {
        return c.family == "C4'" && c.coeffs.count(SVar::make(2, 3)) == 1;
    });
    CHECK(c4_fail);
    a.erase(SVar::make(1, 2));
    try {
        (void)check_point(conds, a);
        FAIL("expected MissingAssignment");
    } catch (const Error &e) {
        CHECK(e.code() == ErrorCode::MissingAssignment);
    }
}

TEST_CASE("primed region lies inside the denominator region") {
    std::mt19937_64 rng(314);
    for (int N = 4; N <= 6; ++N) {
        const AmplitudeContext ctx = AmplitudeContext::make(N);
        ZetaEngine e(ctx);
        const auto den = convergence_conditions(e, ConditionFamily::from_denominators);
        const auto primed = convergence_conditions(ctx, ConditionFamily::C_primed);
        for (int k = 0; k < 100; ++k) {
            const Assignment pt = random_box_point(ctx, rng);
            CHECK(check_point(primed, pt).pass);
            CHECK(check_point(den, pt).pass);
        }
    }
}

TEST_CASE("midpoint convexity of the primed region") {
    std::mt19937_64 rng(271);
    for (int N = 4; N <= 6; ++N) {
        const AmplitudeContext ctx = AmplitudeContext::make(N);
        const auto primed = convergence_conditions(ctx, ConditionFamily::C_primed);
        std::uniform_real_distribution<double> u(-1.0, 0.2);
        int pairs = 0;
        std::vector<Assignment> feasible;
        while (pairs < 100) {
            Assignment pt;
            for (const SVar &v : ctx.vars) {
                pt[v] = {u(rng), 0};
            }
            if (!check_point(primed, pt).pass) {
                continue;
            }
            feasible.push_back(pt);
            if (feasible.size() >= 2) {
                const Assignment &a = feasible[feasible.size() - 2];
                Assignment mid;
                for (const SVar &v : ctx.vars) {
                    mid[v] = (a.at(v) + pt.at(v)) / 2.0;
                }
                CHECK(check_point(primed, mid).pass);
                ++pairs;
            }
        }
    }
}

TEST_CASE("pole hyperplanes") {
    const SVar s = SVar::make(1, 2);
    const auto one = pole_hyperplanes(RationalFn::inverse_factor(-1, LinearForm(s, -1)));
    REQUIRE(one.size() == 1);
    CHECK(one[0].constant == -1);
    CHECK(one[0].coeffs == std::map<SVar, long>{{s, -1}});
    ZetaEngine e(4);
    const auto z1 = pole_hyperplanes(e.Z1(IndexSet{2}));
    REQUIRE(z1.size() == 1);
    CHECK(z1[0].str(4) == "1 + Re s_1_2 + Re s_3_2 = 0");
    CHECK(pole_hyperplanes(e.ZN()).size() == 3);
    const PoleHyperplane back = PoleHyperplane::from_json(z1[0].to_json());
    CHECK(back.constant == z1[0].constant);
    CHECK(back.coeffs == z1[0].coeffs);
}

TEST_CASE("every pole hyperplane has a convergence-condition shape") {
    for (int N = 4; N <= 6; ++N) {
        ZetaEngine e(N);
        const auto planes = pole_hyperplanes(e.ZN_sum().den_union());
        CHECK(!planes.empty());
        for (const ShapeMatch &m : audit_pole_shapes(e.context(), planes)) {
            CAPTURE(m.plane.str(N));
            CHECK(m.shape.has_value());
            for (const auto &[v, c] : m.plane.coeffs) {
                CHECK(std::abs(c) == 1);
            }
        }
    }
}

TEST_CASE("condition JSON round trip and negation") {
    const AmplitudeContext ctx = AmplitudeContext::make(5);
    const auto w = witness_point(ctx);
    for (const AffineCondition &c : convergence_conditions(ctx, ConditionFamily::C_primed)) {
        CHECK(AffineCondition::from_json(nlohmann::json::parse(c.to_json().dump())) == c);
        CHECK(c.negated().holds_exact(w) != c.holds_exact(w));
    }
}
