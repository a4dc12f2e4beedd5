#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "knzeta/errors.hpp"
#include "knzeta/oracle.hpp"
#include "knzeta/zeta.hpp"

using namespace knzeta;

namespace {

const SVar kS = SVar::make(1, 2);

IntegralSpec one_dim(Domain d, std::vector<Factor> factors) {
    IntegralSpec s;
    s.name = "test";
    s.n = 1;
    s.domain = {d};
    s.factors = std::move(factors);
    return s;
}

Factor abs_x(int i, Exponent e) { return Factor{FactorKind::abs_x, i, 0, e}; }

double rel_err(Complex a, Complex b) { return std::abs(a - b) / std::max(1.0, std::abs(b)); }

Assignment constant(const AmplitudeContext &ctx, Complex v) {
    Assignment a;
    for (const SVar &s : ctx.vars) {
        a[s] = v;
    }
    return a;
}

Rational domain_measure(Domain d, int p) {
    const Rational inv(1, p);
    switch (d) {
    case Domain::Zp:
        return 1;
    case Domain::pZp:
        return inv;
    case Domain::Units:
        return 1 - inv;
    case Domain::UnitsNotOne:
        return 1 - 2 * inv;
    case Domain::Outside:
        break;
    }
    return 0;
}

} // namespace

TEST_CASE("integral of |x| over Z_2") {
    const IntegralSpec spec = one_dim(Domain::Zp, {abs_x(1, Exponent::numeric({1, 0}))});
    const TruncatedResult r = exact_truncated(spec, 2, {}, 10);
    REQUIRE(r.exact.has_value());
    CHECK(*r.exact == Rational(349525, 524288));
    CHECK(r.tail_bound > 0);
    CHECK(std::abs(r.value.real() - 2.0 / 3.0) <= r.tail_bound);
    CHECK(std::abs(exact_value(spec, 2, {}) - Complex(2.0 / 3.0, 0)) < 1e-14);
}

TEST_CASE("integral of 1 over Z_p and over the unit square") {
    for (int p : {2, 3, 5}) {
        const TruncatedResult r = exact_truncated(one_dim(Domain::Zp, {}), p, {}, 4);
        REQUIRE(r.exact.has_value());
        CHECK(*r.exact == 1);
        CHECK(r.tail_bound == 0);
    }
    IntegralSpec sq;
    sq.name = "units squared";
    sq.n = 2;
    sq.domain = {Domain::Units, Domain::Units};
    const TruncatedResult r = exact_truncated(sq, 3, {}, 3);
    REQUIRE(r.exact.has_value());
    CHECK(*r.exact == Rational(4, 9));
    const Estimate mc = mc_integral(sq, 3, {}, 10'000, 6, 7);
    CHECK(std::abs(mc.value - Complex(4.0 / 9.0, 0)) < 1e-12);
}

TEST_CASE("base_Z_F agrees with the oracle") {
    const SVar s1 = SVar::make(1, 2);
    const SVar s2 = SVar::make(1, 3);
    const SVar s3 = SVar::make(2, 3);
    const RationalFn z = base_Z_F(s1, s2, s3);
    const IntegralSpec spec = spec_base_Z_F(s1, s2, s3);
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(-0.2, 1.5);
    for (int p : {2, 3, 5}) {
        for (int k = 0; k < 4; ++k) {
            const Assignment pt{{s1, {u(rng), 0.3}}, {s2, {u(rng), -0.1}}, {s3, {u(rng), 0.2}}};
            CHECK(rel_err(exact_value(spec, p, pt), z.eval(p, pt)) < 1e-10);
        }
    }
}

TEST_CASE("Monte Carlo reproduces 2/3 and is deterministic") {
    const IntegralSpec spec = one_dim(Domain::Zp, {abs_x(1, Exponent::of(LinearForm(kS)))});
    const Assignment a{{kS, {1, 0}}};
    const Estimate e = mc_integral(spec, 2, a, 200'000, 8, 42);
    CHECK(std::abs(e.value.real() - 2.0 / 3.0) <= 4 * e.stderr_ + e.bias_bound + 1e-12);
    const Estimate again = mc_integral(spec, 2, a, 200'000, 8, 42);
    CHECK(again.value == e.value);
    CHECK(again.stderr_ == e.stderr_);
    McOptions one;
    one.threads = 1;
    McOptions four;
    four.threads = 4;
    const IntegralSpec z = spec_base_Z_F(SVar::make(1, 2), SVar::make(1, 3), SVar::make(2, 3));
    const Assignment b{{SVar::make(1, 2), {0.5, 0}}, {SVar::make(1, 3), {0.7, 0}}, {SVar::make(2, 3), {0.3, 0}}};
    const Estimate t1 = mc_integral(z, 3, b, 50'000, 5, 9, one);
    const Estimate t4 = mc_integral(z, 3, b, 50'000, 5, 9, four);
    CHECK(t1.value == t4.value);
    const Estimate other = mc_integral(z, 3, b, 50'000, 5, 10, one);
    CHECK(other.value != t1.value);
}

TEST_CASE("Monte Carlo is unbiased across seeds") {
    const IntegralSpec z = spec_base_Z_F(SVar::make(1, 2), SVar::make(1, 3), SVar::make(2, 3));
    const Assignment b{{SVar::make(1, 2), {0.5, 0}}, {SVar::make(1, 3), {-0.3, 0}}, {SVar::make(2, 3), {0.3, 0}}};
    const double truth = exact_value(z, 2, b).real();
    double sum = 0;
    double var = 0;
    const int runs = 40;
    for (int k = 0; k < runs; ++k) {
        const Estimate e = mc_integral(z, 2, b, 5'000, 4, 1000 + static_cast<std::uint64_t>(k));
        sum += e.value.real();
        var += e.stderr_ * e.stderr_;
    }
    const double mean = sum / runs;
    const double se = std::sqrt(var) / runs;
    CHECK(std::abs(mean - truth) <= 4 * se);
}

TEST_CASE("stratum measures add up to the domain measure") {
    for (int p : {2, 3, 5}) {
        for (int m = 1; m <= 6; ++m) {
            for (Domain d : {Domain::Zp, Domain::pZp, Domain::Units, Domain::UnitsNotOne}) {
                for (bool split : {false, true}) {
                    if (d == Domain::UnitsNotOne && p == 2) {
                        continue;
                    }
                    Rational total = 0;
                    for (const auto &[label, mu] : coordinate_strata(d, split, p, m)) {
                        CHECK(mu >= 0);
                        total += mu;
                    }
                    CHECK(total == domain_measure(d, p));
                }
            }
            const AmplitudeContext ctx = AmplitudeContext::make(5);
            for (const IntegralSpec &spec : {spec_L1(ctx, IndexSet{2, 3}), spec_M1(ctx, IndexSet{2, 3}),
                                             spec_Z0(ctx, IndexSet{2})}) {
                Rational total = 0;
                for (const Stratum &st : stratify(spec, p, m)) {
                    total += st.measure;
                }
                Rational want = 1;
                for (Domain d : spec.domain) {
                    want *= domain_measure(d, p);
                }
                CHECK(total == want);
            }
        }
    }
}

TEST_CASE("four-point amplitude by continuation") {
    ZetaEngine e(4);
    const AmplitudeContext &ctx = e.context();
    const Assignment pt = constant(ctx, {-0.4, 0});
    const auto sectors = amplitude_sectors(ctx);
    CHECK(sectors.size() == 2);
    for (int p : {2, 3}) {
        const Complex sym = e.ZN_sum().eval(p, pt);
        McOptions opt;
        opt.continuation = true;
        const Estimate est = mc_integral(sectors, p, pt, 200'000, 10, 5, opt);
        CHECK(std::abs(est.value - sym) <= 4 * est.stderr_ + est.bias_bound + 1e-9);
        Complex exact = 0;
        for (const IntegralSpec &s : sectors) {
            exact += exact_value(s, p, pt, true);
        }
        CHECK(rel_err(exact, sym) < 1e-10);
    }
    CHECK_THROWS_AS(exact_value(sectors[0], 2, pt, false), Error);
}

TEST_CASE("divergence probe grows geometrically") {
    const AmplitudeContext ctx = AmplitudeContext::make(4);
    const Assignment zero = constant(ctx, {0, 0});
    const ProbeResult r = divergence_probe(amplitude_sectors(ctx), 2, zero, 6);
    REQUIRE(r.partial.size() == 6);
    REQUIRE(r.diffs.size() == 5);
    for (std::size_t k = 0; k < r.partial.size(); ++k) {
        CHECK(std::abs(r.partial[k] - std::pow(2.0, static_cast<double>(k + 1))) < 1e-9);
    }
    for (double d : r.diffs) {
        CHECK(d > 0);
    }
    const IntegralSpec line = one_dim(Domain::Outside, {});
    const ProbeResult q = divergence_probe({line, one_dim(Domain::Zp, {})}, 3, {}, 4);
    for (std::size_t k = 0; k < q.partial.size(); ++k) {
        CHECK(std::abs(q.partial[k] - std::pow(3.0, static_cast<double>(k + 1))) < 1e-9);
    }
}

TEST_CASE("compare passes correct values and fails perturbed ones") {
    ZetaEngine e(5);
    const AmplitudeContext &ctx = e.context();
    const Assignment ones = constant(ctx, {1, 0});
    const IndexSet I{2, 3};
    const IntegralSpec spec = spec_L1(ctx, I);
    Budget b;
    for (int p : {2, 3}) {
        const Complex sym = e.L1_sum(I).eval(p, ones);
        CHECK(compare(sym, {spec}, p, ones, b).pass);
        CHECK_FALSE(compare(sym + Complex(0.1, 0), {spec}, p, ones, b).pass);
        Budget mc = b;
        mc.force_mc = true;
        mc.samples = 100'000;
        const Verdict v = compare(sym, {spec}, p, ones, mc);
        CHECK(v.method.rfind("mc_integral", 0) == 0);
        CHECK(v.pass);
        CHECK_FALSE(compare(sym + Complex(0.1, 0), {spec}, p, ones, mc).pass);
    }
}

TEST_CASE("single-variable M1 rejects the uncorrected closed form") {
    const IntegralSpec spec = spec_M1_single(kS);
    const Assignment a{{kS, {1, 0}}};
    Budget b;
    const RationalFn corrected = ZetaEngine(4).M1(IndexSet{2});
    const SVar own = SVar::make(2, 3);
    const Assignment a4{{own, {1, 0}}};
    CHECK(std::abs(corrected.eval(3, a4) - Complex(5.0 / 12.0, 0)) < 1e-14);
    CHECK(std::abs(M1_single_uncorrected(kS).eval(3, a) - Complex(7.0 / 12.0, 0)) < 1e-14);
    CHECK(std::abs(exact_value(spec, 3, a) - Complex(5.0 / 12.0, 0)) < 1e-14);
    CHECK(compare(Complex(5.0 / 12.0, 0), {spec}, 3, a, b).pass);
    const Estimate mc = mc_integral(spec, 3, a, 100'000, 10, 3);
    CHECK(std::abs(mc.value - Complex(5.0 / 12.0, 0)) <= 4 * mc.stderr_ + mc.bias_bound + 1e-12);
    CHECK_FALSE(compare(M1_single_uncorrected(kS), {spec}, 3, a, b).pass);
}

TEST_CASE("non-integrable integrands are rejected") {
    const IntegralSpec spec = one_dim(Domain::Zp, {abs_x(1, Exponent::numeric({-2, 0}))});
    try {
        (void)exact_truncated(spec, 2, {}, 6);
        FAIL("expected TailNotGeometric");
    } catch (const Error &e) {
        CHECK(e.code() == ErrorCode::TailNotGeometric);
    }
    CHECK_THROWS_AS(exact_value(spec, 2, {}), Error);
    CHECK(std::abs(exact_value(spec, 2, {}, true) - Complex(0.5 / (1 - 2.0), 0)) < 1e-14);
    IntegralSpec bad = spec;
    bad.factors[0].i = 2;
    CHECK_THROWS_AS(bad.validate(), Error);
}
