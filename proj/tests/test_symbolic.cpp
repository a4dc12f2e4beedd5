#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "knzeta/errors.hpp"
#include "knzeta/symbolic.hpp"

using namespace knzeta;

namespace {

const SVar S = SVar::make(1, 2);
const SVar T = SVar::make(2, 3);
const SVar U = SVar::make(1, 3);

PrimeLaurent one_minus_inv_p() { return PrimeLaurent(1) - PrimeLaurent::p_pow(-1); }

// 1 / (1 - p^{a - v})
RationalFn inv(int a, SVar v) { return RationalFn::inverse_factor(a, LinearForm(v, -1)); }

double rel_err(Complex a, Complex b) { return std::abs(a - b) / std::max(1.0, std::abs(b)); }

RationalFn random_fn(std::mt19937_64 &rng) {
    std::uniform_int_distribution<int> coef(-3, 3);
    std::uniform_int_distribution<int> pw(-2, 2);
    std::uniform_int_distribution<int> pick(0, 2);
    const SVar vars[] = {S, T, U};
    PolyExpr num;
    for (int k = 0; k < 3; ++k) {
        int c = coef(rng);
        if (c == 0) {
            c = 1;
        }
        num += PolyExpr::monomial(PrimeLaurent::monomial(Rational(c), pw(rng)), LinearForm(vars[pick(rng)], coef(rng)));
    }
    RationalFn x(num);
    for (int k = 0, n = pick(rng); k < n; ++k) {
        x = x * inv(-1 - pick(rng), vars[pick(rng)]);
    }
    return x;
}

Assignment random_point(std::mt19937_64 &rng) {
    std::uniform_real_distribution<double> re(0.2, 1.5);
    std::uniform_real_distribution<double> im(-1.0, 1.0);
    return {{S, {re(rng), im(rng)}}, {T, {re(rng), im(rng)}}, {U, {re(rng), im(rng)}}};
}

} // namespace

TEST_CASE("SVar canonical order and variable set") {
    CHECK(SVar::make(3, 2) == SVar::make(2, 3));
    CHECK(SVar::parse("s_3_2") == SVar::make(2, 3));
    CHECK(SVar::make(2, 3).key() == "s_2_3");
    CHECK(SVar::make(2, 3).display(4) == "s_3_2");
    CHECK_THROWS_AS(SVar::checked(1, 4, 5), Error);
    CHECK_NOTHROW(SVar::checked(4, 2, 5));
    for (int N = 4; N <= 8; ++N) {
        CHECK(static_cast<int>(amplitude_variables(N).size()) == N * (N - 3) / 2);
    }
    CHECK_THROWS_AS(SVar::parse("t_1_2"), Error);
}

TEST_CASE("LinearForm normalizes zero entries") {
    const LinearForm a(S, 2);
    const LinearForm b(S, -2);
    CHECK((a + b).empty());
    CHECK((a + LinearForm(T)).coeff(T) == 1);
    CHECK(LinearForm::from_json((a + LinearForm(T)).to_json()) == a + LinearForm(T));
}

TEST_CASE("PrimeLaurent arithmetic and counts") {
    const PrimeLaurent f = PrimeLaurent::falling(1, 3);
    CHECK(f.eval_exact(5) == Rational(24));
    CHECK(PrimeLaurent::p_minus(2).eval_exact(7) == Rational(5));
    CHECK((one_minus_inv_p() * PrimeLaurent::p_pow(1)).eval_exact(3) == Rational(2));
    CHECK((f - f).is_zero());
    CHECK(PrimeLaurent::from_json(f.to_json()) == f);
}

TEST_CASE("add with zero is the identity") {
    const RationalFn x = RationalFn::constant(one_minus_inv_p()) * inv(-1, S);
    CHECK(x + RationalFn() == x);
}

TEST_CASE("inverse pair cancels to one") {
    const RationalFn a = RationalFn::constant(one_minus_inv_p());
    const RationalFn b(PolyExpr(PrimeLaurent(1)), {DenFactor{-1, LinearForm(), 1}});
    const RationalFn prod = rat_mul(a, b);
    CHECK(prod.den().empty());
    CHECK(prod == RationalFn::constant(PrimeLaurent(1)));
}

TEST_CASE("common denominator of two simple fractions") {
    const RationalFn sum = rat_add(inv(-1, S), inv(-1, T));
    CHECK(sum.den().size() == 2);
    const Assignment a{{S, {1, 0}}, {T, {1, 0}}};
    const double x = 1.0 / (1 - 0.25);
    CHECK(std::abs(sum.eval(2, a) - Complex(2 * x, 0)) < 1e-12);
    // Trial division finds no factor of the numerator.
    CHECK(rat_reduce(sum) == sum);
    std::mt19937_64 rng(7);
    for (int k = 0; k < 3; ++k) {
        const Assignment pt = random_point(rng);
        const Complex direct = 1.0 / (1.0 - std::pow(Complex(3, 0), Complex(-1, 0) - pt.at(S))) +
                               1.0 / (1.0 - std::pow(Complex(3, 0), Complex(-1, 0) - pt.at(T)));
        CHECK(rel_err(sum.eval(3, pt), direct) < 1e-12);
    }
}

TEST_CASE("reduce cancels exactly dividing factors") {
    const DenFactor f{-1, LinearForm(S, -1), 1};
    const PolyExpr one_minus(PolyExpr(PrimeLaurent(1)) -
                             PolyExpr::monomial(PrimeLaurent::p_pow(-1), LinearForm(S, -1)));
    const RationalFn x(one_minus, {f});
    CHECK(rat_reduce(x) == RationalFn::constant(PrimeLaurent(1)));
    const RationalFn y(one_minus * PolyExpr(one_minus_inv_p()), {f});
    CHECK(rat_reduce(y) == RationalFn::constant(one_minus_inv_p()));
    CHECK(rat_reduce(rat_reduce(y)) == rat_reduce(y));
}

TEST_CASE("eval_numeric examples and errors") {
    const RationalFn x = RationalFn::constant(one_minus_inv_p()) * inv(-1, S);
    CHECK(std::abs(eval_numeric(x, 2, {{S, {1, 0}}}) - Complex(2.0 / 3.0, 0)) < 1e-14);
    CHECK(std::abs(RationalFn::constant(PrimeLaurent(1)).eval(5, {}) - Complex(1, 0)) < 1e-15);
    try {
        (void)x.eval(2, {});
        FAIL("expected MissingAssignment");
    } catch (const Error &e) {
        CHECK(e.code() == ErrorCode::MissingAssignment);
    }
    try {
        (void)x.eval(2, {{S, {-1, 0}}});
        FAIL("expected PoleProximity");
    } catch (const Error &e) {
        CHECK(e.code() == ErrorCode::PoleProximity);
    }
}

TEST_CASE("ring axioms, homomorphism and reduction preserve values") {
    std::mt19937_64 rng(2024);
    for (int trial = 0; trial < 100; ++trial) {
        const RationalFn A = random_fn(rng);
        const RationalFn B = random_fn(rng);
        const RationalFn C = random_fn(rng);
        const Assignment pt = random_point(rng);
        const double p = trial % 2 == 0 ? 3.0 : 5.0;
        CHECK(rel_err((A + B).eval(p, pt), A.eval(p, pt) + B.eval(p, pt)) < 1e-12);
        CHECK(rel_err((A * B).eval(p, pt), A.eval(p, pt) * B.eval(p, pt)) < 1e-12);
        CHECK(rel_err(rat_reduce(A * B).eval(p, pt), (A * B).eval(p, pt)) < 1e-12);
        if (trial < 20) {
            CHECK((A + B) + C == A + (B + C));
            CHECK(A * (B + C) == A * B + A * C);
            CHECK(rat_reduce(A + B) == rat_reduce(rat_reduce(A + B)));
        }
    }
}

TEST_CASE("JSON round trip of rational functions and sums") {
    std::mt19937_64 rng(99);
    for (int k = 0; k < 10; ++k) {
        const RationalFn A = random_fn(rng);
        CHECK(RationalFn::from_json(A.to_json()) == A);
        CHECK(RationalFn::from_json(nlohmann::json::parse(A.to_json().dump())) == A);
    }
    RationalSum s(random_fn(rng));
    s.add(random_fn(rng));
    const RationalSum back = RationalSum::from_json(s.to_json());
    const Assignment pt = random_point(rng);
    CHECK(rel_err(back.eval(3, pt), s.eval(3, pt)) < 1e-14);
    CHECK(rel_err(s.combine().eval(3, pt), s.eval(3, pt)) < 1e-12);
    CHECK_THROWS_AS(RationalFn::from_json(nlohmann::json{{"num", 1}}), Error);
}

TEST_CASE("text rendering of denominator factors") {
    const DenFactor f{1, LinearForm(S) + LinearForm(SVar::make(2, 3)), 1};
    CHECK(format_den_factor(f, 4) == "1 - p^(1 + s_1_2 + s_3_2)");
}
