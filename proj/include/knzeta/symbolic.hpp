#ifndef KNZETA_SYMBOLIC_HPP
#define KNZETA_SYMBOLIC_HPP

// Exact arithmetic for rational functions in a symbolic prime p and formal
// exponentials p^{L(s)}, where L is an integer linear form in the amplitude
// variables s_ij. Denominators are kept as products of factors 1 - p^a p^L.

#include <complex>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <gmpxx.h>
#include <json.hpp>

#include "knzeta/errors.hpp"

namespace knzeta {

using Rational = mpq_class;
using Complex = std::complex<double>;

// Amplitude variable s_ij with canonical order i < j.
struct SVar {
    int i = 0;
    int j = 0;

    // Canonicalizes the pair; only requires distinct positive indices.
    static SVar make(int a, int b);
    // Canonicalizes and checks membership in the variable set of the N-point
    // amplitude: one index in {1, N-1} and the other in T = {2..N-2}, or both in T.
    static SVar checked(int a, int b, int N);
    // Parses "s_<a>_<b>" in either index order.
    static SVar parse(const std::string &key);

    // Canonical key "s_<i>_<j>" with i < j.
    std::string key() const;
    // Display name that writes s_{(N-1)i} as "s_<N-1>_<i>" when N is known.
    std::string display(int N) const;

    friend bool operator==(const SVar &, const SVar &) = default;
    friend auto operator<=>(const SVar &, const SVar &) = default;
};

// All D = N(N-3)/2 variables of the N-point amplitude in canonical order.
std::vector<SVar> amplitude_variables(int N);

using Assignment = std::map<SVar, Complex>;

// Integer linear combination of SVars without constant term.
class LinearForm {
public:
    using Entry = std::pair<SVar, long>;

    LinearForm() = default;
    explicit LinearForm(SVar v, long c = 1);
    explicit LinearForm(const std::map<SVar, long> &coeffs);

    const std::vector<Entry> &entries() const { return entries_; }
    bool empty() const { return entries_.empty(); }
    long coeff(SVar v) const;

    LinearForm operator+(const LinearForm &o) const;
    LinearForm operator-(const LinearForm &o) const;
    LinearForm operator-() const;
    LinearForm scaled(long k) const;
    LinearForm &operator+=(const LinearForm &o);

    Complex eval(const Assignment &assign) const;
    double eval_real(const std::map<SVar, double> &assign) const;

    nlohmann::json to_json() const;
    static LinearForm from_json(const nlohmann::json &j);

    friend bool operator==(const LinearForm &, const LinearForm &) = default;
    friend auto operator<=>(const LinearForm &, const LinearForm &) = default;

private:
    std::vector<Entry> entries_;
};

// Laurent polynomial in p with rational coefficients.
class PrimeLaurent {
public:
    using Entry = std::pair<int, Rational>;

    PrimeLaurent() = default;
    PrimeLaurent(long c); // NOLINT(google-explicit-constructor)
    static PrimeLaurent monomial(const Rational &c, int e);
    // p^e with coefficient 1.
    static PrimeLaurent p_pow(int e);
    // The linear polynomial p - k.
    static PrimeLaurent p_minus(long k);
    // prod_{k=lo}^{hi} (p - k); equals 1 when lo > hi.
    static PrimeLaurent falling(long lo, long hi);

    const std::vector<Entry> &entries() const { return entries_; }
    bool is_zero() const { return entries_.empty(); }
    Rational coeff(int e) const;
    int min_exp() const;
    int max_exp() const;

    PrimeLaurent operator+(const PrimeLaurent &o) const;
    PrimeLaurent operator-(const PrimeLaurent &o) const;
    PrimeLaurent operator-() const;
    PrimeLaurent operator*(const PrimeLaurent &o) const;
    PrimeLaurent &operator+=(const PrimeLaurent &o);
    PrimeLaurent shifted(int e) const;

    long double eval(long double p) const;
    Rational eval_exact(long p) const;

    std::string str() const;
    nlohmann::json to_json() const;
    static PrimeLaurent from_json(const nlohmann::json &j);

    friend bool operator==(const PrimeLaurent &, const PrimeLaurent &) = default;

private:
    void normalize();
    std::vector<Entry> entries_;
};

// coeff(p) * p^{form(s)}
struct Term {
    PrimeLaurent coeff;
    LinearForm form;
};

// Sum of terms, merged by LinearForm.
class PolyExpr {
public:
    PolyExpr() = default;
    PolyExpr(const PrimeLaurent &c); // NOLINT(google-explicit-constructor)
    explicit PolyExpr(const Term &t);
    static PolyExpr monomial(const PrimeLaurent &c, const LinearForm &form);

    const std::map<LinearForm, PrimeLaurent> &terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }
    std::size_t size() const { return terms_.size(); }
    // Number of (p-exponent, form) monomials.
    std::size_t monomial_count() const;

    PolyExpr operator+(const PolyExpr &o) const;
    PolyExpr operator-(const PolyExpr &o) const;
    PolyExpr operator*(const PolyExpr &o) const;
    PolyExpr &operator+=(const PolyExpr &o);
    PolyExpr times(const Term &t) const;
    // Multiplies by (1 - p^a p^L)^k.
    PolyExpr times_factor(int a, const LinearForm &form, int k) const;
    // Exact quotient by (1 - p^a p^L) when it exists.
    std::optional<PolyExpr> divide_factor(int a, const LinearForm &form) const;

    Complex eval(double p, const Assignment &assign) const;

    nlohmann::json to_json() const;
    static PolyExpr from_json(const nlohmann::json &j);

    friend bool operator==(const PolyExpr &, const PolyExpr &) = default;

private:
    void add_term(const PrimeLaurent &c, const LinearForm &form);
    std::map<LinearForm, PrimeLaurent> terms_;
};

// (1 - p^a p^{form})^mult
struct DenFactor {
    int a = 0;
    LinearForm form;
    int mult = 1;

    Complex base(double p, const Assignment &assign) const;
    friend bool operator==(const DenFactor &, const DenFactor &) = default;
};

// Canonical sort order of denominator factors: by form, then by a.
bool den_key_less(const DenFactor &x, const DenFactor &y);

class RationalFn {
public:
    RationalFn() = default;
    RationalFn(const PolyExpr &num); // NOLINT(google-explicit-constructor)
    RationalFn(const PolyExpr &num, std::vector<DenFactor> den);
    static RationalFn constant(const PrimeLaurent &c);
    static RationalFn monomial(const PrimeLaurent &c, const LinearForm &form);
    // 1 / (1 - p^a p^L)
    static RationalFn inverse_factor(int a, const LinearForm &form);

    const PolyExpr &num() const { return num_; }
    const std::vector<DenFactor> &den() const { return den_; }
    bool is_zero() const { return num_.is_zero(); }

    // Exact test for equality with the constant 1, valid when every
    // denominator factor is free of s (compares expanded numerator and denominator).
    bool is_exactly_one() const;

    Complex eval(double p, const Assignment &assign) const;

    nlohmann::json to_json() const;
    static RationalFn from_json(const nlohmann::json &j);
    // Human-readable rendering; N selects the display names of variables.
    std::string to_text(int N = 0) const;

    friend bool operator==(const RationalFn &, const RationalFn &) = default;

private:
    void normalize();
    PolyExpr num_;
    std::vector<DenFactor> den_;
};

RationalFn rat_add(const RationalFn &lhs, const RationalFn &rhs);
RationalFn rat_mul(const RationalFn &lhs, const RationalFn &rhs);
RationalFn rat_reduce(const RationalFn &x);
// Sum of many functions over a single least-upper-bound denominator.
RationalFn rat_sum(const std::vector<RationalFn> &terms);
RationalFn operator+(const RationalFn &lhs, const RationalFn &rhs);
RationalFn operator*(const RationalFn &lhs, const RationalFn &rhs);
RationalFn operator*(const RationalFn &lhs, const Term &t);

// Substitutes integer values for some variables and returns the resulting function.
RationalFn substitute(const RationalFn &x, const std::map<SVar, long> &values);

Complex eval_numeric(const RationalFn &x, double p, const Assignment &assign);

// Unexpanded sum of rational functions. Used where the single-fraction form
// is too large to build; its denominator factor set is the union of the
// parts' factor sets, which contains every factor of the combined fraction.
// A new part is merged into an existing one when either denominator divides
// the other, so no part ever needs a denominator larger than one it already had.
class RationalSum {
public:
    RationalSum() = default;
    explicit RationalSum(std::vector<RationalFn> parts);
    RationalSum(const RationalFn &single); // NOLINT(google-explicit-constructor)

    const std::vector<RationalFn> &parts() const { return parts_; }
    bool is_zero() const { return parts_.empty(); }
    std::size_t monomial_count() const;
    void add(RationalFn part);
    RationalSum &operator+=(const RationalSum &o);

    // Distinct factors (maximum multiplicity over the parts).
    std::vector<DenFactor> den_union() const;
    RationalFn combine() const;
    Complex eval(double p, const Assignment &assign) const;

    nlohmann::json to_json() const;
    static RationalSum from_json(const nlohmann::json &j);

private:
    std::vector<RationalFn> parts_;
};

RationalSum operator+(const RationalSum &lhs, const RationalSum &rhs);
RationalSum operator*(const RationalSum &lhs, const RationalSum &rhs);
RationalSum operator*(const RationalSum &lhs, const RationalFn &rhs);
// Substitutes integer values part by part and combines the result.
RationalFn substitute(const RationalSum &x, const std::map<SVar, long> &values);

// Tolerance used by eval_numeric to report pole proximity.
inline constexpr double kPoleEpsilon = 1e-12;

std::string format_exponent(long a, const LinearForm &form, int N);
std::string format_den_factor(const DenFactor &f, int N);

} // namespace knzeta

#endif
