#include "knzeta/symbolic.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace knzeta {

namespace {

long floor_div(long q, long c) {
    long t = q / c;
    if ((q % c != 0) && ((q < 0) != (c < 0))) {
        --t;
    }
    return t;
}

std::string rational_str(const Rational &r) {
    return r.get_num().get_str() + "/" + r.get_den().get_str();
}

Rational parse_rational(const std::string &s) {
    try {
        Rational r(s, 10);
        r.canonicalize();
        return r;
    } catch (const std::invalid_argument &) {
        throw Error(ErrorCode::ParseError, "invalid rational '" + s + "'");
    }
}

using Complexl = std::complex<long double>;

Complexl p_power(long double p, long a, Complex z) {
    const long double lp = std::log(p);
    const Complexl w(static_cast<long double>(a) + z.real(), z.imag());
    return std::exp(w * lp);
}

} // namespace

// ---------------------------------------------------------------- SVar

SVar SVar::make(int a, int b) {
    if (a == b || a < 1 || b < 1) {
        throw Error(ErrorCode::InvalidVariable,
                    "s_" + std::to_string(a) + "_" + std::to_string(b));
    }
    return a < b ? SVar{a, b} : SVar{b, a};
}

SVar SVar::checked(int a, int b, int N) {
    const SVar v = make(a, b);
    const auto in_t = [N](int k) { return k >= 2 && k <= N - 2; };
    const bool ok = (in_t(v.i) && in_t(v.j)) || (v.i == 1 && in_t(v.j)) ||
                    (in_t(v.i) && v.j == N - 1);
    if (!ok) {
        throw Error(ErrorCode::InvalidVariable,
                    v.key() + " is not a variable of the " + std::to_string(N) +
                        "-point amplitude");
    }
    return v;
}

SVar SVar::parse(const std::string &key) {
    int a = 0;
    int b = 0;
    char tail = 0;
    if (key.size() < 5 || key.compare(0, 2, "s_") != 0 ||
        std::sscanf(key.c_str() + 2, "%d_%d%c", &a, &b, &tail) != 2) {
        throw Error(ErrorCode::ParseError, "malformed variable name '" + key + "'");
    }
    return make(a, b);
}

std::string SVar::key() const {
    return "s_" + std::to_string(i) + "_" + std::to_string(j);
}

std::string SVar::display(int N) const {
    if (N > 0 && j == N - 1 && i >= 2) {
        return "s_" + std::to_string(j) + "_" + std::to_string(i);
    }
    return key();
}

std::vector<SVar> amplitude_variables(int N) {
    std::vector<SVar> out;
    for (int i = 1; i <= N - 1; ++i) {
        for (int j = i + 1; j <= N - 1; ++j) {
            const bool in_ti = i >= 2 && i <= N - 2;
            const bool in_tj = j >= 2 && j <= N - 2;
            if ((in_ti && in_tj) || (i == 1 && in_tj) || (in_ti && j == N - 1)) {
                out.push_back(SVar{i, j});
            }
        }
    }
    return out;
}

// ---------------------------------------------------------------- LinearForm

LinearForm::LinearForm(SVar v, long c) {
    if (c != 0) {
        entries_.emplace_back(v, c);
    }
}

LinearForm::LinearForm(const std::map<SVar, long> &coeffs) {
    for (const auto &[v, c] : coeffs) {
        if (c != 0) {
            entries_.emplace_back(v, c);
        }
    }
}

long LinearForm::coeff(SVar v) const {
    const auto it = std::lower_bound(entries_.begin(), entries_.end(), v,
                                     [](const Entry &e, SVar x) { return e.first < x; });
    return (it != entries_.end() && it->first == v) ? it->second : 0;
}

LinearForm LinearForm::operator+(const LinearForm &o) const {
    LinearForm r;
    r.entries_.reserve(entries_.size() + o.entries_.size());
    auto a = entries_.begin();
    auto b = o.entries_.begin();
    while (a != entries_.end() || b != o.entries_.end()) {
        if (b == o.entries_.end() || (a != entries_.end() && a->first < b->first)) {
            r.entries_.push_back(*a++);
        } else if (a == entries_.end() || b->first < a->first) {
            r.entries_.push_back(*b++);
        } else {
            const long c = a->second + b->second;
            if (c != 0) {
                r.entries_.emplace_back(a->first, c);
            }
            ++a;
            ++b;
        }
    }
    return r;
}

LinearForm LinearForm::operator-(const LinearForm &o) const { return *this + (-o); }

LinearForm LinearForm::operator-() const { return scaled(-1); }

LinearForm LinearForm::scaled(long k) const {
    LinearForm r;
    if (k == 0) {
        return r;
    }
    r.entries_ = entries_;
    for (auto &e : r.entries_) {
        e.second *= k;
    }
    return r;
}

LinearForm &LinearForm::operator+=(const LinearForm &o) {
    *this = *this + o;
    return *this;
}

Complex LinearForm::eval(const Assignment &assign) const {
    Complex z = 0.0;
    for (const auto &[v, c] : entries_) {
        const auto it = assign.find(v);
        if (it == assign.end()) {
            throw Error(ErrorCode::MissingAssignment, v.key());
        }
        z += static_cast<double>(c) * it->second;
    }
    return z;
}

double LinearForm::eval_real(const std::map<SVar, double> &assign) const {
    double z = 0.0;
    for (const auto &[v, c] : entries_) {
        const auto it = assign.find(v);
        if (it == assign.end()) {
            throw Error(ErrorCode::MissingAssignment, v.key());
        }
        z += static_cast<double>(c) * it->second;
    }
    return z;
}

nlohmann::json LinearForm::to_json() const {
    nlohmann::json j = nlohmann::json::object();
    for (const auto &[v, c] : entries_) {
        j[v.key()] = c;
    }
    return j;
}

LinearForm LinearForm::from_json(const nlohmann::json &j) {
    if (!j.is_object()) {
        throw Error(ErrorCode::ParseError, "linear form must be a JSON object");
    }
    std::map<SVar, long> m;
    for (const auto &[k, v] : j.items()) {
        if (!v.is_number_integer()) {
            throw Error(ErrorCode::ParseError, "coefficient of " + k + " must be an integer");
        }
        m[SVar::parse(k)] += v.get<long>();
    }
    return LinearForm(m);
}

// ---------------------------------------------------------------- PrimeLaurent

PrimeLaurent::PrimeLaurent(long c) {
    if (c != 0) {
        entries_.emplace_back(0, Rational(c));
    }
}

PrimeLaurent PrimeLaurent::monomial(const Rational &c, int e) {
    PrimeLaurent r;
    if (c != 0) {
        r.entries_.emplace_back(e, c);
    }
    return r;
}

PrimeLaurent PrimeLaurent::p_pow(int e) { return monomial(Rational(1), e); }

PrimeLaurent PrimeLaurent::p_minus(long k) { return p_pow(1) - PrimeLaurent(k); }

PrimeLaurent PrimeLaurent::falling(long lo, long hi) {
    PrimeLaurent r(1);
    for (long k = lo; k <= hi; ++k) {
        r = r * p_minus(k);
    }
    return r;
}

Rational PrimeLaurent::coeff(int e) const {
    for (const auto &[x, c] : entries_) {
        if (x == e) {
            return c;
        }
    }
    return Rational(0);
}

int PrimeLaurent::min_exp() const { return entries_.empty() ? 0 : entries_.front().first; }

int PrimeLaurent::max_exp() const { return entries_.empty() ? 0 : entries_.back().first; }

void PrimeLaurent::normalize() {
    std::sort(entries_.begin(), entries_.end(),
              [](const Entry &a, const Entry &b) { return a.first < b.first; });
    std::vector<Entry> out;
    out.reserve(entries_.size());
    for (auto &e : entries_) {
        if (!out.empty() && out.back().first == e.first) {
            out.back().second += e.second;
        } else {
            out.push_back(std::move(e));
        }
    }
    std::erase_if(out, [](const Entry &e) { return e.second == 0; });
    entries_ = std::move(out);
}

PrimeLaurent PrimeLaurent::operator+(const PrimeLaurent &o) const {
    PrimeLaurent r;
    r.entries_.reserve(entries_.size() + o.entries_.size());
    auto a = entries_.begin();
    auto b = o.entries_.begin();
    while (a != entries_.end() || b != o.entries_.end()) {
        if (b == o.entries_.end() || (a != entries_.end() && a->first < b->first)) {
            r.entries_.push_back(*a++);
        } else if (a == entries_.end() || b->first < a->first) {
            r.entries_.push_back(*b++);
        } else {
            Rational c = a->second + b->second;
            if (c != 0) {
                r.entries_.emplace_back(a->first, std::move(c));
            }
            ++a;
            ++b;
        }
    }
    return r;
}

PrimeLaurent PrimeLaurent::operator-(const PrimeLaurent &o) const { return *this + (-o); }

PrimeLaurent PrimeLaurent::operator-() const {
    PrimeLaurent r = *this;
    for (auto &e : r.entries_) {
        e.second = -e.second;
    }
    return r;
}

PrimeLaurent PrimeLaurent::operator*(const PrimeLaurent &o) const {
    PrimeLaurent r;
    if (is_zero() || o.is_zero()) {
        return r;
    }
    const int lo = min_exp() + o.min_exp();
    const int hi = max_exp() + o.max_exp();
    std::vector<Rational> dense(static_cast<std::size_t>(hi - lo + 1));
    for (const auto &[ea, ca] : entries_) {
        for (const auto &[eb, cb] : o.entries_) {
            dense[static_cast<std::size_t>(ea + eb - lo)] += ca * cb;
        }
    }
    for (int k = 0; k <= hi - lo; ++k) {
        if (dense[static_cast<std::size_t>(k)] != 0) {
            r.entries_.emplace_back(lo + k, std::move(dense[static_cast<std::size_t>(k)]));
        }
    }
    return r;
}

PrimeLaurent &PrimeLaurent::operator+=(const PrimeLaurent &o) {
    *this = *this + o;
    return *this;
}

PrimeLaurent PrimeLaurent::shifted(int e) const {
    PrimeLaurent r = *this;
    for (auto &x : r.entries_) {
        x.first += e;
    }
    return r;
}

long double PrimeLaurent::eval(long double p) const {
    long double s = 0.0L;
    for (const auto &[e, c] : entries_) {
        const long double cv = static_cast<long double>(c.get_num().get_d()) /
                               static_cast<long double>(c.get_den().get_d());
        s += cv * std::pow(p, static_cast<long double>(e));
    }
    return s;
}

Rational PrimeLaurent::eval_exact(long p) const {
    Rational s = 0;
    for (const auto &[e, c] : entries_) {
        mpz_class pw;
        mpz_ui_pow_ui(pw.get_mpz_t(), static_cast<unsigned long>(p),
                      static_cast<unsigned long>(std::abs(e)));
        s += e >= 0 ? Rational(c * pw) : Rational(c / Rational(pw));
    }
    s.canonicalize();
    return s;
}

std::string PrimeLaurent::str() const {
    if (entries_.empty()) {
        return "0";
    }
    std::ostringstream os;
    bool first = true;
    for (auto it = entries_.rbegin(); it != entries_.rend(); ++it) {
        const auto &[e, c] = *it;
        const bool neg = c < 0;
        const Rational mag = abs(c);
        if (first) {
            os << (neg ? "-" : "");
        } else {
            os << (neg ? " - " : " + ");
        }
        first = false;
        if (e == 0) {
            os << mag.get_str();
            continue;
        }
        if (mag != 1) {
            os << mag.get_str() << "*";
        }
        os << "p";
        if (e != 1) {
            os << "^" << e;
        }
    }
    return os.str();
}

nlohmann::json PrimeLaurent::to_json() const {
    nlohmann::json j = nlohmann::json::array();
    for (const auto &[e, c] : entries_) {
        j.push_back(nlohmann::json::array({e, rational_str(c)}));
    }
    return j;
}

PrimeLaurent PrimeLaurent::from_json(const nlohmann::json &j) {
    if (!j.is_array()) {
        throw Error(ErrorCode::ParseError, "coefficient must be a JSON array");
    }
    PrimeLaurent r;
    for (const auto &x : j) {
        if (!x.is_array() || x.size() != 2 || !x[0].is_number_integer() || !x[1].is_string()) {
            throw Error(ErrorCode::ParseError, "coefficient entry must be [exponent, \"n/d\"]");
        }
        r.entries_.emplace_back(x[0].get<int>(), parse_rational(x[1].get<std::string>()));
    }
    r.normalize();
    return r;
}

// ---------------------------------------------------------------- PolyExpr

PolyExpr::PolyExpr(const PrimeLaurent &c) { add_term(c, LinearForm()); }

PolyExpr::PolyExpr(const Term &t) { add_term(t.coeff, t.form); }

PolyExpr PolyExpr::monomial(const PrimeLaurent &c, const LinearForm &form) {
    PolyExpr r;
    r.add_term(c, form);
    return r;
}

std::size_t PolyExpr::monomial_count() const {
    std::size_t n = 0;
    for (const auto &kv : terms_) {
        n += kv.second.entries().size();
    }
    return n;
}

void PolyExpr::add_term(const PrimeLaurent &c, const LinearForm &form) {
    if (c.is_zero()) {
        return;
    }
    auto [it, inserted] = terms_.try_emplace(form, c);
    if (!inserted) {
        it->second += c;
        if (it->second.is_zero()) {
            terms_.erase(it);
        }
    }
}

PolyExpr PolyExpr::operator+(const PolyExpr &o) const {
    PolyExpr r = *this;
    r += o;
    return r;
}

PolyExpr &PolyExpr::operator+=(const PolyExpr &o) {
    for (const auto &[f, c] : o.terms_) {
        add_term(c, f);
    }
    return *this;
}

PolyExpr PolyExpr::operator-(const PolyExpr &o) const {
    PolyExpr r = *this;
    for (const auto &[f, c] : o.terms_) {
        r.add_term(-c, f);
    }
    return r;
}

PolyExpr PolyExpr::operator*(const PolyExpr &o) const {
    PolyExpr r;
    for (const auto &[fa, ca] : terms_) {
        for (const auto &[fb, cb] : o.terms_) {
            r.add_term(ca * cb, fa + fb);
        }
    }
    return r;
}

PolyExpr PolyExpr::times(const Term &t) const {
    PolyExpr r;
    if (t.coeff.is_zero()) {
        return r;
    }
    for (const auto &[f, c] : terms_) {
        r.terms_.emplace_hint(r.terms_.end(), f + t.form, c * t.coeff);
    }
    if (r.terms_.size() != terms_.size()) {
        // Shifting by a fixed form is injective, so this cannot happen.
        throw std::logic_error("PolyExpr::times lost terms");
    }
    return r;
}

PolyExpr PolyExpr::times_factor(int a, const LinearForm &form, int k) const {
    PolyExpr r = *this;
    const Term x{PrimeLaurent::p_pow(a), form};
    for (int n = 0; n < k; ++n) {
        r = r - r.times(x);
    }
    return r;
}

std::optional<PolyExpr> PolyExpr::divide_factor(int a, const LinearForm &form) const {
    if (form.empty() && a == 0) {
        return std::nullopt;
    }
    if (is_zero()) {
        return PolyExpr();
    }
    // Monomials differing by a multiple of the direction (a, form) form a
    // chain; (1 - X) divides the numerator iff every chain sums to zero.
    using Base = std::pair<int, LinearForm>;
    std::map<Base, std::map<long, Rational>> chains;
    const bool pivot_on_form = !form.empty();
    const SVar pivot = pivot_on_form ? form.entries().front().first : SVar{};
    const long pc = pivot_on_form ? form.entries().front().second : a;
    for (const auto &[f, c] : terms_) {
        for (const auto &[e, q] : c.entries()) {
            const long coord = pivot_on_form ? f.coeff(pivot) : e;
            const long t = floor_div(coord, pc);
            Base base{static_cast<int>(e - t * a), f - form.scaled(t)};
            chains[base][t] += q;
        }
    }
    PolyExpr quotient;
    for (const auto &[base, seq] : chains) {
        Rational run = 0;
        const long t_lo = seq.begin()->first;
        const long t_hi = seq.rbegin()->first;
        auto it = seq.begin();
        for (long t = t_lo; t <= t_hi; ++t) {
            if (it != seq.end() && it->first == t) {
                run += it->second;
                ++it;
            }
            if (t == t_hi) {
                break;
            }
            if (run != 0) {
                quotient.add_term(
                    PrimeLaurent::monomial(run, static_cast<int>(base.first + t * a)),
                    base.second + form.scaled(t));
            }
        }
        if (run != 0) {
            return std::nullopt;
        }
    }
    return quotient;
}

Complex PolyExpr::eval(double p, const Assignment &assign) const {
    Complexl s = 0.0L;
    Complexl comp = 0.0L;
    for (const auto &[f, c] : terms_) {
        const Complexl term =
            static_cast<Complexl>(c.eval(p)) * p_power(p, 0, f.eval(assign));
        // Neumaier compensated summation, componentwise.
        const Complexl t = s + term;
        const auto fix = [](long double big, long double small, long double sum) {
            return std::fabs(big) >= std::fabs(small) ? (big - sum) + small
                                                      : (small - sum) + big;
        };
        comp += Complexl(fix(s.real(), term.real(), t.real()),
                         fix(s.imag(), term.imag(), t.imag()));
        s = t;
    }
    const Complexl total = s + comp;
    return Complex(static_cast<double>(total.real()), static_cast<double>(total.imag()));
}

nlohmann::json PolyExpr::to_json() const {
    nlohmann::json j = nlohmann::json::array();
    for (const auto &[f, c] : terms_) {
        j.push_back({{"coeff", c.to_json()}, {"form", f.to_json()}});
    }
    return j;
}

PolyExpr PolyExpr::from_json(const nlohmann::json &j) {
    if (!j.is_array()) {
        throw Error(ErrorCode::ParseError, "num must be a JSON array");
    }
    PolyExpr r;
    for (const auto &t : j) {
        if (!t.is_object() || !t.contains("coeff") || !t.contains("form")) {
            throw Error(ErrorCode::ParseError, "term must have coeff and form");
        }
        r.add_term(PrimeLaurent::from_json(t.at("coeff")), LinearForm::from_json(t.at("form")));
    }
    return r;
}

// ---------------------------------------------------------------- DenFactor

Complex DenFactor::base(double p, const Assignment &assign) const {
    const Complexl v = 1.0L - p_power(p, a, form.eval(assign));
    return Complex(static_cast<double>(v.real()), static_cast<double>(v.imag()));
}

bool den_key_less(const DenFactor &x, const DenFactor &y) {
    if (x.form != y.form) {
        return x.form < y.form;
    }
    return x.a < y.a;
}

// ---------------------------------------------------------------- RationalFn

RationalFn::RationalFn(const PolyExpr &num) : num_(num) {}

RationalFn::RationalFn(const PolyExpr &num, std::vector<DenFactor> den)
    : num_(num), den_(std::move(den)) {
    normalize();
}

RationalFn RationalFn::constant(const PrimeLaurent &c) { return RationalFn(PolyExpr(c)); }

RationalFn RationalFn::monomial(const PrimeLaurent &c, const LinearForm &form) {
    return RationalFn(PolyExpr::monomial(c, form));
}

RationalFn RationalFn::inverse_factor(int a, const LinearForm &form) {
    if (form.empty() && a == 0) {
        throw Error(ErrorCode::PoleProximity, "division by the zero factor 1 - p^0");
    }
    return RationalFn(PolyExpr(PrimeLaurent(1)), {DenFactor{a, form, 1}});
}

void RationalFn::normalize() {
    if (num_.is_zero()) {
        den_.clear();
        return;
    }
    std::sort(den_.begin(), den_.end(), den_key_less);
    std::vector<DenFactor> out;
    for (auto &f : den_) {
        if (f.form.empty() && f.a == 0) {
            throw Error(ErrorCode::PoleProximity, "zero denominator factor");
        }
        if (!out.empty() && out.back().a == f.a && out.back().form == f.form) {
            out.back().mult += f.mult;
        } else {
            out.push_back(std::move(f));
        }
    }
    std::erase_if(out, [](const DenFactor &f) { return f.mult <= 0; });
    den_ = std::move(out);
}

bool RationalFn::is_exactly_one() const {
    PrimeLaurent den(1);
    for (const auto &f : den_) {
        if (!f.form.empty()) {
            return false;
        }
        for (int k = 0; k < f.mult; ++k) {
            den = den * (PrimeLaurent(1) - PrimeLaurent::p_pow(f.a));
        }
    }
    if (num_.size() != 1 || !num_.terms().begin()->first.empty()) {
        return false;
    }
    return num_.terms().begin()->second == den;
}

Complex RationalFn::eval(double p, const Assignment &assign) const {
    Complex den = 1.0;
    for (const auto &f : den_) {
        const Complex b = f.base(p, assign);
        if (std::abs(b) < kPoleEpsilon) {
            throw Error(ErrorCode::PoleProximity, format_den_factor(f, 0));
        }
        den *= std::pow(b, f.mult);
    }
    return num_.eval(p, assign) / den;
}

nlohmann::json RationalFn::to_json() const {
    nlohmann::json den = nlohmann::json::array();
    for (const auto &f : den_) {
        den.push_back({{"a", f.a}, {"form", f.form.to_json()}, {"mult", f.mult}});
    }
    return {{"num", num_.to_json()}, {"den", den}};
}

RationalFn RationalFn::from_json(const nlohmann::json &j) {
    if (!j.is_object() || !j.contains("num") || !j.contains("den") || !j.at("den").is_array()) {
        throw Error(ErrorCode::ParseError, "rational function needs num and den arrays");
    }
    std::vector<DenFactor> den;
    for (const auto &f : j.at("den")) {
        if (!f.is_object() || !f.contains("a") || !f.contains("form") || !f.contains("mult")) {
            throw Error(ErrorCode::ParseError, "denominator factor needs a, form, mult");
        }
        const int mult = f.at("mult").get<int>();
        if (mult <= 0) {
            throw Error(ErrorCode::ParseError, "multiplicity must be positive");
        }
        den.push_back(DenFactor{f.at("a").get<int>(), LinearForm::from_json(f.at("form")), mult});
    }
    return RationalFn(PolyExpr::from_json(j.at("num")), std::move(den));
}

std::string format_exponent(long a, const LinearForm &form, int N) {
    std::ostringstream os;
    bool first = true;
    if (a != 0 || form.empty()) {
        os << a;
        first = false;
    }
    for (const auto &[v, c] : form.entries()) {
        const long mag = std::labs(c);
        if (first) {
            os << (c < 0 ? "-" : "");
        } else {
            os << (c < 0 ? " - " : " + ");
        }
        first = false;
        if (mag != 1) {
            os << mag << "*";
        }
        os << v.display(N);
    }
    return os.str();
}

std::string format_den_factor(const DenFactor &f, int N) {
    std::string s = "1 - p^(" + format_exponent(f.a, f.form, N) + ")";
    if (f.mult != 1) {
        s = "(" + s + ")^" + std::to_string(f.mult);
    }
    return s;
}

std::string RationalFn::to_text(int N) const {
    std::ostringstream os;
    if (num_.is_zero()) {
        os << "0";
    }
    bool first = true;
    for (const auto &[f, c] : num_.terms()) {
        if (!first) {
            os << "\n  + ";
        }
        first = false;
        os << "(" << c.str() << ")";
        if (!f.empty()) {
            os << "*p^(" << format_exponent(0, f, N) << ")";
        }
    }
    if (!den_.empty()) {
        os << "\n/\n";
        bool firstd = true;
        for (const auto &f : den_) {
            if (!firstd) {
                os << " * ";
            }
            firstd = false;
            os << "[" << format_den_factor(f, N) << "]";
        }
    }
    return os.str();
}

// ---------------------------------------------------------------- arithmetic

namespace {

// Necessary condition for (1 - p^a p^L) | num: num vanishes on a random point
// of the hypersurface p^{a + L(s)} = 1, checked in floating point at a fixed p.
bool may_divide(const PolyExpr &num, int a, const LinearForm &form) {
    if (form.empty()) {
        return true;
    }
    std::map<SVar, double> point;
    std::uint64_t state = 0x9e3779b97f4a7c15ULL ^ static_cast<std::uint64_t>(num.size());
    const auto next = [&state]() {
        state += 0x9e3779b97f4a7c15ULL;
        std::uint64_t z = state;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        z ^= z >> 31;
        return static_cast<double>(z >> 11) * 0x1.0p-53 - 0.5;
    };
    for (const auto &kv : num.terms()) {
        for (const auto &[v, c] : kv.first.entries()) {
            point.emplace(v, 0.0);
        }
    }
    for (const auto &[v, c] : form.entries()) {
        point.emplace(v, 0.0);
    }
    for (auto &kv : point) {
        kv.second = next();
    }
    const auto &[pivot, pc] = form.entries().front();
    double rest = a;
    for (const auto &[v, c] : form.entries()) {
        if (!(v == pivot)) {
            rest += static_cast<double>(c) * point[v];
        }
    }
    point[pivot] = -rest / static_cast<double>(pc);
    const long double p = 1.6180339887L;
    const long double lp = std::log(p);
    long double sum = 0.0L;
    long double scale = 0.0L;
    for (const auto &[f, c] : num.terms()) {
        const long double t = c.eval(p) * std::exp(static_cast<long double>(f.eval_real(point)) * lp);
        sum += t;
        long double mag = 0.0L;
        for (const auto &[e, q] : c.entries()) {
            mag += std::fabs(static_cast<long double>(q.get_d())) *
                   std::pow(p, static_cast<long double>(e));
        }
        scale += mag * std::exp(static_cast<long double>(f.eval_real(point)) * lp);
    }
    return std::fabs(sum) <= 1e-9L * scale;
}

} // namespace

RationalFn rat_reduce(const RationalFn &x) {
    if (x.is_zero()) {
        return x;
    }
    PolyExpr num = x.num();
    std::vector<DenFactor> den = x.den();
    for (auto &f : den) {
        while (f.mult > 0) {
            if (!may_divide(num, f.a, f.form)) {
                break;
            }
            auto q = num.divide_factor(f.a, f.form);
            if (!q) {
                break;
            }
            num = std::move(*q);
            --f.mult;
        }
    }
    return RationalFn(num, std::move(den));
}

RationalFn rat_add(const RationalFn &lhs, const RationalFn &rhs) {
    if (lhs.is_zero()) {
        return rhs;
    }
    if (rhs.is_zero()) {
        return lhs;
    }
    // Least upper bound of the two factor multisets.
    std::vector<DenFactor> lub;
    PolyExpr nl = lhs.num();
    PolyExpr nr = rhs.num();
    auto a = lhs.den().begin();
    auto b = rhs.den().begin();
    while (a != lhs.den().end() || b != rhs.den().end()) {
        if (b == rhs.den().end() || (a != lhs.den().end() && den_key_less(*a, *b))) {
            nr = nr.times_factor(a->a, a->form, a->mult);
            lub.push_back(*a++);
        } else if (a == lhs.den().end() || den_key_less(*b, *a)) {
            nl = nl.times_factor(b->a, b->form, b->mult);
            lub.push_back(*b++);
        } else {
            if (a->mult < b->mult) {
                nl = nl.times_factor(a->a, a->form, b->mult - a->mult);
            } else if (b->mult < a->mult) {
                nr = nr.times_factor(a->a, a->form, a->mult - b->mult);
            }
            DenFactor f = *a;
            f.mult = std::max(a->mult, b->mult);
            lub.push_back(std::move(f));
            ++a;
            ++b;
        }
    }
    return rat_reduce(RationalFn(nl + nr, std::move(lub)));
}

RationalFn rat_sum(const std::vector<RationalFn> &terms) {
    std::vector<DenFactor> lub;
    for (const auto &t : terms) {
        if (t.is_zero()) {
            continue;
        }
        for (const auto &f : t.den()) {
            auto it = std::find_if(lub.begin(), lub.end(), [&f](const DenFactor &g) {
                return g.a == f.a && g.form == f.form;
            });
            if (it == lub.end()) {
                lub.push_back(f);
            } else {
                it->mult = std::max(it->mult, f.mult);
            }
        }
    }
    PolyExpr num;
    for (const auto &t : terms) {
        if (t.is_zero()) {
            continue;
        }
        PolyExpr n = t.num();
        for (const auto &g : lub) {
            int have = 0;
            for (const auto &f : t.den()) {
                if (f.a == g.a && f.form == g.form) {
                    have = f.mult;
                }
            }
            n = n.times_factor(g.a, g.form, g.mult - have);
        }
        num += n;
    }
    return rat_reduce(RationalFn(num, std::move(lub)));
}

RationalFn rat_mul(const RationalFn &lhs, const RationalFn &rhs) {
    if (lhs.is_zero() || rhs.is_zero()) {
        return RationalFn();
    }
    std::vector<DenFactor> den = lhs.den();
    den.insert(den.end(), rhs.den().begin(), rhs.den().end());
    return rat_reduce(RationalFn(lhs.num() * rhs.num(), std::move(den)));
}

RationalFn operator+(const RationalFn &lhs, const RationalFn &rhs) { return rat_add(lhs, rhs); }

RationalFn operator*(const RationalFn &lhs, const RationalFn &rhs) { return rat_mul(lhs, rhs); }

RationalFn operator*(const RationalFn &lhs, const Term &t) {
    return RationalFn(lhs.num().times(t), lhs.den());
}

RationalFn substitute(const RationalFn &x, const std::map<SVar, long> &values) {
    const auto split = [&values](const LinearForm &f, long &shift) {
        std::map<SVar, long> rest;
        for (const auto &[v, c] : f.entries()) {
            const auto it = values.find(v);
            if (it == values.end()) {
                rest[v] = c;
            } else {
                shift += c * it->second;
            }
        }
        return LinearForm(rest);
    };
    PolyExpr num;
    for (const auto &[f, c] : x.num().terms()) {
        long shift = 0;
        const LinearForm rest = split(f, shift);
        num += PolyExpr::monomial(c.shifted(static_cast<int>(shift)), rest);
    }
    std::vector<DenFactor> den;
    for (const auto &f : x.den()) {
        long shift = 0;
        const LinearForm rest = split(f.form, shift);
        den.push_back(DenFactor{static_cast<int>(f.a + shift), rest, f.mult});
    }
    return rat_reduce(RationalFn(num, std::move(den)));
}

Complex eval_numeric(const RationalFn &x, double p, const Assignment &assign) {
    return x.eval(p, assign);
}

// ---------------------------------------------------------------- RationalSum

RationalSum::RationalSum(std::vector<RationalFn> parts) {
    for (auto &p : parts) {
        add(std::move(p));
    }
}

RationalSum::RationalSum(const RationalFn &single) { add(single); }

namespace {

// True when every factor of a occurs in b with at least the same multiplicity.
bool den_divides(const std::vector<DenFactor> &a, const std::vector<DenFactor> &b) {
    auto it = b.begin();
    for (const auto &f : a) {
        while (it != b.end() && den_key_less(*it, f)) {
            ++it;
        }
        if (it == b.end() || it->a != f.a || it->form != f.form || it->mult < f.mult) {
            return false;
        }
    }
    return true;
}

} // namespace

std::size_t RationalSum::monomial_count() const {
    std::size_t n = 0;
    for (const auto &q : parts_) {
        n += q.num().monomial_count();
    }
    return n;
}

void RationalSum::add(RationalFn part) {
    if (part.is_zero()) {
        return;
    }
    auto target = parts_.end();
    for (auto it = parts_.begin(); it != parts_.end(); ++it) {
        if (den_divides(part.den(), it->den())) {
            target = it;
            break;
        }
    }
    if (target == parts_.end()) {
        for (auto it = parts_.begin(); it != parts_.end(); ++it) {
            if (den_divides(it->den(), part.den())) {
                target = it;
                break;
            }
        }
    }
    if (target == parts_.end()) {
        parts_.push_back(std::move(part));
        return;
    }
    *target = *target + part;
    if (target->is_zero()) {
        parts_.erase(target);
    }
}

RationalSum &RationalSum::operator+=(const RationalSum &o) {
    for (const auto &q : o.parts_) {
        add(q);
    }
    return *this;
}

RationalSum operator+(const RationalSum &lhs, const RationalSum &rhs) {
    RationalSum r = lhs;
    r += rhs;
    return r;
}

RationalSum operator*(const RationalSum &lhs, const RationalSum &rhs) {
    RationalSum r;
    for (const auto &a : lhs.parts()) {
        for (const auto &b : rhs.parts()) {
            r.add(a * b);
        }
    }
    return r;
}

RationalSum operator*(const RationalSum &lhs, const RationalFn &rhs) {
    RationalSum r;
    for (const auto &a : lhs.parts()) {
        r.add(a * rhs);
    }
    return r;
}

RationalFn substitute(const RationalSum &x, const std::map<SVar, long> &values) {
    std::vector<RationalFn> parts;
    for (const auto &q : x.parts()) {
        parts.push_back(substitute(q, values));
    }
    return rat_sum(parts);
}

std::vector<DenFactor> RationalSum::den_union() const {
    std::vector<DenFactor> out;
    for (const auto &q : parts_) {
        for (const auto &f : q.den()) {
            auto it = std::find_if(out.begin(), out.end(), [&f](const DenFactor &g) {
                return g.a == f.a && g.form == f.form;
            });
            if (it == out.end()) {
                out.push_back(f);
            } else {
                it->mult = std::max(it->mult, f.mult);
            }
        }
    }
    std::sort(out.begin(), out.end(), den_key_less);
    return out;
}

RationalFn RationalSum::combine() const { return rat_sum(parts_); }

Complex RationalSum::eval(double p, const Assignment &assign) const {
    Complex s = 0.0;
    for (const auto &q : parts_) {
        s += q.eval(p, assign);
    }
    return s;
}

nlohmann::json RationalSum::to_json() const {
    nlohmann::json parts = nlohmann::json::array();
    for (const auto &q : parts_) {
        parts.push_back(q.to_json());
    }
    return {{"sum", parts}};
}

RationalSum RationalSum::from_json(const nlohmann::json &j) {
    if (j.is_object() && j.contains("sum")) {
        RationalSum s;
        for (const auto &q : j.at("sum")) {
            s.parts_.push_back(RationalFn::from_json(q));
        }
        return s;
    }
    return RationalSum({RationalFn::from_json(j)});
}

} // namespace knzeta
