#include "knzeta/zeta.hpp"

#include <mutex>
#include <sstream>

namespace knzeta {

namespace {

RationalFn mono(long c, int e, const LinearForm &f = LinearForm()) {
    return RationalFn::monomial(PrimeLaurent::monomial(Rational(c), e), f);
}

RationalFn mono(const PrimeLaurent &c, const LinearForm &f = LinearForm()) {
    return RationalFn::monomial(c, f);
}

PrimeLaurent one_minus_pinv() { return PrimeLaurent(1) - PrimeLaurent::p_pow(-1); }

} // namespace

AmplitudeContext AmplitudeContext::make(int N) {
    if (N < 4 || N > 31) {
        throw Error(ErrorCode::NOutOfRange, "N = " + std::to_string(N));
    }
    AmplitudeContext c;
    c.N = N;
    c.T = IndexSet::range(2, N - 2);
    c.vars = amplitude_variables(N);
    return c;
}

const char *memo_kind_name(MemoKind k) {
    switch (k) {
    case MemoKind::L0: return "L0";
    case MemoKind::L1: return "L1";
    case MemoKind::L2: return "L2";
    case MemoKind::M1: return "M1";
    case MemoKind::Z0: return "Z0";
    case MemoKind::Z1: return "Z1";
    }
    return "?";
}

std::string MemoKey::str() const {
    std::ostringstream os;
    os << memo_kind_name(kind) << IndexSet::from_bits(first).str();
    if (kind == MemoKind::L2) {
        os << IndexSet::from_bits(second).str() << "t" << t;
    }
    return os.str();
}

ZetaEngine::ZetaEngine(int N) : ctx_(AmplitudeContext::make(N)) {}

ZetaEngine::ZetaEngine(const AmplitudeContext &ctx) : ctx_(ctx) {}

std::optional<RationalSum> ZetaEngine::lookup(const MemoKey &k) const {
    std::shared_lock lock(mu_);
    const auto it = memo_.find(k);
    if (it == memo_.end()) {
        return std::nullopt;
    }
    return it->second;
}

RationalSum ZetaEngine::store(const MemoKey &k, RationalSum v) {
    std::unique_lock lock(mu_);
    const auto [it, inserted] = memo_.try_emplace(k, std::move(v));
    return it->second;
}

std::size_t ZetaEngine::memo_size() const {
    std::shared_lock lock(mu_);
    return memo_.size();
}

void ZetaEngine::clear_memo() {
    std::unique_lock lock(mu_);
    memo_.clear();
}

nlohmann::json ZetaEngine::memo_to_json() const {
    std::shared_lock lock(mu_);
    nlohmann::json entries = nlohmann::json::array();
    for (const auto &[k, v] : memo_) {
        entries.push_back({{"kind", memo_kind_name(k.kind)},
                           {"first", k.first},
                           {"second", k.second},
                           {"t", k.t},
                           {"value", v.to_json()}});
    }
    return {{"N", ctx_.N}, {"entries", entries}};
}

std::size_t ZetaEngine::memo_from_json(const nlohmann::json &j) {
    if (!j.is_object() || !j.contains("N") || !j.contains("entries")) {
        throw Error(ErrorCode::ParseError, "memo file needs N and entries");
    }
    if (j.at("N").get<int>() != ctx_.N) {
        throw Error(ErrorCode::ParseError, "memo file belongs to a different N");
    }
    std::size_t n = 0;
    for (const auto &e : j.at("entries")) {
        const std::string kind = e.at("kind").get<std::string>();
        MemoKey k;
        bool found = false;
        for (MemoKind mk : {MemoKind::L0, MemoKind::L1, MemoKind::L2, MemoKind::M1, MemoKind::Z0,
                            MemoKind::Z1}) {
            if (kind == memo_kind_name(mk)) {
                k.kind = mk;
                found = true;
            }
        }
        if (!found) {
            throw Error(ErrorCode::ParseError, "unknown memo kind " + kind);
        }
        k.first = e.at("first").get<std::uint32_t>();
        k.second = e.at("second").get<std::uint32_t>();
        k.t = e.at("t").get<int>();
        store(k, RationalSum::from_json(e.at("value")));
        ++n;
    }
    return n;
}

void ZetaEngine::require_in_T(const IndexSet &S, const char *what) const {
    if (S.empty()) {
        throw Error(ErrorCode::EmptyIndexSet, what);
    }
    if (!S.subset_of(ctx_.T)) {
        throw Error(ErrorCode::InvalidVariable,
                    std::string(what) + ": " + S.str() + " is not a subset of T");
    }
}

LinearForm ZetaEngine::pair_form(const IndexSet &S) const {
    std::map<SVar, long> m;
    for (const SVar &v : pairs_within(S)) {
        m[v] = 1;
    }
    return LinearForm(m);
}

LinearForm ZetaEngine::t_form(const IndexSet &S, int t) const {
    std::map<SVar, long> m;
    for (int i : S.members()) {
        m[ctx_.st(t, i)] = 1;
    }
    return LinearForm(m);
}

AffineExponent ZetaEngine::sector_form(const IndexSet &J) const {
    std::map<SVar, long> m;
    for (int i : J.members()) {
        m[ctx_.st(1, i)] += 1;
        m[ctx_.st(ctx_.last(), i)] += 1;
    }
    for (const SVar &v : pairs_within(ctx_.T)) {
        if (J.contains(v.i) || J.contains(v.j)) {
            m[v] += 1;
        }
    }
    return AffineExponent{J.size(), LinearForm(m)};
}

Term ZetaEngine::sector_exponent(const IndexSet &I) const {
    if (!I.subset_of(ctx_.T)) {
        throw Error(ErrorCode::InvalidVariable, "sector_exponent: I is not a subset of T");
    }
    const AffineExponent e = sector_form(ctx_.T - I);
    return Term{PrimeLaurent::p_pow(static_cast<int>(e.constant)), e.form};
}

RationalSum ZetaEngine::L0_sum(const IndexSet &J) {
    require_in_T(J, "L0");
    const MemoKey key{MemoKind::L0, J.bits(), 0, 0};
    if (auto hit = lookup(key)) {
        return *hit;
    }
    const int n = J.size();
    if (n == 1) {
        return store(key, RationalFn::constant(one_minus_pinv()));
    }
    RationalSum acc(mono(delta_count(J).shifted(-n)));
    for (const auto &pat : enumerate_patterns(J)) {
        std::map<SVar, long> k;
        for (const SVar &v : pat.coincident_pairs()) {
            k[v] = -1;
        }
        acc += L1_pattern_sum(pat) *
               mono(class_count(pat, CountMode::plain).shifted(-n), LinearForm(k));
    }
    return store(key, acc);
}

RationalSum ZetaEngine::L1_pattern_sum(const CoincidencePattern &pat) {
    RationalSum acc(RationalFn::constant(PrimeLaurent(1)));
    for (const IndexSet &b : blocks(pat)) {
        acc = acc * L1_sum(b);
    }
    return acc;
}

RationalSum ZetaEngine::L1_sum(const IndexSet &I) {
    require_in_T(I, "L1_full");
    if (I.size() < 2) {
        throw Error(ErrorCode::IndexTooSmall, "L1_full needs |I| >= 2, got " + I.str());
    }
    const MemoKey key{MemoKind::L1, I.bits(), 0, 0};
    if (auto hit = lookup(key)) {
        return *hit;
    }
    const int n = I.size();
    RationalSum acc(mono(delta_count(I).shifted(-n)));
    for (const auto &pat : enumerate_patterns(I)) {
        if (pat.block_count() == 1) {
            continue;
        }
        std::map<SVar, long> k;
        for (const SVar &v : pat.coincident_pairs()) {
            k[v] = -1;
        }
        acc += L1_pattern_sum(pat) *
               mono(class_count(pat, CountMode::plain).shifted(-n), LinearForm(k));
    }
    for (const IndexSet &J : I.subsets(false, false)) {
        const IndexSet rest = I - J;
        const RationalFn c = mono(1, -rest.size(), -pair_form(rest));
        if (rest.size() == 1) {
            acc += L0_sum(J) * c;
        } else {
            acc += L1_sum(rest) * L0_sum(J) * c;
        }
    }
    return store(key, acc * RationalFn::inverse_factor(1 - n, -pair_form(I)));
}

RationalSum ZetaEngine::L2_sum(const IndexSet &I, const IndexSet &K, int t) {
    require_in_T(I, "L2");
    if (!K.subset_of(I)) {
        throw Error(ErrorCode::KNotSubset, K.str() + " not in " + I.str());
    }
    if (t != 1 && t != ctx_.last()) {
        throw Error(ErrorCode::InvalidVariable, "L2: t must be 1 or N-1");
    }
    if (K.empty()) {
        return I.size() == 1 ? RationalSum(RationalFn::constant(PrimeLaurent(1))) : L1_sum(I);
    }
    const MemoKey key{MemoKind::L2, I.bits(), K.bits(), t};
    if (auto hit = lookup(key)) {
        return *hit;
    }
    RationalSum acc = L0_sum(I);
    for (const IndexSet &J : I.subsets(false, false)) {
        const IndexSet rest = I - J;
        const IndexSet krest = K - J;
        const RationalFn c = mono(1, -rest.size(), -(t_form(krest, t) + pair_form(rest)));
        acc += L2_sum(rest, krest, t) * L0_sum(J) * c;
    }
    return store(key,
                 acc * RationalFn::inverse_factor(-I.size(), -(t_form(K, t) + pair_form(I))));
}

RationalSum ZetaEngine::M1_sum(const IndexSet &J) {
    require_in_T(J, "M1");
    const MemoKey key{MemoKind::M1, J.bits(), 0, 0};
    if (auto hit = lookup(key)) {
        return *hit;
    }
    const int n = J.size();
    const int t = ctx_.last();
    RationalSum acc(mono(pi_count(J).shifted(-n)));
    for (const auto &mp : enumerate_marked_patterns(J)) {
        LinearForm exponent;
        for (const SVar &v : mp.partition.coincident_pairs()) {
            exponent += LinearForm(v, -1);
        }
        RationalSum factor(RationalFn::constant(PrimeLaurent(1)));
        for (const Block &b : blocks(mp)) {
            if (b.marked) {
                exponent += -t_form(b.members, t);
                factor = factor * L2_sum(b.members, b.members, t);
            } else {
                factor = factor * L1_sum(b.members);
            }
        }
        acc += factor * mono(class_count(mp).shifted(-n), exponent);
    }
    return store(key, acc);
}

RationalSum ZetaEngine::H0_sum(const IndexSet &K) {
    if (K.empty()) {
        return RationalFn::constant(PrimeLaurent(1));
    }
    return L2_sum(K, K, 1) * mono(1, -K.size(), -(t_form(K, 1) + pair_form(K)));
}

RationalSum ZetaEngine::Z0_sum(const IndexSet &I) {
    if (I.empty()) {
        return RationalFn::constant(PrimeLaurent(1));
    }
    require_in_T(I, "Z0");
    const MemoKey key{MemoKind::Z0, I.bits(), 0, 0};
    if (auto hit = lookup(key)) {
        return *hit;
    }
    RationalSum acc = H0_sum(I);
    for (const IndexSet &J : I.subsets(false, true)) {
        acc += H0_sum(I - J) * M1_sum(J);
    }
    return store(key, acc);
}

RationalSum ZetaEngine::Z1_sum(const IndexSet &I) {
    if (I.empty()) {
        return RationalFn::constant(PrimeLaurent(1));
    }
    require_in_T(I, "Z1");
    const MemoKey key{MemoKind::Z1, I.bits(), 0, 0};
    if (auto hit = lookup(key)) {
        return *hit;
    }
    RationalSum acc = L0_sum(I);
    for (const IndexSet &J : I.subsets(false, false)) {
        const IndexSet rest = I - J;
        const AffineExponent m = sector_form(rest);
        acc += Z1_sum(rest) * L0_sum(J) * mono(1, static_cast<int>(m.constant), m.form);
    }
    const AffineExponent e = sector_form(I);
    return store(key, acc * RationalFn::inverse_factor(static_cast<int>(e.constant), e.form));
}

RationalSum ZetaEngine::ZN_sum() {
    RationalSum out;
    for (const IndexSet &I : ctx_.T.subsets(true, true)) {
        out += Z0_sum(I) * Z1_sum(ctx_.T - I) * RationalFn(PolyExpr(sector_exponent(I)));
    }
    return out;
}

RationalFn base_Z_F_component(int which, std::optional<SVar> s1, std::optional<SVar> s2,
                              SVar s3) {
    const auto form_of = [](std::optional<SVar> s) {
        return s ? LinearForm(*s) : LinearForm();
    };
    const PrimeLaurent q = one_minus_pinv();
    switch (which) {
    case 1:
    case 2: {
        const LinearForm f = form_of(which == 1 ? s1 : s2);
        return mono(q * q, LinearForm()) * mono(1, -1, -f) * RationalFn::inverse_factor(-1, -f);
    }
    case 3: {
        const PrimeLaurent lead = PrimeLaurent::falling(1, 2).shifted(-2);
        const RationalFn tail = mono(PrimeLaurent::p_minus(1).shifted(-2) * q, -LinearForm(s3)) *
                                RationalFn::inverse_factor(-1, -LinearForm(s3));
        return mono(lead) + tail;
    }
    default:
        throw Error(ErrorCode::InvalidVariable, "base_Z_F component must be 1, 2 or 3");
    }
}

RationalFn base_Z_F(std::optional<SVar> s1, std::optional<SVar> s2, SVar s3) {
    LinearForm total(s3);
    if (s1) {
        total += LinearForm(*s1);
    }
    if (s2) {
        total += LinearForm(*s2);
    }
    const RationalFn sum = base_Z_F_component(1, s1, s2, s3) + base_Z_F_component(2, s1, s2, s3) +
                           base_Z_F_component(3, s1, s2, s3);
    return sum * RationalFn::inverse_factor(-2, -total);
}

RationalFn M1_single_uncorrected(SVar s) {
    const RationalFn first =
        RationalFn::constant(one_minus_pinv()) * RationalFn::inverse_factor(-1, -LinearForm(s));
    return mono(1, -1) * (first + mono(PrimeLaurent::p_minus(2)));
}

} // namespace knzeta
