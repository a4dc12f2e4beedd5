#ifndef KNZETA_ZETA_HPP
#define KNZETA_ZETA_HPP

// Memoized recursions for the auxiliary integrals L0, L1, L2, M1, Z0, Z1 and
// the N-point zeta function Z^(N)(s). Values are kept as exact RationalSum
// objects; the single-fraction RationalFn form is produced on request.
//
// Thread safety: a ZetaEngine may be shared between threads. The memo table
// admits concurrent readers; insertions are serialized by a writer lock. Two
// threads racing on the same key compute identical values and the first
// insertion wins.

#include <cstdint>
#include <map>
#include <optional>
#include <shared_mutex>
#include <string>
#include <vector>

#include "knzeta/combinatorics.hpp"
#include "knzeta/symbolic.hpp"

namespace knzeta {

struct AmplitudeContext {
    int N = 4;
    IndexSet T;
    std::vector<SVar> vars;

    // Requires N >= 4 and N <= 31.
    static AmplitudeContext make(int N);

    int last() const { return N - 1; }
    int dimension() const { return static_cast<int>(vars.size()); }
    // s_{t i} for t in {1, N-1}
    SVar st(int t, int i) const { return SVar::make(t, i); }
};

enum class MemoKind { L0, L1, L2, M1, Z0, Z1 };

const char *memo_kind_name(MemoKind k);

struct MemoKey {
    MemoKind kind = MemoKind::L0;
    std::uint32_t first = 0;
    std::uint32_t second = 0;
    int t = 0;

    std::string str() const;
    friend auto operator<=>(const MemoKey &, const MemoKey &) = default;
};

// Exponent data p^{c} p^{form}.
struct AffineExponent {
    long constant = 0;
    LinearForm form;
};

class ZetaEngine {
public:
    explicit ZetaEngine(int N);
    explicit ZetaEngine(const AmplitudeContext &ctx);

    const AmplitudeContext &context() const { return ctx_; }

    // Single-fraction forms. Each combines the corresponding *_sum value over
    // one common denominator, which is practical while |T| <= 2 or the index
    // sets are small.
    RationalFn L0(const IndexSet &J) { return L0_sum(J).combine(); }
    RationalFn L1_full(const IndexSet &I) { return L1_sum(I).combine(); }
    RationalFn L1_pattern(const CoincidencePattern &pat) { return L1_pattern_sum(pat).combine(); }
    RationalFn L2(const IndexSet &I, const IndexSet &K, int t) { return L2_sum(I, K, t).combine(); }
    RationalFn M1(const IndexSet &J) { return M1_sum(J).combine(); }
    RationalFn Z0(const IndexSet &I) { return Z0_sum(I).combine(); }
    RationalFn Z1(const IndexSet &I) { return Z1_sum(I).combine(); }
    RationalFn H0(const IndexSet &K) { return H0_sum(K).combine(); }
    RationalFn ZN() { return ZN_sum().combine(); }

    // Sum-of-fractions forms; these are what the recursions compute and memoize.
    RationalSum L0_sum(const IndexSet &J);
    RationalSum L1_sum(const IndexSet &I);
    RationalSum L1_pattern_sum(const CoincidencePattern &pat);
    RationalSum L2_sum(const IndexSet &I, const IndexSet &K, int t);
    RationalSum M1_sum(const IndexSet &J);
    RationalSum Z0_sum(const IndexSet &I);
    RationalSum Z1_sum(const IndexSet &I);
    RationalSum H0_sum(const IndexSet &K);
    RationalSum ZN_sum();

    // p^{M(s)} attached to the sector where exactly the coordinates of I are integral.
    Term sector_exponent(const IndexSet &I) const;
    // |J| + sum_{i in J}(s_1i + s_{N-1,i}) + sum of s_ij over pairs of T meeting J.
    AffineExponent sector_form(const IndexSet &J) const;
    // Sum of s_ij over pairs within S.
    LinearForm pair_form(const IndexSet &S) const;
    // Sum of s_{t i} over i in S.
    LinearForm t_form(const IndexSet &S, int t) const;

    std::size_t memo_size() const;
    void clear_memo();
    nlohmann::json memo_to_json() const;
    // Merges entries; returns the number of entries loaded.
    std::size_t memo_from_json(const nlohmann::json &j);

private:
    std::optional<RationalSum> lookup(const MemoKey &k) const;
    RationalSum store(const MemoKey &k, RationalSum v);
    void require_in_T(const IndexSet &S, const char *what) const;

    AmplitudeContext ctx_;
    mutable std::shared_mutex mu_;
    std::map<MemoKey, RationalSum> memo_;
};

// Z(s1,s2,s3) = integral over Z_p^2 of |x|^{s1}|y|^{s2}|x-y|^{s3}, assembled
// from its three residue components. An empty optional means the zero form.
RationalFn base_Z_F(std::optional<SVar> s1, std::optional<SVar> s2, SVar s3);

// Component terms of base_Z_F, exposed for structural comparison.
RationalFn base_Z_F_component(int which, std::optional<SVar> s1, std::optional<SVar> s2, SVar s3);

// Candidate one-index M1 value p^{-1}((1-p^{-1})/(1-p^{-1-s}) + p - 2), which
// lacks the p^{-s} factor of the first term. Used only by the discrepancy check.
RationalFn M1_single_uncorrected(SVar s);

} // namespace knzeta

#endif
