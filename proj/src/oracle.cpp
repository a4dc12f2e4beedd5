#include "knzeta/oracle.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <functional>
#include <map>
#include <random>
#include <sstream>
#include <thread>

namespace knzeta {

namespace {

using LD = long double;
using CD = std::complex<long double>;

// Factor with resolved exponent and 0-based indices.
struct NF {
    FactorKind kind;
    int i;
    int j;
    CD e;
};

struct Problem {
    int n = 0;
    std::vector<Domain> dom;
    std::vector<NF> f;
};

Problem resolve(const IntegralSpec &spec, const Assignment &assign) {
    spec.validate();
    Problem pr;
    pr.n = spec.n;
    pr.dom = spec.domain;
    for (const Factor &f : spec.factors) {
        const Complex e = f.exponent.value(assign);
        pr.f.push_back(NF{f.kind, f.i - 1, f.j - 1, CD(e.real(), e.imag())});
    }
    return pr;
}

Problem real_part(const Problem &pr) {
    Problem out = pr;
    for (NF &f : out.f) {
        f.e = CD(f.e.real(), 0.0L);
    }
    return out;
}

// p^x
CD ppow(int p, CD x) { return std::exp(x * std::log(static_cast<LD>(p))); }
LD ppow_re(int p, LD x) { return std::pow(static_cast<LD>(p), x); }

std::vector<int> allowed_digits(Domain d, int p) {
    std::vector<int> out;
    switch (d) {
    case Domain::Zp:
        for (int r = 0; r < p; ++r) {
            out.push_back(r);
        }
        break;
    case Domain::pZp:
        out.push_back(0);
        break;
    case Domain::Units:
        for (int r = 1; r < p; ++r) {
            out.push_back(r);
        }
        break;
    case Domain::UnitsNotOne:
        for (int r = 2; r < p; ++r) {
            out.push_back(r);
        }
        break;
    case Domain::Outside:
        throw Error(ErrorCode::InvalidVariable, "Outside coordinates must be inverted first");
    }
    return out;
}

// Calls fn(r) for every r in the product of the digit lists.
template <typename F>
void for_each_digits(const std::vector<std::vector<int>> &lists, F &&fn) {
    const std::size_t k = lists.size();
    for (const auto &l : lists) {
        if (l.empty()) {
            return;
        }
    }
    std::vector<std::size_t> idx(k, 0);
    std::vector<int> r(k);
    for (std::size_t a = 0; a < k; ++a) {
        r[a] = lists[a][0];
    }
    while (true) {
        fn(r);
        std::size_t a = 0;
        while (a < k) {
            if (++idx[a] < lists[a].size()) {
                r[a] = lists[a][idx[a]];
                break;
            }
            idx[a] = 0;
            r[a] = lists[a][0];
            ++a;
        }
        if (a == k) {
            return;
        }
    }
}

bool integer_exponents(const Problem &pr) {
    return std::all_of(pr.f.begin(), pr.f.end(), [](const NF &f) {
        return f.e.imag() == 0 && std::floor(f.e.real()) == f.e.real() && std::abs(f.e.real()) < 1e6;
    });
}

Rational rational_ppow(int p, long e) {
    mpz_class pe;
    mpz_ui_pow_ui(pe.get_mpz_t(), static_cast<unsigned long>(p), static_cast<unsigned long>(std::labs(e)));
    return e >= 0 ? Rational(pe) : Rational(mpz_class(1), pe);
}

// Residue-cell recursion. A cell on which a set U of factors vanishes modulo
// p is rescaled around its common zero; the rescaled integrand is the
// homogeneous product H(U) of |u_i|^e and |u_i - u_j|^e over Z_p^{A(U)}.
class CellSolver {
public:
    CellSolver(Problem pr, int p, bool continuation, long budget)
        : pr_(std::move(pr)), p_(p), continuation_(continuation), budget_(budget) {
        if (pr_.f.size() > 63) {
            throw Error(ErrorCode::BudgetExceeded, "too many factors");
        }
    }

    long work() const { return work_; }

    CD top() {
        CD acc = 0;
        for_each_top([&](std::uint64_t U) { acc += U == 0 ? CD(1) : scale(U) * H(U); });
        return acc * ppow(p_, CD(-pr_.n));
    }

    CD H(std::uint64_t U) {
        if (U == 0) {
            return 1;
        }
        if (auto it = memo_.find(U); it != memo_.end()) {
            return it->second;
        }
        const std::vector<int> A = coords(U);
        const int k = static_cast<int>(A.size());
        long self = 0;
        CD acc = 0;
        for_each_local(U, A, [&](std::uint64_t V) {
            if (V == U) {
                ++self;
            } else {
                acc += V == 0 ? CD(1) : scale(V) * H(V);
            }
        });
        const CD ratio = static_cast<LD>(self) * ppow(p_, CD(-k) - sum_e(U));
        const LD ratio_re = static_cast<LD>(self) * ppow_re(p_, -k - sum_e(U).real());
        if (ratio_re >= 1 && !continuation_) {
            throw Error(ErrorCode::TailNotGeometric,
                        "integral diverges: cell ratio " + std::to_string(static_cast<double>(ratio_re)));
        }
        if (std::abs(CD(1) - ratio) < 1e-14L) {
            throw Error(ErrorCode::PoleProximity, "homogeneous cell series at a pole");
        }
        const CD h = acc * ppow(p_, CD(-k)) / (CD(1) - ratio);
        memo_[U] = h;
        return h;
    }

    // Truncated partial sum, its exact rational twin and the tail bound.
    struct Partial {
        CD value;
        std::optional<Rational> exact;
        LD tail;
    };

    Partial truncated(int m, CellSolver &real_solver, bool track_exact) {
        if (m < 1) {
            throw Error(ErrorCode::InvalidVariable, "truncation depth must be at least 1");
        }
        track_exact_ = track_exact;
        Partial out{0, track_exact ? std::optional<Rational>(Rational(0)) : std::nullopt, 0};
        for_each_top([&](std::uint64_t U) {
            if (U == 0) {
                out.value += 1;
                if (out.exact) {
                    *out.exact += 1;
                }
                return;
            }
            const Node &nd = node(m - 1, U, real_solver);
            out.value += scale(U) * nd.value;
            if (out.exact) {
                *out.exact += scale_exact(U) * nd.exact;
            }
            out.tail += scale_re(U) * nd.tail;
        });
        out.value *= ppow(p_, CD(-pr_.n));
        out.tail *= ppow_re(p_, -pr_.n);
        if (out.exact) {
            *out.exact *= rational_ppow(p_, -pr_.n);
        }
        return out;
    }

private:
    struct Node {
        CD value;
        Rational exact;
        LD tail;
    };

    void count_work() {
        if (++work_ > budget_) {
            throw Error(ErrorCode::BudgetExceeded, "cell budget " + std::to_string(budget_) + " exhausted");
        }
    }

    template <typename F>
    void for_each_top(F &&fn) {
        std::vector<std::vector<int>> lists;
        for (Domain d : pr_.dom) {
            lists.push_back(allowed_digits(d, p_));
        }
        for_each_digits(lists, [&](const std::vector<int> &r) {
            count_work();
            std::uint64_t U = 0;
            for (std::size_t q = 0; q < pr_.f.size(); ++q) {
                const NF &f = pr_.f[q];
                const bool zero = f.kind == FactorKind::abs_x           ? r[f.i] == 0
                                  : f.kind == FactorKind::abs_one_minus_x ? r[f.i] == 1
                                                                          : r[f.i] == r[f.j];
                if (zero) {
                    U |= std::uint64_t{1} << q;
                }
            }
            fn(U);
        });
    }

    template <typename F>
    void for_each_local(std::uint64_t U, const std::vector<int> &A, F &&fn) {
        std::vector<int> pos(static_cast<std::size_t>(pr_.n), -1);
        for (std::size_t a = 0; a < A.size(); ++a) {
            pos[static_cast<std::size_t>(A[a])] = static_cast<int>(a);
        }
        std::vector<int> all(static_cast<std::size_t>(p_));
        for (int d = 0; d < p_; ++d) {
            all[static_cast<std::size_t>(d)] = d;
        }
        const std::vector<std::vector<int>> lists(A.size(), all);
        for_each_digits(lists, [&](const std::vector<int> &r) {
            count_work();
            std::uint64_t V = 0;
            for (std::size_t q = 0; q < pr_.f.size(); ++q) {
                if (((U >> q) & 1U) == 0) {
                    continue;
                }
                const NF &f = pr_.f[q];
                const bool zero = f.kind == FactorKind::abs_diff ? r[pos[f.i]] == r[pos[f.j]] : r[pos[f.i]] == 0;
                if (zero) {
                    V |= std::uint64_t{1} << q;
                }
            }
            fn(V);
        });
    }

    std::vector<int> coords(std::uint64_t U) const {
        std::vector<bool> in(static_cast<std::size_t>(pr_.n), false);
        for (std::size_t q = 0; q < pr_.f.size(); ++q) {
            if ((U >> q) & 1U) {
                in[static_cast<std::size_t>(pr_.f[q].i)] = true;
                if (pr_.f[q].kind == FactorKind::abs_diff) {
                    in[static_cast<std::size_t>(pr_.f[q].j)] = true;
                }
            }
        }
        std::vector<int> out;
        for (int i = 0; i < pr_.n; ++i) {
            if (in[static_cast<std::size_t>(i)]) {
                out.push_back(i);
            }
        }
        return out;
    }

    CD sum_e(std::uint64_t U) const {
        CD s = 0;
        for (std::size_t q = 0; q < pr_.f.size(); ++q) {
            if ((U >> q) & 1U) {
                s += pr_.f[q].e;
            }
        }
        return s;
    }

    CD scale(std::uint64_t U) const { return ppow(p_, -sum_e(U)); }
    LD scale_re(std::uint64_t U) const { return ppow_re(p_, -sum_e(U).real()); }
    Rational scale_exact(std::uint64_t U) const {
        return rational_ppow(p_, -static_cast<long>(std::llround(static_cast<double>(sum_e(U).real()))));
    }

    const Node &node(int d, std::uint64_t U, CellSolver &real_solver) {
        const auto key = std::make_pair(d, U);
        if (auto it = nodes_.find(key); it != nodes_.end()) {
            return it->second;
        }
        Node nd{0, Rational(0), 0};
        if (d == 0) {
            nd.tail = real_solver.H(U).real();
        } else {
            const std::vector<int> A = coords(U);
            const int k = static_cast<int>(A.size());
            for_each_local(U, A, [&](std::uint64_t V) {
                if (V == 0) {
                    nd.value += 1;
                    if (track_exact_) {
                        nd.exact += 1;
                    }
                    return;
                }
                const Node &child = node(d - 1, V, real_solver);
                nd.value += scale(V) * child.value;
                if (track_exact_) {
                    nd.exact += scale_exact(V) * child.exact;
                }
                nd.tail += scale_re(V) * child.tail;
            });
            nd.value *= ppow(p_, CD(-k));
            nd.tail *= ppow_re(p_, -k);
            if (track_exact_) {
                nd.exact *= rational_ppow(p_, -k);
            }
        }
        return nodes_.emplace(key, std::move(nd)).first->second;
    }

    Problem pr_;
    int p_;
    bool continuation_;
    long budget_;
    long work_ = 0;
    bool track_exact_ = false;
    std::map<std::uint64_t, CD> memo_;
    std::map<std::pair<int, std::uint64_t>, Node> nodes_;
};

Complex to_complex(CD z) { return Complex(static_cast<double>(z.real()), static_cast<double>(z.imag())); }

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30U)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27U)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31U);
}

// Neumaier compensated sum of long doubles.
struct KahanSum {
    LD sum = 0;
    LD c = 0;
    void add(LD x) {
        const LD t = sum + x;
        if (std::fabs(sum) >= std::fabs(x)) {
            c += (sum - t) + x;
        } else {
            c += (x - t) + sum;
        }
        sum = t;
    }
    LD value() const { return sum + c; }
};

struct ComplexSum {
    KahanSum re;
    KahanSum im;
    void add(CD z) {
        re.add(z.real());
        im.add(z.imag());
    }
    CD value() const { return CD(re.value(), im.value()); }
};

// Valuation and ord(1 - x) of a label; w < 0 when ord(1 - x) is not fixed.
struct LabelVW {
    int v;
    int w;
};

LabelVW label_vw(const StratumLabel &l, int m) {
    switch (l.kind) {
    case LabelKind::Shell:
        return {l.depth, l.depth > 0 ? 0 : -1};
    case LabelKind::Generic:
        return {0, 0};
    case LabelKind::Near1:
        return {0, l.depth};
    case LabelKind::Deep0:
        return {m, 0};
    case LabelKind::Deep1:
        return {0, m};
    }
    return {0, 0};
}

// A group of coordinates sharing a non-residual label and linked by |u_a - u_b|^e.
struct RandomGroup {
    std::vector<int> coords;
    Domain domain;
    std::vector<std::tuple<int, int, CD>> diffs; // positions within coords
};

struct StratumPlan {
    std::size_t index = 0;
    CD weight = 0;
    std::vector<RandomGroup> groups;
    bool residual_self = false;
    int random_pairs = 0;
    LD min_diff_re = 0;
};

struct Stratifier {
    const Problem &pr;
    int p;
    int m;
    bool continuation;
    std::vector<std::optional<int>> caps;
    bool split = false;
    bool self_similar = false;
    std::map<std::pair<int, std::vector<int>>, CD> deep_memo;

    Stratifier(const Problem &problem, int prime, int level, bool cont, std::vector<std::optional<int>> c)
        : pr(problem), p(prime), m(level), continuation(cont), caps(std::move(c)) {
        if (caps.empty()) {
            caps.assign(static_cast<std::size_t>(pr.n), std::nullopt);
        }
        split = std::any_of(pr.f.begin(), pr.f.end(),
                            [](const NF &f) { return f.kind == FactorKind::abs_one_minus_x; });
        const bool uncapped = std::all_of(caps.begin(), caps.end(), [](const auto &c2) { return !c2; });
        const bool all_zp = std::all_of(pr.dom.begin(), pr.dom.end(), [](Domain d) { return d == Domain::Zp; });
        const bool all_pzp = std::all_of(pr.dom.begin(), pr.dom.end(), [](Domain d) { return d == Domain::pZp; });
        self_similar = !split && uncapped && pr.n > 0 && (all_zp || all_pzp);
    }

    std::vector<std::vector<std::pair<StratumLabel, Rational>>> options() const {
        std::vector<std::vector<std::pair<StratumLabel, Rational>>> out;
        for (int i = 0; i < pr.n; ++i) {
            out.push_back(coordinate_strata(pr.dom[static_cast<std::size_t>(i)], split, p, m,
                                            caps[static_cast<std::size_t>(i)]));
        }
        return out;
    }

    // Ratio q with (all-residual stratum) = q * (whole integral).
    CD self_ratio() const {
        CD s = 0;
        for (const NF &f : pr.f) {
            s += f.e;
        }
        const int steps = pr.dom[0] == Domain::Zp ? m : m - 1;
        return ppow(p, -static_cast<LD>(steps) * (CD(pr.n) + s));
    }

    CD deep_value(LabelKind kind, const std::vector<int> &members) {
        const auto key = std::make_pair(static_cast<int>(kind), members);
        if (auto it = deep_memo.find(key); it != deep_memo.end()) {
            return it->second;
        }
        std::vector<int> pos(static_cast<std::size_t>(pr.n), -1);
        for (std::size_t a = 0; a < members.size(); ++a) {
            pos[static_cast<std::size_t>(members[a])] = static_cast<int>(a);
        }
        Problem sub;
        sub.n = static_cast<int>(members.size());
        sub.dom.assign(members.size(), Domain::Zp);
        const FactorKind point = kind == LabelKind::Deep0 ? FactorKind::abs_x : FactorKind::abs_one_minus_x;
        CD total = 0;
        for (const NF &f : pr.f) {
            if (f.kind == point && pos[f.i] >= 0) {
                sub.f.push_back(NF{FactorKind::abs_x, pos[f.i], -1, f.e});
                total += f.e;
            } else if (f.kind == FactorKind::abs_diff && pos[f.i] >= 0 && pos[f.j] >= 0) {
                sub.f.push_back(NF{FactorKind::abs_diff, pos[f.i], pos[f.j], f.e});
                total += f.e;
            }
        }
        CellSolver solver(std::move(sub), p, continuation, 50'000'000);
        const CD v = ppow(p, -static_cast<LD>(m) * total) * solver.top();
        deep_memo.emplace(key, v);
        return v;
    }

    StratumPlan plan(const std::vector<StratumLabel> &labels, const Rational &measure) {
        StratumPlan sp;
        sp.weight = CD(static_cast<LD>(measure.get_d()));
        const bool all_deep0 = std::all_of(labels.begin(), labels.end(),
                                           [](const StratumLabel &l) { return l.kind == LabelKind::Deep0; });
        if (self_similar && all_deep0) {
            sp.residual_self = true;
            return sp;
        }
        std::map<StratumLabel, std::vector<int>> by_label;
        for (int i = 0; i < pr.n; ++i) {
            by_label[labels[static_cast<std::size_t>(i)]].push_back(i);
        }
        std::map<StratumLabel, RandomGroup> random;
        bool first_random = true;
        for (const NF &f : pr.f) {
            const StratumLabel &li = labels[static_cast<std::size_t>(f.i)];
            const LabelVW a = label_vw(li, m);
            if (f.kind == FactorKind::abs_x) {
                if (li.kind == LabelKind::Shell) {
                    sp.weight *= ppow(p, -static_cast<LD>(a.v) * f.e);
                }
                continue;
            }
            if (f.kind == FactorKind::abs_one_minus_x) {
                if (li.kind == LabelKind::Near1) {
                    sp.weight *= ppow(p, -static_cast<LD>(a.w) * f.e);
                }
                continue;
            }
            const StratumLabel &lj = labels[static_cast<std::size_t>(f.j)];
            if (li == lj) {
                if (li.kind == LabelKind::Deep0 || li.kind == LabelKind::Deep1) {
                    continue;
                }
                const int depth = li.kind == LabelKind::Generic ? 0 : li.depth;
                sp.weight *= ppow(p, -static_cast<LD>(depth) * f.e);
                RandomGroup &g = random[li];
                if (g.coords.empty()) {
                    g.coords = by_label[li];
                    g.domain = li.kind == LabelKind::Generic ? Domain::UnitsNotOne : Domain::Units;
                }
                const auto ia = std::find(g.coords.begin(), g.coords.end(), f.i) - g.coords.begin();
                const auto ja = std::find(g.coords.begin(), g.coords.end(), f.j) - g.coords.begin();
                g.diffs.emplace_back(static_cast<int>(ia), static_cast<int>(ja), f.e);
                ++sp.random_pairs;
                sp.min_diff_re = first_random ? f.e.real() : std::min(sp.min_diff_re, f.e.real());
                first_random = false;
                continue;
            }
            const LabelVW b = label_vw(lj, m);
            int d = 0;
            if (a.v != b.v) {
                d = std::min(a.v, b.v);
            } else if (a.w != b.w) {
                d = std::min(a.w, b.w);
            }
            sp.weight *= ppow(p, -static_cast<LD>(d) * f.e);
        }
        for (const auto &[label, members] : by_label) {
            if (label.kind == LabelKind::Deep0 || label.kind == LabelKind::Deep1) {
                sp.weight *= deep_value(label.kind, members);
            }
        }
        for (auto &[label, g] : random) {
            sp.groups.push_back(std::move(g));
        }
        return sp;
    }

    // Exact mean of a random group's integrand over its domain.
    CD group_mean_exact(const RandomGroup &g) {
        Problem sub;
        sub.n = static_cast<int>(g.coords.size());
        sub.dom.assign(g.coords.size(), g.domain);
        for (const auto &[a, b, e] : g.diffs) {
            sub.f.push_back(NF{FactorKind::abs_diff, a, b, e});
        }
        CellSolver solver(std::move(sub), p, continuation, 50'000'000);
        const LD unit = g.domain == Domain::Units ? static_cast<LD>(p - 1) / p : static_cast<LD>(p - 2) / p;
        return solver.top() / std::pow(unit, static_cast<LD>(g.coords.size()));
    }
};

int digits_per_word(int p) {
    int D = 0;
    unsigned __int128 v = 1;
    while (v * static_cast<unsigned>(p) <= (static_cast<unsigned __int128>(1) << 62U)) {
        v *= static_cast<unsigned>(p);
        ++D;
    }
    return D;
}

struct StratumResult {
    ComplexSum sum;
    KahanSum sum_sq;
    long n = 0;
    long events = 0;
    LD max_abs = 0;
};

StratumResult sample_stratum(const StratumPlan &sp, int p, long n, std::uint64_t seed) {
    StratumResult res;
    std::mt19937_64 rng(splitmix64(seed + sp.index));
    const int D = digits_per_word(p);
    std::uint64_t P = 1;
    for (int k = 0; k < D; ++k) {
        P *= static_cast<std::uint64_t>(p);
    }
    std::uniform_int_distribution<std::uint64_t> tail(0, P / static_cast<std::uint64_t>(p) - 1);
    const LD lnp = std::log(static_cast<LD>(p));
    std::vector<std::uint64_t> u;
    for (long s = 0; s < n; ++s) {
        CD log_value = 0;
        for (const RandomGroup &g : sp.groups) {
            u.resize(g.coords.size());
            const int lo = g.domain == Domain::Units ? 1 : 2;
            std::uniform_int_distribution<int> lead(lo, p - 1);
            for (auto &x : u) {
                x = static_cast<std::uint64_t>(lead(rng)) + static_cast<std::uint64_t>(p) * tail(rng);
            }
            for (const auto &[a, b, e] : g.diffs) {
                std::uint64_t d = (u[static_cast<std::size_t>(a)] + P - u[static_cast<std::size_t>(b)]) % P;
                int ord = 0;
                if (d == 0) {
                    ord = D;
                    ++res.events;
                } else {
                    while (d % static_cast<std::uint64_t>(p) == 0) {
                        d /= static_cast<std::uint64_t>(p);
                        ++ord;
                    }
                }
                log_value -= static_cast<LD>(ord) * e * lnp;
            }
        }
        const CD x = std::exp(log_value);
        res.sum.add(x);
        res.sum_sq.add(std::norm(x));
        res.max_abs = std::max(res.max_abs, std::abs(x));
        ++res.n;
    }
    return res;
}

Estimate mc_problem(const Problem &pr, int p, long samples, int m, std::uint64_t seed, const McOptions &opt) {
    if (m < 2) {
        throw Error(ErrorCode::InvalidVariable, "stratification level must be at least 2");
    }
    Stratifier st(pr, p, m, opt.continuation, {});
    const auto opts = st.options();
    std::vector<StratumPlan> plans;
    CD residual_weight = 0;
    bool has_residual = false;
    std::size_t index = 0;
    std::vector<std::vector<std::size_t>> lists;
    for (const auto &o : opts) {
        std::vector<std::size_t> l(o.size());
        for (std::size_t a = 0; a < o.size(); ++a) {
            l[a] = a;
        }
        lists.push_back(l);
    }
    std::vector<std::vector<int>> ilists;
    for (const auto &l : lists) {
        ilists.emplace_back(l.begin(), l.end());
    }
    for_each_digits(ilists, [&](const std::vector<int> &pick) {
        std::vector<StratumLabel> labels;
        Rational measure(1);
        for (std::size_t i = 0; i < pick.size(); ++i) {
            const auto &[label, mu] = opts[i][static_cast<std::size_t>(pick[i])];
            labels.push_back(label);
            measure *= mu;
        }
        StratumPlan sp = st.plan(labels, measure);
        sp.index = index++;
        if (sp.residual_self) {
            has_residual = true;
            residual_weight = sp.weight;
            return;
        }
        plans.push_back(std::move(sp));
    });

    Estimate est;
    est.strata = static_cast<long>(index);
    ComplexSum total;
    KahanSum var;
    KahanSum magnitude;
    LD bias = 0;
    std::vector<std::size_t> random_ids;
    LD random_mass = 0;
    for (std::size_t k = 0; k < plans.size(); ++k) {
        if (plans[k].groups.empty()) {
            total.add(plans[k].weight);
            magnitude.add(std::abs(plans[k].weight));
        } else {
            random_ids.push_back(k);
            random_mass += std::abs(plans[k].weight);
        }
    }
    std::vector<long> alloc(random_ids.size(), 0);
    for (std::size_t r = 0; r < random_ids.size(); ++r) {
        const LD share = random_mass > 0 ? std::abs(plans[random_ids[r]].weight) / random_mass : 0;
        alloc[r] = std::max(opt.min_samples_per_stratum, static_cast<long>(std::llround(share * samples)));
    }
    std::vector<StratumResult> results(random_ids.size());
    unsigned threads = opt.threads != 0 ? opt.threads : std::max(1U, std::thread::hardware_concurrency());
    threads = std::min<unsigned>(threads, static_cast<unsigned>(std::max<std::size_t>(1, random_ids.size())));
    std::atomic<std::size_t> next{0};
    auto worker = [&]() {
        while (true) {
            const std::size_t r = next.fetch_add(1);
            if (r >= random_ids.size()) {
                return;
            }
            results[r] = sample_stratum(plans[random_ids[r]], p, alloc[r], seed);
        }
    };
    std::vector<std::thread> pool;
    for (unsigned t = 1; t < threads; ++t) {
        pool.emplace_back(worker);
    }
    worker();
    for (auto &t : pool) {
        t.join();
    }
    const int D = digits_per_word(p);
    for (std::size_t r = 0; r < random_ids.size(); ++r) {
        const StratumPlan &sp = plans[random_ids[r]];
        const StratumResult &res = results[r];
        const LD nn = static_cast<LD>(res.n);
        const CD mean = res.sum.value() / nn;
        const LD second = res.sum_sq.value() / nn;
        const LD sample_var = std::max<LD>(0, (second - std::norm(mean)) * nn / std::max<LD>(1, nn - 1));
        total.add(sp.weight * mean);
        magnitude.add(std::abs(sp.weight * mean));
        var.add(std::norm(sp.weight) * sample_var / nn);
        est.samples += res.n;
        est.bias_events += res.events;
        const LD cell = ppow_re(p, -static_cast<LD>(D) * (1 + std::min<LD>(0, sp.min_diff_re)));
        bias += std::abs(sp.weight) * sp.random_pairs * cell * std::max<LD>(1, res.max_abs);
    }
    CD value = total.value();
    LD sd = std::sqrt(var.value());
    bias += 1e-12L * magnitude.value();
    if (has_residual) {
        const CD q = st.self_ratio();
        const LD q_re = std::abs(q);
        if (q_re >= 1 && !opt.continuation) {
            throw Error(ErrorCode::TailNotGeometric,
                        "integral diverges: residual ratio " + std::to_string(static_cast<double>(q_re)));
        }
        if (std::abs(CD(1) - q) < 1e-14L) {
            throw Error(ErrorCode::PoleProximity, "homogeneous residual at a pole");
        }
        const CD scale = CD(1) / (CD(1) - q);
        value *= scale;
        sd *= std::abs(scale);
        bias *= std::abs(scale);
        (void)residual_weight;
    }
    est.value = to_complex(value);
    est.stderr_ = static_cast<double>(sd);
    est.bias_bound = static_cast<double>(bias);
    return est;
}

// Exact integral through the stratification, with every random group
// integrated by the cell solver. Caps bound the valuation of capped coordinates.
CD stratified_exact(const Problem &pr, int p, int m, const std::vector<std::optional<int>> &caps,
                    bool continuation) {
    Stratifier st(pr, p, m, continuation, caps);
    st.self_similar = false;
    const auto opts = st.options();
    std::vector<std::vector<int>> ilists;
    for (const auto &o : opts) {
        std::vector<int> l(o.size());
        for (std::size_t a = 0; a < o.size(); ++a) {
            l[a] = static_cast<int>(a);
        }
        ilists.push_back(l);
    }
    ComplexSum total;
    for_each_digits(ilists, [&](const std::vector<int> &pick) {
        std::vector<StratumLabel> labels;
        Rational measure(1);
        for (std::size_t i = 0; i < pick.size(); ++i) {
            const auto &[label, mu] = opts[i][static_cast<std::size_t>(pick[i])];
            labels.push_back(label);
            measure *= mu;
        }
        StratumPlan sp = st.plan(labels, measure);
        CD v = sp.weight;
        for (const RandomGroup &g : sp.groups) {
            v *= st.group_mean_exact(g);
        }
        total.add(v);
    });
    if (pr.n == 0) {
        return 1;
    }
    return total.value();
}

IntegralSpec make_spec(std::string name, int n, Domain d) {
    IntegralSpec s;
    s.name = std::move(name);
    s.n = n;
    s.domain.assign(static_cast<std::size_t>(n), d);
    return s;
}

void add_pairs(IntegralSpec &s, const std::vector<int> &members) {
    for (std::size_t a = 0; a < members.size(); ++a) {
        for (std::size_t b = a + 1; b < members.size(); ++b) {
            s.factors.push_back(Factor{FactorKind::abs_diff, static_cast<int>(a) + 1, static_cast<int>(b) + 1,
                                       Exponent::of(LinearForm(SVar::make(members[a], members[b])))});
        }
    }
}

} // namespace

// ------------------------------------------------------------ spec types

const char *domain_name(Domain d) {
    switch (d) {
    case Domain::Zp:
        return "Z_p";
    case Domain::pZp:
        return "pZ_p";
    case Domain::Units:
        return "Z_p^x";
    case Domain::UnitsNotOne:
        return "Z_p^x minus 1+pZ_p";
    case Domain::Outside:
        return "Q_p minus Z_p";
    }
    return "?";
}

const char *factor_kind_name(FactorKind k) {
    switch (k) {
    case FactorKind::abs_x:
        return "abs_x";
    case FactorKind::abs_one_minus_x:
        return "abs_one_minus_x";
    case FactorKind::abs_diff:
        return "abs_diff";
    }
    return "?";
}

Complex Exponent::value(const Assignment &assign) const { return constant + form.eval(assign); }

Exponent Exponent::operator+(const Exponent &o) const { return Exponent{constant + o.constant, form + o.form}; }

Exponent Exponent::operator-() const { return Exponent{-constant, -form}; }

std::string Exponent::str() const {
    std::ostringstream os;
    bool any = false;
    if (constant != Complex(0.0, 0.0) || form.empty()) {
        os << constant.real();
        if (constant.imag() != 0) {
            os << (constant.imag() > 0 ? "+" : "") << constant.imag() << "i";
        }
        any = true;
    }
    for (const auto &[v, c] : form.entries()) {
        if (any) {
            os << (c > 0 ? " + " : " - ");
        } else if (c < 0) {
            os << "-";
        }
        const long a = std::labs(c);
        if (a != 1) {
            os << a << "*";
        }
        os << v.key();
        any = true;
    }
    return os.str();
}

void IntegralSpec::validate() const {
    if (n < 0 || static_cast<int>(domain.size()) != n) {
        throw Error(ErrorCode::InvalidVariable, name + ": domain size does not match n");
    }
    for (const Factor &f : factors) {
        const bool bad_i = f.i < 1 || f.i > n;
        const bool bad_j = f.kind == FactorKind::abs_diff && (f.j < 1 || f.j > n || f.j == f.i);
        if (bad_i || bad_j) {
            throw Error(ErrorCode::InvalidVariable, name + ": factor index out of range");
        }
    }
}

bool IntegralSpec::has_outside() const {
    return std::any_of(domain.begin(), domain.end(), [](Domain d) { return d == Domain::Outside; });
}

nlohmann::json IntegralSpec::to_json() const {
    nlohmann::json dom = nlohmann::json::array();
    for (Domain d : domain) {
        dom.push_back(domain_name(d));
    }
    nlohmann::json fs = nlohmann::json::array();
    for (const Factor &f : factors) {
        nlohmann::json j{{"kind", factor_kind_name(f.kind)}, {"i", f.i}, {"exponent", f.exponent.str()}};
        if (f.kind == FactorKind::abs_diff) {
            j["j"] = f.j;
        }
        fs.push_back(j);
    }
    return {{"name", name}, {"n", n}, {"domain", dom}, {"factors", fs}};
}

std::uint64_t PadicSample::integer(std::size_t i, int p) const {
    std::uint64_t v = 0;
    const auto &d = digits.at(i);
    for (std::size_t k = d.size(); k-- > 0;) {
        v = v * static_cast<std::uint64_t>(p) + static_cast<std::uint64_t>(d[k]);
    }
    return v;
}

nlohmann::json Estimate::to_json() const {
    return {{"value", {value.real(), value.imag()}},
            {"stderr", stderr_},
            {"bias", bias_bound},
            {"samples", samples},
            {"strata", strata},
            {"bias_events", bias_events}};
}

IntegralSpec invert_sectors(const IntegralSpec &spec) {
    spec.validate();
    IntegralSpec out;
    out.name = spec.name;
    out.n = spec.n;
    out.domain = spec.domain;
    std::vector<std::optional<Exponent>> point(static_cast<std::size_t>(spec.n));
    auto add_point = [&](int i, const Exponent &e) {
        auto &slot = point[static_cast<std::size_t>(i - 1)];
        slot = slot ? *slot + e : e;
    };
    auto outside = [&](int i) { return spec.domain[static_cast<std::size_t>(i - 1)] == Domain::Outside; };
    std::vector<Factor> kept;
    for (const Factor &f : spec.factors) {
        switch (f.kind) {
        case FactorKind::abs_x:
            if (outside(f.i)) {
                add_point(f.i, -f.exponent);
            } else {
                kept.push_back(f);
            }
            break;
        case FactorKind::abs_one_minus_x:
            if (outside(f.i)) {
                add_point(f.i, -f.exponent);
            } else {
                kept.push_back(f);
            }
            break;
        case FactorKind::abs_diff:
            if (outside(f.i) && outside(f.j)) {
                kept.push_back(f);
                add_point(f.i, -f.exponent);
                add_point(f.j, -f.exponent);
            } else if (outside(f.i)) {
                add_point(f.i, -f.exponent);
            } else if (outside(f.j)) {
                add_point(f.j, -f.exponent);
            } else {
                kept.push_back(f);
            }
            break;
        }
    }
    for (int i = 1; i <= spec.n; ++i) {
        if (outside(i)) {
            add_point(i, Exponent::numeric(Complex(-2.0, 0.0)));
            out.domain[static_cast<std::size_t>(i - 1)] = Domain::pZp;
        }
    }
    // Merge the remaining |x_i| factors into the per-coordinate exponent.
    for (const Factor &f : kept) {
        if (f.kind == FactorKind::abs_x) {
            add_point(f.i, f.exponent);
        } else {
            out.factors.push_back(f);
        }
    }
    for (int i = 1; i <= spec.n; ++i) {
        if (const auto &e = point[static_cast<std::size_t>(i - 1)]) {
            out.factors.push_back(Factor{FactorKind::abs_x, i, 0, *e});
        }
    }
    return out;
}

std::vector<IntegralSpec> full_space_sectors(const std::string &name, int n, const std::vector<Factor> &factors) {
    std::vector<IntegralSpec> out;
    for (std::uint32_t S = 0; S < (1U << static_cast<unsigned>(n)); ++S) {
        IntegralSpec s;
        s.n = n;
        s.factors = factors;
        std::string inside = "{";
        for (int i = 0; i < n; ++i) {
            const bool in = ((S >> static_cast<unsigned>(i)) & 1U) != 0;
            s.domain.push_back(in ? Domain::Zp : Domain::Outside);
            if (in) {
                inside += (inside.size() > 1 ? "," : "") + std::to_string(i + 1);
            }
        }
        s.name = name + " sector " + inside + "}";
        out.push_back(std::move(s));
    }
    return out;
}

// ------------------------------------------------------------ evaluators

Complex exact_value(const IntegralSpec &spec, int p, const Assignment &assign, bool continuation,
                    long work_budget) {
    const IntegralSpec s = spec.has_outside() ? invert_sectors(spec) : spec;
    CellSolver solver(resolve(s, assign), p, continuation, work_budget);
    return to_complex(solver.top());
}

TruncatedResult exact_truncated(const IntegralSpec &spec, int p, const Assignment &assign, int m,
                                long work_budget) {
    const IntegralSpec s = spec.has_outside() ? invert_sectors(spec) : spec;
    const Problem pr = resolve(s, assign);
    CellSolver solver(pr, p, false, work_budget);
    CellSolver real_solver(real_part(pr), p, false, work_budget);
    const auto part = solver.truncated(m, real_solver, integer_exponents(pr));
    TruncatedResult r;
    r.value = to_complex(part.value);
    r.exact = part.exact;
    r.tail_bound = static_cast<double>(part.tail);
    r.cells = solver.work() + real_solver.work();
    return r;
}

std::vector<std::pair<StratumLabel, Rational>>
coordinate_strata(Domain d, bool split_near_one, int p, int m, std::optional<int> cap) {
    std::vector<std::pair<StratumLabel, Rational>> out;
    const Rational unit = Rational(p - 1, p);
    auto shell = [&](int v) -> Rational { return unit * rational_ppow(p, -v); };
    auto add_unit_labels = [&]() {
        if (split_near_one) {
            if (p > 2) {
                out.push_back({{LabelKind::Generic, 0}, Rational(p - 2, p)});
            }
            for (int w = 1; w < m; ++w) {
                out.push_back({{LabelKind::Near1, w}, shell(w)});
            }
            out.push_back({{LabelKind::Deep1, m}, rational_ppow(p, -m)});
        } else {
            out.push_back({{LabelKind::Shell, 0}, unit});
        }
    };
    switch (d) {
    case Domain::Zp:
        add_unit_labels();
        for (int v = 1; v < m; ++v) {
            out.push_back({{LabelKind::Shell, v}, shell(v)});
        }
        out.push_back({{LabelKind::Deep0, m}, rational_ppow(p, -m)});
        break;
    case Domain::pZp:
        if (cap) {
            for (int v = 1; v <= *cap; ++v) {
                out.push_back({{LabelKind::Shell, v}, shell(v)});
            }
        } else {
            for (int v = 1; v < m; ++v) {
                out.push_back({{LabelKind::Shell, v}, shell(v)});
            }
            out.push_back({{LabelKind::Deep0, m}, rational_ppow(p, -m)});
        }
        break;
    case Domain::Units:
        add_unit_labels();
        break;
    case Domain::UnitsNotOne:
        if (p > 2) {
            out.push_back({{LabelKind::Generic, 0}, Rational(p - 2, p)});
        }
        break;
    case Domain::Outside:
        throw Error(ErrorCode::InvalidVariable, "Outside coordinates must be inverted first");
    }
    return out;
}

std::vector<Stratum> stratify(const IntegralSpec &spec, int p, int m) {
    const IntegralSpec s = spec.has_outside() ? invert_sectors(spec) : spec;
    s.validate();
    const bool split = std::any_of(s.factors.begin(), s.factors.end(),
                                   [](const Factor &f) { return f.kind == FactorKind::abs_one_minus_x; });
    std::vector<std::vector<std::pair<StratumLabel, Rational>>> opts;
    std::vector<std::vector<int>> ilists;
    for (Domain d : s.domain) {
        opts.push_back(coordinate_strata(d, split, p, m));
        std::vector<int> l(opts.back().size());
        for (std::size_t a = 0; a < l.size(); ++a) {
            l[a] = static_cast<int>(a);
        }
        ilists.push_back(l);
    }
    std::vector<Stratum> out;
    for_each_digits(ilists, [&](const std::vector<int> &pick) {
        Stratum st;
        st.measure = 1;
        for (std::size_t i = 0; i < pick.size(); ++i) {
            st.labels.push_back(opts[i][static_cast<std::size_t>(pick[i])].first);
            st.measure *= opts[i][static_cast<std::size_t>(pick[i])].second;
        }
        out.push_back(std::move(st));
    });
    return out;
}

Estimate mc_integral(const IntegralSpec &spec, int p, const Assignment &assign, long samples, int m,
                     std::uint64_t seed, const McOptions &opt) {
    const IntegralSpec s = spec.has_outside() ? invert_sectors(spec) : spec;
    return mc_problem(resolve(s, assign), p, samples, m, seed, opt);
}

Estimate mc_integral(const std::vector<IntegralSpec> &specs, int p, const Assignment &assign, long samples,
                     int m, std::uint64_t seed, const McOptions &opt) {
    Estimate total;
    LD var = 0;
    const long per = specs.empty() ? 0 : std::max<long>(1, samples / static_cast<long>(specs.size()));
    for (std::size_t k = 0; k < specs.size(); ++k) {
        const Estimate e = mc_integral(specs[k], p, assign, per, m, seed + (static_cast<std::uint64_t>(k) << 32U), opt);
        total.value += e.value;
        var += static_cast<LD>(e.stderr_) * e.stderr_;
        total.bias_bound += e.bias_bound;
        total.samples += e.samples;
        total.strata += e.strata;
        total.bias_events += e.bias_events;
    }
    total.stderr_ = static_cast<double>(std::sqrt(var));
    return total;
}

nlohmann::json ProbeResult::to_json() const { return {{"partial", partial}, {"diffs", diffs}}; }

ProbeResult divergence_probe(const std::vector<IntegralSpec> &sectors, int p, const Assignment &assign, int m) {
    for (const auto &[v, z] : assign) {
        if (z.imag() != 0 || z.real() < 0) {
            throw Error(ErrorCode::InvalidVariable, "divergence_probe needs real nonnegative " + v.key());
        }
    }
    ProbeResult out;
    for (int k = 1; k <= m; ++k) {
        LD sum = 0;
        for (const IntegralSpec &spec : sectors) {
            std::vector<std::optional<int>> caps;
            for (Domain d : spec.domain) {
                caps.push_back(d == Domain::Outside ? std::optional<int>(k) : std::nullopt);
            }
            const IntegralSpec s = spec.has_outside() ? invert_sectors(spec) : spec;
            sum += stratified_exact(resolve(s, assign), p, 4, caps, false).real();
        }
        out.partial.push_back(static_cast<double>(sum));
    }
    for (std::size_t k = 1; k < out.partial.size(); ++k) {
        out.diffs.push_back(out.partial[k] - out.partial[k - 1]);
    }
    return out;
}

nlohmann::json Verdict::to_json() const {
    return {{"verdict", pass ? "PASS" : "FAIL"},
            {"method", method},
            {"symbolic", {symbolic.real(), symbolic.imag()}},
            {"estimate", {estimate.real(), estimate.imag()}},
            {"stderr", stderr_},
            {"bias", bias},
            {"roundoff", roundoff}};
}

Verdict compare(Complex symbolic, const std::vector<IntegralSpec> &specs, int p, const Assignment &assign,
                const Budget &budget) {
    Verdict v;
    v.symbolic = symbolic;
    v.roundoff = 1e-9 * std::max(1.0, std::abs(symbolic));
    bool done = false;
    if (!budget.force_mc) {
        try {
            Complex value = 0;
            double tail = 0;
            long cells = 0;
            for (const IntegralSpec &s : specs) {
                const TruncatedResult r = exact_truncated(s, p, assign, budget.depth);
                value += r.value;
                tail += r.tail_bound;
                cells += r.cells;
            }
            v.estimate = value;
            v.bias = tail;
            v.method = "exact_truncated(depth=" + std::to_string(budget.depth) + ", cells=" + std::to_string(cells) + ")";
            done = true;
        } catch (const Error &e) {
            if (e.code() != ErrorCode::TailNotGeometric && e.code() != ErrorCode::BudgetExceeded) {
                throw;
            }
        }
    }
    if (!done) {
        McOptions opt;
        opt.continuation = budget.continuation;
        const Estimate e = mc_integral(specs, p, assign, budget.samples, budget.level, budget.seed, opt);
        v.estimate = e.value;
        v.stderr_ = e.stderr_;
        v.bias = e.bias_bound;
        v.method = "mc_integral(samples=" + std::to_string(e.samples) + ", level=" + std::to_string(budget.level) +
                   ", seed=" + std::to_string(budget.seed) + (budget.continuation ? ", continuation" : "") + ")";
    }
    v.pass = v.deviation() <= v.tolerance();
    return v;
}

Verdict compare(const RationalFn &symbolic, const std::vector<IntegralSpec> &specs, int p,
                const Assignment &assign, const Budget &budget) {
    return compare(symbolic.eval(p, assign), specs, p, assign, budget);
}

Verdict compare(const RationalSum &symbolic, const std::vector<IntegralSpec> &specs, int p,
                const Assignment &assign, const Budget &budget) {
    return compare(symbolic.eval(p, assign), specs, p, assign, budget);
}

// ------------------------------------------------------------ spec builders

IntegralSpec spec_L0(const AmplitudeContext &ctx, const IndexSet &J) {
    const auto mem = J.members();
    IntegralSpec s = make_spec("L0 " + J.str(), J.size(), Domain::Units);
    add_pairs(s, mem);
    (void)ctx;
    return s;
}

IntegralSpec spec_L1(const AmplitudeContext &ctx, const IndexSet &I) {
    const auto mem = I.members();
    IntegralSpec s = make_spec("L1 " + I.str(), I.size(), Domain::Zp);
    add_pairs(s, mem);
    (void)ctx;
    return s;
}

IntegralSpec spec_L2(const AmplitudeContext &ctx, const IndexSet &I, const IndexSet &K, int t) {
    const auto mem = I.members();
    IntegralSpec s = make_spec("L2 " + I.str() + " K=" + K.str() + " t=" + std::to_string(t), I.size(), Domain::Zp);
    for (std::size_t a = 0; a < mem.size(); ++a) {
        if (K.contains(mem[a])) {
            s.factors.push_back(Factor{FactorKind::abs_x, static_cast<int>(a) + 1, 0,
                                       Exponent::of(LinearForm(ctx.st(t, mem[a])))});
        }
    }
    add_pairs(s, mem);
    return s;
}

IntegralSpec spec_M1(const AmplitudeContext &ctx, const IndexSet &J) {
    const auto mem = J.members();
    IntegralSpec s = make_spec("M1 " + J.str(), J.size(), Domain::Units);
    for (std::size_t a = 0; a < mem.size(); ++a) {
        s.factors.push_back(Factor{FactorKind::abs_one_minus_x, static_cast<int>(a) + 1, 0,
                                   Exponent::of(LinearForm(ctx.st(ctx.last(), mem[a])))});
    }
    add_pairs(s, mem);
    return s;
}

IntegralSpec spec_Z0(const AmplitudeContext &ctx, const IndexSet &I) {
    const auto mem = I.members();
    IntegralSpec s = make_spec("Z0 " + I.str(), I.size(), Domain::Zp);
    for (std::size_t a = 0; a < mem.size(); ++a) {
        const int c = static_cast<int>(a) + 1;
        s.factors.push_back(Factor{FactorKind::abs_x, c, 0, Exponent::of(LinearForm(ctx.st(1, mem[a])))});
        s.factors.push_back(
            Factor{FactorKind::abs_one_minus_x, c, 0, Exponent::of(LinearForm(ctx.st(ctx.last(), mem[a])))});
    }
    add_pairs(s, mem);
    return s;
}

IntegralSpec spec_Z1(const AmplitudeContext &ctx, const IndexSet &I) {
    const auto mem = I.members();
    IntegralSpec s = make_spec("Z1 " + I.str(), I.size(), Domain::Zp);
    for (std::size_t a = 0; a < mem.size(); ++a) {
        const int i = mem[a];
        std::map<SVar, long> coeffs{{ctx.st(1, i), -1}, {ctx.st(ctx.last(), i), -1}};
        for (int j : ctx.T.members()) {
            if (j != i) {
                coeffs[SVar::make(i, j)] = -1;
            }
        }
        s.factors.push_back(
            Factor{FactorKind::abs_x, static_cast<int>(a) + 1, 0, Exponent::of(LinearForm(coeffs), -2.0)});
    }
    add_pairs(s, mem);
    return s;
}

namespace {

std::vector<Factor> amplitude_factors(const AmplitudeContext &ctx) {
    const auto mem = ctx.T.members();
    std::vector<Factor> f;
    for (std::size_t a = 0; a < mem.size(); ++a) {
        const int c = static_cast<int>(a) + 1;
        f.push_back(Factor{FactorKind::abs_x, c, 0, Exponent::of(LinearForm(ctx.st(1, mem[a])))});
        f.push_back(Factor{FactorKind::abs_one_minus_x, c, 0, Exponent::of(LinearForm(ctx.st(ctx.last(), mem[a])))});
    }
    for (std::size_t a = 0; a < mem.size(); ++a) {
        for (std::size_t b = a + 1; b < mem.size(); ++b) {
            f.push_back(Factor{FactorKind::abs_diff, static_cast<int>(a) + 1, static_cast<int>(b) + 1,
                               Exponent::of(LinearForm(SVar::make(mem[a], mem[b])))});
        }
    }
    return f;
}

} // namespace

std::vector<IntegralSpec> amplitude_sectors(const AmplitudeContext &ctx) {
    return full_space_sectors("Z" + std::to_string(ctx.N), ctx.T.size(), amplitude_factors(ctx));
}

IntegralSpec amplitude_sector(const AmplitudeContext &ctx, const IndexSet &I) {
    const auto mem = ctx.T.members();
    IntegralSpec s = make_spec("Z" + std::to_string(ctx.N) + " sector " + I.str(), ctx.T.size(), Domain::Outside);
    for (std::size_t a = 0; a < mem.size(); ++a) {
        if (I.contains(mem[a])) {
            s.domain[a] = Domain::Zp;
        }
    }
    s.factors = amplitude_factors(ctx);
    return s;
}

IntegralSpec spec_base_Z_F(std::optional<SVar> s1, std::optional<SVar> s2, SVar s3) {
    IntegralSpec s = make_spec("Z_F", 2, Domain::Zp);
    if (s1) {
        s.factors.push_back(Factor{FactorKind::abs_x, 1, 0, Exponent::of(LinearForm(*s1))});
    }
    if (s2) {
        s.factors.push_back(Factor{FactorKind::abs_x, 2, 0, Exponent::of(LinearForm(*s2))});
    }
    s.factors.push_back(Factor{FactorKind::abs_diff, 1, 2, Exponent::of(LinearForm(s3))});
    return s;
}

IntegralSpec spec_M1_single(SVar v) {
    IntegralSpec s = make_spec("M1 single", 1, Domain::Units);
    s.factors.push_back(Factor{FactorKind::abs_one_minus_x, 1, 0, Exponent::of(LinearForm(v))});
    return s;
}

} // namespace knzeta
