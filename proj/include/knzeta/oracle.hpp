#ifndef KNZETA_ORACLE_HPP
#define KNZETA_ORACLE_HPP

// Independent numerical evaluation of p-adic integrals of products of
// the factors |x_i|^e, |1 - x_i|^e and |x_i - x_j|^e.
//
// exact_value solves the residue-cell recursion exactly through the
// self-similarity of homogeneous cells. exact_truncated cuts the same recursion
// at a depth m and bounds the omitted cells. mc_integral is a
// valuation-stratified Monte Carlo with seeded substreams.
//
// No evaluator uses the symbolic recursions or the pattern counts.

#include <complex>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "knzeta/symbolic.hpp"
#include "knzeta/zeta.hpp"

namespace knzeta {

// Outside is Q_p minus Z_p; UnitsNotOne is the units x with x != 1 mod p.
enum class Domain { Zp, pZp, Units, UnitsNotOne, Outside };
enum class FactorKind { abs_x, abs_one_minus_x, abs_diff };

const char *domain_name(Domain d);
const char *factor_kind_name(FactorKind k);

// constant + form(s)
struct Exponent {
    Complex constant{0.0, 0.0};
    LinearForm form;

    static Exponent numeric(Complex c) { return Exponent{c, {}}; }
    static Exponent of(const LinearForm &f, double c = 0.0) { return Exponent{Complex(c, 0.0), f}; }
    Complex value(const Assignment &assign) const;
    Exponent operator+(const Exponent &o) const;
    Exponent operator-() const;
    std::string str() const;
};

// Indices are 1-based; j is used only by abs_diff.
struct Factor {
    FactorKind kind = FactorKind::abs_x;
    int i = 1;
    int j = 0;
    Exponent exponent;
};

struct IntegralSpec {
    std::string name;
    int n = 0;
    std::vector<Domain> domain;
    std::vector<Factor> factors;

    // Throws InvalidVariable on out-of-range indices or a size mismatch.
    void validate() const;
    bool has_outside() const;
    nlohmann::json to_json() const;
};

// Digits of one sampled p-adic number per coordinate, least significant first.
struct PadicSample {
    std::vector<std::vector<int>> digits;
    int level = 0;

    // sum_k digits[i][k] p^k
    std::uint64_t integer(std::size_t i, int p) const;
};

struct Estimate {
    Complex value{0.0, 0.0};
    double stderr_ = 0.0;
    double bias_bound = 0.0;
    long samples = 0;
    long strata = 0;
    long bias_events = 0;

    nlohmann::json to_json() const;
};

struct TruncatedResult {
    Complex value{0.0, 0.0};
    // Present when every exponent is a real integer.
    std::optional<Rational> exact;
    double tail_bound = 0.0;
    long cells = 0;
};

// Rewrites every Outside coordinate x as 1/y with y in pZ_p, including the
// Jacobian |y|^{-2}. The result integrates over Z_p-type domains only.
IntegralSpec invert_sectors(const IntegralSpec &spec);

// The 2^n sector specs covering Q_p^n: coordinates in S lie in Z_p, the
// others outside Z_p. Each result has domain Zp or Outside per coordinate.
std::vector<IntegralSpec> full_space_sectors(const std::string &name, int n,
                                             const std::vector<Factor> &factors);

// Exact value through self-similar cell recursion. When a homogeneous cell
// series diverges this throws TailNotGeometric unless continuation is set,
// in which case the geometric series is summed formally.
Complex exact_value(const IntegralSpec &spec, int p, const Assignment &assign,
                    bool continuation = false, long work_budget = 50'000'000);

// Partial sum over cells resolved at depth at most m plus a bound on the rest.
// Throws TailNotGeometric when |integrand| is not integrable, BudgetExceeded
// when more than work_budget cells would be visited.
TruncatedResult exact_truncated(const IntegralSpec &spec, int p, const Assignment &assign, int m,
                                long work_budget = 10'000'000);

struct McOptions {
    bool continuation = false;
    unsigned threads = 0; // 0 selects the hardware concurrency
    long min_samples_per_stratum = 64;
};

// Stratified Monte Carlo. Strata are per-coordinate labels: valuation shells
// v < m, the residual ball p^m Z_p, and for units (when some |1 - x| factor is
// present) the shells of ord(1 - x) below m and the ball 1 + p^m Z_p. Residual
// balls are integrated in closed form through exact_value; a stratum where
// every coordinate is residual is folded back by homogeneity when the
// integrand and domain allow it. Stream k of the RNG is mt19937_64 seeded with
// splitmix64(seed + k), where k indexes the stratum.
Estimate mc_integral(const IntegralSpec &spec, int p, const Assignment &assign, long samples,
                     int m, std::uint64_t seed, const McOptions &opt = {});
Estimate mc_integral(const std::vector<IntegralSpec> &specs, int p, const Assignment &assign,
                     long samples, int m, std::uint64_t seed, const McOptions &opt = {});

enum class LabelKind { Shell, Generic, Near1, Deep0, Deep1 };

struct StratumLabel {
    LabelKind kind = LabelKind::Shell;
    int depth = 0;
    friend auto operator<=>(const StratumLabel &, const StratumLabel &) = default;
};

// Admissible labels of one coordinate and their exact measures.
std::vector<std::pair<StratumLabel, Rational>>
coordinate_strata(Domain d, bool split_near_one, int p, int m, std::optional<int> cap = {});

struct Stratum {
    std::vector<StratumLabel> labels;
    Rational measure;
};

std::vector<Stratum> stratify(const IntegralSpec &spec, int p, int m);

struct ProbeResult {
    std::vector<double> partial; // partial[k] is the integral over the ball B_{k+1}
    std::vector<double> diffs;   // diffs[k] = partial[k+1] - partial[k]
    nlohmann::json to_json() const;
};

// Integrals over the balls B_k = {|x_i| <= p^k}, k = 1..m, of the sum of the
// given sector specs. Requires a real assignment with nonnegative values.
ProbeResult divergence_probe(const std::vector<IntegralSpec> &sectors, int p,
                             const Assignment &assign, int m);

struct Budget {
    long samples = 1'000'000;
    int level = 12;
    std::uint64_t seed = 1;
    int depth = 200;
    bool continuation = false;
    bool force_mc = false;
};

struct Verdict {
    bool pass = false;
    std::string method;
    Complex symbolic{0.0, 0.0};
    Complex estimate{0.0, 0.0};
    double stderr_ = 0.0;
    double bias = 0.0;
    double roundoff = 0.0;

    double deviation() const { return std::abs(symbolic - estimate); }
    double tolerance() const { return 4.0 * stderr_ + bias + roundoff; }
    nlohmann::json to_json() const;
};

// PASS when |symbolic - estimate| <= 4 stderr + bias + roundoff. The exact
// truncated evaluator is used when it applies, Monte Carlo otherwise.
Verdict compare(Complex symbolic, const std::vector<IntegralSpec> &specs, int p,
                const Assignment &assign, const Budget &budget);
Verdict compare(const RationalFn &symbolic, const std::vector<IntegralSpec> &specs, int p,
                const Assignment &assign, const Budget &budget);
Verdict compare(const RationalSum &symbolic, const std::vector<IntegralSpec> &specs, int p,
                const Assignment &assign, const Budget &budget);

// Integral specs of the auxiliary integrals of the N-point amplitude, with
// coordinates numbered in the increasing order of the index set.
IntegralSpec spec_L0(const AmplitudeContext &ctx, const IndexSet &J);
IntegralSpec spec_L1(const AmplitudeContext &ctx, const IndexSet &I);
IntegralSpec spec_L2(const AmplitudeContext &ctx, const IndexSet &I, const IndexSet &K, int t);
IntegralSpec spec_M1(const AmplitudeContext &ctx, const IndexSet &J);
IntegralSpec spec_Z0(const AmplitudeContext &ctx, const IndexSet &I);
IntegralSpec spec_Z1(const AmplitudeContext &ctx, const IndexSet &I);
// The amplitude integrand over Q_p^{N-3}, split into its 2^{N-3} sectors. Each
// coordinate has domain Zp or Outside; the evaluators invert Outside
// coordinates themselves.
std::vector<IntegralSpec> amplitude_sectors(const AmplitudeContext &ctx);
// The sector where exactly the coordinates of I are in Z_p.
IntegralSpec amplitude_sector(const AmplitudeContext &ctx, const IndexSet &I);
// Integral over Z_p^2 of |x|^{s1} |y|^{s2} |x - y|^{s3}.
IntegralSpec spec_base_Z_F(std::optional<SVar> s1, std::optional<SVar> s2, SVar s3);
// Integral over the units of |1 - x|^s.
IntegralSpec spec_M1_single(SVar s);

} // namespace knzeta

#endif
