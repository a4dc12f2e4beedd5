#ifndef KNZETA_DOMAIN_HPP
#define KNZETA_DOMAIN_HPP

// Convergence polyhedra, the interior witness point, membership tests and
// pole hyperplanes extracted from computed denominators.

#include <map>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include <json.hpp>

#include "knzeta/symbolic.hpp"
#include "knzeta/zeta.hpp"

namespace knzeta {

enum class Relation { Less, Greater };

// constant + sum coeffs[v] * Re(v)  (rel)  0
struct AffineCondition {
    Rational constant;
    std::map<SVar, Rational> coeffs;
    Relation rel = Relation::Less;
    // Family tag such as "C1'" or "den", and a label naming the instance.
    std::string family;
    std::string label;

    double value(const Assignment &assign) const;
    Rational value_exact(const std::map<SVar, Rational> &point) const;
    bool holds(const Assignment &assign) const;
    bool holds_exact(const std::map<SVar, Rational> &point) const;
    AffineCondition negated() const;
    // Human-readable form with display names for the N-point amplitude.
    std::string str(int N) const;

    nlohmann::json to_json() const;
    static AffineCondition from_json(const nlohmann::json &j);

    friend bool operator==(const AffineCondition &a, const AffineCondition &b);
};

// a + L(Re s) = 0
struct PoleHyperplane {
    long constant = 0;
    std::map<SVar, long> coeffs;
    int multiplicity = 1;

    std::string str(int N) const;
    nlohmann::json to_json() const;
    static PoleHyperplane from_json(const nlohmann::json &j);
};

enum class ConditionFamily { C_primed, from_denominators };

// C1'-C4' for the amplitude context.
std::vector<AffineCondition> convergence_conditions(const AmplitudeContext &ctx,
                                                    ConditionFamily family);
// One strict inequality a + L(Re s) < 0 per denominator factor (1 - p^{a+L}).
std::vector<AffineCondition> conditions_from_denominators(const std::vector<DenFactor> &den);
// Computes ZN through the engine and derives its denominator conditions.
std::vector<AffineCondition> convergence_conditions(ZetaEngine &engine, ConditionFamily family);

// Band midpoints: s_ij = -1/(3 N1) on pairs of T, s_1i = s_{N-1,i} = -7/12.
// Throws WitnessFailed if the point violates a C1'-C4' condition.
std::map<SVar, Rational> witness_point(const AmplitudeContext &ctx);
Assignment to_assignment(const std::map<SVar, Rational> &point);

struct FamilyTally {
    int passed = 0;
    int total = 0;
};

struct CheckReport {
    bool pass = true;
    std::vector<AffineCondition> violated;
    std::map<std::string, FamilyTally> families;

    nlohmann::json to_json(int N) const;
};

// Throws MissingAssignment when a variable used by some condition is absent.
CheckReport check_point(const std::vector<AffineCondition> &conds, const Assignment &assign);

std::vector<PoleHyperplane> pole_hyperplanes(const std::vector<DenFactor> &den);
std::vector<PoleHyperplane> pole_hyperplanes(const RationalFn &x);

// Affine shapes of the conditions C1-C6 with the relation dropped.
struct PoleShape {
    std::string family;
    std::string label;
    long constant = 0;
    std::map<SVar, long> coeffs;
};
std::vector<PoleShape> pole_shapes(const AmplitudeContext &ctx);

struct ShapeMatch {
    PoleHyperplane plane;
    std::optional<PoleShape> shape;
};
// Matches each hyperplane against the shapes, up to an overall sign.
std::vector<ShapeMatch> audit_pole_shapes(const AmplitudeContext &ctx,
                                          const std::vector<PoleHyperplane> &planes);

// Uniform point of the open box s_ij in (-2/(3 N1), 0), s_1i, s_{N-1,i} in (-2/3, -1/2).
Assignment random_box_point(const AmplitudeContext &ctx, std::mt19937_64 &rng);

} // namespace knzeta

#endif
