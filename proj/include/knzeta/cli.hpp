#ifndef KNZETA_CLI_HPP
#define KNZETA_CLI_HPP

// Command-line front end. Subcommands: compute, eval, verify, poles, domain.
// Exit codes: 0 success, 1 verification failure, 2 usage or input error.

#include <array>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "knzeta/symbolic.hpp"
#include "knzeta/zeta.hpp"

namespace knzeta {

inline constexpr int kSpacetimeDim = 26;

struct Kinematics {
    std::vector<std::array<double, kSpacetimeDim>> momenta;

    // Accepts {"momenta": [[...26 numbers], ...]} or a bare array of vectors.
    static Kinematics from_json(const nlohmann::json &j);
    // Throws KinematicsViolation naming the first violated constraint.
    void validate(int N) const;
    // Minkowski product with signature (-, +, ..., +), 1-based indices.
    double dot(int i, int j) const;
    // s_ij = k_i . k_j for every variable of the context.
    Assignment assignment(const AmplitudeContext &ctx) const;
};

// Parses "s_<i>_<j>=<re>[+<im>i]".
std::pair<SVar, Complex> parse_assignment_flag(const std::string &text);

int run_cli(const std::vector<std::string> &args, std::ostream &out, std::ostream &err);

} // namespace knzeta

#endif
