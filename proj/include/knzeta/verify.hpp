#ifndef KNZETA_VERIFY_HPP
#define KNZETA_VERIFY_HPP

// Cross-check suite: every auxiliary integral and the full amplitude against
// the numeric oracle, plus the residue-class counts against brute force.

#include <string>
#include <vector>

#include <json.hpp>

#include "knzeta/oracle.hpp"
#include "knzeta/zeta.hpp"

namespace knzeta {

struct CheckRecord {
    std::string name;
    int p = 0;
    nlohmann::json spec;
    nlohmann::json point;
    Verdict verdict;
    // Set for exact combinatorial checks, where verdict carries no estimate.
    std::string detail;

    nlohmann::json to_json() const;
};

struct VerifyReport {
    int N = 0;
    std::vector<CheckRecord> checks;

    bool pass() const;
    int failures() const;
    nlohmann::json to_json() const;
    std::string to_text() const;
};

struct VerifyOptions {
    Budget budget;
    // Adds 0.1 to every symbolic value; the suite must then report failures.
    bool inject_fault = false;
    bool combinatorics = true;
    bool lemmas = true;
    bool amplitude = true;
};

// Per-lemma checks: L0 for |J| <= 3, L1_full for 2 <= |I| <= 3, and L2, M1, Z0
// and Z1 for |I| <= 2.
// Index sets come from T, extended by a six-point context when |T| < 3.
// L0, L1, L2, M1 and Z0 are checked at s = 1; Z1 at the witness point.
void verify_lemmas(ZetaEngine &engine, int p, const VerifyOptions &opt, VerifyReport &report);
// The amplitude at the witness point by both evaluators, and for N = 4 also at
// s = -0.4 by continuation.
void verify_amplitude(ZetaEngine &engine, int p, const VerifyOptions &opt, VerifyReport &report);
// Pattern counts against brute-force enumeration over (F_p^x)^J for |J| <= 4.
void verify_combinatorics(int p, const VerifyOptions &opt, VerifyReport &report);

VerifyReport run_verify(ZetaEngine &engine, const std::vector<int> &primes, const VerifyOptions &opt);

// Assignment giving every variable of the context the same value.
Assignment constant_assignment(const AmplitudeContext &ctx, Complex value);
nlohmann::json assignment_to_json(const Assignment &a);

} // namespace knzeta

#endif
