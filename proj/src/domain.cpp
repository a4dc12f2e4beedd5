#include "knzeta/domain.hpp"

#include <algorithm>
#include <sstream>

namespace knzeta {

namespace {

Rational parse_rational(const nlohmann::json &j) {
    if (j.is_number_integer()) {
        return Rational(j.get<long>());
    }
    Rational r(j.get<std::string>());
    r.canonicalize();
    return r;
}

std::string affine_text(const Rational &constant, const std::map<SVar, Rational> &coeffs, int N) {
    std::ostringstream os;
    os << constant.get_str();
    for (const auto &[v, c] : coeffs) {
        if (c == 0) {
            continue;
        }
        const std::string name = "Re " + v.display(N);
        if (c == 1) {
            os << " + " << name;
        } else if (c == -1) {
            os << " - " << name;
        } else if (c > 0) {
            os << " + " << c.get_str() << "*" << name;
        } else {
            os << " - " << Rational(-c).get_str() << "*" << name;
        }
    }
    return os.str();
}

std::map<SVar, Rational> to_rational_coeffs(const LinearForm &form) {
    std::map<SVar, Rational> out;
    for (const auto &[v, c] : form.entries()) {
        out[v] = Rational(c);
    }
    return out;
}

AffineCondition make_condition(long constant, const std::map<SVar, long> &coeffs, Relation rel,
                               std::string family, std::string label) {
    AffineCondition c;
    c.constant = Rational(constant);
    for (const auto &[v, k] : coeffs) {
        if (k != 0) {
            c.coeffs[v] = Rational(k);
        }
    }
    c.rel = rel;
    c.family = std::move(family);
    c.label = std::move(label);
    return c;
}

std::map<SVar, long> pairs_of(const IndexSet &S) {
    std::map<SVar, long> m;
    for (const SVar &v : pairs_within(S)) {
        m[v] += 1;
    }
    return m;
}

std::map<SVar, long> sector_coeffs(const AmplitudeContext &ctx, const IndexSet &J) {
    std::map<SVar, long> m;
    for (int i : J.members()) {
        m[ctx.st(1, i)] += 1;
        m[ctx.st(ctx.last(), i)] += 1;
    }
    for (const SVar &v : pairs_within(ctx.T)) {
        if (J.contains(v.i) || J.contains(v.j)) {
            m[v] += 1;
        }
    }
    return m;
}

std::string t_label(int t, const IndexSet &J, const IndexSet &S) {
    return "t=" + std::to_string(t) + " J=" + J.str() + " S=" + S.str();
}

} // namespace

// ------------------------------------------------------------ AffineCondition

double AffineCondition::value(const Assignment &assign) const {
    double v = constant.get_d();
    for (const auto &[s, c] : coeffs) {
        auto it = assign.find(s);
        if (it == assign.end()) {
            throw Error(ErrorCode::MissingAssignment, s.key());
        }
        v += c.get_d() * it->second.real();
    }
    return v;
}

Rational AffineCondition::value_exact(const std::map<SVar, Rational> &point) const {
    Rational v = constant;
    for (const auto &[s, c] : coeffs) {
        auto it = point.find(s);
        if (it == point.end()) {
            throw Error(ErrorCode::MissingAssignment, s.key());
        }
        v += c * it->second;
    }
    return v;
}

bool AffineCondition::holds(const Assignment &assign) const {
    const double v = value(assign);
    return rel == Relation::Less ? v < 0 : v > 0;
}

bool AffineCondition::holds_exact(const std::map<SVar, Rational> &point) const {
    const Rational v = value_exact(point);
    return rel == Relation::Less ? v < 0 : v > 0;
}

AffineCondition AffineCondition::negated() const {
    AffineCondition c = *this;
    c.rel = rel == Relation::Less ? Relation::Greater : Relation::Less;
    return c;
}

std::string AffineCondition::str(int N) const {
    return affine_text(constant, coeffs, N) + (rel == Relation::Less ? " < 0" : " > 0");
}

nlohmann::json AffineCondition::to_json() const {
    nlohmann::json c = nlohmann::json::object();
    for (const auto &[v, k] : coeffs) {
        c[v.key()] = k.get_str();
    }
    nlohmann::json j{{"const", constant.get_str()},
                     {"coeffs", c},
                     {"rel", rel == Relation::Less ? "<" : ">"}};
    if (!family.empty()) {
        j["family"] = family;
    }
    if (!label.empty()) {
        j["label"] = label;
    }
    return j;
}

AffineCondition AffineCondition::from_json(const nlohmann::json &j) {
    try {
        AffineCondition c;
        c.constant = parse_rational(j.at("const"));
        for (const auto &[k, v] : j.at("coeffs").items()) {
            c.coeffs[SVar::parse(k)] = parse_rational(v);
        }
        const std::string rel = j.at("rel").get<std::string>();
        if (rel != "<" && rel != ">") {
            throw Error(ErrorCode::ParseError, "relation must be < or >");
        }
        c.rel = rel == "<" ? Relation::Less : Relation::Greater;
        c.family = j.value("family", "");
        c.label = j.value("label", "");
        return c;
    } catch (const nlohmann::json::exception &e) {
        throw Error(ErrorCode::ParseError, e.what());
    }
}

bool operator==(const AffineCondition &a, const AffineCondition &b) {
    return a.constant == b.constant && a.coeffs == b.coeffs && a.rel == b.rel &&
           a.family == b.family && a.label == b.label;
}

// ------------------------------------------------------------ PoleHyperplane

std::string PoleHyperplane::str(int N) const {
    std::map<SVar, Rational> c;
    for (const auto &[v, k] : coeffs) {
        c[v] = Rational(k);
    }
    std::string s = affine_text(Rational(constant), c, N) + " = 0";
    if (multiplicity > 1) {
        s += "  (multiplicity " + std::to_string(multiplicity) + ")";
    }
    return s;
}

nlohmann::json PoleHyperplane::to_json() const {
    nlohmann::json c = nlohmann::json::object();
    for (const auto &[v, k] : coeffs) {
        c[v.key()] = k;
    }
    return {{"const", constant}, {"coeffs", c}, {"multiplicity", multiplicity}};
}

PoleHyperplane PoleHyperplane::from_json(const nlohmann::json &j) {
    try {
        PoleHyperplane h;
        h.constant = j.at("const").get<long>();
        for (const auto &[k, v] : j.at("coeffs").items()) {
            h.coeffs[SVar::parse(k)] = v.get<long>();
        }
        h.multiplicity = j.value("multiplicity", 1);
        return h;
    } catch (const nlohmann::json::exception &e) {
        throw Error(ErrorCode::ParseError, e.what());
    }
}

// ------------------------------------------------------------ conditions

std::vector<AffineCondition> convergence_conditions(const AmplitudeContext &ctx,
                                                    ConditionFamily family) {
    if (family == ConditionFamily::from_denominators) {
        ZetaEngine engine(ctx);
        return convergence_conditions(engine, family);
    }
    std::vector<AffineCondition> out;
    const auto subsets = ctx.T.subsets(false, true);
    for (const IndexSet &J : subsets) {
        out.push_back(make_condition(J.size(), sector_coeffs(ctx, J), Relation::Less, "C1'",
                                     "J=" + J.str()));
    }
    for (const IndexSet &J : subsets) {
        if (J.size() >= 2) {
            out.push_back(make_condition(J.size() - 1, pairs_of(J), Relation::Greater, "C2'",
                                         "J=" + J.str()));
        }
    }
    for (int t : {1, ctx.last()}) {
        for (const IndexSet &J : subsets) {
            for (const IndexSet &S : J.subsets(true, true)) {
                if (J.size() < 2 && S.empty()) {
                    continue;
                }
                std::map<SVar, long> m = pairs_of(J);
                for (int i : S.members()) {
                    m[ctx.st(t, i)] += 1;
                }
                out.push_back(make_condition(J.size(), m, Relation::Greater, "C3'",
                                             t_label(t, J, S)));
            }
        }
    }
    for (const SVar &v : ctx.vars) {
        out.push_back(make_condition(1, {{v, 1}}, Relation::Greater, "C4'", v.display(ctx.N)));
    }
    return out;
}

std::vector<AffineCondition> conditions_from_denominators(const std::vector<DenFactor> &den) {
    std::vector<AffineCondition> out;
    for (const DenFactor &f : den) {
        AffineCondition c;
        c.constant = Rational(f.a);
        c.coeffs = to_rational_coeffs(f.form);
        c.rel = Relation::Less;
        c.family = "den";
        c.label = format_den_factor(f, 0);
        out.push_back(std::move(c));
    }
    return out;
}

std::vector<AffineCondition> convergence_conditions(ZetaEngine &engine, ConditionFamily family) {
    if (family == ConditionFamily::C_primed) {
        return convergence_conditions(engine.context(), family);
    }
    return conditions_from_denominators(engine.ZN_sum().den_union());
}

std::map<SVar, Rational> witness_point(const AmplitudeContext &ctx) {
    std::map<SVar, Rational> point;
    const long n1 = static_cast<long>(ctx.N - 4) * (ctx.N - 3) / 2;
    for (const SVar &v : ctx.vars) {
        const bool in_T = ctx.T.contains(v.i) && ctx.T.contains(v.j);
        point[v] = in_T ? Rational(-1, 3 * n1) : Rational(-7, 12);
    }
    for (const AffineCondition &c : convergence_conditions(ctx, ConditionFamily::C_primed)) {
        if (!c.holds_exact(point)) {
            throw Error(ErrorCode::WitnessFailed, c.family + " " + c.label + ": " + c.str(ctx.N));
        }
    }
    return point;
}

Assignment to_assignment(const std::map<SVar, Rational> &point) {
    Assignment a;
    for (const auto &[v, r] : point) {
        a[v] = Complex(r.get_d(), 0.0);
    }
    return a;
}

nlohmann::json CheckReport::to_json(int N) const {
    nlohmann::json fam = nlohmann::json::object();
    for (const auto &[name, t] : families) {
        fam[name] = {{"passed", t.passed}, {"total", t.total}};
    }
    nlohmann::json bad = nlohmann::json::array();
    for (const auto &c : violated) {
        nlohmann::json j = c.to_json();
        j["text"] = c.str(N);
        bad.push_back(j);
    }
    return {{"pass", pass}, {"families", fam}, {"violated", bad}};
}

CheckReport check_point(const std::vector<AffineCondition> &conds, const Assignment &assign) {
    CheckReport r;
    for (const AffineCondition &c : conds) {
        FamilyTally &t = r.families[c.family];
        ++t.total;
        if (c.holds(assign)) {
            ++t.passed;
        } else {
            r.pass = false;
            r.violated.push_back(c);
        }
    }
    return r;
}

// ------------------------------------------------------------ poles

std::vector<PoleHyperplane> pole_hyperplanes(const std::vector<DenFactor> &den) {
    std::vector<PoleHyperplane> out;
    for (const DenFactor &f : den) {
        PoleHyperplane h;
        h.constant = f.a;
        for (const auto &[v, c] : f.form.entries()) {
            h.coeffs[v] = c;
        }
        h.multiplicity = f.mult;
        auto same = std::find_if(out.begin(), out.end(), [&](const PoleHyperplane &o) {
            return o.constant == h.constant && o.coeffs == h.coeffs;
        });
        if (same == out.end()) {
            out.push_back(std::move(h));
        } else {
            same->multiplicity = std::max(same->multiplicity, h.multiplicity);
        }
    }
    return out;
}

std::vector<PoleHyperplane> pole_hyperplanes(const RationalFn &x) { return pole_hyperplanes(x.den()); }

std::vector<PoleShape> pole_shapes(const AmplitudeContext &ctx) {
    std::vector<PoleShape> out;
    const auto subsets = ctx.T.subsets(false, true);
    for (const IndexSet &J : subsets) {
        out.push_back({"C1", "J=" + J.str(), J.size(), sector_coeffs(ctx, J)});
    }
    for (const IndexSet &K : subsets) {
        if (K.size() >= 2) {
            out.push_back({"C2/C5", "K=" + K.str(), K.size() - 1, pairs_of(K)});
        }
    }
    for (const SVar &v : ctx.vars) {
        out.push_back({"C3/C6", v.display(ctx.N), 1, {{v, 1}}});
    }
    for (int t : {1, ctx.last()}) {
        for (const IndexSet &J : subsets) {
            for (const IndexSet &S : J.subsets(true, true)) {
                std::map<SVar, long> m = pairs_of(J);
                for (int i : S.members()) {
                    m[ctx.st(t, i)] += 1;
                }
                out.push_back({"C4", t_label(t, J, S), J.size(), m});
            }
        }
    }
    return out;
}

std::vector<ShapeMatch> audit_pole_shapes(const AmplitudeContext &ctx,
                                          const std::vector<PoleHyperplane> &planes) {
    const auto shapes = pole_shapes(ctx);
    std::vector<ShapeMatch> out;
    for (const PoleHyperplane &h : planes) {
        std::map<SVar, long> neg;
        for (const auto &[v, c] : h.coeffs) {
            neg[v] = -c;
        }
        ShapeMatch m{h, std::nullopt};
        for (const PoleShape &s : shapes) {
            if ((s.constant == h.constant && s.coeffs == h.coeffs) ||
                (s.constant == -h.constant && s.coeffs == neg)) {
                m.shape = s;
                break;
            }
        }
        out.push_back(std::move(m));
    }
    return out;
}

Assignment random_box_point(const AmplitudeContext &ctx, std::mt19937_64 &rng) {
    const double n1 = static_cast<double>(ctx.N - 4) * (ctx.N - 3) / 2.0;
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    Assignment a;
    for (const SVar &v : ctx.vars) {
        const bool in_T = ctx.T.contains(v.i) && ctx.T.contains(v.j);
        // Open intervals: redraw the (measure-zero) endpoints.
        double u = unit(rng);
        while (u == 0.0) {
            u = unit(rng);
        }
        const double lo = in_T ? -2.0 / (3.0 * n1) : -2.0 / 3.0;
        const double hi = in_T ? 0.0 : -0.5;
        a[v] = Complex(lo + (hi - lo) * u, 0.0);
    }
    return a;
}

} // namespace knzeta
