#include "knzeta/cli.hpp"

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <memory>
#include <optional>
#include <ostream>
#include <set>
#include <sstream>

#include <CLI11.hpp>

#include "knzeta/domain.hpp"
#include "knzeta/errors.hpp"
#include "knzeta/verify.hpp"

namespace knzeta {

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFail = 1;
constexpr int kExitUsage = 2;
constexpr int kMinN = 4;
constexpr int kMaxN = 8;
constexpr double kKinematicsTol = 1e-9;

struct Options {
    int N = 0;
    std::vector<int> primes;
    std::vector<std::string> s_flags;
    std::string momenta;
    std::string format = "text";
    std::uint64_t seed = 1;
    long samples = 1'000'000;
    int level = 12;
    std::string out_path;
    bool inject_fault = false;
};

void require_N(int N) {
    if (N < kMinN || N > kMaxN) {
        throw Error(ErrorCode::NOutOfRange,
                    "N=" + std::to_string(N) + " outside " + std::to_string(kMinN) + ".." + std::to_string(kMaxN));
    }
}

std::optional<std::filesystem::path> memo_path(int N) {
    const char *dir = std::getenv("KN_ZETA_MEMO_DIR");
    if (dir == nullptr || *dir == '\0') {
        return std::nullopt;
    }
    return std::filesystem::path(dir) / ("memo_N" + std::to_string(N) + ".json");
}

std::unique_ptr<ZetaEngine> make_engine(int N) {
    auto engine = std::make_unique<ZetaEngine>(N);
    if (const auto path = memo_path(N); path && std::filesystem::exists(*path)) {
        std::ifstream in(*path);
        nlohmann::json j;
        try {
            in >> j;
        } catch (const nlohmann::json::exception &e) {
            throw Error(ErrorCode::ParseError, "memo file " + path->string() + ": " + e.what());
        }
        engine->memo_from_json(j);
    }
    return engine;
}

void save_memo(const ZetaEngine &engine) {
    const auto path = memo_path(engine.context().N);
    if (!path) {
        return;
    }
    std::filesystem::create_directories(path->parent_path());
    const std::filesystem::path tmp = path->string() + ".tmp";
    {
        std::ofstream out(tmp);
        out << engine.memo_to_json().dump();
    }
    std::filesystem::rename(tmp, *path);
}

std::string complex_text(Complex z) {
    std::ostringstream os;
    os << std::setprecision(15) << z.real();
    if (z.imag() != 0) {
        os << (z.imag() < 0 ? " - " : " + ") << std::abs(z.imag()) << "i";
    }
    return os.str();
}

nlohmann::json complex_json(Complex z) { return {z.real(), z.imag()}; }

Assignment read_point(const AmplitudeContext &ctx, const Options &o, bool require_complete) {
    Assignment a;
    if (!o.momenta.empty()) {
        std::ifstream in(o.momenta);
        if (!in) {
            throw Error(ErrorCode::ParseError, "cannot open momenta file " + o.momenta);
        }
        nlohmann::json j;
        try {
            in >> j;
        } catch (const nlohmann::json::exception &e) {
            throw Error(ErrorCode::ParseError, std::string("momenta file: ") + e.what());
        }
        const Kinematics kin = Kinematics::from_json(j);
        kin.validate(ctx.N);
        a = kin.assignment(ctx);
    }
    const std::set<SVar> known(ctx.vars.begin(), ctx.vars.end());
    for (const std::string &flag : o.s_flags) {
        const auto [v, z] = parse_assignment_flag(flag);
        if (known.count(v) == 0) {
            throw Error(ErrorCode::InvalidVariable, v.display(ctx.N) + " is not a variable of the " +
                                                        std::to_string(ctx.N) + "-point amplitude");
        }
        a[v] = z;
    }
    if (require_complete) {
        for (const SVar &v : ctx.vars) {
            if (a.count(v) == 0) {
                throw Error(ErrorCode::MissingAssignment, "no value for " + v.display(ctx.N));
            }
        }
    }
    return a;
}

class Output {
public:
    Output(const std::string &path, std::ostream &fallback) : fallback_(fallback) {
        if (!path.empty()) {
            file_ = std::make_unique<std::ofstream>(path);
            if (!*file_) {
                throw Error(ErrorCode::ParseError, "cannot write " + path);
            }
        }
    }
    std::ostream &stream() { return file_ ? *file_ : fallback_; }

private:
    std::ostream &fallback_;
    std::unique_ptr<std::ofstream> file_;
};

bool json_format(const Options &o) { return o.format == "json"; }

int cmd_compute(const Options &o, std::ostream &out) {
    require_N(o.N);
    auto engine = make_engine(o.N);
    const RationalSum sum = engine->ZN_sum();
    save_memo(*engine);
    // Combining into one fraction is practical up to five points.
    const bool single = o.N <= 5;
    Output dst(o.out_path, out);
    std::ostream &os = dst.stream();
    const std::vector<DenFactor> den = sum.den_union();
    nlohmann::json den_text = nlohmann::json::array();
    for (const DenFactor &f : den) {
        den_text.push_back(format_den_factor(f, o.N));
    }
    if (json_format(o)) {
        nlohmann::json j{{"N", o.N}, {"form", single ? "fraction" : "sum"}, {"den_text", den_text}};
        j["value"] = single ? sum.combine().to_json() : sum.to_json();
        os << j.dump(2) << "\n";
        return kExitOk;
    }
    os << "Z^(" << o.N << ")(s) =\n";
    if (single) {
        os << sum.combine().to_text(o.N) << "\n";
    } else {
        bool first = true;
        for (const RationalFn &part : sum.parts()) {
            os << (first ? "  " : "+ ") << part.to_text(o.N) << "\n";
            first = false;
        }
    }
    os << "denominator factors:\n";
    for (const auto &t : den_text) {
        os << "  " << t.get<std::string>() << "\n";
    }
    return kExitOk;
}

std::vector<std::string> eval_warnings(const AmplitudeContext &ctx, const Assignment &a) {
    std::vector<std::string> w;
    const bool nonnegative = std::all_of(a.begin(), a.end(), [](const auto &kv) { return kv.second.real() >= 0; });
    if (nonnegative) {
        w.emplace_back("nonnegative real part: integral diverges; value is the analytic continuation");
        return w;
    }
    const CheckReport rep = check_point(convergence_conditions(ctx, ConditionFamily::C_primed), a);
    if (!rep.pass) {
        w.push_back("point violates " + std::to_string(rep.violated.size()) +
                    " convergence conditions; value is the analytic continuation");
    }
    return w;
}

int cmd_eval(const Options &o, std::ostream &out, std::ostream &err) {
    require_N(o.N);
    if (o.primes.empty()) {
        throw Error(ErrorCode::ParseError, "eval needs at least one --p");
    }
    auto engine = make_engine(o.N);
    const AmplitudeContext &ctx = engine->context();
    const Assignment a = read_point(ctx, o, true);
    const RationalSum sum = engine->ZN_sum();
    save_memo(*engine);
    const std::vector<std::string> warnings = eval_warnings(ctx, a);
    for (const std::string &w : warnings) {
        err << "warning: " << w << "\n";
    }
    Output dst(o.out_path, out);
    std::ostream &os = dst.stream();
    nlohmann::json values = nlohmann::json::array();
    for (int p : o.primes) {
        const Complex z = sum.eval(p, a);
        if (json_format(o)) {
            values.push_back({{"p", p}, {"value", complex_json(z)}});
        } else {
            os << "p=" << p << "  Z^(" << o.N << ") = " << complex_text(z) << "\n";
        }
    }
    if (json_format(o)) {
        os << nlohmann::json{{"N", o.N}, {"point", assignment_to_json(a)}, {"values", values}, {"warnings", warnings}}
                  .dump(2)
           << "\n";
    }
    return kExitOk;
}

int cmd_verify(const Options &o, std::ostream &out) {
    require_N(o.N);
    auto engine = make_engine(o.N);
    VerifyOptions vo;
    vo.budget.seed = o.seed;
    vo.budget.samples = o.samples;
    vo.budget.level = o.level;
    vo.inject_fault = o.inject_fault;
    const std::vector<int> primes = o.primes.empty() ? std::vector<int>{2, 3} : o.primes;
    const VerifyReport report = run_verify(*engine, primes, vo);
    save_memo(*engine);
    Output dst(o.out_path, out);
    std::ostream &os = dst.stream();
    if (json_format(o)) {
        os << report.to_json().dump(2) << "\n";
    } else {
        os << report.to_text();
    }
    return report.pass() ? kExitOk : kExitFail;
}

int cmd_poles(const Options &o, std::ostream &out) {
    require_N(o.N);
    auto engine = make_engine(o.N);
    const std::vector<PoleHyperplane> planes = pole_hyperplanes(engine->ZN_sum().den_union());
    save_memo(*engine);
    const std::vector<ShapeMatch> audit = audit_pole_shapes(engine->context(), planes);
    Output dst(o.out_path, out);
    std::ostream &os = dst.stream();
    if (json_format(o)) {
        nlohmann::json arr = nlohmann::json::array();
        for (const ShapeMatch &m : audit) {
            nlohmann::json j = m.plane.to_json();
            j["text"] = m.plane.str(o.N);
            j["shape"] = m.shape ? nlohmann::json(m.shape->family + " " + m.shape->label) : nlohmann::json(nullptr);
            arr.push_back(j);
        }
        os << nlohmann::json{{"N", o.N}, {"count", planes.size()}, {"hyperplanes", arr}}.dump(2) << "\n";
        return kExitOk;
    }
    os << planes.size() << " pole hyperplanes for N=" << o.N << "\n";
    for (const ShapeMatch &m : audit) {
        os << "  " << m.plane.str(o.N) << "    [" << (m.shape ? m.shape->family + " " + m.shape->label : "no shape")
           << "]\n";
    }
    return kExitOk;
}

int cmd_domain(const Options &o, std::ostream &out) {
    require_N(o.N);
    const AmplitudeContext ctx = AmplitudeContext::make(o.N);
    const std::vector<AffineCondition> conds = convergence_conditions(ctx, ConditionFamily::C_primed);
    Output dst(o.out_path, out);
    std::ostream &os = dst.stream();
    const bool have_point = !o.s_flags.empty() || !o.momenta.empty();
    if (!have_point) {
        const auto w = witness_point(ctx);
        const CheckReport rep = check_point(conds, to_assignment(w));
        if (json_format(o)) {
            nlohmann::json wj = nlohmann::json::object();
            for (const auto &[v, q] : w) {
                wj[v.display(o.N)] = q.get_str();
            }
            os << nlohmann::json{{"N", o.N}, {"witness", wj}, {"conditions", conds.size()}, {"check", rep.to_json(o.N)}}
                      .dump(2)
               << "\n";
        } else {
            os << "witness point for N=" << o.N << ":\n";
            for (const auto &[v, q] : w) {
                os << "  " << v.display(o.N) << " = " << q.get_str() << "\n";
            }
            os << conds.size() << " conditions; " << (rep.pass ? "all conditions pass" : "some conditions fail")
               << "\n";
        }
        return kExitOk;
    }
    const Assignment a = read_point(ctx, o, false);
    const CheckReport rep = check_point(conds, a);
    if (json_format(o)) {
        os << nlohmann::json{{"N", o.N}, {"point", assignment_to_json(a)}, {"check", rep.to_json(o.N)}}.dump(2)
           << "\n";
        return kExitOk;
    }
    for (const auto &[family, t] : rep.families) {
        os << family << ": " << (t.passed == t.total ? "pass" : "FAIL") << " (" << t.passed << "/" << t.total
           << ")\n";
    }
    for (const AffineCondition &c : rep.violated) {
        os << "  violated " << c.family << " [" << c.label << "]: " << c.str(o.N) << "\n";
    }
    return kExitOk;
}

void add_common(CLI::App *sub, Options &o) {
    sub->add_option("--N", o.N, "number of points (4..8)")->required();
    sub->add_option("--format", o.format, "output format")->check(CLI::IsMember({"json", "text"}));
    sub->add_option("--out", o.out_path, "write output to this file");
}

void add_point(CLI::App *sub, Options &o) {
    sub->add_option("--s", o.s_flags, "variable value s_<i>_<j>=<re>[+<im>i]")->take_all();
    sub->add_option("--momenta", o.momenta, "JSON file with N momenta of 26 components");
}

} // namespace

Kinematics Kinematics::from_json(const nlohmann::json &j) {
    const nlohmann::json &arr = j.is_object() && j.contains("momenta") ? j.at("momenta") : j;
    if (!arr.is_array()) {
        throw Error(ErrorCode::ParseError, "momenta must be an array of vectors");
    }
    Kinematics k;
    for (const auto &v : arr) {
        if (!v.is_array() || v.size() != kSpacetimeDim) {
            throw Error(ErrorCode::KinematicsViolation,
                        "each momentum needs " + std::to_string(kSpacetimeDim) + " components");
        }
        std::array<double, kSpacetimeDim> m{};
        for (int c = 0; c < kSpacetimeDim; ++c) {
            if (!v[static_cast<std::size_t>(c)].is_number()) {
                throw Error(ErrorCode::ParseError, "momentum components must be numbers");
            }
            m[static_cast<std::size_t>(c)] = v[static_cast<std::size_t>(c)].get<double>();
        }
        k.momenta.push_back(m);
    }
    return k;
}

void Kinematics::validate(int N) const {
    if (static_cast<int>(momenta.size()) != N) {
        throw Error(ErrorCode::KinematicsViolation,
                    "expected " + std::to_string(N) + " momenta, got " + std::to_string(momenta.size()));
    }
    for (int c = 0; c < kSpacetimeDim; ++c) {
        double total = 0;
        for (const auto &m : momenta) {
            total += m[static_cast<std::size_t>(c)];
        }
        if (std::abs(total) > kKinematicsTol) {
            throw Error(ErrorCode::KinematicsViolation,
                        "momentum conservation: component " + std::to_string(c) + " sums to " + std::to_string(total));
        }
    }
    for (int i = 1; i <= N; ++i) {
        const double kk = dot(i, i);
        if (std::abs(kk - 2.0) > kKinematicsTol) {
            throw Error(ErrorCode::KinematicsViolation,
                        "mass shell: k_" + std::to_string(i) + ".k_" + std::to_string(i) + " = " + std::to_string(kk) +
                            ", expected 2");
        }
    }
}

double Kinematics::dot(int i, int j) const {
    const auto &a = momenta.at(static_cast<std::size_t>(i - 1));
    const auto &b = momenta.at(static_cast<std::size_t>(j - 1));
    double s = -a[0] * b[0];
    for (std::size_t c = 1; c < kSpacetimeDim; ++c) {
        s += a[c] * b[c];
    }
    return s;
}

Assignment Kinematics::assignment(const AmplitudeContext &ctx) const {
    Assignment a;
    for (const SVar &v : ctx.vars) {
        a[v] = Complex(dot(v.i, v.j), 0.0);
    }
    return a;
}

std::pair<SVar, Complex> parse_assignment_flag(const std::string &text) {
    const auto eq = text.find('=');
    if (eq == std::string::npos) {
        throw Error(ErrorCode::ParseError, "expected s_<i>_<j>=<value>, got '" + text + "'");
    }
    const SVar v = SVar::parse(text.substr(0, eq));
    const std::string value = text.substr(eq + 1);
    const char *begin = value.c_str();
    char *end = nullptr;
    const double first = std::strtod(begin, &end);
    if (end == begin) {
        throw Error(ErrorCode::ParseError, "malformed value '" + value + "'");
    }
    std::string rest(end);
    if (rest.empty()) {
        return {v, Complex(first, 0.0)};
    }
    if (rest == "i") {
        return {v, Complex(0.0, first)};
    }
    const char *rb = rest.c_str();
    char *re = nullptr;
    const double second = std::strtod(rb, &re);
    if (re == rb || std::string(re) != "i" || (rest[0] != '+' && rest[0] != '-')) {
        throw Error(ErrorCode::ParseError, "malformed complex value '" + value + "'");
    }
    return {v, Complex(first, second)};
}

int run_cli(const std::vector<std::string> &args, std::ostream &out, std::ostream &err) {
    CLI::App app{"Exact p-adic Koba-Nielsen amplitudes and their numerical verification", "kn_zeta"};
    app.require_subcommand(1);
    Options o;

    CLI::App *compute = app.add_subcommand("compute", "print the amplitude as a rational function of p^{-s}");
    add_common(compute, o);

    CLI::App *eval = app.add_subcommand("eval", "evaluate the amplitude at primes and a point");
    add_common(eval, o);
    add_point(eval, o);
    eval->add_option("--p", o.primes, "prime (repeatable)")->take_all();

    CLI::App *verify = app.add_subcommand("verify", "cross-check every integral against the numeric oracle");
    add_common(verify, o);
    verify->add_option("--p", o.primes, "prime (repeatable), default 2 and 3")->take_all();
    verify->add_option("--seed", o.seed, "Monte Carlo seed");
    verify->add_option("--samples", o.samples, "Monte Carlo samples per check");
    verify->add_option("--level", o.level, "stratification level");
    verify->add_flag("--inject-fault", o.inject_fault)->group("");

    CLI::App *poles = app.add_subcommand("poles", "list the pole hyperplanes");
    add_common(poles, o);

    CLI::App *domain = app.add_subcommand("domain", "print the witness point or test a point");
    add_common(domain, o);
    add_point(domain, o);

    std::vector<const char *> argv{"kn_zeta"};
    for (const std::string &a : args) {
        argv.push_back(a.c_str());
    }
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp &) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::ParseError &e) {
        err << "usage error: " << e.what() << "\n";
        return kExitUsage;
    }

    for (int p : o.primes) {
        if (p < 2 || mpz_probab_prime_p(mpz_class(p).get_mpz_t(), 25) == 0) {
            err << "usage error: " << p << " is not a prime\n";
            return kExitUsage;
        }
    }
    try {
        if (compute->parsed()) {
            return cmd_compute(o, out);
        }
        if (eval->parsed()) {
            return cmd_eval(o, out, err);
        }
        if (verify->parsed()) {
            return cmd_verify(o, out);
        }
        if (poles->parsed()) {
            return cmd_poles(o, out);
        }
        return cmd_domain(o, out);
    } catch (const Error &e) {
        err << e.what() << "\n";
        return kExitUsage;
    }
}

} // namespace knzeta
