#include "pelastica/cli.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <numbers>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "pelastica/classify.hpp"
#include "pelastica/curves.hpp"
#include "pelastica/elliptic.hpp"
#include "pelastica/verify.hpp"

namespace pelastica {
namespace {

using ojson = nlohmann::ordered_json;

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

const CLI::Validator kExponent(
    [](std::string& s) -> std::string {
        try {
            size_t pos = 0;
            const double v = std::stod(s, &pos);
            if (pos != s.size() || !std::isfinite(v) || !(v > 1.0)) return "p must be a finite real > 1";
        } catch (const std::exception&) {
            return "p must be a number";
        }
        return {};
    },
    "P>1", "exponent");

const CLI::Validator kFinite(
    [](std::string& s) -> std::string {
        try {
            size_t pos = 0;
            const double v = std::stod(s, &pos);
            if (pos != s.size() || !std::isfinite(v)) return "value must be finite";
        } catch (const std::exception&) {
            return "value must be a number";
        }
        return {};
    },
    "FINITE", "finite");

std::pair<double, double> parse_range(const std::string& r) {
    const auto colon = r.find(':');
    if (colon == std::string::npos) throw UsageError("range must be A:B");
    try {
        size_t pa = 0, pb = 0;
        const std::string sa = r.substr(0, colon), sb = r.substr(colon + 1);
        const double a = std::stod(sa, &pa);
        const double b = std::stod(sb, &pb);
        if (pa != sa.size() || pb != sb.size() || !std::isfinite(a) || !std::isfinite(b) || !(b > a))
            throw UsageError("range must be A:B with finite A < B");
        return {a, b};
    } catch (const std::invalid_argument&) {
        throw UsageError("range must be A:B");
    } catch (const std::out_of_range&) {
        throw UsageError("range out of range");
    }
}

FlatCoreSpec read_spec(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw UsageError("cannot open spec file " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw UsageError(std::string("spec file is not JSON: ") + e.what());
    }
    FlatCoreSpec spec;
    try {
        spec.N = j.at("N").get<int>();
        spec.signs = j.at("signs").get<std::vector<int>>();
        spec.lengths = j.at("lengths").get<std::vector<double>>();
    } catch (const nlohmann::json::exception& e) {
        throw UsageError(std::string("spec file needs N, signs, lengths: ") + e.what());
    }
    validate(spec);
    return spec;
}

ojson solution_json(const Solution& sol) {
    ojson j;
    j["family"] = to_string(sol.family());
    std::visit(
        [&](const auto& c) {
            using T = std::decay_t<decltype(c)>;
            if constexpr (std::is_same_v<T, Wavelike> || std::is_same_v<T, Orbitlike>) {
                j["q"] = c.q;
                j["A"] = c.A;
                j["alpha"] = c.alpha;
                j["beta"] = c.beta;
            } else if constexpr (std::is_same_v<T, Borderline>) {
                j["sign"] = c.sign;
                j["beta"] = c.beta;
            } else if constexpr (std::is_same_v<T, FlatCore>) {
                j["N"] = c.spec.N;
                j["signs"] = c.spec.signs;
                j["lengths"] = c.spec.lengths;
                j["centers"] = c.spec.centers;
                j["A_pl"] = c.A_pl;
                j["T_pl"] = c.T_pl;
            } else if constexpr (std::is_same_v<T, Circular>) {
                j["k0"] = c.k0;
            }
        },
        sol.cls);
    j["p"] = sol.p;
    j["lambda"] = sol.lambda;
    return j;
}

ojson number_or_inf(double v) { return std::isfinite(v) ? ojson(v) : ojson("infinity"); }

ojson regularity_json(const RegularityReport& r) {
    ojson j;
    j["family"] = to_string(r.family);
    j["analytic"] = r.analytic;
    j["sobolev_order"] = r.sobolev_order;
    j["sobolev_exponent"] = number_or_inf(r.sobolev_exponent);
    j["exponent_attained"] = r.exponent_attained;
    j["fails_order"] = r.fails_order ? ojson(*r.fails_order) : ojson();
    j["fails_exponent"] = r.fails_exponent ? number_or_inf(*r.fails_exponent) : ojson();
    ojson c;
    c["p"] = r.constants.p;
    c["m_p"] = r.constants.m_p;
    c["r_p"] = r.constants.r_p ? number_or_inf(*r.constants.r_p) : ojson();
    c["M_p"] = r.constants.M_p ? ojson(*r.constants.M_p) : ojson();
    c["R_p"] = r.constants.R_p ? number_or_inf(*r.constants.R_p) : ojson();
    c["K_p1"] = number_or_inf(r.constants.K_p1);
    j["constants"] = c;
    return j;
}

void print_number(std::ostream& out, double v) {
    const auto old = out.precision(std::numeric_limits<double>::max_digits10);
    out << v << '\n';
    out.precision(old);
}

void emit_trace(const Trace& t, const std::string& format, const std::string& file, std::ostream& out) {
    std::ofstream f;
    std::ostream* dst = &out;
    if (!file.empty()) {
        f.open(file);
        if (!f) throw UsageError("cannot write " + file);
        dst = &f;
    }
    if (format == "svg") write_svg(t, *dst);
    else write_csv(t, *dst);
}

// Canonical representatives with their matched multipliers.
Solution canonical_solution(Family family, double p, double q, const std::optional<FlatCoreSpec>& spec) {
    switch (family) {
        case Family::Linear: return {p, 0.0, Linear{}};
        case Family::Wavelike: {
            if (!(q > 0.0 && q < 1.0)) throw DomainError("wavelike needs 0 < q < 1");
            const double A = 2.0 * q;
            return {p, wavelike_lambda(p, A, 1.0, q), Wavelike{A, 1.0, 0.0, q}};
        }
        case Family::Orbitlike:
            if (!(q > 0.0 && q < 1.0)) throw DomainError("orbitlike needs 0 < q < 1");
            return {p, orbitlike_lambda(p, 2.0, 1.0, q), Orbitlike{2.0, 1.0, 0.0, q}};
        case Family::Circular: return {p, circular_lambda(p, 1.0), Circular{1.0}};
        case Family::Borderline:
            if (p > 2.0) throw DomainError("borderline family needs p <= 2");
            return {p, borderline_lambda(p, 1.0), Borderline{1, 0.0}};
        case Family::FlatCore: {
            if (!(p > 2.0)) throw DomainError("flat-core curves need p > 2");
            if (!spec) throw UsageError("flatcore needs --spec FILE");
            FlatCore fc;
            fc.spec = *spec;
            fc.A_pl = 1.0;
            fc.T_pl = kp1(p);
            fc.spec.centers = canonical_centers(fc.spec, fc.T_pl);
            return {p, borderline_lambda(p, 1.0), fc};
        }
    }
    throw UsageError("unknown family");
}

struct Args {
    double p = 2.0;
    double q = 0.0;
    double x = 0.0;
    double lambda = 0.0;
    double w0 = 0.0;
    double wdot0 = 0.0;
    std::string fn;
    std::string family;
    std::string spec_file;
    std::string range;
    std::string out_format = "csv";
    std::string file;
    std::string what;
    std::string suite = "all";
    std::string csv;
    int n = 1001;
    int n_fold = 1;
    bool zero_linear = false;
    bool interior_zero = false;
    std::uint64_t seed = 1;
    double length = 8.0;
    double h = 0.02;
};

int cmd_eval(const Args& a, std::ostream& out) {
    const std::string& f = a.fn;
    if (f == "F1" || f == "F2" || f == "E1" || f == "E2")
        print_number(out, integral(integral_kind_from_string(f), a.p, a.x, a.q));
    else if (f == "am1") print_number(out, amplitude(1, a.p, a.x, a.q));
    else if (f == "am2") print_number(out, amplitude(2, a.p, a.x, a.q));
    else if (f == "sn") print_number(out, sn_cn(a.p, a.x, a.q).sn);
    else if (f == "cn") print_number(out, sn_cn(a.p, a.x, a.q).cn);
    else if (f == "sncn") {
        const auto v = sn_cn(a.p, a.x, a.q);
        const auto old = out.precision(std::numeric_limits<double>::max_digits10);
        out << v.sn << ' ' << v.cn << '\n';
        out.precision(old);
    } else if (f == "dn") print_number(out, dn(a.p, a.x, a.q));
    else if (f == "sech") print_number(out, sech(a.p, a.x));
    else if (f == "tanh") print_number(out, tanh(a.p, a.x));
    else throw UsageError("unknown function " + f);
    return 0;
}

int cmd_classify(const Args& a, std::ostream& out) {
    ClassifyOptions opts;
    if (!a.spec_file.empty()) opts.flatcore_hint = read_spec(a.spec_file);
    opts.zero_data_is_linear = a.zero_linear;
    const auto data = InitialData::make(a.p, a.lambda, a.w0, a.wdot0);
    const Solution sol = classify(a.p, a.lambda, data, opts);
    ojson j = solution_json(sol);
    j["D0"] = data.D0;
    j["mismatch"] = initial_mismatch(sol, data);
    out << j.dump() << '\n';
    return 0;
}

int cmd_trace(const Args& a, std::ostream& out) {
    const Family fam = family_from_string(a.family);
    Trace t;
    if (fam == Family::FlatCore) {
        if (a.spec_file.empty()) throw UsageError("flatcore needs --spec FILE");
        const FlatCoreProfile prof(a.p, read_spec(a.spec_file));
        double lo = 0.0, hi = prof.length();
        if (!a.range.empty()) std::tie(lo, hi) = parse_range(a.range);
        if (a.n < 2) throw DomainError("need at least 2 samples");
        t.family = fam;
        t.p = a.p;
        t.q = 1.0;
        for (int i = 0; i < a.n; ++i) {
            const double u = i + 1 == a.n ? hi : lo + (hi - lo) * i / (a.n - 1);
            t.samples.push_back(prof.at(u));
        }
    } else {
        if (a.range.empty()) throw UsageError("--range A:B is required");
        const auto [lo, hi] = parse_range(a.range);
        t = trace_family(fam, a.p, a.q, lo, hi, a.n);
    }
    emit_trace(t, a.out_format, a.file, out);
    return 0;
}

int cmd_closed(const Args& a, std::ostream& out) {
    if (a.n_fold < 1) throw DomainError("--n-fold must be >= 1");
    Trace t;
    ojson j;
    if (a.family == "circle") {
        t = trace_family(Family::Circular, a.p, 0.0, 0.0, 2.0 * std::numbers::pi * a.n_fold, a.n);
        j["family"] = "circle";
    } else if (a.family == "eight") {
        t = figure_eight(a.p, a.n_fold, 0.0, a.n);
        j["family"] = "eight";
        j["q"] = t.q;
    } else {
        throw UsageError("--family must be eight or circle");
    }
    const auto rep = closure_check(t);
    j["p"] = a.p;
    j["n_fold"] = a.n_fold;
    j["position_gap"] = rep.position_gap;
    j["tangent_gap"] = rep.tangent_gap;
    j["turning_number"] = rep.turning_number;
    if (!a.file.empty()) emit_trace(t, a.out_format, a.file, out);
    out << j.dump() << '\n';
    return 0;
}

int cmd_special(const Args& a, std::ostream& out) {
    const std::string& w = a.what;
    if (w == "qstar") print_number(out, qstar(a.p));
    else if (w == "kp1") print_number(out, kp1(a.p));
    else if (w == "K1") print_number(out, complete(IntegralKind::F1, a.p, a.q));
    else if (w == "K2") print_number(out, complete(IntegralKind::F2, a.p, a.q));
    else if (w == "E1c") print_number(out, complete(IntegralKind::E1, a.p, a.q));
    else if (w == "E2c") print_number(out, complete(IntegralKind::E2, a.p, a.q));
    else if (w == "regularity") {
        const Family fam = a.family.empty() ? Family::Wavelike : family_from_string(a.family);
        out << regularity_json(regularity(a.p, fam, a.interior_zero)).dump() << '\n';
    } else {
        throw UsageError("unknown --what " + w);
    }
    return 0;
}

bool wants(const std::string& suite, const char* name) { return suite == "all" || suite == name; }

std::vector<VerifyReport> verify_sampled(const Args& a) {
    std::ifstream in(a.csv);
    if (!in) throw UsageError("cannot open " + a.csv);
    const Trace t = read_csv(in);
    if (!(a.suite == "all" || a.suite == "weak" || a.suite == "strong"))
        throw UsageError("sampled traces support the weak and strong suites only");
    std::vector<VerifyReport> reps;
    const double lo = t.s_begin(), hi = t.s_end();
    if (wants(a.suite, "weak")) {
        // Supports shifted into the open interval of the trace.
        auto phis = random_bumps(lo, hi, 8, a.seed);
        reps.push_back(weak_residual(t, a.p, a.lambda, phis));
    }
    if (wants(a.suite, "strong")) reps.push_back(strong_residual(t, a.p, a.lambda, 0.05 * (hi - lo)));
    return reps;
}

std::vector<VerifyReport> verify_solution(const Args& a) {
    Solution sol;
    if (!a.family.empty()) {
        std::optional<FlatCoreSpec> spec;
        if (!a.spec_file.empty()) spec = read_spec(a.spec_file);
        sol = canonical_solution(family_from_string(a.family), a.p, a.q, spec);
    } else {
        ClassifyOptions opts;
        if (!a.spec_file.empty()) opts.flatcore_hint = read_spec(a.spec_file);
        opts.zero_data_is_linear = a.zero_linear;
        sol = classify(a.p, a.lambda, InitialData::make(a.p, a.lambda, a.w0, a.wdot0), opts);
    }
    const double L = a.length;
    std::vector<VerifyReport> reps;
    const auto zeros = curvature_zeros(sol, 0.0, L);
    auto k = [&](double s) { return curvature_of(sol, s).k; };
    if (wants(a.suite, "weak"))
        reps.push_back(weak_residual(k, sol.p, sol.lambda, random_bumps(0.0, L, 8, a.seed), L, zeros));
    if (wants(a.suite, "strong")) reps.push_back(strong_residual(sol, 0.0, L, a.h));
    if (wants(a.suite, "conserve")) reps.push_back(conservation_drift(sol, 0.0, L));
    if (wants(a.suite, "variation")) {
        auto curve = [&](double s) { return solution_point(sol, s); };
        reps.push_back(first_variation(curve, sol.p, sol.lambda, random_perturbations(0.0, L, 8, a.seed)));
    }
    if (wants(a.suite, "exponent")) {
        double s0 = 0.0, expected = 0.0, window = 0.0;
        int side = 1;
        bool probe = false;
        if (const auto* w = std::get_if<Wavelike>(&sol.cls)) {
            const double K = complete(IntegralKind::F1, sol.p, w->q);
            const auto z = curvature_zeros(sol, 0.0, 4.0 * K / w->alpha + 1.0);
            if (!z.empty()) {
                s0 = z.front();
                window = 0.05 * K / w->alpha;
                expected = 1.0 / (sol.p - 1.0);
                probe = true;
            }
        } else if (const auto* f = std::get_if<FlatCore>(&sol.cls)) {
            s0 = f->spec.centers.front() + f->T_pl;
            side = -1;
            window = 0.05 * f->T_pl;
            expected = 2.0 / (sol.p - 2.0);
            probe = true;
        }
        if (probe) {
            const auto fit = exponent_probe(k, s0, side, window);
            reps.push_back(make_report("exponent", std::abs(fit.exponent / expected - 1.0), 0.05,
                                       {{"p", sol.p},
                                        {"s0", s0},
                                        {"fitted", fit.exponent},
                                        {"expected", expected},
                                        {"fit_rms", fit.residual}}));
        }
    }
    return reps;
}

int cmd_verify(const Args& a, std::ostream& out) {
    static const std::vector<std::string> suites{"all", "weak", "strong", "conserve", "variation", "exponent"};
    if (std::find(suites.begin(), suites.end(), a.suite) == suites.end())
        throw UsageError("unknown --suite " + a.suite);
    const auto reps = a.csv.empty() ? verify_solution(a) : verify_sampled(a);
    out << reports_json(reps) << '\n';
    for (const auto& r : reps)
        if (!r.pass) return 1;
    return 0;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"p-elliptic functions and planar p-elasticae"};
    app.require_subcommand(1);
    Args a;

    auto add_p = [&](CLI::App* c) { c->add_option("--p", a.p, "exponent p > 1")->required()->check(kExponent); };

    auto* eval = app.add_subcommand("eval", "evaluate a p-elliptic integral or function");
    eval->add_option("--fn", a.fn, "F1|F2|E1|E2|am1|am2|sn|cn|sncn|dn|sech|tanh")->required();
    add_p(eval);
    eval->add_option("--q", a.q, "modulus in [0, 1]")->check(kFinite);
    eval->add_option("--x", a.x, "argument")->required()->check(kFinite);

    auto* cls = app.add_subcommand("classify", "classify initial curvature data");
    add_p(cls);
    cls->add_option("--lambda", a.lambda)->required()->check(kFinite);
    cls->add_option("--w0", a.w0)->required()->check(kFinite);
    cls->add_option("--wdot0", a.wdot0)->required()->check(kFinite);
    cls->add_option("--flatcore-spec", a.spec_file, "JSON {N, signs, lengths}");
    cls->add_flag("--zero-linear", a.zero_linear, "resolve zero data as the line");

    auto* tr = app.add_subcommand("trace", "sample a canonical curve");
    tr->add_option("--family", a.family, "wavelike|borderline|orbitlike|circular|linear|flatcore")->required();
    add_p(tr);
    tr->add_option("--q", a.q)->check(kFinite);
    tr->add_option("--spec", a.spec_file, "flat-core spec JSON");
    tr->add_option("--range", a.range, "A:B");
    tr->add_option("--n", a.n, "number of samples");
    tr->add_option("--out", a.out_format)->check(CLI::IsMember({"csv", "svg"}));
    tr->add_option("--file", a.file);

    auto* cl = app.add_subcommand("closed", "closed figure-eight or circle");
    add_p(cl);
    cl->add_option("--n-fold", a.n_fold)->required();
    cl->add_option("--family", a.family)->check(CLI::IsMember({"eight", "circle"}));
    cl->add_option("--n", a.n, "number of samples");
    cl->add_option("--out", a.out_format)->check(CLI::IsMember({"csv", "svg"}));
    cl->add_option("--file", a.file, "write the closed trace here");

    auto* sp = app.add_subcommand("special", "special values and regularity");
    add_p(sp);
    sp->add_option("--what", a.what, "qstar|kp1|K1|K2|E1c|E2c|regularity")->required();
    sp->add_option("--q", a.q)->check(kFinite);
    sp->add_option("--family", a.family, "family for regularity (default wavelike)");
    sp->add_flag("--interior-zero", a.interior_zero);

    auto* ve = app.add_subcommand("verify", "run the verification suite");
    add_p(ve);
    ve->add_option("--suite", a.suite, "all|weak|strong|conserve|variation|exponent");
    ve->add_option("--family", a.family, "canonical family with its matched multiplier");
    ve->add_option("--q", a.q)->check(kFinite);
    ve->add_option("--spec", a.spec_file, "flat-core spec JSON");
    ve->add_option("--lambda", a.lambda)->check(kFinite);
    ve->add_option("--w0", a.w0)->check(kFinite);
    ve->add_option("--wdot0", a.wdot0)->check(kFinite);
    ve->add_flag("--zero-linear", a.zero_linear);
    ve->add_option("--csv", a.csv, "verify sampled curvature from a trace CSV");
    ve->add_option("--length", a.length, "arclength window [0, L]")->check(kFinite);
    ve->add_option("--step", a.h, "grid spacing for the strong residual")->check(kFinite);
    ve->add_option("--seed", a.seed, "seed for random test functions");

    a.family.clear();
    a.out_format = "csv";
    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return 0;
    } catch (const CLI::ParseError& e) {
        err << e.what() << '\n';
        return 2;
    }
    if (cl->parsed() && a.family.empty()) a.family = "eight";
    try {
        if (eval->parsed()) return cmd_eval(a, out);
        if (cls->parsed()) return cmd_classify(a, out);
        if (tr->parsed()) return cmd_trace(a, out);
        if (cl->parsed()) return cmd_closed(a, out);
        if (sp->parsed()) return cmd_special(a, out);
        if (ve->parsed()) return cmd_verify(a, out);
    } catch (const UsageError& e) {
        err << "usage: " << e.what() << '\n';
        return 2;
    } catch (const AmbiguityError& e) {
        err << "ambiguous: " << e.what() << '\n';
        return 2;
    } catch (const DomainError& e) {
        err << "domain error: " << e.what() << '\n';
        return 3;
    } catch (const std::domain_error& e) {
        err << "domain error: " << e.what() << '\n';
        return 3;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    }
    return 2;
}

}  // namespace pelastica
