// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any
// criterion fails. Tolerances are fixed here.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "pelastica/classify.hpp"
#include "pelastica/curves.hpp"
#include "pelastica/elliptic.hpp"
#include "pelastica/errors.hpp"
#include "pelastica/verify.hpp"

using namespace pelastica;
using oracle::kPi;

namespace {

constexpr double kIdentityTol = 1e-10;
constexpr double kIdentitySeconds = 10.0;
constexpr double kClassicalTol = 1e-9;
constexpr double kWeakTol = 1e-8;
constexpr double kDriftTol = 1e-8;
constexpr double kNegativeFloor = 1e-3;
constexpr double kVariationTol = 1e-6;
constexpr double kClosureTol = 1e-8;
constexpr double kPerturbedGap = 1e-4;
constexpr double kDisplacementTol = 1e-8;
constexpr double kFlatYTol = 1e-9;
constexpr double kExponentRel = 0.05;
constexpr double kRoundTripTol = 1e-7;

const double kGridP[] = {6.0 / 5.0, 4.0 / 3.0, 1.5, 2.0, 3.0, 4.0, 6.0};

struct Outcome {
    bool pass = true;
    std::ostringstream note;

    void require(bool ok, const std::string& what) {
        if (!ok) {
            pass = false;
            note << " [failed: " << what << "]";
        }
    }
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

Outcome identity() {
    Outcome o;
    const auto t0 = std::chrono::steady_clock::now();
    double worst = 0.0;
    for (double p : kGridP)
        for (double q : {0.0, 0.3, 0.6, 0.9, 0.99})
            for (int i = 0; i <= 40; ++i) {
                const auto sc = sn_cn(p, -10.0 + 0.5 * i, q);
                worst = std::max(worst, std::abs(sc.sn * sc.sn + std::pow(std::abs(sc.cn), p) - 1.0));
            }
    const double dt = seconds_since(t0);
    o.require(worst < kIdentityTol, "identity residual");
    o.require(dt < kIdentitySeconds, "runtime");
    o.note << "max | |sn|^2 + |cn|^p - 1 | = " << worst << " (tol " << kIdentityTol << "), " << dt << " s (limit "
           << kIdentitySeconds << " s)";
    return o;
}

Outcome classical() {
    Outcome o;
    std::mt19937_64 rng(20240601);
    std::uniform_real_distribution<double> ux(-6.0, 6.0), uq(0.0, 0.99);
    double worst = 0.0;
    for (int i = 0; i < 200; ++i) {
        const double x = ux(rng), q = uq(rng);
        const auto ref = oracle::agm_incomplete(x, q);
        const auto j = oracle::agm_jacobi(x, q);
        const auto sc = sn_cn(2.0, x, q);
        const double errs[] = {
            std::abs(integral(IntegralKind::F1, 2.0, x, q) - ref.F), std::abs(integral(IntegralKind::F2, 2.0, x, q) - ref.F),
            std::abs(integral(IntegralKind::E1, 2.0, x, q) - ref.E), std::abs(integral(IntegralKind::E2, 2.0, x, q) - ref.E),
            std::abs(sc.cn - j.cn), std::abs(dn(2.0, x, q) - j.dn)};
        for (double e : errs) worst = std::max(worst, e);
    }
    o.require(worst < kClassicalTol, "AGM agreement");
    o.note << "200 points, max |p=2 value - AGM| = " << worst << " (tol " << kClassicalTol << ")";
    return o;
}

struct Case {
    std::string label;
    Solution sol;
    double L;
};

Solution flatcore(double p, double lambda, std::vector<int> signs, std::vector<double> lengths) {
    FlatCore f;
    f.A_pl = a_pl(p, lambda);
    f.T_pl = kp1(p) / f.A_pl;
    f.spec.N = static_cast<int>(signs.size());
    f.spec.signs = std::move(signs);
    f.spec.lengths = std::move(lengths);
    f.spec.centers = canonical_centers(f.spec, f.T_pl);
    return {p, lambda, f};
}

std::vector<Case> matched_families() {
    std::vector<Case> cases;
    for (double p : {1.5, 3.0}) {
        const double q = 0.85, A = 2.0 * q, alpha = 1.0;
        cases.push_back({"wavelike p=" + std::to_string(p), {p, wavelike_lambda(p, A, alpha, q), Wavelike{A, alpha, 0.3, q}}, 8.0});
    }
    cases.push_back({"orbitlike p=3", {3.0, orbitlike_lambda(3.0, 2.0, 1.0, 0.65), Orbitlike{2.0, 1.0, 0.1, 0.65}}, 8.0});
    cases.push_back({"circular p=2.5", {2.5, circular_lambda(2.5, 1.0), Circular{1.0}}, 8.0});
    cases.push_back({"borderline p=1.5", {1.5, borderline_lambda(1.5, 1.0), Borderline{1, 0.2}}, 8.0});
    const auto fc = flatcore(3.0, 1.0, {1, -1}, {0.0, 1.0});
    cases.push_back({"flatcore p=3 N=2", fc, 4.0 * std::get<FlatCore>(fc.cls).T_pl + 2.0});
    return cases;
}

Outcome criticality() {
    Outcome o;
    double worst_weak = 0.0, worst_drift = 0.0, min_negative = 1e300;
    double order_lo = 1e300, order_hi = -1e300;
    for (const auto& c : matched_families()) {
        const auto& sol = c.sol;
        auto k = [&](double s) { return curvature_of(sol, s).k; };
        const auto zeros = curvature_zeros(sol, 0.0, c.L);
        const auto phis = random_bumps(0.0, c.L, 8, 17);
        const auto weak = weak_residual(k, sol.p, sol.lambda, phis, c.L, zeros, kWeakTol);
        const auto neg = weak_residual(k, sol.p, 1.1 * sol.lambda, phis, c.L, zeros, kWeakTol);
        const auto strong = strong_residual(sol, 0.0, c.L, 0.04);
        const auto drift = conservation_drift(sol, 0.0, c.L, 401, kDriftTol);
        worst_weak = std::max(worst_weak, weak.residual_norm);
        worst_drift = std::max(worst_drift, drift.residual_norm);
        min_negative = std::min(min_negative, neg.residual_norm);
        const double order = strong.metadata.at("order");
        if (std::isfinite(order)) {
            order_lo = std::min(order_lo, order);
            order_hi = std::max(order_hi, order);
        }
        o.require(weak.pass, c.label + " weak");
        o.require(strong.pass, c.label + " strong order");
        o.require(drift.pass, c.label + " drift");
        o.require(neg.residual_norm > kNegativeFloor, c.label + " negative control");
    }
    o.note << "6 families: weak <= " << worst_weak << " (tol " << kWeakTol << "), strong order in [" << order_lo << ", "
           << order_hi << "] (want [1.7, 2.3]; circle exact), drift <= " << worst_drift << " (tol " << kDriftTol
           << "), lambda*1.1 control >= " << min_negative << " (need > " << kNegativeFloor << ")";
    return o;
}

Outcome variation() {
    Outcome o;
    struct V {
        std::string label;
        Solution sol;
        double L;
    };
    std::vector<V> cases;
    const double p = 2.5;
    cases.push_back({"circle", classify(p, p - 1.0, InitialData::make(p, p - 1.0, 1.0, 0.0)), 6.0});
    ClassifyOptions lin;
    lin.zero_data_is_linear = true;
    cases.push_back({"line", classify(p, 1.0, InitialData::make(p, 1.0, 0.0, 0.0), lin), 6.0});
    cases.push_back({"wavelike", classify(p, 1.0, InitialData::make(p, 1.0, 0.2, 0.8)), 8.0});
    const double A = a_pl(3.0, 1.0);
    const auto fc = classify(3.0, 1.0, InitialData::make(3.0, 1.0, std::pow(2.0 * A, 2.0), 0.0));
    cases.push_back({"flatcore", fc, 2.0 * std::get<FlatCore>(fc.cls).T_pl});
    double worst = 0.0, worst_mismatch = 0.0;
    for (const auto& c : cases) {
        const double lo = c.sol.family() == Family::FlatCore ? -0.5 * c.L : 0.0;
        const auto etas = random_perturbations(lo, lo + c.L, 8, 99);
        const auto r = first_variation([&](double s) { return solution_point(c.sol, s); }, c.sol.p, c.sol.lambda,
                                       etas, 1.0, kVariationTol);
        worst = std::max(worst, r.residual_norm);
        worst_mismatch = std::max(worst_mismatch, r.metadata.at("route_mismatch"));
        o.require(r.pass, c.label);
        o.require(r.metadata.at("route_mismatch") < kVariationTol, c.label + " quadrature vs finite difference");
    }
    const Solution circ{p, p - 1.0, Circular{1.0}};
    const auto bad = first_variation([&](double s) { return solution_point(circ, s); }, p, 2.0 * (p - 1.0),
                                     random_perturbations(0.0, 6.0, 8, 99), 1.0, kVariationTol);
    o.require(!bad.pass, "non-critical circle must fail");
    o.require(bad.metadata.at("route_mismatch") < kVariationTol, "negative control routes agree");
    o.note << "circle/line/wavelike/flat-core, 8 bumps each: max normalized variation " << worst << " (tol "
           << kVariationTol << "), max route mismatch " << worst_mismatch << "; lambda = 2(p-1) circle gives "
           << bad.residual_norm;
    return o;
}

Outcome closed_curves() {
    Outcome o;
    double worst_gap = 0.0, min_perturbed = 1e300;
    for (double p : {6.0 / 5.0, 1.5, 2.0, 3.0, 10.0}) {
        const auto rep = closure_check(figure_eight(p, 1));
        worst_gap = std::max({worst_gap, rep.position_gap, rep.tangent_gap});
        for (double dq : {-1e-3, 1e-3}) {
            const double q = qstar(p) + dq;
            const double K = complete(IntegralKind::F1, p, q);
            const auto t = trace_family(Family::Wavelike, p, q, 0.0, 4.0 * K, 201);
            min_perturbed = std::min(min_perturbed, closure_check(t).position_gap);
        }
    }
    o.require(worst_gap < kClosureTol, "figure-eight closure");
    o.require(min_perturbed > kPerturbedGap, "perturbed q must not close");
    double max_x2 = -1e300;
    for (double p : {1.2, 1.5, 2.0, 3.0, 10.0})
        for (int i = 1; i <= 20; ++i) max_x2 = std::max(max_x2, X2p(p, i / 21.0));
    o.require(max_x2 < 0.0, "X2p negative");
    const double border_gap = closure_check(trace_family(Family::Borderline, 1.5, 1.0, -15.0, 15.0, 1001)).position_gap;
    FlatCoreSpec spec;
    spec.N = 2;
    spec.signs = {1, 1};
    spec.lengths = {0.0, 0.5};
    const double flat_gap = closure_check(trace_flatcore(3.0, spec, 2001)).position_gap;
    o.require(border_gap > kPerturbedGap && flat_gap > kPerturbedGap, "borderline/flat-core must not close");
    o.note << "figure-eight gaps <= " << worst_gap << " (tol " << kClosureTol << "), q +- 1e-3 gaps >= " << min_perturbed
           << " (need > " << kPerturbedGap << "), max X2p on 5x20 grid " << max_x2 << ", borderline gap "
           << border_gap << ", flat-core gap " << flat_gap;
    return o;
}

Outcome flatcore_geometry() {
    Outcome o;
    double worst = 0.0, worst_y = 0.0;
    bool injective = true;
    for (double p : {3.0, 4.0, 6.0}) {
        for (int sign : {1, -1}) {
            FlatCoreSpec one;
            one.N = 1;
            one.signs = {sign};
            one.lengths = {0.0};
            const auto t = trace_flatcore(p, one, 2001);
            const double dx = t.samples.back().x - t.samples.front().x;
            const double dy = t.samples.back().y - t.samples.front().y;
            worst = std::max(worst, std::hypot(dx + 2.0 * kp1(p) / (p - 1.0), dy));
        }
        FlatCoreSpec spec;
        spec.N = 3;
        spec.signs = {1, -1, 1};
        spec.lengths = {0.7, 1.3, 0.4};
        const auto t = trace_flatcore(p, spec, 3001);
        std::vector<double> xs;
        for (const auto& c : t.samples)
            if (c.k == 0.0) {
                worst_y = std::max(worst_y, std::abs(c.y));
                xs.push_back(c.x);
            }
        std::sort(xs.begin(), xs.end());
        for (size_t i = 1; i < xs.size(); ++i) injective = injective && xs[i] > xs[i - 1];
    }
    o.require(worst < kDisplacementTol, "loop displacement");
    o.require(worst_y < kFlatYTol, "flat samples on the x-axis");
    o.require(injective, "flat x injective");
    o.note << "loop displacement error " << worst << " (tol " << kDisplacementTol << "), flat |y| <= " << worst_y
           << " (tol " << kFlatYTol << "), flat x injective: " << (injective ? "yes" : "no");
    return o;
}

Outcome regularity_probes() {
    Outcome o;
    double worst = 0.0;
    std::ostringstream fits;
    for (double p : kGridP) {
        const double q = 0.7, A = 2.0 * q;
        const Solution sol{p, wavelike_lambda(p, A, 1.0, q), Wavelike{A, 1.0, 0.0, q}};
        auto k = [&](double s) { return curvature_of(sol, s).k; };
        const double K = complete(IntegralKind::F1, p, q);
        const double expected = 1.0 / (p - 1.0);
        const double z = curvature_zeros(sol, 0.0, 4.0 * K).front();
        for (int side : {1, -1}) {
            const auto fit = exponent_probe(k, z, side, 0.05 * K);
            const double rel = std::abs(fit.exponent / expected - 1.0);
            worst = std::max(worst, rel);
            o.require(rel < kExponentRel, "wavelike p=" + std::to_string(p));
            if (side == 1) fits << " " << fit.exponent;
        }
        // Analytic cases: the local order is the odd integer 1/(p-1).
        if (p == 2.0 || p == 4.0 / 3.0 || p == 6.0 / 5.0) {
            const auto fit = exponent_probe(k, z, 1, 0.05 * K);
            const double n = std::round(fit.exponent);
            o.require(std::abs(fit.exponent - n) < kExponentRel && std::fmod(n, 2.0) == 1.0,
                      "integer order at p=" + std::to_string(p));
        }
    }
    fits << " |";
    for (double p : {3.0, 4.0, 6.0}) {
        const Solution sol = flatcore(p, 1.0, {1}, {0.5});
        const auto& f = std::get<FlatCore>(sol.cls);
        auto k = [&](double s) { return curvature_of(sol, s).k; };
        const auto fit = exponent_probe(k, f.spec.centers[0] + f.T_pl, -1, 0.05 * f.T_pl);
        const double rel = std::abs(fit.exponent / (2.0 / (p - 2.0)) - 1.0);
        worst = std::max(worst, rel);
        o.require(rel < kExponentRel, "flat-core edge p=" + std::to_string(p));
        fits << " " << fit.exponent;
    }
    o.note << "max relative exponent error " << worst << " (tol " << kExponentRel << "); fitted" << fits.str();
    return o;
}

// Expected case from the data alone.
Family expected_family(double p, double lambda, const InitialData& d) {
    const Potential pot{p, lambda};
    if (d.w0 == 0.0 && d.wdot0 == 0.0) return Family::Linear;
    const auto st = potential_structure(pot);
    const double eps = level_tolerance(pot);
    if (lambda > 0.0 && std::abs(d.D0 - st.global_min) <= eps) return Family::Circular;
    if (std::abs(d.D0) <= eps) return p > 2.0 ? Family::FlatCore : Family::Borderline;
    return d.D0 > 0.0 ? Family::Wavelike : Family::Orbitlike;
}

Outcome round_trip() {
    Outcome o;
    std::mt19937_64 rng(500);
    std::uniform_real_distribution<double> up(1.1, 6.0), ul(-3.0, 3.0), uw(-2.0, 2.0), u01(0.0, 1.0);
    int agree = 0, covariant = 0;
    double worst = 0.0;
    int counts[6] = {0, 0, 0, 0, 0, 0};
    for (int i = 0; i < 500; ++i) {
        const double p = up(rng);
        double lambda = ul(rng), w0 = uw(rng), wd = uw(rng);
        const double kind = u01(rng);
        if (kind < 0.1) {
            w0 = wd = 0.0;  // trivial data
            if (p > 2.0) lambda = -std::abs(lambda);
        } else if (kind < 0.2) {
            lambda = std::abs(lambda) + 0.1;  // bottom of the well
            w0 = std::copysign(potential_structure({p, lambda}).critical_points.back(), w0);
            wd = 0.0;
        } else if (kind < 0.3) {
            lambda = std::abs(lambda) + 0.1;  // zero level at rest
            w0 = std::copysign(potential_structure({p, lambda}).zero_roots.back(), w0);
            wd = 0.0;
        }
        const auto data = InitialData::make(p, lambda, w0, wd);
        const Solution sol = classify(p, lambda, data);
        counts[static_cast<int>(sol.family())]++;
        if (sol.family() == expected_family(p, lambda, data)) ++agree;
        worst = std::max(worst, initial_mismatch(sol, data));
        const double mu = 0.3 + 2.0 * u01(rng);
        const double lam2 = lambda * std::pow(mu, p);
        const auto data2 = InitialData::make(p, lam2, w0 * std::pow(mu, p - 1.0), wd * std::pow(mu, p));
        if (classify(p, lam2, data2).family() == sol.family()) ++covariant;
    }
    o.require(agree == 500, "one case per instance");
    o.require(worst < kRoundTripTol, "regenerated curvature");
    o.require(covariant == 500, "scaling covariance");
    o.note << "500 instances: " << agree << " in the expected case, max mismatch " << worst << " (tol " << kRoundTripTol
           << "), " << covariant << " family-stable under scaling; counts L/W/B/F/O/C = " << counts[0] << "/"
           << counts[1] << "/" << counts[2] << "/" << counts[3] << "/" << counts[4] << "/" << counts[5];
    return o;
}

}  // namespace

int main() {
    struct Criterion {
        const char* name;
        std::function<Outcome()> run;
    };
    const Criterion criteria[] = {
        {"identity suite", identity},
        {"classical reduction", classical},
        {"ODE criticality", criticality},
        {"first variation", variation},
        {"closed curves", closed_curves},
        {"flat-core geometry", flatcore_geometry},
        {"regularity probes", regularity_probes},
        {"classification round trip", round_trip},
    };
    int failed = 0;
    int index = 0;
    for (const auto& c : criteria) {
        ++index;
        Outcome o;
        const auto t0 = std::chrono::steady_clock::now();
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o.pass = false;
            o.note << "exception: " << e.what();
        }
        if (!o.pass) ++failed;
        std::printf("[%s] %d. %s: %s (%.1f s)\n", o.pass ? "PASS" : "FAIL", index, c.name, o.note.str().c_str(),
                    seconds_since(t0));
        std::fflush(stdout);
    }
    std::printf("%d/8 criteria passed\n", 8 - failed);
    return failed == 0 ? 0 : 1;
}
