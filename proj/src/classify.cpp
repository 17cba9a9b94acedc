#include "pelastica/classify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "roots.hpp"

namespace pelastica {
namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kHalfPi = kPi / 2;

double sgn(double v) { return v < 0 ? -1.0 : 1.0; }

// |x|^e x, with the value 0 at x = 0 for any e > -1.
double signed_pow(double x, double e) {
    if (x == 0.0) return 0.0;
    return std::pow(std::abs(x), e) * x;
}

void check_p(double p) {
    if (!std::isfinite(p) || !(p > 1.0)) throw DomainError("p must be a finite real > 1");
}

// Largest root of F(x) = D on [lo, hi] where F is increasing.
double increasing_root(const Potential& pot, double D, double lo, double hi) {
    auto g = [&](double x) { return potential_eval(pot, x).F - D; };
    auto dg = [&](double x) { return potential_eval(pot, x).Fdot; };
    const double step = 1e-15 * std::max(1.0, hi);
    return detail::solve_increasing(g, dg, lo, hi, 0.5 * (lo + hi), step);
}

// Amplitude from (cos a, sin 2a) style data: returns atan2(S2, C2) / 2.
double half_angle(double S2, double C2) { return 0.5 * std::atan2(S2, C2); }

// Recovers the amplitude of a sech_p-type profile (q = 1) from
// w = sigma (2A)^{p-1} c^{2-2/p} and w' = -sigma (2A)^{p-1} A (1-1/p) sin 2a.
double loop_amplitude(double p, double A, int sigma, double w0, double wdot0) {
    const double amp = std::pow(2.0 * A, p - 1.0);
    const double c = std::min(1.0, std::pow(std::abs(w0) / amp, p / (2.0 * p - 2.0)));
    const double C2 = 2.0 * c * c - 1.0;
    const double S2 = -wdot0 / (sigma * amp * A * (1.0 - 1.0 / p));
    double a = half_angle(S2, C2);
    const double lim = std::nextafter(kHalfPi, 0.0);
    return std::clamp(a, -lim, lim);
}

FlatCoreSpec default_spec(int sign) {
    FlatCoreSpec s;
    s.N = 1;
    s.signs = {sign};
    s.lengths = {0.0};
    return s;
}

}  // namespace

PotentialValue potential_eval(const Potential& pot, double x) {
    const double p = pot.p;
    const double ax = std::abs(x);
    PotentialValue v;
    if (ax == 0.0) return v;
    const double y = std::pow(ax, p / (p - 1.0));
    v.F = (p - 1.0) * (p - 1.0) * y * y - 2.0 * pot.lambda * (p - 1.0) * y;
    v.Fdot = 2.0 * p * (p - 1.0) * signed_pow(x, 2.0 / (p - 1.0)) -
             2.0 * p * pot.lambda * signed_pow(x, (2.0 - p) / (p - 1.0));
    return v;
}

PotentialStructure potential_structure(const Potential& pot) {
    check_p(pot.p);
    const double p = pot.p;
    PotentialStructure s;
    if (pot.lambda > 0.0) {
        const double xm = std::pow(pot.lambda / (p - 1.0), (p - 1.0) / p);
        const double c = std::pow(2.0 * pot.lambda / (p - 1.0), (p - 1.0) / p);
        s.critical_points = {-xm, 0.0, xm};
        s.global_min = -pot.lambda * pot.lambda;
        s.zero_roots = {-c, 0.0, c};
    } else {
        s.critical_points = {0.0};
        s.global_min = 0.0;
        s.zero_roots = {0.0};
    }
    return s;
}

double level_tolerance(const Potential& pot) {
    return 1e-9 * (1.0 + std::abs(potential_structure(pot).global_min));
}

std::array<double, 4> level_roots(const Potential& pot, double D) {
    check_p(pot.p);
    const auto st = potential_structure(pot);
    if (!(pot.lambda > 0.0) || !(D > st.global_min) || !(D < 0.0))
        throw DomainError("level_roots needs lambda > 0 and min F < D < 0");
    const double p = pot.p;
    const double xm = st.critical_points[2];
    const double c = st.zero_roots[2];
    const double xi = increasing_root(pot, D, xm, c);
    const double rest = std::max(0.0, 2.0 * pot.lambda / (p - 1.0) - std::pow(xi, p / (p - 1.0)));
    const double zeta = std::pow(rest, (p - 1.0) / p);
    return {-xi, -zeta, zeta, xi};
}

InitialData InitialData::make(double p, double lambda, double w0, double wdot0) {
    InitialData d;
    d.w0 = w0;
    d.wdot0 = wdot0;
    d.D0 = p * p * wdot0 * wdot0 + potential_eval({p, lambda}, w0).F;
    return d;
}

void validate(const FlatCoreSpec& spec) {
    if (spec.N < 1) throw DomainError("flat-core spec needs N >= 1");
    if (spec.signs.size() != static_cast<size_t>(spec.N) ||
        spec.lengths.size() != static_cast<size_t>(spec.N))
        throw DomainError("flat-core spec needs N signs and N lengths");
    for (int s : spec.signs)
        if (s != 1 && s != -1) throw DomainError("flat-core signs must be +1 or -1");
    for (double L : spec.lengths)
        if (!std::isfinite(L) || L < 0.0) throw DomainError("flat-core lengths must be finite and >= 0");
    if (!spec.centers.empty() && spec.centers.size() != static_cast<size_t>(spec.N))
        throw DomainError("flat-core spec has the wrong number of centres");
}

Family family_of(const SolutionClass& cls) { return static_cast<Family>(cls.index()); }

std::string to_string(Family f) {
    switch (f) {
        case Family::Linear: return "linear";
        case Family::Wavelike: return "wavelike";
        case Family::Borderline: return "borderline";
        case Family::FlatCore: return "flatcore";
        case Family::Orbitlike: return "orbitlike";
        case Family::Circular: return "circular";
    }
    return "?";
}

Family family_from_string(const std::string& name) {
    for (Family f : {Family::Linear, Family::Wavelike, Family::Borderline, Family::FlatCore,
                     Family::Orbitlike, Family::Circular})
        if (to_string(f) == name) return f;
    throw DomainError("unknown family: " + name);
}

double a_pl(double p, double lambda) {
    if (!(lambda > 0.0)) throw DomainError("A_{p,lambda} needs lambda > 0");
    return 0.5 * std::pow(2.0 * lambda / (p - 1.0), 1.0 / p);
}

double wavelike_lambda(double p, double A, double alpha, double q) {
    return 2.0 * (p - 1.0) * std::pow(std::abs(A), p - 2.0) * alpha * alpha * (2.0 * q * q - 1.0);
}

double orbitlike_lambda(double p, double A, double alpha, double q) {
    return 2.0 * (p - 1.0) * std::pow(std::abs(A), p - 2.0) * alpha * alpha * (2.0 - q * q);
}

double circular_lambda(double p, double k0) { return (p - 1.0) * std::pow(std::abs(k0), p); }

double borderline_lambda(double p, double A) { return 0.5 * (p - 1.0) * std::pow(2.0 * A, p); }

std::vector<double> canonical_centers(const FlatCoreSpec& spec, double T) {
    std::vector<double> c(spec.N);
    double acc = 0.0;
    for (int j = 0; j < spec.N; ++j) {
        acc += spec.lengths[j];
        c[j] = acc + (2.0 * j + 1.0) * T;
    }
    return c;
}

Solution classify(double p, double lambda, const InitialData& data, const ClassifyOptions& opts) {
    check_p(p);
    if (!std::isfinite(lambda) || !std::isfinite(data.w0) || !std::isfinite(data.wdot0))
        throw DomainError("classify needs finite lambda and data");
    const Potential pot{p, lambda};
    const auto st = potential_structure(pot);
    const double D0 = p * p * data.wdot0 * data.wdot0 + potential_eval(pot, data.w0).F;
    const double eps = level_tolerance(pot);
    const double w0 = data.w0;
    const double wdot0 = data.wdot0;
    Solution sol{p, lambda, Linear{}};

    if (w0 == 0.0 && wdot0 == 0.0) {
        if (p <= 2.0 || lambda <= 0.0 || opts.zero_data_is_linear) return sol;
        if (!opts.flatcore_hint)
            throw AmbiguityError(
                "p > 2 with zero data: linear or a flat segment of a flat-core solution; "
                "supply a flat-core spec or choose linear");
        FlatCore fc;
        fc.spec = *opts.flatcore_hint;
        validate(fc.spec);
        fc.A_pl = a_pl(p, lambda);
        fc.T_pl = kp1(p) / fc.A_pl;
        fc.spec.centers = canonical_centers(fc.spec, fc.T_pl);
        sol.cls = fc;
        return sol;
    }

    if (lambda > 0.0 && std::abs(D0 - st.global_min) <= eps) {
        sol.cls = Circular{sgn(w0) * std::pow(lambda / (p - 1.0), 1.0 / p)};
        return sol;
    }

    if (lambda > 0.0 && std::abs(D0) <= eps) {
        const int sigma = w0 != 0.0 ? static_cast<int>(sgn(w0)) : static_cast<int>(sgn(wdot0));
        const double A = a_pl(p, lambda);
        const double a = loop_amplitude(p, A, sigma, w0, wdot0);
        if (p <= 2.0) {
            sol.cls = Borderline{sigma, integral(IntegralKind::F1, p, a, 1.0)};
            return sol;
        }
        FlatCore fc;
        fc.A_pl = A;
        fc.T_pl = kp1(p) / A;
        fc.spec = opts.flatcore_hint ? *opts.flatcore_hint : default_spec(sigma);
        validate(fc.spec);
        if (fc.spec.signs[0] != sigma)
            throw DomainError("flat-core hint sign disagrees with the initial data");
        // The data sits inside the first loop; later loops follow it.
        const double x0 = integral(IntegralKind::F1, p, a, 1.0);
        fc.spec.centers.assign(fc.spec.N, 0.0);
        fc.spec.centers[0] = -x0 / A;
        for (int j = 1; j < fc.spec.N; ++j)
            fc.spec.centers[j] = fc.spec.centers[j - 1] + 2.0 * fc.T_pl + fc.spec.lengths[j];
        sol.cls = fc;
        return sol;
    }

    if (D0 > 0.0) {
        double lo = lambda > 0.0 ? st.zero_roots[2] : 0.0;
        double hi = std::max(1.0, 2.0 * lo);
        while (potential_eval(pot, hi).F <= D0) {
            lo = hi;
            hi *= 2.0;
        }
        const double mu = increasing_root(pot, D0, lo, hi);
        Wavelike wv;
        wv.A = std::pow(mu, 1.0 / (p - 1.0));
        const double Ap = std::pow(wv.A, p);
        wv.q = std::sqrt(1.0 / (2.0 - 2.0 * lambda / ((p - 1.0) * Ap)));
        wv.alpha = wv.A / (2.0 * wv.q);
        // w = A^{p-1} sgn(c)|c|^{2-2/p}, w' = -A^{p-1} alpha (2-2/p) sin a sqrt(1-q^2 sin^2 a)
        const double amp = std::pow(wv.A, p - 1.0);
        const double cw = std::clamp(w0 / amp, -1.0, 1.0);
        const double c = sgn(cw) * std::pow(std::abs(cw), p / (2.0 * p - 2.0));
        const double S = -wdot0 / (amp * wv.alpha * (2.0 - 2.0 / p));
        double sa = 0.0;
        if (std::abs(c) < 0.75) {
            sa = (S < 0 ? -1.0 : 1.0) * std::sqrt(std::max(0.0, 1.0 - c * c));
        } else {
            const double disc = std::sqrt(std::max(0.0, 1.0 - 4.0 * wv.q * wv.q * S * S));
            sa = sgn(S) * std::sqrt(2.0 * S * S / (1.0 + disc));
            if (S == 0.0) sa = 0.0;
        }
        const double a = std::atan2(sa, c);
        wv.beta = integral(IntegralKind::F1, p, a, wv.q);
        sol.cls = wv;
        return sol;
    }

    // min F < D0 < 0
    const auto roots = level_roots(pot, D0);
    Orbitlike ob;
    const double xi = roots[3];
    ob.A = sgn(w0) * std::pow(xi, 1.0 / (p - 1.0));
    const double aA = std::abs(ob.A);
    ob.alpha = aA / 2.0;
    ob.q = std::sqrt(2.0 - 2.0 * lambda / ((p - 1.0) * std::pow(aA, p)));
    // w = sgn(A)|A|^{p-1} Delta^{(p-1)/p}, Delta = 1 - q^2 sin^2 a
    // w' = -sgn(A)|A|^{p-1} alpha (1 - 1/p) q^2 sin 2a
    const double amp = std::pow(aA, p - 1.0);
    const double q2 = ob.q * ob.q;
    const double delta = std::pow(std::min(1.0, std::abs(w0) / amp), p / (p - 1.0));
    const double s2 = std::clamp((1.0 - delta) / q2, 0.0, 1.0);
    const double C2 = 1.0 - 2.0 * s2;
    const double S2 = -wdot0 / (sgn(ob.A) * amp * ob.alpha * (1.0 - 1.0 / p) * q2);
    const double a = half_angle(S2, C2);
    ob.beta = integral(IntegralKind::F2, p, a, ob.q);
    sol.cls = ob;
    return sol;
}

CurvatureValue curvature_of(const Solution& sol, double s) {
    const double p = sol.p;
    CurvatureValue out;
    auto loop = [&](double A, double sigma, double x) {
        // k = sigma 2A sech_p(x), x = A (s - s_c)
        const Amplitude am = amplitude_ext(1, p, x, 1.0);
        const double c = std::abs(am.cos);
        const double amp = sigma * std::pow(2.0 * A, p - 1.0);
        out.k = sigma * 2.0 * A * std::pow(c, 2.0 / p);
        out.w = amp * std::pow(c, 2.0 - 2.0 / p);
        out.wdot = -amp * A * (2.0 - 2.0 / p) * am.sin * c;
    };
    std::visit(
        [&](const auto& c) {
            using T = std::decay_t<decltype(c)>;
            if constexpr (std::is_same_v<T, Linear>) {
            } else if constexpr (std::is_same_v<T, Circular>) {
                out.k = c.k0;
                out.w = signed_pow(c.k0, p - 2.0);
            } else if constexpr (std::is_same_v<T, Wavelike>) {
                const Amplitude am = amplitude_ext(1, p, c.alpha * s + c.beta, c.q);
                const double cn = am.cos == 0.0 ? 0.0 : sgn(am.cos) * std::pow(std::abs(am.cos), 2.0 / p);
                const double amp = signed_pow(c.A, p - 2.0);
                out.k = c.A * cn;
                out.w = amp * (am.cos == 0.0 ? 0.0 : sgn(am.cos) * std::pow(std::abs(am.cos), 2.0 - 2.0 / p));
                const double sn = am.sin;
                out.wdot = -amp * c.alpha * (2.0 - 2.0 / p) * sn *
                           std::sqrt(std::max(0.0, 1.0 - c.q * c.q * sn * sn));
            } else if constexpr (std::is_same_v<T, Orbitlike>) {
                const Amplitude am = amplitude_ext(2, p, c.alpha * s + c.beta, c.q);
                const double sa = std::abs(am.sin);
                const double ca = std::abs(am.cos);
                const double delta = sa < ca ? 1.0 - c.q * c.q * sa * sa
                                             : (1.0 - c.q) * (1.0 + c.q) + c.q * c.q * ca * ca;
                const double amp = signed_pow(c.A, p - 2.0);
                out.k = c.A * std::pow(delta, 1.0 / p);
                out.w = amp * std::pow(delta, 1.0 - 1.0 / p);
                out.wdot = -amp * c.alpha * (2.0 - 2.0 / p) * c.q * c.q * am.sin * am.cos;
            } else if constexpr (std::is_same_v<T, Borderline>) {
                const double A = a_pl(p, sol.lambda);
                loop(A, c.sign, A * s + c.beta);
            } else if constexpr (std::is_same_v<T, FlatCore>) {
                for (int j = 0; j < c.spec.N; ++j) {
                    const double x = c.A_pl * (s - c.spec.centers[j]);
                    if (std::abs(x) < kp1(p)) {
                        loop(c.A_pl, c.spec.signs[j], x);
                        break;
                    }
                }
            }
        },
        sol.cls);
    return out;
}

double initial_mismatch(const Solution& sol, const InitialData& data) {
    const CurvatureValue v = curvature_of(sol, 0.0);
    const double scale = std::max({1.0, std::abs(data.w0), std::abs(data.wdot0)});
    return std::max(std::abs(v.w - data.w0), std::abs(v.wdot - data.wdot0)) / scale;
}

RegularityReport regularity(double p, Family family, bool interior_zero) {
    RegularityReport r;
    r.family = family;
    r.constants = pparams(p);
    const double inf = std::numeric_limits<double>::infinity();
    if (family == Family::Wavelike) {
        const PParams& c = r.constants;
        if (!c.r_p) {
            if (c.m_p % 2 == 1) return r;  // odd integer: analytic
            r.analytic = false;
            r.sobolev_order = c.m_p + 2;
            r.sobolev_exponent = inf;
            r.exponent_attained = true;
            if (interior_zero) {
                r.fails_order = c.m_p + 3;
                r.fails_exponent = 1.0;
            }
            return r;
        }
        r.analytic = false;
        r.sobolev_order = c.m_p + 2;
        r.sobolev_exponent = *c.r_p;
        r.fails_order = c.m_p + 2;
        r.fails_exponent = *c.r_p;
        return r;
    }
    if (family == Family::FlatCore) {
        if (!(p > 2.0)) throw DomainError("flat-core solutions exist only for p > 2");
        const PParams& c = r.constants;
        r.analytic = false;
        r.sobolev_order = *c.M_p + 2;
        if (!c.R_p) {
            r.sobolev_exponent = inf;
            r.exponent_attained = true;
            if (interior_zero) {
                r.fails_order = *c.M_p + 3;
                r.fails_exponent = 1.0;
            }
        } else {
            r.sobolev_exponent = *c.R_p;
            r.fails_order = *c.M_p + 2;
            r.fails_exponent = *c.R_p;
        }
        return r;
    }
    if (family == Family::Borderline && p > 2.0)
        throw DomainError("borderline solutions exist only for p <= 2");
    return r;
}

}  // namespace pelastica
