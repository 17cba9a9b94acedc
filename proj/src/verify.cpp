#include "pelastica/verify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>
#include <variant>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <json.hpp>

namespace pelastica {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double sgn(double v) { return v < 0 ? -1.0 : (v > 0 ? 1.0 : 0.0); }

// |w|^{1/(p-1)} sign(w) and |w|^{(p+1)/(p-1)} sign(w), safe at w = 0.
double nonlinear_term(double p, double lambda, double w) {
    const double a = std::abs(w);
    return sgn(w) * ((p - 1.0) * std::pow(a, (p + 1.0) / (p - 1.0)) -
                     lambda * std::pow(a, 1.0 / (p - 1.0)));
}

double w_of_k(double p, double k) { return sgn(k) * std::pow(std::abs(k), p - 1.0); }

double uniform01(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

// Splits [a, b] at the interior breaks and sums the pieces.
double split_quadrature(const std::function<double(double)>& f, double a, double b, double tol,
                        const std::vector<double>& breaks) {
    std::vector<double> cuts{a};
    for (double c : breaks)
        if (c > a && c < b) cuts.push_back(c);
    cuts.push_back(b);
    std::sort(cuts.begin(), cuts.end());
    double sum = 0.0;
    for (size_t i = 0; i + 1 < cuts.size(); ++i) {
        const Singular s = cuts.size() > 2 ? Singular::Both : Singular::None;
        sum += oracle_quadrature(f, cuts[i], cuts[i + 1], tol, s);
    }
    return sum;
}

double simpson_weight(size_t i, size_t n);

// Normalising integrals of absolute values have kinks; three digits relative
// to a Simpson estimate are enough.
double loose_quadrature(const std::function<double(double)>& f, double a, double b,
                        const std::vector<double>& breaks) {
    constexpr int kRough = 400;
    double rough = 0.0;
    for (int i = 0; i <= kRough; ++i) rough += simpson_weight(i, kRough + 1) * f(a + (b - a) * i / kRough);
    rough *= (b - a) / kRough;
    return rough > 0.0 ? split_quadrature(f, a, b, 1e-3 * rough, breaks) : 0.0;
}

double simpson_weight(size_t i, size_t n) {
    // n samples, n - 1 intervals; odd interval counts fall back to a
    // trapezoid on the last interval.
    const size_t intervals = n - 1;
    const size_t simpson_end = intervals % 2 == 0 ? n - 1 : n - 2;
    double w = 0.0;
    if (i <= simpson_end) {
        if (i == 0 || i == simpson_end) w = 1.0 / 3.0;
        else w = (i % 2 == 1) ? 4.0 / 3.0 : 2.0 / 3.0;
    }
    if (intervals % 2 == 1 && i >= n - 2) w += 0.5;
    return w;
}

double uniform_spacing(const Trace& trace) {
    const auto& v = trace.samples;
    if (v.size() < 5) throw DomainError("trace needs at least 5 samples");
    const double h = (v.back().s - v.front().s) / static_cast<double>(v.size() - 1);
    for (size_t i = 1; i < v.size(); ++i)
        if (std::abs(v[i].s - v[i - 1].s - h) > 1e-9 * std::max(1.0, std::abs(h)))
            throw DomainError("trace samples must be uniformly spaced");
    return h;
}

}  // namespace

VerifyReport make_report(std::string name, double residual_norm, double tolerance,
                         std::map<std::string, double> metadata) {
    VerifyReport r;
    r.name = std::move(name);
    r.residual_norm = residual_norm;
    r.tolerance = tolerance;
    r.pass = residual_norm <= tolerance;
    r.metadata = std::move(metadata);
    return r;
}

std::string reports_json(const std::vector<VerifyReport>& reports) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& r : reports) {
        nlohmann::json j;
        j["name"] = r.name;
        j["residual_norm"] = r.residual_norm;
        j["tolerance"] = r.tolerance;
        j["pass"] = r.pass;
        nlohmann::json meta = nlohmann::json::object();
        for (const auto& [k, v] : r.metadata) meta[k] = std::isfinite(v) ? nlohmann::json(v) : nlohmann::json();
        j["metadata"] = meta;
        arr.push_back(j);
    }
    return arr.dump(2);
}

double TestFunction::value(double s) const {
    if (s <= a || s >= b) return 0.0;
    const double h2 = (b - a) * (b - a);
    const double u = 4.0 * (s - a) * (b - s) / h2;
    return u * u * u * u;
}

double TestFunction::d1(double s) const {
    if (s <= a || s >= b) return 0.0;
    const double h2 = (b - a) * (b - a);
    const double u = 4.0 * (s - a) * (b - s) / h2;
    const double du = 4.0 * (a + b - 2.0 * s) / h2;
    return 4.0 * u * u * u * du;
}

double TestFunction::d2(double s) const {
    if (s <= a || s >= b) return 0.0;
    const double h2 = (b - a) * (b - a);
    const double u = 4.0 * (s - a) * (b - s) / h2;
    const double du = 4.0 * (a + b - 2.0 * s) / h2;
    const double ddu = -8.0 / h2;
    return 12.0 * u * u * du * du + 4.0 * u * u * u * ddu;
}

std::vector<TestFunction> random_bumps(double lo, double hi, int count, std::uint64_t seed,
                                       double min_width) {
    if (!(hi > lo) || count < 0) throw DomainError("random_bumps needs lo < hi and count >= 0");
    const double span = hi - lo;
    const double pad = 0.01 * span;
    const double wmin = std::min(std::max(min_width, 0.05 * span), 0.9 * span);
    const double wmax = std::max(wmin, 0.5 * span);
    std::mt19937_64 rng(seed);
    std::vector<TestFunction> out;
    for (int i = 0; i < count; ++i) {
        const double width = wmin + (wmax - wmin) * uniform01(rng);
        const double room = std::max(0.0, span - 2.0 * pad - width);
        const double a = lo + pad + room * uniform01(rng);
        out.push_back({a, a + width});
    }
    return out;
}

double oracle_quadrature(const std::function<double(double)>& f, double a, double b, double tol,
                         Singular singular) {
    if (!(b > a)) return 0.0;
    const double h = b - a;
    // Distances to a singular end below a few ulps of it are not resolved by
    // x; that sliver is dropped.
    const double eps = std::numeric_limits<double>::epsilon();
    const double floor_a = a == 0.0 ? 0.0 : 64.0 * eps * std::abs(a);
    const double floor_b = b == 0.0 ? 0.0 : 64.0 * eps * std::abs(b);
    std::function<double(double)> g;
    switch (singular) {
        case Singular::None: g = f; break;
        case Singular::Left:
            g = [&](double t) {
                const double d = h * std::pow(t, 8.0);
                return d <= floor_a ? 0.0 : f(a + d) * 8.0 * h * std::pow(t, 7.0);
            };
            break;
        case Singular::Right:
            g = [&](double t) {
                const double d = h * std::pow(t, 8.0);
                return d <= floor_b ? 0.0 : f(b - d) * 8.0 * h * std::pow(t, 7.0);
            };
            break;
        case Singular::Both:
            g = [&](double t) {
                const double t4 = t * t * t * t;
                const double r = 1.0 - t;
                const double r4 = r * r * r * r;
                const double den = t4 + r4;
                const double x = a + h * t4 / den;
                // d/dt t^4/(t^4+r^4) = 4 t^3 r^3 / den^2
                const double jac = 4.0 * t * t * t * r * r * r / (den * den);
                return jac == 0.0 || x == a || x == b ? 0.0 : f(x) * h * jac;
            };
            break;
    }
    const double lo = singular == Singular::None ? a : 0.0;
    const double hi = singular == Singular::None ? b : 1.0;
    using GK = boost::math::quadrature::gauss_kronrod<double, 21>;
    // Asking for more relative accuracy than rounding allows makes the
    // library subdivide noise and inflate its estimate, so the relative
    // request is derived from tol and a coarse L1 and floored at 1e-13.
    double err = 0.0;
    double l1 = 0.0;
    GK::integrate(g, lo, hi, 0, 0.0, &err, &l1);
    const double rel = std::clamp(0.5 * tol / std::max(l1, 1e-300), 1e-13, 1e-3);
    const double v = GK::integrate(g, lo, hi, 15, rel, &err);
    if (!std::isfinite(v) || err > tol) {
        std::ostringstream os;
        os << "Gauss-Kronrod error estimate " << err << " exceeds " << tol << " on [" << a << ", "
           << b << "]";
        throw ToleranceError(os.str());
    }
    return v;
}

VerifyReport weak_residual(const KSampler& k, double p, double lambda,
                           const std::vector<TestFunction>& phis, double L,
                           const std::vector<double>& breaks, double tol) {
    double worst = 0.0;
    double worst_raw = 0.0;
    for (const auto& phi : phis) {
        if (!(phi.a > 0.0 && phi.b < L)) throw DomainError("test function support must lie in (0, L)");
        auto integrand = [&](double s) {
            const double kv = k(s);
            return p * w_of_k(p, kv) * phi.d2(s) +
                   (p - 1.0) * std::pow(std::abs(kv), p) * kv * phi.value(s) -
                   lambda * kv * phi.value(s);
        };
        auto scale_fn = [&](double s) {
            const double kv = std::abs(k(s));
            return p * std::pow(kv, p - 1.0) * std::abs(phi.d2(s)) +
                   (p - 1.0) * std::pow(kv, p + 1.0) * std::abs(phi.value(s)) +
                   std::abs(lambda) * kv * std::abs(phi.value(s));
        };
        const double scale = loose_quadrature(scale_fn, phi.a, phi.b, breaks);
        const double value = split_quadrature(integrand, phi.a, phi.b, 1e-11 * std::max(1.0, scale), breaks);
        const double rel = scale > 0.0 ? std::abs(value) / scale : std::abs(value);
        worst = std::max(worst, rel);
        worst_raw = std::max(worst_raw, std::abs(value));
    }
    return make_report("weak", worst, tol,
                       {{"p", p}, {"lambda", lambda}, {"L", L},
                        {"test_functions", static_cast<double>(phis.size())},
                        {"max_abs_integral", worst_raw}});
}

VerifyReport weak_residual(const Trace& trace, double p, double lambda,
                           const std::vector<TestFunction>& phis, double tol) {
    const double h = uniform_spacing(trace);
    const auto& v = trace.samples;
    double worst = 0.0;
    for (const auto& phi : phis) {
        double value = 0.0, scale = 0.0;
        for (size_t i = 0; i < v.size(); ++i) {
            const double wt = simpson_weight(i, v.size()) * h;
            const double s = v[i].s;
            const double kv = v[i].k;
            const double f0 = phi.value(s), f2 = phi.d2(s);
            value += wt * (p * w_of_k(p, kv) * f2 + (p - 1.0) * std::pow(std::abs(kv), p) * kv * f0 -
                           lambda * kv * f0);
            scale += wt * (p * std::pow(std::abs(kv), p - 1.0) * std::abs(f2) +
                           (p - 1.0) * std::pow(std::abs(kv), p + 1.0) * std::abs(f0) +
                           std::abs(lambda * kv * f0));
        }
        worst = std::max(worst, scale > 0.0 ? std::abs(value) / scale : std::abs(value));
    }
    return make_report("weak_sampled", worst, tol,
                       {{"p", p}, {"lambda", lambda}, {"h", h},
                        {"test_functions", static_cast<double>(phis.size())}});
}

std::vector<double> curvature_zeros(const Solution& sol, double a, double b) {
    std::vector<double> z;
    if (const auto* w = std::get_if<Wavelike>(&sol.cls)) {
        const double K = complete(IntegralKind::F1, sol.p, w->q);
        // alpha s + beta = (2m + 1) K
        const double m0 = std::ceil(((w->alpha * a + w->beta) / K - 1.0) / 2.0);
        for (double m = m0;; m += 1.0) {
            const double s = ((2.0 * m + 1.0) * K - w->beta) / w->alpha;
            if (s > b) break;
            if (s >= a) z.push_back(s);
        }
    } else if (const auto* f = std::get_if<FlatCore>(&sol.cls)) {
        for (double c : f->spec.centers)
            for (double s : {c - f->T_pl, c + f->T_pl})
                if (s >= a && s <= b) z.push_back(s);
        std::sort(z.begin(), z.end());
    }
    return z;
}

namespace {

double default_margin(const Solution& sol) {
    if (const auto* w = std::get_if<Wavelike>(&sol.cls))
        return 0.2 * complete(IntegralKind::F1, sol.p, w->q) / w->alpha;
    if (const auto* f = std::get_if<FlatCore>(&sol.cls)) return 0.2 * f->T_pl;
    return 0.0;
}

VerifyReport order_report(const std::string& name, double r_h, double r_h2, double scale,
                          double h, double p, double lambda, size_t points) {
    std::map<std::string, double> meta{{"p", p},
                                       {"lambda", lambda},
                                       {"h", h},
                                       {"residual_h", r_h},
                                       {"residual_h2", r_h2},
                                       {"points", static_cast<double>(points)}};
    if (points == 0) return make_report(name, kNaN, 0.3, meta);
    // Rounding in the stencil is about 4 eps |w| / h^2.
    if (r_h <= 1e-10 * scale) {
        meta["order"] = kNaN;
        return make_report(name, 0.0, 0.3, meta);
    }
    const double order = std::log2(r_h / r_h2);
    meta["order"] = order;
    return make_report(name, std::abs(order - 2.0), 0.3, meta);
}

}  // namespace

VerifyReport strong_residual(const Solution& sol, double a, double b, double h, double margin) {
    if (!(h > 0.0) || !(b - a > 2.0 * h)) throw DomainError("strong_residual needs 0 < 2h < b - a");
    if (margin < 0.0) margin = default_margin(sol);
    const double p = sol.p, lambda = sol.lambda;
    const auto zeros = curvature_zeros(sol, a - h, b + h);
    auto w = [&](double s) { return curvature_of(sol, s).w; };
    double r_h = 0.0, r_h2 = 0.0, scale = 1.0;
    size_t points = 0;
    const int n = static_cast<int>(std::floor((b - a) / h + 1e-9));
    for (int i = 1; i < n; ++i) {
        const double s = a + i * h;
        bool near = false;
        for (double z : zeros) near = near || std::abs(s - z) < margin + h;
        if (near) continue;
        const double w0 = w(s);
        const double fd_h = (w(s + h) - 2.0 * w0 + w(s - h)) / (h * h);
        const double hh = 0.5 * h;
        const double fd_h2 = (w(s + hh) - 2.0 * w0 + w(s - hh)) / (hh * hh);
        const double nl = nonlinear_term(p, lambda, w0);
        r_h = std::max(r_h, std::abs(p * fd_h + nl));
        r_h2 = std::max(r_h2, std::abs(p * fd_h2 + nl));
        scale = std::max(scale, std::abs(nl));
        ++points;
    }
    auto rep = order_report("strong", r_h, r_h2, scale, h, p, lambda, points);
    rep.metadata["margin"] = margin;
    return rep;
}

VerifyReport strong_residual(const Trace& trace, double p, double lambda, double margin) {
    const double dt = uniform_spacing(trace);
    const auto& v = trace.samples;
    const size_t n = v.size();
    // Samples within margin of a sign change or zero of k are skipped.
    std::vector<double> zeros;
    for (size_t i = 0; i < n; ++i) {
        if (v[i].k == 0.0) zeros.push_back(v[i].s);
        if (i + 1 < n && v[i].k * v[i + 1].k < 0.0) zeros.push_back(0.5 * (v[i].s + v[i + 1].s));
    }
    const double h = 2.0 * dt;
    std::vector<double> w(n);
    for (size_t i = 0; i < n; ++i) w[i] = w_of_k(p, v[i].k);
    double r_h = 0.0, r_h2 = 0.0, scale = 1.0;
    size_t points = 0;
    for (size_t i = 2; i + 2 < n; ++i) {
        bool near = false;
        for (double z : zeros) near = near || std::abs(v[i].s - z) < margin + h;
        if (near) continue;
        const double fd_h = (w[i + 2] - 2.0 * w[i] + w[i - 2]) / (h * h);
        const double fd_h2 = (w[i + 1] - 2.0 * w[i] + w[i - 1]) / (dt * dt);
        const double nl = nonlinear_term(p, lambda, w[i]);
        r_h = std::max(r_h, std::abs(p * fd_h + nl));
        r_h2 = std::max(r_h2, std::abs(p * fd_h2 + nl));
        scale = std::max(scale, std::abs(nl));
        ++points;
    }
    auto rep = order_report("strong_sampled", r_h, r_h2, scale, h, p, lambda, points);
    rep.metadata["margin"] = margin;
    return rep;
}

VerifyReport conservation_drift(const Solution& sol, double a, double b, int n, double tol) {
    if (n < 2 || !(b > a)) throw DomainError("conservation_drift needs a < b and n >= 2");
    const Potential pot{sol.p, sol.lambda};
    auto H = [&](double s) {
        const auto c = curvature_of(sol, s);
        return sol.p * sol.p * c.wdot * c.wdot + potential_eval(pot, c.w).F;
    };
    const double D0 = H(0.0);
    double lo = D0, hi = D0;
    for (int i = 0; i < n; ++i) {
        const double h = H(a + (b - a) * i / (n - 1));
        lo = std::min(lo, h);
        hi = std::max(hi, h);
    }
    return make_report("conserve", (hi - lo) / (1.0 + std::abs(D0)), tol,
                       {{"p", sol.p}, {"lambda", sol.lambda}, {"D0", D0},
                        {"h", (b - a) / (n - 1)}});
}

std::vector<Perturbation> random_perturbations(double lo, double hi, int count,
                                               std::uint64_t seed) {
    const auto bumps = random_bumps(lo, hi, count, seed);
    std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ULL);
    std::vector<Perturbation> out;
    for (const auto& b : bumps) {
        const double angle = 2.0 * std::numbers::pi * uniform01(rng);
        out.push_back({b, std::cos(angle), std::sin(angle)});
    }
    return out;
}

VerifyReport first_variation(const CurveFn& curve, double p, double lambda,
                             const std::vector<Perturbation>& etas, double scale, double tol) {
    double worst_q = 0.0, worst_fd = 0.0, worst_mismatch = 0.0, worst_richardson = 0.0;
    const double eps = 1e-5 * scale;
    for (const auto& eta : etas) {
        const auto& phi = eta.phi;
        auto analytic = [&](double s) {
            const auto c = curve(s);
            const double et = eta.ex * std::cos(c.theta) + eta.ey * std::sin(c.theta);
            const double en = -eta.ex * std::sin(c.theta) + eta.ey * std::cos(c.theta);
            const double ak = std::abs(c.k);
            return (1.0 - 2.0 * p) * std::pow(ak, p) * phi.d1(s) * et +
                   p * w_of_k(p, c.k) * phi.d2(s) * en + lambda * phi.d1(s) * et;
        };
        auto norm = [&](double s) {
            const auto c = curve(s);
            const double ak = std::abs(c.k);
            return (2.0 * p - 1.0) * std::pow(ak, p) * std::abs(phi.d1(s)) +
                   p * std::pow(ak, p - 1.0) * std::abs(phi.d2(s)) + std::abs(lambda * phi.d1(s));
        };
        // Energy density of gamma + e eta in the original parameter:
        // |g' x g''|^p / |g'|^{3p-1} + lambda |g'|.
        auto density = [&](const CurveSample& c, double s, double e) {
            const double tx = std::cos(c.theta) + e * phi.d1(s) * eta.ex;
            const double ty = std::sin(c.theta) + e * phi.d1(s) * eta.ey;
            const double nx = -c.k * std::sin(c.theta) + e * phi.d2(s) * eta.ex;
            const double ny = c.k * std::cos(c.theta) + e * phi.d2(s) * eta.ey;
            const double speed = std::hypot(tx, ty);
            const double cross = std::abs(tx * ny - ty * nx);
            return std::pow(cross, p) / std::pow(speed, 3.0 * p - 1.0) + lambda * speed;
        };
        double n = loose_quadrature(norm, phi.a, phi.b, {});
        if (!(n > 0.0)) n = 1.0;
        // Differencing at eps leaves about 1e-11 relative noise per node.
        auto central = [&](double e) {
            return oracle_quadrature(
                [&](double s) {
                    const auto c = curve(s);
                    return (density(c, s, e) - density(c, s, -e)) / (2.0 * e);
                },
                phi.a, phi.b, 1e-8 * n);
        };
        const double q = oracle_quadrature(analytic, phi.a, phi.b, 1e-10 * n);
        const double d1 = central(eps);
        const double d2 = central(0.5 * eps);
        const double fd = (4.0 * d2 - d1) / 3.0;
        worst_q = std::max(worst_q, std::abs(q) / n);
        worst_fd = std::max(worst_fd, std::abs(fd) / n);
        worst_mismatch = std::max(worst_mismatch, std::abs(q - fd) / n);
        worst_richardson = std::max(worst_richardson, std::abs(d1 - d2) / n);
    }
    return make_report("variation", std::max(worst_q, worst_fd), tol,
                       {{"p", p},
                        {"lambda", lambda},
                        {"eps", eps},
                        {"quadrature", worst_q},
                        {"finite_difference", worst_fd},
                        {"route_mismatch", worst_mismatch},
                        {"richardson_change", worst_richardson},
                        {"perturbations", static_cast<double>(etas.size())}});
}

ExponentFit exponent_probe(const KSampler& k, double s0, int side, double window) {
    if (side != 1 && side != -1) throw DomainError("probe side must be +1 or -1");
    if (!(window > 0.0)) throw DomainError("probe window must be positive");
    constexpr int kLadder = 12;
    constexpr int kDropped = 2;
    ExponentFit fit;
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const int m = kLadder - kDropped;
    for (int j = 0; j < m; ++j) {
        const double d = window * std::ldexp(1.0, -j);
        const double v = std::abs(k(s0 + side * d));
        if (!(v > 0.0) || !std::isfinite(v) || v < std::numeric_limits<double>::min())
            throw FitError("exponent probe sample underflowed or is not finite");
        fit.distances.push_back(d);
        fit.values.push_back(v);
        const double x = std::log(d), y = std::log(v);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    const double slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
    const double icept = (sy - slope * sx) / m;
    double ss = 0.0;
    for (int j = 0; j < m; ++j) {
        const double r = std::log(fit.values[j]) - icept - slope * std::log(fit.distances[j]);
        ss += r * r;
    }
    fit.exponent = slope;
    fit.residual = std::sqrt(ss / m);
    return fit;
}

}  // namespace pelastica
