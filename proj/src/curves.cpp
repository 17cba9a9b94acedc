#include "pelastica/curves.hpp"

#include <cmath>
#include <numbers>

namespace pelastica {
namespace {

constexpr double kPi = std::numbers::pi;

double sgn(double v) { return v < 0 ? -1.0 : 1.0; }

void check_modulus(double q) {
    if (!(q > 0.0 && q < 1.0)) throw DomainError("modulus must lie in (0, 1) for this family");
}

void check_samples(int n) {
    if (n < 2) throw DomainError("need at least 2 samples");
}

double grid(double a, double b, int i, int n) {
    if (i == n - 1) return b;
    return a + (b - a) * static_cast<double>(i) / static_cast<double>(n - 1);
}

// Dilate by 1/scale, optionally reflect across the x-axis, relabel s.
CurveSample similar(const CurveSample& c, double scale, double sign, double s) {
    CurveSample out;
    out.s = s;
    out.x = c.x / scale;
    out.y = sign * c.y / scale;
    out.theta = sign * c.theta;
    out.k = sign * c.k * scale;
    return out;
}

// gamma_b^{sigma}(t) for |t| <= K_p(1) (any t when p <= 2).
CurveSample loop_point(double p, double sigma, double t) {
    const Amplitude a = amplitude_ext(1, p, t, 1.0);
    const double c = std::abs(a.cos);
    CurveSample out;
    out.s = t;
    out.x = 2.0 * tanh(p, t) - t;
    out.y = -sigma * p / (p - 1.0) * std::pow(c, 2.0 - 2.0 / p);
    out.theta = sigma * 2.0 * a.angle;
    out.k = sigma * 2.0 * std::pow(c, 2.0 / p);
    return out;
}

}  // namespace

CurveSample canonical_point(Family family, double p, double q, double s) {
    if (!std::isfinite(p) || !(p > 1.0)) throw DomainError("p must be a finite real > 1");
    CurveSample c;
    c.s = s;
    switch (family) {
        case Family::Linear:
            c.x = s;
            break;
        case Family::Circular:
            c.x = std::cos(s);
            c.y = std::sin(s);
            c.theta = s + kPi / 2;
            c.k = 1.0;
            break;
        case Family::Wavelike: {
            check_modulus(q);
            const Amplitude a = amplitude_ext(1, p, s, q);
            const double ac = std::abs(a.cos);
            const double sc = a.cos == 0.0 ? 0.0 : sgn(a.cos);
            c.x = 2.0 * integral(IntegralKind::E1, p, a.angle, q) - s;
            c.y = -q * p / (p - 1.0) * sc * std::pow(ac, 2.0 - 2.0 / p);
            c.theta = 2.0 * std::asin(q * a.sin);
            c.k = 2.0 * q * sc * std::pow(ac, 2.0 / p);
            break;
        }
        case Family::Borderline:
            c = loop_point(p, 1.0, s);
            break;
        case Family::Orbitlike: {
            check_modulus(q);
            const Amplitude a = amplitude_ext(2, p, s, q);
            const double sa = std::abs(a.sin);
            const double ca = std::abs(a.cos);
            const double delta = sa < ca ? 1.0 - q * q * sa * sa : (1.0 - q) * (1.0 + q) + q * q * ca * ca;
            const double q2 = q * q;
            c.x = (2.0 * integral(IntegralKind::E2, p / (p - 1.0), a.angle, q) + (q2 - 2.0) * s) / q2;
            c.y = -p / ((p - 1.0) * q2) * std::pow(delta, 1.0 - 1.0 / p);
            c.theta = 2.0 * a.angle;
            c.k = 2.0 * std::pow(delta, 1.0 / p);
            break;
        }
        case Family::FlatCore:
            throw DomainError("flat-core curves are traced from a spec");
    }
    return c;
}

Trace trace_family(Family family, double p, double q, double a, double b, int n) {
    check_samples(n);
    if (family == Family::Borderline && p > 2.0)
        throw DomainError("borderline family needs p <= 2; use loop_arc or flatcore for p > 2");
    Trace t;
    t.family = family;
    t.p = p;
    t.q = q;
    t.samples.reserve(n);
    for (int i = 0; i < n; ++i) t.samples.push_back(canonical_point(family, p, q, grid(a, b, i, n)));
    return t;
}

FlatCoreProfile::FlatCoreProfile(double p, FlatCoreSpec spec) : p_(p), spec_(std::move(spec)) {
    if (!(p > 2.0)) throw DomainError("flat-core curves need p > 2");
    validate(spec_);
    K_ = kp1(p);
    E_ = complete(IntegralKind::E1, p, 1.0);
    double acc = 0.0;
    for (int j = 0; j < spec_.N; ++j) {
        starts_.push_back(acc);
        centers_.push_back(acc + spec_.lengths[j] + K_);
        acc += spec_.lengths[j] + 2.0 * K_;
    }
    length_ = acc;
}

CurveSample FlatCoreProfile::at(double u) const {
    CurveSample out;
    out.s = u;
    out.theta = kPi;
    if (u <= 0.0) {
        out.x = -u;
        return out;
    }
    double px = 0.0;
    double theta0 = kPi;
    const double loop_dx = 4.0 * E_ - 2.0 * K_;
    for (int j = 0; j < spec_.N; ++j) {
        const double L = spec_.lengths[j];
        const double seg_end = starts_[j] + L;
        if (u <= seg_end) {
            out.x = px - (u - starts_[j]);
            out.theta = theta0;
            return out;
        }
        px -= L;
        const double sigma = spec_.signs[j];
        if (u < seg_end + 2.0 * K_) {
            const double t = u - seg_end - K_;
            const CurveSample b = loop_point(p_, sigma, t);
            // gamma_b(-K) = (K - 2E, 0)
            out.x = px + b.x - (K_ - 2.0 * E_);
            out.y = b.y;
            out.theta = theta0 + b.theta + sigma * kPi;
            out.k = b.k;
            return out;
        }
        px += loop_dx;
        theta0 += 2.0 * sigma * kPi;
    }
    out.x = px - (u - length_);
    out.theta = theta0;
    return out;
}

CurveSample solution_point(const Solution& sol, double s) {
    const double p = sol.p;
    return std::visit(
        [&](const auto& c) -> CurveSample {
            using T = std::decay_t<decltype(c)>;
            if constexpr (std::is_same_v<T, Linear>) {
                return similar(canonical_point(Family::Linear, p, 0.0, s), 1.0, 1.0, s);
            } else if constexpr (std::is_same_v<T, Circular>) {
                const double r = std::abs(c.k0);
                return similar(canonical_point(Family::Circular, p, 0.0, r * s), r, sgn(c.k0), s);
            } else if constexpr (std::is_same_v<T, Wavelike>) {
                const auto cs = canonical_point(Family::Wavelike, p, c.q, c.alpha * s + c.beta);
                return similar(cs, c.alpha, sgn(c.A), s);
            } else if constexpr (std::is_same_v<T, Orbitlike>) {
                const auto cs = canonical_point(Family::Orbitlike, p, c.q, c.alpha * s + c.beta);
                return similar(cs, c.alpha, sgn(c.A), s);
            } else if constexpr (std::is_same_v<T, Borderline>) {
                const double A = a_pl(p, sol.lambda);
                return similar(loop_point(p, 1.0, A * s + c.beta), A, c.sign, s);
            } else {
                // Unit-scale profile with lengths A L_j; loop 1 of the profile
                // sits at arclength A (s - s_1) + A L_1 + K.
                FlatCoreSpec unit = c.spec;
                for (double& L : unit.lengths) L *= c.A_pl;
                unit.centers.clear();
                const FlatCoreProfile prof(p, unit);
                const double u = c.A_pl * (s - c.spec.centers[0]) + prof.center(0);
                return similar(prof.at(u), c.A_pl, 1.0, s);
            }
        },
        sol.cls);
}

Trace trace_solution(const Solution& sol, double a, double b, int n) {
    check_samples(n);
    Trace t;
    t.family = sol.family();
    t.p = sol.p;
    if (const auto* w = std::get_if<Wavelike>(&sol.cls)) t.q = w->q;
    if (const auto* o = std::get_if<Orbitlike>(&sol.cls)) t.q = o->q;
    t.samples.reserve(n);
    for (int i = 0; i < n; ++i) t.samples.push_back(solution_point(sol, grid(a, b, i, n)));
    return t;
}

Trace loop_arc(double p, int sign, int n, double window) {
    check_samples(n);
    if (sign != 1 && sign != -1) throw DomainError("loop sign must be +1 or -1");
    double half = window;
    if (p > 2.0) {
        const double K = kp1(p);
        half = window > 0.0 ? std::min(window, K) : K;
    } else if (!(window > 0.0)) {
        throw DomainError("p <= 2 loops are infinite; give a finite window");
    }
    Trace t;
    t.family = p > 2.0 ? Family::FlatCore : Family::Borderline;
    t.p = p;
    t.q = 1.0;
    for (int i = 0; i < n; ++i) t.samples.push_back(loop_point(p, sign, grid(-half, half, i, n)));
    return t;
}

Trace concat(const std::vector<Trace>& traces) {
    Trace out;
    bool first = true;
    double s_off = 0.0;
    for (const Trace& tr : traces) {
        if (tr.samples.empty()) continue;
        const CurveSample& head = tr.samples.front();
        if (first) {
            out.family = tr.family;
            out.p = tr.p;
            out.q = tr.q;
            for (const auto& c : tr.samples) {
                CurveSample d = c;
                d.s = c.s - head.s;
                out.samples.push_back(d);
            }
            first = false;
            continue;
        }
        const CurveSample& tail = out.samples.back();
        s_off = tail.s;
        const double dx = tail.x - head.x;
        const double dy = tail.y - head.y;
        const double dtheta = 2.0 * kPi * std::round((tail.theta - head.theta) / (2.0 * kPi));
        for (size_t i = 0; i < tr.samples.size(); ++i) {
            const CurveSample& c = tr.samples[i];
            if (i == 0) continue;  // coincides with the previous tail
            CurveSample d = c;
            d.s = s_off + (c.s - head.s);
            d.x = c.x + dx;
            d.y = c.y + dy;
            d.theta = c.theta + dtheta;
            out.samples.push_back(d);
        }
    }
    return out;
}

Trace trace_flatcore(double p, const FlatCoreSpec& spec, int n) {
    check_samples(n);
    const FlatCoreProfile prof(p, spec);
    Trace t;
    t.family = Family::FlatCore;
    t.p = p;
    t.q = 1.0;
    t.samples.reserve(n);
    for (int i = 0; i < n; ++i) t.samples.push_back(prof.at(grid(0.0, prof.length(), i, n)));
    return t;
}

double Qp(double p, double q) {
    if (q == 1.0) return p <= 2.0 ? -1.0 : -1.0 / (p - 1.0);
    return 2.0 * complete(IntegralKind::E1, p, q) / complete(IntegralKind::F1, p, q) - 1.0;
}

double qstar(double p) {
    double lo = 0.0;
    double hi = 1.0;
    while (hi - lo > 1e-16) {
        const double mid = 0.5 * (lo + hi);
        if (mid == lo || mid == hi) break;
        if (Qp(p, mid) > 0.0) lo = mid;
        else hi = mid;
    }
    const double q = 0.5 * (lo + hi);
    if (std::abs(Qp(p, q)) > 1e-10) throw ToleranceError("q* bisection did not reach |Q_p| <= 1e-10");
    return q;
}

Trace figure_eight(double p, int N, double s0, int n) {
    if (N < 1) throw DomainError("figure-eight needs N >= 1");
    check_samples(n);
    const double q = qstar(p);
    const double L = 4.0 * N * complete(IntegralKind::F1, p, q);
    Trace t;
    t.family = Family::Wavelike;
    t.p = p;
    t.q = q;
    t.s0 = s0;
    t.samples.reserve(n);
    for (int i = 0; i < n; ++i) {
        const double s = grid(0.0, L, i, n);
        CurveSample c = canonical_point(Family::Wavelike, p, q, s + s0);
        c.s = s;
        t.samples.push_back(c);
    }
    return t;
}

double X2p(double p, double q) {
    check_modulus(q);
    const double q2 = q * q;
    return (2.0 / q2) * complete(IntegralKind::E2, p / (p - 1.0), q) +
           (1.0 - 2.0 / q2) * complete(IntegralKind::F2, p, q);
}

ClosedCurveReport closure_between(const CurveSample& a, const CurveSample& b) {
    ClosedCurveReport r;
    r.position_gap = std::hypot(b.x - a.x, b.y - a.y);
    r.tangent_gap = std::hypot(std::cos(b.theta) - std::cos(a.theta), std::sin(b.theta) - std::sin(a.theta));
    r.turning_number = static_cast<int>(std::lround((b.theta - a.theta) / (2.0 * kPi)));
    return r;
}

ClosedCurveReport closure_check(const Trace& trace) {
    if (trace.samples.empty()) throw DomainError("closure check needs a nonempty trace");
    return closure_between(trace.samples.front(), trace.samples.back());
}

}  // namespace pelastica
