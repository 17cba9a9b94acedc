#include "pelastica/elliptic.hpp"

#include <array>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <sstream>
#include <tuple>

#include <boost/math/quadrature/tanh_sinh.hpp>

#include "roots.hpp"

namespace pelastica {
namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kHalfPi = kPi / 2;
constexpr double kQuarterPi = kPi / 4;
constexpr double kInf = std::numeric_limits<double>::infinity();

void check_p(double p) {
    if (!std::isfinite(p) || !(p > 1.0)) throw DomainError("p must be a finite real > 1");
}

void check_q(double q) {
    if (!(q >= 0.0 && q <= 1.0)) throw DomainError("modulus q must lie in [0, 1]");
}

void check_x(double x) {
    if (!std::isfinite(x)) throw DomainError("argument must be finite");
}

bool first_kind(IntegralKind k) { return k == IntegralKind::F1 || k == IntegralKind::F2; }

double sgn(double v) { return v < 0 ? -1.0 : 1.0; }

template <class F>
double ts_integrate(F f, double a, double b, const Tolerances& tol) {
    if (!(b > a)) return 0.0;
    thread_local boost::math::quadrature::tanh_sinh<double> ts;
    double err = 0.0;
    double l1 = 0.0;
    // Map to [0, 1]: the library's error estimate degrades on short intervals.
    const double h = b - a;
    auto g = [&](double v) {
        const double x = a + h * v;
        const double r = f(x);
        // Nodes that round onto an integrable endpoint singularity carry no weight.
        if (!std::isfinite(r) && (v < 1e-20 || x == a || x == b)) return 0.0;
        return r;
    };
    double v = h * ts.integrate(g, 0.0, 1.0, tol.integral * 1e-2, &err, &l1);
    err *= h;
    l1 *= h;
    // err is the difference between the last two levels; the error of the
    // returned level is roughly its square, and the estimate itself bottoms
    // out at rounding noise well above tol for singular integrands.
    if (!std::isfinite(v) || err > std::sqrt(tol.integral) * std::max(1.0, l1)) {
        std::ostringstream os;
        os << "tanh-sinh did not converge on [" << a << ", " << b << "], error estimate " << err;
        throw ToleranceError(os.str());
    }
    return v;
}

// The four integrands written in s = |sin theta|, c = |cos theta| so callers
// can pass whichever pair they computed accurately.
struct Integrand {
    IntegralKind kind;
    double p;
    double q;

    double delta(double s, double c) const {
        if (s < c) return 1.0 - q * q * s * s;
        return (1.0 - q) * (1.0 + q) + q * q * c * c;
    }

    double operator()(double s, double c) const {
        const double d = delta(s, c);
        switch (kind) {
            case IntegralKind::F1: return std::pow(c, 1.0 - 2.0 / p) / std::sqrt(d);
            case IntegralKind::F2: return std::pow(d, -1.0 / p);
            case IntegralKind::E1: return std::sqrt(d) * std::pow(c, 1.0 - 2.0 / p);
            case IntegralKind::E2: return std::pow(d, 1.0 / p);
        }
        return 0.0;
    }
};

// log(u / sin u), accurate for small u.
double log_u_over_sin(double u) {
    if (u < 1e-2) {
        const double u2 = u * u;
        return u2 * (1.0 / 6.0 + u2 * (1.0 / 180.0 + u2 / 2835.0));
    }
    return std::log(u / std::sin(u));
}

// sin^{-2/p} u - u^{-2/p}: the bounded remainder once the power singularity
// of the q = 1 first-kind integrand is split off.
double q1_remainder(double p, double u) {
    if (u < 1e-2) {
        // u^{2-2/p} * expm1(r u^2) / u^2 with r u^2 = (2/p) log(u / sin u)
        const double u2 = u * u;
        const double r = (2.0 / p) * (1.0 / 6.0 + u2 * (1.0 / 180.0 + u2 / 2835.0));
        const double x = r * u2;
        const double factor = x < 1e-8 ? r * (1.0 + 0.5 * x) : std::expm1(x) / u2;
        return std::pow(u, 2.0 - 2.0 / p) * factor;
    }
    return std::pow(u, -2.0 / p) * std::expm1((2.0 / p) * log_u_over_sin(u));
}

// int_ell^{pi/4} u^{-2/p} du
double q1_power_tail(double p, double ell) {
    const double e = 1.0 - 2.0 / p;
    const double lg = std::log(kQuarterPi / ell);
    if (e == 0.0) return lg;
    return std::pow(ell, e) * std::expm1(e * lg) / e;
}

// Per (kind, p, q) constants that every evaluation needs.
struct Constants {
    double full = 0.0;       // complete value, may be +inf
    double f_quarter = 0.0;  // q = 1 first kind: value at pi/4
    double h_quarter = 0.0;  // q = 1 first kind: int_0^{pi/4} remainder
};

using Key = std::tuple<int, double, double>;

template <class T>
class Cache {
public:
    template <class Build>
    std::shared_ptr<const T> get(const Key& key, Build build) {
        {
            std::lock_guard<std::mutex> lock(mutex_);
            auto it = map_.find(key);
            if (it != map_.end()) return it->second;
        }
        auto value = std::make_shared<const T>(build());
        std::lock_guard<std::mutex> lock(mutex_);
        if (map_.size() > 4096) map_.clear();
        return map_.emplace(key, value).first->second;
    }

private:
    std::mutex mutex_;
    std::map<Key, std::shared_ptr<const T>> map_;
};

double direct_part(const Integrand& f, double b, const Tolerances& tol) {
    return ts_integrate([&](double t) { return f(std::sin(t), std::cos(t)); }, 0.0, b, tol);
}

// int_0^ell of the integrand at theta = pi/2 - u.
double complement_part(const Integrand& f, double ell, const Tolerances& tol) {
    if (!(ell > 0.0)) return 0.0;
    if (first_kind(f.kind) && f.q >= 0.9 && f.q < 1.0) {
        // u = eps sinh t resolves the peak of width eps = sqrt(1-q^2)/q at u = 0.
        const double eps = std::sqrt((1.0 - f.q) * (1.0 + f.q)) / f.q;
        auto g = [&](double t) {
            const double u = eps * std::sinh(t);
            return f(std::cos(u), std::sin(u)) * eps * std::cosh(t);
        };
        return ts_integrate(g, 0.0, std::asinh(ell / eps), tol);
    }
    return ts_integrate([&](double u) { return f(std::cos(u), std::sin(u)); }, 0.0, ell, tol);
}

double q1_remainder_integral(double p, double ell, const Tolerances& tol) {
    return ts_integrate([p](double u) { return q1_remainder(p, u); }, 0.0, ell, tol);
}

Cache<Constants>& constants_cache() {
    static Cache<Constants> cache;
    return cache;
}

std::shared_ptr<const Constants> constants(IntegralKind kind, double p, double q,
                                           const Tolerances& tol) {
    return constants_cache().get(Key{static_cast<int>(kind), p, q}, [&] {
        Constants c;
        const Integrand f{kind, p, q};
        if (q == 1.0) {
            switch (kind) {
                case IntegralKind::F1:
                case IntegralKind::F2:
                    c.full = p > 2.0 ? cos_power_integral(-2.0 / p) : kInf;
                    c.f_quarter = direct_part(f, kQuarterPi, tol);
                    c.h_quarter = q1_remainder_integral(p, kQuarterPi, tol);
                    break;
                case IntegralKind::E1: c.full = cos_power_integral(2.0 - 2.0 / p); break;
                case IntegralKind::E2: c.full = cos_power_integral(2.0 / p); break;
            }
        } else if (q == 0.0) {
            const bool trivial = kind == IntegralKind::F2 || kind == IntegralKind::E2;
            c.full = trivial ? kHalfPi : cos_power_integral(1.0 - 2.0 / p);
        } else {
            c.full = direct_part(f, kQuarterPi, tol) + complement_part(f, kQuarterPi, tol);
        }
        return c;
    });
}

// K - F(pi/2 - ell), finite complete value only.
double tail(IntegralKind kind, double p, double q, double ell, const Tolerances& tol) {
    if (!(ell > 0.0)) return 0.0;
    if (q == 1.0 && first_kind(kind)) {
        const double e = 1.0 - 2.0 / p;
        return std::pow(ell, e) / e + q1_remainder_integral(p, ell, tol);
    }
    return complement_part(Integrand{kind, p, q}, ell, tol);
}

// Integral over [0, b] with b in [0, pi/2]; ell = pi/2 - b is passed
// separately because it is the accurate variable near the quarter period.
double quarter(IntegralKind kind, double p, double q, double b, double ell,
               const Tolerances& tol) {
    if (!(b > 0.0)) return 0.0;
    const Integrand f{kind, p, q};
    if (q == 0.0 && (kind == IntegralKind::F2 || kind == IntegralKind::E2)) return b;
    if (b <= kQuarterPi) return direct_part(f, b, tol);
    auto c = constants(kind, p, q, tol);
    if (!(ell > 0.0)) return c->full;
    if (q == 1.0 && first_kind(kind) && p <= 2.0)
        return c->f_quarter + q1_power_tail(p, ell) + c->h_quarter -
               q1_remainder_integral(p, ell, tol);
    return c->full - tail(kind, p, q, ell, tol);
}

// Quarter-period seed table: F at equally spaced amplitudes.
struct SeedTable {
    static constexpr int kNodes = 16;
    double top = kHalfPi;
    std::array<double, kNodes + 1> value{};
};

Cache<SeedTable>& seed_cache() {
    static Cache<SeedTable> cache;
    return cache;
}

std::shared_ptr<const SeedTable> seed_table(IntegralKind kind, double p, double q,
                                            const Tolerances& tol) {
    return seed_cache().get(Key{static_cast<int>(kind), p, q}, [&] {
        SeedTable t;
        t.top = (q == 1.0 && p <= 2.0) ? kQuarterPi : kHalfPi;
        for (int j = 0; j <= SeedTable::kNodes; ++j) {
            const double b = t.top * j / SeedTable::kNodes;
            const double ell = j == SeedTable::kNodes && t.top == kHalfPi ? 0.0 : kHalfPi - b;
            t.value[j] = quarter(kind, p, q, b, ell, tol);
        }
        return t;
    });
}

struct Quarter {
    double b = 0.0;    // amplitude in [0, pi/2]
    double ell = kHalfPi;  // pi/2 - b
};

Quarter make_quarter(double b) { return {b, kHalfPi - b}; }

// Solve F(b) = y for b in [0, top] using the seed table. Above pi/4 the
// solve runs on log(ell) against d = K - y so that ell keeps full relative
// accuracy near the quarter period.
Quarter invert_on_table(IntegralKind kind, double p, double q, double y, double d,
                        const Tolerances& tol) {
    auto table = seed_table(kind, p, q, tol);
    const auto& v = table->value;
    const double h = table->top / SeedTable::kNodes;
    int j = 0;
    while (j < SeedTable::kNodes - 1 && v[j + 1] <= y) ++j;
    if (y == v[j]) return make_quarter(h * j);
    const bool top_node = j + 1 == SeedTable::kNodes && table->top == kHalfPi;
    if (y == v[j + 1]) return top_node ? Quarter{kHalfPi, 0.0} : make_quarter(h * (j + 1));
    const double lo = h * j;
    const double hi = h * (j + 1);
    const double seed = lo + h * (y - v[j]) / (v[j + 1] - v[j]);
    const Integrand f{kind, p, q};
    if (hi <= kQuarterPi || table->top != kHalfPi) {
        auto g = [&](double b) { return quarter(kind, p, q, b, kHalfPi - b, tol) - y; };
        auto dg = [&](double b) { return f(std::sin(b), std::cos(b)); };
        return make_quarter(detail::solve_increasing(g, dg, lo, hi, seed, tol.inversion * 1e-2));
    }
    if (!(d > 0.0)) return {kHalfPi, 0.0};
    const double t_min = std::log(1e-300);
    if (tail(kind, p, q, 1e-300, tol) >= d) return {kHalfPi, 0.0};
    const double t_lo = top_node ? t_min : std::log(kHalfPi - hi);
    const double t_hi = std::log(kHalfPi - lo);
    const double t_seed = std::min(std::max(std::log(kHalfPi - seed), t_lo), t_hi);
    // log(tail) is close to linear in log(ell) near the quarter period.
    const double log_d = std::log(d);
    double last_t = kInf, last_tail = 0.0;
    auto tail_at = [&](double t) {
        if (t != last_t) {
            last_t = t;
            last_tail = tail(kind, p, q, std::exp(t), tol);
        }
        return last_tail;
    };
    auto g = [&](double t) { return std::log(tail_at(t)) - log_d; };
    auto dg = [&](double t) {
        const double ell = std::exp(t);
        return ell * f(std::cos(ell), std::sin(ell)) / tail_at(t);
    };
    const double t = detail::solve_increasing(g, dg, t_lo, t_hi, t_seed, tol.inversion * 1e-2);
    const double ell = std::exp(t);
    return {kHalfPi - ell, ell};
}

// q = 1, p <= 2, first kind, y beyond F(pi/4): solve in t = log(ell).
Quarter invert_saturating(IntegralKind kind, double p, double y, const Tolerances& tol) {
    auto c = constants(kind, p, 1.0, tol);
    auto value = [&](double ell) {
        return c->f_quarter + q1_power_tail(p, ell) + c->h_quarter -
               q1_remainder_integral(p, ell, tol);
    };
    const double t_min = std::log(1e-300);
    if (value(1e-300) < y) return {kHalfPi, 0.0};
    // Seed from the pure power part.
    const double e = 1.0 - 2.0 / p;
    const double excess = y - c->f_quarter;
    double seed = e == 0.0 ? std::log(kQuarterPi) - excess
                           : std::log(std::pow(kQuarterPi, e) - e * excess) / e;
    const double t_max = std::log(kQuarterPi);
    seed = std::min(std::max(seed, t_min), t_max);
    // g increasing in t after the sign flip.
    auto g = [&](double t) { return y - value(std::exp(t)); };
    auto dg = [&](double t) {
        const double ell = std::exp(t);
        return ell * std::pow(std::sin(ell), -2.0 / p);
    };
    const double t = detail::solve_increasing(g, dg, t_min, t_max, seed, tol.inversion * 1e-2);
    const double ell = std::exp(t);
    return {kHalfPi - ell, ell};
}

Amplitude assemble(double n, double sign_r, const Quarter& qt) {
    const double cb = qt.b <= kQuarterPi ? std::cos(qt.b) : std::sin(qt.ell);
    const double sb = qt.b <= kQuarterPi ? std::sin(qt.b) : std::cos(qt.ell);
    const double parity = std::fmod(std::abs(n), 2.0) == 1.0 ? -1.0 : 1.0;
    Amplitude a;
    a.angle = n * kPi + sign_r * qt.b;
    a.cos = parity * cb;
    a.sin = parity * sign_r * sb;
    return a;
}

}  // namespace

std::string to_string(IntegralKind kind) {
    switch (kind) {
        case IntegralKind::F1: return "F1";
        case IntegralKind::F2: return "F2";
        case IntegralKind::E1: return "E1";
        case IntegralKind::E2: return "E2";
    }
    return "?";
}

IntegralKind integral_kind_from_string(const std::string& name) {
    if (name == "F1") return IntegralKind::F1;
    if (name == "F2") return IntegralKind::F2;
    if (name == "E1") return IntegralKind::E1;
    if (name == "E2") return IntegralKind::E2;
    throw DomainError("unknown integral kind: " + name);
}

const Tolerances& default_tolerances() {
    static const Tolerances tol = [] {
        Tolerances t;
        if (const char* env = std::getenv("PELASTICA_TOL")) {
            std::string s(env);
            try {
                const auto comma = s.find(',');
                t.integral = std::stod(s.substr(0, comma));
                if (comma != std::string::npos) t.inversion = std::stod(s.substr(comma + 1));
                else t.inversion = 10.0 * t.integral;
            } catch (const std::exception&) {
                t = Tolerances{};
            }
            if (!(t.integral > 0.0) || !(t.inversion > 0.0)) t = Tolerances{};
        }
        return t;
    }();
    return tol;
}

double cos_power_integral(double a) {
    if (!(a > -1.0)) throw DomainError("cos power integral diverges for a <= -1");
    return 0.5 * std::sqrt(kPi) * std::exp(std::lgamma((a + 1.0) / 2.0) - std::lgamma(a / 2.0 + 1.0));
}

double kp1(double p) {
    check_p(p);
    return p > 2.0 ? cos_power_integral(-2.0 / p) : kInf;
}

PParams pparams(double p) {
    check_p(p);
    auto split = [](double v, int& order, std::optional<double>& exponent) {
        const double r = std::round(v);
        if (std::abs(v - r) <= 1e-12 * std::max(1.0, v)) {
            order = static_cast<int>(r);
            exponent.reset();
        } else {
            order = static_cast<int>(std::ceil(v));
            exponent = 1.0 / (order - v);
        }
    };
    PParams out;
    out.p = p;
    split(1.0 / (p - 1.0), out.m_p, out.r_p);
    if (p > 2.0) {
        int big_m = 0;
        split(2.0 / (p - 2.0), big_m, out.R_p);
        out.M_p = big_m;
    }
    out.K_p1 = kp1(p);
    return out;
}

double integral(IntegralKind kind, double p, double x, double q, const Tolerances& tol) {
    check_p(p);
    check_q(q);
    check_x(x);
    if (x == 0.0) return 0.0;
    const double sx = sgn(x);
    const double ax = std::abs(x);
    if (q == 1.0 && first_kind(kind) && p <= 2.0) {
        if (ax >= kHalfPi)
            throw DomainError("first-kind integral at q = 1 needs |x| < pi/2 when p <= 2");
        return sx * quarter(kind, p, q, ax, kHalfPi - ax, tol);
    }
    const double n = std::nearbyint(ax / kPi);
    const double r = ax - n * kPi;
    const double b = std::min(std::abs(r), kHalfPi);
    double v = sgn(r) * quarter(kind, p, q, b, kHalfPi - b, tol);
    if (n != 0.0) v += 2.0 * n * constants(kind, p, q, tol)->full;
    return sx * v;
}

double complete(IntegralKind kind, double p, double q, const Tolerances& tol) {
    check_p(p);
    check_q(q);
    return constants(kind, p, q, tol)->full;
}

Amplitude amplitude_ext(int which, double p, double x, double q, const Tolerances& tol) {
    check_p(p);
    check_q(q);
    check_x(x);
    if (which != 1 && which != 2) throw DomainError("amplitude index must be 1 or 2");
    const IntegralKind kind = which == 1 ? IntegralKind::F1 : IntegralKind::F2;
    if (x == 0.0) return {};
    const double sx = sgn(x);
    const double y = std::abs(x);
    if (q == 0.0 && (which == 2 || p == 2.0)) return {x, std::cos(x), std::sin(x)};
    if (q == 1.0) {
        if (p > 2.0) {
            const double k = kp1(p);
            if (y > k) throw DomainError("amplitude at q = 1 is defined only for |x| <= K_p(1) when p > 2");
            if (y == k) return assemble(0.0, sx, Quarter{kHalfPi, 0.0});
            return assemble(0.0, sx, invert_on_table(kind, p, q, y, k - y, tol));
        }
        const double fq = constants(kind, p, q, tol)->f_quarter;
        if (y <= fq) return assemble(0.0, sx, invert_on_table(kind, p, q, y, kInf, tol));
        return assemble(0.0, sx, invert_saturating(kind, p, y, tol));
    }
    const double k = constants(kind, p, q, tol)->full;
    const double n = std::nearbyint(x / (2.0 * k));
    const double r = x - 2.0 * n * k;
    const double ar = std::abs(r);
    if (ar >= k) return assemble(n, sgn(r), Quarter{kHalfPi, 0.0});
    return assemble(n, sgn(r), invert_on_table(kind, p, q, ar, k - ar, tol));
}

double amplitude(int which, double p, double x, double q, const Tolerances& tol) {
    return amplitude_ext(which, p, x, q, tol).angle;
}

SnCn sn_cn(double p, double x, double q, const Tolerances& tol) {
    const Amplitude a = amplitude_ext(1, p, x, q, tol);
    SnCn out;
    out.sn = a.sin;
    out.cn = a.cos == 0.0 ? 0.0 : sgn(a.cos) * std::pow(std::abs(a.cos), 2.0 / p);
    return out;
}

double dn(double p, double x, double q, const Tolerances& tol) {
    const Amplitude a = amplitude_ext(2, p, x, q, tol);
    const double s = std::abs(a.sin);
    const double c = std::abs(a.cos);
    const double d = s < c ? 1.0 - q * q * s * s : (1.0 - q) * (1.0 + q) + q * q * c * c;
    return std::pow(d, 1.0 / p);
}

double sech(double p, double x, const Tolerances& tol) {
    check_p(p);
    check_x(x);
    if (p > 2.0 && std::abs(x) >= kp1(p)) return 0.0;
    const Amplitude a = amplitude_ext(1, p, x, 1.0, tol);
    return std::pow(std::abs(a.cos), 2.0 / p);
}

double tanh(double p, double x, const Tolerances& tol) {
    check_p(p);
    check_x(x);
    if (x == 0.0) return 0.0;
    const double sx = sgn(x);
    if (p > 2.0 && std::abs(x) >= kp1(p)) return sx * complete(IntegralKind::E1, p, 1.0, tol);
    const Amplitude a = amplitude_ext(1, p, std::abs(x), 1.0, tol);
    // a.angle lies in [0, pi/2]; pass the complement explicitly.
    const double ell = std::asin(std::min(1.0, a.cos));
    const double b = a.angle;
    return sx * quarter(IntegralKind::E1, p, 1.0, b, b <= kQuarterPi ? kHalfPi - b : ell, tol);
}

}  // namespace pelastica
