#pragma once

// p-elliptic integrals, their amplitude inverses and the functions
// sn_p, cn_p, dn_p, sech_p, tanh_p built on top of them.
//
// All functions are pure. Quarter-period tables used to seed the inversions
// are cached process-wide; cached entries are immutable once built.

#include <optional>
#include <string>

#include "pelastica/errors.hpp"

namespace pelastica {

enum class IntegralKind { F1, F2, E1, E2 };

std::string to_string(IntegralKind kind);
IntegralKind integral_kind_from_string(const std::string& name);

struct Tolerances {
    double integral = 1e-12;   // absolute, for quadrature
    double inversion = 1e-11;  // absolute, on the amplitude
};

// Defaults, optionally overridden once per process by the environment
// variable PELASTICA_TOL ("<integral>" or "<integral>,<inversion>").
const Tolerances& default_tolerances();

// Exponent-dependent constants used by the regularity statements.
struct PParams {
    double p = 2.0;
    int m_p = 1;
    std::optional<double> r_p;  // empty when 1/(p-1) is an integer
    std::optional<int> M_p;     // p > 2 only
    std::optional<double> R_p;  // p > 2 and 2/(p-2) not an integer
    double K_p1 = 0.0;          // +inf for p <= 2
};

PParams pparams(double p);

// K_p(1) = int_0^{pi/2} cos^{-2/p}; +inf for p <= 2.
double kp1(double p);

double integral(IntegralKind kind, double p, double x, double q,
                const Tolerances& tol = default_tolerances());

// Value at x = pi/2; +inf for F kinds at q = 1 when p <= 2.
double complete(IntegralKind kind, double p, double q,
                const Tolerances& tol = default_tolerances());

// Amplitude together with an accurately computed cosine and sine. Near the
// saturated ends (q = 1, p <= 2) cos is obtained from the complementary
// angle and stays meaningful long after angle rounds to pi/2.
struct Amplitude {
    double angle = 0.0;
    double cos = 1.0;
    double sin = 0.0;
};

Amplitude amplitude_ext(int which, double p, double x, double q,
                        const Tolerances& tol = default_tolerances());

double amplitude(int which, double p, double x, double q,
                 const Tolerances& tol = default_tolerances());

struct SnCn {
    double sn = 0.0;
    double cn = 1.0;
};

SnCn sn_cn(double p, double x, double q,
           const Tolerances& tol = default_tolerances());

double dn(double p, double x, double q,
          const Tolerances& tol = default_tolerances());

double sech(double p, double x, const Tolerances& tol = default_tolerances());

double tanh(double p, double x, const Tolerances& tol = default_tolerances());

// int_0^{pi/2} cos^a(theta) d theta for a > -1, via the Beta function.
double cos_power_integral(double a);

}  // namespace pelastica
