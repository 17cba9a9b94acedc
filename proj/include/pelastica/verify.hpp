#pragma once

// Independent numerical checks: Gauss-Kronrod quadrature, weak and strong
// residuals of the curvature equation, conservation of the first integral,
// the first variation of B_p + lambda L, and local exponent probes.

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "pelastica/classify.hpp"
#include "pelastica/curves.hpp"

namespace pelastica {

struct VerifyReport {
    std::string name;
    double residual_norm = 0.0;
    double tolerance = 0.0;
    bool pass = false;
    std::map<std::string, double> metadata;
};

// Sets pass = residual_norm <= tolerance (false for NaN).
VerifyReport make_report(std::string name, double residual_norm, double tolerance,
                         std::map<std::string, double> metadata = {});

std::string reports_json(const std::vector<VerifyReport>& reports);

// phi(s) = (4 (s-a)(b-s) / (b-a)^2)^4 on [a, b], zero outside: C^3, so
// Simpson on sampled data keeps its order across the support ends.
struct TestFunction {
    double a = 0.0;
    double b = 1.0;

    double value(double s) const;
    double d1(double s) const;
    double d2(double s) const;
};

// Deterministic for a given seed; supports inside [lo, hi], each at least
// min_width long.
std::vector<TestFunction> random_bumps(double lo, double hi, int count, std::uint64_t seed,
                                       double min_width = 0.0);

enum class Singular { None, Left, Right, Both };

// Adaptive 21-point Gauss-Kronrod. Singular endpoints are removed with
// x = a + (b-a) t^8 (left), the mirror image (right), or the smoothstep-like
// map t^4 / (t^4 + (1-t)^4) (both). Throws ToleranceError when the error
// estimate exceeds tol. Near a nonzero singular end the attainable accuracy is
// limited by how well x resolves the distance to it.
double oracle_quadrature(const std::function<double(double)>& f, double a, double b, double tol,
                         Singular singular = Singular::None);

using KSampler = std::function<double(double)>;

// max over phi of |int (p|k|^{p-2}k phi'' + (p-1)|k|^p k phi - lambda k phi)|
// divided by the same integral of absolute values. breaks are points where
// k is not smooth (zeros); the quadrature splits there.
VerifyReport weak_residual(const KSampler& k, double p, double lambda,
                           const std::vector<TestFunction>& phis, double L,
                           const std::vector<double>& breaks = {}, double tol = 1e-8);

// Same functional on sampled curvature: composite Simpson over the trace's
// uniform grid. The error is O(h^3) or better for the bumps above, hence
// the looser default tolerance.
VerifyReport weak_residual(const Trace& trace, double p, double lambda,
                           const std::vector<TestFunction>& phis, double tol = 1e-4);

// Zeros of k(s) in [a, b]: wavelike zeros and flat-core loop edges.
std::vector<double> curvature_zeros(const Solution& sol, double a, double b);

// Residual of p w'' + (p-1)|w|^{2/(p-1)} w - lambda |w|^{(2-p)/(p-1)} w on
// the grid a + i h, w'' by the three-point stencil at spacings h and h/2.
// Points within margin of a curvature zero are skipped. residual_norm is
// |order - 2| with tolerance 0.3; an exactly satisfied equation passes.
VerifyReport strong_residual(const Solution& sol, double a, double b, double h,
                             double margin = -1.0);

// Sampled version: w'' from the trace's k column with spacing h and 2h.
VerifyReport strong_residual(const Trace& trace, double p, double lambda, double margin);

// (max - min) of p^2 w'^2 + F(w) over n points of [a, b], over 1 + |D0|.
VerifyReport conservation_drift(const Solution& sol, double a, double b, int n = 401,
                                double tol = 1e-8);

struct Perturbation {
    TestFunction phi;
    double ex = 1.0;
    double ey = 0.0;
};

std::vector<Perturbation> random_perturbations(double lo, double hi, int count,
                                               std::uint64_t seed);

using CurveFn = std::function<CurveSample(double)>;

// <d(B_p + lambda L), eta> by quadrature of the first-variation integrand,
// and by central differences of the energy of gamma + eps eta with
// eps = 1e-5 * scale and a Richardson step at eps/2. residual_norm is the
// larger of the two, each normalised by the integral of absolute terms.
VerifyReport first_variation(const CurveFn& curve, double p, double lambda,
                             const std::vector<Perturbation>& etas, double scale = 1.0,
                             double tol = 1e-6);

struct ExponentFit {
    double exponent = 0.0;
    double residual = 0.0;  // rms of the log-log fit
    std::vector<double> distances;
    std::vector<double> values;
};

// Ladder s0 + side * window * 2^{-j}, j = 0..11; the two points closest to
// s0 are dropped and log|k| is fitted against log|s - s0|. Throws FitError
// when a kept sample is zero or not finite.
ExponentFit exponent_probe(const KSampler& k, double s0, int side, double window);

}  // namespace pelastica
