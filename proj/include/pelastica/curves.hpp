#pragma once

// Arclength parameterised p-elasticae from the closed-form profiles, the
// concatenation used to assemble flat-core curves, and closed-curve tools.

#include <iosfwd>
#include <string>
#include <vector>

#include "pelastica/classify.hpp"

namespace pelastica {

struct CurveSample {
    double s = 0.0;
    double x = 0.0;
    double y = 0.0;
    double theta = 0.0;
    double k = 0.0;
};

struct Trace {
    Family family = Family::Linear;
    double p = 2.0;
    double q = 0.0;
    double s0 = 0.0;     // profile evaluated at s + s0
    double scale = 1.0;  // curve = canonical / scale
    std::vector<CurveSample> samples;

    double s_begin() const { return samples.empty() ? 0.0 : samples.front().s; }
    double s_end() const { return samples.empty() ? 0.0 : samples.back().s; }
};

struct ClosedCurveReport {
    double position_gap = 0.0;
    double tangent_gap = 0.0;
    int turning_number = 0;
};

// Canonical profile at arclength s: linear, wavelike(q), borderline
// (p <= 2), orbitlike(q), circular. Flat-core uses FlatCoreProfile.
CurveSample canonical_point(Family family, double p, double q, double s);

// n uniform samples of the canonical profile on [a, b].
Trace trace_family(Family family, double p, double q, double a, double b, int n);

// Unit-scale flat-core curve: segments (-t, 0) of length L_j, each followed
// by a loop of sign sigma_j, traced right to left. Lengths are taken in the
// unit scale A_{p,lambda} = 1. Outside [0, length()] the curve continues
// along its flat end segments.
class FlatCoreProfile {
public:
    FlatCoreProfile(double p, FlatCoreSpec spec);

    CurveSample at(double u) const;
    double length() const { return length_; }
    double K() const { return K_; }
    // Arclength at which loop j (0-based) is centred.
    double center(int j) const { return centers_[j]; }
    const FlatCoreSpec& spec() const { return spec_; }

private:
    double p_;
    FlatCoreSpec spec_;
    double K_;
    double E_;  // tanh_p(K_p(1))
    double length_;
    std::vector<double> starts_;   // arclength where each segment starts
    std::vector<double> centers_;
};

// Curve whose curvature is the solution's k(s): a similarity image of the
// canonical profile. Rotation is fixed by the canonical frame.
CurveSample solution_point(const Solution& sol, double s);
Trace trace_solution(const Solution& sol, double a, double b, int n);

// Loop gamma_b^{sign} on [-K_p(1), K_p(1)] (p > 2) or [-window, window].
Trace loop_arc(double p, int sign, int n, double window = 0.0);

// C^0 concatenation; arclength re-based to start at 0.
Trace concat(const std::vector<Trace>& traces);

// Unit-scale flat-core trace over [0, 2N K_p(1) + sum L_j].
Trace trace_flatcore(double p, const FlatCoreSpec& spec, int n);

// Q_p(q) = 2 E_1(q) / K_1(q) - 1, with the limits at q = 1.
double Qp(double p, double q);
double qstar(double p);

// Wavelike profile at q*(p) on [0, 4 N K_1(q*)], evaluated at s + s0.
Trace figure_eight(double p, int N, double s0 = 0.0, int n = 2001);

double X2p(double p, double q);

ClosedCurveReport closure_check(const Trace& trace);
ClosedCurveReport closure_between(const CurveSample& a, const CurveSample& b);

// Serialisation.
void write_csv(const Trace& trace, std::ostream& out);
Trace read_csv(std::istream& in);
void write_svg(const Trace& trace, std::ostream& out);
std::string report_json(const ClosedCurveReport& report);

}  // namespace pelastica
