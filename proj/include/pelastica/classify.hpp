#pragma once

// Potential F, its level sets, and the dispatch of initial data
// (w(0), w'(0)) into the solution families of the curvature equation
//   p w'' + (p-1)|w|^{2/(p-1)} w - lambda |w|^{(2-p)/(p-1)} w = 0,
// w = |k|^{p-2} k.

#include <array>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "pelastica/elliptic.hpp"

namespace pelastica {

struct Potential {
    double p = 2.0;
    double lambda = 0.0;
};

struct PotentialValue {
    double F = 0.0;
    double Fdot = 0.0;
};

PotentialValue potential_eval(const Potential& pot, double x);

struct PotentialStructure {
    std::vector<double> critical_points;  // ascending
    double global_min = 0.0;
    std::vector<double> zero_roots;       // ascending
};

PotentialStructure potential_structure(const Potential& pot);

// The four solutions -xi < -zeta < zeta < xi of F(x) = D for min F < D < 0.
std::array<double, 4> level_roots(const Potential& pot, double D);

struct InitialData {
    double w0 = 0.0;
    double wdot0 = 0.0;
    double D0 = 0.0;

    static InitialData make(double p, double lambda, double w0, double wdot0);
};

struct FlatCoreSpec {
    int N = 1;
    std::vector<int> signs;       // sigma_j in {+1, -1}
    std::vector<double> lengths;  // L_j >= 0, flat segment preceding loop j
    std::vector<double> centers;  // loop centres s_j (derived)
};

// Throws DomainError unless N, signs and lengths are consistent.
void validate(const FlatCoreSpec& spec);

struct Linear {};
struct Wavelike {
    double A = 0.0, alpha = 0.0, beta = 0.0, q = 0.0;
};
struct Borderline {
    int sign = 1;
    double beta = 0.0;
};
struct FlatCore {
    FlatCoreSpec spec;
    double A_pl = 0.0;
    double T_pl = 0.0;
};
struct Orbitlike {
    double A = 0.0, alpha = 0.0, beta = 0.0, q = 0.0;
};
struct Circular {
    double k0 = 0.0;
};

using SolutionClass = std::variant<Linear, Wavelike, Borderline, FlatCore, Orbitlike, Circular>;

enum class Family { Linear, Wavelike, Borderline, FlatCore, Orbitlike, Circular };

Family family_of(const SolutionClass& cls);
std::string to_string(Family f);
Family family_from_string(const std::string& name);

// A solution class together with the exponent and multiplier it solves for.
struct Solution {
    double p = 2.0;
    double lambda = 0.0;
    SolutionClass cls;

    Family family() const { return family_of(cls); }
};

// A_{p,lambda} = (1/2) (2 lambda / (p-1))^{1/p}, lambda > 0.
double a_pl(double p, double lambda);

// Multipliers for which the canonical families solve the equation.
double wavelike_lambda(double p, double A, double alpha, double q);
double orbitlike_lambda(double p, double A, double alpha, double q);
double circular_lambda(double p, double k0);
// lambda with A_{p,lambda} = A.
double borderline_lambda(double p, double A);

// Loop centres s_j = sum_{i<=j} L_i + (2j - 1) T.
std::vector<double> canonical_centers(const FlatCoreSpec& spec, double T);

struct ClassifyOptions {
    std::optional<FlatCoreSpec> flatcore_hint;
    // Resolve p > 2, zero data, lambda > 0 as the trivial solution.
    bool zero_data_is_linear = false;
};

Solution classify(double p, double lambda, const InitialData& data,
                  const ClassifyOptions& opts = {});

struct CurvatureValue {
    double k = 0.0;
    double w = 0.0;
    double wdot = 0.0;
};

CurvatureValue curvature_of(const Solution& sol, double s);

// max(|w(0) - w0|, |w'(0) - wdot0|) / max(1, |w0|, |wdot0|).
double initial_mismatch(const Solution& sol, const InitialData& data);

// Relative tolerance for comparing D0 against 0 and min F.
double level_tolerance(const Potential& pot);

struct RegularityReport {
    Family family = Family::Linear;
    bool analytic = true;
    // gamma in W^{sobolev_order, r} for r < sobolev_exponent, or for
    // r <= sobolev_exponent when exponent_attained (exponent may be +inf).
    int sobolev_order = 0;
    double sobolev_exponent = 0.0;
    bool exponent_attained = false;
    // Known non-membership W^{fails_order, fails_exponent}.
    std::optional<int> fails_order;
    std::optional<double> fails_exponent;
    PParams constants;
};

// interior_zero: for wavelike, the curvature vanishes inside the interval;
// for flat-core, the zero set contains an interval.
RegularityReport regularity(double p, Family family, bool interior_zero);

}  // namespace pelastica
