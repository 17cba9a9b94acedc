#pragma once

#include <cmath>

#include "pelastica/errors.hpp"

namespace pelastica::detail {

// Safeguarded Newton for an increasing g on [lo, hi] with g(lo) <= 0 <= g(hi).
// Bisects when the derivative magnitude leaves [1e-8, 1e8] or the Newton
// step leaves the bracket.
template <class G, class DG>
double solve_increasing(G g, DG dg, double lo, double hi, double t, double step_tol) {
    for (int it = 0; it < 300; ++it) {
        const double gv = g(t);
        if (gv == 0.0) return t;
        if (gv < 0.0) lo = t;
        else hi = t;
        const double d = dg(t);
        double tn = 0.5 * (lo + hi);
        const double ad = std::abs(d);
        if (it < 60 && std::isfinite(d) && ad >= 1e-8 && ad <= 1e8) {
            const double cand = t - gv / d;
            if (cand > lo && cand < hi) tn = cand;
        }
        if (std::abs(tn - t) <= step_tol || hi - lo <= step_tol) return tn;
        t = tn;
    }
    throw ToleranceError("safeguarded Newton did not converge");
}

}  // namespace pelastica::detail
