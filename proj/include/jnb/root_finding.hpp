#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <utility>

#include <boost/math/tools/roots.hpp>

#include "jnb/errors.hpp"

namespace jnb {

// Plain bisection on [lo, hi]; f(lo) and f(hi) must have opposite signs (a
// zero at either end is accepted). Runs until the bracket can no longer be
// halved in double precision or its width drops below abs_tol.
template <class F>
double bisect(F&& f, double lo, double hi, double abs_tol = 0.0,
              const char* what = "bisect") {
    double flo = f(lo);
    double fhi = f(hi);
    if (flo == 0.0) return lo;
    if (fhi == 0.0) return hi;
    if ((flo > 0) == (fhi > 0)) {
        throw InternalError(std::string(what) + ": no sign change on bracket");
    }
    for (int it = 0; it < 2000; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi || (hi - lo) <= abs_tol) break;
        const double fm = f(mid);
        if (fm == 0.0) return mid;
        if ((fm > 0) == (flo > 0)) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

// Bracketed root via TOMS 748 (Alefeld, Potra, Shi), converged to full double
// precision. Same contract as bisect() but needs far fewer evaluations; used in
// inner loops where f is expensive.
template <class F>
double bracketed_root(F&& f, double lo, double hi, const char* what = "root") {
    double flo = f(lo);
    double fhi = f(hi);
    if (flo == 0.0) return lo;
    if (fhi == 0.0) return hi;
    if ((flo > 0) == (fhi > 0)) {
        throw InternalError(std::string(what) + ": no sign change on bracket");
    }
    std::uintmax_t max_iter = 200;
    boost::math::tools::eps_tolerance<double> tol(std::numeric_limits<double>::digits - 2);
    auto [a, b] = boost::math::tools::toms748_solve(f, lo, hi, flo, fhi, tol, max_iter);
    return 0.5 * (a + b);
}

}  // namespace jnb
