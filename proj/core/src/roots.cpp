#include "potts/roots.hpp"

#include <string>

namespace potts {

double bracketed_root(const std::function<double(double)>& f, double lo, double hi, double tol, int max_iter) {
    double flo = f(lo), fhi = f(hi);
    if (flo == 0.0) return lo;
    if (fhi == 0.0) return hi;
    if ((flo < 0.0) == (fhi < 0.0))
        throw NoRoot("bracketed_root: no sign change on [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
    // Illinois variant of regula falsi keeps the bracket and converges superlinearly.
    int side = 0;
    for (int it = 0; it < max_iter; ++it) {
        if (std::abs(hi - lo) <= tol * (1.0 + std::abs(lo) + std::abs(hi)) * 0.5) break;
        double mid = (lo * fhi - hi * flo) / (fhi - flo);
        if (!(mid > std::min(lo, hi) && mid < std::max(lo, hi)) || it % 4 == 3) mid = 0.5 * (lo + hi);
        const double fm = f(mid);
        if (fm == 0.0) return mid;
        if ((fm < 0.0) == (flo < 0.0)) {
            lo = mid;
            flo = fm;
            if (side == -1) fhi *= 0.5;
            side = -1;
        } else {
            hi = mid;
            fhi = fm;
            if (side == 1) flo *= 0.5;
            side = 1;
        }
    }
    return std::abs(flo) < std::abs(fhi) ? lo : hi;
}

std::vector<double> scan_roots(const std::function<double(double)>& f, double lo, double hi, int n, double tol) {
    std::vector<double> roots;
    double a = lo, fa = f(lo);
    for (int i = 1; i <= n; ++i) {
        const double b = lo + (hi - lo) * i / n;
        const double fb = f(b);
        if (fa == 0.0) {
            roots.push_back(a);
        } else if ((fa < 0.0) != (fb < 0.0) && fb != 0.0) {
            roots.push_back(bracketed_root(f, a, b, tol));
        }
        a = b;
        fa = fb;
    }
    if (fa == 0.0) roots.push_back(a);
    return roots;
}

double golden_min(const std::function<double(double)>& f, double lo, double hi, double tol) {
    const double g = 0.5 * (std::sqrt(5.0) - 1.0);
    double c = hi - g * (hi - lo), d = lo + g * (hi - lo);
    double fc = f(c), fd = f(d);
    while (hi - lo > tol) {
        if (fc < fd) {
            hi = d;
            d = c;
            fd = fc;
            c = hi - g * (hi - lo);
            fc = f(c);
        } else {
            lo = c;
            c = d;
            fc = fd;
            d = lo + g * (hi - lo);
            fd = f(d);
        }
    }
    return 0.5 * (lo + hi);
}

}  // namespace potts
