#pragma once

#include <algorithm>
#include <cmath>
#include <set>
#include <vector>

#include "baltrunc/gramian.hpp"
#include "baltrunc/state_space.hpp"

namespace baltrunc {

struct HinfResult {
    double norm = 0.0;
    double peak_frequency = 0.0;  ///< rad/s, reporting metadata
    int iterations = 0;
};

namespace detail {

struct Witness {
    double value = -1.0;
    double omega = 0.0;

    void offer(double v, double w) {
        if (v > value) {
            value = v;
            omega = w;
        }
    }
};

/// Scaled SISO Hamiltonian: gamma is a singular value of G on the imaginary
/// axis iff H(gamma) has an eigenvalue there. The off-diagonal blocks carry a
/// factor gamma/R instead of 1/R and gamma^2/R, which keeps the two blocks at
/// the same scale for small gamma.
inline Matrix hinf_hamiltonian(const StateSpace& sys, double gamma) {
    const std::size_t n = sys.size();
    const double R = gamma * gamma - sys.d * sys.d;
    Matrix h(2 * n, 2 * n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            h(i, j) = sys.a(i, j) + (sys.d / R) * sys.b(i, 0) * sys.c(0, j);
            h(i, n + j) = (gamma / R) * sys.b(i, 0) * sys.b(j, 0);
            h(n + i, j) = -(gamma / R) * sys.c(0, i) * sys.c(0, j);
            h(n + i, n + j) = -sys.a(j, i) - (sys.d / R) * sys.c(0, i) * sys.b(j, 0);
        }
    return h;
}

/// Candidate peak frequencies for the level gamma: imaginary parts of the
/// near-axis Hamiltonian eigenvalues plus midpoints of consecutive crossings.
inline std::vector<double> crossing_candidates(const StateSpace& sys, double gamma) {
    Matrix h = hinf_hamiltonian(sys, gamma);
    std::vector<double> ws;
    for (const Complex& l : schur_decompose(h).eigenvalues) {
        if (std::abs(l.real()) <= 1e-4 * (1.0 + std::abs(l)) && l.imag() > 0.0)
            ws.push_back(l.imag());
    }
    std::sort(ws.begin(), ws.end());
    std::vector<double> out = ws;
    for (std::size_t i = 0; i + 1 < ws.size(); ++i) out.push_back(0.5 * (ws[i] + ws[i + 1]));
    out.push_back(0.0);
    return out;
}

inline double golden_max(const StateSpace& sys, double a, double b, int iters, Witness& best) {
    const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
    double x1 = b - gr * (b - a), x2 = a + gr * (b - a);
    double f1 = std::abs(transfer_eval(sys, Complex(0, x1)));
    double f2 = std::abs(transfer_eval(sys, Complex(0, x2)));
    for (int k = 0; k < iters; ++k) {
        if (f1 < f2) {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + gr * (b - a);
            f2 = std::abs(transfer_eval(sys, Complex(0, x2)));
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - gr * (b - a);
            f1 = std::abs(transfer_eval(sys, Complex(0, x1)));
        }
    }
    const double w = 0.5 * (a + b);
    const double f = std::abs(transfer_eval(sys, Complex(0, w)));
    best.offer(f, w);
    return f;
}

}  // namespace detail

/// H-infinity norm by bisection on gamma. Each bisection step asks whether
/// some |G(iw)| exceeds gamma, taking the trial frequencies from the
/// imaginary-axis eigenvalues of the Hamiltonian; the returned norm is the
/// largest evaluation seen, so it is a certified lower bound within tol of
/// the supremum.
inline HinfResult hinf_norm(const StateSpace& sys, double tol = tols().hinf_tol) {
    sys.validate();
    const std::size_t n = sys.size();
    HinfResult res;
    if (n == 0) {
        res.norm = std::abs(sys.d);
        return res;
    }
    auto eig = eigenvalues(sys.a).eigenvalues;
    double abscissa = -1e300, wlo = 1e300, whi = 0.0;
    for (const Complex& l : eig) {
        abscissa = std::max(abscissa, l.real());
        wlo = std::min(wlo, std::abs(l));
        whi = std::max(whi, std::abs(l));
    }
    if (abscissa >= 0.0) throw NotStable("hinf_norm: system not asymptotically stable");

    detail::Witness best;
    best.offer(std::abs(transfer_eval(sys, Complex(0, 0))), 0.0);
    const double gmin = 0.1 * wlo, gmax = 10.0 * whi;
    for (int k = 0; k < 400; ++k) {
        const double w = gmin * std::pow(gmax / gmin, k / 399.0);
        best.offer(std::abs(transfer_eval(sys, Complex(0, w))), w);
    }
    // |G| tends to |d| at high frequency; fold that limit into the start
    best.offer(std::abs(sys.d) * (1.0 - 1e-12), 100.0 * gmax);

    auto below = [&](double gamma) -> bool {
        double found = -1.0;
        for (double w : detail::crossing_candidates(sys, gamma)) {
            const double v = std::abs(transfer_eval(sys, Complex(0, w)));
            best.offer(v, w);
            found = std::max(found, v);
        }
        return found > gamma;
    };

    double lo = std::max(best.value, std::abs(sys.d) * (1.0 + 1e-10));
    double hi = std::max(2.0 * best.value, lo * (1.0 + 1e-6));
    if (best.value <= 0.0) {
        res.norm = 0.0;
        return res;
    }
    int iters = 0;
    while (below(hi)) {
        lo = std::max(lo, best.value);
        hi *= 4.0;
        if (++iters > 80) throw NoConvergence("hinf_norm: no upper bracket found");
    }
    while (hi - lo > tol * hi) {
        const double mid = 0.5 * (lo + hi);
        ++iters;
        if (iters > 400) throw NoConvergence("hinf_norm: bisection stalled");
        if (below(mid))
            lo = std::max(mid, best.value);
        else
            hi = mid;
    }
    // polish the reported peak around the best frequency seen
    if (best.omega > 0.0) {
        detail::golden_max(sys, best.omega / 1.6, best.omega * 1.6, 60, best);
        detail::golden_max(sys, 0.0, best.omega * 1e-3 + 1e-30, 60, best);
    } else {
        detail::golden_max(sys, 0.0, std::max(gmin, 1e-30), 60, best);
    }
    res.norm = best.value;
    res.peak_frequency = best.omega;
    res.iterations = iters;
    return res;
}

/// G(i w) over a frequency grid. Points where the solve breaks down (a pole
/// on the grid) are reported as NaN rather than aborting the sweep.
inline std::vector<std::pair<double, Complex>> frequency_response(
    const StateSpace& sys, const std::vector<double>& omegas) {
    std::vector<std::pair<double, Complex>> out;
    out.reserve(omegas.size());
    const double nan = std::numeric_limits<double>::quiet_NaN();
    if (sys.size() > 0 && omegas.size() > 32) {
        detail::HessenbergEvaluator ev(sys.a, sys.b, sys.c);
        for (double w : omegas) {
            try {
                out.emplace_back(w, ev.eval(Complex(0, w)) + sys.d);
            } catch (const SingularMatrix&) {
                out.emplace_back(w, Complex(nan, nan));
            }
        }
        return out;
    }
    for (double w : omegas) {
        try {
            out.emplace_back(w, transfer_eval(sys, Complex(0, w)));
        } catch (const SingularMatrix&) {
            out.emplace_back(w, Complex(nan, nan));
        }
    }
    return out;
}

inline std::vector<double> log_grid(double wmin, double wmax, std::size_t points) {
    std::vector<double> out;
    if (points == 0) return out;
    if (points == 1) {
        out.push_back(wmin);
        return out;
    }
    if (!(wmin > 0.0) || !(wmax > wmin)) throw BadInput("log grid needs 0 < wmin < wmax");
    for (std::size_t k = 0; k < points; ++k)
        out.push_back(wmin * std::pow(wmax / wmin, static_cast<double>(k) / (points - 1)));
    return out;
}

}  // namespace baltrunc
