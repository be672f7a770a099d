#pragma once

#include <complex>
#include <vector>

#include "baltrunc/linalg.hpp"
#include "baltrunc/matrix.hpp"

namespace baltrunc {

/// SISO state-space realization x' = A x + b u, y = c x + d u.
/// n = 0 (pure feedthrough) is allowed.
struct StateSpace {
    Matrix a;  ///< n x n
    Matrix b;  ///< n x 1
    Matrix c;  ///< 1 x n
    double d = 0.0;

    StateSpace() : a(0, 0), b(0, 1), c(1, 0) {}
    StateSpace(Matrix A, Matrix B, Matrix C, double D)
        : a(std::move(A)), b(std::move(B)), c(std::move(C)), d(D) {
        validate();
    }

    std::size_t size() const { return a.rows(); }

    void validate() const {
        const std::size_t n = a.rows();
        if (a.cols() != n) throw BadDimension("state matrix not square");
        if (b.rows() != n || b.cols() != 1) throw BadDimension("input vector shape");
        if (c.rows() != 1 || c.cols() != n) throw BadDimension("output vector shape");
        if (!a.all_finite() || !b.all_finite() || !c.all_finite() || !std::isfinite(d))
            throw BadInput("nonfinite entry in realization");
    }
};

struct StabilityReport {
    bool stable = false;
    double spectral_abscissa = 0.0;
};

/// G(s) = c (sI - A)^{-1} b + d by a complex LU solve.
inline Complex transfer_eval(const StateSpace& sys, Complex s) {
    const std::size_t n = sys.size();
    if (n == 0) return Complex(sys.d, 0.0);
    std::vector<Complex> m(n * n);
    std::vector<Complex> rhs(n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) m[i * n + j] = -sys.a(i, j);
        m[i * n + i] += s;
        rhs[i] = sys.b(i, 0);
    }
    std::vector<Complex> x = lu_solve_complex(std::move(m), n, std::move(rhs));
    Complex out(sys.d, 0.0);
    for (std::size_t i = 0; i < n; ++i) out += sys.c(0, i) * x[i];
    return out;
}

inline StabilityReport check_stability(const StateSpace& sys) {
    StabilityReport r;
    r.spectral_abscissa = spectral_abscissa(sys.a);
    r.stable = r.spectral_abscissa < 0.0;
    return r;
}

/// Leading k-state subsystem (A[1..k,1..k], b[1..k], c[1..k], d).
inline StateSpace leading_subsystem(const StateSpace& sys, std::size_t k) {
    const std::size_t n = sys.size();
    if (k < 1 || k >= n) throw BadDimension("leading_subsystem: need 1 <= k < n");
    return StateSpace(sys.a.block(0, 0, k, k), sys.b.block(0, 0, k, 1), sys.c.block(0, 0, 1, k),
                      sys.d);
}

/// Block-diagonal realization of G - G_r.
inline StateSpace error_system(const StateSpace& full, const StateSpace& reduced) {
    const std::size_t n = full.size(), r = reduced.size();
    Matrix a(n + r, n + r), b(n + r, 1), c(1, n + r);
    a.set_block(0, 0, full.a);
    a.set_block(n, n, reduced.a);
    b.set_block(0, 0, full.b);
    b.set_block(n, 0, reduced.b);
    c.set_block(0, 0, full.c);
    for (std::size_t j = 0; j < r; ++j) c(0, n + j) = -reduced.c(0, j);
    return StateSpace(std::move(a), std::move(b), std::move(c), full.d - reduced.d);
}

/// G(0) = d - c A^{-1} b.
inline double dc_gain(const StateSpace& sys) {
    const std::size_t n = sys.size();
    if (n == 0) return sys.d;
    Matrix x = lu_solve(sys.a, sys.b);
    double out = sys.d;
    for (std::size_t i = 0; i < n; ++i) out -= sys.c(0, i) * x(i, 0);
    return out;
}

}  // namespace baltrunc
