#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "baltrunc/linalg.hpp"
#include "baltrunc/state_space.hpp"
#include "baltrunc/tolerances.hpp"

namespace baltrunc {

struct GramianPair {
    Matrix p;  ///< reachability
    Matrix q;  ///< observability
};

/// Hankel singular values grouped by multiplicity: sigmas holds the distinct
/// values (strictly decreasing), multiplicities the group sizes.
struct HankelSpectrum {
    std::vector<double> sigmas;
    std::vector<std::size_t> multiplicities;

    std::size_t order() const {
        return std::accumulate(multiplicities.begin(), multiplicities.end(), std::size_t{0});
    }

    /// Per-state sigma sequence of length order().
    std::vector<double> expanded() const {
        std::vector<double> out;
        for (std::size_t g = 0; g < sigmas.size(); ++g)
            out.insert(out.end(), multiplicities[g], sigmas[g]);
        return out;
    }

    /// True iff r lands on a group boundary (r = m_1 + ... + m_k).
    bool admissible_order(std::size_t r) const {
        std::size_t acc = 0;
        for (std::size_t m : multiplicities) {
            acc += m;
            if (acc == r) return true;
            if (acc > r) return false;
        }
        return r == acc;
    }
};

/// Cross-Gramian eigenvalues sorted by decreasing magnitude and their signs.
struct SignSpectrum {
    std::vector<int> signs;        ///< +1 / -1 per state
    std::vector<double> lambdas;   ///< |lambda| non-increasing

    bool trailing_uniform(std::size_t r) const {
        if (r >= signs.size()) return true;
        for (std::size_t i = r + 1; i < signs.size(); ++i)
            if (signs[i] != signs[r]) return false;
        return true;
    }
};

namespace detail {

/// Small Sylvester block solve T1 Y + Y T2 = R (T1 s1 x s1, T2 s2 x s2, both
/// at most 2 x 2) via Kronecker vectorization.
inline Matrix small_sylvester(const Matrix& t1, const Matrix& t2, const Matrix& rhs) {
    const std::size_t s1 = t1.rows(), s2 = t2.rows();
    Matrix k(s1 * s2, s1 * s2);
    // vec is column-stacked: vec(T1 Y) = (I (x) T1) vec Y, vec(Y T2) = (T2^T (x) I) vec Y
    for (std::size_t bj = 0; bj < s2; ++bj)
        for (std::size_t r = 0; r < s1; ++r) {
            for (std::size_t c = 0; c < s1; ++c) k(bj * s1 + r, bj * s1 + c) += t1(r, c);
            for (std::size_t bi = 0; bi < s2; ++bi) k(bj * s1 + r, bi * s1 + r) += t2(bi, bj);
        }
    Matrix v(s1 * s2, 1);
    for (std::size_t j = 0; j < s2; ++j)
        for (std::size_t i = 0; i < s1; ++i) v(j * s1 + i, 0) = rhs(i, j);
    Matrix x;
    try {
        x = lu_solve(k, v);
    } catch (const SingularMatrix&) {
        throw SingularMatrix("sylvester block solve singular: spectra of A and -A meet");
    }
    Matrix y(s1, s2);
    for (std::size_t j = 0; j < s2; ++j)
        for (std::size_t i = 0; i < s1; ++i) y(i, j) = x(j * s1 + i, 0);
    return y;
}

/// Diagonal block partition of a quasi-triangular Schur factor.
inline std::vector<std::pair<std::size_t, std::size_t>> schur_blocks(const Matrix& t) {
    std::vector<std::pair<std::size_t, std::size_t>> blocks;
    const std::size_t n = t.rows();
    std::size_t i = 0;
    while (i < n) {
        if (i + 1 < n && t(i + 1, i) != 0.0) {
            blocks.emplace_back(i, 2);
            i += 2;
        } else {
            blocks.emplace_back(i, 1);
            i += 1;
        }
    }
    return blocks;
}

/// Bartels-Stewart for A X + X A^T + M = 0 given the Schur form of A.
inline Matrix bs_lyapunov(const SchurResult& schur, const Matrix& M) {
    const Matrix& T = schur.t;
    const Matrix& Z = schur.z;
    const std::size_t n = T.rows();
    Matrix C = Z.transpose() * (M * Z) * (-1.0);
    const auto blocks = schur_blocks(T);
    const std::size_t p = blocks.size();
    Matrix Y(n, n);
    for (std::size_t jb = p; jb-- > 0;) {
        const auto [j0, sj] = blocks[jb];
        for (std::size_t ib = p; ib-- > 0;) {
            const auto [i0, si] = blocks[ib];
            Matrix r = C.block(i0, j0, si, sj);
            for (std::size_t kb = ib + 1; kb < p; ++kb) {
                const auto [k0, sk] = blocks[kb];
                r -= T.block(i0, k0, si, sk) * Y.block(k0, j0, sk, sj);
            }
            for (std::size_t lb = jb + 1; lb < p; ++lb) {
                const auto [l0, sl] = blocks[lb];
                r -= Y.block(i0, l0, si, sl) * T.block(j0, l0, sj, sl).transpose();
            }
            Matrix t2 = T.block(j0, j0, sj, sj).transpose();
            Y.set_block(i0, j0, small_sylvester(T.block(i0, i0, si, si), t2, r));
        }
    }
    return Z * Y * Z.transpose();
}

/// Bartels-Stewart for A X + X A + C0 = 0 (same coefficient on both sides).
inline Matrix bs_sylvester_same(const SchurResult& schur, const Matrix& C0) {
    const Matrix& T = schur.t;
    const Matrix& Z = schur.z;
    const std::size_t n = T.rows();
    Matrix C = Z.transpose() * (C0 * Z) * (-1.0);
    const auto blocks = schur_blocks(T);
    const std::size_t p = blocks.size();
    Matrix Y(n, n);
    for (std::size_t jb = 0; jb < p; ++jb) {
        const auto [j0, sj] = blocks[jb];
        for (std::size_t ib = p; ib-- > 0;) {
            const auto [i0, si] = blocks[ib];
            Matrix r = C.block(i0, j0, si, sj);
            for (std::size_t kb = ib + 1; kb < p; ++kb) {
                const auto [k0, sk] = blocks[kb];
                r -= T.block(i0, k0, si, sk) * Y.block(k0, j0, sk, sj);
            }
            for (std::size_t lb = 0; lb < jb; ++lb) {
                const auto [l0, sl] = blocks[lb];
                r -= Y.block(i0, l0, si, sl) * T.block(l0, j0, sl, sj);
            }
            Y.set_block(i0, j0,
                        small_sylvester(T.block(i0, i0, si, si), T.block(j0, j0, sj, sj), r));
        }
    }
    return Z * Y * Z.transpose();
}

/// Kronecker-vectorized dense solve of A X + X B + M = 0 where B is either
/// A^T (lyapunov) or A (same-coefficient sylvester).
inline Matrix kron_solve(const Matrix& A, const Matrix& M, bool transposed_right) {
    const std::size_t n = A.rows();
    Matrix K(n * n, n * n);
    for (std::size_t bj = 0; bj < n; ++bj)
        for (std::size_t r = 0; r < n; ++r) {
            for (std::size_t c = 0; c < n; ++c) K(bj * n + r, bj * n + c) += A(r, c);
            for (std::size_t bi = 0; bi < n; ++bi)
                K(bj * n + r, bi * n + r) += transposed_right ? A(bj, bi) : A(bi, bj);
        }
    Matrix rhs(n * n, 1);
    for (std::size_t j = 0; j < n; ++j)
        for (std::size_t i = 0; i < n; ++i) rhs(j * n + i, 0) = -M(i, j);
    Matrix x;
    try {
        x = lu_solve(K, rhs);
    } catch (const SingularMatrix&) {
        throw SingularMatrix("sylvester operator singular: spectra of A and -A meet");
    }
    Matrix X(n, n);
    for (std::size_t j = 0; j < n; ++j)
        for (std::size_t i = 0; i < n; ++i) X(i, j) = x(j * n + i, 0);
    return X;
}

inline void require_stable(const Matrix& A, const char* who) {
    if (A.rows() == 0) return;
    if (spectral_abscissa(A) >= 0.0) throw NotStable(std::string(who) + ": A is not asymptotically stable");
}

}  // namespace detail

/// Unique X with A X + X A^T + M = 0 for stable A and symmetric M.
inline Matrix solve_lyapunov(const Matrix& A, const Matrix& M) {
    const std::size_t n = A.rows();
    if (A.cols() != n || M.rows() != n || M.cols() != n)
        throw BadDimension("solve_lyapunov: shape mismatch");
    if (n == 0) return Matrix(0, 0);
    Matrix X;
    if (n <= static_cast<std::size_t>(tols().kron_max_dim)) {
        detail::require_stable(A, "solve_lyapunov");
        X = detail::kron_solve(A, M, /*transposed_right=*/true);
    } else {
        SchurResult s = schur_decompose(A);
        for (const Complex& l : s.eigenvalues)
            if (l.real() >= 0.0) throw NotStable("solve_lyapunov: A is not asymptotically stable");
        X = detail::bs_lyapunov(s, M);
    }
    // the exact solution is symmetric for symmetric M
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) {
            const double v = 0.5 * (X(i, j) + X(j, i));
            X(i, j) = X(j, i) = v;
        }
    return X;
}

/// Unique X with A X + X A + C = 0 for stable A.
inline Matrix solve_sylvester(const Matrix& A, const Matrix& C) {
    const std::size_t n = A.rows();
    if (A.cols() != n || C.rows() != n || C.cols() != n)
        throw BadDimension("solve_sylvester: shape mismatch");
    if (n == 0) return Matrix(0, 0);
    if (n <= static_cast<std::size_t>(tols().kron_max_dim)) {
        detail::require_stable(A, "solve_sylvester");
        return detail::kron_solve(A, C, /*transposed_right=*/false);
    }
    SchurResult s = schur_decompose(A);
    for (const Complex& l : s.eigenvalues)
        if (l.real() >= 0.0) throw NotStable("solve_sylvester: A is not asymptotically stable");
    return detail::bs_sylvester_same(s, C);
}

/// Reachability and observability Gramians of a stable system.
inline GramianPair gramians(const StateSpace& sys) {
    GramianPair g;
    g.p = solve_lyapunov(sys.a, sys.b * sys.b.transpose());
    g.q = solve_lyapunov(sys.a.transpose(), sys.c.transpose() * sys.c);
    return g;
}

/// Cross Gramian: solution of A X + X A + b c = 0.
inline Matrix cross_gramian(const StateSpace& sys) {
    return solve_sylvester(sys.a, sys.b * sys.c);
}

/// Gramian-definiteness minimality test: both Gramians numerically positive
/// definite (smallest eigenvalue above minimality_rel times the largest).
inline bool check_minimality(const StateSpace& sys) {
    if (!check_stability(sys).stable)
        throw NotStable("check_minimality: gramians undefined for unstable systems");
    if (sys.size() == 0) return true;
    GramianPair g = gramians(sys);
    for (const Matrix* m : {&g.p, &g.q}) {
        auto e = sym_eig(*m);
        const double largest = e.eigenvalues.front();
        const double smallest = e.eigenvalues.back();
        if (!(largest > 0.0) || smallest <= tols().minimality_rel * largest) return false;
    }
    return true;
}

namespace detail {

inline HankelSpectrum group_sigmas(const std::vector<double>& sigma_desc) {
    HankelSpectrum h;
    std::size_t i = 0;
    const double gap = tols().hsv_group_gap_rel;
    while (i < sigma_desc.size()) {
        std::size_t j = i + 1;
        double sum = sigma_desc[i];
        while (j < sigma_desc.size() && sigma_desc[j - 1] - sigma_desc[j] <= gap * sigma_desc[i]) {
            sum += sigma_desc[j];
            ++j;
        }
        h.sigmas.push_back(sum / static_cast<double>(j - i));
        h.multiplicities.push_back(j - i);
        i = j;
    }
    return h;
}

/// Hankel singular values as singular values of L_Q^T L_P; Cholesky failure
/// or a vanishing ratio signals loss of minimality.
inline std::vector<double> hankel_sigmas(const StateSpace& sys) {
    GramianPair g = gramians(sys);
    Matrix lp, lq;
    try {
        lp = cholesky(g.p);
        lq = cholesky(g.q);
    } catch (const NotPositiveDefinite&) {
        throw NotMinimal("gramian not positive definite");
    }
    auto svd = jacobi_svd(lq.transpose() * lp);
    if (!svd.sigma.empty() &&
        svd.sigma.back() <= tols().hsv_minimal_rel * svd.sigma.front())
        throw NotMinimal("vanishing hankel singular value");
    return svd.sigma;
}

}  // namespace detail

/// Hankel singular values with multiplicity grouping.
inline HankelSpectrum hankel_spectrum(const StateSpace& sys) {
    return detail::group_sigmas(detail::hankel_sigmas(sys));
}

/// Cross-Gramian eigenvalues sorted by |lambda| descending; signs read off.
/// Within a group of equal magnitude the positive eigenvalues come first.
inline SignSpectrum sign_spectrum(const StateSpace& sys) {
    Matrix x = cross_gramian(sys);
    auto eig = baltrunc::eigenvalues(x).eigenvalues;
    SignSpectrum s;
    std::vector<double> re;
    for (const Complex& l : eig) {
        if (std::abs(l.imag()) > tols().sign_imag_rel * std::abs(l))
            throw ComplexEigenvalue("cross gramian has a complex eigenvalue");
        re.push_back(l.real());
    }
    std::sort(re.begin(), re.end(), [](double a, double b) {
        if (std::abs(a) != std::abs(b)) return std::abs(a) > std::abs(b);
        return a > b;
    });
    for (double l : re) {
        s.lambdas.push_back(l);
        s.signs.push_back(l >= 0.0 ? 1 : -1);
    }
    return s;
}

}  // namespace baltrunc
