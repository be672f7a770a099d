#pragma once

#include <cmath>
#include <complex>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "baltrunc/matrix.hpp"
#include "baltrunc/tolerances.hpp"

namespace baltrunc {

using Complex = std::complex<double>;

struct EigenDecomposition {
    std::vector<Complex> eigenvalues;       ///< conjugate pairs adjacent, +imag first
    std::optional<Matrix> right_vectors;    ///< not produced by the QR path
};

namespace detail {

template <class T>
double mag(const T& x) {
    return std::abs(x);
}

/// In-place LU with partial pivoting on a row-major n x n array.
/// Throws SingularMatrix when a pivot falls below pivot_floor.
template <class T>
void lu_factor(std::vector<T>& a, std::size_t n, std::vector<std::size_t>& piv,
               double pivot_floor) {
    piv.resize(n);
    for (std::size_t k = 0; k < n; ++k) {
        std::size_t p = k;
        double best = mag(a[k * n + k]);
        for (std::size_t i = k + 1; i < n; ++i) {
            const double v = mag(a[i * n + k]);
            if (v > best) {
                best = v;
                p = i;
            }
        }
        if (!(best > pivot_floor)) throw SingularMatrix("pivot below threshold");
        piv[k] = p;
        if (p != k)
            for (std::size_t j = 0; j < n; ++j) std::swap(a[k * n + j], a[p * n + j]);
        const T d = a[k * n + k];
        for (std::size_t i = k + 1; i < n; ++i) {
            const T m = a[i * n + k] / d;
            a[i * n + k] = m;
            if (m != T(0))
                for (std::size_t j = k + 1; j < n; ++j) a[i * n + j] -= m * a[k * n + j];
        }
    }
}

/// Solve with factors from lu_factor; rhs holds nrhs columns, row-major n x nrhs.
template <class T>
void lu_apply(const std::vector<T>& a, std::size_t n, const std::vector<std::size_t>& piv,
              std::vector<T>& rhs, std::size_t nrhs) {
    for (std::size_t k = 0; k < n; ++k)
        if (piv[k] != k)
            for (std::size_t j = 0; j < nrhs; ++j)
                std::swap(rhs[k * nrhs + j], rhs[piv[k] * nrhs + j]);
    for (std::size_t k = 0; k < n; ++k)
        for (std::size_t i = k + 1; i < n; ++i) {
            const T m = a[i * n + k];
            if (m != T(0))
                for (std::size_t j = 0; j < nrhs; ++j) rhs[i * nrhs + j] -= m * rhs[k * nrhs + j];
        }
    for (std::size_t k = n; k-- > 0;) {
        const T d = a[k * n + k];
        for (std::size_t j = 0; j < nrhs; ++j) {
            T s = rhs[k * nrhs + j];
            for (std::size_t i = k + 1; i < n; ++i) s -= a[k * n + i] * rhs[i * nrhs + j];
            rhs[k * nrhs + j] = s / d;
        }
    }
}

template <class T>
double inf_norm(const std::vector<T>& a, std::size_t n) {
    double m = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double s = 0.0;
        for (std::size_t j = 0; j < n; ++j) s += mag(a[i * n + j]);
        m = std::max(m, s);
    }
    return m;
}

}  // namespace detail

/// Solve A X = B by LU with partial pivoting.
inline Matrix lu_solve(const Matrix& A, const Matrix& B) {
    const std::size_t n = A.rows();
    if (A.cols() != n) throw BadDimension("lu_solve: A not square");
    if (B.rows() != n) throw BadDimension("lu_solve: rhs row mismatch");
    if (n == 0) return Matrix(0, B.cols());
    std::vector<double> a = A.data();
    std::vector<double> rhs = B.data();
    std::vector<std::size_t> piv;
    const double floor = tols().lu_pivot_rel * A.norm_inf();
    detail::lu_factor(a, n, piv, floor);
    detail::lu_apply(a, n, piv, rhs, B.cols());
    Matrix X(n, B.cols());
    X.data() = rhs;
    return X;
}

/// Complex variant used by transfer-function evaluation: solves (A) x = b.
inline std::vector<Complex> lu_solve_complex(std::vector<Complex> a, std::size_t n,
                                             std::vector<Complex> b) {
    std::vector<std::size_t> piv;
    const double floor = tols().lu_pivot_rel * detail::inf_norm(a, n);
    detail::lu_factor(a, n, piv, floor);
    detail::lu_apply(a, n, piv, b, 1);
    return b;
}

/// Cholesky factor L (lower triangular) of a symmetric positive definite A.
inline Matrix cholesky(const Matrix& A) {
    const std::size_t n = A.rows();
    if (A.cols() != n) throw BadDimension("cholesky: not square");
    if (sym_deviation(A) > tols().symeig_gate_rel * std::max(A.max_abs(), 1e-300))
        throw NotSymmetric("cholesky: input not symmetric");
    Matrix L(n, n);
    for (std::size_t j = 0; j < n; ++j) {
        double d = A(j, j);
        for (std::size_t k = 0; k < j; ++k) d -= L(j, k) * L(j, k);
        if (!(d > 0.0) || !std::isfinite(d))
            throw NotPositiveDefinite("cholesky: nonpositive pivot at " + std::to_string(j));
        L(j, j) = std::sqrt(d);
        for (std::size_t i = j + 1; i < n; ++i) {
            double s = A(i, j);
            for (std::size_t k = 0; k < j; ++k) s -= L(i, k) * L(j, k);
            L(i, j) = s / L(j, j);
        }
    }
    return L;
}

struct SymEigResult {
    std::vector<double> eigenvalues;  ///< descending
    Matrix vectors;                   ///< columns match eigenvalues, orthogonal
};

/// Cyclic Jacobi for symmetric matrices. The off-diagonal stopping test is
/// relative to sqrt(a_pp a_qq), which keeps small eigenvalues meaningful.
inline SymEigResult sym_eig(const Matrix& A) {
    const std::size_t n = A.rows();
    if (A.cols() != n) throw BadDimension("sym_eig: not square");
    const double scale = std::max(A.max_abs(), 1e-300);
    if (sym_deviation(A) > tols().symeig_gate_rel * scale)
        throw NotSymmetric("sym_eig: input not symmetric");
    Matrix W = A;
    // enforce exact symmetry before rotating
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) {
            const double v = 0.5 * (W(i, j) + W(j, i));
            W(i, j) = W(j, i) = v;
        }
    Matrix V = Matrix::identity(n);
    const double eps = std::numeric_limits<double>::epsilon();
    for (int sweep = 0; sweep < tols().jacobi_max_sweeps; ++sweep) {
        bool rotated = false;
        for (std::size_t p = 0; p + 1 < n; ++p)
            for (std::size_t q = p + 1; q < n; ++q) {
                const double apq = W(p, q);
                const double bound = std::sqrt(std::abs(W(p, p) * W(q, q))) + scale * 1e-300;
                if (std::abs(apq) <= eps * std::max(bound, eps * scale)) continue;
                rotated = true;
                const double theta = (W(q, q) - W(p, p)) / (2.0 * apq);
                const double t = (theta >= 0 ? 1.0 : -1.0) /
                                 (std::abs(theta) + std::sqrt(1.0 + theta * theta));
                const double cs = 1.0 / std::sqrt(1.0 + t * t);
                const double sn = cs * t;
                for (std::size_t k = 0; k < n; ++k) {
                    const double wkp = W(k, p), wkq = W(k, q);
                    W(k, p) = cs * wkp - sn * wkq;
                    W(k, q) = sn * wkp + cs * wkq;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const double wpk = W(p, k), wqk = W(q, k);
                    W(p, k) = cs * wpk - sn * wqk;
                    W(q, k) = sn * wpk + cs * wqk;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const double vkp = V(k, p), vkq = V(k, q);
                    V(k, p) = cs * vkp - sn * vkq;
                    V(k, q) = sn * vkp + cs * vkq;
                }
            }
        if (!rotated) break;
    }
    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;
    std::sort(order.begin(), order.end(),
              [&](std::size_t i, std::size_t j) { return W(i, i) > W(j, j); });
    SymEigResult r;
    r.eigenvalues.resize(n);
    r.vectors = Matrix(n, n);
    for (std::size_t j = 0; j < n; ++j) {
        r.eigenvalues[j] = W(order[j], order[j]);
        for (std::size_t i = 0; i < n; ++i) r.vectors(i, j) = V(i, order[j]);
    }
    return r;
}

struct SvdResult {
    Matrix u;
    std::vector<double> sigma;  ///< descending, >= 0
    Matrix v;
};

/// One-sided Jacobi SVD of a square matrix: orthogonalizes columns by plane
/// rotations, never forming M^T M, so small singular values keep their
/// relative accuracy.
inline SvdResult jacobi_svd(const Matrix& M) {
    const std::size_t n = M.rows();
    if (M.cols() != n) throw BadDimension("jacobi_svd: not square");
    Matrix W = M;
    Matrix V = Matrix::identity(n);
    const double eps = std::numeric_limits<double>::epsilon();
    for (int sweep = 0; sweep < tols().jacobi_max_sweeps; ++sweep) {
        bool rotated = false;
        for (std::size_t p = 0; p + 1 < n; ++p)
            for (std::size_t q = p + 1; q < n; ++q) {
                double app = 0.0, aqq = 0.0, apq = 0.0;
                for (std::size_t k = 0; k < n; ++k) {
                    app += W(k, p) * W(k, p);
                    aqq += W(k, q) * W(k, q);
                    apq += W(k, p) * W(k, q);
                }
                if (std::abs(apq) <= eps * std::sqrt(app * aqq) || apq == 0.0) continue;
                rotated = true;
                const double zeta = (aqq - app) / (2.0 * apq);
                const double t = (zeta >= 0 ? 1.0 : -1.0) /
                                 (std::abs(zeta) + std::sqrt(1.0 + zeta * zeta));
                const double cs = 1.0 / std::sqrt(1.0 + t * t);
                const double sn = cs * t;
                for (std::size_t k = 0; k < n; ++k) {
                    const double wkp = W(k, p), wkq = W(k, q);
                    W(k, p) = cs * wkp - sn * wkq;
                    W(k, q) = sn * wkp + cs * wkq;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const double vkp = V(k, p), vkq = V(k, q);
                    V(k, p) = cs * vkp - sn * vkq;
                    V(k, q) = sn * vkp + cs * vkq;
                }
            }
        if (!rotated) break;
    }
    std::vector<double> s(n);
    for (std::size_t j = 0; j < n; ++j) {
        double nrm = 0.0;
        for (std::size_t i = 0; i < n; ++i) nrm += W(i, j) * W(i, j);
        s[j] = std::sqrt(nrm);
    }
    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) { return s[i] > s[j]; });
    SvdResult r;
    r.sigma.resize(n);
    r.u = Matrix(n, n);
    r.v = Matrix(n, n);
    for (std::size_t j = 0; j < n; ++j) {
        const std::size_t oj = order[j];
        r.sigma[j] = s[oj];
        const double inv = s[oj] > 0.0 ? 1.0 / s[oj] : 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            r.u(i, j) = W(i, oj) * inv;
            r.v(i, j) = V(i, oj);
        }
    }
    return r;
}

struct SchurResult {
    Matrix t;  ///< quasi upper triangular
    Matrix z;  ///< orthogonal, A = Z T Z^T
    std::vector<Complex> eigenvalues;
};

namespace detail {

/// Householder reduction to upper Hessenberg form with accumulated Q.
inline void hessenberg(Matrix& H, Matrix& Q) {
    const std::size_t n = H.rows();
    Q = Matrix::identity(n);
    if (n < 3) return;
    std::vector<std::vector<double>> vs;
    vs.reserve(n - 2);
    for (std::size_t k = 0; k + 2 < n; ++k) {
        std::vector<double> v(n - k - 1);
        double scale = 0.0;
        for (std::size_t i = k + 1; i < n; ++i) scale += std::abs(H(i, k));
        if (scale == 0.0) {
            vs.push_back({});
            continue;
        }
        double h = 0.0;
        for (std::size_t i = k + 1; i < n; ++i) {
            v[i - k - 1] = H(i, k) / scale;
            h += v[i - k - 1] * v[i - k - 1];
        }
        double g = std::sqrt(h);
        if (v[0] > 0) g = -g;
        h -= v[0] * g;
        v[0] -= g;
        // apply (I - v v^T / h) from both sides
        for (std::size_t j = 0; j < n; ++j) {
            double f = 0.0;
            for (std::size_t i = k + 1; i < n; ++i) f += v[i - k - 1] * H(i, j);
            f /= h;
            for (std::size_t i = k + 1; i < n; ++i) H(i, j) -= f * v[i - k - 1];
        }
        for (std::size_t i = 0; i < n; ++i) {
            double f = 0.0;
            for (std::size_t j = k + 1; j < n; ++j) f += H(i, j) * v[j - k - 1];
            f /= h;
            for (std::size_t j = k + 1; j < n; ++j) H(i, j) -= f * v[j - k - 1];
        }
        H(k + 1, k) = scale * g;
        for (std::size_t i = k + 2; i < n; ++i) H(i, k) = 0.0;
        v.push_back(h);  // stash h at the back for the accumulation pass
        vs.push_back(std::move(v));
    }
    // accumulate Q = P_0 P_1 ... applied to identity, last reflector first
    for (std::size_t kk = vs.size(); kk-- > 0;) {
        const auto& v = vs[kk];
        if (v.empty()) continue;
        const std::size_t k = kk;
        const double h = v.back();
        for (std::size_t j = 0; j < n; ++j) {
            double f = 0.0;
            for (std::size_t i = k + 1; i < n; ++i) f += v[i - k - 1] * Q(i, j);
            f /= h;
            for (std::size_t i = k + 1; i < n; ++i) Q(i, j) -= f * v[i - k - 1];
        }
    }
}

}  // namespace detail

/// Real Schur decomposition via Hessenberg reduction and the implicitly
/// shifted double QR iteration (hqr2 lineage). Remaining 2x2 diagonal blocks
/// always carry complex conjugate eigenvalue pairs; real pairs are split.
inline SchurResult schur_decompose(const Matrix& A) {
    const std::size_t nn = A.rows();
    if (A.cols() != nn) throw BadDimension("schur: not square");
    SchurResult res;
    res.t = A;
    res.eigenvalues.assign(nn, Complex(0, 0));
    if (nn == 0) {
        res.z = Matrix(0, 0);
        return res;
    }
    Matrix& H = res.t;
    Matrix V;
    detail::hessenberg(H, V);  // A = V H V^T

    std::vector<double> dr(nn, 0.0), di(nn, 0.0);
    const double eps = 2.0 * std::numeric_limits<double>::epsilon();
    double norm = 0.0;
    for (std::size_t i = 0; i < nn; ++i)
        for (std::size_t j = (i > 0 ? i - 1 : 0); j < nn; ++j) norm += std::abs(H(i, j));

    int n = static_cast<int>(nn) - 1;
    double exshift = 0.0;
    double p = 0, q = 0, r = 0, s = 0, z = 0, w, x, y;
    int iter = 0;
    long total_steps = 0;
    const long budget = static_cast<long>(tols().qr_sweeps_per_dim) * static_cast<long>(nn);

    auto at = [&H](int i, int j) -> double& { return H(static_cast<std::size_t>(i),
                                                       static_cast<std::size_t>(j)); };
    auto vat = [&V](int i, int j) -> double& { return V(static_cast<std::size_t>(i),
                                                        static_cast<std::size_t>(j)); };
    const int inn = static_cast<int>(nn);

    while (n >= 0) {
        int l = n;
        while (l > 0) {
            s = std::abs(at(l - 1, l - 1)) + std::abs(at(l, l));
            if (s == 0.0) s = norm;
            if (std::abs(at(l, l - 1)) < eps * s) {
                at(l, l - 1) = 0.0;
                break;
            }
            l--;
        }
        if (l == n) {
            at(n, n) += exshift;
            dr[n] = at(n, n);
            di[n] = 0.0;
            n--;
            iter = 0;
        } else if (l == n - 1) {
            w = at(n, n - 1) * at(n - 1, n);
            p = (at(n - 1, n - 1) - at(n, n)) / 2.0;
            q = p * p + w;
            z = std::sqrt(std::abs(q));
            at(n, n) += exshift;
            at(n - 1, n - 1) += exshift;
            x = at(n, n);
            if (q >= 0) {
                // real pair: rotate the block upper triangular
                z = (p >= 0) ? p + z : p - z;
                dr[n - 1] = x + z;
                dr[n] = (z != 0.0) ? x - w / z : dr[n - 1];
                di[n - 1] = di[n] = 0.0;
                x = at(n, n - 1);
                s = std::abs(x) + std::abs(z);
                p = x / s;
                q = z / s;
                r = std::sqrt(p * p + q * q);
                p /= r;
                q /= r;
                for (int j = n - 1; j < inn; ++j) {
                    z = at(n - 1, j);
                    at(n - 1, j) = q * z + p * at(n, j);
                    at(n, j) = q * at(n, j) - p * z;
                }
                for (int i = 0; i <= n; ++i) {
                    z = at(i, n - 1);
                    at(i, n - 1) = q * z + p * at(i, n);
                    at(i, n) = q * at(i, n) - p * z;
                }
                for (int i = 0; i < inn; ++i) {
                    z = vat(i, n - 1);
                    vat(i, n - 1) = q * z + p * vat(i, n);
                    vat(i, n) = q * vat(i, n) - p * z;
                }
            } else {
                dr[n - 1] = dr[n] = x + p;
                di[n - 1] = z;
                di[n] = -z;
            }
            n -= 2;
            iter = 0;
        } else {
            // form the Francis shift
            x = at(n, n);
            y = 0.0;
            w = 0.0;
            if (l < n) {
                y = at(n - 1, n - 1);
                w = at(n, n - 1) * at(n - 1, n);
            }
            if (iter == 10) {
                exshift += x;
                for (int i = l; i <= n; ++i) at(i, i) -= x;
                s = std::abs(at(n, n - 1)) + std::abs(at(n - 1, n - 2));
                x = y = 0.75 * s;
                w = -0.4375 * s * s;
            }
            if (iter == 30) {
                s = (y - x) / 2.0;
                s = s * s + w;
                if (s > 0) {
                    s = std::sqrt(s);
                    if (y < x) s = -s;
                    s = x - w / ((y - x) / 2.0 + s);
                    for (int i = l; i <= n; ++i) at(i, i) -= s;
                    exshift += s;
                    x = y = w = 0.964;
                }
            }
            iter++;
            if (++total_steps > budget)
                throw NoConvergence("qr iteration exceeded its sweep budget");

            int m = n - 2;
            while (m >= l) {
                z = at(m, m);
                r = x - z;
                s = y - z;
                p = (r * s - w) / at(m + 1, m) + at(m, m + 1);
                q = at(m + 1, m + 1) - z - r - s;
                r = at(m + 2, m + 1);
                s = std::abs(p) + std::abs(q) + std::abs(r);
                p /= s;
                q /= s;
                r /= s;
                if (m == l) break;
                if (std::abs(at(m, m - 1)) * (std::abs(q) + std::abs(r)) <
                    eps * (std::abs(p) * (std::abs(at(m - 1, m - 1)) + std::abs(z) +
                                          std::abs(at(m + 1, m + 1)))))
                    break;
                m--;
            }
            for (int i = m + 2; i <= n; ++i) {
                at(i, i - 2) = 0.0;
                if (i > m + 2) at(i, i - 3) = 0.0;
            }
            // double QR sweep on rows l..n, columns m..n
            for (int k = m; k < n; ++k) {
                const bool notlast = (k != n - 1);
                if (k != m) {
                    p = at(k, k - 1);
                    q = at(k + 1, k - 1);
                    r = notlast ? at(k + 2, k - 1) : 0.0;
                    x = std::abs(p) + std::abs(q) + std::abs(r);
                    if (x != 0.0) {
                        p /= x;
                        q /= x;
                        r /= x;
                    }
                }
                if (x == 0.0) break;
                s = std::sqrt(p * p + q * q + r * r);
                if (p < 0) s = -s;
                if (s != 0.0) {
                    if (k != m)
                        at(k, k - 1) = -s * x;
                    else if (l != m)
                        at(k, k - 1) = -at(k, k - 1);
                    p += s;
                    x = p / s;
                    y = q / s;
                    z = r / s;
                    q /= p;
                    r /= p;
                    for (int j = k; j < inn; ++j) {
                        p = at(k, j) + q * at(k + 1, j);
                        if (notlast) {
                            p += r * at(k + 2, j);
                            at(k + 2, j) -= p * z;
                        }
                        at(k, j) -= p * x;
                        at(k + 1, j) -= p * y;
                    }
                    for (int i = 0; i <= std::min(n, k + 3); ++i) {
                        p = x * at(i, k) + y * at(i, k + 1);
                        if (notlast) {
                            p += z * at(i, k + 2);
                            at(i, k + 2) -= p * r;
                        }
                        at(i, k) -= p;
                        at(i, k + 1) -= p * q;
                    }
                    for (int i = 0; i < inn; ++i) {
                        p = x * vat(i, k) + y * vat(i, k + 1);
                        if (notlast) {
                            p += z * vat(i, k + 2);
                            vat(i, k + 2) -= p * r;
                        }
                        vat(i, k) -= p;
                        vat(i, k + 1) -= p * q;
                    }
                }
            }
        }
    }

    // tidy the quasi-triangular structure: drop converged subdiagonal dust
    for (std::size_t i = 2; i < nn; ++i)
        for (std::size_t j = 0; j + 1 < i; ++j) H(i, j) = 0.0;
    {
        std::vector<bool> in_pair(nn, false);
        for (std::size_t k = 0; k < nn;) {
            if (di[k] != 0.0 && k + 1 < nn) {
                in_pair[k + 1] = true;
                k += 2;
            } else {
                k += 1;
            }
        }
        for (std::size_t i = 1; i < nn; ++i)
            if (!in_pair[i]) H(i, i - 1) = 0.0;
    }

    for (std::size_t i = 0; i < nn; ++i) res.eigenvalues[i] = Complex(dr[i], di[i]);
    res.z = V;
    return res;
}

/// Eigenvalues of a real square matrix, conjugate pairs adjacent.
inline EigenDecomposition eigenvalues(const Matrix& A) {
    SchurResult s = schur_decompose(A);
    EigenDecomposition e;
    e.eigenvalues = std::move(s.eigenvalues);
    std::sort(e.eigenvalues.begin(), e.eigenvalues.end(), [](const Complex& a, const Complex& b) {
        if (a.real() != b.real()) return a.real() < b.real();
        return a.imag() > b.imag();
    });
    return e;
}

inline double spectral_abscissa(const Matrix& A) {
    if (A.rows() == 0) return -std::numeric_limits<double>::infinity();
    double m = -std::numeric_limits<double>::infinity();
    for (const Complex& l : schur_decompose(A).eigenvalues) m = std::max(m, l.real());
    return m;
}

namespace detail {

/// Reduce (A, b, c) once, then evaluate c (sI - A)^{-1} b in O(n^2) per point
/// via a Givens solve on the shifted Hessenberg matrix.
struct HessenbergEvaluator {
    Matrix h;
    std::vector<double> bh;
    std::vector<double> ch;

    HessenbergEvaluator(const Matrix& A, const Matrix& b, const Matrix& c) {
        const std::size_t n = A.rows();
        h = A;
        Matrix Q;
        hessenberg(h, Q);  // A = Q H Q^T, so G(s) = (cQ) (sI - H)^{-1} (Q^T b)
        bh.resize(n);
        ch.resize(n);
        for (std::size_t i = 0; i < n; ++i) {
            double sb = 0.0, sc = 0.0;
            for (std::size_t j = 0; j < n; ++j) {
                sb += Q(j, i) * b(j, 0);
                sc += c(0, j) * Q(j, i);
            }
            bh[i] = sb;
            ch[i] = sc;
        }
    }

    Complex eval(Complex s) const {
        const std::size_t n = h.rows();
        if (n == 0) return Complex(0, 0);
        // Solve (sI - H) x = bh with Givens elimination of the subdiagonal.
        std::vector<std::vector<Complex>> m(n);
        std::vector<Complex> rhs(bh.begin(), bh.end());
        for (std::size_t i = 0; i < n; ++i) {
            const std::size_t j0 = (i > 0 ? i - 1 : 0);
            m[i].assign(n - j0, Complex(0, 0));
            for (std::size_t j = j0; j < n; ++j) m[i][j - j0] = -h(i, j);
            m[i][i - j0] += s;
        }
        auto entry = [&](std::size_t i, std::size_t j) -> Complex& {
            const std::size_t j0 = (i > 0 ? i - 1 : 0);
            return m[i][j - j0];
        };
        for (std::size_t k = 0; k + 1 < n; ++k) {
            const Complex a = entry(k, k);
            const Complex bsub = entry(k + 1, k);
            const double na = std::abs(a), nb = std::abs(bsub);
            if (nb == 0.0) continue;
            double denom = std::hypot(na, nb);
            if (denom == 0.0) throw SingularMatrix("pole hit on evaluation grid");
            const Complex cg = std::conj(a) / denom;
            const Complex sg = std::conj(bsub) / denom;
            for (std::size_t j = k; j < n; ++j) {
                const Complex t1 = entry(k, j);
                const Complex t2 = entry(k + 1, j);
                entry(k, j) = cg * t1 + sg * t2;
                entry(k + 1, j) = -std::conj(sg) * t1 + std::conj(cg) * t2;
            }
            const Complex r1 = rhs[k], r2 = rhs[k + 1];
            rhs[k] = cg * r1 + sg * r2;
            rhs[k + 1] = -std::conj(sg) * r1 + std::conj(cg) * r2;
        }
        for (std::size_t k = n; k-- > 0;) {
            Complex acc = rhs[k];
            for (std::size_t j = k + 1; j < n; ++j) acc -= entry(k, j) * rhs[j];
            const Complex d = entry(k, k);
            if (std::abs(d) == 0.0) throw SingularMatrix("pole hit on evaluation grid");
            rhs[k] = acc / d;
        }
        Complex out(0, 0);
        for (std::size_t i = 0; i < n; ++i) out += ch[i] * rhs[i];
        return out;
    }
};

}  // namespace detail

}  // namespace baltrunc
