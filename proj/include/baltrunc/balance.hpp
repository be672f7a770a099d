#pragma once

#include <cmath>
#include <vector>

#include "baltrunc/gramian.hpp"
#include "baltrunc/hinfnorm.hpp"
#include "baltrunc/state_space.hpp"

namespace baltrunc {

/// Balanced realization together with its Hankel and sign data. canonical is
/// set when the realization satisfies A = S A^T S and b = (c S)^T.
struct BalancedForm {
    StateSpace sys;
    HankelSpectrum sigma;
    SignSpectrum signs;
    bool canonical = false;
};

enum class ReductionMethod { truncation, singular_perturbation };

struct ReductionCertificate {
    std::size_t order_r = 0;
    StateSpace reduced;
    ReductionMethod method = ReductionMethod::truncation;
    double bound = 0.0;           ///< 2 (sigma_{k+1} + ... + sigma_q), distinct values
    double achieved_error = 0.0;  ///< H-infinity norm of the error system
    bool tight = false;           ///< |bound - achieved| <= cert_tol * bound
    bool s2_uniform = false;      ///< truncated sign parameters all equal
};

namespace detail {

inline bool canonical_symmetry_holds(const StateSpace& sys, const std::vector<int>& signs) {
    const std::size_t n = sys.size();
    Matrix sas(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) sas(i, j) = signs[i] * signs[j] * sys.a(j, i);
    const double tol = tols().canonical_sym_rel;
    if ((sas - sys.a).norm_fro() > tol * std::max(sys.a.norm_fro(), 1e-300)) return false;
    double diff = 0.0, scale = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        diff += std::pow(sys.b(i, 0) - signs[i] * sys.c(0, i), 2);
        scale += sys.b(i, 0) * sys.b(i, 0);
    }
    return std::sqrt(diff) <= tol * std::max(std::sqrt(scale), 1e-300);
}

}  // namespace detail

/// Square-root balancing: Cholesky factors of both Gramians, one SVD of their
/// product, and the similarity T = L_P V Sigma^{-1/2}.
inline BalancedForm balance(const StateSpace& sys) {
    sys.validate();
    const std::size_t n = sys.size();
    GramianPair g = gramians(sys);  // throws NotStable on unstable input
    Matrix lp, lq;
    try {
        lp = cholesky(g.p);
        lq = cholesky(g.q);
    } catch (const NotPositiveDefinite&) {
        throw NotMinimal("balance: gramian not positive definite");
    }
    SvdResult svd = jacobi_svd(lq.transpose() * lp);
    if (n > 0) {
        const double top = svd.sigma.front();
        if (!(top > 0.0) || svd.sigma.back() <= tols().hsv_minimal_rel * top)
            throw NotMinimal("balance: vanishing hankel singular value");
    }
    Matrix t(n, n), tinv(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        const double rs = 1.0 / std::sqrt(svd.sigma[i]);
        for (std::size_t j = 0; j < n; ++j) {
            double acc = 0.0;
            for (std::size_t k = 0; k < n; ++k) acc += lp(j, k) * svd.v(k, i);
            t(j, i) = acc * rs;
            double acc2 = 0.0;
            for (std::size_t k = 0; k < n; ++k) acc2 += svd.u(k, i) * lq(j, k);
            tinv(i, j) = acc2 * rs;
        }
    }
    BalancedForm bf;
    bf.sys = StateSpace(tinv * sys.a * t, tinv * sys.b, sys.c * t, sys.d);
    bf.sigma = detail::group_sigmas(svd.sigma);
    bf.signs = sign_spectrum(bf.sys);
    bf.canonical = detail::canonical_symmetry_holds(bf.sys, bf.signs.signs);
    return bf;
}

/// Canonical balanced realization from its invariants: a_ij =
/// -gamma_i gamma_j / (s_i s_j sigma_i + sigma_j), b = gamma, c_i = s_i gamma_i.
inline StateSpace build_canonical(const std::vector<double>& sigma, const std::vector<int>& signs,
                                  const std::vector<double>& gamma, double d = 0.0) {
    const std::size_t n = sigma.size();
    if (signs.size() != n || gamma.size() != n) throw BadInput("build_canonical: length mismatch");
    for (std::size_t i = 0; i < n; ++i) {
        if (!(sigma[i] > 0.0) || !std::isfinite(sigma[i]))
            throw BadInput("build_canonical: sigma must be positive");
        if (i + 1 < n && !(sigma[i] > sigma[i + 1]))
            throw BadInput("build_canonical: sigma must be strictly decreasing");
        if (!(gamma[i] > 0.0) || !std::isfinite(gamma[i]))
            throw BadInput("build_canonical: gamma must be positive");
        if (signs[i] != 1 && signs[i] != -1) throw BadInput("build_canonical: signs must be +-1");
    }
    Matrix a(n, n), b(n, 1), c(1, n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j)
            a(i, j) = -gamma[i] * gamma[j] / (signs[i] * signs[j] * sigma[i] + sigma[j]);
        b(i, 0) = gamma[i];
        c(0, i) = signs[i] * gamma[i];
    }
    return StateSpace(std::move(a), std::move(b), std::move(c), d);
}

/// Deterministic canonical representative: balance, read off (sigma, s,
/// gamma), rebuild through the closed-form construction. gamma is recovered
/// from the Lyapunov diagonal identity 2 sigma_i a_ii + gamma_i^2 = 0 and
/// normalized positive.
inline BalancedForm to_canonical(const StateSpace& sys) {
    BalancedForm bal = balance(sys);
    for (std::size_t m : bal.sigma.multiplicities)
        if (m > 1) throw RepeatedHsv("to_canonical: repeated hankel singular values");
    const std::size_t n = sys.size();
    std::vector<double> sig = bal.sigma.expanded();
    std::vector<double> gamma(n);
    for (std::size_t i = 0; i < n; ++i)
        gamma[i] = std::sqrt(2.0 * sig[i] * std::abs(bal.sys.a(i, i)));
    BalancedForm out;
    out.sys = build_canonical(sig, bal.signs.signs, gamma, sys.d);
    out.sigma = bal.sigma;
    out.signs = bal.signs;
    out.canonical = detail::canonical_symmetry_holds(out.sys, out.signs.signs);
    return out;
}

namespace detail {

inline void require_admissible(const BalancedForm& bal, std::size_t r) {
    const std::size_t n = bal.sys.size();
    if (r < 1 || r > n || !bal.sigma.admissible_order(r))
        throw SplitsMultiplicityGroup("order r does not land on a multiplicity-group boundary");
}

}  // namespace detail

/// Balanced truncation: keep the leading r states of the balanced form.
inline StateSpace truncate(const BalancedForm& bal, std::size_t r) {
    detail::require_admissible(bal, r);
    if (r == bal.sys.size()) return bal.sys;
    return leading_subsystem(bal.sys, r);
}

/// Singular perturbation approximation of order r:
///   A_sp = A11 - A12 A22^{-1} A21,  b_sp = b1 - A12 A22^{-1} b2,
///   c_sp = c1 - c2 A22^{-1} A21,    d_sp = d  - c2 A22^{-1} b2.
inline StateSpace singular_perturbation(const BalancedForm& bal, std::size_t r) {
    detail::require_admissible(bal, r);
    const std::size_t n = bal.sys.size();
    if (r == n) return bal.sys;
    const Matrix& a = bal.sys.a;
    const std::size_t m = n - r;
    Matrix a11 = a.block(0, 0, r, r), a12 = a.block(0, r, r, m);
    Matrix a21 = a.block(r, 0, m, r), a22 = a.block(r, r, m, m);
    Matrix b1 = bal.sys.b.block(0, 0, r, 1), b2 = bal.sys.b.block(r, 0, m, 1);
    Matrix c1 = bal.sys.c.block(0, 0, 1, r), c2 = bal.sys.c.block(0, r, 1, m);
    Matrix rhs(m, r + 1);
    rhs.set_block(0, 0, a21);
    rhs.set_block(0, r, b2);
    Matrix sol;
    try {
        sol = lu_solve(a22, rhs);
    } catch (const SingularMatrix&) {
        throw SingularA22("singular_perturbation: A22 is singular");
    }
    Matrix ia21 = sol.block(0, 0, m, r), ib2 = sol.block(0, r, m, 1);
    Matrix asp = a11 - a12 * ia21;
    Matrix bsp = b1 - a12 * ib2;
    Matrix csp = c1 - c2 * ia21;
    const double dsp = bal.sys.d - (c2 * ib2)(0, 0);
    return StateSpace(std::move(asp), std::move(bsp), std::move(csp), dsp);
}

/// psi(0) = -A22 + A21 A11^{-1} A12 for the partition at order r.
inline Matrix psi_zero(const BalancedForm& bal, std::size_t r) {
    const std::size_t n = bal.sys.size();
    if (r < 1 || r >= n) throw BadDimension("psi_zero: need 1 <= r < n");
    const Matrix& a = bal.sys.a;
    const std::size_t m = n - r;
    Matrix a11 = a.block(0, 0, r, r), a12 = a.block(0, r, r, m);
    Matrix a21 = a.block(r, 0, m, r), a22 = a.block(r, r, m, m);
    Matrix x;
    try {
        x = lu_solve(a11, a12);
    } catch (const SingularMatrix&) {
        throw SingularA11("psi_zero: A11 is singular");
    }
    return a21 * x - a22;
}

/// Reduce and certify: theoretical bound, achieved H-infinity error, and the
/// tight verdict. Reduction is taken from the deterministic canonical
/// representative when all Hankel singular values are simple; with repeated
/// values the square-root balanced realization is used directly.
inline ReductionCertificate certify(const StateSpace& sys, std::size_t r, ReductionMethod method,
                                    double cert_tol = tols().cert_tol,
                                    double hinf_tol = tols().hinf_tol) {
    BalancedForm bal = balance(sys);
    detail::require_admissible(bal, r);
    bool simple = true;
    for (std::size_t m : bal.sigma.multiplicities)
        if (m > 1) simple = false;
    BalancedForm work;
    if (simple) {
        const std::size_t n = sys.size();
        std::vector<double> sig = bal.sigma.expanded();
        std::vector<double> gamma(n);
        for (std::size_t i = 0; i < n; ++i)
            gamma[i] = std::sqrt(2.0 * sig[i] * std::abs(bal.sys.a(i, i)));
        work.sys = build_canonical(sig, bal.signs.signs, gamma, sys.d);
        work.sigma = bal.sigma;
        work.signs = bal.signs;
        work.canonical = true;
    } else {
        work = bal;
    }

    ReductionCertificate cert;
    cert.order_r = r;
    cert.method = method;
    std::size_t acc = 0;
    cert.bound = 0.0;
    for (std::size_t gidx = 0; gidx < work.sigma.sigmas.size(); ++gidx) {
        if (acc >= r) cert.bound += 2.0 * work.sigma.sigmas[gidx];
        acc += work.sigma.multiplicities[gidx];
    }
    cert.reduced = (method == ReductionMethod::truncation) ? truncate(work, r)
                                                           : singular_perturbation(work, r);
    cert.achieved_error = hinf_norm(error_system(work.sys, cert.reduced), hinf_tol).norm;
    cert.s2_uniform = (r == work.sys.size()) || work.signs.trailing_uniform(r);
    cert.tight = cert.bound > 0.0
                     ? std::abs(cert.bound - cert.achieved_error) <= cert_tol * cert.bound
                     : cert.achieved_error <= 1e-12;
    return cert;
}

}  // namespace baltrunc
