#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <vector>

#include "baltrunc/balance.hpp"
#include "baltrunc/gramian.hpp"
#include "baltrunc/state_space.hpp"

namespace baltrunc {

/// Arrowhead realization: A is nonzero only on the diagonal (d, head first),
/// the first row (alpha) and the first column (beta); b = gamma e1, c = e1^T.
struct ArrowheadRealization {
    std::vector<double> d;      ///< length n, d[0] is the head
    std::vector<double> alpha;  ///< length n-1, first row
    std::vector<double> beta;   ///< length n-1, first column
    double gamma = 1.0;

    ArrowheadRealization() = default;
    ArrowheadRealization(std::vector<double> diag, std::vector<double> first_row,
                         std::vector<double> first_col, double g)
        : d(std::move(diag)), alpha(std::move(first_row)), beta(std::move(first_col)), gamma(g) {
        validate();
    }

    std::size_t size() const { return d.size(); }

    void validate() const {
        if (d.empty()) throw BadInput("arrowhead: empty diagonal");
        if (alpha.size() != d.size() - 1 || beta.size() != d.size() - 1)
            throw BadDimension("arrowhead: arm length mismatch");
        if (!(gamma != 0.0) || !std::isfinite(gamma)) throw BadInput("arrowhead: gamma must be nonzero");
        for (double x : d)
            if (!std::isfinite(x)) throw BadInput("arrowhead: nonfinite entry");
        for (std::size_t i = 0; i + 1 < d.size(); ++i)
            if (!std::isfinite(alpha[i]) || !std::isfinite(beta[i]))
                throw BadInput("arrowhead: nonfinite entry");
    }

    double scale() const {
        double s = 0.0;
        for (double x : d) s = std::max(s, std::abs(x));
        for (double x : alpha) s = std::max(s, std::abs(x));
        for (double x : beta) s = std::max(s, std::abs(x));
        return s;
    }
};

/// Outcome of reading the sign parameters off an arrowhead realization.
struct SignDiagnosis {
    std::vector<int> sign_multiset;  ///< in state order: sign(gamma), then sign(gamma a_i b_i)
    bool hypothesis_ok = false;      ///< minimal, all d_i < 0, every leading subsystem stable
    bool uniform_trailing = false;   ///< sign(alpha_i beta_i) = -1 for every arm
    /// canonical slot of each arrow state (1-based), present when the
    /// hypotheses hold and the multisets could be matched
    std::optional<std::vector<std::size_t>> canonical_permutation;
};

inline StateSpace to_state_space(const ArrowheadRealization& ar) {
    ar.validate();
    const std::size_t n = ar.size();
    Matrix a(n, n), b(n, 1), c(1, n);
    a(0, 0) = ar.d[0];
    for (std::size_t i = 1; i < n; ++i) {
        a(i, i) = ar.d[i];
        a(0, i) = ar.alpha[i - 1];
        a(i, 0) = ar.beta[i - 1];
    }
    b(0, 0) = ar.gamma;
    c(0, 0) = 1.0;
    return StateSpace(std::move(a), std::move(b), std::move(c), 0.0);
}

/// Inverse of the arrow matrix as a diagonal plus a rank-one update:
///   A^{-1} = [[0,0],[0,D^{-1}]] + rho [-1; D^{-1} beta] [-1, alpha D^{-1}]
/// with rho = 1 / (d1 - alpha D^{-1} beta).
inline Matrix arrowhead_inverse(const ArrowheadRealization& ar) {
    ar.validate();
    const std::size_t n = ar.size();
    const double sc = std::max(ar.scale(), 1e-300);
    for (std::size_t i = 1; i < n; ++i)
        if (std::abs(ar.d[i]) <= tols().arrow_shift_rel * sc)
            throw SingularShift("arrowhead_inverse: zero tail diagonal entry");
    double schur = ar.d[0];
    for (std::size_t i = 1; i < n; ++i) schur -= ar.alpha[i - 1] * ar.beta[i - 1] / ar.d[i];
    if (std::abs(schur) <= tols().arrow_shift_rel * sc)
        throw SingularShift("arrowhead_inverse: singular head Schur complement");
    const double rho = 1.0 / schur;
    Matrix inv(n, n);
    inv(0, 0) = rho;
    for (std::size_t j = 1; j < n; ++j) inv(0, j) = -rho * ar.alpha[j - 1] / ar.d[j];
    for (std::size_t i = 1; i < n; ++i) {
        const double bi = ar.beta[i - 1] / ar.d[i];
        inv(i, 0) = -rho * bi;
        inv(i, i) = 1.0 / ar.d[i];
        for (std::size_t j = 1; j < n; ++j) inv(i, j) += rho * bi * ar.alpha[j - 1] / ar.d[j];
    }
    return inv;
}

/// G(s) = gamma / (s - d1 - sum_i alpha_i beta_i / (s - d_i)).
inline Complex arrowhead_transfer(const ArrowheadRealization& ar, Complex s) {
    ar.validate();
    const std::size_t n = ar.size();
    const double sc = std::max(ar.scale(), std::abs(s));
    Complex den = s - ar.d[0];
    for (std::size_t i = 1; i < n; ++i) {
        const Complex shift = s - ar.d[i];
        if (std::abs(shift) <= tols().arrow_zero_rel * std::max(sc, 1e-300))
            throw PoleHit("arrowhead_transfer: s collides with a tail diagonal entry");
        den -= ar.alpha[i - 1] * ar.beta[i - 1] / shift;
    }
    if (std::abs(den) == 0.0) throw PoleHit("arrowhead_transfer: s is a pole");
    return ar.gamma / den;
}

/// Minimal iff every arm entry is nonzero and the tail diagonal entries are
/// pairwise distinct.
inline bool check_arrowhead_minimality(const ArrowheadRealization& ar) {
    ar.validate();
    const std::size_t n = ar.size();
    if (n == 1) return true;
    double arm_scale = 0.0;
    for (std::size_t i = 0; i + 1 < n; ++i)
        arm_scale = std::max({arm_scale, std::abs(ar.alpha[i]), std::abs(ar.beta[i])});
    for (std::size_t i = 0; i + 1 < n; ++i)
        if (std::abs(ar.alpha[i]) <= tols().arrow_zero_rel * arm_scale ||
            std::abs(ar.beta[i]) <= tols().arrow_zero_rel * arm_scale)
            return false;
    double dscale = 0.0;
    for (std::size_t i = 1; i < n; ++i) dscale = std::max(dscale, std::abs(ar.d[i]));
    for (std::size_t i = 1; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            if (std::abs(ar.d[i] - ar.d[j]) <= tols().arrow_gap_rel * std::max(dscale, 1e-300))
                return false;
    return true;
}

namespace detail {

inline int sgn(double x) { return x >= 0.0 ? 1 : -1; }

/// Hypotheses of the sign-reading theorem: minimal, all diagonal entries
/// negative, every leading subsystem asymptotically stable.
inline bool arrow_hypotheses_hold(const ArrowheadRealization& ar, const StateSpace& dense) {
    if (!check_arrowhead_minimality(ar)) return false;
    for (double di : ar.d)
        if (!(di < 0.0)) return false;
    const std::size_t n = ar.size();
    for (std::size_t k = 1; k <= n; ++k)
        if (spectral_abscissa(dense.a.block(0, 0, k, k)) >= 0.0) return false;
    return true;
}

}  // namespace detail

/// Read the sign parameters off the arrow: sign(gamma) for the head state and
/// sign(gamma alpha_i beta_i) for each arm. When the trailing products are
/// all negative the canonical order is forced (identity permutation); in the
/// mixed case the permutation is recovered by matching against the dense
/// cross-Gramian spectrum, breaking ties inside equal-sign groups by the
/// states' cross-Gramian diagonal participation.
inline SignDiagnosis diagnose_signs(const ArrowheadRealization& ar) {
    ar.validate();
    const std::size_t n = ar.size();
    SignDiagnosis diag;
    diag.sign_multiset.resize(n);
    diag.sign_multiset[0] = detail::sgn(ar.gamma);
    diag.uniform_trailing = true;
    for (std::size_t i = 1; i < n; ++i) {
        const double prod = ar.alpha[i - 1] * ar.beta[i - 1];
        diag.sign_multiset[i] = detail::sgn(ar.gamma * prod);
        if (!(prod < 0.0)) diag.uniform_trailing = false;
    }
    if (n == 1) diag.uniform_trailing = true;

    StateSpace dense = to_state_space(ar);
    diag.hypothesis_ok = detail::arrow_hypotheses_hold(ar, dense);
    if (!diag.hypothesis_ok) return diag;

    if (diag.uniform_trailing || n == 1) {
        std::vector<std::size_t> ident(n);
        for (std::size_t i = 0; i < n; ++i) ident[i] = i + 1;
        diag.canonical_permutation = std::move(ident);
        return diag;
    }

    SignSpectrum ss = sign_spectrum(dense);
    Matrix x = cross_gramian(dense);
    // group canonical slots and arrow states by sign, pair them off in order
    // of |lambda| (slots) against |X_jj| participation (states)
    std::vector<std::size_t> perm(n, 0);
    bool ok = true;
    for (int sign : {1, -1}) {
        std::vector<std::size_t> slots;
        for (std::size_t i = 0; i < n; ++i)
            if (ss.signs[i] == sign) slots.push_back(i);
        std::vector<std::size_t> states;
        for (std::size_t j = 0; j < n; ++j)
            if (diag.sign_multiset[j] == sign) states.push_back(j);
        if (slots.size() != states.size()) {
            ok = false;
            break;
        }
        std::sort(states.begin(), states.end(), [&](std::size_t a, std::size_t b) {
            return std::abs(x(a, a)) > std::abs(x(b, b));
        });
        for (std::size_t k = 0; k < slots.size(); ++k) perm[states[k]] = slots[k] + 1;
    }
    if (ok) diag.canonical_permutation = std::move(perm);
    return diag;
}

/// Symmetric relabeling of the arm states so that reading the permuted arrow
/// gives the sign parameters in canonical (sigma-descending) order. Returns
/// the relabeled arrow and the canonical slot k taken by the head state; the
/// arm entries appear in the order of the remaining slots.
inline std::pair<ArrowheadRealization, std::size_t> permuted_realization(
    const ArrowheadRealization& ar) {
    SignDiagnosis diag = diagnose_signs(ar);
    if (!diag.hypothesis_ok || !diag.canonical_permutation)
        throw HypothesisViolated("permuted_realization: sign-reading hypotheses do not hold");
    const std::size_t n = ar.size();
    const auto& perm = *diag.canonical_permutation;
    const std::size_t k = perm[0];
    std::vector<std::size_t> arm_order(n - 1);
    for (std::size_t j = 1; j < n; ++j) arm_order[j - 1] = j;
    std::sort(arm_order.begin(), arm_order.end(),
              [&](std::size_t a, std::size_t b) { return perm[a] < perm[b]; });
    ArrowheadRealization out;
    out.gamma = ar.gamma;
    out.d.push_back(ar.d[0]);
    for (std::size_t j : arm_order) {
        out.d.push_back(ar.d[j]);
        out.alpha.push_back(ar.alpha[j - 1]);
        out.beta.push_back(ar.beta[j - 1]);
    }
    out.validate();
    return {out, k};
}

namespace detail {

/// High-to-low coefficient polynomial evaluation. Horner in extended
/// precision: residue extraction divides two evaluations near roots.
inline double poly_eval(const std::vector<double>& coeffs, double x) {
    long double acc = 0.0L;
    for (double c : coeffs) acc = acc * x + c;
    return static_cast<double>(acc);
}

inline std::vector<double> poly_derivative(const std::vector<double>& coeffs) {
    const std::size_t deg = coeffs.size() - 1;
    std::vector<double> out;
    for (std::size_t i = 0; i + 1 < coeffs.size(); ++i)
        out.push_back(coeffs[i] * static_cast<double>(deg - i));
    if (out.empty()) out.push_back(0.0);
    return out;
}

/// Roots via the companion matrix of the monic normalization. Real roots get
/// a few Newton steps on the extended-precision Horner form; the companion
/// eigenvalues alone are not accurate enough once residues divide by root
/// gaps.
inline std::vector<Complex> poly_roots(const std::vector<double>& coeffs) {
    const std::size_t deg = coeffs.size() - 1;
    if (deg == 0) return {};
    Matrix comp(deg, deg);
    for (std::size_t j = 0; j < deg; ++j) comp(0, j) = -coeffs[j + 1] / coeffs[0];
    for (std::size_t i = 1; i < deg; ++i) comp(i, i - 1) = 1.0;
    std::vector<Complex> roots = eigenvalues(comp).eigenvalues;
    const std::vector<double> der = poly_derivative(coeffs);
    for (Complex& z : roots) {
        if (std::abs(z.imag()) > 1e-6 * (1.0 + std::abs(z))) continue;
        double x = z.real();
        for (int it = 0; it < 3; ++it) {
            const double f = poly_eval(coeffs, x);
            const double fp = poly_eval(der, x);
            if (fp == 0.0) break;
            const double step = f / fp;
            x -= step;
            if (std::abs(step) <= 1e-17 * (1.0 + std::abs(x))) break;
        }
        z = Complex(x, z.imag());
    }
    return roots;
}

}  // namespace detail

/// Canonical arrowhead form of a strictly proper transfer function with
/// distinct real zeros: divide D = N Q + R with Q = mu s + q0, expand R/N in
/// partial fractions, and place the residues on the first row with a first
/// column of -1.
inline ArrowheadRealization canonical_arrowhead_from_tf(const std::vector<double>& numer,
                                                        const std::vector<double>& denom) {
    if (numer.empty() || denom.size() < 2) throw DegreeMismatch("need deg(D) >= 1");
    if (numer.size() + 1 != denom.size())
        throw DegreeMismatch("need deg(N) = deg(D) - 1 exactly");
    double nscale = 0.0, dscale = 0.0;
    for (double c : numer) nscale = std::max(nscale, std::abs(c));
    for (double c : denom) dscale = std::max(dscale, std::abs(c));
    if (!(std::abs(numer.front()) > 1e-13 * nscale) || !(std::abs(denom.front()) > 1e-13 * dscale))
        throw DegreeMismatch("leading coefficient vanishes");
    const std::size_t n = denom.size() - 1;

    for (const Complex& p : detail::poly_roots(denom))
        if (!(p.real() < 0.0)) throw NotStable("denominator is not Hurwitz");

    const double mu = denom[0] / numer[0];
    if (n == 1) {
        // G = c / (d0 s + d1): scalar arrow
        const double gamma = numer[0] / denom[0];
        const double head = -denom[1] / denom[0];
        return ArrowheadRealization({head}, {}, {}, gamma);
    }

    // long division D = N (mu s + q0) + R; coefficients indexed high to low
    const double q0 = (denom[1] - mu * numer[1]) / numer[0];
    std::vector<double> r_coeffs(n - 1);  // degrees n-2 down to 0
    for (std::size_t j = 2; j <= n; ++j) {
        double v = denom[j];
        if (j <= n - 1) v -= mu * numer[j];
        v -= q0 * numer[j - 1];
        r_coeffs[j - 2] = v;
    }
    double rmax = 0.0;
    for (double c : r_coeffs) rmax = std::max(rmax, std::abs(c));
    if (rmax <= 1e-12 * dscale)
        throw NotCoprime("numerator divides the denominator");

    std::vector<Complex> zro = detail::poly_roots(numer);
    std::vector<double> zr;
    double zscale = 1.0;
    for (const Complex& z : zro) zscale = std::max(zscale, std::abs(z));
    for (const Complex& z : zro) {
        if (std::abs(z.imag()) > 1e-8 * zscale)
            throw ComplexZeros("numerator has complex zeros");
        zr.push_back(z.real());
    }
    std::sort(zr.begin(), zr.end(), std::greater<double>());
    for (std::size_t i = 0; i + 1 < zr.size(); ++i)
        if (std::abs(zr[i] - zr[i + 1]) <= 1e-8 * zscale)
            throw RepeatedZeros("numerator zeros are not distinct");

    // residues of R/N at the zeros of N; there R(z) = D(z) exactly, which
    // avoids the cancellation noise of the remainder coefficients
    const std::vector<double> nder = detail::poly_derivative(numer);
    std::vector<double> res(n - 1);
    double res_max = 0.0;
    for (std::size_t i = 0; i < zr.size(); ++i) {
        res[i] = detail::poly_eval(denom, zr[i]) / detail::poly_eval(nder, zr[i]);
        res_max = std::max(res_max, std::abs(res[i]));
    }
    for (double a : res)
        if (std::abs(a) <= 1e-12 * res_max)
            throw NotCoprime("numerator and denominator share a zero");

    const double gamma = 1.0 / mu;
    ArrowheadRealization out;
    out.gamma = gamma;
    out.d.push_back(-gamma * q0);
    for (std::size_t i = 0; i < zr.size(); ++i) {
        out.d.push_back(zr[i]);
        out.alpha.push_back(gamma * res[i]);
        out.beta.push_back(-1.0);
    }
    out.validate();
    return out;
}

/// Recognize an arrow pattern in a dense realization: zero off the arrow,
/// b proportional to e1, c proportional to e1^T, no feedthrough. The output
/// scaling is absorbed into gamma = b1 c1.
inline std::optional<ArrowheadRealization> detect_arrowhead(const StateSpace& sys) {
    const std::size_t n = sys.size();
    if (n == 0) return std::nullopt;
    const double tol = tols().arrow_zero_rel;
    const double ascale = std::max(sys.a.max_abs(), 1e-300);
    const double bscale = std::max(sys.b.max_abs(), 1e-300);
    const double cscale = std::max(sys.c.max_abs(), 1e-300);
    if (std::abs(sys.d) > tol * std::max({ascale, bscale * cscale, 1.0})) return std::nullopt;
    for (std::size_t i = 1; i < n; ++i) {
        if (std::abs(sys.b(i, 0)) > tol * bscale) return std::nullopt;
        if (std::abs(sys.c(0, i)) > tol * cscale) return std::nullopt;
        for (std::size_t j = 1; j < n; ++j)
            if (i != j && std::abs(sys.a(i, j)) > tol * ascale) return std::nullopt;
    }
    const double b1 = sys.b(0, 0), c1 = sys.c(0, 0);
    if (std::abs(b1) <= tol * bscale || std::abs(c1) <= tol * cscale) return std::nullopt;
    ArrowheadRealization ar;
    ar.gamma = b1 * c1;
    ar.d.push_back(sys.a(0, 0));
    for (std::size_t i = 1; i < n; ++i) {
        ar.d.push_back(sys.a(i, i));
        ar.alpha.push_back(sys.a(0, i) * c1);
        ar.beta.push_back(sys.a(i, 0) / c1);
    }
    return ar;
}

}  // namespace baltrunc
