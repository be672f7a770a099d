#pragma once

namespace baltrunc {

/// Central record of the numerical thresholds used across the library.
/// Every comparison against "numerically zero" or "numerically equal"
/// resolves through one of these knobs.
struct Tolerances {
    double lu_pivot_rel = 1e-14;       ///< pivot floor relative to ||A||_inf
    double symeig_gate_rel = 1e-10;    ///< symmetry gate for sym_eig input
    double lyap_residual_rel = 1e-10;  ///< Lyapunov/Sylvester residual contract
    double minimality_rel = 1e-13;     ///< Gramian definiteness threshold
    double hsv_group_gap_rel = 1e-8;   ///< multiplicity grouping of singular values
    double hsv_minimal_rel = 1e-14;    ///< sigma_min/sigma_max floor before NotMinimal
    double sign_imag_rel = 1e-8;       ///< imaginary residue gate on cross-Gramian eigenvalues
    double canonical_sym_rel = 1e-8;   ///< A = S A^T S / b = (cS)^T verification
    double cert_tol = 1e-6;            ///< relative slack for the tight verdict
    double hinf_tol = 1e-8;            ///< default H-infinity bisection width
    double arrow_zero_rel = 1e-13;     ///< alpha/beta/off-arrow zero threshold
    double arrow_gap_rel = 1e-12;      ///< distinctness of arrow diagonal entries
    double arrow_shift_rel = 1e-13;    ///< singular-shift guard in the arrow inverse
    int qr_sweeps_per_dim = 30;        ///< QR iteration budget: sweeps <= 30 n
    int jacobi_max_sweeps = 60;        ///< cyclic Jacobi sweep cap
    int kron_max_dim = 24;             ///< Kronecker solve up to this order, Schur above
};

inline const Tolerances& tols() {
    static const Tolerances t{};
    return t;
}

}  // namespace baltrunc
