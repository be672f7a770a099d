#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "baltrunc/arrowhead.hpp"
#include "baltrunc/balance.hpp"

namespace baltrunc {

/// Physical parameters of a power-network aggregate model: inertia, damping,
/// inverse droop coefficients and turbine time constants of M generators.
/// Units follow per-unit power-system conventions; the library treats them as
/// opaque positive reals.
struct GridConfig {
    double m_hat = 0.0;
    double d_hat = 0.0;
    std::vector<double> droop_inv;
    std::vector<double> tau;

    std::size_t generators() const { return droop_inv.size(); }

    void validate() const {
        if (!(m_hat > 0.0) || !std::isfinite(m_hat)) throw BadConfig("m_hat must be positive");
        if (!(d_hat > 0.0) || !std::isfinite(d_hat)) throw BadConfig("d_hat must be positive");
        if (droop_inv.empty()) throw BadConfig("need at least one generator");
        if (droop_inv.size() != tau.size()) throw BadConfig("droop_inv and tau length mismatch");
        for (double r : droop_inv)
            if (!(r > 0.0) || !std::isfinite(r)) throw BadConfig("droop_inv entries must be positive");
        for (double t : tau)
            if (!(t > 0.0) || !std::isfinite(t)) throw BadConfig("tau entries must be positive");
        for (std::size_t i = 0; i < tau.size(); ++i)
            for (std::size_t j = i + 1; j < tau.size(); ++j)
                if (tau[i] == tau[j])
                    throw BadConfig(
                        "duplicate tau at generators " + std::to_string(i + 1) + " and " +
                        std::to_string(j + 1) +
                        ": repeated time constants give a repeated arrow diagonal, so the "
                        "arrowhead realization is not minimal");
    }
};

/// Arrowhead realization of the aggregate frequency response
///   G(s) = 1 / (m_hat s + d_hat + sum_i droop_inv_i / (tau_i s + 1)).
/// Head -d_hat/m_hat, first row 1/m_hat, first column -droop_inv_i/tau_i,
/// tail diagonal -1/tau_i, gamma = 1/m_hat.
inline ArrowheadRealization build_grid_model(const GridConfig& cfg) {
    cfg.validate();
    const std::size_t m = cfg.generators();
    ArrowheadRealization ar;
    ar.gamma = 1.0 / cfg.m_hat;
    ar.d.push_back(-cfg.d_hat / cfg.m_hat);
    for (std::size_t i = 0; i < m; ++i) {
        ar.d.push_back(-1.0 / cfg.tau[i]);
        ar.alpha.push_back(1.0 / cfg.m_hat);
        ar.beta.push_back(-cfg.droop_inv[i] / cfg.tau[i]);
    }
    ar.validate();
    return ar;
}

/// Certificates for r = 1..M. The arrow arms all carry negative products, so
/// every certificate is expected tight.
inline std::vector<ReductionCertificate> grid_tightness_report(
    const GridConfig& cfg, ReductionMethod method = ReductionMethod::truncation) {
    StateSpace sys = to_state_space(build_grid_model(cfg));
    std::vector<ReductionCertificate> out;
    for (std::size_t r = 1; r <= cfg.generators(); ++r) out.push_back(certify(sys, r, method));
    return out;
}

}  // namespace baltrunc
