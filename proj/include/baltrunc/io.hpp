#pragma once

#include <cstdio>
#include <cstdlib>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "baltrunc/arrowhead.hpp"
#include "baltrunc/balance.hpp"
#include "baltrunc/gridmodel.hpp"
#include "baltrunc/hinfnorm.hpp"

namespace baltrunc {

using ordered_json = nlohmann::ordered_json;

/// Round to 12 significant digits so serialized reports are byte-stable.
inline double round12(double x) {
    if (!std::isfinite(x)) return x;
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.12g", x);
    return std::strtod(buf, nullptr);
}

inline std::string format12(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.12g", x);
    return buf;
}

/// One parsed input document. Whatever the variant, a dense realization is
/// always materialized; arrow/grid/tf inputs keep their structured form too.
struct SystemDocument {
    enum class Kind { dense, arrowhead, grid, tf };
    Kind kind = Kind::dense;
    StateSpace dense;
    std::optional<ArrowheadRealization> arrow;
    std::optional<GridConfig> grid;
    std::vector<double> numer, denom;  ///< tf variant only, high to low
};

namespace detail {

inline std::vector<double> json_reals(const ordered_json& j, const std::string& key) {
    if (!j.contains(key) || !j[key].is_array()) throw BadInput("expected array field '" + key + "'");
    std::vector<double> out;
    for (const auto& v : j[key]) {
        if (!v.is_number()) throw BadInput("non-numeric entry in '" + key + "'");
        out.push_back(v.get<double>());
    }
    return out;
}

inline double json_real(const ordered_json& j, const std::string& key) {
    if (!j.contains(key) || !j[key].is_number()) throw BadInput("expected numeric field '" + key + "'");
    return j[key].get<double>();
}

/// Controllable companion realization of N(s)/D(s), coefficients high to low.
inline StateSpace tf_to_state_space(const std::vector<double>& numer,
                                    const std::vector<double>& denom) {
    if (denom.empty()) throw BadInput("tf: empty denominator");
    if (numer.empty()) throw BadInput("tf: empty numerator");
    if (numer.size() > denom.size()) throw BadInput("tf: improper transfer function");
    const std::size_t n = denom.size() - 1;
    const double lead = denom[0];
    if (lead == 0.0) throw BadInput("tf: zero leading denominator coefficient");
    double d = 0.0;
    std::vector<double> num = numer;
    if (num.size() == denom.size()) {
        d = num[0] / lead;
        for (std::size_t i = 0; i < num.size(); ++i) num[i] -= d * denom[i];
        num.erase(num.begin());
    }
    if (n == 0) return StateSpace(Matrix(0, 0), Matrix(0, 1), Matrix(1, 0), d);
    // monic denominator a_0..a_{n-1} (low to high powers)
    std::vector<double> a(n);
    for (std::size_t i = 0; i < n; ++i) a[i] = denom[n - i] / lead;
    std::vector<double> cvec(n, 0.0);
    for (std::size_t i = 0; i < num.size(); ++i) cvec[num.size() - 1 - i] = num[i] / lead;
    Matrix A(n, n), b(n, 1), c(1, n);
    for (std::size_t i = 0; i + 1 < n; ++i) A(i, i + 1) = 1.0;
    for (std::size_t j = 0; j < n; ++j) A(n - 1, j) = -a[j];
    b(n - 1, 0) = 1.0;
    for (std::size_t j = 0; j < n; ++j) c(0, j) = cvec[j];
    return StateSpace(std::move(A), std::move(b), std::move(c), d);
}

}  // namespace detail

inline SystemDocument parse_system_document(const std::string& text) {
    ordered_json j;
    try {
        j = ordered_json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw BadInput(std::string("json parse failure: ") + e.what());
    }
    if (!j.is_object()) throw BadInput("document must be a json object");
    const bool has_dense = j.contains("A");
    const bool has_arrow = j.contains("alpha");
    const bool has_grid = j.contains("m_hat");
    const bool has_tf = j.contains("numer");
    const int variants = int(has_dense) + int(has_arrow) + int(has_grid) + int(has_tf);
    if (variants != 1) throw BadInput("document must contain exactly one system variant");

    SystemDocument doc;
    if (has_dense) {
        doc.kind = SystemDocument::Kind::dense;
        if (!j["A"].is_array()) throw BadInput("'A' must be an array of rows");
        const std::size_t n = j["A"].size();
        Matrix A(n, n);
        for (std::size_t i = 0; i < n; ++i) {
            if (!j["A"][i].is_array() || j["A"][i].size() != n)
                throw BadInput("'A' must be square");
            for (std::size_t k = 0; k < n; ++k) {
                if (!j["A"][i][k].is_number()) throw BadInput("non-numeric entry in 'A'");
                A(i, k) = j["A"][i][k].get<double>();
            }
        }
        std::vector<double> b = detail::json_reals(j, "b");
        std::vector<double> c = detail::json_reals(j, "c");
        if (b.size() != n || c.size() != n) throw BadInput("b/c length mismatch");
        doc.dense = StateSpace(std::move(A), Matrix::column(b), Matrix::row(c),
                               detail::json_real(j, "d"));
        doc.arrow = detect_arrowhead(doc.dense);
    } else if (has_arrow) {
        doc.kind = SystemDocument::Kind::arrowhead;
        doc.arrow = ArrowheadRealization(detail::json_reals(j, "d"), detail::json_reals(j, "alpha"),
                                         detail::json_reals(j, "beta"),
                                         detail::json_real(j, "gamma"));
        doc.dense = to_state_space(*doc.arrow);
    } else if (has_grid) {
        doc.kind = SystemDocument::Kind::grid;
        GridConfig cfg;
        cfg.m_hat = detail::json_real(j, "m_hat");
        cfg.d_hat = detail::json_real(j, "d_hat");
        cfg.droop_inv = detail::json_reals(j, "droop_inv");
        cfg.tau = detail::json_reals(j, "tau");
        cfg.validate();
        doc.grid = cfg;
        doc.arrow = build_grid_model(cfg);
        doc.dense = to_state_space(*doc.arrow);
    } else {
        doc.kind = SystemDocument::Kind::tf;
        doc.numer = detail::json_reals(j, "numer");
        doc.denom = detail::json_reals(j, "denom");
        doc.dense = detail::tf_to_state_space(doc.numer, doc.denom);
    }
    return doc;
}

inline ordered_json dense_to_json(const StateSpace& sys) {
    ordered_json j;
    const std::size_t n = sys.size();
    ordered_json rows = ordered_json::array();
    for (std::size_t i = 0; i < n; ++i) {
        ordered_json row = ordered_json::array();
        for (std::size_t k = 0; k < n; ++k) row.push_back(round12(sys.a(i, k)));
        rows.push_back(row);
    }
    j["A"] = rows;
    ordered_json b = ordered_json::array(), c = ordered_json::array();
    for (std::size_t i = 0; i < n; ++i) {
        b.push_back(round12(sys.b(i, 0)));
        c.push_back(round12(sys.c(0, i)));
    }
    j["b"] = b;
    j["c"] = c;
    j["d"] = round12(sys.d);
    return j;
}

inline ordered_json arrow_to_json(const ArrowheadRealization& ar) {
    ordered_json j;
    ordered_json d = ordered_json::array(), a = ordered_json::array(), b = ordered_json::array();
    for (double x : ar.d) d.push_back(round12(x));
    for (double x : ar.alpha) a.push_back(round12(x));
    for (double x : ar.beta) b.push_back(round12(x));
    j["d"] = d;
    j["alpha"] = a;
    j["beta"] = b;
    j["gamma"] = round12(ar.gamma);
    return j;
}

inline ordered_json certificate_to_json(const ReductionCertificate& cert) {
    ordered_json j;
    j["order_r"] = cert.order_r;
    j["method"] = cert.method == ReductionMethod::truncation ? "truncation" : "spa";
    j["bound"] = round12(cert.bound);
    j["achieved_error"] = round12(cert.achieved_error);
    j["tight"] = cert.tight;
    j["s2_uniform"] = cert.s2_uniform;
    return j;
}

/// Full analysis payload: stability, minimality, Hankel/sign spectra, arrow
/// diagnosis when an arrow structure is present, and per-order certificates.
inline ordered_json analyze_report(const SystemDocument& doc,
                                   double hinf_tol = tols().hinf_tol) {
    ordered_json j;
    StabilityReport st = check_stability(doc.dense);
    j["stable"] = st.stable;
    j["spectral_abscissa"] = round12(st.spectral_abscissa);
    if (!st.stable) throw NotStable("analysis requires an asymptotically stable system");
    const bool minimal = check_minimality(doc.dense);
    j["minimal"] = minimal;
    if (!minimal) throw NotMinimal("analysis requires a minimal realization");

    HankelSpectrum h = hankel_spectrum(doc.dense);
    ordered_json sig = ordered_json::array(), mult = ordered_json::array();
    for (double s : h.sigmas) sig.push_back(round12(s));
    for (std::size_t m : h.multiplicities) mult.push_back(m);
    j["hankel"] = ordered_json{{"sigmas", sig}, {"multiplicities", mult}};

    SignSpectrum ss = sign_spectrum(doc.dense);
    ordered_json sgn = ordered_json::array(), lam = ordered_json::array();
    for (int s : ss.signs) sgn.push_back(s);
    for (double l : ss.lambdas) lam.push_back(round12(l));
    j["signs"] = ordered_json{{"signs", sgn}, {"lambdas", lam}};

    j["arrowhead_detected"] = doc.arrow.has_value();
    if (doc.arrow) {
        SignDiagnosis diag = diagnose_signs(*doc.arrow);
        ordered_json ja;
        ordered_json ms = ordered_json::array();
        for (int s : diag.sign_multiset) ms.push_back(s);
        ja["sign_multiset"] = ms;
        ja["hypothesis_ok"] = diag.hypothesis_ok;
        ja["uniform_trailing"] = diag.uniform_trailing;
        if (diag.canonical_permutation) {
            ordered_json perm = ordered_json::array();
            for (std::size_t p : *diag.canonical_permutation) perm.push_back(p);
            ja["canonical_permutation"] = perm;
        } else {
            ja["canonical_permutation"] = nullptr;
        }
        // multiset agreement with the dense cross-Gramian path
        std::vector<int> a = diag.sign_multiset, b = ss.signs;
        std::sort(a.begin(), a.end());
        std::sort(b.begin(), b.end());
        ja["agrees_with_dense"] = (a == b);
        j["arrowhead"] = ja;
    }

    ordered_json certs = ordered_json::array();
    std::size_t acc = 0;
    for (std::size_t g = 0; g + 1 < h.multiplicities.size(); ++g) {
        acc += h.multiplicities[g];
        certs.push_back(certificate_to_json(
            certify(doc.dense, acc, ReductionMethod::truncation, tols().cert_tol, hinf_tol)));
    }
    j["certificates"] = certs;
    return j;
}

}  // namespace baltrunc
