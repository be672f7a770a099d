// Command-line front end: analyze, reduce, freqresp, canonical.
// stdout carries machine-readable payloads, stderr carries messages.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "baltrunc/baltrunc.hpp"

namespace {

constexpr int kExitParse = 2;
constexpr int kExitNotStable = 3;
constexpr int kExitNotMinimal = 4;
constexpr int kExitBadOrder = 5;
constexpr int kExitRepeatedHsv = 6;

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw baltrunc::BadInput("cannot open input file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

double hinf_tol_from_env() {
    const char* env = std::getenv("BALTRUNC_TOL");
    if (!env) return baltrunc::tols().hinf_tol;
    char* end = nullptr;
    const double v = std::strtod(env, &end);
    if (end == env || *end != '\0' || !(v > 0.0) || !(v < 1.0))
        throw baltrunc::BadInput("BALTRUNC_TOL must be a number in (0, 1)");
    return v;
}

int run_analyze(const std::string& path) {
    auto doc = baltrunc::parse_system_document(read_file(path));
    std::cout << baltrunc::analyze_report(doc, hinf_tol_from_env()).dump(2) << "\n";
    return 0;
}

int run_reduce(const std::string& path, std::size_t r, const std::string& method) {
    auto doc = baltrunc::parse_system_document(read_file(path));
    baltrunc::ReductionMethod m;
    if (method == "truncation")
        m = baltrunc::ReductionMethod::truncation;
    else if (method == "spa")
        m = baltrunc::ReductionMethod::singular_perturbation;
    else
        throw baltrunc::BadInput("--method must be truncation or spa");
    auto cert = baltrunc::certify(doc.dense, r, m, baltrunc::tols().cert_tol, hinf_tol_from_env());
    baltrunc::ordered_json out;
    out["system"] = baltrunc::dense_to_json(cert.reduced);
    out["certificate"] = baltrunc::certificate_to_json(cert);
    std::cout << out.dump(2) << "\n";
    return 0;
}

int run_freqresp(const std::string& path, double wmin, double wmax, std::size_t points) {
    auto doc = baltrunc::parse_system_document(read_file(path));
    std::vector<double> grid;
    if (points == 1) {
        grid.push_back(wmin);
    } else {
        grid = baltrunc::log_grid(wmin, wmax, points);
    }
    auto rows = baltrunc::frequency_response(doc.dense, grid);
    std::cout << "omega,re,im,mag\n";
    for (const auto& [w, g] : rows) {
        std::cout << baltrunc::format12(w) << ',' << baltrunc::format12(g.real()) << ','
                  << baltrunc::format12(g.imag()) << ',' << baltrunc::format12(std::abs(g)) << "\n";
    }
    return 0;
}

int run_canonical(const std::string& path) {
    auto doc = baltrunc::parse_system_document(read_file(path));
    baltrunc::BalancedForm bf = baltrunc::to_canonical(doc.dense);
    baltrunc::ordered_json out;
    out["system"] = baltrunc::dense_to_json(bf.sys);
    baltrunc::ordered_json sig = baltrunc::ordered_json::array();
    for (double s : bf.sigma.expanded()) sig.push_back(baltrunc::round12(s));
    baltrunc::ordered_json sgn = baltrunc::ordered_json::array();
    for (int s : bf.signs.signs) sgn.push_back(s);
    baltrunc::ordered_json gam = baltrunc::ordered_json::array();
    for (std::size_t i = 0; i < bf.sys.size(); ++i)
        gam.push_back(baltrunc::round12(bf.sys.b(i, 0)));
    out["sigma"] = sig;
    out["signs"] = sgn;
    out["gamma"] = gam;
    std::cout << out.dump(2) << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"balanced truncation with exact-error certificates for SISO systems"};
    app.require_subcommand(1);

    std::string in_path;
    std::size_t order = 0;
    std::string method = "truncation";
    double wmin = 1e-2, wmax = 1e2;
    std::size_t points = 200;

    auto* analyze = app.add_subcommand("analyze", "full report: spectra, signs, certificates");
    analyze->add_option("file", in_path, "system document (json)")->required();

    auto* reduce = app.add_subcommand("reduce", "reduced model of order r plus certificate");
    reduce->add_option("file", in_path, "system document (json)")->required();
    reduce->add_option("-r,--order", order, "reduced order")->required();
    reduce->add_option("--method", method, "truncation | spa");

    auto* freqresp = app.add_subcommand("freqresp", "frequency response as csv");
    freqresp->add_option("file", in_path, "system document (json)")->required();
    freqresp->add_option("--wmin", wmin, "lowest frequency (rad/s)");
    freqresp->add_option("--wmax", wmax, "highest frequency (rad/s)");
    freqresp->add_option("--points", points, "number of log-spaced points");

    auto* canonical = app.add_subcommand("canonical", "canonical balanced realization");
    canonical->add_option("file", in_path, "system document (json)")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);  // --help
        std::cerr << e.what() << "\n";
        return kExitParse;
    }

    try {
        if (app.got_subcommand(analyze)) return run_analyze(in_path);
        if (app.got_subcommand(reduce)) return run_reduce(in_path, order, method);
        if (app.got_subcommand(freqresp)) return run_freqresp(in_path, wmin, wmax, points);
        if (app.got_subcommand(canonical)) return run_canonical(in_path);
    } catch (const baltrunc::NotStable& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitNotStable;
    } catch (const baltrunc::NotMinimal& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitNotMinimal;
    } catch (const baltrunc::NotPositiveDefinite& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitNotMinimal;
    } catch (const baltrunc::SplitsMultiplicityGroup& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitBadOrder;
    } catch (const baltrunc::RepeatedHsv& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitRepeatedHsv;
    } catch (const baltrunc::BadInput& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitParse;
    } catch (const baltrunc::BadConfig& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitParse;
    } catch (const baltrunc::BadDimension& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitParse;
    } catch (const baltrunc::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
