#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <nlohmann/json.hpp>

#include "smplab/barrier.hpp"
#include "smplab/lab.hpp"
#include "smplab/operators.hpp"
#include "smplab/symmat.hpp"

namespace py = pybind11;
using namespace smplab;
using nlohmann::json;

namespace {

SymMat mat_from_rows(const std::vector<std::vector<double>>& rows) {
    return SymMat::from_dense(rows);
}

} // namespace

PYBIND11_MODULE(_smplab, m) {
    m.doc() = "numerical lab for extremal parabolic operators";

    m.def(
        "eigenvalues",
        [](const std::vector<std::vector<double>>& rows) {
            return eigenvalues(mat_from_rows(rows)).values;
        },
        py::arg("matrix"), "ascending eigenvalues of a symmetric matrix");

    m.def(
        "pucci",
        [](const std::string& sign, double lam, double Lam,
           const std::vector<std::vector<double>>& rows) {
            return pucci_extremal(sign == "plus" ? PucciSign::plus
                                                 : PucciSign::minus,
                                  lam, Lam, mat_from_rows(rows));
        },
        py::arg("sign"), py::arg("lam"), py::arg("Lam"), py::arg("matrix"));

    m.def(
        "pucci_truncated",
        [](const std::string& sign, double lam, double Lam, int k,
           const std::vector<std::vector<double>>& rows) {
            return pucci_truncated(sign == "plus" ? PucciSign::plus
                                                  : PucciSign::minus,
                                   lam, Lam, k, mat_from_rows(rows));
        },
        py::arg("sign"), py::arg("lam"), py::arg("Lam"), py::arg("k"),
        py::arg("matrix"));

    m.def(
        "eval_operator",
        [](const std::string& descriptor, const std::vector<double>& x,
           double t, double r, const std::vector<double>& p,
           const std::vector<std::vector<double>>& mrows) {
            const OperatorSpec spec = make_operator(json::parse(descriptor));
            return eval_operator(spec, x, t, r, p, mat_from_rows(mrows));
        },
        py::arg("descriptor"), py::arg("x"), py::arg("t"), py::arg("r"),
        py::arg("p"), py::arg("matrix"),
        "evaluate a catalog operator from a JSON descriptor string");

    m.def(
        "check_structure",
        [](const std::string& descriptor, long n_samples, double scale,
           std::uint64_t seed) {
            const OperatorSpec spec = make_operator(json::parse(descriptor));
            const StructureReport rep =
                check_structure_condition(spec, n_samples, scale, seed);
            py::dict out;
            out["pass"] = rep.pass();
            out["samples_checked"] = rep.samples_checked;
            out["worst_lower_margin"] = rep.worst_lower_margin;
            out["worst_upper_margin"] = rep.worst_upper_margin;
            out["violations"] = static_cast<long>(rep.violations.size());
            return out;
        },
        py::arg("descriptor"), py::arg("n_samples") = 2000,
        py::arg("scale") = 2.0, py::arg("seed") = 1);

    m.def(
        "certify_barrier",
        [](int n, double r0, double alpha, double cap, double lam, double Lam,
           double b_sup, double c_abs_sup, double t_prime, double t2,
           int grid_pts) {
            const double K = compute_K(lam, Lam, n, b_sup, c_abs_sup, r0);
            BarrierParams bp;
            bp.n = n;
            bp.x0 = Vec(n, 0.0);
            bp.t_prime = t_prime;
            bp.r0 = r0;
            bp.alpha = alpha;
            bp.beta = select_beta(lam, K, r0).beta;
            bp.cap = cap;
            const BarrierCertificate cert = certify_strict_supersolution(
                bp, lam, Lam, b_sup, c_abs_sup, t2, grid_pts);
            py::dict out;
            out["pass"] = cert.pass;
            out["K"] = cert.K;
            out["beta"] = cert.beta;
            out["delta"] = cert.delta;
            out["margin"] = cert.margin;
            out["samples"] = cert.samples;
            return out;
        },
        py::arg("n"), py::arg("r0"), py::arg("alpha"), py::arg("cap"),
        py::arg("lam"), py::arg("Lam"), py::arg("b_sup"),
        py::arg("c_abs_sup"), py::arg("t_prime"), py::arg("t2"),
        py::arg("grid_pts") = 32);

    m.def("list_experiments", []() { return lab::list_experiments(); });

    m.def(
        "run_experiment",
        [](const std::string& config_json) {
            const auto cfg =
                lab::ExperimentConfig::from_json(json::parse(config_json));
            const lab::ExperimentReport rep = lab::run_experiment(cfg);
            nlohmann::ordered_json j;
            j["experiment"] = rep.experiment;
            j["pass"] = rep.pass;
            j["metrics"] = rep.metrics;
            j["failures"] = rep.failures;
            j["certificate"] = rep.certificate;
            return j.dump();
        },
        py::arg("config_json"),
        "run an experiment from a JSON config string; returns a JSON report "
        "string (no files are written)");
}
