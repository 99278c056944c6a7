#include <pybind11/complex.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <memory>

#include "finspec/convergence.hpp"
#include "finspec/eigensolver.hpp"
#include "finspec/numeric.hpp"
#include "finspec/operators.hpp"
#include "finspec/resolvent.hpp"
#include "finspec/spectral_family.hpp"
#include "finspec/verify.hpp"
#include "finspec/version.hpp"

namespace py = pybind11;
using namespace finspec;

namespace {

// Keeps the Python-side wrapper alive for SpectralFamily, which holds the
// operator by shared_ptr.
SpectralFamily build_family(const TruncatedOperator& T, double cluster_tol, double eig_tol) {
    return SpectralFamily::build(std::make_shared<const TruncatedOperator>(T), cluster_tol,
                                 eig_tol);
}

std::vector<double> eigenvector_copy(const EigenDecomposition& d, std::size_t k) {
    if (k >= d.dim) throw ConfigError("eigenvector index out of range");
    const double* v = d.vec(k);
    return std::vector<double>(v, v + d.dim);
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Finite-section spectral measures: projection-valued step functions, "
              "Stieltjes integrals, resolvents, and convergence studies.";
    m.attr("__version__") = kVersion;

    py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
    py::register_exception<NumericalError>(m, "NumericalError", PyExc_ArithmeticError);

    py::class_<OperatorSpec>(m, "OperatorSpec")
        .def_property_readonly("kind", [](const OperatorSpec& s) { return kind_name(s.kind); })
        .def("__repr__", [](const OperatorSpec& s) {
            return std::string("OperatorSpec(kind=") + kind_name(s.kind) + ")";
        });

    m.def("free_jacobi", &make_free_jacobi);
    m.def("hermite_position", &make_hermite_position);
    m.def("diagonal_unbounded", &make_diagonal_unbounded, py::arg("rate"));
    m.def("discrete_schroedinger", &make_discrete_schroedinger, py::arg("potential"));
    m.def("user_matrix", &load_user_matrix, py::arg("csv_path"));

    py::class_<TruncatedOperator>(m, "TruncatedOperator")
        .def_readonly("dim", &TruncatedOperator::dim)
        .def_readonly("entries", &TruncatedOperator::entries)
        .def_readonly("banded_hint", &TruncatedOperator::banded_hint)
        .def("at", &TruncatedOperator::at, py::arg("i"), py::arg("j"))
        .def("max_abs_entry", &TruncatedOperator::max_abs_entry)
        .def("matvec", &TruncatedOperator::matvec, py::arg("x"));

    m.def("build_truncation", &build_truncation, py::arg("spec"), py::arg("n"));

    py::class_<DomainProbe> probe(m, "DomainProbe");
    probe.def(py::init<>())
        .def_readwrite("index", &DomainProbe::index)
        .def_readwrite("exponent", &DomainProbe::exponent)
        .def_readwrite("label", &DomainProbe::label)
        .def("generate", &DomainProbe::generate, py::arg("n"));
    m.def("basis_probe", [](std::size_t index) {
        DomainProbe p;
        p.kind = DomainProbe::Kind::Basis;
        p.index = index;
        return p;
    }, py::arg("index") = 1);
    m.def("power_probe", [](double exponent) {
        DomainProbe p;
        p.kind = DomainProbe::Kind::Power;
        p.exponent = exponent;
        return p;
    }, py::arg("exponent") = 1.0);

    py::enum_<MembershipVerdict>(m, "MembershipVerdict")
        .value("Bounded", MembershipVerdict::Bounded)
        .value("Growing", MembershipVerdict::Growing);

    py::class_<DomainReport>(m, "DomainReport")
        .def_readonly("ns", &DomainReport::Ns)
        .def_readonly("norms", &DomainReport::norms)
        .def_readonly("verdict", &DomainReport::verdict);
    m.def("domain_membership_report", &domain_membership_report, py::arg("spec"),
          py::arg("probe"), py::arg("ns"));

    py::class_<EigenDecomposition>(m, "EigenDecomposition")
        .def_readonly("dim", &EigenDecomposition::dim)
        .def_readonly("eigenvalues", &EigenDecomposition::eigenvalues)
        .def_readonly("residual_bound", &EigenDecomposition::residual_bound)
        .def("eigenvector", &eigenvector_copy, py::arg("k"))
        .def("spectral_radius", &EigenDecomposition::spectral_radius);
    m.def("eigendecompose", &eigendecompose, py::arg("t"), py::arg("tol") = 0.0);

    py::class_<Cluster>(m, "Cluster")
        .def_readonly("begin", &Cluster::begin)
        .def_readonly("end", &Cluster::end)
        .def("size", &Cluster::size);
    m.def("cluster_eigenvalues", &cluster_eigenvalues, py::arg("decomposition"), py::arg("tau"));
    m.def("default_cluster_tolerance", &default_cluster_tolerance, py::arg("decomposition"));

    py::class_<SpectralCDF>(m, "SpectralCDF")
        .def_readonly("jump_locations", &SpectralCDF::jump_locations)
        .def_readonly("jump_masses", &SpectralCDF::jump_masses)
        .def_readonly("total", &SpectralCDF::total)
        .def("evaluate", &SpectralCDF::evaluate, py::arg("lam"))
        .def("__call__", &SpectralCDF::evaluate, py::arg("lam"));

    py::class_<TailReport>(m, "TailReport")
        .def_readonly("lhs", &TailReport::lhs)
        .def_readonly("left_moment", &TailReport::left_moment)
        .def_readonly("right_moment", &TailReport::right_moment)
        .def_readonly("slack", &TailReport::slack)
        .def_readonly("bound_satisfied", &TailReport::bound_satisfied)
        .def("tail_first_moment", &TailReport::tail_first_moment);

    py::class_<SpectralFamily>(m, "SpectralFamily")
        .def_static("build", &build_family, py::arg("t"), py::arg("cluster_tol") = -1.0,
                    py::arg("eig_tol") = 0.0)
        .def_property_readonly("dim", &SpectralFamily::dim)
        .def_property_readonly(
            "eigenvalues",
            [](const SpectralFamily& f) { return f.decomposition().eigenvalues; })
        .def_property_readonly("decomposition", &SpectralFamily::decomposition)
        .def_property_readonly("clusters", &SpectralFamily::clusters)
        .def("included_count", &SpectralFamily::included_count, py::arg("lam"))
        .def("coefficients", &SpectralFamily::coefficients, py::arg("x"))
        .def("apply_F", &SpectralFamily::apply_F, py::arg("lam"), py::arg("x"))
        .def("cdf", &SpectralFamily::cdf, py::arg("x"))
        .def("stieltjes_apply", &SpectralFamily::stieltjes_apply, py::arg("g"), py::arg("a"),
             py::arg("b"), py::arg("x"))
        .def("stieltjes_apply_complex", &SpectralFamily::stieltjes_apply_complex, py::arg("g"),
             py::arg("a"), py::arg("b"), py::arg("x"))
        .def("riemann_stieltjes_sum", &SpectralFamily::riemann_stieltjes_sum, py::arg("x"),
             py::arg("partition"))
        .def("polarization_measure", &SpectralFamily::polarization_measure, py::arg("x"),
             py::arg("y"), py::arg("a"), py::arg("b"))
        .def("tail_report", &SpectralFamily::tail_report, py::arg("x"), py::arg("k"));

    m.def("resolvent_solve",
          [](const TruncatedOperator& T, std::complex<double> z,
             const std::vector<std::complex<double>>& x) { return resolvent_solve(T, z, x); },
          py::arg("t"), py::arg("z"), py::arg("x"));
    m.def("resolvent_solve_real",
          [](const TruncatedOperator& T, std::complex<double> z, const std::vector<double>& x) {
              return resolvent_solve(T, z, x);
          },
          py::arg("t"), py::arg("z"), py::arg("x"));
    m.def("operational_calculus_residual", &operational_calculus_residual, py::arg("family"),
          py::arg("t"), py::arg("z"), py::arg("x"));

    py::class_<StoneReconstruction>(m, "StoneReconstruction")
        .def_readonly("a", &StoneReconstruction::a)
        .def_readonly("b", &StoneReconstruction::b)
        .def_readonly("epsilon", &StoneReconstruction::epsilon)
        .def_readonly("quadrature_panels", &StoneReconstruction::quadrature_panels)
        .def_readonly("result", &StoneReconstruction::result)
        .def_readonly("endpoint_distance", &StoneReconstruction::endpoint_distance);
    m.def("stone_reconstruct",
          [](const TruncatedOperator& T, double a, double b, double epsilon,
             const std::vector<double>& x, double refinement_tol) {
              return stone_reconstruct(T, a, b, epsilon, x, refinement_tol);
          },
          py::arg("t"), py::arg("a"), py::arg("b"), py::arg("epsilon"), py::arg("x"),
          py::arg("refinement_tol") = 1e-10);

    py::class_<StoneLimitRow>(m, "StoneLimitRow")
        .def_readonly("epsilon", &StoneLimitRow::epsilon)
        .def_readonly("error", &StoneLimitRow::error)
        .def_readonly("ratio", &StoneLimitRow::ratio);
    py::class_<StoneLimitStudy>(m, "StoneLimitStudy")
        .def_readonly("rows", &StoneLimitStudy::rows)
        .def_readonly("endpoint_distance", &StoneLimitStudy::endpoint_distance)
        .def_readonly("eta", &StoneLimitStudy::eta);
    m.def("stone_limit_study", &stone_limit_study, py::arg("t"), py::arg("a"), py::arg("b"),
          py::arg("x"), py::arg("epsilons"), py::arg("eta") = 1e-6,
          py::arg("refinement_tol") = 1e-10);

    py::class_<OracleSpec>(m, "OracleSpec")
        .def(py::init<>())
        .def("cdf", &OracleSpec::cdf, py::arg("lam"));
    m.def("semicircle_oracle", [](double center, double radius) {
        OracleSpec o;
        o.kind = OracleSpec::Kind::Semicircle;
        o.center = center;
        o.radius = radius;
        return o;
    }, py::arg("center") = 0.0, py::arg("radius") = 2.0);
    m.def("gaussian_oracle", [](double mean, double variance) {
        OracleSpec o;
        o.kind = OracleSpec::Kind::Gaussian;
        o.mean = mean;
        o.variance = variance;
        return o;
    }, py::arg("mean") = 0.0, py::arg("variance") = 1.0);
    m.def("point_mass_oracle", [](std::vector<std::pair<double, double>> points) {
        OracleSpec o;
        o.kind = OracleSpec::Kind::PointMasses;
        o.point_masses = std::move(points);
        return o;
    }, py::arg("points"));

    py::class_<ConvergenceStudy>(m, "ConvergenceStudy")
        .def(py::init<>())
        .def_readwrite("spec", &ConvergenceStudy::spec)
        .def_readwrite("probe", &ConvergenceStudy::probe)
        .def_readwrite("ns", &ConvergenceStudy::Ns)
        .def_readwrite("lambda_grid", &ConvergenceStudy::lambda_grid)
        .def_readwrite("deltas", &ConvergenceStudy::deltas)
        .def_readwrite("oracle", &ConvergenceStudy::oracle)
        .def_readwrite("snap_grid_to_gaps", &ConvergenceStudy::snap_grid_to_gaps)
        .def_readwrite("atom_threshold", &ConvergenceStudy::atom_threshold)
        .def_readwrite("threads", &ConvergenceStudy::threads);

    py::class_<CdfCell>(m, "CdfCell")
        .def_readonly("lam", &CdfCell::lambda)
        .def_readonly("cdf", &CdfCell::cdf)
        .def_readonly("oracle", &CdfCell::oracle)
        .def_readonly("abs_error", &CdfCell::abs_error);
    py::class_<CdfConvergenceReport>(m, "CdfConvergenceReport")
        .def_readonly("ns", &CdfConvergenceReport::Ns)
        .def_readonly("deltas", &CdfConvergenceReport::deltas)
        .def_readonly("nominal_grid", &CdfConvergenceReport::nominal_grid)
        .def_readonly("sup_distance", &CdfConvergenceReport::sup_distance)
        .def_readonly("stabilization", &CdfConvergenceReport::stabilization)
        .def("cell", &CdfConvergenceReport::cell, py::return_value_policy::copy,
             py::arg("n_idx"), py::arg("grid_idx"), py::arg("delta_idx") = 0)
        .def("sup", &CdfConvergenceReport::sup, py::arg("n_idx"), py::arg("delta_idx") = 0);
    m.def("run_cdf_convergence", &run_cdf_convergence, py::arg("study"),
          py::call_guard<py::gil_scoped_release>());

    py::class_<TailLimitRow>(m, "TailLimitRow")
        .def_readonly("n", &TailLimitRow::N)
        .def_readonly("k", &TailLimitRow::K)
        .def_readonly("left_norm", &TailLimitRow::left_norm)
        .def_readonly("right_defect", &TailLimitRow::right_defect)
        .def_readonly("lhs", &TailLimitRow::lhs)
        .def_readonly("left_moment", &TailLimitRow::left_moment)
        .def_readonly("right_moment", &TailLimitRow::right_moment)
        .def_readonly("bound_satisfied", &TailLimitRow::bound_satisfied);
    py::class_<TailLimitsReport>(m, "TailLimitsReport")
        .def_readonly("rows", &TailLimitsReport::rows);
    m.def("run_tail_limits", &run_tail_limits, py::arg("study"), py::arg("ks"),
          py::call_guard<py::gil_scoped_release>());
    m.def("discontinuity_scan", &discontinuity_scan, py::arg("study"),
          py::call_guard<py::gil_scoped_release>());

    py::class_<VerifyOptions>(m, "VerifyOptions")
        .def(py::init<>())
        .def_readwrite("n", &VerifyOptions::N)
        .def_readwrite("tolerance_scale", &VerifyOptions::tolerance_scale)
        .def_readwrite("seed", &VerifyOptions::seed);
    py::class_<VerifyCheck>(m, "VerifyCheck")
        .def_readonly("name", &VerifyCheck::name)
        .def_readonly("cases", &VerifyCheck::cases)
        .def_readonly("violations", &VerifyCheck::violations)
        .def_readonly("worst_margin", &VerifyCheck::worst_margin)
        .def_readonly("pass_", &VerifyCheck::pass)
        .def("__repr__", [](const VerifyCheck& c) {
            return "VerifyCheck(" + c.name + (c.pass ? ", pass)" : ", FAIL)");
        });
    py::class_<VerifyReport>(m, "VerifyReport")
        .def_readonly("checks", &VerifyReport::checks)
        .def_readonly("pass_", &VerifyReport::pass);
    m.def("run_verify", &run_verify, py::arg("spec"), py::arg("probe"), py::arg("options"),
          py::call_guard<py::gil_scoped_release>());
}
