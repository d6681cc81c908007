#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "ctk/census.hpp"
#include "ctk/dynamics.hpp"
#include "ctk/levelset.hpp"
#include "ctk/seba.hpp"

namespace py = pybind11;
using namespace ctk;

PYBIND11_MODULE(_core, m) {
    m.doc() = "weighted-manifold spectral Cheeger toolkit";

    py::register_exception<ConfigError>(m, "ConfigError");
    py::register_exception<NumericalError>(m, "NumericalError");

    py::enum_<GridKind>(m, "GridKind")
        .value("interval", GridKind::Interval)
        .value("rectangle", GridKind::Rectangle)
        .value("torus", GridKind::Torus)
        .value("cylinder", GridKind::Cylinder);

    py::enum_<BC>(m, "BC")
        .value("neumann", BC::Neumann)
        .value("dirichlet", BC::Dirichlet);

    py::class_<Grid>(m, "Grid")
        .def_readonly("dim", &Grid::dim)
        .def_readonly("nx", &Grid::nx)
        .def_readonly("ny", &Grid::ny)
        .def_readonly("lx", &Grid::lx)
        .def_readonly("ly", &Grid::ly)
        .def("nvert", &Grid::nvert)
        .def("xcoord", &Grid::xcoord)
        .def("ycoord", &Grid::ycoord);

    py::class_<MetricField>(m, "MetricField");
    py::class_<WeightField>(m, "WeightField");

    py::class_<WeightedGrid>(m, "WeightedGrid")
        .def_readonly("grid", &WeightedGrid::grid)
        .def_readonly("metric", &WeightedGrid::metric)
        .def_readonly("weight", &WeightedGrid::weight);

    m.def("build_grid", &build_grid, py::arg("kind"), py::arg("resolution"),
          py::arg("extent"), py::arg("phi") = "");

    py::class_<DiscreteOperator>(m, "DiscreteOperator")
        .def_readonly("stiffness", &DiscreteOperator::stiffness)
        .def_readonly("mass", &DiscreteOperator::mass)
        .def_readonly("nvert", &DiscreteOperator::nvert);

    m.def(
        "assemble",
        [](const WeightedGrid& wg, BC bc) {
            return assemble(wg.grid, wg.metric, wg.weight, bc);
        },
        py::arg("weighted_grid"), py::arg("bc") = BC::Neumann);

    py::class_<EigOptions>(m, "EigOptions")
        .def(py::init<>())
        .def_readwrite("tol", &EigOptions::tol)
        .def_readwrite("max_iter", &EigOptions::max_iter)
        .def_readwrite("shift", &EigOptions::shift)
        .def_readwrite("seed", &EigOptions::seed);

    py::class_<SpectralBasis>(m, "SpectralBasis")
        .def_readonly("eigenvalues", &SpectralBasis::eigenvalues)
        .def_readonly("eigenvectors", &SpectralBasis::eigenvectors)
        .def_readonly("residuals", &SpectralBasis::residuals);

    m.def("smallest_eigenpairs", &smallest_eigenpairs, py::arg("op"), py::arg("count"),
          py::arg("options") = EigOptions{});

    py::class_<NodalDomain>(m, "NodalDomain")
        .def_readonly("sign", &NodalDomain::sign)
        .def_readonly("vertices", &NodalDomain::vertices);

    py::class_<NodalDecomposition>(m, "NodalDecomposition")
        .def_readonly("domains", &NodalDecomposition::domains)
        .def_readonly("zero_set", &NodalDecomposition::zero_set)
        .def_readonly("zero_tol", &NodalDecomposition::zero_tol);

    m.def(
        "nodal_domains",
        [](const WeightedGrid& wg, const Eigen::VectorXd& u, double zero_tol) {
            return nodal_domains(wg.grid, u, zero_tol);
        },
        py::arg("weighted_grid"), py::arg("u"), py::arg("zero_tol") = -1.0);

    py::class_<SweepRecord>(m, "SweepRecord")
        .def_readonly("s", &SweepRecord::s)
        .def_readonly("volume", &SweepRecord::volume)
        .def_readonly("perimeter", &SweepRecord::perimeter)
        .def_readonly("ratio", &SweepRecord::ratio)
        .def_readonly("admissible", &SweepRecord::admissible)
        .def_readonly("touches_boundary", &SweepRecord::touches_boundary);

    py::class_<SweepResult>(m, "SweepResult")
        .def_readonly("records", &SweepResult::records)
        .def_readonly("lambda_", &SweepResult::lambda)
        .def_readonly("hbar", &SweepResult::hbar)
        .def_readonly("inf_ratio", &SweepResult::inf_ratio)
        .def_readonly("mu_G", &SweepResult::mu_G)
        .def_readonly("smeasure_estimate", &SweepResult::smeasure_estimate)
        .def_readonly("smeasure_lower_bound", &SweepResult::smeasure_lower_bound)
        .def_readonly("s_admissible_end", &SweepResult::s_admissible_end);

    m.def(
        "superlevel_sweep",
        [](const WeightedGrid& wg, const Eigen::VectorXd& u, const NodalDomain& dom,
           double lambda, BC mode, int n_levels) {
            return superlevel_sweep(wg.grid, wg.metric, wg.weight, u, dom, lambda, mode,
                                    n_levels);
        },
        py::arg("weighted_grid"), py::arg("u"), py::arg("domain"), py::arg("lambda_"),
        py::arg("mode") = BC::Neumann, py::arg("n_levels") = 256);

    py::class_<PackedRegion>(m, "PackedRegion")
        .def_readonly("domain_index", &PackedRegion::domain_index)
        .def_readonly("s", &PackedRegion::s)
        .def_readonly("ratio", &PackedRegion::ratio)
        .def_readonly("volume", &PackedRegion::volume)
        .def_readonly("perimeter", &PackedRegion::perimeter)
        .def_readonly("vertices", &PackedRegion::vertices);

    py::class_<Packing>(m, "Packing")
        .def_readonly("sets", &Packing::sets)
        .def_readonly("max_ratio", &Packing::max_ratio)
        .def_readonly("lambda_k", &Packing::lambda_k)
        .def_readonly("certificate_ok", &Packing::certificate_ok)
        .def_readonly("k", &Packing::k)
        .def_readonly("r_k", &Packing::r_k);

    m.def(
        "build_packing",
        [](const WeightedGrid& wg, const SpectralBasis& basis, int k, BC mode, int n_levels) {
            return build_packing(wg.grid, wg.metric, wg.weight, basis, k, mode,
                                 LevelSelection::MinRatio, n_levels);
        },
        py::arg("weighted_grid"), py::arg("basis"), py::arg("k"),
        py::arg("mode") = BC::Neumann, py::arg("n_levels") = 256);

    m.def("soft_threshold", &soft_threshold, py::arg("f"), py::arg("a"));
    m.def("sup_normalized", &sup_normalized, py::arg("vectors"));
    m.def("min_disjoint_threshold", &min_disjoint_threshold, py::arg("combinations"));

    py::class_<SebaRotation>(m, "SebaRotation")
        .def_readonly("alpha", &SebaRotation::alpha)
        .def_readonly("iterations", &SebaRotation::iterations)
        .def_readonly("converged", &SebaRotation::converged);

    m.def(
        "seba_rotate",
        [](const WeightedGrid& wg, const Eigen::MatrixXd& vecs, int l, int max_iter) {
            return seba_rotate(wg.grid, vecs, l, max_iter);
        },
        py::arg("weighted_grid"), py::arg("eigenvectors"), py::arg("l"),
        py::arg("max_iter") = 5000);

    py::class_<SebaCertificate>(m, "SebaCertificate")
        .def_readonly("alpha", &SebaCertificate::alpha)
        .def_readonly("a", &SebaCertificate::a)
        .def_readonly("combinations", &SebaCertificate::combinations)
        .def_readonly("sparse_functions", &SebaCertificate::sparse_functions)
        .def_readonly("retention", &SebaCertificate::retention)
        .def_readonly("rayleigh", &SebaCertificate::rayleigh)
        .def_readonly("level_end", &SebaCertificate::level_end)
        .def_readonly("packing", &SebaCertificate::packing)
        .def_readonly("ratio_bound", &SebaCertificate::ratio_bound)
        .def_readonly("norm_ratio_bound", &SebaCertificate::norm_ratio_bound)
        .def_readonly("bound_ok", &SebaCertificate::bound_ok);

    m.def(
        "seba_certify",
        [](const WeightedGrid& wg, const SpectralBasis& basis, const Eigen::MatrixXd& alpha,
           double a, BC mode, int n_levels) {
            return seba_certify(wg.grid, wg.metric, wg.weight, basis, alpha, a, mode,
                                n_levels);
        },
        py::arg("weighted_grid"), py::arg("basis"), py::arg("alpha"), py::arg("a"),
        py::arg("mode") = BC::Neumann, py::arg("n_levels") = 256);

    py::class_<FlowMap>(m, "FlowMap").def_readonly("t_count", &FlowMap::t_count);
    m.def("shear_flow", &shear_flow, py::arg("b"), py::arg("t_max"));
    m.def("identity_flow", &identity_flow, py::arg("t_max"));

    m.def(
        "assemble_dynamic",
        [](const WeightedGrid& wg, const FlowMap& flow, BC bc) {
            return assemble_dynamic(wg.grid, wg.metric, wg.weight, flow, bc);
        },
        py::arg("weighted_grid"), py::arg("flow"), py::arg("bc") = BC::Neumann);

    m.def(
        "dynamic_sweep",
        [](const WeightedGrid& wg, const FlowMap& flow, const Eigen::VectorXd& u,
           const NodalDomain& dom, double lambda, BC mode, int n_levels) {
            return dynamic_sweep(wg.grid, wg.metric, wg.weight, flow, u, dom, lambda, mode,
                                 n_levels);
        },
        py::arg("weighted_grid"), py::arg("flow"), py::arg("u"), py::arg("domain"),
        py::arg("lambda_"), py::arg("mode") = BC::Neumann, py::arg("n_levels") = 256);

    py::enum_<CensusManifold>(m, "CensusManifold")
        .value("torus", CensusManifold::Torus)
        .value("cylinder", CensusManifold::Cylinder)
        .value("ball", CensusManifold::Ball)
        .value("shear", CensusManifold::Shear);

    py::class_<ShearParams>(m, "ShearParams")
        .def(py::init<>())
        .def_readwrite("p", &ShearParams::p)
        .def_readwrite("q", &ShearParams::q)
        .def_readwrite("t_max", &ShearParams::t_max)
        .def("b", &ShearParams::b);

    py::class_<SpectrumEntry>(m, "SpectrumEntry")
        .def_readonly("eigenvalue", &SpectrumEntry::eigenvalue)
        .def_readonly("k1", &SpectrumEntry::k1)
        .def_readonly("k2", &SpectrumEntry::k2)
        .def_readonly("k3", &SpectrumEntry::k3)
        .def_readonly("zeta", &SpectrumEntry::zeta)
        .def_readonly("nodal_count", &SpectrumEntry::nodal_count);

    m.def("enumerate_spectrum", &enumerate_spectrum, py::arg("manifold"), py::arg("count"),
          py::arg("shear") = ShearParams{});
    m.def("bessel_zero", &bessel_zero, py::arg("k1"), py::arg("k2"));
    m.def("spherical_bessel", &spherical_bessel, py::arg("n"), py::arg("r"));

    py::class_<RkBound>(m, "RkBound")
        .def_readonly("k", &RkBound::k)
        .def_readonly("lambda_k", &RkBound::lambda_k)
        .def_readonly("formula_value", &RkBound::formula_value)
        .def_readonly("enumerated_r_k", &RkBound::enumerated_r_k)
        .def_readonly("cheeger_bound", &RkBound::cheeger_bound);

    m.def("rk_lower_bound", &rk_lower_bound, py::arg("manifold"), py::arg("k"),
          py::arg("shear") = ShearParams{});
}
