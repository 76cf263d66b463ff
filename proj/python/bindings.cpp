#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "minksurf/density.hpp"
#include "minksurf/grid.hpp"
#include "minksurf/pipeline.hpp"
#include "minksurf/polytope.hpp"
#include "minksurf/report_io.hpp"
#include "minksurf/solver.hpp"

namespace py = pybind11;
using namespace minksurf;

PYBIND11_MODULE(pyminksurf, m) {
    m.doc() = "Discrete Minkowski problem solver and flat-disc surface pipeline";

    py::register_exception<Error>(m, "MinksurfError");

    py::class_<UnitVector>(m, "UnitVector")
        .def(py::init<const Vec3&>())
        .def(py::init<double, double, double>())
        .def_property_readonly("vec", &UnitVector::vec)
        .def("__neg__", &UnitVector::operator-)
        .def("__repr__", [](const UnitVector& u) {
            return "UnitVector(" + std::to_string(u.x()) + ", " + std::to_string(u.y()) +
                   ", " + std::to_string(u.z()) + ")";
        });
    py::implicitly_convertible<Vec3, UnitVector>();

    m.def("spherical_angle", &spherical_angle);

    py::class_<QuadratureGrid, std::shared_ptr<QuadratureGrid>>(m, "QuadratureGrid")
        .def_readonly("nodes", &QuadratureGrid::nodes)
        .def_readonly("weights", &QuadratureGrid::weights)
        .def_readonly("level", &QuadratureGrid::level)
        .def("__len__", &QuadratureGrid::size)
        .def_static("from_nodes", &QuadratureGrid::from_nodes);

    m.def("build_grid", [](int level) {
        return std::make_shared<QuadratureGrid>(build_grid(level));
    });
    m.def("build_vertex_grid", [](int level) {
        return std::make_shared<QuadratureGrid>(build_vertex_grid(level));
    });
    m.def("mean_angular_spacing", &mean_angular_spacing);
    m.def("integrate_vector", &integrate_vector);

    py::class_<PunctureSet, std::shared_ptr<PunctureSet>>(m, "PunctureSet")
        .def(py::init<std::vector<UnitVector>, std::vector<double>>())
        .def_readonly("points", &PunctureSet::points)
        .def_readonly("weights", &PunctureSet::weights)
        .def("__len__", &PunctureSet::size);

    m.def("find_equilibrium_weights", &find_equilibrium_weights);
    m.def("separating_direction", &separating_direction);
    m.def("minimum_n", &minimum_n);

    py::class_<DensityField>(m, "DensityField")
        .def_readonly("values", &DensityField::values)
        .def_readonly("n", &DensityField::n);
    m.def("build_density", &build_density);
    m.def("closure_defect", &closure_defect);
    m.def("total_mass", &total_mass);

    py::class_<SupportVector>(m, "SupportVector")
        .def(py::init([](std::shared_ptr<const QuadratureGrid> g, Eigen::VectorXd v) {
            return SupportVector{std::move(g), std::move(v)};
        }))
        .def_readonly("values", &SupportVector::values);

    py::class_<Facet>(m, "Facet")
        .def_readonly("normal_index", &Facet::normal_index)
        .def_readonly("vertex_loop", &Facet::vertex_loop)
        .def_readonly("area", &Facet::area)
        .def_readonly("plane_offset", &Facet::plane_offset);

    py::class_<ConvexPolytope>(m, "ConvexPolytope")
        .def_readonly("vertices", &ConvexPolytope::vertices)
        .def_readonly("facets", &ConvexPolytope::facets);

    m.def("realize", &realize);
    m.def("facet_areas", &facet_areas);
    m.def("volume", &volume);
    m.def("support_eval", &support_eval);
    m.def("hausdorff_distance", &hausdorff_distance);
    m.def("diameter", &diameter);
    m.def("recenter", &recenter);
    m.def("volume_centroid", &volume_centroid);

    py::class_<SolveOptions>(m, "SolveOptions")
        .def(py::init<>())
        .def_readwrite("tol_rel", &SolveOptions::tol_rel)
        .def_readwrite("max_iters", &SolveOptions::max_iters);

    py::class_<SolveReport>(m, "SolveReport")
        .def_readonly("iterations", &SolveReport::iterations)
        .def_readonly("final_residual", &SolveReport::final_residual)
        .def_readonly("residual_history", &SolveReport::residual_history)
        .def_readonly("wall_time", &SolveReport::wall_time);

    py::class_<MinkowskiProblem>(m, "MinkowskiProblem")
        .def(py::init<std::shared_ptr<const QuadratureGrid>, Eigen::VectorXd>())
        .def_readonly("targets", &MinkowskiProblem::targets);

    m.def("solve", &solve, py::arg("problem"), py::arg("options") = SolveOptions{});
    m.def("verify_solution", [](const SupportVector& h, const MinkowskiProblem& p) {
        const ResidualSummary s = verify_solution(h, p);
        return py::make_tuple(s.max_rel, s.mean_rel, s.achieved_closure);
    });
    m.def("uniqueness_probe", &uniqueness_probe);

    py::class_<DiscMetrics>(m, "DiscMetrics")
        .def_readonly("area", &DiscMetrics::area)
        .def_readonly("plane_rms", &DiscMetrics::plane_rms)
        .def_readonly("normal_angle", &DiscMetrics::normal_angle)
        .def_readonly("boundary_convexity_defect", &DiscMetrics::boundary_convexity_defect);

    py::class_<SurfaceDecomposition>(m, "SurfaceDecomposition")
        .def_readonly("body", &SurfaceDecomposition::body)
        .def_readonly("n", &SurfaceDecomposition::n)
        .def("disc_area", &SurfaceDecomposition::disc_area)
        .def("annulus_area", &SurfaceDecomposition::annulus_area);

    m.def(
        "construct",
        [](std::shared_ptr<const QuadratureGrid> grid,
           std::shared_ptr<const PunctureSet> punctures, int n, const SolveOptions& opts) {
            SolveReport rep;
            auto [h, d] = construct(std::move(grid), std::move(punctures), n, opts, &rep);
            return py::make_tuple(h, d, rep);
        },
        py::arg("grid"), py::arg("punctures"), py::arg("n"),
        py::arg("options") = SolveOptions{});

    m.def("disc_metrics", &disc_metrics);
    m.def("equilibrium_check", &equilibrium_check);
    m.def("gauss_coverage", &gauss_coverage);

    m.def("export_obj", &export_obj);
}
