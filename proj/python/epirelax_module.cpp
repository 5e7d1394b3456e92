// Python bindings for the main operations: profiles and their extended
// graphs, envelopes, measures, the elastic solver, recovery sequences and
// the convergence diagnostics.

#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "epirelax/config.hpp"
#include "epirelax/convergence.hpp"
#include "epirelax/energy.hpp"
#include "epirelax/recovery.hpp"

namespace py = pybind11;
using namespace epirelax;

namespace {

Profile make_profile(std::pair<double, double> domain,
                     const std::vector<std::vector<std::pair<double, double>>>& arcs,
                     const std::vector<std::tuple<double, double, double, double>>& nodes) {
    ProfileSpec spec;
    spec.a = domain.first;
    spec.b = domain.second;
    for (const auto& arc : arcs) {
        Polyline pl;
        for (const auto& [x, y] : arc) pl.push_back(Point{x, y});
        spec.arcs.push_back(std::move(pl));
    }
    for (const auto& [x, l, r, v] : nodes) spec.nodes.push_back(ProfileNode{x, l, r, v});
    return build_profile(spec);
}

AdatomMeasure make_measure(const Profile& p, const std::vector<double>& density,
                           const std::vector<std::tuple<double, double, double>>& atoms) {
    auto g = std::make_shared<ExtendedGraph>(decompose(p));
    std::vector<double> d = density;
    if (d.size() == 1) d.assign(g->segments().size(), density[0]);
    std::vector<Atom> as;
    for (const auto& [x, y, m] : atoms) as.push_back(Atom{Point{x, y}, m});
    return AdatomMeasure(g, std::move(d), std::move(as));
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "relaxed free energies of epitaxially strained films with adatoms";

    py::register_exception<Error>(m, "ToolkitError");

    py::class_<Profile>(m, "Profile")
        .def_property_readonly("a", &Profile::a)
        .def_property_readonly("b", &Profile::b)
        .def("value", &Profile::value)
        .def("total_variation", &Profile::total_variation)
        .def("max_abs_slope", &Profile::max_abs_slope)
        .def("is_lipschitz", &Profile::is_lipschitz, py::arg("tol") = 1e-12)
        .def("vertices", [](const Profile& p) {
            std::vector<std::pair<double, double>> out;
            for (const Point& q : p.graph_polyline()) out.push_back({q.x, q.y});
            return out;
        });

    py::class_<GraphLengths>(m, "GraphLengths")
        .def_readonly("regular", &GraphLengths::regular)
        .def_readonly("jump", &GraphLengths::jump)
        .def_readonly("cut", &GraphLengths::cut)
        .def_readonly("total", &GraphLengths::total);

    py::class_<ExtendedGraph>(m, "ExtendedGraph")
        .def_property_readonly("lengths", &ExtendedGraph::lengths);

    m.def("build_profile", &make_profile, py::arg("domain"), py::arg("arcs"),
          py::arg("nodes") = std::vector<std::tuple<double, double, double, double>>{});
    m.def("load_profile", &load_profile_file);
    m.def("decompose", &decompose);
    m.def("graph_lengths",
          [](const ExtendedGraph& g, std::optional<std::pair<double, double>> window) {
              return graph_lengths(g, window);
          },
          py::arg("graph"), py::arg("window") = std::nullopt);
    m.def("area_above_zero", &area_above_zero);
    m.def("cuts_exceeding", &cuts_exceeding);

    py::class_<SurfaceDensity>(m, "SurfaceDensity")
        .def_static("constant", &SurfaceDensity::constant)
        .def_static("quadratic", &SurfaceDensity::quadratic)
        .def_static("table", &SurfaceDensity::table)
        .def("__call__", &SurfaceDensity::operator());

    py::class_<EnvelopeGrid>(m, "EnvelopeGrid")
        .def(py::init([](double s_max, std::size_t samples) {
                 return EnvelopeGrid{s_max, samples};
             }),
             py::arg("s_max") = 64.0, py::arg("samples") = 4097)
        .def_readwrite("s_max", &EnvelopeGrid::s_max)
        .def_readwrite("samples", &EnvelopeGrid::samples);

    py::class_<EnvelopeTable>(m, "EnvelopeTable")
        .def_property_readonly("s0", &EnvelopeTable::s0)
        .def_property_readonly("theta", &EnvelopeTable::theta)
        .def("psi_tilde", &EnvelopeTable::psi_tilde)
        .def("psi_cvx", &EnvelopeTable::psi_cvx)
        .def("psi_c", [](const EnvelopeTable& e, double s) { return psi_c(e, s); });

    m.def("subadditive_convex_envelope", &subadditive_convex_envelope, py::arg("psi"),
          py::arg("grid") = EnvelopeGrid{});

    py::class_<AdatomMeasure>(m, "AdatomMeasure")
        .def_property_readonly("density", &AdatomMeasure::density);
    m.def("make_measure", &make_measure, py::arg("profile"), py::arg("density"),
          py::arg("atoms") = std::vector<std::tuple<double, double, double>>{});
    m.def("total_mass", &total_mass);

    py::class_<ElasticityTensor>(m, "ElasticityTensor")
        .def(py::init([](double lambda, double mu, double t) {
                 return ElasticityTensor{lambda, mu, t};
             }),
             py::arg("lam") = 1.0, py::arg("mu") = 1.0, py::arg("t") = 0.0);
    py::class_<FilmMesh>(m, "FilmMesh")
        .def_property_readonly("node_count", [](const FilmMesh& mm) { return mm.nodes.size(); })
        .def_property_readonly("triangle_count",
                               [](const FilmMesh& mm) { return mm.triangles.size(); });
    m.def("mesh_film", &mesh_film);
    m.def("equilibrium_energy", [](const FilmMesh& mesh, const ElasticityTensor& C) {
        return equilibrium(mesh, C).energy;
    });

    m.def("wriggle", &wriggle, py::arg("profile"), py::arg("r"), py::arg("k"));
    m.def("finite_cut_reduction", &finite_cut_reduction, py::arg("profile"), py::arg("k"),
          py::arg("area"));
    m.def("lipschitz_approximation",
          [](const Profile& p, int k) { return lipschitz_approximation(p, k).profile; },
          py::arg("profile"), py::arg("k"));
    m.def("cut_split",
          [](double u, const SurfaceDensity& psi, const EnvelopeGrid& grid) {
              return cut_split(u, subadditive_convex_envelope(psi, grid));
          },
          py::arg("u"), py::arg("psi"), py::arg("grid") = EnvelopeGrid{});

    m.def("hausdorff_complement_distance",
          [](const Profile& a, const Profile& b, std::pair<double, double> x,
             std::pair<double, double> y, int n) {
              BoundingBox box{x.first, x.second, y.first, y.second};
              auto res = hausdorff_complement_distance(a, b, box, n);
              return std::make_pair(res.distance, res.grid_error);
          },
          py::arg("a"), py::arg("b"), py::arg("x_range"), py::arg("y_range"), py::arg("n") = 256);
    m.def("l1_subgraph_distance", &l1_subgraph_distance);

    m.def("relaxed_surface_energy",
          [](const AdatomMeasure& mu, const EnvelopeTable& env) {
              EnergyBreakdown e = surface_energy_relaxed(mu, env);
              py::dict d;
              d["surface_regular"] = e.surface_regular;
              d["surface_jump"] = e.surface_jump;
              d["surface_cut"] = e.surface_cut;
              d["singular"] = e.singular_part;
              d["total"] = e.total;
              return d;
          });

    m.def("run_recovery",
          [](const Profile& p, const AdatomMeasure& mu, const std::vector<int>& ks,
             const SurfaceDensity& psi, const EnvelopeGrid& grid, double cell) {
              EnvelopeTable env = subadditive_convex_envelope(psi, grid);
              RecoveryResult run = build_recovery_sequence(
                  p, mu, total_mass(mu), area_above_zero(p), ks, psi, env, cell);
              ConvergenceReport rep = verify_sequence(run.configs, ks, p, mu, psi, env);
              py::list rows;
              for (const ConvergenceRow& r : rep.rows) {
                  py::dict d;
                  d["k"] = r.k;
                  d["hausdorff"] = r.hausdorff_complement;
                  d["l1"] = r.l1_subgraph;
                  d["weakstar"] = r.weakstar_gap;
                  d["F"] = r.F_total;
                  d["G"] = r.G_limit;
                  d["mass_error"] = r.mass_error;
                  d["area_error"] = r.area_error;
                  rows.append(d);
              }
              py::dict out;
              out["rows"] = rows;
              out["limsup_ok"] = rep.limsup_ok;
              out["liminf_ok"] = rep.liminf_ok;
              out["constraints_ok"] = rep.constraints_ok;
              out["topology_ok"] = rep.topology_ok;
              return out;
          },
          py::arg("profile"), py::arg("measure"), py::arg("ks"), py::arg("psi"),
          py::arg("grid") = EnvelopeGrid{}, py::arg("cell") = 0.25);

    m.attr("__version__") = "0.1.0";
}
