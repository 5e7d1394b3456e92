// Command line driver: envelope | energy | recover, each reading a TOML
// experiment config and writing CSV/SVG reports into --out.
//
// Exit codes: 0 ok, 2 config error, 3 numeric failure, 4 verdict failed.

#include <CLI11.hpp>
#include <filesystem>
#include <iostream>

#include "epirelax/config.hpp"
#include "epirelax/convergence.hpp"
#include "epirelax/energy.hpp"
#include "epirelax/recovery.hpp"
#include "epirelax/report.hpp"

namespace fs = std::filesystem;
using namespace epirelax;

namespace {

std::uint64_t g_seed = 0;

std::string header_for(const ExperimentConfig& cfg) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%016llx",
                  static_cast<unsigned long long>(config_hash(cfg.raw_text)));
    std::string h = std::string("epirelax ") + kToolkitVersion + " config=" + buf;
    if (g_seed) h += " seed=" + std::to_string(g_seed);
    return h;
}

int cmd_envelope(const ExperimentConfig& cfg, const fs::path& out) {
    EnvelopeTable env = subadditive_convex_envelope(cfg.psi, cfg.envelope_grid);
    ConvexPiecewise cvx = convex_envelope(cfg.psi, cfg.envelope_grid);

    CsvWriter csv((out / "envelope.csv").string(), header_for(cfg),
                  {"s", "psi", "psi_cvx", "psi_tilde", "psi_c"});
    SvgSeries s_psi{"psi", {}, {}}, s_cvx{"psi_cvx", {}, {}}, s_til{"psi_tilde", {}, {}},
        s_c{"psi_c", {}, {}};
    const std::size_t n = cfg.envelope_grid.samples;
    for (std::size_t i = 0; i < n; ++i) {
        double s = cfg.envelope_grid.s_max * static_cast<double>(i) / (n - 1);
        double v_psi = cfg.psi(s), v_cvx = cvx(s), v_til = env.psi_tilde(s), v_c = psi_c(env, s);
        csv.row_numbers({s, v_psi, v_cvx, v_til, v_c});
        if (i % std::max<std::size_t>(n / 512, 1) == 0) {
            s_psi.xs.push_back(s);
            s_psi.ys.push_back(v_psi);
            s_cvx.xs.push_back(s);
            s_cvx.ys.push_back(v_cvx);
            s_til.xs.push_back(s);
            s_til.ys.push_back(v_til);
            s_c.xs.push_back(s);
            s_c.ys.push_back(v_c);
        }
    }
    write_svg_plot((out / "envelope.svg").string(), header_for(cfg),
                   "surface density envelopes", {s_psi, s_cvx, s_til, s_c});
    std::cout << "s0 = " << (std::isinf(env.s0()) ? "inf" : format_double(env.s0()))
              << "\ntheta = " << format_double(env.theta()) << "\n";
    return 0;
}

std::vector<double> breakdown_cells(const EnergyBreakdown& e) {
    return {e.bulk, e.surface_regular, e.surface_jump, e.surface_cut, e.singular_part, e.total};
}

int cmd_energy(const ExperimentConfig& cfg, const fs::path& out) {
    EnvelopeTable env = subadditive_convex_envelope(cfg.psi, cfg.envelope_grid);
    ExtendedGraph g = decompose(cfg.profile);
    AdatomMeasure mu = build_measure(cfg, g);

    CsvWriter csv((out / "energy.csv").string(), header_for(cfg),
                  {"functional", "bulk", "surface_regular", "surface_jump", "surface_cut",
                   "singular", "total"});

    FilmMesh mesh;
    DisplacementField v;
    bool have_bulk = false;
    if (cfg.elasticity && cfg.profile.is_lipschitz()) {
        const ElasticityConfig& ec = *cfg.elasticity;
        mesh = mesh_film(cfg.profile, ec.depth, ec.nx, ec.ny);
        v = equilibrium(mesh, ec.tensor, ec.bc).v;
        have_bulk = true;
        write_mesh_csv((out / "mesh_nodes.csv").string(), (out / "mesh_triangles.csv").string(),
                       header_for(cfg), mesh);
        write_displacement_csv((out / "displacement.csv").string(), header_for(cfg), v);
    }

    if (cfg.profile.is_lipschitz() && mu.atoms().empty()) {
        // Unrelaxed energy needs a piecewise-constant density along x.
        PiecewiseDensity pd;
        pd.xs.push_back(cfg.profile.a());
        const auto& segs = g.segments();
        for (std::size_t i = 0; i < segs.size(); ++i) {
            pd.values.push_back(mu.density()[i]);
            pd.xs.push_back(segs[i].pts.back().x);
        }
        RegularConfiguration rc{cfg.profile, pd, {}, {}};
        if (have_bulk) {
            rc.mesh = mesh;
            rc.displacement = v;
        }
        EnergyBreakdown F = total_energy_F(rc, cfg.psi,
                                           cfg.elasticity ? cfg.elasticity->tensor
                                                          : ElasticityTensor{});
        std::vector<double> cells = breakdown_cells(F);
        std::vector<std::string> row{"F"};
        for (double c : cells) row.push_back(format_double(c));
        csv.row(row);
    }

    EnergyBreakdown G = total_energy_G(cfg.profile, mu, env,
                                       cfg.elasticity ? cfg.elasticity->tensor
                                                      : ElasticityTensor{},
                                       have_bulk ? &mesh : nullptr, have_bulk ? &v : nullptr);
    std::vector<double> cells = breakdown_cells(G);
    std::vector<std::string> row{"G"};
    for (double c : cells) row.push_back(format_double(c));
    csv.row(row);
    return 0;
}

int cmd_recover(const ExperimentConfig& cfg, const fs::path& out, int threads) {
    if (!cfg.recovery || cfg.recovery->ks.empty())
        fail("ConfigError", "recover needs [recovery] with a non-empty ks list");
    const RecoveryConfig& rc = *cfg.recovery;

    EnvelopeTable env = subadditive_convex_envelope(cfg.psi, cfg.envelope_grid);
    ExtendedGraph g = decompose(cfg.profile);
    AdatomMeasure mu = build_measure(cfg, g);
    double m = total_mass(mu);
    double M = area_above_zero(cfg.profile);

    RecoveryOptions opts;
    opts.grid_max_tries = rc.grid_tries;
    opts.threads = threads;
    RecoveryResult run =
        build_recovery_sequence(cfg.profile, mu, m, M, rc.ks, cfg.psi, env, rc.cell, opts);

    write_projected_density_csv((out / "projected_density.csv").string(), header_for(cfg),
                                grid_constant_projection(g, mu, run.grid), run.grid);

    {
        CsvWriter stages((out / "stages.csv").string(), header_for(cfg),
                         {"k", "stage", "area", "mass", "H1_regular", "H1_jump", "H1_cut",
                          "F_surface", "F_bulk", "G_surface", "hausdorff_gap", "weakstar_gap"});
        for (const StageRow& r : run.rows) {
            std::vector<std::string> cells{std::to_string(r.k), to_string(r.stage)};
            for (double v : {r.area, r.mass, r.h1_regular, r.h1_jump, r.h1_cut, r.F_surface,
                             r.F_bulk, r.G_surface, r.hausdorff_gap, r.weakstar_gap})
                cells.push_back(format_double(v));
            stages.row(cells);
        }
    }
    for (std::size_t i = 0; i < run.configs.size(); ++i) {
        CsvWriter prof((out / ("profile_k" + std::to_string(run.ks[i]) + ".csv")).string(),
                       header_for(cfg), {"x", "y"});
        for (const Point& q : run.configs[i].profile.graph_polyline())
            prof.row_numbers({q.x, q.y});
    }

    VerifyOptions vo;
    vo.limsup_rel_tol = rc.rel_tol;
    ConvergenceReport rep =
        verify_sequence(run.configs, run.ks, cfg.profile, mu, cfg.psi, env, vo);
    {
        CsvWriter conv((out / "convergence.csv").string(), header_for(cfg),
                       {"k", "hausdorff_complement", "l1_subgraph", "weakstar_gap", "F_total",
                        "G_limit", "mass_error", "area_error"});
        for (const ConvergenceRow& r : rep.rows) {
            std::vector<std::string> cells{std::to_string(r.k)};
            for (double v : {r.hausdorff_complement, r.l1_subgraph, r.weakstar_gap, r.F_total,
                             r.G_limit, r.mass_error, r.area_error})
                cells.push_back(format_double(v));
            conv.row(cells);
        }
        conv.row({std::string("# verdicts"),
                  std::string("limsup=") + (rep.limsup_ok ? "pass" : "fail"),
                  std::string("liminf=") + (rep.liminf_ok ? "pass" : "fail"),
                  std::string("constraints=") + (rep.constraints_ok ? "pass" : "fail"),
                  std::string("topology=") + (rep.topology_ok ? "pass" : "fail"), "", "", ""});
    }

    SvgSeries gap{"|F-G|", {}, {}}, haus{"hausdorff", {}, {}}, weak{"weak-star", {}, {}};
    for (const ConvergenceRow& r : rep.rows) {
        gap.xs.push_back(r.k);
        gap.ys.push_back(std::abs(r.F_total - r.G_limit));
        haus.xs.push_back(r.k);
        haus.ys.push_back(r.hausdorff_complement);
        weak.xs.push_back(r.k);
        weak.ys.push_back(r.weakstar_gap);
    }
    write_svg_plot((out / "convergence.svg").string(), header_for(cfg),
                   "recovery sequence diagnostics", {gap, haus, weak}, true);

    std::cout << "limsup=" << (rep.limsup_ok ? "pass" : "fail")
              << " liminf=" << (rep.liminf_ok ? "pass" : "fail")
              << " constraints=" << (rep.constraints_ok ? "pass" : "fail")
              << " topology=" << (rep.topology_ok ? "pass" : "fail") << "\n";
    return rep.all_ok() ? 0 : 4;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"epitaxial film relaxation toolkit"};
    app.require_subcommand(1);

    std::string config_path, out_dir = ".";
    std::uint64_t seed = 0;
    int threads = 1;
    for (auto* name : {"envelope", "energy", "recover"}) {
        CLI::App* sub = app.add_subcommand(name);
        sub->add_option("--config", config_path, "experiment config (TOML)")->required();
        sub->add_option("--out", out_dir, "output directory");
        sub->add_option("--seed", seed, "seed stamp for the report headers");
        sub->add_option("--threads", threads, "workers for independent per-k recovery stages");
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    try {
        g_seed = seed;
        ExperimentConfig cfg = load_experiment(config_path);
        fs::create_directories(out_dir);
        if (app.got_subcommand("envelope")) return cmd_envelope(cfg, out_dir);
        if (app.got_subcommand("energy")) return cmd_energy(cfg, out_dir);
        return cmd_recover(cfg, out_dir, threads);
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return e.code() == "ConfigError" ? 2 : 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
}
