#include "epirelax/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <memory>
#include <sstream>

namespace epirelax {

namespace {

std::string dir_of(const std::string& path) {
    std::size_t pos = path.find_last_of('/');
    return pos == std::string::npos ? std::string(".") : path.substr(0, pos);
}

std::string join(const std::string& dir, const std::string& rel) {
    if (!rel.empty() && rel.front() == '/') return rel;
    return dir + "/" + rel;
}

}  // namespace

Profile load_profile_file(const std::string& path) {
    toml::Document doc = toml::parse_file(path);
    toml::expect_keys(doc.root, {"domain"}, "profile file");
    for (const auto& [name, entries] : doc.sections) {
        (void)entries;
        if (name != "arc" && name != "node")
            fail("ConfigError", "unknown section [" + name + "] in profile file");
    }
    auto dom = doc.root.count("domain") ? doc.root.at("domain").numbers() : std::vector<double>{};
    if (dom.size() != 2) fail("ConfigError", "profile file needs domain = [a, b]");

    ProfileSpec spec;
    spec.a = dom[0];
    spec.b = dom[1];
    auto arcs_it = doc.sections.find("arc");
    if (arcs_it == doc.sections.end()) fail("ConfigError", "profile file needs [[arc]] tables");
    for (const toml::Table& t : arcs_it->second) {
        toml::expect_keys(t, {"x", "y"}, "[[arc]]");
        if (!t.count("x") || !t.count("y")) fail("ConfigError", "[[arc]] needs x and y arrays");
        const auto& xs = t.at("x").numbers();
        const auto& ys = t.at("y").numbers();
        if (xs.size() != ys.size() || xs.size() < 2)
            fail("ConfigError", "[[arc]] x and y must match with >= 2 samples");
        Polyline arc;
        for (std::size_t i = 0; i < xs.size(); ++i) arc.push_back(Point{xs[i], ys[i]});
        spec.arcs.push_back(std::move(arc));
    }
    if (doc.sections.count("node")) {
        for (const toml::Table& t : doc.sections.at("node")) {
            toml::expect_keys(t, {"x", "left", "right", "value"}, "[[node]]");
            for (const char* key : {"x", "left", "right", "value"})
                if (!t.count(key)) fail("ConfigError", std::string("[[node]] needs ") + key);
            spec.nodes.push_back(ProfileNode{t.at("x").number(), t.at("left").number(),
                                             t.at("right").number(), t.at("value").number()});
        }
    }
    return build_profile(spec);
}

SurfaceDensity load_density_csv(const std::string& path, double tail_slope) {
    std::ifstream in(path);
    if (!in) fail("ConfigError", "cannot open density table " + path);
    std::string line;
    if (!std::getline(in, line)) fail("ConfigError", "empty density table " + path);
    if (line.rfind("s,", 0) != 0) fail("ConfigError", "density table needs an s,value header");
    std::vector<double> grid, values;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::size_t comma = line.find(',');
        if (comma == std::string::npos) fail("ConfigError", "bad density table row: " + line);
        grid.push_back(std::stod(line.substr(0, comma)));
        values.push_back(std::stod(line.substr(comma + 1)));
    }
    return SurfaceDensity::table(std::move(grid), std::move(values), tail_slope);
}

ExperimentConfig load_experiment(const std::string& path) {
    std::ifstream raw(path);
    if (!raw) fail("ConfigError", "cannot open config " + path);
    std::ostringstream buf;
    buf << raw.rdbuf();

    ExperimentConfig cfg;
    cfg.raw_text = buf.str();
    cfg.base_dir = dir_of(path);

    toml::Document doc = toml::parse(cfg.raw_text);
    toml::expect_keys(doc.root, {}, "config root");
    for (const auto& [name, entries] : doc.sections) {
        (void)entries;
        if (name != "profile" && name != "surface_density" && name != "elasticity" &&
            name != "measure" && name != "measure.density" && name != "measure.atom" &&
            name != "recovery")
            fail("ConfigError", "unknown section [" + name + "]");
    }

    const toml::Table& prof = doc.single("profile");
    toml::expect_keys(prof, {"path"}, "[profile]");
    if (!prof.count("path")) fail("ConfigError", "[profile] needs path");
    cfg.profile = load_profile_file(join(cfg.base_dir, prof.at("path").str()));

    const toml::Table& sd = doc.single("surface_density");
    toml::expect_keys(sd, {"kind", "c", "alpha", "beta", "csv", "tail_slope", "s_max", "samples"},
                      "[surface_density]");
    if (!sd.count("kind")) fail("ConfigError", "[surface_density] needs kind");
    const std::string kind = sd.at("kind").str();
    if (kind == "constant") {
        if (!sd.count("c")) fail("ConfigError", "constant density needs c");
        cfg.psi = SurfaceDensity::constant(sd.at("c").number());
    } else if (kind == "quadratic") {
        if (!sd.count("alpha") || !sd.count("beta"))
            fail("ConfigError", "quadratic density needs alpha and beta");
        cfg.psi = SurfaceDensity::quadratic(sd.at("alpha").number(), sd.at("beta").number());
    } else if (kind == "table") {
        if (!sd.count("csv") || !sd.count("tail_slope"))
            fail("ConfigError", "table density needs csv and tail_slope");
        cfg.psi = load_density_csv(join(cfg.base_dir, sd.at("csv").str()),
                                   sd.at("tail_slope").number());
    } else {
        fail("ConfigError", "unknown surface density kind '" + kind + "'");
    }
    if (sd.count("s_max")) cfg.envelope_grid.s_max = sd.at("s_max").number();
    if (sd.count("samples"))
        cfg.envelope_grid.samples = static_cast<std::size_t>(sd.at("samples").number());
    if (!(cfg.envelope_grid.s_max > 0.0) || cfg.envelope_grid.samples < 2)
        fail("ConfigError", "envelope grid needs s_max > 0 and samples >= 2");

    if (doc.has("elasticity")) {
        const toml::Table& el = doc.single("elasticity");
        toml::expect_keys(el, {"lambda", "mu", "t", "d", "nx", "ny", "bc"}, "[elasticity]");
        ElasticityConfig ec;
        if (el.count("lambda")) ec.tensor.lambda = el.at("lambda").number();
        if (el.count("mu")) ec.tensor.mu = el.at("mu").number();
        if (el.count("t")) ec.tensor.mismatch = el.at("t").number();
        if (el.count("d")) ec.depth = el.at("d").number();
        if (el.count("nx")) ec.nx = static_cast<int>(el.at("nx").number());
        if (el.count("ny")) ec.ny = static_cast<int>(el.at("ny").number());
        if (el.count("bc")) {
            const std::string bc = el.at("bc").str();
            if (bc == "clamped-bottom")
                ec.bc = BoundaryCondition::ClampedBottom;
            else if (bc == "clamped-bottom-and-sides")
                ec.bc = BoundaryCondition::ClampedBottomAndSides;
            else
                fail("ConfigError", "unknown bc '" + bc + "'");
        }
        if (!(ec.depth > 0.0) || ec.nx < 2 || ec.ny < 2)
            fail("ConfigError", "[elasticity] needs d > 0 and nx, ny >= 2");
        try {
            ec.tensor.validate();
        } catch (const Error& e) {
            fail("ConfigError", e.what());
        }
        cfg.elasticity = ec;
    }

    if (doc.has("measure")) toml::expect_keys(doc.single("measure"), {}, "[measure]");
    if (doc.has("measure.density")) {
        for (const toml::Table& t : doc.sections.at("measure.density")) {
            toml::expect_keys(t, {"tag", "index", "value"}, "[[measure.density]]");
            MeasureSpecDensity d;
            d.tag = t.count("tag") ? t.at("tag").str() : "all";
            if (d.tag != "regular" && d.tag != "jump" && d.tag != "cut" && d.tag != "all")
                fail("ConfigError", "density tag must be regular|jump|cut|all");
            if (t.count("index")) d.index = static_cast<int>(t.at("index").number());
            if (!t.count("value")) fail("ConfigError", "[[measure.density]] needs value");
            d.value = t.at("value").number();
            if (d.value < 0.0) fail("ConfigError", "density value must be >= 0");
            cfg.densities.push_back(d);
        }
    }
    if (doc.has("measure.atom")) {
        for (const toml::Table& t : doc.sections.at("measure.atom")) {
            toml::expect_keys(t, {"x", "y", "mass"}, "[[measure.atom]]");
            for (const char* key : {"x", "y", "mass"})
                if (!t.count(key)) fail("ConfigError", std::string("[[measure.atom]] needs ") + key);
            cfg.atoms.push_back(
                Atom{Point{t.at("x").number(), t.at("y").number()}, t.at("mass").number()});
        }
    }

    if (doc.has("recovery")) {
        const toml::Table& rc = doc.single("recovery");
        toml::expect_keys(rc, {"ks", "cell", "rel_tol", "grid_tries"}, "[recovery]");
        RecoveryConfig r;
        if (rc.count("ks"))
            for (double v : rc.at("ks").numbers()) r.ks.push_back(static_cast<int>(v));
        if (rc.count("cell")) r.cell = rc.at("cell").number();
        if (rc.count("rel_tol")) r.rel_tol = rc.at("rel_tol").number();
        if (rc.count("grid_tries")) r.grid_tries = static_cast<int>(rc.at("grid_tries").number());
        for (int k : r.ks)
            if (k < 1) fail("ConfigError", "[recovery] ks entries must be >= 1");
        if (!(r.cell > 0.0) || !(r.rel_tol > 0.0) || r.grid_tries < 1)
            fail("ConfigError", "[recovery] needs cell > 0, rel_tol > 0, grid_tries >= 1");
        cfg.recovery = r;
    }
    return cfg;
}

AdatomMeasure build_measure(const ExperimentConfig& cfg, const ExtendedGraph& g) {
    auto graph = std::make_shared<ExtendedGraph>(g);
    std::vector<double> density(g.segments().size(), 0.0);
    for (const MeasureSpecDensity& d : cfg.densities) {
        std::vector<std::size_t> idx;
        if (d.tag == "all") {
            idx.resize(g.segments().size());
            for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
        } else {
            SegmentKind kind = d.tag == "regular" ? SegmentKind::Regular
                               : d.tag == "jump"  ? SegmentKind::Jump
                                                  : SegmentKind::Cut;
            idx = g.indices_of(kind);
        }
        if (d.index >= 0) {
            if (static_cast<std::size_t>(d.index) >= idx.size())
                fail("ConfigError", "density index out of range for tag " + d.tag);
            density[idx[static_cast<std::size_t>(d.index)]] = d.value;
        } else {
            for (std::size_t i : idx) density[i] = d.value;
        }
    }
    return AdatomMeasure(graph, std::move(density), cfg.atoms);
}

}  // namespace epirelax
