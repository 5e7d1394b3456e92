#pragma once

#include <random>

#include "epirelax/adatom.hpp"
#include "epirelax/profile.hpp"

namespace epitest {

using namespace epirelax;

inline Profile flat(double a, double b, double h) {
    ProfileSpec s;
    s.a = a;
    s.b = b;
    s.arcs.push_back({Point{a, h}, Point{b, h}});
    return build_profile(s);
}

inline Profile step_profile() {
    // h = 1 on (0, 1/2), h = 2 on (1/2, 1), value 1 at the jump.
    ProfileSpec s;
    s.a = 0.0;
    s.b = 1.0;
    s.arcs.push_back({Point{0.0, 1.0}, Point{0.5, 1.0}});
    s.arcs.push_back({Point{0.5, 2.0}, Point{1.0, 2.0}});
    s.nodes.push_back(ProfileNode{0.5, 1.0, 2.0, 1.0});
    return build_profile(s);
}

inline Profile needle_profile(double height = 1.0, double value = 0.0) {
    ProfileSpec s;
    s.a = 0.0;
    s.b = 1.0;
    s.arcs.push_back({Point{0.0, height}, Point{0.5, height}});
    s.arcs.push_back({Point{0.5, height}, Point{1.0, height}});
    s.nodes.push_back(ProfileNode{0.5, height, height, value});
    return build_profile(s);
}

inline Profile sawtooth() {
    ProfileSpec s;
    s.a = 0.0;
    s.b = 1.0;
    s.arcs.push_back({Point{0.0, 0.0}, Point{0.5, 0.5}, Point{1.0, 0.0}});
    return build_profile(s);
}

inline Profile slope01() {
    ProfileSpec s;
    s.a = 0.0;
    s.b = 1.0;
    s.arcs.push_back({Point{0.0, 0.0}, Point{1.0, 1.0}});
    return build_profile(s);
}

/// Random piecewise-linear profile with optional jumps and cuts.
inline Profile random_profile(std::mt19937_64& rng, bool allow_irregular = true) {
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    int n_arcs = 1 + static_cast<int>(u01(rng) * 3);
    std::vector<double> bx{0.0};
    for (int i = 1; i < n_arcs; ++i) bx.push_back(u01(rng));
    bx.push_back(1.0);
    std::sort(bx.begin(), bx.end());
    for (std::size_t i = 1; i < bx.size(); ++i)
        if (bx[i] - bx[i - 1] < 0.05) bx[i] = bx[i - 1] + 0.05;
    double scale = bx.back();
    for (double& x : bx) x /= scale;

    ProfileSpec s;
    s.a = 0.0;
    s.b = 1.0;
    double prev_y = 0.3 + u01(rng);
    for (int i = 0; i < n_arcs; ++i) {
        Polyline arc;
        int pts = 2 + static_cast<int>(u01(rng) * 3);
        double y = (i == 0 || allow_irregular) ? 0.3 + 1.5 * u01(rng) : prev_y;
        for (int j = 0; j < pts; ++j) {
            double t = static_cast<double>(j) / (pts - 1);
            double x = bx[i] + t * (bx[i + 1] - bx[i]);
            arc.push_back(Point{x, y});
            if (j + 1 < pts) y = 0.1 + 1.8 * u01(rng);
        }
        prev_y = arc.back().y;
        s.arcs.push_back(std::move(arc));
    }
    for (int i = 0; i + 1 < n_arcs; ++i) {
        double l = s.arcs[i].back().y;
        double r = s.arcs[i + 1].front().y;
        double v = std::min(l, r);
        if (allow_irregular && u01(rng) < 0.4) v *= u01(rng);  // cut
        s.nodes.push_back(ProfileNode{bx[i + 1], l, r, v});
    }
    return build_profile(s);
}

inline AdatomMeasure uniform_measure(const Profile& p, double u) {
    auto g = std::make_shared<ExtendedGraph>(decompose(p));
    std::vector<double> d(g->segments().size(), u);
    return AdatomMeasure(g, std::move(d), {});
}

}  // namespace epitest
