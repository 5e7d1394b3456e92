#include <doctest.h>

#include <random>

#include "helpers.hpp"
#include "epirelax/elastic.hpp"

using namespace epirelax;
using namespace epitest;

namespace {

double W_of(const std::array<double, 4>& A, double lam, double mu) {
    double sxx = A[0], syy = A[3], sxy = 0.5 * (A[1] + A[2]);
    double tr = sxx + syy;
    return mu * (sxx * sxx + syy * syy + 2.0 * sxy * sxy) + 0.5 * lam * tr * tr;
}

double mesh_area(const FilmMesh& m, bool film_only, bool substrate_only) {
    double area = 0.0;
    for (const auto& t : m.triangles) {
        const Point& p0 = m.nodes[t[0]];
        const Point& p1 = m.nodes[t[1]];
        const Point& p2 = m.nodes[t[2]];
        double A = 0.5 * ((p1.x - p0.x) * (p2.y - p0.y) - (p2.x - p0.x) * (p1.y - p0.y));
        double cy = (p0.y + p1.y + p2.y) / 3.0;
        if (film_only && cy < 0.0) continue;
        if (substrate_only && cy >= 0.0) continue;
        area += A;
    }
    return area;
}

DisplacementField affine_field(const FilmMesh& m, double axx, double axy, double ayx,
                               double ayy) {
    DisplacementField v(m.nodes.size());
    for (std::size_t i = 0; i < m.nodes.size(); ++i)
        v[i] = {axx * m.nodes[i].x + axy * m.nodes[i].y,
                ayx * m.nodes[i].x + ayy * m.nodes[i].y};
    return v;
}

// Reference solve: dense Gaussian elimination on the same constrained
// system, assembled from finite differences of the energy.
double dense_equilibrium_energy(const FilmMesh& m, const ElasticityTensor& C,
                                BoundaryCondition bc) {
    std::vector<int> dof(m.nodes.size(), -1);
    int nfree = 0;
    for (std::size_t i = 0; i < m.nodes.size(); ++i) {
        bool fixed = (m.flags[i] & kNodeBottom) ||
                     (bc == BoundaryCondition::ClampedBottomAndSides && (m.flags[i] & kNodeLateral));
        if (!fixed) dof[i] = nfree, nfree += 2;
    }
    auto energy_of = [&](const std::vector<double>& x) {
        DisplacementField v(m.nodes.size(), {0.0, 0.0});
        for (std::size_t i = 0; i < m.nodes.size(); ++i)
            if (dof[i] >= 0) v[i] = {x[dof[i]], x[dof[i] + 1]};
        return elastic_energy(m, v, C);
    };
    // Quadratic energy: E(x) = 1/2 x^T K x - f^T x + c. Probe with unit vectors.
    std::vector<double> zero(nfree, 0.0);
    double c0 = energy_of(zero);
    std::vector<double> f(nfree);
    std::vector<std::vector<double>> K(nfree, std::vector<double>(nfree, 0.0));
    std::vector<double> ei(nfree, 0.0), ej(nfree, 0.0);
    std::vector<double> diagE(nfree);
    for (int i = 0; i < nfree; ++i) {
        ei.assign(nfree, 0.0);
        ei[i] = 1.0;
        double Ei = energy_of(ei);
        diagE[i] = Ei;
        ei[i] = -1.0;
        double Emi = energy_of(ei);
        K[i][i] = Ei + Emi - 2.0 * c0;
        f[i] = 0.5 * (Emi - Ei);
    }
    for (int i = 0; i < nfree; ++i)
        for (int j = i + 1; j < nfree; ++j) {
            ej.assign(nfree, 0.0);
            ej[i] = 1.0;
            ej[j] = 1.0;
            double Eij = energy_of(ej);
            double kij = Eij - diagE[i] - diagE[j] + c0;  // cross term of the quadratic
            K[i][j] = K[j][i] = kij;
        }
    // Solve K x = f.
    std::vector<double> x(f);
    for (int col = 0; col < nfree; ++col) {
        int piv = col;
        for (int r = col + 1; r < nfree; ++r)
            if (std::abs(K[r][col]) > std::abs(K[piv][col])) piv = r;
        std::swap(K[piv], K[col]);
        std::swap(x[piv], x[col]);
        for (int r = col + 1; r < nfree; ++r) {
            double fct = K[r][col] / K[col][col];
            for (int c2 = col; c2 < nfree; ++c2) K[r][c2] -= fct * K[col][c2];
            x[r] -= fct * x[col];
        }
    }
    for (int r = nfree - 1; r >= 0; --r) {
        for (int c2 = r + 1; c2 < nfree; ++c2) x[r] -= K[r][c2] * x[c2];
        x[r] /= K[r][r];
    }
    return energy_of(x);
}

}  // namespace

TEST_SUITE("elastic") {

TEST_CASE("mismatch strain") {
    ElasticityTensor C{1.0, 1.0, 0.7};
    CHECK(mismatch_strain(-0.5, C) == std::array<double, 4>{0.0, 0.0, 0.0, 0.0});
    CHECK(mismatch_strain(0.0, C) == std::array<double, 4>{0.7, 0.0, 0.0, 0.0});
    ElasticityTensor C0{1.0, 1.0, 0.0};
    CHECK(mismatch_strain(2.0, C0) == std::array<double, 4>{0.0, 0.0, 0.0, 0.0});
}

TEST_CASE("mesh counts: flat 2x2 gives 15 nodes, 16 triangles") {
    FilmMesh m = mesh_film(flat(0.0, 1.0, 1.0), 1.0, 2, 2);
    CHECK(m.nodes.size() == 15);     // 3 columns x (3 substrate + 2 film)
    CHECK(m.triangles.size() == 16); // 4 quad bands x 2 columns x 2
}

TEST_CASE("zero film collapses to a substrate-only mesh") {
    FilmMesh m = mesh_film(flat(0.0, 1.0, 0.0), 1.0, 2, 2);
    CHECK(m.nodes.size() == 9);
    CHECK(m.triangles.size() == 8);
    for (const Point& q : m.nodes) CHECK(q.y <= 0.0);
}

TEST_CASE("sloped profile: collapsed left column, all triangles CCW") {
    FilmMesh m = mesh_film(slope01(), 1.0, 4, 3);
    for (const auto& t : m.triangles) {
        const Point& p0 = m.nodes[t[0]];
        const Point& p1 = m.nodes[t[1]];
        const Point& p2 = m.nodes[t[2]];
        double A = 0.5 * ((p1.x - p0.x) * (p2.y - p0.y) - (p2.x - p0.x) * (p1.y - p0.y));
        CHECK(A > 1e-14);
    }
    CHECK_THROWS_WITH_AS(mesh_film(needle_profile(), 1.0, 4, 3),
                         doctest::Contains("ProfileHasCuts"), Error);
    CHECK_THROWS_WITH_AS(mesh_film(flat(0.0, 1.0, 1.0), 1.0, 1, 3),
                         doctest::Contains("DegenerateResolution"), Error);
}

TEST_CASE("elastic energy on a reference square") {
    FilmMesh m;
    m.nodes = {Point{0, 0}, Point{1, 0}, Point{1, 1}, Point{0, 1}};
    m.triangles = {{0, 1, 2}, {0, 2, 3}};
    m.flags = {0, 0, 0, 0};
    ElasticityTensor C{1.0, 1.0, 0.0};

    DisplacementField zero(4, {0.0, 0.0});
    CHECK(elastic_energy(m, zero, C) == doctest::Approx(0.0));

    DisplacementField vx(4);
    for (int i = 0; i < 4; ++i) vx[i] = {m.nodes[i].x, 0.0};
    // E = e1 (x) e1, W = mu + lambda/2 = 1.5 over unit area.
    CHECK(elastic_energy(m, vx, C) == doctest::Approx(1.5).epsilon(1e-14));

    CHECK_THROWS_WITH_AS(elastic_energy(m, DisplacementField(3), C),
                         doctest::Contains("SizeMismatch"), Error);
}

TEST_CASE("matching film displacement cancels the mismatch exactly") {
    ElasticityTensor C{1.3, 0.8, 0.05};
    FilmMesh m = mesh_film(flat(0.0, 1.0, 1.0), 1.0, 4, 4);
    DisplacementField v = affine_field(m, C.mismatch, 0.0, 0.0, 0.0);
    double sub_area = mesh_area(m, false, true);
    double expected = sub_area * W_of({C.mismatch, 0, 0, 0}, C.lambda, C.mu);
    CHECK(elastic_energy(m, v, C) == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("patch test: affine fields give the closed-form quadratic") {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(-0.5, 0.5);
    ElasticityTensor C{1.1, 0.9, 0.0};
    FilmMesh m = mesh_film(slope01(), 0.7, 5, 4);
    double total_area = mesh_area(m, false, false);
    for (int trial = 0; trial < 5; ++trial) {
        double axx = u(rng), axy = u(rng), ayx = u(rng), ayy = u(rng);
        DisplacementField v = affine_field(m, axx, axy, ayx, ayy);
        double expected = total_area * W_of({axx, axy, ayx, ayy}, C.lambda, C.mu);
        CHECK(elastic_energy(m, v, C) == doctest::Approx(expected).epsilon(1e-12));
    }
}

TEST_CASE("rigid motions cost nothing when t = 0") {
    std::mt19937_64 rng(6);
    std::uniform_real_distribution<double> u(-0.5, 0.5);
    ElasticityTensor C{1.0, 1.0, 0.0};
    FilmMesh m = mesh_film(flat(0.0, 1.0, 1.0), 1.0, 6, 4);
    DisplacementField v = affine_field(m, u(rng), u(rng), u(rng), u(rng));
    double base = elastic_energy(m, v, C);
    double omega = 0.37, cx = 0.21, cy = -0.43;
    DisplacementField w = v;
    for (std::size_t i = 0; i < m.nodes.size(); ++i) {
        w[i][0] += omega * (-m.nodes[i].y) + cx;
        w[i][1] += omega * m.nodes[i].x + cy;
    }
    CHECK(elastic_energy(m, w, C) == doctest::Approx(base).epsilon(1e-10));

    // Quadratic scaling in v.
    DisplacementField v2 = v;
    for (auto& q : v2) {
        q[0] *= 3.0;
        q[1] *= 3.0;
    }
    CHECK(elastic_energy(m, v2, C) == doctest::Approx(9.0 * base).epsilon(1e-12));
}

TEST_CASE("equilibrium: zero mismatch gives the zero field") {
    ElasticityTensor C{1.0, 1.0, 0.0};
    FilmMesh m = mesh_film(flat(0.0, 1.0, 1.0), 1.0, 4, 4);
    EquilibriumResult r = equilibrium(m, C);
    CHECK(r.energy == doctest::Approx(0.0));
    for (const auto& q : r.v) {
        CHECK(q[0] == 0.0);
        CHECK(q[1] == 0.0);
    }
}

TEST_CASE("equilibrium strictly relaxes the zero field") {
    ElasticityTensor C{1.0, 1.0, 0.1};
    FilmMesh m = mesh_film(flat(0.0, 1.0, 0.5), 1.0, 8, 4);
    EquilibriumResult r = equilibrium(m, C);
    DisplacementField zero(m.nodes.size(), {0.0, 0.0});
    double e0 = elastic_energy(m, zero, C);
    CHECK(r.energy > 0.0);
    CHECK(r.energy < e0);
    CHECK(r.relative_residual <= 1e-10);

    // Directional minimality via central differences.
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int trial = 0; trial < 3; ++trial) {
        DisplacementField dv(m.nodes.size(), {0.0, 0.0});
        for (std::size_t i = 0; i < m.nodes.size(); ++i)
            if (!(m.flags[i] & kNodeBottom)) dv[i] = {u(rng), u(rng)};
        double h = 1e-5;
        DisplacementField plus = r.v, minus = r.v;
        for (std::size_t i = 0; i < m.nodes.size(); ++i) {
            plus[i][0] += h * dv[i][0];
            plus[i][1] += h * dv[i][1];
            minus[i][0] -= h * dv[i][0];
            minus[i][1] -= h * dv[i][1];
        }
        double grad = (elastic_energy(m, plus, C) - elastic_energy(m, minus, C)) / (2.0 * h);
        CHECK(std::abs(grad) <= 1e-8 * std::max(1.0, e0));
    }
}

TEST_CASE("equilibrium matches a dense direct solve") {
    ElasticityTensor C{1.0, 1.0, 0.08};
    FilmMesh m = mesh_film(flat(0.0, 1.0, 0.8), 0.8, 3, 2);  // small: dense probe is O(n^3)
    double cg = equilibrium(m, C).energy;
    double dense = dense_equilibrium_energy(m, C, BoundaryCondition::ClampedBottom);
    CHECK(cg == doctest::Approx(dense).epsilon(1e-9));
}

TEST_CASE("nested refinement does not increase the equilibrium energy") {
    ElasticityTensor C{1.0, 1.0, 0.1};
    Profile p = flat(0.0, 1.0, 0.5);
    double coarse = equilibrium(mesh_film(p, 1.0, 4, 4), C).energy;
    double fine = equilibrium(mesh_film(p, 1.0, 8, 8), C).energy;
    CHECK(fine <= coarse + 1e-12);
}

TEST_CASE("both boundary conditions solve; sides clamp costs more") {
    ElasticityTensor C{1.0, 1.0, 0.1};
    FilmMesh m = mesh_film(flat(0.0, 1.0, 0.5), 0.5, 6, 3);
    double open_sides = equilibrium(m, C, BoundaryCondition::ClampedBottom).energy;
    double clamped = equilibrium(m, C, BoundaryCondition::ClampedBottomAndSides).energy;
    CHECK(clamped >= open_sides - 1e-12);
}

}  // TEST_SUITE
