#include "epirelax/elastic.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>

namespace epirelax {

std::array<double, 4> mismatch_strain(double y, const ElasticityTensor& C) {
    if (y >= 0.0) return {C.mismatch, 0.0, 0.0, 0.0};  // row-major 2x2
    return {0.0, 0.0, 0.0, 0.0};
}

FilmMesh mesh_film(const Profile& p, double d, int nx, int ny) {
    if (!p.is_lipschitz()) fail("ProfileHasCuts", "mesh_film requires a profile without jumps or cuts");
    if (!(d > 0.0) || nx < 2 || ny < 2) fail("DegenerateResolution", "need d > 0 and nx, ny >= 2");

    const double a = p.a(), b = p.b();
    const double collapse_tol = 1e-12 * std::max(1.0, p.max_height());

    FilmMesh m;
    m.substrate_depth = d;
    m.nx = nx;
    m.ny = ny;

    // Column node ids: substrate rows 0..ny (y in [-d, 0]), film rows 1..ny.
    std::vector<std::vector<int>> col_sub(nx + 1), col_film(nx + 1);
    for (int i = 0; i <= nx; ++i) {
        double x = a + (b - a) * static_cast<double>(i) / nx;
        double h = p.value(x);
        col_sub[i].resize(ny + 1);
        for (int j = 0; j <= ny; ++j) {
            double y = -d + d * static_cast<double>(j) / ny;
            col_sub[i][j] = static_cast<int>(m.nodes.size());
            m.nodes.push_back(Point{x, y});
            std::uint8_t fl = 0;
            if (j == 0) fl |= kNodeBottom;
            if (i == 0 || i == nx) fl |= kNodeLateral;
            if (j == ny && h <= collapse_tol) fl |= kNodeSurface;
            m.flags.push_back(fl);
        }
        col_film[i].resize(ny + 1);
        col_film[i][0] = col_sub[i][ny];
        for (int j = 1; j <= ny; ++j) {
            if (h <= collapse_tol) {
                col_film[i][j] = col_sub[i][ny];  // collapsed film column
                continue;
            }
            double y = h * static_cast<double>(j) / ny;
            col_film[i][j] = static_cast<int>(m.nodes.size());
            m.nodes.push_back(Point{x, y});
            std::uint8_t fl = 0;
            if (i == 0 || i == nx) fl |= kNodeLateral;
            if (j == ny) fl |= kNodeSurface;
            m.flags.push_back(fl);
        }
    }

    auto tri_area = [&](int i0, int i1, int i2) {
        const Point& p0 = m.nodes[i0];
        const Point& p1 = m.nodes[i1];
        const Point& p2 = m.nodes[i2];
        return 0.5 * ((p1.x - p0.x) * (p2.y - p0.y) - (p2.x - p0.x) * (p1.y - p0.y));
    };
    auto emit = [&](int i0, int i1, int i2) {
        double A = tri_area(i0, i1, i2);
        if (std::abs(A) <= 1e-14) return;
        if (A < 0.0) std::swap(i1, i2);
        m.triangles.push_back({i0, i1, i2});
    };
    auto emit_quad = [&](int bl, int br, int tr, int tl) {
        if (bl == tl && br == tr) return;        // fully collapsed band
        if (bl == tl) { emit(bl, br, tr); return; }
        if (br == tr) { emit(bl, br, tl); return; }
        double d_bltr = dist(m.nodes[bl], m.nodes[tr]);
        double d_brtl = dist(m.nodes[br], m.nodes[tl]);
        if (d_bltr <= d_brtl) {                  // bl-tr on ties
            emit(bl, br, tr);
            emit(bl, tr, tl);
        } else {
            emit(bl, br, tl);
            emit(br, tr, tl);
        }
    };

    for (int i = 0; i < nx; ++i) {
        for (int j = 0; j < ny; ++j)
            emit_quad(col_sub[i][j], col_sub[i + 1][j], col_sub[i + 1][j + 1], col_sub[i][j + 1]);
        for (int j = 0; j < ny; ++j)
            emit_quad(col_film[i][j], col_film[i + 1][j], col_film[i + 1][j + 1], col_film[i][j + 1]);
    }
    return m;
}

namespace {

struct TriGeom {
    double area;
    // P1 shape gradients: grad N_k = (bx[k], by[k]).
    std::array<double, 3> bx, by;
    double cy;  // centroid y
};

TriGeom tri_geom(const FilmMesh& m, const std::array<int, 3>& t) {
    const Point& p0 = m.nodes[t[0]];
    const Point& p1 = m.nodes[t[1]];
    const Point& p2 = m.nodes[t[2]];
    double det = (p1.x - p0.x) * (p2.y - p0.y) - (p2.x - p0.x) * (p1.y - p0.y);
    TriGeom g;
    g.area = 0.5 * det;
    g.bx = {(p1.y - p2.y) / det, (p2.y - p0.y) / det, (p0.y - p1.y) / det};
    g.by = {(p2.x - p1.x) / det, (p0.x - p2.x) / det, (p1.x - p0.x) / det};
    g.cy = (p0.y + p1.y + p2.y) / 3.0;
    return g;
}

double density_W(const std::array<double, 4>& A, const ElasticityTensor& C) {
    double sxx = A[0];
    double syy = A[3];
    double sxy = 0.5 * (A[1] + A[2]);
    double tr = sxx + syy;
    return C.mu * (sxx * sxx + syy * syy + 2.0 * sxy * sxy) + 0.5 * C.lambda * tr * tr;
}

}  // namespace

double elastic_energy(const FilmMesh& m, const DisplacementField& v, const ElasticityTensor& C) {
    C.validate();
    if (v.size() != m.nodes.size()) fail("SizeMismatch", "displacement size does not match mesh");
    KahanSum s;
    for (const auto& t : m.triangles) {
        TriGeom g = tri_geom(m, t);
        std::array<double, 4> grad{0.0, 0.0, 0.0, 0.0};  // dvx/dx, dvx/dy, dvy/dx, dvy/dy
        for (int k = 0; k < 3; ++k) {
            grad[0] += v[t[k]][0] * g.bx[k];
            grad[1] += v[t[k]][0] * g.by[k];
            grad[2] += v[t[k]][1] * g.bx[k];
            grad[3] += v[t[k]][1] * g.by[k];
        }
        std::array<double, 4> e0 = mismatch_strain(g.cy, C);
        std::array<double, 4> A{grad[0] - e0[0], grad[1] - e0[1], grad[2] - e0[2], grad[3] - e0[3]};
        s.add(g.area * density_W(A, C));
    }
    return s.value();
}

namespace {

// Symmetric CSR matrix (full pattern stored) with Jacobi-preconditioned CG.
struct Csr {
    std::vector<int> ptr, col;
    std::vector<double> val;
    int n = 0;

    void mul(const std::vector<double>& x, std::vector<double>& y) const {
        for (int i = 0; i < n; ++i) {
            double s = 0.0;
            for (int k = ptr[i]; k < ptr[i + 1]; ++k) s += val[k] * x[col[k]];
            y[i] = s;
        }
    }
};

double dot(const std::vector<double>& a, const std::vector<double>& b) {
    KahanSum s;
    for (std::size_t i = 0; i < a.size(); ++i) s.add(a[i] * b[i]);
    return s.value();
}

}  // namespace

EquilibriumResult equilibrium(const FilmMesh& m, const ElasticityTensor& C,
                              BoundaryCondition bc, double tol) {
    C.validate();
    const int nn = static_cast<int>(m.nodes.size());

    std::vector<bool> dirichlet(nn, false);
    for (int i = 0; i < nn; ++i) {
        if (m.flags[i] & kNodeBottom) dirichlet[i] = true;
        if (bc == BoundaryCondition::ClampedBottomAndSides && (m.flags[i] & kNodeLateral))
            dirichlet[i] = true;
    }
    if (std::none_of(dirichlet.begin(), dirichlet.end(), [](bool b) { return b; }))
        fail("NoDirichletNodes", "equilibrium needs at least one Dirichlet node");

    // Free dof numbering: two dofs per non-Dirichlet node.
    std::vector<int> dof(nn, -1);
    int nfree = 0;
    for (int i = 0; i < nn; ++i)
        if (!dirichlet[i]) {
            dof[i] = nfree;
            nfree += 2;
        }

    // Element stiffness for energy 1/2 (E - E0) : C : (E - E0):
    //   k[(a,p),(b,q)] = mu (b_a.p b_b.q? ) assembled from the quadratic form;
    // worked per-element with the symmetric gradient in Voigt form
    //   eps = (dvx/dx, dvy/dy, dvx/dy + dvy/dx),  W = 1/2 eps^T D eps,
    //   D = [[2mu+lam, lam, 0], [lam, 2mu+lam, 0], [0, 0, mu]].
    const double D00 = 2.0 * C.mu + C.lambda;
    const double D01 = C.lambda;
    const double D22 = C.mu;

    std::vector<std::vector<std::pair<int, double>>> rows(nfree);
    std::vector<double> rhs(nfree, 0.0);

    for (const auto& t : m.triangles) {
        TriGeom g = tri_geom(m, t);
        // B matrix (3 x 6), dof order (vx0, vy0, vx1, vy1, vx2, vy2).
        double B[3][6] = {{0}};
        for (int k = 0; k < 3; ++k) {
            B[0][2 * k] = g.bx[k];
            B[1][2 * k + 1] = g.by[k];
            B[2][2 * k] = g.by[k];
            B[2][2 * k + 1] = g.bx[k];
        }
        double DB[3][6];
        for (int j = 0; j < 6; ++j) {
            DB[0][j] = D00 * B[0][j] + D01 * B[1][j];
            DB[1][j] = D01 * B[0][j] + D00 * B[1][j];
            DB[2][j] = D22 * B[2][j];
        }
        double ke[6][6];
        for (int i = 0; i < 6; ++i)
            for (int j = 0; j < 6; ++j)
                ke[i][j] = g.area * (B[0][i] * DB[0][j] + B[1][i] * DB[1][j] + B[2][i] * DB[2][j]);

        // Load from the mismatch: f_e = area * B^T D eps0, eps0 = (t, 0, 0).
        std::array<double, 4> e0 = mismatch_strain(g.cy, C);
        double fe[6];
        for (int i = 0; i < 6; ++i)
            fe[i] = g.area * (B[0][i] * D00 + B[1][i] * D01) * e0[0];

        int gdof[6];
        for (int k = 0; k < 3; ++k) {
            gdof[2 * k] = dof[t[k]] < 0 ? -1 : dof[t[k]];
            gdof[2 * k + 1] = dof[t[k]] < 0 ? -1 : dof[t[k]] + 1;
        }
        for (int i = 0; i < 6; ++i) {
            if (gdof[i] < 0) continue;
            rhs[gdof[i]] += fe[i];
            for (int j = 0; j < 6; ++j) {
                if (gdof[j] < 0) continue;  // Dirichlet value is zero
                rows[gdof[i]].push_back({gdof[j], ke[i][j]});
            }
        }
    }

    Csr K;
    K.n = nfree;
    K.ptr.assign(nfree + 1, 0);
    for (int i = 0; i < nfree; ++i) {
        auto& r = rows[i];
        std::sort(r.begin(), r.end(),
                  [](const auto& a, const auto& b) { return a.first < b.first; });
        std::vector<std::pair<int, double>> merged;
        for (const auto& e : r) {
            if (!merged.empty() && merged.back().first == e.first)
                merged.back().second += e.second;
            else
                merged.push_back(e);
        }
        r = std::move(merged);
        K.ptr[i + 1] = K.ptr[i] + static_cast<int>(r.size());
    }
    K.col.resize(K.ptr.back());
    K.val.resize(K.ptr.back());
    for (int i = 0; i < nfree; ++i)
        for (std::size_t j = 0; j < rows[i].size(); ++j) {
            K.col[K.ptr[i] + static_cast<int>(j)] = rows[i][j].first;
            K.val[K.ptr[i] + static_cast<int>(j)] = rows[i][j].second;
        }

    EquilibriumResult res;
    res.v.assign(nn, {0.0, 0.0});

    double bnorm = std::sqrt(dot(rhs, rhs));
    if (bnorm == 0.0) {
        res.energy = elastic_energy(m, res.v, C);
        return res;
    }

    std::vector<double> diag(nfree, 1.0);
    for (int i = 0; i < nfree; ++i)
        for (int k = K.ptr[i]; k < K.ptr[i + 1]; ++k)
            if (K.col[k] == i && K.val[k] > 0.0) diag[i] = K.val[k];

    std::vector<double> x(nfree, 0.0), rv(rhs), z(nfree), pvec(nfree), Ap(nfree);
    for (int i = 0; i < nfree; ++i) z[i] = rv[i] / diag[i];
    pvec = z;
    double rz = dot(rv, z);
    const int max_it = 20 * nfree;
    int it = 0;
    double rnorm = bnorm;
    for (; it < max_it; ++it) {
        rnorm = std::sqrt(dot(rv, rv));
        if (rnorm <= tol * bnorm) break;
        K.mul(pvec, Ap);
        double pAp = dot(pvec, Ap);
        if (!(pAp > 0.0)) fail("SolverDivergence", "stiffness lost positive definiteness");
        double alpha = rz / pAp;
        for (int i = 0; i < nfree; ++i) {
            x[i] += alpha * pvec[i];
            rv[i] -= alpha * Ap[i];
        }
        for (int i = 0; i < nfree; ++i) z[i] = rv[i] / diag[i];
        double rz_new = dot(rv, z);
        double beta = rz_new / rz;
        rz = rz_new;
        for (int i = 0; i < nfree; ++i) pvec[i] = z[i] + beta * pvec[i];
    }
    if (rnorm > tol * bnorm)
        fail("SolverDivergence",
             "CG did not reach residual " + std::to_string(tol) + " in " + std::to_string(max_it) +
                 " iterations");

    for (int i = 0; i < nn; ++i)
        if (dof[i] >= 0) res.v[i] = {x[dof[i]], x[dof[i] + 1]};
    res.energy = elastic_energy(m, res.v, C);
    res.iterations = it;
    res.relative_residual = rnorm / bnorm;
    return res;
}

}  // namespace epirelax
