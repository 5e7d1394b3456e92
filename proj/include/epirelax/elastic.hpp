#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "epirelax/profile.hpp"

namespace epirelax {

// Linear-elastic bulk energy on the subgraph of a Lipschitz profile plus a
// substrate strip of depth d, discretised with P1 triangles on a
// terrain-following structured mesh. Isotropic elasticity only: two Lame
// constants keep the energy density closed-form; the type leaves room for a
// full 2D tensor later.

struct ElasticityTensor {
    double lambda = 1.0;   // first Lame parameter, >= 0
    double mu = 1.0;       // shear modulus, > 0
    double mismatch = 0.0; // lattice mismatch magnitude t, >= 0

    void validate() const {
        if (!(mu > 0.0) || !(lambda + mu > 0.0))
            fail("DegenerateResolution", "elasticity tensor not positive definite");
        if (mismatch < 0.0) fail("DegenerateResolution", "mismatch must be >= 0");
    }
};

/// Reference strain: t e1 (x) e1 in the film (y >= 0), zero in the substrate.
std::array<double, 4> mismatch_strain(double y, const ElasticityTensor& C);

enum NodeFlag : std::uint8_t {
    kNodeBottom = 1,
    kNodeLateral = 2,
    kNodeSurface = 4,
};

struct FilmMesh {
    std::vector<Point> nodes;
    std::vector<std::array<int, 3>> triangles;  // CCW
    std::vector<std::uint8_t> flags;
    // provenance
    double substrate_depth = 0.0;
    int nx = 0, ny = 0;
};

/// nx+1 uniform columns; per column ny+1 substrate nodes in [-d, 0] and ny
/// film nodes above, following h. Columns with h = 0 collapse their film
/// nodes onto the y = 0 node. Quads split toward the shorter diagonal
/// (bl-tr on ties, which keeps uniformly refined flat meshes nested).
FilmMesh mesh_film(const Profile& p, double d, int nx, int ny);

using DisplacementField = std::vector<std::array<double, 2>>;

/// Sum over triangles of area * W(E(v) - E0(y_centroid)) with
/// W(A) = mu |A_sym|^2 + (lambda/2) tr(A)^2. Elements never straddle y = 0.
double elastic_energy(const FilmMesh& m, const DisplacementField& v, const ElasticityTensor& C);

enum class BoundaryCondition { ClampedBottom, ClampedBottomAndSides };

struct EquilibriumResult {
    DisplacementField v;
    double energy = 0.0;
    int iterations = 0;
    double relative_residual = 0.0;
};

/// Minimiser of the elastic energy with v = 0 on the Dirichlet nodes, via
/// Jacobi-preconditioned conjugate gradients to relative residual 1e-10.
EquilibriumResult equilibrium(const FilmMesh& m, const ElasticityTensor& C,
                              BoundaryCondition bc = BoundaryCondition::ClampedBottom,
                              double tol = 1e-10);

}  // namespace epirelax
