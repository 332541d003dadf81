#pragma once

#include <vector>

#include "lps/mesh.hpp"
#include "lps/sparse.hpp"

namespace lps::solver {

/// Logarithmic mean (a_L - a_R)/(ln a_L - ln a_R); the limit a_L is used
/// when |ln a_L - ln a_R| < 1e-12. Signals nonpositive input. For the
/// exponential coefficients e^{psi-phi} this averaging is the exponential
/// fitting of the drift-diffusion flux in quasi-Fermi form.
double face_coefficient(double a_left, double a_right);

/// Dirichlet data per contact, optionally refined per boundary face
/// (needed when the electroneutral contact value varies along a contact).
struct DirichletData {
    double d1 = 0.0;
    double d2 = 0.0;
    std::vector<double> per_face;  ///< indexed like grid.faces(); empty = use scalars

    double value(const mesh::Grid& g, int face_index) const;
};

/// -div(a grad u) = f with mixed boundary data; a is a positive cell field,
/// homogeneous Neumann on untagged boundary.
struct EllipticProblem {
    const mesh::Grid* grid = nullptr;
    mesh::Field coeff;
    mesh::Field rhs;
    DirichletData dirichlet;
};

struct AssembledSystem {
    sparse::SparseMatrix A;
    std::vector<double> b;
};

/// Per-face coefficients from the cell field: log-mean across interior
/// faces, adjacent cell value on boundary faces. Signals nonpositive cells.
std::vector<double> face_coefficients(const mesh::Grid& g, const mesh::Field& a);

/// Two-point flux finite-volume assembly with Dirichlet elimination; the
/// result is symmetric positive definite.
AssembledSystem assemble_diffusion(const EllipticProblem& p);

/// Discrete energy form sum_f a_f (du)_f (dv)_f area/dist over interior and
/// Dirichlet faces, the analogue of \int a grad u . grad v dx. Each field
/// brings its own Dirichlet data.
double gradient_form(const mesh::Grid& g, const std::vector<double>& face_coeff,
                     const mesh::Field& u, const DirichletData& ud,
                     const mesh::Field& v, const DirichletData& vd);

/// Outward diffusive flux of -a grad u through one contact:
/// sum over tagged faces of a_f area (u_cell - g)/dist.
double contact_flux(const mesh::Grid& g, const std::vector<double>& face_coeff,
                    const mesh::Field& u, const DirichletData& ud, mesh::Tag tag);

/// Per-face outward flux values (zero on faces without the tag), suitable
/// for mesh::boundary_integral.
std::vector<double> contact_flux_values(const mesh::Grid& g,
                                        const std::vector<double>& face_coeff,
                                        const mesh::Field& u, const DirichletData& ud,
                                        mesh::Tag tag);

/// Discrete H1 norm sqrt(sum vol u^2 + |grad u|^2 form with unit coefficient).
double h1_norm(const mesh::Grid& g, const mesh::Field& u, const DirichletData& ud);

}  // namespace lps::solver
