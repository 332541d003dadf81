#pragma once

#include "lps/cascade.hpp"

namespace lps::full {

struct FullSettings {
    solver::NewtonSettings newton;     ///< per Gummel sub-problem
    int max_gummel_sweeps = 200;
    double gummel_tol = 1e-11;         ///< inf-norm of per-sweep field updates
    double coupling_tol = 1e-10;       ///< |R_hat i_D(u) - u| target
    int max_outer_iters = 40;
    bool use_cascade_hint = true;      ///< initialize the secant at delta^2 uD2

    FullSettings() {
        newton.abs_tol = 1e-11;
        newton.rel_tol = 1e-10;
    }
};

struct FullSolution {
    mesh::Field psi, phi_n, phi_p;
    double uD = 0.0;
    double iD = 0.0;           ///< w-weighted volume identity
    double iD_boundary = 0.0;  ///< direct contact-flux sum on Gamma_D2
    double iD_balance = 0.0;   ///< flux(Gamma_D1) + flux(Gamma_D2), conservation check
    double coupling_residual = 0.0;
    int outer_iterations = 0;
    int gummel_sweeps = 0;
};

/// Solves the full scaled coupled system at finite delta with the implicit
/// resistor coupling (safeguarded secant on u_D around Gummel inner solves).
FullSolution solve_full(const mesh::Grid& grid, const physics::DopingProfile& doping,
                        const physics::LaserSpec& laser, const cascade::ModelSetup& setup,
                        const FullSettings& settings = {});

/// i_D through Gamma_D2 for given converged fields, via the w-weighted
/// volume identity (an auxiliary harmonic problem converts the contact
/// integral into gradient forms).
double contact_current(const mesh::Grid& grid, const mesh::Field& psi,
                       const mesh::Field& phi_n, const mesh::Field& phi_p, double uD,
                       const cascade::ModelSetup& setup);

/// Direct discrete boundary-flux evaluation of the same current.
double contact_current_direct(const mesh::Grid& grid, const mesh::Field& psi,
                              const mesh::Field& phi_n, const mesh::Field& phi_p, double uD,
                              const cascade::ModelSetup& setup, mesh::Tag tag);

// Residual/Jacobian factories for the three Gummel sub-problems; the
// returned problems reference the passed fields (caller-owned lifetimes).
std::unique_ptr<solver::NewtonProblem> make_psi_problem(const mesh::Grid& g,
                                                        const mesh::Field& doping_field,
                                                        const mesh::Field& phi_n,
                                                        const mesh::Field& phi_p,
                                                        const cascade::ModelSetup& setup,
                                                        const solver::DirichletData& data);
std::unique_ptr<solver::NewtonProblem> make_phin_problem(const mesh::Grid& g,
                                                         const mesh::Field& psi,
                                                         const mesh::Field& phi_p,
                                                         const mesh::Field& G,
                                                         const cascade::ModelSetup& setup,
                                                         const solver::DirichletData& data);
std::unique_ptr<solver::NewtonProblem> make_phip_problem(const mesh::Grid& g,
                                                         const mesh::Field& psi,
                                                         const mesh::Field& phi_n,
                                                         const mesh::Field& G,
                                                         const cascade::ModelSetup& setup,
                                                         const solver::DirichletData& data);

}  // namespace lps::full
