#pragma once

#include <memory>
#include <string>
#include <vector>

#include "lps/bounds.hpp"
#include "lps/elliptic.hpp"
#include "lps/newton.hpp"
#include "lps/physics.hpp"
#include "lps/sparse.hpp"
#include "lps/units.hpp"

namespace lps::cascade {

/// Scaled model constants shared by the reduced cascade and the full
/// finite-delta solver.
struct ModelSetup {
    double lambda = 1.0;
    double delta = 0.0;  ///< used for the contact data and the reconstruction
    double phi0 = 0.0;   ///< quasi-Fermi gauge
    double eps = 1.0;    ///< scaled permittivity
    double mu_n = 1.0;
    double mu_p = 1.0;
    physics::RecombinationParams rec;
    double R_hat = 0.0;

    /// Contact value for psi: phi0 + ln(nhat0) with the delta-exact
    /// electroneutral density nhat0 = (C + sqrt(C^2 + 4 delta^2))/2, or its
    /// strict delta->0 limit C.
    enum class ContactData { delta_exact, strict_limit };
    ContactData contact_data = ContactData::delta_exact;

    static ModelSetup from_scaled(const units::ScaledParams& s);
    void validate() const;
};

struct CascadeSettings {
    solver::NewtonSettings newton;
    double bound_slack = 1e-8;  ///< scaled units; covers solver tolerance only

    CascadeSettings() {
        newton.abs_tol = 1e-11;
        newton.rel_tol = 1e-10;  // residual scale grows with the generation amplitude
    }
};

/// Constants of the maximum-principle estimates, evaluated from
/// the doping range, the contact data and the generation sup.
struct EstimateConstants {
    double psi0_lower = 0, psi0_upper = 0;
    double r_lower = 0, r_upper = 0;
    double G_sup = 0;
    double phip0_lower = 0, phip0_upper = 0;
    double phin_star_lower = 0, phin_star_upper = 0;
    double uD_bar = 0;  ///< resistance-weighted H1 estimate for |uD2|
};

struct AsymptoticSolution {
    // cascade unknowns
    mesh::Field psi0, phip0, w, phin_star, phin2, psi2;
    double uD2 = 0.0;
    // derived densities
    mesh::Field n0, p0, n2;
    double delta = 0.0;
    // reconstructed second-order fields and signal
    mesh::Field psi, phi_n, phi_p;
    double uD = 0.0;
    // validation
    std::vector<solver::BoundsReport> bounds;
    EstimateConstants constants;
    double uD2_flux_form = 0.0;     ///< contact-flux evaluation of the coupling
    double phin2_residual_inf = 0.0;  ///< residual of the coupled phin2 system
    solver::NewtonReport psi0_report, phip0_report;

    bool bounds_pass() const;
    const solver::BoundsReport& bound(const std::string& name) const;
};

/// Precomputes the laser-independent parts (psi0, w, the factorizations of
/// the electron operator and the psi2 operator) once; solve() is const and
/// safe to call concurrently for distinct laser positions.
class CascadeSolver {
public:
    CascadeSolver(const mesh::Grid& grid, const physics::DopingProfile& doping,
                  ModelSetup setup, CascadeSettings settings = {});

    AsymptoticSolution solve(const physics::LaserSpec& laser) const;

    const mesh::Field& psi0() const { return psi0_; }
    const mesh::Field& n0() const { return n0_; }
    const mesh::Field& w() const { return w_; }
    const solver::DirichletData& psi0_data() const { return psi0_data_; }
    const ModelSetup& setup() const { return setup_; }
    const solver::NewtonReport& psi0_report() const { return psi0_report_; }

private:
    const mesh::Grid* grid_;
    physics::DopingProfile doping_;
    ModelSetup setup_;
    CascadeSettings settings_;

    mesh::Field doping_field_;
    solver::DirichletData psi0_data_;
    mesh::Field psi0_, n0_, w_;
    std::vector<double> an_faces_;       ///< face coefficients of mu_n n0
    sparse::SparseMatrix an_matrix_;     ///< assembled electron operator
    sparse::BandedLU an_factor_;         ///< shared by the w and phin* solves
    sparse::BandedLU psi2_factor_;       ///< lambda^2 A_eps + vol diag(n0)
    double form_ww_ = 0.0;               ///< gradient_form(w, w) with mu_n n0
    solver::NewtonReport psi0_report_;
    double psi_lower_ = 0, psi_upper_ = 0, r_lower_ = 0, r_upper_ = 0;
};

/// One-shot convenience wrapper around CascadeSolver.
AsymptoticSolution run_cascade(const mesh::Grid& grid, const physics::DopingProfile& doping,
                               const physics::LaserSpec& laser, const ModelSetup& setup,
                               const CascadeSettings& settings = {});

/// Electroneutral contact data for the electrostatic potential,
/// phi0 + ln(nhat0(C)) per Dirichlet face; shared with the full model.
solver::DirichletData electroneutral_contact_data(const mesh::Grid& g,
                                                  const physics::DopingProfile& doping,
                                                  const ModelSetup& setup);

// Individual stage solves and residual/Jacobian factories. The returned
// problems keep references to the passed fields; callers own the lifetimes.
// CascadeSolver is the fast orchestration; these exist for stage-level
// verification and diagnostics.

std::unique_ptr<solver::NewtonProblem> make_psi0_problem(const mesh::Grid& g,
                                                         const mesh::Field& doping_field,
                                                         const solver::DirichletData& data,
                                                         const ModelSetup& setup);
std::unique_ptr<solver::NewtonProblem> make_phip0_problem(const mesh::Grid& g,
                                                          const mesh::Field& psi0,
                                                          const mesh::Field& r0_field,
                                                          const mesh::Field& G,
                                                          const ModelSetup& setup);

/// -div(mu_n n0 grad w) = 0, w = 0 on Gamma_D1, w = 1 on Gamma_D2.
mesh::Field solve_w(const mesh::Grid& g, const mesh::Field& n0, double mu_n);

/// -div(mu_n n0 grad u) = rhs with u = 0 on both contacts (the phin* stage).
mesh::Field solve_zero_contact(const mesh::Grid& g, const mesh::Field& n0, double mu_n,
                               const mesh::Field& rhs);

/// -lambda^2 div(eps grad psi2) + n0 psi2 = source with psi2 = 0 on
/// Gamma_D1 and psi2 = uD2 on Gamma_D2 (source = p0 + n0 phin2).
mesh::Field solve_psi2_system(const mesh::Grid& g, const ModelSetup& setup,
                              const mesh::Field& n0, const mesh::Field& source, double uD2);

}  // namespace lps::cascade
