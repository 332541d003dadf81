#include "lps/cascade.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "flux_newton.hpp"

namespace lps::cascade {

using mesh::Field;
using mesh::Grid;
using mesh::Tag;
using solver::DirichletData;
using solver::EllipticProblem;

ModelSetup ModelSetup::from_scaled(const units::ScaledParams& s) {
    ModelSetup m;
    m.lambda = s.lambda;
    m.delta = s.delta;
    m.phi0 = s.phi0;
    m.eps = 1.0;
    m.mu_n = s.mu_n;
    m.mu_p = s.mu_p;
    m.rec = s.rec;
    m.R_hat = s.R_hat;
    return m;
}

void ModelSetup::validate() const {
    if (!(lambda > 0)) throw InvalidInput("lambda must be positive");
    if (!(delta >= 0)) throw InvalidInput("delta must be nonnegative");
    if (!(eps > 0) || !(mu_n > 0) || !(mu_p > 0))
        throw InvalidInput("scaled coefficients must be positive");
    if (!(R_hat >= 0)) throw InvalidInput("scaled resistance must be nonnegative");
    rec.validate();
}

DirichletData electroneutral_contact_data(const Grid& g, const physics::DopingProfile& doping,
                                          const ModelSetup& s) {
    DirichletData d;
    d.per_face.assign(g.faces().size(), 0.0);
    for (Tag tag : {Tag::dirichlet1, Tag::dirichlet2}) {
        for (int k : g.tagged_faces(tag)) {
            const double c = doping.at_face(g, g.faces()[k]);
            double n0c = c;
            if (s.contact_data == ModelSetup::ContactData::delta_exact)
                n0c = 0.5 * (c + std::sqrt(c * c + 4.0 * s.delta * s.delta));
            d.per_face[k] = s.phi0 + std::log(n0c);
        }
    }
    return d;
}

namespace detail {

/// Nonlinear Poisson for psi0:
/// lambda^2 (A_eps psi - b_eps) + vol (exp(psi - phi0) - C) = 0.
class Psi0Problem : public solver::NewtonProblem {
public:
    Psi0Problem(const Grid& g, const Field& doping, const DirichletData& data,
                const ModelSetup& s)
        : grid_(g), doping_(doping), lambda2_(s.lambda * s.lambda), phi0_(s.phi0) {
        EllipticProblem p;
        p.grid = &g;
        p.coeff = Field(g, s.eps);
        p.rhs = Field(g, 0.0);
        p.dirichlet = data;
        auto sys = solver::assemble_diffusion(p);
        A_ = std::move(sys.A);
        b_ = std::move(sys.b);
    }

    void residual(const std::vector<double>& x, std::vector<double>& r) const override {
        r = A_.multiply(x);
        const double vol = grid_.cell_volume();
        for (int c = 0; c < grid_.cell_count(); ++c)
            r[c] = lambda2_ * (r[c] - b_[c]) + vol * (std::exp(x[c] - phi0_) - doping_[c]);
    }

    sparse::SparseMatrix jacobian(const std::vector<double>& x) const override {
        std::vector<int> ri, ci;
        std::vector<double> vv;
        const int n = A_.size();
        for (int i = 0; i < n; ++i)
            for (int k = A_.row_ptr()[i]; k < A_.row_ptr()[i + 1]; ++k) {
                ri.push_back(i);
                ci.push_back(A_.col()[k]);
                vv.push_back(lambda2_ * A_.val()[k]);
            }
        const double vol = grid_.cell_volume();
        for (int c = 0; c < n; ++c) {
            ri.push_back(c);
            ci.push_back(c);
            vv.push_back(vol * std::exp(x[c] - phi0_));
        }
        return sparse::SparseMatrix::from_triplets(n, std::move(ri), std::move(ci),
                                                   std::move(vv));
    }

private:
    const Grid& grid_;
    const Field& doping_;
    double lambda2_, phi0_;
    sparse::SparseMatrix A_;
    std::vector<double> b_;
};

/// Order-0 hole problem:
/// -div(mu_p e^{phip-psi0} grad phip) + r0(n0)(e^{phip-phi0}-1) - G = 0.
class Phip0Problem : public solver::NewtonProblem {
public:
    Phip0Problem(const Grid& g, const Field& psi0, const Field& r0_field, const Field& G,
                 const ModelSetup& s)
        : grid_(g), psi0_(psi0), r0_(r0_field), G_(G), mu_p_(s.mu_p), phi0_(s.phi0) {
        bc_.d1 = bc_.d2 = s.phi0;
    }

    const DirichletData& data() const { return bc_; }

    void residual(const std::vector<double>& x, std::vector<double>& r) const override {
        const int n = grid_.cell_count();
        r.assign(n, 0.0);
        std::vector<double> a(n);
        for (int c = 0; c < n; ++c) a[c] = mu_p_ * std::exp(x[c] - psi0_[c]);
        solver::detail::flux_residual(grid_, a, x, bc_, r);
        const double vol = grid_.cell_volume();
        for (int c = 0; c < n; ++c)
            r[c] += vol * (r0_[c] * std::expm1(x[c] - phi0_) - G_[c]);
    }

    sparse::SparseMatrix jacobian(const std::vector<double>& x) const override {
        const int n = grid_.cell_count();
        std::vector<double> res(n, 0.0), a(n);
        for (int c = 0; c < n; ++c) a[c] = mu_p_ * std::exp(x[c] - psi0_[c]);
        std::vector<int> ri, ci;
        std::vector<double> vv;
        solver::detail::add_flux_terms(grid_, a, a, x, bc_, res, ri, ci, vv);
        const double vol = grid_.cell_volume();
        for (int c = 0; c < n; ++c) {
            ri.push_back(c);
            ci.push_back(c);
            vv.push_back(vol * r0_[c] * std::exp(x[c] - phi0_));
        }
        return sparse::SparseMatrix::from_triplets(n, std::move(ri), std::move(ci),
                                                   std::move(vv));
    }

private:
    const Grid& grid_;
    const Field& psi0_;
    const Field& r0_;
    const Field& G_;
    double mu_p_, phi0_;
    DirichletData bc_;
};

}  // namespace detail

namespace {

using detail::Phip0Problem;
using detail::Psi0Problem;

double data_min(const Grid& g, const DirichletData& d) {
    double m = std::numeric_limits<double>::infinity();
    for (Tag t : {Tag::dirichlet1, Tag::dirichlet2})
        for (int k : g.tagged_faces(t)) m = std::min(m, d.value(g, k));
    return m;
}

double data_max(const Grid& g, const DirichletData& d) {
    double m = -std::numeric_limits<double>::infinity();
    for (Tag t : {Tag::dirichlet1, Tag::dirichlet2})
        for (int k : g.tagged_faces(t)) m = std::max(m, d.value(g, k));
    return m;
}

}  // namespace

std::unique_ptr<solver::NewtonProblem> make_psi0_problem(const Grid& g,
                                                         const Field& doping_field,
                                                         const DirichletData& data,
                                                         const ModelSetup& setup) {
    return std::make_unique<Psi0Problem>(g, doping_field, data, setup);
}

std::unique_ptr<solver::NewtonProblem> make_phip0_problem(const Grid& g, const Field& psi0,
                                                          const Field& r0_field,
                                                          const Field& G,
                                                          const ModelSetup& setup) {
    return std::make_unique<Phip0Problem>(g, psi0, r0_field, G, setup);
}

Field solve_w(const Grid& g, const Field& n0, double mu_n) {
    EllipticProblem p;
    p.grid = &g;
    p.coeff = Field(g);
    for (int c = 0; c < g.cell_count(); ++c) p.coeff[c] = mu_n * n0[c];
    p.rhs = Field(g, 0.0);
    p.dirichlet.d1 = 0.0;
    p.dirichlet.d2 = 1.0;
    auto sys = solver::assemble_diffusion(p);
    auto lu = sparse::BandedLU::factor(sys.A);
    return Field(g, lu.solve_copy(sys.b));
}

Field solve_zero_contact(const Grid& g, const Field& n0, double mu_n, const Field& rhs) {
    EllipticProblem p;
    p.grid = &g;
    p.coeff = Field(g);
    for (int c = 0; c < g.cell_count(); ++c) p.coeff[c] = mu_n * n0[c];
    p.rhs = rhs;
    auto sys = solver::assemble_diffusion(p);
    auto lu = sparse::BandedLU::factor(sys.A);
    return Field(g, lu.solve_copy(sys.b));
}

Field solve_psi2_system(const Grid& g, const ModelSetup& setup, const Field& n0,
                        const Field& source, double uD2) {
    EllipticProblem p;
    p.grid = &g;
    p.coeff = Field(g, setup.eps);
    p.rhs = Field(g, 0.0);
    p.dirichlet.d1 = 0.0;
    p.dirichlet.d2 = uD2;
    auto sys = solver::assemble_diffusion(p);
    const double lambda2 = setup.lambda * setup.lambda;
    const double vol = g.cell_volume();
    std::vector<int> ri, ci;
    std::vector<double> vv;
    for (int i = 0; i < sys.A.size(); ++i)
        for (int k = sys.A.row_ptr()[i]; k < sys.A.row_ptr()[i + 1]; ++k) {
            ri.push_back(i);
            ci.push_back(sys.A.col()[k]);
            vv.push_back(lambda2 * sys.A.val()[k]);
        }
    std::vector<double> b(g.cell_count());
    for (int c = 0; c < g.cell_count(); ++c) {
        ri.push_back(c);
        ci.push_back(c);
        vv.push_back(vol * n0[c]);
        b[c] = lambda2 * sys.b[c] + vol * source[c];
    }
    auto op = sparse::SparseMatrix::from_triplets(g.cell_count(), std::move(ri),
                                                  std::move(ci), std::move(vv));
    auto lu = sparse::BandedLU::factor(op);
    return Field(g, lu.solve_copy(b));
}

CascadeSolver::CascadeSolver(const Grid& grid, const physics::DopingProfile& doping,
                             ModelSetup setup, CascadeSettings settings)
    : grid_(&grid), doping_(doping), setup_(setup), settings_(std::move(settings)) {
    setup_.validate();
    doping_field_ = doping_.evaluate(grid);
    psi0_data_ = electroneutral_contact_data(grid, doping_, setup_);

    // order-0 potential; the electroneutral field is the exact dark solution
    // and the standing initial guess
    Psi0Problem psi_problem(grid, doping_field_, psi0_data_, setup_);
    std::vector<double> x(grid.cell_count());
    for (int c = 0; c < grid.cell_count(); ++c)
        x[c] = setup_.phi0 + std::log(doping_field_[c]);
    solver::NewtonSettings ns = settings_.newton;
    ns.label = "psi0";
    try {
        psi0_report_ = solver::newton_solve(psi_problem, x, ns);
    } catch (const NumericalError& e) {
        throw StageError("psi0", e.what());
    }
    psi0_ = Field(grid, std::move(x));

    n0_ = Field(grid);
    for (int c = 0; c < grid.cell_count(); ++c)
        n0_[c] = std::exp(psi0_[c] - setup_.phi0);

    // maximum-principle constants for the order-0 fields
    const double c_min = doping_field_.min(), c_max = doping_field_.max();
    psi_lower_ = std::min(data_min(grid, psi0_data_), setup_.phi0 + std::log(c_min));
    psi_upper_ = std::max(data_max(grid, psi0_data_), setup_.phi0 + std::log(c_max));
    const auto& rec = setup_.rec;
    r_lower_ = rec.Cd + rec.Cn * std::exp(psi_lower_ - setup_.phi0) +
               std::exp(setup_.phi0 - psi_upper_) / rec.tau_p;
    r_upper_ = rec.Cd + rec.Cn * std::exp(psi_upper_ - setup_.phi0) +
               std::exp(setup_.phi0 - psi_lower_) / rec.tau_p;

    // electron operator A_n = -div(mu_n n0 grad .): one factorization serves
    // the w problem, every phin* solve, and the scan
    Field a_n(grid);
    for (int c = 0; c < grid.cell_count(); ++c) a_n[c] = setup_.mu_n * n0_[c];
    an_faces_ = solver::face_coefficients(grid, a_n);
    EllipticProblem wp;
    wp.grid = &grid;
    wp.coeff = a_n;
    wp.rhs = Field(grid, 0.0);
    wp.dirichlet.d1 = 0.0;
    wp.dirichlet.d2 = 1.0;
    auto wsys = solver::assemble_diffusion(wp);
    an_matrix_ = std::move(wsys.A);
    try {
        an_factor_ = sparse::BandedLU::factor(an_matrix_);
    } catch (const NumericalError& e) {
        throw StageError("w", e.what());
    }
    std::vector<double> wv = an_factor_.solve_copy(wsys.b);
    w_ = Field(grid, std::move(wv));
    DirichletData wd;
    wd.d1 = 0.0;
    wd.d2 = 1.0;
    form_ww_ = solver::gradient_form(grid, an_faces_, w_, wd, w_, wd);

    // psi2 operator lambda^2 A_eps + vol diag(n0), laser independent
    EllipticProblem ep;
    ep.grid = &grid;
    ep.coeff = Field(grid, setup_.eps);
    ep.rhs = Field(grid, 0.0);
    auto esys = solver::assemble_diffusion(ep);
    const double lambda2 = setup_.lambda * setup_.lambda;
    std::vector<int> ri, ci;
    std::vector<double> vv;
    for (int i = 0; i < esys.A.size(); ++i)
        for (int k = esys.A.row_ptr()[i]; k < esys.A.row_ptr()[i + 1]; ++k) {
            ri.push_back(i);
            ci.push_back(esys.A.col()[k]);
            vv.push_back(lambda2 * esys.A.val()[k]);
        }
    const double vol = grid.cell_volume();
    for (int c = 0; c < grid.cell_count(); ++c) {
        ri.push_back(c);
        ci.push_back(c);
        vv.push_back(vol * n0_[c]);
    }
    auto psi2_op = sparse::SparseMatrix::from_triplets(grid.cell_count(), std::move(ri),
                                                       std::move(ci), std::move(vv));
    try {
        psi2_factor_ = sparse::BandedLU::factor(psi2_op);
    } catch (const NumericalError& e) {
        throw StageError("psi2", e.what());
    }
}

AsymptoticSolution CascadeSolver::solve(const physics::LaserSpec& laser) const {
    const Grid& g = *grid_;
    const int n = g.cell_count();
    const double vol = g.cell_volume();
    const double phi0 = setup_.phi0;

    AsymptoticSolution sol;
    sol.delta = setup_.delta;
    sol.psi0 = psi0_;
    sol.n0 = n0_;
    sol.w = w_;
    sol.psi0_report = psi0_report_;

    const Field G = physics::generation(g, laser);
    const double G_sup = std::max(0.0, G.max());

    Field r0_field(g);
    for (int c = 0; c < n; ++c) r0_field[c] = physics::r0(n0_[c], setup_.rec);

    // The hole problem is linear in the Slotboom variable v = e^{phip-phi0}:
    // -div(mu_p e^{phi0-psi0} grad v) + r0 v = G + r0, v = 1 on the contacts.
    // One linear solve gives the initial guess at any laser amplitude; the
    // Newton iteration below then converges the quasi-Fermi-form scheme.
    // In the dark v = 1 exactly and the guess is already the solution.
    std::vector<double> x(n);
    {
        EllipticProblem vp;
        vp.grid = &g;
        vp.coeff = Field(g);
        for (int c = 0; c < n; ++c)
            vp.coeff[c] = setup_.mu_p * std::exp(phi0 - psi0_[c]);
        vp.rhs = Field(g, 0.0);
        vp.dirichlet.d1 = vp.dirichlet.d2 = 1.0;
        auto vsys = solver::assemble_diffusion(vp);
        std::vector<int> ri, ci;
        std::vector<double> vv;
        for (int i = 0; i < vsys.A.size(); ++i)
            for (int k = vsys.A.row_ptr()[i]; k < vsys.A.row_ptr()[i + 1]; ++k) {
                ri.push_back(i);
                ci.push_back(vsys.A.col()[k]);
                vv.push_back(vsys.A.val()[k]);
            }
        std::vector<double> b(n);
        for (int c = 0; c < n; ++c) {
            ri.push_back(c);
            ci.push_back(c);
            vv.push_back(vol * r0_field[c]);
            b[c] = vsys.b[c] + vol * (G[c] + r0_field[c]);
        }
        auto op = sparse::SparseMatrix::from_triplets(n, std::move(ri), std::move(ci),
                                                      std::move(vv));
        std::vector<double> v = sparse::BandedLU::factor(op).solve_copy(b);
        for (int c = 0; c < n; ++c) {
            if (!(v[c] > 0)) throw StageError("phip0", "slotboom guess not positive");
            x[c] = phi0 + std::log(v[c]);
        }
    }
    Phip0Problem pp(g, psi0_, r0_field, G, setup_);
    solver::NewtonSettings ns = settings_.newton;
    ns.label = "phip0";
    try {
        sol.phip0_report = solver::newton_solve(pp, x, ns);
    } catch (const NumericalError& e) {
        throw StageError("phip0", e.what());
    }
    sol.phip0 = Field(g, std::move(x));
    const DirichletData phip_bc = pp.data();

    sol.p0 = Field(g);
    for (int c = 0; c < n; ++c) sol.p0[c] = std::exp(sol.phip0[c] - psi0_[c]);

    // R^(0) - G drives phin*; e^{phip0-phi0} - 1 = n0 p0 - 1 cellwise
    Field R0(g);
    for (int c = 0; c < n; ++c) R0[c] = r0_field[c] * std::expm1(sol.phip0[c] - phi0);
    std::vector<double> b_star(n);
    for (int c = 0; c < n; ++c) b_star[c] = vol * (R0[c] - G[c]);
    std::vector<double> star = an_factor_.solve_copy(b_star);
    sol.phin_star = Field(g, std::move(star));
    const DirichletData zero_bc;  // 0 on both contacts

    // closed-form coupled voltage
    DirichletData wd;
    wd.d1 = 0.0;
    wd.d2 = 1.0;
    Field a_p(g);
    for (int c = 0; c < n; ++c) a_p[c] = setup_.mu_p * sol.p0[c];
    const auto ap_faces = solver::face_coefficients(g, a_p);
    const double num = solver::gradient_form(g, an_faces_, sol.phin_star, zero_bc, w_, wd) +
                       solver::gradient_form(g, ap_faces, sol.phip0, phip_bc, w_, wd);
    const double den = 1.0 + setup_.R_hat * form_ww_;
    sol.uD2 = -setup_.R_hat * num / den;

    // phin2 by superposition, with the coupled-system residual recorded
    sol.phin2 = Field(g);
    for (int c = 0; c < n; ++c) sol.phin2[c] = sol.phin_star[c] + sol.uD2 * w_[c];
    DirichletData phin2_bc;
    phin2_bc.d1 = 0.0;
    phin2_bc.d2 = sol.uD2;
    {
        std::vector<double> res = an_matrix_.multiply(sol.phin2.values());
        // subtract the Dirichlet boundary load for data (0, uD2)
        for (int k : g.tagged_faces(Tag::dirichlet2)) {
            const mesh::Face& f = g.faces()[k];
            res[f.left] -= an_faces_[k] * f.area / f.dist * sol.uD2;
        }
        double rinf = 0.0;
        for (int c = 0; c < n; ++c) rinf = std::max(rinf, std::abs(res[c] - b_star[c]));
        sol.phin2_residual_inf = rinf;
    }

    // contact-flux form of the coupling condition
    sol.uD2_flux_form =
        setup_.R_hat *
        (solver::contact_flux(g, an_faces_, sol.phin2, phin2_bc, Tag::dirichlet2) +
         solver::contact_flux(g, ap_faces, sol.phip0, phip_bc, Tag::dirichlet2));

    // second-order potential correction
    {
        EllipticProblem ep;
        ep.grid = &g;
        ep.coeff = Field(g, setup_.eps);
        ep.rhs = Field(g, 0.0);
        ep.dirichlet.d1 = 0.0;
        ep.dirichlet.d2 = sol.uD2;
        auto esys = solver::assemble_diffusion(ep);
        const double lambda2 = setup_.lambda * setup_.lambda;
        std::vector<double> b(n);
        for (int c = 0; c < n; ++c)
            b[c] = lambda2 * esys.b[c] + vol * (sol.p0[c] + n0_[c] * sol.phin2[c]);
        std::vector<double> p2 = psi2_factor_.solve_copy(b);
        sol.psi2 = Field(g, std::move(p2));
    }

    sol.n2 = Field(g);
    for (int c = 0; c < n; ++c) sol.n2[c] = n0_[c] * (sol.psi2[c] - sol.phin2[c]);

    // reconstruction
    const double d2 = setup_.delta * setup_.delta;
    sol.psi = Field(g);
    sol.phi_n = Field(g);
    sol.phi_p = sol.phip0;
    for (int c = 0; c < n; ++c) {
        sol.psi[c] = psi0_[c] + d2 * sol.psi2[c];
        sol.phi_n[c] = phi0 + d2 * sol.phin2[c];
    }
    sol.uD = d2 * sol.uD2;

    // the analytic estimates as executable validation
    EstimateConstants tc;
    tc.psi0_lower = psi_lower_;
    tc.psi0_upper = psi_upper_;
    tc.r_lower = r_lower_;
    tc.r_upper = r_upper_;
    tc.G_sup = G_sup;
    tc.phip0_lower = phi0 + std::log(r_lower_ / r_upper_);
    tc.phip0_upper = phi0 + std::log((r_upper_ + G_sup) / r_lower_);
    tc.phin_star_lower = std::min(0.0, r_lower_ - G_sup);
    tc.phin_star_upper = r_upper_;
    const double h1_star = solver::h1_norm(g, sol.phin_star, zero_bc);
    const double h1_phip = solver::h1_norm(g, sol.phip0, phip_bc);
    const double h1_w = solver::h1_norm(g, w_, wd);
    double an_max = 0.0, ap_max = 0.0;
    for (int c = 0; c < n; ++c) {
        an_max = std::max(an_max, setup_.mu_n * n0_[c]);
        ap_max = std::max(ap_max, setup_.mu_p * sol.p0[c]);
    }
    tc.uD_bar = setup_.R_hat * (an_max * h1_star + ap_max * h1_phip) * h1_w;
    sol.constants = tc;

    const double slack = settings_.bound_slack;
    sol.bounds.push_back(
        solver::check_bounds(sol.psi0, tc.psi0_lower, tc.psi0_upper, slack, "psi0"));
    sol.bounds.push_back(
        solver::check_bounds(sol.phip0, tc.phip0_lower, tc.phip0_upper, slack, "phip0"));
    sol.bounds.push_back(solver::check_bounds(sol.w, 0.0, 1.0, slack, "w"));
    sol.bounds.push_back(solver::check_bounds(sol.phin_star, tc.phin_star_lower,
                                              tc.phin_star_upper, slack, "phin_star"));
    sol.bounds.push_back(
        solver::check_bounds_scalar(sol.uD2, -tc.uD_bar, tc.uD_bar, slack, "uD2"));
    sol.bounds.push_back(solver::check_bounds(sol.phin2, tc.phin_star_lower - tc.uD_bar,
                                              tc.phin_star_upper + tc.uD_bar, slack,
                                              "phin2"));
    double pn_min = std::numeric_limits<double>::infinity(), pn_max = 0.0;
    for (int c = 0; c < n; ++c) {
        const double q = sol.p0[c] / n0_[c];
        pn_min = std::min(pn_min, q);
        pn_max = std::max(pn_max, q);
    }
    const double psi2_lower =
        std::min(-tc.uD_bar, pn_min) + std::min(0.0, tc.r_lower - tc.G_sup) - tc.uD_bar;
    const double psi2_upper = std::max(tc.uD_bar, pn_max) + tc.r_upper + tc.uD_bar;
    sol.bounds.push_back(
        solver::check_bounds(sol.psi2, psi2_lower, psi2_upper, slack, "psi2"));

    return sol;
}

bool AsymptoticSolution::bounds_pass() const {
    for (const auto& b : bounds)
        if (!b.pass) return false;
    return true;
}

const solver::BoundsReport& AsymptoticSolution::bound(const std::string& name) const {
    for (const auto& b : bounds)
        if (b.name == name) return b;
    throw InvalidInput("no bounds report named " + name);
}

AsymptoticSolution run_cascade(const Grid& grid, const physics::DopingProfile& doping,
                               const physics::LaserSpec& laser, const ModelSetup& setup,
                               const CascadeSettings& settings) {
    CascadeSolver solver(grid, doping, setup, settings);
    return solver.solve(laser);
}

}  // namespace lps::cascade
