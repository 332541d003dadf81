#include "lps/full_model.hpp"

#include <cmath>

#include "flux_newton.hpp"

namespace lps::full {

using cascade::ModelSetup;
using mesh::Field;
using mesh::Grid;
using mesh::Tag;
using solver::DirichletData;
using solver::EllipticProblem;

namespace detail {

DirichletData quasi_fermi_data(double phi0, double uD) {
    DirichletData d;
    d.d1 = phi0;
    d.d2 = phi0 + uD;
    return d;
}

DirichletData psi_data_with_bias(const Grid& g, const DirichletData& electroneutral,
                                 double uD) {
    DirichletData d = electroneutral;
    for (int k : g.tagged_faces(Tag::dirichlet2)) d.per_face[k] += uD;
    return d;
}

/// Nonlinear Poisson at finite delta with frozen quasi-Fermi potentials.
class PsiProblem : public solver::NewtonProblem {
public:
    PsiProblem(const Grid& g, const Field& doping, const Field& phi_n, const Field& phi_p,
               const ModelSetup& s, const DirichletData& data)
        : grid_(g), doping_(doping), phi_n_(phi_n), phi_p_(phi_p),
          lambda2_(s.lambda * s.lambda), d2_(s.delta * s.delta) {
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
            r[c] = lambda2_ * (r[c] - b_[c]) +
                   vol * (std::exp(x[c] - phi_n_[c]) - d2_ * std::exp(phi_p_[c] - x[c]) -
                          doping_[c]);
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
            vv.push_back(vol * (std::exp(x[c] - phi_n_[c]) +
                                d2_ * std::exp(phi_p_[c] - x[c])));
        }
        return sparse::SparseMatrix::from_triplets(n, std::move(ri), std::move(ci),
                                                   std::move(vv));
    }

private:
    const Grid& grid_;
    const Field& doping_;
    const Field& phi_n_;
    const Field& phi_p_;
    double lambda2_, d2_;
    sparse::SparseMatrix A_;
    std::vector<double> b_;
};

/// Electron continuity at finite delta with frozen psi, phi_p:
/// -div(mu_n e^{psi-phin} grad phin) - delta^2 [r_delta (e^{phip-phin}-1) - G] = 0.
class PhinProblem : public solver::NewtonProblem {
public:
    PhinProblem(const Grid& g, const Field& psi, const Field& phi_p, const Field& G,
                const ModelSetup& s, const DirichletData& data)
        : grid_(g), psi_(psi), phi_p_(phi_p), G_(G), s_(s), bc_(data) {}

    void residual(const std::vector<double>& x, std::vector<double>& r) const override {
        const int n = grid_.cell_count();
        r.assign(n, 0.0);
        std::vector<double> a(n);
        for (int c = 0; c < n; ++c) a[c] = s_.mu_n * std::exp(psi_[c] - x[c]);
        solver::detail::flux_residual(grid_, a, x, bc_, r);
        const double vol = grid_.cell_volume();
        const double d2 = s_.delta * s_.delta;
        for (int c = 0; c < n; ++c) {
            const double nn = a[c] / s_.mu_n;
            const double pp = d2 * std::exp(phi_p_[c] - psi_[c]);
            const double rd = rate(nn, pp);
            r[c] -= vol * d2 * (rd * std::expm1(phi_p_[c] - x[c]) - G_[c]);
        }
    }

    sparse::SparseMatrix jacobian(const std::vector<double>& x) const override {
        const int n = grid_.cell_count();
        std::vector<double> res(n, 0.0), a(n), dadu(n);
        for (int c = 0; c < n; ++c) {
            a[c] = s_.mu_n * std::exp(psi_[c] - x[c]);
            dadu[c] = -a[c];
        }
        std::vector<int> ri, ci;
        std::vector<double> vv;
        solver::detail::add_flux_terms(grid_, a, dadu, x, bc_, res, ri, ci, vv);
        const double vol = grid_.cell_volume();
        const double d2 = s_.delta * s_.delta;
        const auto& rec = s_.rec;
        for (int c = 0; c < n; ++c) {
            const double nn = a[c] / s_.mu_n;
            const double pp = d2 * std::exp(phi_p_[c] - psi_[c]);
            const double den = rec.tau_p * (nn + s_.delta * rec.nT) +
                               rec.tau_n * (pp + s_.delta * rec.pT);
            const double rd = rec.Cd + rec.Cn * nn + rec.Cp * pp + 1.0 / den;
            const double drd_dn = rec.Cn - rec.tau_p / (den * den);
            const double em = std::expm1(phi_p_[c] - x[c]);
            // d/dphin of -(vol d2)(rd*em - G): dn/dphin = -n
            ri.push_back(c);
            ci.push_back(c);
            vv.push_back(vol * d2 * (drd_dn * nn * em + rd * (em + 1.0)));
        }
        return sparse::SparseMatrix::from_triplets(n, std::move(ri), std::move(ci),
                                                   std::move(vv));
    }

private:
    double rate(double nn, double pp) const {
        const auto& rec = s_.rec;
        const double den =
            rec.tau_p * (nn + s_.delta * rec.nT) + rec.tau_n * (pp + s_.delta * rec.pT);
        return rec.Cd + rec.Cn * nn + rec.Cp * pp + 1.0 / den;
    }

    const Grid& grid_;
    const Field& psi_;
    const Field& phi_p_;
    const Field& G_;
    const ModelSetup& s_;
    DirichletData bc_;
};

/// Hole continuity at finite delta with frozen psi, phi_n:
/// -div(mu_p e^{phip-psi} grad phip) - [G - r_delta (e^{phip-phin}-1)] = 0.
class PhipProblem : public solver::NewtonProblem {
public:
    PhipProblem(const Grid& g, const Field& psi, const Field& phi_n, const Field& G,
                const ModelSetup& s, const DirichletData& data)
        : grid_(g), psi_(psi), phi_n_(phi_n), G_(G), s_(s), bc_(data) {}

    void residual(const std::vector<double>& x, std::vector<double>& r) const override {
        const int n = grid_.cell_count();
        r.assign(n, 0.0);
        std::vector<double> a(n);
        for (int c = 0; c < n; ++c) a[c] = s_.mu_p * std::exp(x[c] - psi_[c]);
        solver::detail::flux_residual(grid_, a, x, bc_, r);
        const double vol = grid_.cell_volume();
        const double d2 = s_.delta * s_.delta;
        const auto& rec = s_.rec;
        for (int c = 0; c < n; ++c) {
            const double nn = std::exp(psi_[c] - phi_n_[c]);
            const double pp = d2 * (a[c] / s_.mu_p);
            const double den = rec.tau_p * (nn + s_.delta * rec.nT) +
                               rec.tau_n * (pp + s_.delta * rec.pT);
            const double rd = rec.Cd + rec.Cn * nn + rec.Cp * pp + 1.0 / den;
            r[c] -= vol * (G_[c] - rd * std::expm1(x[c] - phi_n_[c]));
        }
    }

    sparse::SparseMatrix jacobian(const std::vector<double>& x) const override {
        const int n = grid_.cell_count();
        std::vector<double> res(n, 0.0), a(n);
        for (int c = 0; c < n; ++c) a[c] = s_.mu_p * std::exp(x[c] - psi_[c]);
        std::vector<int> ri, ci;
        std::vector<double> vv;
        solver::detail::add_flux_terms(grid_, a, a, x, bc_, res, ri, ci, vv);
        const double vol = grid_.cell_volume();
        const double d2 = s_.delta * s_.delta;
        const auto& rec = s_.rec;
        for (int c = 0; c < n; ++c) {
            const double nn = std::exp(psi_[c] - phi_n_[c]);
            const double pp = d2 * (a[c] / s_.mu_p);
            const double den = rec.tau_p * (nn + s_.delta * rec.nT) +
                               rec.tau_n * (pp + s_.delta * rec.pT);
            const double rd = rec.Cd + rec.Cn * nn + rec.Cp * pp + 1.0 / den;
            const double drd_dp = rec.Cp - rec.tau_n / (den * den);
            const double em = std::expm1(x[c] - phi_n_[c]);
            // d/dphip of vol*(rd*em - G): dp/dphip = p
            ri.push_back(c);
            ci.push_back(c);
            vv.push_back(vol * (drd_dp * pp * em + rd * (em + 1.0)));
        }
        return sparse::SparseMatrix::from_triplets(n, std::move(ri), std::move(ci),
                                                   std::move(vv));
    }

private:
    const Grid& grid_;
    const Field& psi_;
    const Field& phi_n_;
    const Field& G_;
    const ModelSetup& s_;
    DirichletData bc_;
};

}  // namespace detail

namespace {

using detail::PhinProblem;
using detail::PhipProblem;
using detail::PsiProblem;
using detail::psi_data_with_bias;
using detail::quasi_fermi_data;

double inf_change(const std::vector<double>& a, const std::vector<double>& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

struct InnerState {
    Field psi, phi_n, phi_p;
    int sweeps = 0;
};

/// Gummel decoupling at fixed u_D: Poisson -> phi_n -> phi_p sweeps with
/// Newton per sub-problem.
InnerState solve_inner(const Grid& g, const Field& doping_field,
                       const physics::DopingProfile& doping, const Field& G,
                       const ModelSetup& s, const FullSettings& fs,
                       const DirichletData& psi_bc0, double uD, InnerState init) {
    const DirichletData psi_bc = psi_data_with_bias(g, psi_bc0, uD);
    const DirichletData qf_bc = quasi_fermi_data(s.phi0, uD);
    (void)doping;

    InnerState st = std::move(init);
    for (int sweep = 0; sweep < fs.max_gummel_sweeps; ++sweep) {
        const std::vector<double> psi_old = st.psi.values();
        const std::vector<double> phin_old = st.phi_n.values();
        const std::vector<double> phip_old = st.phi_p.values();

        solver::NewtonSettings ns = fs.newton;
        {
            PsiProblem p(g, doping_field, st.phi_n, st.phi_p, s, psi_bc);
            ns.label = "full_psi";
            std::vector<double> x = st.psi.values();
            try {
                solver::newton_solve(p, x, ns);
            } catch (const NumericalError& e) {
                throw StageError("full_psi", e.what());
            }
            st.psi = Field(g, std::move(x));
        }
        {
            PhinProblem p(g, st.psi, st.phi_p, G, s, qf_bc);
            ns.label = "full_phin";
            std::vector<double> x = st.phi_n.values();
            try {
                solver::newton_solve(p, x, ns);
            } catch (const NumericalError& e) {
                throw StageError("full_phin", e.what());
            }
            st.phi_n = Field(g, std::move(x));
        }
        {
            PhipProblem p(g, st.psi, st.phi_n, G, s, qf_bc);
            ns.label = "full_phip";
            std::vector<double> x = st.phi_p.values();
            try {
                solver::newton_solve(p, x, ns);
            } catch (const NumericalError& e) {
                throw StageError("full_phip", e.what());
            }
            st.phi_p = Field(g, std::move(x));
        }
        st.sweeps = sweep + 1;
        const double change = std::max({inf_change(psi_old, st.psi.values()),
                                        inf_change(phin_old, st.phi_n.values()),
                                        inf_change(phip_old, st.phi_p.values())});
        if (change <= fs.gummel_tol) return st;
    }
    throw StageError("gummel", "no convergence within max sweeps");
}

}  // namespace

double contact_current(const Grid& g, const Field& psi, const Field& phi_n,
                       const Field& phi_p, double uD, const ModelSetup& setup) {
    const int n = g.cell_count();
    Field a_n(g), a_p(g);
    for (int c = 0; c < n; ++c) {
        a_n[c] = setup.mu_n * std::exp(psi[c] - phi_n[c]);
        a_p[c] = setup.mu_p * std::exp(phi_p[c] - psi[c]);
    }
    EllipticProblem wp;
    wp.grid = &g;
    wp.coeff = a_n;
    wp.rhs = Field(g, 0.0);
    wp.dirichlet.d1 = 0.0;
    wp.dirichlet.d2 = 1.0;
    auto wsys = solver::assemble_diffusion(wp);
    auto factor = sparse::BandedLU::factor(wsys.A);
    Field w(g, factor.solve_copy(wsys.b));

    DirichletData wd;
    wd.d1 = 0.0;
    wd.d2 = 1.0;
    const DirichletData qf = quasi_fermi_data(setup.phi0, uD);
    const auto an_faces = solver::face_coefficients(g, a_n);
    const auto ap_faces = solver::face_coefficients(g, a_p);
    const double d2 = setup.delta * setup.delta;
    return -(solver::gradient_form(g, an_faces, phi_n, qf, w, wd) +
             d2 * solver::gradient_form(g, ap_faces, phi_p, qf, w, wd));
}

double contact_current_direct(const Grid& g, const Field& psi, const Field& phi_n,
                              const Field& phi_p, double uD, const ModelSetup& setup,
                              Tag tag) {
    const int n = g.cell_count();
    Field a_n(g), a_p(g);
    for (int c = 0; c < n; ++c) {
        a_n[c] = setup.mu_n * std::exp(psi[c] - phi_n[c]);
        a_p[c] = setup.mu_p * std::exp(phi_p[c] - psi[c]);
    }
    const DirichletData qf = quasi_fermi_data(setup.phi0, uD);
    const auto an_faces = solver::face_coefficients(g, a_n);
    const auto ap_faces = solver::face_coefficients(g, a_p);
    const double d2 = setup.delta * setup.delta;
    return solver::contact_flux(g, an_faces, phi_n, qf, tag) +
           d2 * solver::contact_flux(g, ap_faces, phi_p, qf, tag);
}

FullSolution solve_full(const Grid& g, const physics::DopingProfile& doping,
                        const physics::LaserSpec& laser, const ModelSetup& setup,
                        const FullSettings& settings) {
    setup.validate();
    if (!(setup.delta > 0)) throw InvalidInput("solve_full requires delta > 0");

    const Field doping_field = doping.evaluate(g);
    const Field G = physics::generation(g, laser);
    const DirichletData psi_bc0 = cascade::electroneutral_contact_data(g, doping, setup);

    // cascade initialization: excellent secant start and inner initial fields
    double hint = 0.0;
    InnerState init;
    if (settings.use_cascade_hint) {
        cascade::CascadeSettings cs;
        cs.newton = settings.newton;
        cascade::CascadeSolver casc(g, doping, setup, cs);
        auto asol = casc.solve(laser);
        hint = asol.uD;
        init.psi = asol.psi;
        init.phi_n = asol.phi_n;
        init.phi_p = asol.phi_p;
    } else {
        init.psi = Field(g);
        for (int c = 0; c < g.cell_count(); ++c)
            init.psi[c] = setup.phi0 + std::log(doping_field[c]);
        init.phi_n = Field(g, setup.phi0);
        init.phi_p = Field(g, setup.phi0);
    }

    FullSolution out;
    int sweeps_total = 0;

    auto eval = [&](double u, InnerState start) -> std::pair<double, InnerState> {
        InnerState st = solve_inner(g, doping_field, doping, G, setup, settings, psi_bc0, u,
                                    std::move(start));
        sweeps_total += st.sweeps;
        const double iD = contact_current(g, st.psi, st.phi_n, st.phi_p, u, setup);
        return {setup.R_hat * iD - u, std::move(st)};
    };

    double u = 0.0;
    auto [gval, state] = eval(u, init);
    out.outer_iterations = 1;

    if (setup.R_hat > 0 && std::abs(gval) > settings.coupling_tol) {
        double u_prev = u, g_prev = gval;
        u = (std::isfinite(hint) && std::abs(hint - u_prev) > 0) ? hint : gval;
        for (int it = 0; it < settings.max_outer_iters; ++it) {
            auto [g1, st1] = eval(u, state);
            state = std::move(st1);
            out.outer_iterations++;
            gval = g1;
            if (std::abs(gval) <= settings.coupling_tol) break;
            const double dg = gval - g_prev;
            if (dg == 0.0 || !std::isfinite(dg))
                throw StageError("coupling", "secant stagnation on u_D");
            const double u_next = u - gval * (u - u_prev) / dg;
            if (!std::isfinite(u_next))
                throw StageError("coupling", "secant produced non-finite u_D");
            u_prev = u;
            g_prev = gval;
            u = u_next;
        }
        if (std::abs(gval) > settings.coupling_tol)
            throw StageError("coupling", "no convergence of the outer u_D iteration");
    }

    out.psi = std::move(state.psi);
    out.phi_n = std::move(state.phi_n);
    out.phi_p = std::move(state.phi_p);
    out.uD = u;
    out.coupling_residual = std::abs(gval);
    out.gummel_sweeps = sweeps_total;
    out.iD = contact_current(g, out.psi, out.phi_n, out.phi_p, u, setup);
    out.iD_boundary =
        contact_current_direct(g, out.psi, out.phi_n, out.phi_p, u, setup, Tag::dirichlet2);
    const double iD1 =
        contact_current_direct(g, out.psi, out.phi_n, out.phi_p, u, setup, Tag::dirichlet1);
    out.iD_balance = iD1 + out.iD_boundary;
    return out;
}


std::unique_ptr<solver::NewtonProblem> make_psi_problem(const Grid& g,
                                                        const Field& doping_field,
                                                        const Field& phi_n,
                                                        const Field& phi_p,
                                                        const ModelSetup& setup,
                                                        const solver::DirichletData& data) {
    return std::make_unique<detail::PsiProblem>(g, doping_field, phi_n, phi_p, setup, data);
}

std::unique_ptr<solver::NewtonProblem> make_phin_problem(const Grid& g, const Field& psi,
                                                         const Field& phi_p, const Field& G,
                                                         const ModelSetup& setup,
                                                         const solver::DirichletData& data) {
    return std::make_unique<detail::PhinProblem>(g, psi, phi_p, G, setup, data);
}

std::unique_ptr<solver::NewtonProblem> make_phip_problem(const Grid& g, const Field& psi,
                                                         const Field& phi_n, const Field& G,
                                                         const ModelSetup& setup,
                                                         const solver::DirichletData& data) {
    return std::make_unique<detail::PhipProblem>(g, psi, phi_n, G, setup, data);
}

}  // namespace lps::full

