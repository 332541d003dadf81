#pragma once

#include <cmath>
#include <vector>

#include "lps/elliptic.hpp"
#include "lps/mesh.hpp"

// Shared assembly pieces for Newton solves whose diffusion coefficient
// depends on the unknown through a per-cell exponential. Internal to the
// solver sources.

namespace lps::solver::detail {

/// Log-mean together with its partial derivatives; returns the symmetric
/// limit slope 1/2 at (numerically) equal arguments.
inline void logmean_with_derivs(double x, double y, double& lm, double& dx, double& dy) {
    const double lx = std::log(x), ly = std::log(y);
    const double L = lx - ly;
    if (std::abs(L) < 1e-12) {
        lm = x;
        dx = dy = 0.5;
        return;
    }
    lm = (x - y) / L;
    dx = (1.0 - lm / x) / L;
    dy = (lm / y - 1.0) / L;
}

/// Adds the flux part of the residual of -div(a(u) grad u) and its exact
/// Jacobian triplets. `a` holds the cell coefficient values at the current
/// iterate and `dadu` their derivatives with respect to the local unknown.
/// Boundary Dirichlet faces use the adjacent cell coefficient.
inline void add_flux_terms(const mesh::Grid& g, const std::vector<double>& a,
                           const std::vector<double>& dadu, const std::vector<double>& u,
                           const DirichletData& bc, std::vector<double>& res,
                           std::vector<int>& ri, std::vector<int>& ci,
                           std::vector<double>& vv) {
    for (std::size_t k = 0; k < g.faces().size(); ++k) {
        const mesh::Face& f = g.faces()[k];
        const double geom = f.area / f.dist;
        if (f.right >= 0) {
            const int L = f.left, R = f.right;
            double lm, dL, dR;
            logmean_with_derivs(a[L], a[R], lm, dL, dR);
            const double du = u[L] - u[R];
            const double flux = geom * lm * du;
            res[L] += flux;
            res[R] -= flux;
            const double dflux_dL = geom * (dL * dadu[L] * du + lm);
            const double dflux_dR = geom * (dR * dadu[R] * du - lm);
            ri.push_back(L); ci.push_back(L); vv.push_back(dflux_dL);
            ri.push_back(L); ci.push_back(R); vv.push_back(dflux_dR);
            ri.push_back(R); ci.push_back(L); vv.push_back(-dflux_dL);
            ri.push_back(R); ci.push_back(R); vv.push_back(-dflux_dR);
        } else if (f.tag == mesh::Tag::dirichlet1 || f.tag == mesh::Tag::dirichlet2) {
            const int L = f.left;
            const double du = u[L] - bc.value(g, static_cast<int>(k));
            res[L] += geom * a[L] * du;
            ri.push_back(L);
            ci.push_back(L);
            vv.push_back(geom * (dadu[L] * du + a[L]));
        }
    }
}

/// Non-throwing log-mean for trial iterates; degenerate coefficients
/// propagate zeros or NaNs into the residual, which the damped line
/// search then rejects.
inline double trial_logmean(double x, double y) {
    const double L = std::log(x) - std::log(y);
    if (std::abs(L) < 1e-12) return x;
    return (x - y) / L;
}

/// Residual-only variant for line-search evaluations.
inline void flux_residual(const mesh::Grid& g, const std::vector<double>& a,
                          const std::vector<double>& u, const DirichletData& bc,
                          std::vector<double>& res) {
    for (std::size_t k = 0; k < g.faces().size(); ++k) {
        const mesh::Face& f = g.faces()[k];
        const double geom = f.area / f.dist;
        if (f.right >= 0) {
            const double lm = trial_logmean(a[f.left], a[f.right]);
            const double flux = geom * lm * (u[f.left] - u[f.right]);
            res[f.left] += flux;
            res[f.right] -= flux;
        } else if (f.tag == mesh::Tag::dirichlet1 || f.tag == mesh::Tag::dirichlet2) {
            res[f.left] +=
                geom * a[f.left] * (u[f.left] - bc.value(g, static_cast<int>(k)));
        }
    }
}

}  // namespace lps::solver::detail
