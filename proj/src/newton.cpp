#include "lps/newton.hpp"

#include <cmath>
#include <limits>
#include <ostream>
#include <sstream>

#include "lps/error.hpp"

namespace lps::solver {

namespace {

double norm2(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x * x;
    return std::sqrt(s);
}

double norm_inf(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s = std::max(s, std::abs(x));
    return s;
}

}  // namespace

void NewtonSettings::validate() const {
    if (!(abs_tol > 0)) throw InvalidInput("newton: abs_tol must be positive");
    if (!(rel_tol >= 0) || !(step_tol >= 0)) throw InvalidInput("newton: negative tolerance");
    if (max_iters < 1) throw InvalidInput("newton: max_iters must be >= 1");
    if (!(min_damping > 0 && min_damping <= 1)) throw InvalidInput("newton: bad min_damping");
}

NewtonReport newton_solve_noexcept(const NewtonProblem& problem, std::vector<double>& x,
                                   const NewtonSettings& s) {
    s.validate();
    NewtonReport rep;
    std::vector<double> r, step, trial, r_trial;

    problem.residual(x, r);
    double rnorm = norm2(r);
    if (!std::isfinite(rnorm)) {
        rep.failure = "non-finite residual at initial guess";
        return rep;
    }
    rep.residual_history.push_back(rnorm);
    const double target = std::max(s.abs_tol, s.rel_tol * rnorm);

    for (int it = 0; it < s.max_iters; ++it) {
        if (rnorm <= target) {
            rep.converged = true;
            break;
        }
        sparse::BandedLU lu;
        try {
            lu = sparse::BandedLU::factor(problem.jacobian(x));
        } catch (const NumericalError& e) {
            rep.failure = std::string("singular Jacobian: ") + e.what();
            break;
        }
        step = r;
        lu.solve(step);

        double t = 1.0;
        bool accepted = false;
        double trial_norm = 0.0;
        while (t >= s.min_damping) {
            trial.assign(x.begin(), x.end());
            for (std::size_t i = 0; i < x.size(); ++i) trial[i] -= t * step[i];
            problem.residual(trial, r_trial);
            trial_norm = norm2(r_trial);
            if (std::isfinite(trial_norm) && trial_norm < rnorm * (1.0 - 1e-4 * t)) {
                accepted = true;
                break;
            }
            t *= 0.5;
        }
        if (!accepted) {
            if (rnorm <= s.stall_accept_factor * target) {
                rep.converged = true;
                if (s.log)
                    (*s.log) << "solver=" << s.label
                             << " note=stalled_at_floor residual=" << rnorm << "\n";
                break;
            }
            rep.failure = "line search stalled below minimum damping";
            break;
        }
        const double prev = rnorm;
        x.swap(trial);
        r.swap(r_trial);
        rnorm = trial_norm;
        rep.iterations = it + 1;
        rep.residual_history.push_back(rnorm);
        if (s.log)
            (*s.log) << "solver=" << s.label << " iter=" << rep.iterations << " damping=" << t
                     << " residual=" << rnorm << "\n";
        if (s.step_tol > 0 && t * norm_inf(step) <= s.step_tol && rnorm <= 10 * target) {
            rep.converged = true;
            break;
        }
        // progress collapse within the stall window marks the same
        // roundoff floor as a failed line search
        if (rnorm <= s.stall_accept_factor * target && prev - rnorm < 0.01 * prev) {
            rep.converged = true;
            if (s.log)
                (*s.log) << "solver=" << s.label
                         << " note=progress_floor residual=" << rnorm << "\n";
            break;
        }
    }
    if (!rep.converged && rep.failure.empty() && rnorm <= target) rep.converged = true;
    if (!rep.converged && rep.failure.empty())
        rep.failure = "no convergence within max_iters";
    rep.final_residual = rnorm;
    return rep;
}

NewtonReport newton_solve(const NewtonProblem& problem, std::vector<double>& x,
                          const NewtonSettings& s) {
    NewtonReport rep = newton_solve_noexcept(problem, x, s);
    if (!rep.converged) {
        std::ostringstream msg;
        msg << s.label << " failed: " << rep.failure << " (iterations=" << rep.iterations
            << ", residual=" << rep.final_residual << ", history=";
        for (std::size_t i = 0; i < rep.residual_history.size(); ++i)
            msg << (i ? "," : "") << rep.residual_history[i];
        msg << ")";
        throw NumericalError(msg.str());
    }
    return rep;
}

}  // namespace lps::solver
