#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "lps/sparse.hpp"

namespace lps::solver {

struct NewtonSettings {
    double abs_tol = 1e-10;   ///< residual 2-norm target (scaled units)
    double rel_tol = 0.0;     ///< optional reduction relative to the initial residual
    double step_tol = 0.0;    ///< optional inf-norm step criterion
    int max_iters = 50;
    double min_damping = 9.5367431640625e-7;  ///< 2^-20
    /// A stalled line search within this factor of the target counts as
    /// converged; it marks the roundoff floor of the residual evaluation.
    double stall_accept_factor = 10.0;
    std::ostream* log = nullptr;              ///< structured key=value diagnostics
    std::string label = "newton";

    void validate() const;
};

struct NewtonReport {
    bool converged = false;
    int iterations = 0;
    double final_residual = 0.0;
    std::vector<double> residual_history;  ///< norm per iterate, starting at the guess
    std::string failure;
};

/// Residual/Jacobian callback pair for newton_solve.
class NewtonProblem {
public:
    virtual ~NewtonProblem() = default;
    virtual void residual(const std::vector<double>& x, std::vector<double>& r) const = 0;
    virtual sparse::SparseMatrix jacobian(const std::vector<double>& x) const = 0;
};

/// Damped Newton iteration: full step, halving line search on the residual
/// 2-norm down to min_damping. Returns a diagnostic report; throws
/// NumericalError on non-convergence or a singular Jacobian (the report is
/// embedded in the exception text).
NewtonReport newton_solve(const NewtonProblem& problem, std::vector<double>& x,
                          const NewtonSettings& settings);

/// Same, but reports failure through the return value instead of throwing.
NewtonReport newton_solve_noexcept(const NewtonProblem& problem, std::vector<double>& x,
                                   const NewtonSettings& settings);

}  // namespace lps::solver
