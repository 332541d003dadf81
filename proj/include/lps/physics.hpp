#pragma once

#include <utility>
#include <variant>
#include <vector>

#include "lps/mesh.hpp"

namespace lps::physics {

/// Scaled (hatted) recombination constants of the nondimensional model.
struct RecombinationParams {
    double Cd = 0.0;     ///< direct, tau*Cbar*C_d
    double Cn = 0.0;     ///< Auger electrons, tau*Cbar^2*C_n
    double Cp = 0.0;     ///< Auger holes, tau*Cbar^2*C_p
    double tau_n = 1.0;  ///< SRH electron lifetime / tau
    double tau_p = 1.0;  ///< SRH hole lifetime / tau
    double nT = 1.0;     ///< trap density / n_i
    double pT = 1.0;     ///< trap density / n_i

    void validate() const;
};

/// r0(n) = Cd + Cn*n + 1/(tau_p*n), the delta->0 limit of the rate
/// coefficient. Signals nonpositive n.
double r0(double n, const RecombinationParams& rec);

/// Finite-delta rate coefficient
/// r_delta = Cd + Cn*n + Cp*p + 1/(tau_p*(n + delta*nT) + tau_n*(p + delta*pT)).
/// Signals a vanishing denominator.
double r_delta(double n, double p, double delta, const RecombinationParams& rec);

/// Doping profile on the scaled domain; C(x) > 0 everywhere (n-doped).
class DopingProfile {
public:
    struct Constant {
        double level = 1.0;
    };
    struct Sinusoidal {
        double mean = 1.0;
        double rel_amplitude = 0.2;
        double period = 0.1;  ///< scaled length
        int axis = 0;
    };
    struct Tabulated {
        std::vector<double> values;  ///< one per cell
    };

    DopingProfile() : spec_(Constant{}) {}
    DopingProfile(Constant c) : spec_(c) { validate(); }
    DopingProfile(Sinusoidal s) : spec_(s) { validate(); }
    DopingProfile(Tabulated t) : spec_(std::move(t)) { validate(); }

    /// Sinusoidal profile rescaled so that sup C = 1 (Cbar = sup C).
    static DopingProfile sinusoidal_normalized(double rel_amplitude, double period,
                                               int axis = 0);

    /// Pointwise evaluation (tabulated profiles require the grid).
    double operator()(double x, double y = 0.0) const;
    mesh::Field evaluate(const mesh::Grid& g) const;
    /// Value at a boundary face center (tabulated: adjacent cell value).
    double at_face(const mesh::Grid& g, const mesh::Face& f) const;

    bool tabulated() const { return std::holds_alternative<Tabulated>(spec_); }

private:
    void validate() const;
    std::variant<Constant, Sinusoidal, Tabulated> spec_;
};

/// Laser beam in scaled units. kappa = 0 encodes the dark case.
struct LaserSpec {
    double kappa = 0.0;   ///< scaled photon rate (amplitude of G)
    double sigma = 0.05;  ///< scaled spot radius
    double dA = 0.1;      ///< scaled penetration depth
    double x0 = 0.5;      ///< beam position along the contact axis

    void validate() const;
};

/// Scaled generation rate G = kappa * S(x - x0) evaluated at cell centers.
/// The shape S is the dimension-specific specialization of the laser
/// profile: in 1D the x-Gaussian with unit line integral, in 2D the
/// x-Gaussian times the y-exponential decay with unit area integral over
/// the half-plane y >= 0 (illumination from the y = 0 side).
mesh::Field generation(const mesh::Grid& g, const LaserSpec& laser);

/// n = exp(psi - phi_n), p = delta^2 exp(phi_p - psi), cellwise.
/// Signals overflow when any exponent magnitude exceeds 700.
std::pair<mesh::Field, mesh::Field> carrier_densities(const mesh::Field& psi,
                                                      const mesh::Field& phi_n,
                                                      const mesh::Field& phi_p,
                                                      double delta);

/// exp with the overflow guard used by carrier_densities.
double checked_exp(double x);

}  // namespace lps::physics
