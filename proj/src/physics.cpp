#include "lps/physics.hpp"

#include <cmath>

namespace lps::physics {

namespace {
constexpr double kTwoPi = 6.283185307179586476925286766559;
constexpr double kSqrtTwoPi = 2.5066282746310005024157652848110;
}  // namespace

void RecombinationParams::validate() const {
    if (!(Cd >= 0 && Cn >= 0 && Cp >= 0))
        throw InvalidInput("recombination constants must be nonnegative");
    if (!(tau_n > 0 && tau_p > 0))
        throw InvalidInput("scaled lifetimes must be positive");
    if (!(nT >= 0 && pT >= 0))
        throw InvalidInput("scaled trap densities must be nonnegative");
}

double r0(double n, const RecombinationParams& rec) {
    if (!(n > 0)) throw InvalidInput("r0: carrier density must be positive");
    return rec.Cd + rec.Cn * n + 1.0 / (rec.tau_p * n);
}

double r_delta(double n, double p, double delta, const RecombinationParams& rec) {
    if (!(n > 0)) throw InvalidInput("r_delta: n must be positive");
    if (!(p >= 0)) throw InvalidInput("r_delta: p must be nonnegative");
    if (!(delta >= 0)) throw InvalidInput("r_delta: delta must be nonnegative");
    const double den = rec.tau_p * (n + delta * rec.nT) + rec.tau_n * (p + delta * rec.pT);
    if (!(den > 0)) throw NumericalError("r_delta: SRH denominator vanished");
    return rec.Cd + rec.Cn * n + rec.Cp * p + 1.0 / den;
}

DopingProfile DopingProfile::sinusoidal_normalized(double rel_amplitude, double period,
                                                   int axis) {
    Sinusoidal s;
    s.rel_amplitude = rel_amplitude;
    s.period = period;
    s.axis = axis;
    s.mean = 1.0 / (1.0 + rel_amplitude);  // sup over the period is mean*(1+a)
    return DopingProfile(s);
}

void DopingProfile::validate() const {
    if (auto* c = std::get_if<Constant>(&spec_)) {
        if (!(c->level > 0)) throw InvalidInput("doping level must be positive");
    } else if (auto* s = std::get_if<Sinusoidal>(&spec_)) {
        if (!(s->mean > 0)) throw InvalidInput("doping mean must be positive");
        if (!(s->rel_amplitude >= 0 && s->rel_amplitude < 1))
            throw InvalidInput("doping relative amplitude must lie in [0,1)");
        if (!(s->period > 0)) throw InvalidInput("doping period must be positive");
        if (s->axis != 0 && s->axis != 1) throw InvalidInput("doping axis must be 0 or 1");
    } else {
        const auto& t = std::get<Tabulated>(spec_);
        if (t.values.empty()) throw InvalidInput("tabulated doping is empty");
        for (double v : t.values)
            if (!(v > 0) || !std::isfinite(v))
                throw InvalidInput("tabulated doping must be positive and finite");
    }
}

double DopingProfile::operator()(double x, double y) const {
    if (auto* c = std::get_if<Constant>(&spec_)) return c->level;
    if (auto* s = std::get_if<Sinusoidal>(&spec_)) {
        const double coord = s->axis == 0 ? x : y;
        return s->mean * (1.0 + s->rel_amplitude * std::sin(kTwoPi * coord / s->period));
    }
    throw InvalidInput("tabulated doping has no pointwise evaluation");
}

mesh::Field DopingProfile::evaluate(const mesh::Grid& g) const {
    if (auto* t = std::get_if<Tabulated>(&spec_)) {
        if (static_cast<int>(t->values.size()) != g.cell_count())
            throw InvalidInput("tabulated doping length does not match grid");
        return mesh::Field(g, t->values);
    }
    mesh::Field f(g);
    for (int c = 0; c < g.cell_count(); ++c) {
        auto xy = g.cell_center(c);
        f[c] = (*this)(xy[0], xy[1]);
    }
    return f;
}

double DopingProfile::at_face(const mesh::Grid& g, const mesh::Face& f) const {
    if (auto* t = std::get_if<Tabulated>(&spec_)) return t->values[f.left];
    (void)g;
    return (*this)(f.center[0], f.center[1]);
}

void LaserSpec::validate() const {
    if (!(kappa >= 0)) throw InvalidInput("laser amplitude must be nonnegative");
    if (!(sigma > 0)) throw InvalidInput("laser spot radius must be positive");
    if (!(dA > 0)) throw InvalidInput("laser penetration depth must be positive");
}

mesh::Field generation(const mesh::Grid& g, const LaserSpec& laser) {
    laser.validate();
    mesh::Field G(g);
    if (laser.kappa == 0.0) return G;
    const double inv_gauss_norm = 1.0 / (kSqrtTwoPi * laser.sigma);
    for (int c = 0; c < g.cell_count(); ++c) {
        auto xy = g.cell_center(c);
        const double xi = (xy[0] - laser.x0) / laser.sigma;
        double s = inv_gauss_norm * std::exp(-0.5 * xi * xi);
        if (g.dim() == 2) s *= std::exp(-xy[1] / laser.dA) / laser.dA;
        G[c] = laser.kappa * s;
    }
    return G;
}

double checked_exp(double x) {
    if (!(std::abs(x) <= 700.0))
        throw NumericalError("exp overflow: |exponent| > 700");
    return std::exp(x);
}

std::pair<mesh::Field, mesh::Field> carrier_densities(const mesh::Field& psi,
                                                      const mesh::Field& phi_n,
                                                      const mesh::Field& phi_p,
                                                      double delta) {
    const mesh::Grid& g = psi.grid();
    if (&phi_n.grid() != &g || &phi_p.grid() != &g)
        throw InvalidInput("carrier_densities: fields live on different grids");
    mesh::Field n(g), p(g);
    const double d2 = delta * delta;
    for (int c = 0; c < g.cell_count(); ++c) {
        n[c] = checked_exp(psi[c] - phi_n[c]);
        p[c] = d2 * checked_exp(phi_p[c] - psi[c]);
    }
    return {std::move(n), std::move(p)};
}

}  // namespace lps::physics
