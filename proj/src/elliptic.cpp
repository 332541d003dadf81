#include "lps/elliptic.hpp"

#include <cmath>

namespace lps::solver {

using mesh::Face;
using mesh::Grid;
using mesh::Tag;

double face_coefficient(double a_left, double a_right) {
    if (!(a_left > 0) || !(a_right > 0))
        throw InvalidInput("face_coefficient: coefficients must be positive");
    const double la = std::log(a_left), lb = std::log(a_right);
    if (std::abs(la - lb) < 1e-12) return a_left;
    return (a_left - a_right) / (la - lb);
}

double DirichletData::value(const Grid& g, int face_index) const {
    if (!per_face.empty()) return per_face[face_index];
    return g.faces()[face_index].tag == Tag::dirichlet1 ? d1 : d2;
}

std::vector<double> face_coefficients(const Grid& g, const mesh::Field& a) {
    std::vector<double> fc(g.faces().size(), 0.0);
    for (std::size_t k = 0; k < g.faces().size(); ++k) {
        const Face& f = g.faces()[k];
        if (f.right >= 0) {
            fc[k] = face_coefficient(a[f.left], a[f.right]);
        } else {
            if (!(a[f.left] > 0))
                throw InvalidInput("face_coefficients: nonpositive cell coefficient");
            fc[k] = a[f.left];
        }
    }
    return fc;
}

AssembledSystem assemble_diffusion(const EllipticProblem& p) {
    const Grid& g = *p.grid;
    const int n = g.cell_count();
    const double vol = g.cell_volume();
    const auto fc = face_coefficients(g, p.coeff);

    std::vector<int> ri, ci;
    std::vector<double> vv;
    ri.reserve(5 * n);
    ci.reserve(5 * n);
    vv.reserve(5 * n);
    std::vector<double> b(n, 0.0);

    for (std::size_t k = 0; k < g.faces().size(); ++k) {
        const Face& f = g.faces()[k];
        const double T = fc[k] * f.area / f.dist;
        if (f.right >= 0) {
            ri.push_back(f.left);  ci.push_back(f.left);  vv.push_back(T);
            ri.push_back(f.left);  ci.push_back(f.right); vv.push_back(-T);
            ri.push_back(f.right); ci.push_back(f.right); vv.push_back(T);
            ri.push_back(f.right); ci.push_back(f.left);  vv.push_back(-T);
        } else if (f.tag == Tag::dirichlet1 || f.tag == Tag::dirichlet2) {
            ri.push_back(f.left);
            ci.push_back(f.left);
            vv.push_back(T);
            b[f.left] += T * p.dirichlet.value(g, static_cast<int>(k));
        }
    }
    for (int c = 0; c < n; ++c) b[c] += p.rhs[c] * vol;

    return {sparse::SparseMatrix::from_triplets(n, std::move(ri), std::move(ci), std::move(vv)),
            std::move(b)};
}

double gradient_form(const Grid& g, const std::vector<double>& face_coeff,
                     const mesh::Field& u, const DirichletData& ud,
                     const mesh::Field& v, const DirichletData& vd) {
    double s = 0.0;
    for (std::size_t k = 0; k < g.faces().size(); ++k) {
        const Face& f = g.faces()[k];
        double du, dv;
        if (f.right >= 0) {
            du = u[f.left] - u[f.right];
            dv = v[f.left] - v[f.right];
        } else if (f.tag == Tag::dirichlet1 || f.tag == Tag::dirichlet2) {
            du = u[f.left] - ud.value(g, static_cast<int>(k));
            dv = v[f.left] - vd.value(g, static_cast<int>(k));
        } else {
            continue;
        }
        s += face_coeff[k] * du * dv * f.area / f.dist;
    }
    return s;
}

double contact_flux(const Grid& g, const std::vector<double>& face_coeff,
                    const mesh::Field& u, const DirichletData& ud, Tag tag) {
    double s = 0.0;
    for (int k : g.tagged_faces(tag)) {
        const Face& f = g.faces()[k];
        s += face_coeff[k] * f.area * (u[f.left] - ud.value(g, k)) / f.dist;
    }
    return s;
}

std::vector<double> contact_flux_values(const Grid& g, const std::vector<double>& face_coeff,
                                        const mesh::Field& u, const DirichletData& ud,
                                        Tag tag) {
    std::vector<double> out(g.faces().size(), 0.0);
    for (int k : g.tagged_faces(tag)) {
        const Face& f = g.faces()[k];
        out[k] = face_coeff[k] * (u[f.left] - ud.value(g, k)) / f.dist;
    }
    return out;
}

double h1_norm(const Grid& g, const mesh::Field& u, const DirichletData& ud) {
    double l2 = 0.0;
    const double vol = g.cell_volume();
    for (int c = 0; c < g.cell_count(); ++c) l2 += vol * u[c] * u[c];
    std::vector<double> ones(g.faces().size(), 1.0);
    const double grad = gradient_form(g, ones, u, ud, u, ud);
    return std::sqrt(l2 + grad);
}

}  // namespace lps::solver
