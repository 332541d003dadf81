#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "lps/elliptic.hpp"
#include "lps/mesh.hpp"

using namespace lps;
using mesh::Grid;
using mesh::Tag;

TEST_CASE("1d grid tagging") {
    Grid g = mesh::build_grid(1, 10);
    CHECK(g.cell_count() == 10);
    CHECK(g.tagged_faces(Tag::dirichlet1).size() == 1);
    CHECK(g.tagged_faces(Tag::dirichlet2).size() == 1);
    CHECK(g.tagged_faces(Tag::neumann).empty());
    const auto& left = g.faces()[g.tagged_faces(Tag::dirichlet1)[0]];
    const auto& right = g.faces()[g.tagged_faces(Tag::dirichlet2)[0]];
    CHECK(left.center[0] == doctest::Approx(0.0));
    CHECK(right.center[0] == doctest::Approx(1.0));
}

TEST_CASE("2d grid tagging and counts") {
    Grid g = mesh::build_grid(2, 4, 4, 1.0);
    CHECK(g.tagged_faces(Tag::dirichlet1).size() == 4);
    CHECK(g.tagged_faces(Tag::dirichlet2).size() == 4);
    CHECK(g.tagged_faces(Tag::neumann).size() == 8);
    int interior = 0;
    for (const auto& f : g.faces())
        if (f.right >= 0) ++interior;
    CHECK(interior == 3 * 4 + 4 * 3);
}

TEST_CASE("cell volumes sum to the domain volume") {
    Grid g = mesh::build_grid(2, 100, 40, 0.4);
    double total = 0.0;
    for (int c = 0; c < g.cell_count(); ++c) total += g.cell_volume();
    CHECK(total == doctest::Approx(g.domain_volume()).epsilon(1e-12));
}

TEST_CASE("grid construction rejects bad input") {
    CHECK_THROWS_AS(mesh::build_grid(1, 1), InvalidInput);
    CHECK_THROWS_AS(mesh::build_grid(3, 4), InvalidInput);
    CHECK_THROWS_AS(mesh::build_grid(2, 4, 1), InvalidInput);
    CHECK_THROWS_AS(mesh::build_grid(2, 4, 4, -1.0), InvalidInput);
    CHECK_THROWS_AS(mesh::build_grid(1, 8, 1, 1.0, mesh::ContactLayout{1}), InvalidInput);
}

TEST_CASE("2d grid with contacts on the y axis") {
    Grid g = mesh::build_grid(2, 4, 6, 1.0, mesh::ContactLayout{1});
    CHECK(g.tagged_faces(Tag::dirichlet1).size() == 4);
    CHECK(g.tagged_faces(Tag::dirichlet2).size() == 4);
    CHECK(g.tagged_faces(Tag::neumann).size() == 12);
}

TEST_CASE("boundary integrals") {
    Grid g1 = mesh::build_grid(1, 16);
    std::vector<double> ones(g1.faces().size(), 1.0);
    CHECK(mesh::boundary_integral(g1, ones, Tag::dirichlet2) == doctest::Approx(1.0));
    std::vector<double> zeros(g1.faces().size(), 0.0);
    CHECK(mesh::boundary_integral(g1, zeros, Tag::dirichlet2) == 0.0);

    // f = y on the x-max contact: midpoint sums integrate linears exactly
    const double Ly = 0.75;
    Grid g2 = mesh::build_grid(2, 8, 12, Ly);
    std::vector<double> fy(g2.faces().size(), 0.0);
    for (int k : g2.tagged_faces(Tag::dirichlet2)) fy[k] = g2.faces()[k].center[1];
    CHECK(mesh::boundary_integral(g2, fy, Tag::dirichlet2) ==
          doctest::Approx(0.5 * Ly * Ly).epsilon(1e-13));

    CHECK_THROWS_AS(mesh::boundary_integral(g1, std::vector<double>(3, 0.0), Tag::neumann),
                    InvalidInput);
}

TEST_CASE("discrete divergence theorem") {
    // interior flux differences telescope, so the row sums of the assembled
    // operator against any field equal the total boundary flux
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> uni(0.2, 3.0);
    Grid g = mesh::build_grid(2, 12, 9, 0.8);
    solver::EllipticProblem p;
    p.grid = &g;
    p.coeff = mesh::Field(g);
    p.rhs = mesh::Field(g, 0.0);
    mesh::Field u(g);
    for (int c = 0; c < g.cell_count(); ++c) {
        p.coeff[c] = uni(rng);
        u[c] = uni(rng);
    }
    p.dirichlet.d1 = uni(rng);
    p.dirichlet.d2 = uni(rng);

    const auto sys = solver::assemble_diffusion(p);
    const auto Au = sys.A.multiply(u.values());
    double interior_sum = 0.0;
    for (int c = 0; c < g.cell_count(); ++c) interior_sum += Au[c] - sys.b[c];

    const auto fc = solver::face_coefficients(g, p.coeff);
    const double boundary = solver::contact_flux(g, fc, u, p.dirichlet, Tag::dirichlet1) +
                            solver::contact_flux(g, fc, u, p.dirichlet, Tag::dirichlet2);
    CHECK(interior_sum == doctest::Approx(boundary).epsilon(1e-12));
}

TEST_CASE("field dump round trip") {
    Grid g = mesh::build_grid(2, 5, 3, 0.6);
    mesh::Field f(g);
    for (int c = 0; c < g.cell_count(); ++c) f[c] = std::sin(100.0 * c) * 1e-7;
    std::stringstream ss;
    mesh::dump_field(ss, f);
    const mesh::Field f2 = mesh::load_field(ss, g);
    for (int c = 0; c < g.cell_count(); ++c) CHECK(f2[c] == f[c]);

    Grid other = mesh::build_grid(1, 5);
    std::stringstream ss2;
    mesh::dump_field(ss2, f);
    CHECK_THROWS_AS(mesh::load_field(ss2, other), InvalidInput);
}

TEST_CASE("field length must match the grid") {
    Grid g = mesh::build_grid(1, 8);
    CHECK_THROWS_AS(mesh::Field(g, std::vector<double>(5, 1.0)), InvalidInput);
}
