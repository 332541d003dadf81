#pragma once

#include <array>
#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

#include "lps/error.hpp"

namespace lps::mesh {

/// Boundary classification. Interior faces connect two cells; the contact
/// faces carry the Dirichlet data of the two ohmic contacts, everything
/// else on the boundary is homogeneous Neumann.
enum class Tag { interior, neumann, dirichlet1, dirichlet2 };

struct Face {
    int left = -1;    ///< adjacent cell (always valid)
    int right = -1;   ///< second cell, -1 on boundary faces
    double area = 0;  ///< face measure (1 in 1D, edge length in 2D)
    double dist = 0;  ///< center-to-center (interior) or center-to-face (boundary)
    Tag tag = Tag::interior;
    int axis = 0;                          ///< 0 = x, 1 = y
    std::array<double, 2> center{0, 0};    ///< face midpoint
};

/// Which axis carries the two ohmic contacts; the opposite pair of
/// boundary faces becomes Gamma_D1 (min side) / Gamma_D2 (max side).
struct ContactLayout {
    int axis = 0;
};

/// Tensor-product finite-volume grid on the scaled domain. The x-extent is
/// 1 (the domain diameter after scaling); in 2D the y-extent is `aspect`.
/// Cells are numbered with the shorter axis innermost, which keeps the
/// assembled operators at the minimal bandwidth for elongated crystals.
class Grid {
public:
    Grid(int dim, int nx, int ny, double aspect, ContactLayout layout);

    int dim() const { return dim_; }
    int nx() const { return nx_; }
    int ny() const { return ny_; }
    double hx() const { return hx_; }
    double hy() const { return hy_; }
    double length_x() const { return 1.0; }
    double length_y() const { return ly_; }
    int cell_count() const { return nx_ * ny_; }
    double cell_volume() const { return dim_ == 1 ? hx_ : hx_ * hy_; }
    double domain_volume() const { return dim_ == 1 ? 1.0 : ly_; }
    int contact_axis() const { return layout_.axis; }

    int cell_index(int i, int j) const {
        return y_minor_ ? j + ny_ * i : i + nx_ * j;
    }
    std::array<double, 2> cell_center(int c) const {
        const int i = y_minor_ ? c / ny_ : c % nx_;
        const int j = y_minor_ ? c % ny_ : c / nx_;
        return {(i + 0.5) * hx_, dim_ == 2 ? (j + 0.5) * hy_ : 0.0};
    }

    const std::vector<Face>& faces() const { return faces_; }
    /// Indices into faces() for each boundary tag.
    const std::vector<int>& tagged_faces(Tag t) const;

private:
    int dim_, nx_, ny_;
    bool y_minor_ = false;
    double hx_, hy_, ly_;
    ContactLayout layout_;
    std::vector<Face> faces_;
    std::vector<int> neumann_, dirichlet1_, dirichlet2_;
};

/// Builds a grid and validates the contact layout (both contacts must be
/// non-empty; at least 2 cells per axis).
Grid build_grid(int dim, int nx, int ny = 1, double aspect = 1.0,
                ContactLayout layout = {});

/// Cell-centered scalar field.
class Field {
public:
    Field() = default;
    Field(const Grid& g, double init = 0.0) : grid_(&g), v_(g.cell_count(), init) {}
    Field(const Grid& g, std::vector<double> values);

    const Grid& grid() const { return *grid_; }
    int size() const { return static_cast<int>(v_.size()); }
    double& operator[](int i) { return v_[i]; }
    double operator[](int i) const { return v_[i]; }
    std::vector<double>& values() { return v_; }
    const std::vector<double>& values() const { return v_; }

    double min() const;
    double max() const;
    bool finite() const;

private:
    const Grid* grid_ = nullptr;
    std::vector<double> v_;
};

/// Sum of value*area over the faces carrying `tag`. `face_values` is indexed
/// like grid.faces(); entries on other faces are ignored.
double boundary_integral(const Grid& g, const std::vector<double>& face_values, Tag tag);

/// Plain-text field dump: header "dim nx [ny]", then one "x [y] value" row
/// per cell, 17 significant digits.
void dump_field(std::ostream& os, const Field& f);
void dump_field_file(const std::string& path, const Field& f);
/// Reads values from the dump format; the grid shape must match `g`.
Field load_field(std::istream& is, const Grid& g);
Field load_field_file(const std::string& path, const Grid& g);

}  // namespace lps::mesh
