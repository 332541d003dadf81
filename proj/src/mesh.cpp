#include "lps/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

namespace lps::mesh {

Grid::Grid(int dim, int nx, int ny, double aspect, ContactLayout layout)
    : dim_(dim), nx_(nx), ny_(dim == 2 ? ny : 1), layout_(layout) {
    if (dim != 1 && dim != 2) throw InvalidInput("grid dimension must be 1 or 2");
    if (nx < 2 || (dim == 2 && ny < 2))
        throw InvalidInput("grid needs at least 2 cells per axis");
    if (dim == 2 && !(aspect > 0))
        throw InvalidInput("grid aspect must be positive");
    if (layout.axis < 0 || layout.axis >= dim)
        throw InvalidInput("contact axis outside grid dimension");

    y_minor_ = dim == 2 && ny_ < nx_;
    hx_ = 1.0 / nx_;
    ly_ = dim == 2 ? aspect : 0.0;
    hy_ = dim == 2 ? ly_ / ny_ : 1.0;

    auto side_tag = [&](int axis, bool max_side) {
        if (axis != layout_.axis) return Tag::neumann;
        return max_side ? Tag::dirichlet2 : Tag::dirichlet1;
    };

    // x-faces
    for (int j = 0; j < ny_; ++j) {
        for (int i = 0; i <= nx_; ++i) {
            Face f;
            f.axis = 0;
            f.area = dim_ == 2 ? hy_ : 1.0;
            f.center = {i * hx_, dim_ == 2 ? (j + 0.5) * hy_ : 0.0};
            if (i == 0) {
                f.left = cell_index(0, j);
                f.tag = side_tag(0, false);
                f.dist = 0.5 * hx_;
            } else if (i == nx_) {
                f.left = cell_index(nx_ - 1, j);
                f.tag = side_tag(0, true);
                f.dist = 0.5 * hx_;
            } else {
                f.left = cell_index(i - 1, j);
                f.right = cell_index(i, j);
                f.tag = Tag::interior;
                f.dist = hx_;
            }
            faces_.push_back(f);
        }
    }
    // y-faces
    if (dim_ == 2) {
        for (int j = 0; j <= ny_; ++j) {
            for (int i = 0; i < nx_; ++i) {
                Face f;
                f.axis = 1;
                f.area = hx_;
                f.center = {(i + 0.5) * hx_, j * hy_};
                if (j == 0) {
                    f.left = cell_index(i, 0);
                    f.tag = side_tag(1, false);
                    f.dist = 0.5 * hy_;
                } else if (j == ny_) {
                    f.left = cell_index(i, ny_ - 1);
                    f.tag = side_tag(1, true);
                    f.dist = 0.5 * hy_;
                } else {
                    f.left = cell_index(i, j - 1);
                    f.right = cell_index(i, j);
                    f.tag = Tag::interior;
                    f.dist = hy_;
                }
                faces_.push_back(f);
            }
        }
    }

    for (int k = 0; k < static_cast<int>(faces_.size()); ++k) {
        switch (faces_[k].tag) {
            case Tag::neumann: neumann_.push_back(k); break;
            case Tag::dirichlet1: dirichlet1_.push_back(k); break;
            case Tag::dirichlet2: dirichlet2_.push_back(k); break;
            default: break;
        }
    }
    if (dirichlet1_.empty() || dirichlet2_.empty())
        throw InvalidInput("contact layout leaves a contact empty");
}

const std::vector<int>& Grid::tagged_faces(Tag t) const {
    switch (t) {
        case Tag::neumann: return neumann_;
        case Tag::dirichlet1: return dirichlet1_;
        case Tag::dirichlet2: return dirichlet2_;
        default: throw InvalidInput("tagged_faces: interior is not a boundary tag");
    }
}

Grid build_grid(int dim, int nx, int ny, double aspect, ContactLayout layout) {
    return Grid(dim, nx, ny, aspect, layout);
}

Field::Field(const Grid& g, std::vector<double> values) : grid_(&g), v_(std::move(values)) {
    if (static_cast<int>(v_.size()) != g.cell_count())
        throw InvalidInput("field length does not match cell count");
}

double Field::min() const { return *std::min_element(v_.begin(), v_.end()); }
double Field::max() const { return *std::max_element(v_.begin(), v_.end()); }

bool Field::finite() const {
    for (double x : v_)
        if (!std::isfinite(x)) return false;
    return true;
}

double boundary_integral(const Grid& g, const std::vector<double>& face_values, Tag tag) {
    if (face_values.size() != g.faces().size())
        throw InvalidInput("boundary_integral: face value vector has wrong length");
    double sum = 0.0;
    for (int k : g.tagged_faces(tag)) sum += face_values[k] * g.faces()[k].area;
    return sum;
}

void dump_field(std::ostream& os, const Field& f) {
    const Grid& g = f.grid();
    os << g.dim() << ' ' << g.nx();
    if (g.dim() == 2) os << ' ' << g.ny();
    os << '\n';
    os << std::scientific << std::setprecision(16);
    for (int c = 0; c < g.cell_count(); ++c) {
        auto xy = g.cell_center(c);
        os << xy[0];
        if (g.dim() == 2) os << ' ' << xy[1];
        os << ' ' << f[c] << '\n';
    }
}

void dump_field_file(const std::string& path, const Field& f) {
    std::ofstream os(path);
    if (!os) throw InvalidInput("cannot open for writing: " + path);
    dump_field(os, f);
}

Field load_field(std::istream& is, const Grid& g) {
    std::string header;
    if (!std::getline(is, header)) throw InvalidInput("field dump: missing header");
    std::istringstream hs(header);
    int dim = 0, nx = 0, ny = 1;
    hs >> dim >> nx;
    if (dim == 2) hs >> ny;
    if (dim != g.dim() || nx != g.nx() || (dim == 2 && ny != g.ny()))
        throw InvalidInput("field dump: grid shape mismatch");
    Field f(g);
    for (int c = 0; c < g.cell_count(); ++c) {
        double x, y, v;
        if (g.dim() == 2) {
            if (!(is >> x >> y >> v)) throw InvalidInput("field dump: truncated data");
        } else {
            if (!(is >> x >> v)) throw InvalidInput("field dump: truncated data");
        }
        f[c] = v;
    }
    return f;
}

Field load_field_file(const std::string& path, const Grid& g) {
    std::ifstream is(path);
    if (!is) throw InvalidInput("cannot open: " + path);
    return load_field(is, g);
}

}  // namespace lps::mesh
