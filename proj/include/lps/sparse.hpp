#pragma once

#include <span>
#include <vector>

#include "lps/error.hpp"

namespace lps::sparse {

/// Compressed-sparse-row matrix, rows sorted by column.
class SparseMatrix {
public:
    SparseMatrix() = default;
    /// Builds from unsorted triplets; duplicate entries are summed.
    static SparseMatrix from_triplets(int n, std::vector<int> rows, std::vector<int> cols,
                                      std::vector<double> vals);

    int size() const { return n_; }
    const std::vector<int>& row_ptr() const { return row_ptr_; }
    const std::vector<int>& col() const { return col_; }
    const std::vector<double>& val() const { return val_; }

    std::vector<double> multiply(std::span<const double> x) const;
    double entry(int i, int j) const;
    /// max_ij |A_ij - A_ji|, for symmetry checks.
    double symmetry_defect() const;
    /// Lower/upper bandwidth.
    int lower_bandwidth() const;
    int upper_bandwidth() const;

private:
    int n_ = 0;
    std::vector<int> row_ptr_{0};
    std::vector<int> col_;
    std::vector<double> val_;
};

/// Direct factorization for banded systems (LU with partial pivoting in
/// LAPACK band storage). Structured tensor-product grids give small
/// bandwidths, so this covers every linear solve at desk scale.
class BandedLU {
public:
    static BandedLU factor(const SparseMatrix& A);

    /// Solves A x = b in place; reusable and safe to share across threads.
    void solve(std::span<double> b) const;
    std::vector<double> solve_copy(std::span<const double> b) const;

    int size() const { return n_; }

private:
    int n_ = 0, kl_ = 0, ku_ = 0, ldab_ = 0;
    std::vector<double> ab_;
    std::vector<int> piv_;
};

}  // namespace lps::sparse
