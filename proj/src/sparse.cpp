#include "lps/sparse.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace lps::sparse {

SparseMatrix SparseMatrix::from_triplets(int n, std::vector<int> rows, std::vector<int> cols,
                                         std::vector<double> vals) {
    if (rows.size() != cols.size() || rows.size() != vals.size())
        throw InvalidInput("triplet arrays differ in length");
    const std::size_t nnz_in = rows.size();
    for (std::size_t k = 0; k < nnz_in; ++k)
        if (rows[k] < 0 || rows[k] >= n || cols[k] < 0 || cols[k] >= n)
            throw InvalidInput("triplet index out of range");

    std::vector<std::size_t> order(nnz_in);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (rows[a] != rows[b]) return rows[a] < rows[b];
        return cols[a] < cols[b];
    });

    SparseMatrix m;
    m.n_ = n;
    m.row_ptr_.assign(n + 1, 0);
    int prev_row = -1, prev_col = -1;
    for (std::size_t idx = 0; idx < nnz_in; ++idx) {
        const std::size_t k = order[idx];
        if (rows[k] == prev_row && cols[k] == prev_col) {
            m.val_.back() += vals[k];
            continue;
        }
        for (int r = prev_row + 1; r <= rows[k]; ++r)
            m.row_ptr_[r] = static_cast<int>(m.col_.size());
        prev_row = rows[k];
        prev_col = cols[k];
        m.col_.push_back(cols[k]);
        m.val_.push_back(vals[k]);
    }
    for (int r = prev_row + 1; r <= n; ++r) m.row_ptr_[r] = static_cast<int>(m.col_.size());
    return m;
}

std::vector<double> SparseMatrix::multiply(std::span<const double> x) const {
    if (static_cast<int>(x.size()) != n_) throw InvalidInput("multiply: size mismatch");
    std::vector<double> y(n_, 0.0);
    for (int i = 0; i < n_; ++i)
        for (int k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k) y[i] += val_[k] * x[col_[k]];
    return y;
}

double SparseMatrix::entry(int i, int j) const {
    for (int k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k)
        if (col_[k] == j) return val_[k];
    return 0.0;
}

double SparseMatrix::symmetry_defect() const {
    double d = 0.0;
    for (int i = 0; i < n_; ++i)
        for (int k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k)
            d = std::max(d, std::abs(val_[k] - entry(col_[k], i)));
    return d;
}

int SparseMatrix::lower_bandwidth() const {
    int kl = 0;
    for (int i = 0; i < n_; ++i)
        for (int k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k) kl = std::max(kl, i - col_[k]);
    return kl;
}

int SparseMatrix::upper_bandwidth() const {
    int ku = 0;
    for (int i = 0; i < n_; ++i)
        for (int k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k) ku = std::max(ku, col_[k] - i);
    return ku;
}

BandedLU BandedLU::factor(const SparseMatrix& A) {
    BandedLU f;
    f.n_ = A.size();
    f.kl_ = A.lower_bandwidth();
    f.ku_ = A.upper_bandwidth();
    f.ldab_ = 2 * f.kl_ + f.ku_ + 1;
    f.ab_.assign(static_cast<std::size_t>(f.ldab_) * f.n_, 0.0);
    f.piv_.assign(f.n_, 0);

    const int kl = f.kl_, ku = f.ku_, ldab = f.ldab_, n = f.n_;
    auto at = [&](int i, int j) -> double& {
        return f.ab_[static_cast<std::size_t>(j) * ldab + (kl + ku + i - j)];
    };

    for (int i = 0; i < n; ++i)
        for (int k = A.row_ptr()[i]; k < A.row_ptr()[i + 1]; ++k)
            at(i, A.col()[k]) = A.val()[k];

    // gbtrf-style elimination with partial pivoting; U's bandwidth
    // grows to kl+ku, which the storage already accommodates.
    for (int j = 0; j < n; ++j) {
        const int ilast = std::min(n - 1, j + kl);
        int p = j;
        double pmax = std::abs(at(j, j));
        for (int i = j + 1; i <= ilast; ++i) {
            const double v = std::abs(at(i, j));
            if (v > pmax) {
                pmax = v;
                p = i;
            }
        }
        f.piv_[j] = p;
        if (pmax == 0.0) throw NumericalError("banded LU: singular matrix");
        const int clast = std::min(n - 1, j + kl + ku);
        if (p != j)
            for (int c = j; c <= clast; ++c) std::swap(at(j, c), at(p, c));
        const double pivot = at(j, j);
        for (int i = j + 1; i <= ilast; ++i) {
            const double m = at(i, j) / pivot;
            at(i, j) = m;
            if (m != 0.0)
                for (int c = j + 1; c <= clast; ++c) at(i, c) -= m * at(j, c);
        }
    }
    return f;
}

void BandedLU::solve(std::span<double> b) const {
    if (static_cast<int>(b.size()) != n_) throw InvalidInput("solve: size mismatch");
    const int kl = kl_, ku = ku_, ldab = ldab_, n = n_;
    auto at = [&](int i, int j) -> double {
        return ab_[static_cast<std::size_t>(j) * ldab + (kl + ku + i - j)];
    };
    for (int j = 0; j < n; ++j) {
        if (piv_[j] != j) std::swap(b[j], b[piv_[j]]);
        const int ilast = std::min(n - 1, j + kl);
        for (int i = j + 1; i <= ilast; ++i) b[i] -= at(i, j) * b[j];
    }
    for (int i = n - 1; i >= 0; --i) {
        const int clast = std::min(n - 1, i + kl + ku);
        double s = b[i];
        for (int c = i + 1; c <= clast; ++c) s -= at(i, c) * b[c];
        b[i] = s / at(i, i);
    }
}

std::vector<double> BandedLU::solve_copy(std::span<const double> b) const {
    std::vector<double> x(b.begin(), b.end());
    solve(x);
    return x;
}

}  // namespace lps::sparse
