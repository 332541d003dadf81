#pragma once

#include <span>
#include <vector>

#include "lps/physics.hpp"

namespace lps::series {

/// Enumeration bound for the composition machinery; partition growth makes
/// higher orders pointless here.
inline constexpr int kMaxOrder = 8;

/// All nonnegative integer solutions (j_1..j_k) of j_1 + 2 j_2 + ... + k j_k = k,
/// memoized. Their count is the partition number p(k).
const std::vector<std::vector<int>>& index_sets(int k);
int partition_count(int k);

/// Coefficients of exp(sum a_m delta^m) up to the order of `a`
/// (a.size() - 1 <= kMaxOrder).
std::vector<double> expand_exponential(std::span<const double> a);

/// Coefficients of 1 / sum a_m delta^m; requires a[0] != 0.
std::vector<double> expand_reciprocal(std::span<const double> a);

/// Cauchy product of two coefficient sequences, truncated to the shorter.
std::vector<double> cauchy_product(std::span<const double> a, std::span<const double> b);

/// Potential coefficients feeding the expansion, one scalar per order.
struct SeriesInput {
    std::vector<double> psi;    ///< psi^(k), k = 0..K
    std::vector<double> phi_n;  ///< phi_n^(k)
    std::vector<double> phi_p;  ///< phi_p^(k)
};

/// Power-series coefficients of the carrier densities and the
/// recombination rate in delta, with the split used by the order-k systems:
/// R^(k) = s_n n^(k) + s_p p^(k) + F_R^(k) for k >= 1.
struct SeriesCoeffs {
    int K = 0;
    std::vector<double> n;    ///< n^(k)
    std::vector<double> p;    ///< p^(k) (coefficients of the delta^2-stripped series)
    std::vector<double> r;    ///< r^(k), the rate-coefficient expansion
    std::vector<double> R;    ///< R^(k)
    std::vector<double> F;    ///< composition remainders: n^(k)/n^(0) - (psi^(k)-phi_n^(k))
    std::vector<double> F_r;  ///< r^(k) - c(n0) n^(k)
    std::vector<double> F_R;  ///< R^(k) - s_n n^(k) - s_p p^(k)
    double s_n = 0.0;
    double s_p = 0.0;
};

SeriesCoeffs expand_nR(const SeriesInput& in, const physics::RecombinationParams& rec, int K);

}  // namespace lps::series
