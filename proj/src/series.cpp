#include "lps/series.hpp"

#include <cmath>
#include <mutex>

namespace lps::series {

namespace {

void enumerate(int remaining, int part, std::vector<int>& j,
               std::vector<std::vector<int>>& out) {
    if (part > static_cast<int>(j.size())) {
        if (remaining == 0) out.push_back(j);
        return;
    }
    // j_part ranges over 0 .. remaining/part
    for (int cnt = 0; cnt * part <= remaining; ++cnt) {
        j[part - 1] = cnt;
        enumerate(remaining - cnt * part, part + 1, j, out);
    }
    j[part - 1] = 0;
}

double factorial(int k) {
    double f = 1.0;
    for (int i = 2; i <= k; ++i) f *= i;
    return f;
}

}  // namespace

const std::vector<std::vector<int>>& index_sets(int k) {
    if (k < 1 || k > kMaxOrder) throw InvalidInput("index_sets: order out of range");
    static std::vector<std::vector<std::vector<int>>> cache(kMaxOrder + 1);
    static std::mutex mtx;
    std::scoped_lock lock(mtx);
    if (cache[k].empty()) {
        std::vector<int> j(k, 0);
        enumerate(k, 1, j, cache[k]);
    }
    return cache[k];
}

int partition_count(int k) { return static_cast<int>(index_sets(k).size()); }

std::vector<double> expand_exponential(std::span<const double> a) {
    if (a.empty() || static_cast<int>(a.size()) - 1 > kMaxOrder)
        throw InvalidInput("expand_exponential: order out of range");
    const int K = static_cast<int>(a.size()) - 1;
    std::vector<double> c(K + 1, 0.0);
    const double e0 = std::exp(a[0]);
    c[0] = e0;
    for (int k = 1; k <= K; ++k) {
        double sum = 0.0;
        for (const auto& j : index_sets(k)) {
            double term = 1.0;
            for (int m = 1; m <= k; ++m) {
                if (j[m - 1] == 0) continue;
                term *= std::pow(a[m], j[m - 1]) / factorial(j[m - 1]);
            }
            sum += term;
        }
        c[k] = e0 * sum;
    }
    return c;
}

std::vector<double> expand_reciprocal(std::span<const double> a) {
    if (a.empty() || static_cast<int>(a.size()) - 1 > kMaxOrder)
        throw InvalidInput("expand_reciprocal: order out of range");
    if (a[0] == 0.0) throw InvalidInput("expand_reciprocal: a0 must be nonzero");
    const int K = static_cast<int>(a.size()) - 1;
    std::vector<double> c(K + 1, 0.0);
    c[0] = 1.0 / a[0];
    for (int k = 1; k <= K; ++k) {
        double sum = 0.0;
        for (const auto& j : index_sets(k)) {
            int order = 0;  // j = j_1 + ... + j_k
            double term = 1.0;
            for (int m = 1; m <= k; ++m) {
                if (j[m - 1] == 0) continue;
                order += j[m - 1];
                term *= std::pow(a[m], j[m - 1]) / factorial(j[m - 1]);
            }
            // f^{(j)}(a0)/j! factors: f(z)=1/z has f^{(j)}(a0) = (-1)^j j! a0^{-j-1}
            const double sign = (order % 2 == 0) ? 1.0 : -1.0;
            sum += sign * factorial(order) * term / std::pow(a[0], order + 1);
        }
        c[k] = sum;
    }
    return c;
}

std::vector<double> cauchy_product(std::span<const double> a, std::span<const double> b) {
    const int K = static_cast<int>(std::min(a.size(), b.size())) - 1;
    std::vector<double> c(K + 1, 0.0);
    for (int k = 0; k <= K; ++k)
        for (int i = 0; i <= k; ++i) c[k] += a[i] * b[k - i];
    return c;
}

SeriesCoeffs expand_nR(const SeriesInput& in, const physics::RecombinationParams& rec, int K) {
    if (K < 0 || K > kMaxOrder) throw InvalidInput("expand_nR: order out of range");
    if (static_cast<int>(in.psi.size()) <= K || static_cast<int>(in.phi_n.size()) <= K ||
        static_cast<int>(in.phi_p.size()) <= K)
        throw InvalidInput("expand_nR: coefficient sequences shorter than K");
    rec.validate();

    std::vector<double> an(K + 1), ap(K + 1);
    for (int k = 0; k <= K; ++k) {
        an[k] = in.psi[k] - in.phi_n[k];
        ap[k] = in.phi_p[k] - in.psi[k];
    }

    SeriesCoeffs out;
    out.K = K;
    out.n = expand_exponential(an);
    out.p = expand_exponential(ap);
    const double n0 = out.n[0], p0 = out.p[0];

    // composition remainders of the n^(k) splitting
    out.F.assign(K + 1, 0.0);
    for (int k = 2; k <= K; ++k) out.F[k] = out.n[k] / n0 - an[k];

    // rate coefficient: polynomial part plus the reciprocal of the shifted
    // SRH denominator tau_p(n + delta nT) + tau_n(p + delta pT)
    std::vector<double> den(K + 1, 0.0);
    for (int k = 0; k <= K; ++k) {
        den[k] = rec.tau_p * out.n[k];
        if (k == 1) den[k] += rec.tau_p * rec.nT + rec.tau_n * rec.pT;
        if (k >= 2) den[k] += rec.tau_n * out.p[k - 2];
    }
    const auto recip = expand_reciprocal(den);
    out.r.assign(K + 1, 0.0);
    for (int k = 0; k <= K; ++k) {
        out.r[k] = rec.Cn * out.n[k] + recip[k];
        if (k == 0) out.r[k] += rec.Cd;
        if (k >= 2) out.r[k] += rec.Cp * out.p[k - 2];
    }

    const double c_n0 = rec.Cn - 1.0 / (rec.tau_p * n0 * n0);
    out.F_r.assign(K + 1, 0.0);
    for (int k = 1; k <= K; ++k) out.F_r[k] = out.r[k] - c_n0 * out.n[k];

    // R^(k) = sum_j r^(j) [n p]^(k-j) - r^(k)
    const auto np = cauchy_product(out.n, out.p);
    out.R.assign(K + 1, 0.0);
    for (int k = 0; k <= K; ++k) {
        double s = -out.r[k];
        for (int j = 0; j <= k; ++j) s += out.r[j] * np[k - j];
        out.R[k] = s;
    }

    const double r00 = out.r[0];  // equals r0(n0)
    out.s_n = r00 * p0 + c_n0 * (n0 * p0 - 1.0);
    out.s_p = r00 * n0;
    out.F_R.assign(K + 1, 0.0);
    for (int k = 1; k <= K; ++k)
        out.F_R[k] = out.R[k] - out.s_n * out.n[k] - out.s_p * out.p[k];

    return out;
}

}  // namespace lps::series
