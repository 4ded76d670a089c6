#include "vinecg/deptools.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>

#include "vinecg/errors.hpp"

namespace vinecg {

PseudoObsMatrix to_pseudo_obs(const DataMatrix& data) {
    if (data.n < 2) throw DataError("to_pseudo_obs: need at least 2 rows, got " + std::to_string(data.n));
    PseudoObsMatrix out;
    out.n = data.n;
    out.d = data.d;
    out.values.resize(data.n * data.d);

    std::vector<std::size_t> idx(data.n);
    for (std::size_t j = 0; j < data.d; ++j) {
        const auto col = data.col(j);
        for (std::size_t i = 0; i < data.n; ++i) {
            if (!std::isfinite(col[i]))
                throw DataError("to_pseudo_obs: non-finite value at row " + std::to_string(i) +
                                ", column " + std::to_string(j));
        }
        std::iota(idx.begin(), idx.end(), std::size_t{0});
        std::sort(idx.begin(), idx.end(),
                  [&](std::size_t a, std::size_t b) { return col[a] < col[b]; });
        const double denom = static_cast<double>(data.n) + 1.0;
        std::size_t i = 0;
        while (i < data.n) {
            std::size_t k = i;
            while (k + 1 < data.n && col[idx[k + 1]] == col[idx[i]]) ++k;
            // average rank over the tied block [i, k], 1-based ranks
            const double avg_rank = 0.5 * static_cast<double>(i + k) + 1.0;
            for (std::size_t t = i; t <= k; ++t) out.at(idx[t], j) = avg_rank / denom;
            i = k + 1;
        }
    }
    return out;
}

namespace {

// Count strict inversions of y (pairs i < j with y[i] > y[j]) by merge sort.
std::uint64_t count_inversions(std::vector<double>& y, std::vector<double>& buf, std::size_t lo,
                               std::size_t hi) {
    if (hi - lo < 2) return 0;
    const std::size_t mid = lo + (hi - lo) / 2;
    std::uint64_t inv = count_inversions(y, buf, lo, mid) + count_inversions(y, buf, mid, hi);
    std::size_t a = lo, b = mid, o = lo;
    while (a < mid && b < hi) {
        if (y[b] < y[a]) {
            inv += mid - a;
            buf[o++] = y[b++];
        } else {
            buf[o++] = y[a++];
        }
    }
    while (a < mid) buf[o++] = y[a++];
    while (b < hi) buf[o++] = y[b++];
    std::copy(buf.begin() + static_cast<std::ptrdiff_t>(lo), buf.begin() + static_cast<std::ptrdiff_t>(hi),
              y.begin() + static_cast<std::ptrdiff_t>(lo));
    return inv;
}

std::uint64_t tie_pairs(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    std::uint64_t total = 0;
    std::size_t i = 0;
    while (i < v.size()) {
        std::size_t k = i;
        while (k + 1 < v.size() && v[k + 1] == v[i]) ++k;
        const std::uint64_t t = k - i + 1;
        total += t * (t - 1) / 2;
        i = k + 1;
    }
    return total;
}

}  // namespace

double kendall_tau(std::span<const double> x, std::span<const double> y) {
    const std::size_t n = x.size();
    if (n != y.size()) throw std::invalid_argument("kendall_tau: length mismatch");
    if (n < 2) throw std::invalid_argument("kendall_tau: need at least 2 observations");

    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    std::sort(perm.begin(), perm.end(), [&](std::size_t a, std::size_t b) {
        if (x[a] != x[b]) return x[a] < x[b];
        return y[a] < y[b];
    });

    // ties in x, and joint ties, from the sorted order
    std::uint64_t ntie_x = 0, ntie_xy = 0;
    {
        std::size_t i = 0;
        while (i < n) {
            std::size_t k = i;
            while (k + 1 < n && x[perm[k + 1]] == x[perm[i]]) ++k;
            const std::uint64_t t = k - i + 1;
            ntie_x += t * (t - 1) / 2;
            std::size_t a = i;
            while (a <= k) {
                std::size_t b = a;
                while (b + 1 <= k && y[perm[b + 1]] == y[perm[a]]) ++b;
                const std::uint64_t tt = b - a + 1;
                ntie_xy += tt * (tt - 1) / 2;
                a = b + 1;
            }
            i = k + 1;
        }
    }

    std::vector<double> ys(n), buf(n);
    for (std::size_t i = 0; i < n; ++i) ys[i] = y[perm[i]];
    const std::uint64_t discordant = count_inversions(ys, buf, 0, n);
    const std::uint64_t ntie_y = tie_pairs(std::vector<double>(y.begin(), y.end()));

    const std::uint64_t total = static_cast<std::uint64_t>(n) * (n - 1) / 2;
    if (total == ntie_x) throw NumericError("kendall_tau: undefined, first vector is constant");
    if (total == ntie_y) throw NumericError("kendall_tau: undefined, second vector is constant");

    const double num = static_cast<double>(total) - static_cast<double>(ntie_x) -
                       static_cast<double>(ntie_y) + static_cast<double>(ntie_xy) -
                       2.0 * static_cast<double>(discordant);
    const double den = std::sqrt(static_cast<double>(total - ntie_x)) *
                       std::sqrt(static_cast<double>(total - ntie_y));
    return num / den;
}

}  // namespace vinecg
