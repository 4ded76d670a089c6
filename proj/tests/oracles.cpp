#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "vinecg/bicop.hpp"
#include "vinecg/normal.hpp"

namespace oracles {

namespace {

double simpson_rec(const std::function<double(double)>& f, double a, double b, double fa, double fm,
                   double fb, double whole, double tol, int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    const double flm = f(lm), frm = f(rm);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    if (depth <= 0 || std::abs(left + right - whole) < 15.0 * tol)
        return left + right + (left + right - whole) / 15.0;
    return simpson_rec(f, a, m, fa, flm, fm, left, tol * 0.5, depth - 1) +
           simpson_rec(f, m, b, fm, frm, fb, right, tol * 0.5, depth - 1);
}

}  // namespace

double integrate_1d(const std::function<double(double)>& f, double a, double b, double tol) {
    const double m = 0.5 * (a + b);
    const double fa = f(a), fm = f(m), fb = f(b);
    const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    return simpson_rec(f, a, b, fa, fm, fb, whole, tol, 40);
}

double integrate_2d(const std::function<double(double, double)>& f, double ax, double bx, double ay,
                    double by, double tol) {
    return integrate_1d(
        [&](double x) { return integrate_1d([&](double y) { return f(x, y); }, ay, by, tol * 0.1); },
        ax, bx, tol);
}

double mixed_fd(const std::function<double(double, double)>& f, double x, double y, double h) {
    return (f(x + h, y + h) - f(x + h, y - h) - f(x - h, y + h) + f(x - h, y - h)) / (4.0 * h * h);
}

double central_fd_y(const std::function<double(double, double)>& f, double x, double y, double h) {
    return (f(x, y + h) - f(x, y - h)) / (2.0 * h);
}

double bisect_inverse(const std::function<double(double)>& g, double target, double width) {
    double lo = 0.0, hi = 1.0;
    while (hi - lo > width) {
        const double mid = 0.5 * (lo + hi);
        if (g(mid) < target)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

Quadrature gauss_legendre_01(int n) {
    Quadrature q;
    q.nodes.resize(static_cast<std::size_t>(n));
    q.weights.resize(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        // Newton on P_n from the Chebyshev-like initial guess
        double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= n; ++k) {
                const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            const double dp = n * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-15) break;
        }
        double p0 = 1.0, p1 = x;
        for (int k = 2; k <= n; ++k) {
            const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
            p0 = p1;
            p1 = p2;
        }
        const double dp = n * (x * p1 - p0) / (x * x - 1.0);
        q.nodes[static_cast<std::size_t>(n - 1 - i)] = 0.5 * (x + 1.0);
        q.weights[static_cast<std::size_t>(n - 1 - i)] = 1.0 / ((1.0 - x * x) * dp * dp);
    }
    return q;
}

double brute_force_tau(std::span<const double> x, std::span<const double> y) {
    const std::size_t n = x.size();
    long long concordant = 0, discordant = 0, tie_x = 0, tie_y = 0;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            const double dx = x[i] - x[j], dy = y[i] - y[j];
            if (dx == 0.0 && dy == 0.0) continue;
            if (dx == 0.0) {
                ++tie_x;
            } else if (dy == 0.0) {
                ++tie_y;
            } else if (dx * dy > 0.0) {
                ++concordant;
            } else {
                ++discordant;
            }
        }
    }
    const double n0 = static_cast<double>(n) * (n - 1) / 2.0;
    double nx = 0, ny = 0, nxy = 0;
    // recompute tie groups exactly as tau-b needs them
    {
        std::vector<std::pair<double, double>> rows(n);
        for (std::size_t i = 0; i < n; ++i) rows[i] = {x[i], y[i]};
        std::sort(rows.begin(), rows.end());
        std::size_t i = 0;
        while (i < n) {
            std::size_t k = i;
            while (k + 1 < n && rows[k + 1].first == rows[i].first) ++k;
            const double t = static_cast<double>(k - i + 1);
            nx += t * (t - 1) / 2;
            std::size_t a = i;
            while (a <= k) {
                std::size_t b = a;
                while (b + 1 <= k && rows[b + 1].second == rows[a].second) ++b;
                const double tt = static_cast<double>(b - a + 1);
                nxy += tt * (tt - 1) / 2;
                a = b + 1;
            }
            i = k + 1;
        }
        std::vector<double> ys(y.begin(), y.end());
        std::sort(ys.begin(), ys.end());
        i = 0;
        while (i < n) {
            std::size_t k = i;
            while (k + 1 < n && ys[k + 1] == ys[i]) ++k;
            const double t = static_cast<double>(k - i + 1);
            ny += t * (t - 1) / 2;
            i = k + 1;
        }
    }
    return static_cast<double>(concordant - discordant) /
           (std::sqrt(n0 - nx) * std::sqrt(n0 - ny));
}

double ks_uniform_pvalue(std::vector<double> sample) {
    std::sort(sample.begin(), sample.end());
    const double n = static_cast<double>(sample.size());
    double dmax = 0.0;
    for (std::size_t i = 0; i < sample.size(); ++i) {
        const double lo = static_cast<double>(i) / n;
        const double hi = static_cast<double>(i + 1) / n;
        dmax = std::max(dmax, std::max(std::abs(sample[i] - lo), std::abs(sample[i] - hi)));
    }
    const double lambda = (std::sqrt(n) + 0.12 + 0.11 / std::sqrt(n)) * dmax;
    double p = 0.0;
    for (int k = 1; k <= 100; ++k)
        p += 2.0 * ((k % 2 == 1) ? 1.0 : -1.0) * std::exp(-2.0 * k * k * lambda * lambda);
    return std::clamp(p, 0.0, 1.0);
}

double tau_stderr(std::size_t n) {
    const double nn = static_cast<double>(n);
    return std::sqrt(2.0 * (2.0 * nn + 5.0) / (9.0 * nn * (nn - 1.0)));
}

std::vector<double> solve(Matrix a, std::vector<double> b) {
    const std::size_t n = a.size();
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t pivot = col;
        for (std::size_t r = col + 1; r < n; ++r)
            if (std::abs(a[r][col]) > std::abs(a[pivot][col])) pivot = r;
        std::swap(a[col], a[pivot]);
        std::swap(b[col], b[pivot]);
        if (a[col][col] == 0.0) throw std::runtime_error("solve: singular matrix");
        for (std::size_t r = col + 1; r < n; ++r) {
            const double f = a[r][col] / a[col][col];
            for (std::size_t c = col; c < n; ++c) a[r][c] -= f * a[col][c];
            b[r] -= f * b[col];
        }
    }
    std::vector<double> x(n);
    for (std::size_t r = n; r-- > 0;) {
        double s = b[r];
        for (std::size_t c = r + 1; c < n; ++c) s -= a[r][c] * x[c];
        x[r] = s / a[r][r];
    }
    return x;
}

double log_det(Matrix a) {
    const std::size_t n = a.size();
    double ld = 0.0;
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t pivot = col;
        for (std::size_t r = col + 1; r < n; ++r)
            if (std::abs(a[r][col]) > std::abs(a[pivot][col])) pivot = r;
        if (pivot != col) std::swap(a[col], a[pivot]);  // correlation matrices: det > 0
        if (a[col][col] <= 0.0) throw std::runtime_error("log_det: not positive definite");
        ld += std::log(a[col][col]);
        for (std::size_t r = col + 1; r < n; ++r) {
            const double f = a[r][col] / a[col][col];
            for (std::size_t c = col; c < n; ++c) a[r][c] -= f * a[col][c];
        }
    }
    return ld;
}

Matrix corr_from_gaussian_vine(const vinecg::VineModel& m) {
    const int d = m.dim();
    Matrix r(static_cast<std::size_t>(d), std::vector<double>(static_cast<std::size_t>(d), 0.0));
    for (int i = 0; i < d; ++i) r[static_cast<std::size_t>(i)][static_cast<std::size_t>(i)] = 1.0;

    for (int k = 0; k < m.num_levels(); ++k) {
        for (const vinecg::CopulaVertex& v : m.level(k)) {
            if (!v.copula.has_value() || v.copula->family() != vinecg::CopulaFamily::gaussian)
                throw std::runtime_error("corr_from_gaussian_vine: needs all-Gaussian copulas");
            const double rho = v.copula->theta();
            const std::vector<int> s = v.conditioning.to_vector();
            if (s.empty()) {
                r[v.left][v.right] = r[v.right][v.left] = rho;
                continue;
            }
            // partial corr given S: rho = (R_ab - x_a . R_Sb)/sqrt(da*db)
            const std::size_t ns = s.size();
            Matrix rss(ns, std::vector<double>(ns));
            std::vector<double> rsa(ns), rsb(ns);
            for (std::size_t i = 0; i < ns; ++i) {
                for (std::size_t j = 0; j < ns; ++j) rss[i][j] = r[s[i]][s[j]];
                rsa[i] = r[s[i]][v.left];
                rsb[i] = r[s[i]][v.right];
            }
            const std::vector<double> xa = solve(rss, rsa);
            const std::vector<double> xb = solve(rss, rsb);
            double qa = 0.0, qb = 0.0, cross = 0.0;
            for (std::size_t i = 0; i < ns; ++i) {
                qa += rsa[i] * xa[i];
                qb += rsb[i] * xb[i];
                cross += rsa[i] * xb[i];
            }
            const double val = rho * std::sqrt((1.0 - qa) * (1.0 - qb)) + cross;
            r[v.left][v.right] = r[v.right][v.left] = val;
        }
    }
    return r;
}

double gaussian_copula_log_density(const Matrix& r, std::span<const double> u) {
    const std::size_t d = r.size();
    std::vector<double> z(d);
    for (std::size_t i = 0; i < d; ++i) z[i] = vinecg::std_normal_quantile(u[i]);
    const std::vector<double> rinv_z = solve(r, z);
    double quad = 0.0, zz = 0.0;
    for (std::size_t i = 0; i < d; ++i) {
        quad += z[i] * rinv_z[i];
        zz += z[i] * z[i];
    }
    return -0.5 * log_det(r) - 0.5 * (quad - zz);
}

ConditionalNormal gaussian_conditional(const Matrix& r, int free_var, const std::vector<int>& cond_vars,
                                       const std::vector<double>& cond_z) {
    const std::size_t ns = cond_vars.size();
    Matrix rss(ns, std::vector<double>(ns));
    std::vector<double> rsf(ns);
    for (std::size_t i = 0; i < ns; ++i) {
        for (std::size_t j = 0; j < ns; ++j) rss[i][j] = r[cond_vars[i]][cond_vars[j]];
        rsf[i] = r[cond_vars[i]][free_var];
    }
    const std::vector<double> w = solve(rss, rsf);
    double mean = 0.0, q = 0.0;
    for (std::size_t i = 0; i < ns; ++i) {
        mean += w[i] * cond_z[i];
        q += w[i] * rsf[i];
    }
    return {mean, 1.0 - q};
}

double prim_max_spanning_weight(const Matrix& w) {
    const std::size_t n = w.size();
    std::vector<bool> in_tree(n, false);
    std::vector<double> best(n, -1.0);
    in_tree[0] = true;
    for (std::size_t j = 1; j < n; ++j) best[j] = w[0][j];
    double total = 0.0;
    for (std::size_t it = 1; it < n; ++it) {
        std::size_t pick = 0;
        double bw = -1.0;
        for (std::size_t j = 0; j < n; ++j) {
            if (!in_tree[j] && best[j] > bw) {
                bw = best[j];
                pick = j;
            }
        }
        in_tree[pick] = true;
        total += bw;
        for (std::size_t j = 0; j < n; ++j)
            if (!in_tree[j]) best[j] = std::max(best[j], w[pick][j]);
    }
    return total;
}

namespace {

void enum_orders_rec(const vinecg::VineModel& m, std::vector<int>& cur, vinecg::VarSet used,
                     std::vector<std::vector<int>>& out) {
    const int d = m.dim();
    const int k = d - 2 - static_cast<int>(cur.size());
    if (k < 0) {
        for (int v = 0; v < d; ++v)
            if (!used.contains(v)) cur.push_back(v);
        out.push_back(cur);
        cur.pop_back();
        return;
    }
    const vinecg::CopulaVertex* uv = nullptr;
    for (const auto& v : m.level(k)) {
        if (!used.contains(v.left) && !used.contains(v.right)) {
            uv = &v;
            break;
        }
    }
    if (uv == nullptr) throw std::runtime_error("enumerate orders: no unvisited vertex");
    for (const int pick : {uv->left, uv->right}) {
        cur.push_back(pick);
        enum_orders_rec(m, cur, used.with(pick), out);
        cur.pop_back();
    }
}

}  // namespace

std::vector<std::vector<int>> enumerate_full_orders(const vinecg::VineModel& m) {
    std::vector<std::vector<int>> out;
    std::vector<int> cur;
    enum_orders_rec(m, cur, {}, out);
    return out;
}

std::vector<std::vector<int>> enumerate_conditional_orders(const vinecg::VineModel& m,
                                                           vinecg::VarSet cond_set) {
    std::vector<std::vector<int>> out;
    const std::size_t keep = static_cast<std::size_t>(m.dim() - cond_set.size());
    for (const std::vector<int>& full : enumerate_full_orders(m)) {
        vinecg::VarSet tail;
        for (std::size_t i = keep; i < full.size(); ++i) tail.insert(full[i]);
        if (tail != cond_set) continue;
        std::vector<int> prefix(full.begin(), full.begin() + static_cast<std::ptrdiff_t>(keep));
        if (std::find(out.begin(), out.end(), prefix) == out.end()) out.push_back(prefix);
    }
    return out;
}

vinecg::DataMatrix random_correlated_data(int d, std::size_t n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::uniform_real_distribution<double> unif(-0.9, 0.9);

    // mixing matrix: identity plus random off-diagonal loadings
    Matrix a(static_cast<std::size_t>(d), std::vector<double>(static_cast<std::size_t>(d), 0.0));
    for (int i = 0; i < d; ++i) {
        a[static_cast<std::size_t>(i)][static_cast<std::size_t>(i)] = 1.0;
        for (int j = 0; j < i; ++j) a[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = unif(rng);
    }
    vinecg::DataMatrix out;
    out.n = n;
    out.d = static_cast<std::size_t>(d);
    out.values.resize(n * out.d);
    std::vector<double> z(static_cast<std::size_t>(d));
    for (std::size_t i = 0; i < n; ++i) {
        for (int j = 0; j < d; ++j) z[static_cast<std::size_t>(j)] = gauss(rng);
        for (int j = 0; j < d; ++j) {
            double s = 0.0;
            for (int t = 0; t <= j; ++t) s += a[static_cast<std::size_t>(j)][static_cast<std::size_t>(t)] * z[static_cast<std::size_t>(t)];
            out.at(i, static_cast<std::size_t>(j)) = s;
        }
    }
    for (std::size_t j = 0; j < out.d; ++j) out.names.push_back("x" + std::to_string(j));
    return out;
}

vinecg::VineModel random_vine(int d, std::uint64_t seed, vinecg::VarSet cond_set, std::size_t n) {
    const vinecg::DataMatrix data = random_correlated_data(d, n, seed);
    vinecg::BuildConfig cfg;
    cfg.cond_set = cond_set;
    cfg.independence_threshold = 0.0;  // keep every edge parametric
    return vinecg::build(vinecg::to_pseudo_obs(data), cfg);
}

vinecg::VineModel with_gaussian_copulas(vinecg::VineModel m, const std::vector<double>& rhos) {
    std::size_t next = 0;
    for (int k = 0; k < m.num_levels(); ++k) {
        auto& level = m.level_mutable(k);
        std::vector<std::size_t> idx(level.size());
        for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
        std::sort(idx.begin(), idx.end(),
                  [&](std::size_t a, std::size_t b) { return level[a].key() < level[b].key(); });
        for (std::size_t i : idx) {
            level[i].copula = vinecg::BivariateCopula(vinecg::CopulaFamily::gaussian,
                                                      vinecg::Rotation::deg0, rhos[next % rhos.size()]);
            ++next;
        }
    }
    return m;
}

void simulate_pair(const vinecg::BivariateCopula& c, std::size_t n, std::uint64_t seed,
                   std::vector<double>& u, std::vector<double>& v) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    u.resize(n);
    v.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        u[i] = unif(rng);
        v[i] = vinecg::hinv2(c, unif(rng), u[i]);
    }
}

}  // namespace oracles
