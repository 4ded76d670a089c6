#pragma once

// Test-only oracles: independent reference implementations used to derive
// and check expected values.  Nothing here may call into the code paths it
// verifies beyond plain data access.

#include <functional>
#include <random>
#include <span>
#include <vector>

#include "vinecg/builder.hpp"
#include "vinecg/deptools.hpp"
#include "vinecg/vcg.hpp"

namespace oracles {

// --- quadrature / differentiation -----------------------------------------

double integrate_1d(const std::function<double(double)>& f, double a, double b, double tol = 1e-10);
double integrate_2d(const std::function<double(double, double)>& f, double ax, double bx, double ay,
                    double by, double tol = 1e-8);

// mixed second derivative d2F/dxdy by 4-point central differences
double mixed_fd(const std::function<double(double, double)>& f, double x, double y, double h);

// first derivative dF/dy by central differences
double central_fd_y(const std::function<double(double, double)>& f, double x, double y, double h);

// bisection inverse of a monotone increasing g on [0,1]: g(x) = target
double bisect_inverse(const std::function<double(double)>& g, double target, double width = 1e-12);

// Gauss-Legendre nodes/weights on (0,1); all nodes strictly interior
struct Quadrature {
    std::vector<double> nodes;
    std::vector<double> weights;
};
Quadrature gauss_legendre_01(int n);

// --- statistics -------------------------------------------------------------

double brute_force_tau(std::span<const double> x, std::span<const double> y);

// Kolmogorov-Smirnov uniformity p-value for a sample on (0,1)
double ks_uniform_pvalue(std::vector<double> sample);

// asymptotic standard error of Kendall's tau under independence
double tau_stderr(std::size_t n);

// --- small dense linear algebra ---------------------------------------------

using Matrix = std::vector<std::vector<double>>;

std::vector<double> solve(Matrix a, std::vector<double> b);
double log_det(Matrix a);

// --- Gaussian vine algebra ---------------------------------------------------

// Correlation matrix implied by an all-Gaussian vine: each vertex pins the
// partial correlation of its conditioned pair given its conditioning set;
// solved level by level through the Schur-complement identity.
Matrix corr_from_gaussian_vine(const vinecg::VineModel& m);

// log density of the Gaussian copula with correlation R at a uniform row
double gaussian_copula_log_density(const Matrix& r, std::span<const double> u);

// conditional law of z_free given z at cond indices (z-scale)
struct ConditionalNormal {
    double mean;
    double variance;
};
ConditionalNormal gaussian_conditional(const Matrix& r, int free_var, const std::vector<int>& cond_vars,
                                       const std::vector<double>& cond_z);

// --- graph oracles ------------------------------------------------------------

// maximum spanning tree total weight over a dense symmetric weight matrix
double prim_max_spanning_weight(const Matrix& w);

// all feasible full sampling orders (2^(d-1) of them), by enumerating the
// two conditioned-element choices of the unvisited vertex bottom-up
std::vector<std::vector<int>> enumerate_full_orders(const vinecg::VineModel& m);

// feasible conditional orders: prefixes of full orders whose trailing
// variables are exactly cond_set
std::vector<std::vector<int>> enumerate_conditional_orders(const vinecg::VineModel& m,
                                                           vinecg::VarSet cond_set);

// --- fixtures -----------------------------------------------------------------

// random data with nontrivial cross-correlation, deterministic in seed
vinecg::DataMatrix random_correlated_data(int d, std::size_t n, std::uint64_t seed);

// vine built from random data (valid by construction; conditional orders
// feasible for the given cond_set)
vinecg::VineModel random_vine(int d, std::uint64_t seed, vinecg::VarSet cond_set = {},
                              std::size_t n = 80);

// attach Gaussian pair copulas to every vertex of a structure; rhos cycles
// through the given list in level-then-key order
vinecg::VineModel with_gaussian_copulas(vinecg::VineModel m, const std::vector<double>& rhos);

// simulate n pairs from a bivariate copula by the conditional method
void simulate_pair(const vinecg::BivariateCopula& c, std::size_t n, std::uint64_t seed,
                   std::vector<double>& u, std::vector<double>& v);

}  // namespace oracles
