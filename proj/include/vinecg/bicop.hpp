#pragma once

#include <span>
#include <string>
#include <vector>

namespace vinecg {

enum class CopulaFamily { independence, gaussian, clayton, gumbel, frank };

/// Counter-clockwise rotation of the copula density.  Identity for the
/// families that already span negative dependence (independence, gaussian,
/// frank); 90/180/270 give Clayton and Gumbel their reflected variants.
enum class Rotation : int { deg0 = 0, deg90 = 90, deg180 = 180, deg270 = 270 };

[[nodiscard]] std::string family_name(CopulaFamily f);
[[nodiscard]] CopulaFamily family_from_name(const std::string& name);

/// A parametric pair copula: family, rotation and scalar parameter.
/// Immutable after construction; the constructor enforces the family's
/// admissible parameter range and the rotation rules.
class BivariateCopula {
  public:
    BivariateCopula();  // independence
    BivariateCopula(CopulaFamily family, Rotation rotation, double theta);

    [[nodiscard]] CopulaFamily family() const { return family_; }
    [[nodiscard]] Rotation rotation() const { return rotation_; }
    [[nodiscard]] double theta() const { return theta_; }

    /// Kendall's tau implied by (family, rotation, theta).
    [[nodiscard]] double tau() const;

    [[nodiscard]] std::string describe() const;

  private:
    CopulaFamily family_;
    Rotation rotation_;
    double theta_;
};

/// Copula density c(u, v).  Inputs are clipped to [1e-10, 1 - 1e-10].
double pdf(const BivariateCopula& c, double u, double v);
double log_pdf(const BivariateCopula& c, double u, double v);

/// Copula CDF C(u, v).
double cdf(const BivariateCopula& c, double u, double v);

/// h1(u, v) = P(U <= u | V = v) = dC/dv: conditional CDF of the first
/// argument given the second.
double hfunc1(const BivariateCopula& c, double u, double v);

/// h2(u, v) = P(V <= v | U = u) = dC/du.
double hfunc2(const BivariateCopula& c, double u, double v);

/// Inverse of hfunc1 in its first argument: hfunc1(hinv1(p, v), v) = p.
double hinv1(const BivariateCopula& c, double p, double v);

/// Inverse of hfunc2 in its second argument: hfunc2(u, hinv2(p, u)) = p.
double hinv2(const BivariateCopula& c, double p, double u);

/// Parameter implied by a Kendall's tau under the family's tau map.
/// For rotations 90/270 the achievable tau range flips sign.
double tau_to_theta(CopulaFamily family, Rotation rotation, double tau);
double theta_to_tau(CopulaFamily family, Rotation rotation, double theta);

/// Sum of log densities over paired observations.
double loglik(const BivariateCopula& c, std::span<const double> u, std::span<const double> v);

enum class FitMethod { itau, mle };

struct FitConfig {
    FitMethod method = FitMethod::itau;
    /// Truncate to independence when the empirical |tau| falls below this.
    double independence_threshold = 0.01;
};

/// Select and fit a pair copula on observations in (0,1)^2.
///
/// The empirical Kendall's tau drives the parameter estimate per family
/// (rotations chosen by the tau sign for Clayton/Gumbel); the family with
/// the highest log-likelihood wins.  method == mle additionally refines
/// theta by one-dimensional likelihood maximization seeded at the itau
/// estimate.
BivariateCopula fit(const std::vector<CopulaFamily>& family_set, std::span<const double> u,
                    std::span<const double> v, const FitConfig& cfg = {});

}  // namespace vinecg
