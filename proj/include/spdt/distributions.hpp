#ifndef SPDT_DISTRIBUTIONS_HPP
#define SPDT_DISTRIBUTIONS_HPP

#include <cstdint>
#include <utility>

#include "spdt/random.hpp"

namespace spdt {

// Plain geometric law. The model uses it in two roles that differ only in
// which probability is the "success": active/inactive period durations and
// link durations (Eqs. 1, 2, 7) use p as the per-step stop probability,
// Pr(t) = p (1-p)^(t-1); the activation degree (Eq. 4) uses p as the
// continuation probability, Pr(k) = (1-p) p^(k-1). The two roles are kept
// explicit rather than silently flipping p at call sites.
struct GeometricParam {
    double p = 0.5;
    unsigned support_start = 1;   // 0 or 1
    bool continuation = false;    // true: Eq. 4 role, p is the continuation prob

    static GeometricParam stop_prob(double p) { return {p, 1, false}; }
    static GeometricParam continuation_prob(double lambda) { return {lambda, 1, true}; }
};

// Eq. 6: Pr(t) = p_c (1-p_c)^t / (1 - (1-p_c)^bound) on t in {0, ..., bound-1}.
// The support matches the printed normalizer, so the pmf sums to exactly 1.
struct TruncatedGeometricParam {
    double p_c = 0.5;
    std::uint32_t bound = 1; // = t_a + delta
};

// Eq. 5: density f(x) = exponent * x^-(exponent+1) / (lower^-exponent - upper^-exponent)
// on [lower, upper]. upper is approximately 1 in the paper and fixed to 1 by default.
struct BoundedPowerLawParam {
    double exponent = 2.963;
    double lower = 0.26;
    double upper = 1.0;
};

std::uint64_t sample_geometric(const GeometricParam &param, RandomStream &rng);
double geometric_pmf(const GeometricParam &param, std::uint64_t t);

std::uint32_t sample_truncated_geometric(const TruncatedGeometricParam &param, RandomStream &rng);
double truncated_geometric_pmf(const TruncatedGeometricParam &param, std::uint32_t t);

double sample_bounded_powerlaw(const BoundedPowerLawParam &param, RandomStream &rng);
double bounded_powerlaw_pdf(const BoundedPowerLawParam &param, double x);
double bounded_powerlaw_cdf(const BoundedPowerLawParam &param, double x);

// Eq. 3: equilibrium probabilities (inactive, active) of the two-state
// switching chain with active->inactive prob rho and inactive->active prob q.
std::pair<double, double> equilibrium_probs(double rho, double q);

// Eq. 12: marginal activation-degree pmf when the continuation probability is
// power-law distributed. Evaluated through (upper^a - lower^a)/a terms with
// expm1 so the removable singularities at d - exponent in {0, 1} stay finite.
double mixed_degree_pmf(std::uint64_t d, const BoundedPowerLawParam &param);

// Poisson pmf; the activation-frequency reference law (Appendix A.1).
double poisson_pmf(double mean, std::uint64_t k);

namespace detail {
// (upper^a - lower^a) / a, continuous at a == 0, given the log limits.
double powdiff_over_a(double a, double log_lower, double log_upper);
} // namespace detail

} // namespace spdt

#endif
