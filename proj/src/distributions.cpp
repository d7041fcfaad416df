#include "spdt/distributions.hpp"

#include <cmath>
#include <string>

#include "spdt/errors.hpp"

namespace spdt {

static void check_prob(double p, const char *name, bool allow_one)
{
    if (!(p > 0.0) || p > 1.0 || (!allow_one && p == 1.0))
        throw data_error(std::string(name) + " must be a probability in (0,1" +
                         (allow_one ? "]" : ")") + ", got " + std::to_string(p));
}

std::uint64_t sample_geometric(const GeometricParam &param, RandomStream &rng)
{
    const double stop = param.continuation ? 1.0 - param.p : param.p;
    check_prob(stop, param.continuation ? "1-lambda" : "p", true);
    if (param.support_start > 1)
        throw data_error("geometric support_start must be 0 or 1");
    if (stop == 1.0)
        return param.support_start;
    const double u = rng.next_double(); // in [0,1), so log1p(-u) is finite
    const double t = std::floor(std::log1p(-u) / std::log1p(-stop));
    return param.support_start + (std::uint64_t)t;
}

double geometric_pmf(const GeometricParam &param, std::uint64_t t)
{
    const double stop = param.continuation ? 1.0 - param.p : param.p;
    check_prob(stop, param.continuation ? "1-lambda" : "p", true);
    if (t < param.support_start)
        return 0.0;
    const double k = double(t - param.support_start);
    return stop * std::exp(k * std::log1p(-stop));
}

std::uint32_t sample_truncated_geometric(const TruncatedGeometricParam &param, RandomStream &rng)
{
    check_prob(param.p_c, "p_c", false);
    if (param.bound == 0)
        throw data_error("truncated geometric bound must be >= 1");
    const double u = rng.next_double();
    // Inverse CDF of Eq. 6 on {0, ..., bound-1}.
    const double total = -std::expm1(double(param.bound) * std::log1p(-param.p_c));
    const double t = std::floor(std::log1p(-u * total) / std::log1p(-param.p_c));
    auto result = (std::uint64_t)t;
    if (result >= param.bound)
        result = param.bound - 1;
    return (std::uint32_t)result;
}

double truncated_geometric_pmf(const TruncatedGeometricParam &param, std::uint32_t t)
{
    check_prob(param.p_c, "p_c", false);
    if (param.bound == 0)
        throw data_error("truncated geometric bound must be >= 1");
    if (t >= param.bound)
        return 0.0;
    const double log1mp = std::log1p(-param.p_c);
    const double total = -std::expm1(double(param.bound) * log1mp);
    return param.p_c * std::exp(double(t) * log1mp) / total;
}

static void check_powerlaw(const BoundedPowerLawParam &p)
{
    if (!(p.exponent > 0.0))
        throw data_error("power-law exponent must be positive, got " + std::to_string(p.exponent));
    if (!(p.lower > 0.0) || !(p.lower < p.upper) || p.upper > 1.0)
        throw data_error("power-law bounds must satisfy 0 < lower < upper <= 1, got [" +
                         std::to_string(p.lower) + ", " + std::to_string(p.upper) + "]");
}

double sample_bounded_powerlaw(const BoundedPowerLawParam &param, RandomStream &rng)
{
    check_powerlaw(param);
    const double u = rng.next_double();
    const double lo = std::pow(param.lower, -param.exponent);
    const double hi = std::pow(param.upper, -param.exponent);
    return std::pow(lo - u * (lo - hi), -1.0 / param.exponent);
}

double bounded_powerlaw_pdf(const BoundedPowerLawParam &param, double x)
{
    check_powerlaw(param);
    if (x < param.lower || x > param.upper)
        return 0.0;
    const double lo = std::pow(param.lower, -param.exponent);
    const double hi = std::pow(param.upper, -param.exponent);
    return param.exponent * std::pow(x, -(param.exponent + 1.0)) / (lo - hi);
}

double bounded_powerlaw_cdf(const BoundedPowerLawParam &param, double x)
{
    check_powerlaw(param);
    if (x <= param.lower)
        return 0.0;
    if (x >= param.upper)
        return 1.0;
    const double lo = std::pow(param.lower, -param.exponent);
    const double hi = std::pow(param.upper, -param.exponent);
    return (lo - std::pow(x, -param.exponent)) / (lo - hi);
}

std::pair<double, double> equilibrium_probs(double rho, double q)
{
    if (!(rho > 0.0) || rho > 1.0 || !(q > 0.0) || q > 1.0)
        throw data_error("equilibrium_probs requires rho and q in (0,1], got rho=" +
                         std::to_string(rho) + " q=" + std::to_string(q));
    return {rho / (q + rho), q / (q + rho)};
}

namespace detail {

double powdiff_over_a(double a, double log_lower, double log_upper)
{
    const double span = log_upper - log_lower;
    if (a == 0.0)
        return span;
    // Factor out the dominant exponential so expm1 sees a non-positive
    // argument; avoids 0 * inf for |a| large.
    if (a > 0.0)
        return -std::exp(a * log_upper) * std::expm1(-a * span) / a;
    return std::exp(a * log_lower) * std::expm1(a * span) / a;
}

} // namespace detail

double mixed_degree_pmf(std::uint64_t d, const BoundedPowerLawParam &param)
{
    check_powerlaw(param);
    if (d < 1)
        throw data_error("activation degree must be >= 1");
    const double beta = param.exponent;
    const double ll = std::log(param.lower);
    const double lu = std::log(param.upper);
    const double norm = beta / (std::pow(param.lower, -beta) - std::pow(param.upper, -beta));
    const double a = double(d) - beta - 1.0;
    const double val = detail::powdiff_over_a(a, ll, lu) - detail::powdiff_over_a(a + 1.0, ll, lu);
    return norm * val;
}

double poisson_pmf(double mean, std::uint64_t k)
{
    if (!(mean > 0.0))
        throw data_error("poisson mean must be positive");
    return std::exp(double(k) * std::log(mean) - mean - std::lgamma(double(k) + 1.0));
}

} // namespace spdt
