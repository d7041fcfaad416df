#include <doctest.h>

#include <cmath>
#include <numeric>
#include <vector>

#include "oracles.hpp"
#include "spdt/distributions.hpp"
#include "spdt/errors.hpp"
#include "spdt/random.hpp"

using namespace spdt;

TEST_CASE("geometric sampler: degenerate and analytic means")
{
    RandomStream rng(1);
    SUBCASE("p = 1 always returns the support start")
    {
        for (int i = 0; i < 100; ++i)
            CHECK(sample_geometric(GeometricParam::stop_prob(1.0), rng) == 1);
    }
    SUBCASE("mean of Geom(0.085) within 1%")
    {
        const GeometricParam p = GeometricParam::stop_prob(0.085);
        double sum = 0.0;
        const int n = 1'000'000;
        for (int i = 0; i < n; ++i)
            sum += double(sample_geometric(p, rng));
        CHECK(sum / n == doctest::Approx(1.0 / 0.085).epsilon(0.01));
    }
    SUBCASE("continuation form: mean of Eq.4 with lambda = 0.32 within 1%")
    {
        const GeometricParam p = GeometricParam::continuation_prob(0.32);
        double sum = 0.0;
        const int n = 1'000'000;
        for (int i = 0; i < n; ++i)
            sum += double(sample_geometric(p, rng));
        CHECK(sum / n == doctest::Approx(1.0 / (1.0 - 0.32)).epsilon(0.01));
    }
    SUBCASE("invalid probability rejected")
    {
        CHECK_THROWS_AS(sample_geometric(GeometricParam::stop_prob(0.0), rng), data_error);
        CHECK_THROWS_AS(sample_geometric(GeometricParam::stop_prob(1.5), rng), data_error);
    }
}

TEST_CASE("geometric sampler passes a chi-square goodness-of-fit test")
{
    RandomStream rng(42);
    const GeometricParam p = GeometricParam::stop_prob(0.085);
    const int n = 1'000'000;
    const std::size_t bins = 120; // last bin collects the tail
    std::vector<double> counts(bins + 1, 0.0);
    for (int i = 0; i < n; ++i) {
        const std::uint64_t t = sample_geometric(p, rng);
        counts[std::min<std::uint64_t>(t - 1, bins)] += 1.0;
    }
    double stat = 0.0;
    double tail = 1.0;
    for (std::size_t b = 0; b < bins; ++b) {
        const double prob = geometric_pmf(p, b + 1);
        tail -= prob;
        const double expect = prob * n;
        stat += (counts[b] - expect) * (counts[b] - expect) / expect;
    }
    stat += (counts[bins] - tail * n) * (counts[bins] - tail * n) / (tail * n);
    CHECK(oracles::chi2_upper_tail(stat, double(bins)) > 0.01);
}

TEST_CASE("truncated geometric: exact pmf values and normalization")
{
    SUBCASE("p_c = 0.5, bound 2: Pr(0) = 2/3, Pr(1) = 1/3")
    {
        const TruncatedGeometricParam p{0.5, 2};
        CHECK(truncated_geometric_pmf(p, 0) == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
        CHECK(truncated_geometric_pmf(p, 1) == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
        CHECK(truncated_geometric_pmf(p, 2) == 0.0);
    }
    SUBCASE("pmf sums to one on the support")
    {
        const TruncatedGeometricParam p{0.02, 60};
        double sum = 0.0;
        for (std::uint32_t t = 0; t < p.bound; ++t)
            sum += truncated_geometric_pmf(p, t);
        CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
    }
    SUBCASE("p_c near 1 concentrates at zero")
    {
        RandomStream rng(7);
        const TruncatedGeometricParam p{0.999999, 60};
        for (int i = 0; i < 1000; ++i)
            CHECK(sample_truncated_geometric(p, rng) == 0);
    }
    SUBCASE("empirical pmf matches analytic, max abs error < 0.002")
    {
        RandomStream rng(3);
        const TruncatedGeometricParam p{0.02, 60};
        const int n = 1'000'000;
        std::vector<double> counts(p.bound, 0.0);
        for (int i = 0; i < n; ++i)
            counts[sample_truncated_geometric(p, rng)] += 1.0;
        double max_err = 0.0;
        for (std::uint32_t t = 0; t < p.bound; ++t)
            max_err = std::max(max_err,
                               std::abs(counts[t] / n - truncated_geometric_pmf(p, t)));
        CHECK(max_err < 0.002);
    }
    SUBCASE("zero bound rejected")
    {
        RandomStream rng(1);
        CHECK_THROWS_AS(sample_truncated_geometric({0.5, 0}, rng), data_error);
    }
}

TEST_CASE("bounded power law: support, CDF endpoints, Kolmogorov distance")
{
    const BoundedPowerLawParam p{2.963, 0.26, 1.0};
    SUBCASE("all draws inside [lower, upper]")
    {
        RandomStream rng(11);
        for (int i = 0; i < 10000; ++i) {
            const double x = sample_bounded_powerlaw(p, rng);
            CHECK(x >= p.lower);
            CHECK(x <= p.upper);
        }
    }
    SUBCASE("CDF endpoints")
    {
        CHECK(bounded_powerlaw_cdf(p, p.lower) == 0.0);
        CHECK(bounded_powerlaw_cdf(p, p.upper) == 1.0);
    }
    SUBCASE("empirical CDF vs analytic, Kolmogorov distance < 0.002")
    {
        RandomStream rng(13);
        const int n = 1'000'000;
        std::vector<double> draws(n);
        for (int i = 0; i < n; ++i)
            draws[i] = sample_bounded_powerlaw(p, rng);
        std::sort(draws.begin(), draws.end());
        double ks = 0.0;
        for (int i = 0; i < n; ++i) {
            const double cdf = bounded_powerlaw_cdf(p, draws[i]);
            ks = std::max(ks, std::abs(cdf - double(i) / n));
            ks = std::max(ks, std::abs(cdf - double(i + 1) / n));
        }
        CHECK(ks < 0.002);
    }
    SUBCASE("invalid bounds rejected")
    {
        RandomStream rng(1);
        CHECK_THROWS_AS(sample_bounded_powerlaw({2.0, 0.9, 0.5}, rng), data_error);
    }
    SUBCASE("pdf integrates to one (quadrature)")
    {
        const double total = oracles::integrate(
            [&](double x) { return bounded_powerlaw_pdf(p, x); }, p.lower, p.upper, 1e-13);
        CHECK(total == doctest::Approx(1.0).epsilon(1e-10));
    }
}

TEST_CASE("equilibrium probabilities (two-state chain)")
{
    SUBCASE("symmetry") { CHECK(equilibrium_probs(0.3, 0.3).second == doctest::Approx(0.5)); }
    SUBCASE("paper defaults")
    {
        const auto [pi0, pi1] = equilibrium_probs(0.085, 0.0048);
        CHECK(pi1 == doctest::Approx(0.05345).epsilon(1e-3));
        CHECK(pi0 + pi1 == doctest::Approx(1.0).epsilon(1e-12));
    }
    SUBCASE("never-activating limit")
    {
        const auto [pi0, pi1] = equilibrium_probs(1.0, 1e-9);
        (void)pi0;
        CHECK(pi1 < 1e-8);
    }
    SUBCASE("invalid rates rejected")
    {
        CHECK_THROWS_AS(equilibrium_probs(0.0, 0.0), data_error);
    }
}

TEST_CASE("mixed degree pmf: normalization, quadrature identity, monotone tail")
{
    const BoundedPowerLawParam p{2.963, 0.26, 1.0};
    SUBCASE("sums to 1 within 1e-6 over 1e6 terms")
    {
        double sum = 0.0;
        for (std::uint64_t d = 1; d <= 1'000'000; ++d)
            sum += mixed_degree_pmf(d, p);
        CHECK(std::abs(sum - 1.0) < 1e-6);
    }
    SUBCASE("equals the mixture integral to relative error < 1e-8")
    {
        for (std::uint64_t d : {1, 2, 3, 4, 5, 8, 13, 40, 100}) {
            const double direct = mixed_degree_pmf(d, p);
            const double quad = oracles::integrate(
                [&](double lam) {
                    return (1.0 - lam) * std::pow(lam, double(d) - 1.0) *
                           bounded_powerlaw_pdf(p, lam);
                },
                p.lower, p.upper, 1e-15);
            CHECK(std::abs(direct - quad) / quad < 1e-8);
        }
    }
    SUBCASE("decreasing for d >= 2")
    {
        for (std::uint64_t d = 2; d < 200; ++d)
            CHECK(mixed_degree_pmf(d, p) > mixed_degree_pmf(d + 1, p));
    }
    SUBCASE("removable singularity: d near exponent + 1")
    {
        // d - beta - 1 == 0 exactly when beta = d - 1.
        const BoundedPowerLawParam q{2.0, 0.26, 1.0};
        const double at = mixed_degree_pmf(3, q);
        const double quad = oracles::integrate(
            [&](double lam) {
                return (1.0 - lam) * lam * lam * bounded_powerlaw_pdf(q, lam);
            },
            q.lower, q.upper, 1e-15);
        CHECK(at == doctest::Approx(quad).epsilon(1e-9));
    }
    SUBCASE("d = 0 rejected") { CHECK_THROWS_AS(mixed_degree_pmf(0, p), data_error); }
}

TEST_CASE("monte-carlo two-stage degree draws match the mixed pmf")
{
    // Draw lambda from the power law, then the degree; per-bin error < 0.003
    // at 1e7 draws (the full 1e7 check lives in the acceptance suite).
    const BoundedPowerLawParam p{2.963, 0.26, 1.0};
    RandomStream rng(99);
    const int n = 1'000'000;
    std::vector<double> counts(64, 0.0);
    for (int i = 0; i < n; ++i) {
        const double lam = sample_bounded_powerlaw(p, rng);
        const std::uint64_t d = sample_geometric(GeometricParam::continuation_prob(lam), rng);
        if (d < counts.size())
            counts[d] += 1.0;
    }
    for (std::uint64_t d = 1; d < counts.size(); ++d)
        CHECK(std::abs(counts[d] / n - mixed_degree_pmf(d, p)) < 0.005);
}

TEST_CASE("identical seeds give identical streams")
{
    RandomStream a = RandomStream::derive(123, 0xA, 7);
    RandomStream b = RandomStream::derive(123, 0xA, 7);
    for (int i = 0; i < 1000; ++i)
        CHECK(a.next_u64() == b.next_u64());
    RandomStream c = RandomStream::derive(123, 0xA, 8);
    bool all_equal = true;
    RandomStream a2 = RandomStream::derive(123, 0xA, 7);
    for (int i = 0; i < 10; ++i)
        all_equal = all_equal && (a2.next_u64() == c.next_u64());
    CHECK(!all_equal);
}
