#include "spdt/fitting.hpp"

#include <algorithm>
#include <cmath>

#include "spdt/distributions.hpp"
#include "spdt/errors.hpp"
#include "spdt/random.hpp"

namespace spdt {

CompressedSamples compress_samples(const std::vector<std::int64_t> &samples)
{
    std::vector<std::int64_t> sorted(samples);
    std::sort(sorted.begin(), sorted.end());
    CompressedSamples out;
    for (std::size_t i = 0; i < sorted.size();) {
        std::size_t j = i;
        while (j < sorted.size() && sorted[j] == sorted[i])
            ++j;
        out.emplace_back(sorted[i], j - i);
        i = j;
    }
    return out;
}

double find_root(const std::function<double(double)> &f, double lo, double hi,
                 std::uint32_t *iterations, std::uint32_t max_iter)
{
    double flo = f(lo);
    double fhi = f(hi);
    if (flo == 0.0) return lo;
    if (fhi == 0.0) return hi;
    if ((flo > 0) == (fhi > 0))
        throw fit_error("no sign change in bracket [" + std::to_string(lo) + ", " +
                        std::to_string(hi) + "]: score " + std::to_string(flo) + " and " +
                        std::to_string(fhi));
    double x = lo;
    std::uint32_t it = 0;
    for (; it < max_iter; ++it) {
        // Secant proposal, clipped into the bracket; fall back to bisection.
        double mid = 0.5 * (lo + hi);
        double prop = mid;
        const double denom = fhi - flo;
        if (denom != 0.0) {
            const double secant = (lo * fhi - hi * flo) / denom;
            if (secant > lo && secant < hi)
                prop = 0.5 * (secant + mid); // damped secant keeps worst case O(bisection)
        }
        x = prop;
        const double fx = f(x);
        if (fx == 0.0)
            break;
        if ((fx > 0) == (flo > 0)) {
            lo = x;
            flo = fx;
        } else {
            hi = x;
            fhi = fx;
        }
        if (hi - lo <= 1e-15 * (std::abs(lo) + std::abs(hi)) + 1e-300)
            break;
    }
    if (iterations)
        *iterations = it;
    return 0.5 * (lo + hi);
}

// ----------------------------------------------------------- geometric --

double fit_geometric(const std::vector<std::int64_t> &samples)
{
    if (samples.empty())
        throw fit_error("geometric fit: empty sample set");
    long double sum = 0.0L;
    for (std::int64_t s : samples) {
        if (s < 1)
            throw data_error("geometric fit: sample " + std::to_string(s) + " below support");
        sum += (long double)s;
    }
    return (double)((long double)samples.size() / sum);
}

double fit_geometric_continuation(const std::vector<std::int64_t> &degrees)
{
    return 1.0 - fit_geometric(degrees);
}

double fit_activation_rate(const std::vector<std::int64_t> &freq_samples, double rho,
                           std::uint32_t steps_per_day)
{
    if (freq_samples.empty())
        throw fit_error("activation-rate fit: empty sample set");
    if (!(rho > 0.0) || rho > 1.0)
        throw data_error("activation-rate fit: rho must be in (0,1]");
    long double sum = 0.0L;
    for (std::int64_t h : freq_samples) {
        if (h < 0)
            throw data_error("activation-rate fit: negative frequency " + std::to_string(h));
        sum += (long double)h;
    }
    const double mean = (double)(sum / (long double)freq_samples.size());
    const double cap = steps_per_day * rho;
    if (mean == 0.0)
        throw fit_error("activation-rate fit: no activations in sample (mean h = 0)");
    if (!(cap > mean))
        throw fit_error("activation-rate fit infeasible: steps_per_day*rho = " +
                        std::to_string(cap) + " must exceed mean(h) = " + std::to_string(mean));
    const double q = rho * mean / (cap - mean);
    if (!(q < 1.0))
        throw fit_error("activation-rate fit: q = " + std::to_string(q) + " not below 1");
    return q;
}

// ------------------------------------------------- truncated geometric --

double truncated_geometric_score(double p_c, const CompressedSamples &delays,
                                 const CompressedSamples &bounds)
{
    const double l1mp = std::log1p(-p_c);
    // Per unique bound B: w = 1/(1-(1-p)^B) and dw/dp, count-weighted.
    // Suffix sums over bounds sorted ascending give the mixture restricted to
    // components whose support covers a given delay (B > t).
    const std::size_t nb = bounds.size();
    std::vector<double> sw(nb + 1, 0.0), sdw(nb + 1, 0.0);
    for (std::size_t i = nb; i-- > 0;) {
        const double B = (double)bounds[i].first;
        const double cnt = (double)bounds[i].second;
        const double om = -std::expm1(B * l1mp); // 1-(1-p)^B
        const double w = 1.0 / om;
        const double dw = -B * std::exp((B - 1.0) * l1mp) * w * w;
        sw[i] = sw[i + 1] + cnt * w;
        sdw[i] = sdw[i + 1] + cnt * dw;
    }
    double score = 0.0;
    std::size_t bi = 0;
    double n_used = 0.0;
    long double tsum = 0.0L;
    for (const auto &[t, cnt] : delays) {
        while (bi < nb && bounds[bi].first <= t)
            ++bi;
        if (bi == nb)
            continue; // no component covers this delay; sample carries no information
        n_used += (double)cnt;
        tsum += (long double)t * cnt;
        score += (double)cnt * sdw[bi] / sw[bi];
    }
    score += n_used / p_c - (double)tsum / (1.0 - p_c);
    return score;
}

double truncated_geometric_loglik(double p_c, const CompressedSamples &delays,
                                  const CompressedSamples &bounds)
{
    const double l1mp = std::log1p(-p_c);
    const std::size_t nb = bounds.size();
    double total_cnt = 0.0;
    std::vector<double> sw(nb + 1, 0.0);
    for (std::size_t i = nb; i-- > 0;) {
        const double B = (double)bounds[i].first;
        const double cnt = (double)bounds[i].second;
        sw[i] = sw[i + 1] + cnt / (-std::expm1(B * l1mp));
    }
    for (const auto &[b, c] : bounds)
        total_cnt += (double)c;
    double ll = 0.0;
    std::size_t bi = 0;
    for (const auto &[t, cnt] : delays) {
        while (bi < nb && bounds[bi].first <= t)
            ++bi;
        if (bi == nb)
            continue;
        ll += (double)cnt *
              (std::log(p_c) + (double)t * l1mp + std::log(sw[bi] / total_cnt));
    }
    return ll;
}

double fit_truncated_geometric(const std::vector<std::int64_t> &delay_samples,
                               const std::vector<std::int64_t> &active_period_samples,
                               std::uint32_t delta_steps, FitDiagnostic *diag,
                               std::uint64_t *dropped, std::size_t max_mixture,
                               std::uint64_t subsample_seed)
{
    if (delay_samples.empty())
        throw fit_error("link-delay fit: empty delay sample set");
    if (active_period_samples.empty())
        throw fit_error("link-delay fit: empty active-period sample set");
    for (std::int64_t t : delay_samples)
        if (t < 0)
            throw data_error("link-delay fit: negative delay " + std::to_string(t));

    // Subsample the active periods (the score averages over them); always
    // keep the maximum so every feasible delay stays covered.
    std::vector<std::int64_t> periods;
    if (active_period_samples.size() <= max_mixture) {
        periods = active_period_samples;
    } else {
        RandomStream rng(subsample_seed);
        periods.reserve(max_mixture);
        const std::int64_t maxp =
            *std::max_element(active_period_samples.begin(), active_period_samples.end());
        periods.push_back(maxp);
        for (std::size_t i = 1; i < max_mixture; ++i)
            periods.push_back(
                active_period_samples[rng.next_below(active_period_samples.size())]);
    }
    std::vector<std::int64_t> bounds(periods);
    for (auto &b : bounds) {
        if (b < 1)
            throw data_error("link-delay fit: active period " + std::to_string(b) +
                             " below support");
        b += delta_steps;
    }

    const CompressedSamples delays = compress_samples(delay_samples);
    const CompressedSamples cbounds = compress_samples(bounds);

    std::uint64_t covered = 0;
    {
        const std::int64_t maxb = cbounds.back().first;
        for (const auto &[t, c] : delays)
            if (t < maxb)
                covered += c;
    }
    if (dropped)
        *dropped = delay_samples.size() - covered;
    if (covered == 0)
        throw fit_error("link-delay fit: no delay lies inside any active-period bound");

    const double lo = 1e-6, hi = 1.0 - 1e-6;
    auto score = [&](double p) { return truncated_geometric_score(p, delays, cbounds); };
    std::uint32_t iters = 0;
    double root;
    bool boundary = false;
    const double s_lo = score(lo), s_hi = score(hi);
    if ((s_lo > 0) == (s_hi > 0)) {
        // No interior root; e.g. all delays zero push the optimum to the
        // upper boundary. Report the boundary value, flagged.
        root = (s_lo > 0) ? hi : lo;
        boundary = true;
    } else {
        root = find_root(score, lo, hi, &iters);
    }
    if (diag) {
        diag->log_likelihood = truncated_geometric_loglik(root, delays, cbounds);
        diag->iterations = iters;
        diag->boundary = boundary;
    }
    return root;
}

// ------------------------------------------------------- mixed degrees --

namespace {

// d/da of (1 - xi^a)/a, stable near a = 0.
double g_prime(double a, double L)
{
    if (std::abs(a) < 1e-5) {
        const double L2 = L * L;
        return -(L2 / 2.0 + a * L2 * L / 3.0 + a * a * L2 * L2 / 8.0);
    }
    const double x = a * L;
    return (std::expm1(x) - x * std::exp(x)) / (a * a);
}

// (1 - xi^a)/a via expm1; continuous at a = 0.
double g_val(double a, double L)
{
    if (a == 0.0)
        return -L;
    return -std::expm1(a * L) / a;
}

double term_T(double d, double beta, double L)
{
    const double a = d - beta - 1.0;
    return g_val(a, L) - g_val(a + 1.0, L);
}

// When a*L is large (small xi together with a large exponent during the
// alternating search), xi^a overflows. It cancels out of every ratio the
// scores need, so sample terms are evaluated with the factor removed:
//   T          = xi^a * Ts,              Ts = -1/a + xi/(a+1)
//   dT/dbeta   = xi^a * [xi (1-(a+1)L)/(a+1)^2 - (1-aL)/a^2]  (up to e^{-aL})
//   dT/dxi     = xi^a * (xi - 1)/xi
constexpr double kFactorThreshold = 600.0;

bool needs_factoring(double a, double L) { return a * L > kFactorThreshold; }

double scaled_T(double a, double xi) { return -1.0 / a + xi / (a + 1.0); }

} // namespace

double mixed_degree_loglik(double beta, double xi, const CompressedSamples &degrees)
{
    const double L = std::log(xi);
    double n = 0.0, ll = 0.0;
    for (const auto &[d, c] : degrees) {
        n += (double)c;
        const double a = (double)d - beta - 1.0;
        if (needs_factoring(a, L))
            ll += (double)c * (a * L + std::log(scaled_T(a, xi)));
        else
            ll += (double)c * std::log(term_T((double)d, beta, L));
    }
    // log(xi^-beta - 1) = -beta L + log(1 - xi^beta)
    ll += n * (std::log(beta) + beta * L - std::log1p(-std::exp(beta * L)));
    return ll;
}

double mixed_degree_beta_score(double beta, double xi, const CompressedSamples &degrees)
{
    const double L = std::log(xi);
    double n = 0.0, acc = 0.0;
    for (const auto &[d, c] : degrees) {
        const double a = (double)d - beta - 1.0;
        if (needs_factoring(a, L)) {
            const double num = xi * (1.0 - (a + 1.0) * L) / ((a + 1.0) * (a + 1.0)) -
                               (1.0 - a * L) / (a * a);
            acc += (double)c * num / scaled_T(a, xi);
        } else {
            const double T = g_val(a, L) - g_val(a + 1.0, L);
            acc += (double)c * (g_prime(a + 1.0, L) - g_prime(a, L)) / T;
        }
        n += (double)c;
    }
    // L xi^-beta / (xi^-beta - 1) = L / (1 - xi^beta)
    return n / beta + n * L / (-std::expm1(beta * L)) + acc;
}

double mixed_degree_xi_score(double xi, double beta, const CompressedSamples &degrees)
{
    const double L = std::log(xi);
    double n = 0.0, acc = 0.0;
    for (const auto &[d, c] : degrees) {
        const double a = (double)d - beta - 1.0;
        if (needs_factoring(a, L)) {
            acc += (double)c * ((xi - 1.0) / xi) / scaled_T(a, xi);
        } else {
            const double T = g_val(a, L) - g_val(a + 1.0, L);
            // dT/dxi = xi^(d-beta-2) (xi - 1)
            acc += (double)c * std::exp((a - 1.0) * L) * (xi - 1.0) / T;
        }
        n += (double)c;
    }
    // beta xi^(-beta-1) / (xi^-beta - 1) = beta / (xi (1 - xi^beta))
    return n * beta / (xi * (-std::expm1(beta * L))) + acc;
}

double mixed_degree_psi_score(double psi, double beta, double xi,
                              const CompressedSamples &degrees)
{
    const double Lxi = std::log(xi), Lpsi = std::log(psi);
    double n = 0.0, acc = 0.0;
    for (const auto &[d, c] : degrees) {
        const double a = (double)d - beta - 1.0;
        const double T = detail::powdiff_over_a(a, Lxi, Lpsi) -
                         detail::powdiff_over_a(a + 1.0, Lxi, Lpsi);
        // dT/dpsi = psi^(d-beta-2) (1 - psi)
        acc += (double)c * std::exp((a - 1.0) * Lpsi) * (1.0 - psi) / T;
        n += (double)c;
    }
    const double norm = std::pow(xi, -beta) - std::pow(psi, -beta);
    return -n * beta * std::pow(psi, -beta - 1.0) / norm + acc;
}

MixedDegreeFit fit_mixed_degree(const std::vector<std::int64_t> &degrees)
{
    if (degrees.empty())
        throw fit_error("degree fit: empty sample set");
    bool any_tail = false;
    for (std::int64_t d : degrees) {
        if (d < 1)
            throw data_error("degree fit: sample " + std::to_string(d) + " below support");
        if (d > 1)
            any_tail = true;
    }
    if (!any_tail)
        throw fit_error("degree fit: all degrees equal 1, exponent diverges (no tail information)");

    const CompressedSamples comp = compress_samples(degrees);
    const double xi_lo = 1e-6, xi_hi = 1.0 - 1e-9;
    const double beta_lo = 1e-3, beta_hi = 200.0;

    MixedDegreeFit fit;
    double beta = 2.5, xi = 0.5;
    std::uint32_t total_iters = 0;
    bool converged = false;
    for (std::uint32_t round = 0; round < 100; ++round) {
        std::uint32_t it1 = 0, it2 = 0;
        double xi_new;
        try {
            xi_new = find_root([&](double x) { return mixed_degree_xi_score(x, beta, comp); },
                               xi_lo, xi_hi, &it1);
        } catch (const fit_error &e) {
            throw fit_error(std::string("degree fit (xi): ") + e.what() + " at beta=" +
                            std::to_string(beta));
        }
        double beta_new;
        try {
            beta_new = find_root(
                [&](double b) { return mixed_degree_beta_score(b, xi_new, comp); }, beta_lo,
                beta_hi, &it2);
        } catch (const fit_error &e) {
            throw fit_error(std::string("degree fit (beta): ") + e.what() + " at xi=" +
                            std::to_string(xi_new));
        }
        total_iters += it1 + it2;
        if (round == 0) {
            fit.xi_one_step = xi_new;
            fit.beta_one_step = beta_new;
        }
        const double change = std::abs(beta_new - beta) + std::abs(xi_new - xi);
        beta = beta_new;
        xi = xi_new;
        if (change < 1e-4) {
            converged = true;
            fit.diag.iterations = round + 1;
            break;
        }
    }
    if (converged) {
        // Polish: keep alternating until the pair zeroes both score
        // equations jointly, not just each against the other's last value.
        const double n = (double)degrees.size();
        for (std::uint32_t extra = 0; extra < 100; ++extra) {
            const double sb = mixed_degree_beta_score(beta, xi, comp);
            const double sx = mixed_degree_xi_score(xi, beta, comp);
            if (std::abs(sb) < 1e-7 * n && std::abs(sx) < 1e-7 * n)
                break;
            xi = find_root([&](double x) { return mixed_degree_xi_score(x, beta, comp); },
                           xi_lo, xi_hi);
            beta = find_root([&](double b) { return mixed_degree_beta_score(b, xi, comp); },
                             beta_lo, beta_hi);
        }
    }
    if (!converged) {
        const double rb = mixed_degree_beta_score(beta, xi, comp);
        const double rx = mixed_degree_xi_score(xi, beta, comp);
        throw degree_fit_error("degree fit: no convergence after 100 rounds; last beta=" +
                                   std::to_string(beta) + " xi=" + std::to_string(xi) +
                                   " residuals beta=" + std::to_string(rb) + " xi=" +
                                   std::to_string(rx),
                               beta, xi, rb, rx);
    }
    (void)total_iters;
    fit.beta = beta;
    fit.xi = xi;
    fit.diag.log_likelihood = mixed_degree_loglik(beta, xi, comp);
    return fit;
}

// -------------------------------------------------------------- fit_all --

FittedParams fit_all(const CipSamples &samples, const TimeGrid &grid, std::uint32_t delta_steps)
{
    FittedParams out;
    if (samples.active_periods.empty())
        throw fit_error("active_periods: empty sample set");
    if (samples.activation_freqs.empty())
        throw fit_error("activation_freqs: empty sample set");
    if (samples.degrees.empty())
        throw fit_error("degrees: empty sample set");
    if (samples.link_delays.empty())
        throw fit_error("link_delays: empty sample set");
    if (samples.link_durations.empty())
        throw fit_error("link_durations: empty sample set");

    try {
        out.rho = fit_geometric(samples.active_periods);
        double ll = 0.0;
        for (std::int64_t s : samples.active_periods)
            ll += std::log(geometric_pmf(GeometricParam::stop_prob(out.rho), (std::uint64_t)s));
        out.rho_diag = {ll, 1};
    } catch (const fit_error &e) {
        throw fit_error(std::string("rho: ") + e.what());
    }

    try {
        out.q = fit_activation_rate(samples.activation_freqs, out.rho, grid.steps_per_day());
        const double mean_rate = grid.steps_per_day() * out.rho * out.q / (out.q + out.rho);
        double ll = 0.0;
        for (std::int64_t h : samples.activation_freqs)
            ll += std::log(poisson_pmf(mean_rate, (std::uint64_t)h));
        out.q_diag = {ll, 1};
    } catch (const fit_error &e) {
        throw fit_error(std::string("q: ") + e.what());
    }

    try {
        out.lambda = fit_geometric_continuation(samples.degrees);
        double ll = 0.0;
        for (std::int64_t d : samples.degrees)
            ll += std::log(
                geometric_pmf(GeometricParam::continuation_prob(out.lambda), (std::uint64_t)d));
        out.lambda_diag = {ll, 1};
    } catch (const fit_error &e) {
        throw fit_error(std::string("lambda: ") + e.what());
    }

    try {
        MixedDegreeFit mfit = fit_mixed_degree(samples.degrees);
        out.beta = mfit.beta;
        out.xi = mfit.xi;
        out.beta_one_step = mfit.beta_one_step;
        out.xi_one_step = mfit.xi_one_step;
        out.degree_diag = mfit.diag;
    } catch (const fit_error &e) {
        throw fit_error(std::string("beta/xi: ") + e.what());
    }

    try {
        out.p_c = fit_truncated_geometric(samples.link_delays, samples.active_periods,
                                          delta_steps, &out.p_c_diag, &out.p_c_dropped_samples);
    } catch (const fit_error &e) {
        throw fit_error(std::string("p_c: ") + e.what());
    }

    out.p_b = out.rho; // both probabilities model how long nodes stay at a location
    return out;
}

} // namespace spdt
