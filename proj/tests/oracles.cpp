#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

namespace oracles {

namespace {

double simpson(const std::function<double(double)> &f, double a, double b, double fa, double fm,
               double fb, double whole, double tol, int depth)
{
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    const double flm = f(lm), frm = f(rm);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    if (depth <= 0 || std::abs(left + right - whole) <= 15.0 * tol)
        return left + right + (left + right - whole) / 15.0;
    return simpson(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1) +
           simpson(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1);
}

} // namespace

double integrate(const std::function<double(double)> &f, double a, double b, double tol)
{
    if (a == b)
        return 0.0;
    const double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
    const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    return simpson(f, a, b, fa, fm, fb, whole, tol, 48);
}

// Regularized upper incomplete gamma Q(s, x) via series / continued fraction.
static double gamma_q(double s, double x)
{
    if (x < 0.0 || s <= 0.0)
        throw std::invalid_argument("gamma_q domain");
    if (x == 0.0)
        return 1.0;
    if (x < s + 1.0) {
        // P(s,x) series, Q = 1 - P.
        double term = 1.0 / s;
        double sum = term;
        for (int n = 1; n < 500; ++n) {
            term *= x / (s + n);
            sum += term;
            if (term < sum * 1e-16)
                break;
        }
        const double p = sum * std::exp(-x + s * std::log(x) - std::lgamma(s));
        return 1.0 - p;
    }
    // Continued fraction for Q.
    double b = x + 1.0 - s;
    double c = 1e300;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i < 500; ++i) {
        const double an = -double(i) * (double(i) - s);
        b += 2.0;
        d = an * d + b;
        if (std::abs(d) < 1e-300)
            d = 1e-300;
        c = b + an / c;
        if (std::abs(c) < 1e-300)
            c = 1e-300;
        d = 1.0 / d;
        const double delta = d * c;
        h *= delta;
        if (std::abs(delta - 1.0) < 1e-16)
            break;
    }
    return std::exp(-x + s * std::log(x) - std::lgamma(s)) * h;
}

double chi2_upper_tail(double statistic, double dof)
{
    return gamma_q(dof / 2.0, statistic / 2.0);
}

double exposure_by_quadrature(double host_arrive, double host_leave, double join, double leave,
                              double g, double p, double V, double r)
{
    auto concentration = [&](double t) {
        if (t <= host_arrive)
            return 0.0;
        if (t <= host_leave)
            return g / (r * V) * (1.0 - std::exp(-r * (t - host_arrive)));
        const double at_leave = g / (r * V) * (1.0 - std::exp(-r * (host_leave - host_arrive)));
        return at_leave * std::exp(-r * (t - host_leave));
    };
    // Split at the host departure; each piece is smooth and monotone, so the
    // tolerance can be scaled by the piece's peak value.
    const double split = std::min(std::max(join, host_leave), leave);
    double total = 0.0;
    if (join < split) {
        const double tol = 1e-11 * concentration(split) * (split - join) + 1e-300;
        total += integrate(concentration, join, split, tol);
    }
    if (split < leave) {
        const double tol = 1e-11 * concentration(split) * (leave - split) + 1e-300;
        total += integrate(concentration, split, leave, tol);
    }
    return p * total;
}

std::vector<double> chain_window_activation_pmf(double leave_prob, double arrive_prob,
                                                std::uint32_t steps, std::size_t max_count)
{
    const double pi1 = arrive_prob / (arrive_prob + leave_prob);
    // dp[state][count]
    std::vector<std::vector<double>> dp(2, std::vector<double>(max_count + 1, 0.0));
    dp[0][0] = 1.0 - pi1;
    dp[1][0] = pi1;
    for (std::uint32_t s = 0; s < steps; ++s) {
        std::vector<std::vector<double>> nd(2, std::vector<double>(max_count + 1, 0.0));
        for (std::size_t c = 0; c <= max_count; ++c) {
            nd[0][c] += dp[0][c] * (1.0 - arrive_prob);
            if (c + 1 <= max_count)
                nd[1][c + 1] += dp[0][c] * arrive_prob;
            nd[1][c] += dp[1][c] * (1.0 - leave_prob);
            nd[0][c] += dp[1][c] * leave_prob;
        }
        dp = std::move(nd);
    }
    std::vector<double> pmf(max_count + 1, 0.0);
    for (std::size_t c = 0; c <= max_count; ++c)
        pmf[c] = dp[0][c] + dp[1][c];
    return pmf;
}

TemporalOracle enumerate_temporal(const spdt::DayAggregatedGraph &graph,
                                  std::uint32_t max_gap_days)
{
    const std::uint32_t n = graph.n_nodes;
    TemporalOracle out;
    out.betweenness.assign(n, 0.0);
    out.closeness.assign(n, 0.0);
    out.distances.assign(n, std::vector<std::uint32_t>(n, 0));

    // Simple time-respecting paths via depth-first search with a visited set.
    for (spdt::NodeId source = 0; source < n; ++source) {
        std::vector<std::uint32_t> best(n, 0xffffffffu);
        std::vector<std::set<std::vector<spdt::NodeId>>> best_paths(n);

        std::vector<spdt::NodeId> path{source};
        std::vector<char> visited(n, 0);
        visited[source] = 1;

        std::function<void(spdt::NodeId, std::uint32_t, bool)> dfs =
            [&](spdt::NodeId at, std::uint32_t arrived_day, bool first) {
                for (const auto &[day, nb] : graph.out_edges[at]) {
                    if (!first) {
                        if (day <= arrived_day || day - arrived_day > max_gap_days)
                            continue;
                    }
                    if (visited[nb])
                        continue;
                    path.push_back(nb);
                    const auto len = (std::uint32_t)(path.size() - 1);
                    if (len < best[nb]) {
                        best[nb] = len;
                        best_paths[nb].clear();
                        best_paths[nb].insert(path);
                    } else if (len == best[nb]) {
                        best_paths[nb].insert(path);
                    }
                    if (len < 0xffffffffu) {
                        visited[nb] = 1;
                        dfs(nb, day, false);
                        visited[nb] = 0;
                    }
                    path.pop_back();
                }
            };
        dfs(source, 0, true);

        for (spdt::NodeId v = 0; v < n; ++v) {
            if (v == source || best[v] == 0xffffffffu)
                continue;
            out.distances[source][v] = best[v];
            out.closeness[v] += 1.0 / double(best[v]);
            for (const auto &p : best_paths[v])
                for (std::size_t i = 1; i + 1 < p.size(); ++i)
                    out.betweenness[p[i]] += 1.0;
        }
    }
    return out;
}

double pearson(const std::vector<double> &x, const std::vector<double> &y)
{
    const std::size_t n = x.size();
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < n; ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxy = 0, sxx = 0, syy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        sxy += (x[i] - mx) * (y[i] - my);
        sxx += (x[i] - mx) * (x[i] - mx);
        syy += (y[i] - my) * (y[i] - my);
    }
    return sxy / std::sqrt(sxx * syy);
}

} // namespace oracles
