#include <doctest.h>

#include <cmath>
#include <map>
#include <tuple>

#include "oracles.hpp"
#include "spdt/analysis.hpp"
#include "spdt/distributions.hpp"
#include "spdt/errors.hpp"
#include "spdt/generator.hpp"
#include "spdt/random.hpp"

using namespace spdt;

namespace {

// Day-stamped toy network builder: each (host, neighbour, day) becomes one
// link placed inside that day.
ContactNetwork day_network(std::uint32_t n_nodes, std::uint32_t days,
                           const std::vector<std::tuple<NodeId, NodeId, std::uint32_t>> &edges)
{
    const TimeGrid grid = TimeGrid::from_days(300, days);
    std::vector<ActiveCopy> copies;
    std::vector<ContactLink> links;
    // One copy per (host, day) carrying that day's links.
    std::map<std::pair<NodeId, std::uint32_t>, std::vector<NodeId>> by_host_day;
    for (const auto &[u, v, d] : edges)
        by_host_day[{u, d}].push_back(v);
    for (const auto &[key, nbs] : by_host_day) {
        const auto [host, day] = key;
        const std::uint32_t start = day * grid.steps_per_day() + 10;
        copies.push_back({host, start, start + 6, 0, 0});
        std::uint32_t slot = 0;
        for (NodeId nb : nbs) {
            links.push_back({host, start, start + 6, nb, start + 1 + slot, start + 4 + slot});
            ++slot;
        }
    }
    return assemble_network(grid, n_nodes, 0, std::move(copies), std::move(links));
}

} // namespace

TEST_CASE("histograms and RSE")
{
    SUBCASE("proportions sum to one")
    {
        const std::vector<std::int64_t> v{0, 1, 1, 2, 5};
        const Histogram h = histogram_integers(v);
        double sum = 0.0;
        for (double p : h.proportions)
            sum += p;
        CHECK(std::abs(sum - 1.0) < 1e-9);
        CHECK(h.proportions[1] == doctest::Approx(0.4));
    }
    SUBCASE("identical histograms give zero and rse is symmetric")
    {
        const std::vector<std::int64_t> v{1, 2, 2, 3, 7, 7, 7};
        const Histogram h = histogram_integers(v);
        CHECK(rse(h, h) == 0.0);
        const std::vector<std::int64_t> w{1, 1, 4};
        const Histogram h2 = histogram_integers(w);
        // Symmetry when the supports match: pad the shorter. Here compare on
        // equal length by construction.
        Histogram a = h, b = h2;
        b.proportions.resize(a.proportions.size(), 0.0);
        CHECK(rse(a, b) == doctest::Approx(rse(b, a)));
    }
    SUBCASE("direct two-bin evaluation")
    {
        Histogram x, y;
        x.proportions = {0.6, 0.4};
        y.proportions = {0.5, 0.5};
        CHECK(rse(x, y) == doctest::Approx(std::sqrt(0.02)));
    }
    SUBCASE("binning mismatch is an error")
    {
        Histogram x, y;
        x.proportions = {1.0};
        y.proportions = {1.0};
        y.bin_width = 0.01;
        CHECK_THROWS_AS(rse(x, y), data_error);
    }
    SUBCASE("two independent geometric samples are close")
    {
        RandomStream rng(3);
        std::vector<std::int64_t> a(1'000'000), b(1'000'000);
        for (auto &v : a)
            v = (std::int64_t)sample_geometric(GeometricParam::stop_prob(0.085), rng);
        for (auto &v : b)
            v = (std::int64_t)sample_geometric(GeometricParam::stop_prob(0.085), rng);
        Histogram ha = histogram_integers(a);
        Histogram hb = histogram_integers(b);
        const std::size_t bins = std::max(ha.proportions.size(), hb.proportions.size());
        ha.proportions.resize(bins, 0.0);
        hb.proportions.resize(bins, 0.0);
        CHECK(rse(ha, hb) < 0.01);
    }
}

TEST_CASE("CIP collection on a hand-built network")
{
    const TimeGrid grid = TimeGrid::from_days(300, 2);
    std::vector<ActiveCopy> copies{
        {0, 0, 10, 0, 0},   // initial-state copy, not an activation event
        {0, 30, 40, 0, 0},  // day-0 activation
        {0, 300, 310, 0, 0} // day-1 activation
    };
    std::vector<ContactLink> links{
        {0, 30, 40, 1, 32, 35},
        {0, 30, 40, 2, 41, 50},
    };
    const ContactNetwork net =
        assemble_network(grid, 3, 36, std::move(copies), std::move(links));
    const CipData cip = collect_cip(net);

    CHECK(cip.active_periods == std::vector<std::int64_t>{10, 10, 10});
    CHECK(cip.waiting_periods == std::vector<std::int64_t>{20, 260});
    // Node 0: day 0 has one counted activation (the 30-step copy; the step-0
    // copy reflects the initial state), day 1 has one. Nodes 1, 2: zeros.
    std::vector<std::int64_t> expect_h{1, 1, 0, 0, 0, 0};
    CHECK(cip.activation_freqs == expect_h);
    CHECK(cip.degrees == std::vector<std::int64_t>{0, 2, 0});
    CHECK(cip.link_delays == std::vector<std::int64_t>{2, 11});
    CHECK(cip.link_durations == std::vector<std::int64_t>{3, 9});
}

TEST_CASE("single copy per node leaves the waiting histogram empty")
{
    const TimeGrid grid = TimeGrid::from_days(300, 1);
    std::vector<ActiveCopy> copies{{0, 5, 15, 0, 0}, {1, 7, 9, 0, 0}};
    const ContactNetwork net = assemble_network(grid, 2, 36, std::move(copies), {});
    const CipData cip = collect_cip(net);
    CHECK(cip.waiting_periods.empty());
}

TEST_CASE("static metrics on canonical graphs")
{
    SUBCASE("triangle graph: all clustering coefficients 1")
    {
        const ContactNetwork net =
            day_network(3, 1, {{0, 1, 0}, {1, 2, 0}, {2, 0, 0}});
        const StaticMetrics m = static_metrics(net);
        for (double c : m.clustering)
            CHECK(c == doctest::Approx(1.0));
        CHECK(m.mean_clustering == doctest::Approx(1.0));
    }
    SUBCASE("star graph: hub and leaves all zero")
    {
        std::vector<std::tuple<NodeId, NodeId, std::uint32_t>> edges;
        for (NodeId leaf = 1; leaf <= 5; ++leaf)
            edges.push_back({0, leaf, 0});
        const ContactNetwork net = day_network(6, 1, edges);
        const StaticMetrics m = static_metrics(net);
        for (double c : m.clustering)
            CHECK(c == 0.0);
        CHECK(m.out_degree[0] == 5);
        CHECK(m.in_degree[1] == 1);
    }
    SUBCASE("undirected collapse has at most twice the directed edges")
    {
        ModelParams p;
        p.n_nodes = 500;
        p.grid = TimeGrid::from_days(300, 3);
        p.master_seed = 31;
        p.degree = DegreeModel::heterogeneous(2.963, 0.26);
        const ContactNetwork net = generate_network(p);
        const StaticMetrics m = static_metrics(net, false);
        CHECK(m.undirected_edges <= 2 * m.directed_edges);
        CHECK(m.undirected_edges >= m.directed_edges / 2);
    }
    SUBCASE("daily averages")
    {
        const ContactNetwork net =
            day_network(4, 2, {{0, 1, 0}, {0, 2, 0}, {1, 2, 0}, {2, 3, 1}});
        const StaticMetrics m = static_metrics(net);
        REQUIRE(m.daily_avg_out_degree.size() == 2);
        CHECK(m.daily_avg_out_degree[0] == doctest::Approx(3.0 / 4.0));
        CHECK(m.daily_avg_out_degree[1] == doctest::Approx(1.0 / 4.0));
    }
}

TEST_CASE("temporal metrics: chained example")
{
    // a -> b on day 1, b -> c on day 2: one shortest a->c path through b.
    const ContactNetwork net = day_network(3, 3, {{0, 1, 1}, {1, 2, 2}});
    const DayAggregatedGraph g = day_aggregate(net);
    const TemporalMetrics t = temporal_metrics(g, 5);
    CHECK(t.betweenness[1] == 1.0);
    CHECK(t.betweenness[0] == 0.0);
    // closeness: b reachable from a at dist 1; c from b at 1 and from a at 2.
    CHECK(t.closeness[1] == doctest::Approx(1.0));
    CHECK(t.closeness[2] == doctest::Approx(1.0 + 0.5));
}

TEST_CASE("temporal metrics: gap rules")
{
    SUBCASE("a gap of six days breaks the path")
    {
        const ContactNetwork net = day_network(3, 8, {{0, 1, 0}, {1, 2, 6}});
        const TemporalMetrics t = temporal_metrics(day_aggregate(net), 5, {}, true);
        CHECK(t.betweenness[1] == 0.0);
        // a cannot reach c two-hop; c is still reached from b directly.
        CHECK(t.distances[0][2] == 0);
        CHECK(t.closeness[2] == doctest::Approx(1.0));
    }
    SUBCASE("a gap of exactly five days is allowed")
    {
        const ContactNetwork net = day_network(3, 8, {{0, 1, 0}, {1, 2, 5}});
        const TemporalMetrics t = temporal_metrics(day_aggregate(net), 5);
        CHECK(t.betweenness[1] == 1.0);
    }
    SUBCASE("same-day consecutive hops are invalid")
    {
        const ContactNetwork net = day_network(3, 3, {{0, 1, 1}, {1, 2, 1}});
        const TemporalMetrics t = temporal_metrics(day_aggregate(net), 5);
        CHECK(t.betweenness[1] == 0.0);
        CHECK(t.closeness[2] == doctest::Approx(1.0)); // only b -> c direct
    }
}

TEST_CASE("temporal metrics match exhaustive enumeration on random instances")
{
    RandomStream rng(71);
    for (int instance = 0; instance < 25; ++instance) {
        const std::uint32_t n = 8, days = 6;
        std::vector<std::tuple<NodeId, NodeId, std::uint32_t>> edges;
        for (NodeId u = 0; u < n; ++u)
            for (NodeId v = 0; v < n; ++v) {
                if (u == v)
                    continue;
                for (std::uint32_t d = 0; d < days; ++d)
                    if (rng.next_double() < 0.06)
                        edges.push_back({u, v, d});
            }
        if (edges.empty())
            continue;
        const ContactNetwork net = day_network(n, days, edges);
        const DayAggregatedGraph g = day_aggregate(net);
        const TemporalMetrics t = temporal_metrics(g, 5, {}, true);
        const oracles::TemporalOracle o = oracles::enumerate_temporal(g, 5);
        for (NodeId v = 0; v < n; ++v) {
            CHECK(t.betweenness[v] == o.betweenness[v]);
            CHECK(t.closeness[v] == o.closeness[v]);
        }
        REQUIRE(t.distances.size() == n);
        for (NodeId u = 0; u < n; ++u)
            for (NodeId v = 0; v < n; ++v)
                CHECK(t.distances[u][v] == o.distances[u][v]);
    }
}

TEST_CASE("temporal distance properties on a generated network")
{
    ModelParams p;
    p.n_nodes = 300;
    p.grid = TimeGrid::from_days(300, 6);
    p.master_seed = 77;
    p.degree = DegreeModel::heterogeneous(2.963, 0.26);
    const ContactNetwork net = generate_network(p);
    const DayAggregatedGraph g = day_aggregate(net);
    const TemporalMetrics t = temporal_metrics(g, 5, {}, true);
    for (NodeId u = 0; u < p.n_nodes; ++u) {
        CHECK(t.distances[u][u] == 0);
        // Degree-0 nodes have zero betweenness.
        if (g.out_edges[u].empty()) {
            bool any_in = false;
            for (NodeId w = 0; w < p.n_nodes; ++w)
                for (const auto &[d, nb] : g.out_edges[w])
                    any_in = any_in || nb == u;
            if (!any_in)
                CHECK(t.betweenness[u] == 0.0);
        }
    }
    CHECK_THROWS_AS(temporal_metrics(DayAggregatedGraph{10, 1, {}}, 5), data_error);
}
