#include "spdt/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_set>

#include "spdt/errors.hpp"

namespace spdt {

Histogram histogram_integers(std::span<const std::int64_t> values)
{
    Histogram h;
    h.bin_width = 1.0;
    if (values.empty())
        return h;
    std::int64_t maxv = 0;
    for (std::int64_t v : values) {
        if (v < 0)
            throw data_error("histogram value below zero: " + std::to_string(v));
        maxv = std::max(maxv, v);
    }
    std::vector<std::uint64_t> counts((std::size_t)maxv + 1, 0);
    for (std::int64_t v : values)
        ++counts[(std::size_t)v];
    h.proportions.resize(counts.size());
    const double n = double(values.size());
    for (std::size_t i = 0; i < counts.size(); ++i)
        h.proportions[i] = counts[i] / n;
    return h;
}

Histogram histogram_real(std::span<const double> values, double bin_width)
{
    Histogram h;
    h.bin_width = bin_width;
    if (values.empty())
        return h;
    std::size_t maxbin = 0;
    for (double v : values) {
        if (v < 0.0)
            throw data_error("histogram value below zero");
        maxbin = std::max(maxbin, (std::size_t)std::floor(v / bin_width));
    }
    std::vector<std::uint64_t> counts(maxbin + 1, 0);
    for (double v : values)
        ++counts[(std::size_t)std::floor(v / bin_width)];
    h.proportions.resize(counts.size());
    for (std::size_t i = 0; i < counts.size(); ++i)
        h.proportions[i] = counts[i] / double(values.size());
    return h;
}

Histogram histogram_from_pmf(const std::function<double(std::uint64_t)> &pmf, std::size_t bins)
{
    Histogram h;
    h.bin_width = 1.0;
    h.proportions.resize(bins);
    for (std::size_t i = 0; i < bins; ++i)
        h.proportions[i] = pmf(i);
    return h;
}

double rse(const Histogram &observed, const Histogram &reference)
{
    if (observed.bin_width != reference.bin_width)
        throw data_error("RSE binning mismatch: widths " + std::to_string(observed.bin_width) +
                         " vs " + std::to_string(reference.bin_width));
    double sum = 0.0;
    for (std::size_t i = 0; i < observed.proportions.size(); ++i) {
        const double d = observed.proportions[i] - reference.proportion(i);
        sum += d * d;
    }
    return std::sqrt(sum);
}

// ----------------------------------------------------------------- CIP --

CipData collect_cip(const ContactNetwork &net)
{
    CipData cip;
    const std::uint32_t spd = net.grid.steps_per_day();
    const std::uint32_t days = net.grid.horizon_days();
    std::vector<std::int64_t> day_counts(days, 0);

    for (NodeId node = 0; node < net.n_nodes; ++node) {
        std::fill(day_counts.begin(), day_counts.end(), 0);
        const std::uint32_t begin = net.copy_offset[node], end = net.copy_offset[node + 1];
        for (std::uint32_t ci = begin; ci < end; ++ci) {
            const ActiveCopy &c = net.copies[ci];
            cip.active_periods.push_back(c.duration());
            if (ci > begin)
                cip.waiting_periods.push_back(std::int64_t(c.start_step) -
                                              net.copies[ci - 1].end_step);
            if (c.start_step > 0)
                ++day_counts[c.start_step / spd];
            cip.degrees.push_back(c.link_count);
            for (std::uint32_t li = c.first_link; li < c.first_link + c.link_count; ++li) {
                cip.link_delays.push_back(std::int64_t(net.links[li].join_step) - c.start_step);
                cip.link_durations.push_back(std::int64_t(net.links[li].leave_step) -
                                             net.links[li].join_step);
            }
        }
        for (std::uint32_t d = 0; d < days; ++d)
            cip.activation_freqs.push_back(day_counts[d]);
    }
    return cip;
}

CipHistograms cip_histograms(const ContactNetwork &net)
{
    const CipData cip = collect_cip(net);
    CipHistograms h;
    h.active_period = histogram_integers(cip.active_periods);
    h.waiting_period = histogram_integers(cip.waiting_periods);
    h.activation_freq = histogram_integers(cip.activation_freqs);
    h.degree = histogram_integers(cip.degrees);
    h.link_delay = histogram_integers(cip.link_delays);
    h.link_duration = histogram_integers(cip.link_durations);
    return h;
}

// -------------------------------------------------------------- static --

namespace {

// Sorted adjacency collapse of the link set; directed edges deduplicated.
struct Collapse {
    std::vector<std::vector<NodeId>> out;
    std::vector<std::vector<NodeId>> in;
    std::uint64_t directed_edges = 0;
};

Collapse collapse_window(const ContactNetwork &net)
{
    Collapse c;
    c.out.resize(net.n_nodes);
    c.in.resize(net.n_nodes);
    for (const ContactLink &l : net.links)
        c.out[l.host].push_back(l.neighbour);
    for (auto &adj : c.out) {
        std::sort(adj.begin(), adj.end());
        adj.erase(std::unique(adj.begin(), adj.end()), adj.end());
    }
    for (NodeId u = 0; u < net.n_nodes; ++u) {
        c.directed_edges += c.out[u].size();
        for (NodeId v : c.out[u])
            c.in[v].push_back(u);
    }
    return c;
}

// Local clustering on sorted undirected adjacency.
std::vector<double> local_clustering(const std::vector<std::vector<NodeId>> &adj)
{
    const std::size_t n = adj.size();
    std::vector<double> cc(n, 0.0);
    std::vector<std::uint8_t> mark(n, 0);
    for (std::size_t v = 0; v < n; ++v) {
        const auto &nv = adj[v];
        if (nv.size() < 2)
            continue;
        for (NodeId a : nv)
            mark[a] = 1;
        std::uint64_t wedges = 0;
        for (NodeId a : nv)
            for (NodeId b : adj[a])
                if (mark[b] && b != (NodeId)v)
                    ++wedges; // each triangle edge counted twice
        for (NodeId a : nv)
            mark[a] = 0;
        const double k = double(nv.size());
        cc[v] = double(wedges) / (k * (k - 1.0));
    }
    return cc;
}

std::vector<std::vector<NodeId>> undirect(const Collapse &c)
{
    std::vector<std::vector<NodeId>> adj(c.out.size());
    for (NodeId u = 0; u < c.out.size(); ++u)
        for (NodeId v : c.out[u]) {
            adj[u].push_back(v);
            adj[v].push_back(u);
        }
    for (auto &a : adj) {
        std::sort(a.begin(), a.end());
        a.erase(std::unique(a.begin(), a.end()), a.end());
    }
    return adj;
}

} // namespace

StaticMetrics static_metrics(const ContactNetwork &net, bool daily)
{
    StaticMetrics m;
    const Collapse window = collapse_window(net);
    m.out_degree.resize(net.n_nodes);
    m.in_degree.resize(net.n_nodes);
    for (NodeId u = 0; u < net.n_nodes; ++u) {
        m.out_degree[u] = (std::uint32_t)window.out[u].size();
        m.in_degree[u] = (std::uint32_t)window.in[u].size();
    }
    m.directed_edges = window.directed_edges;
    const auto undirected = undirect(window);
    for (const auto &a : undirected)
        m.undirected_edges += a.size();
    m.undirected_edges /= 2;
    m.clustering = local_clustering(undirected);
    double sum = 0.0;
    for (double v : m.clustering)
        sum += v;
    m.mean_clustering = net.n_nodes ? sum / net.n_nodes : 0.0;

    if (daily) {
        const std::uint32_t days = net.grid.horizon_days();
        m.daily_avg_out_degree.assign(days, 0.0);
        m.daily_avg_clustering.assign(days, 0.0);
        // Links grouped by the day of the neighbour's arrival.
        std::vector<std::vector<std::pair<NodeId, NodeId>>> per_day(days);
        for (const ContactLink &l : net.links) {
            const std::uint32_t d = net.grid.day_of_step(l.join_step);
            if (d < days)
                per_day[d].push_back({l.host, l.neighbour});
        }
        for (std::uint32_t d = 0; d < days; ++d) {
            auto &edges = per_day[d];
            std::sort(edges.begin(), edges.end());
            edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
            m.daily_avg_out_degree[d] = net.n_nodes ? double(edges.size()) / net.n_nodes : 0.0;
            std::vector<std::vector<NodeId>> adj(net.n_nodes);
            for (const auto &[u, v] : edges) {
                adj[u].push_back(v);
                adj[v].push_back(u);
            }
            for (auto &a : adj) {
                std::sort(a.begin(), a.end());
                a.erase(std::unique(a.begin(), a.end()), a.end());
            }
            const auto cc = local_clustering(adj);
            double s = 0.0;
            for (double v : cc)
                s += v;
            m.daily_avg_clustering[d] = net.n_nodes ? s / net.n_nodes : 0.0;
        }
    }
    return m;
}

// ------------------------------------------------------------ temporal --

DayAggregatedGraph day_aggregate(const ContactNetwork &net)
{
    DayAggregatedGraph g;
    g.n_nodes = net.n_nodes;
    g.days = net.grid.horizon_days();
    g.out_edges.resize(net.n_nodes);
    for (const ContactLink &l : net.links) {
        const std::uint32_t d = net.grid.day_of_step(l.join_step);
        if (d < g.days)
            g.out_edges[l.host].push_back({d, l.neighbour});
    }
    for (auto &edges : g.out_edges) {
        std::sort(edges.begin(), edges.end());
        edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
    }
    return g;
}

namespace {

struct SequenceHash {
    std::size_t operator()(const std::vector<NodeId> &seq) const noexcept
    {
        std::uint64_t h = 0xcbf29ce484222325ULL;
        for (NodeId v : seq) {
            h ^= v;
            h *= 0x100000001b3ULL;
        }
        return (std::size_t)h;
    }
};

} // namespace

TemporalMetrics temporal_metrics(const DayAggregatedGraph &graph, std::uint32_t max_gap_days,
                                 std::span<const NodeId> sources, bool keep_distances)
{
    if (graph.days < 2)
        throw data_error("temporal metrics need a horizon of at least 2 days");
    const std::uint32_t n = graph.n_nodes;
    const std::uint32_t days = graph.days;

    TemporalMetrics out;
    out.betweenness.assign(n, 0.0);
    out.closeness.assign(n, 0.0);

    std::vector<NodeId> all_sources;
    if (sources.empty()) {
        all_sources.resize(n);
        for (NodeId u = 0; u < n; ++u)
            all_sources[u] = u;
    } else {
        all_sources.assign(sources.begin(), sources.end());
    }
    out.sources = all_sources;

    const std::uint32_t kInf = 0xffffffffu;
    // State = node * days + arrival_day. Only touched states are reset
    // between sources.
    std::vector<std::uint32_t> dist(std::size_t(n) * days, kInf);
    std::vector<std::vector<std::uint32_t>> preds(std::size_t(n) * days);
    std::vector<std::uint32_t> touched;
    std::vector<std::uint32_t> frontier, next;
    std::vector<std::uint32_t> node_dist(n);

    std::unordered_set<std::vector<NodeId>, SequenceHash> sequences;
    std::vector<NodeId> seq_scratch;

    for (NodeId source : all_sources) {
        for (std::uint32_t s : touched) {
            dist[s] = kInf;
            preds[s].clear();
        }
        touched.clear();
        std::fill(node_dist.begin(), node_dist.end(), kInf);
        node_dist[source] = 0;

        // Layer 1: the first edge of a path may start on any day.
        frontier.clear();
        for (const auto &[day, nb] : graph.out_edges[source]) {
            const std::uint32_t s = nb * days + day;
            if (dist[s] == kInf) {
                dist[s] = 1;
                preds[s].push_back(kInf); // source marker
                frontier.push_back(s);
                touched.push_back(s);
            }
            node_dist[nb] = std::min(node_dist[nb], 1u);
        }

        std::uint32_t depth = 1;
        while (!frontier.empty()) {
            next.clear();
            ++depth;
            for (std::uint32_t state : frontier) {
                const NodeId v = state / days;
                const std::uint32_t arrived = state % days;
                const auto &edges = graph.out_edges[v];
                // Edges on days arrived+1 .. arrived+max_gap.
                auto it = std::lower_bound(edges.begin(), edges.end(),
                                           std::make_pair(arrived + 1, NodeId(0)));
                for (; it != edges.end() && it->first <= arrived + max_gap_days; ++it) {
                    const std::uint32_t s2 = it->second * days + it->first;
                    if (dist[s2] == kInf) {
                        dist[s2] = depth;
                        preds[s2].push_back(state);
                        next.push_back(s2);
                        touched.push_back(s2);
                        node_dist[it->second] = std::min(node_dist[it->second], depth);
                    } else if (dist[s2] == depth) {
                        preds[s2].push_back(state);
                    }
                }
            }
            frontier.swap(next);
        }

        // Closeness: ordered source -> target, unreachable contributes 0.
        for (NodeId v = 0; v < n; ++v)
            if (v != source && node_dist[v] != kInf)
                out.closeness[v] += 1.0 / double(node_dist[v]);
        if (keep_distances) {
            std::vector<std::uint32_t> row(n, 0);
            for (NodeId v = 0; v < n; ++v)
                row[v] = (v == source || node_dist[v] == kInf) ? 0 : node_dist[v];
            out.distances.push_back(std::move(row));
        }

        // Betweenness: enumerate distinct shortest node sequences per target.
        for (NodeId w = 0; w < n; ++w) {
            if (w == source || node_dist[w] == kInf || node_dist[w] < 2)
                continue;
            sequences.clear();
            seq_scratch.clear();
            // Depth-first over the predecessor DAG from every optimal state.
            struct Frame {
                std::uint32_t state;
                std::size_t pred_pos;
            };
            std::vector<Frame> stack;
            for (std::uint32_t day = 0; day < days; ++day) {
                const std::uint32_t s = w * days + day;
                if (dist[s] != node_dist[w])
                    continue;
                stack.push_back({s, 0});
                seq_scratch.push_back(w);
                while (!stack.empty()) {
                    Frame &top = stack.back();
                    if (top.pred_pos < preds[top.state].size()) {
                        const std::uint32_t p = preds[top.state][top.pred_pos++];
                        if (p == kInf) {
                            // Complete sequence: source, interior..., w.
                            std::vector<NodeId> seq;
                            seq.reserve(seq_scratch.size() + 1);
                            seq.push_back(source);
                            seq.insert(seq.end(), seq_scratch.rbegin(), seq_scratch.rend());
                            sequences.insert(std::move(seq));
                        } else {
                            stack.push_back({p, 0});
                            seq_scratch.push_back(p / days);
                        }
                    } else {
                        stack.pop_back();
                        seq_scratch.pop_back();
                    }
                }
            }
            for (const auto &seq : sequences)
                for (std::size_t i = 1; i + 1 < seq.size(); ++i) {
                    bool repeat = false;
                    for (std::size_t j = 1; j < i; ++j)
                        if (seq[j] == seq[i]) {
                            repeat = true;
                            break;
                        }
                    if (!repeat)
                        out.betweenness[seq[i]] += 1.0;
                }
        }
    }
    return out;
}

} // namespace spdt
