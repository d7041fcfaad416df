#ifndef SPDT_ANALYSIS_HPP
#define SPDT_ANALYSIS_HPP

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "spdt/network.hpp"

namespace spdt {

// Proportion histogram over fixed-width bins starting at zero. Integer-valued
// quantities use width 1 (bin i = value i); clustering coefficients use 0.01.
struct Histogram {
    double bin_width = 1.0;
    std::vector<double> proportions;

    double proportion(std::size_t bin) const
    {
        return bin < proportions.size() ? proportions[bin] : 0.0;
    }
};

Histogram histogram_integers(std::span<const std::int64_t> values);
Histogram histogram_real(std::span<const double> values, double bin_width);
Histogram histogram_from_pmf(const std::function<double(std::uint64_t)> &pmf, std::size_t bins);

// Eq. 8: sqrt of the summed squared per-bin proportion differences, over the
// observed histogram's bins.
double rse(const Histogram &observed, const Histogram &reference);

// Raw CIP samples of a network. Activation frequencies cover every (node,
// day) pair; a copy starting at step 0 reflects the initial state rather
// than an activation event and is not counted.
struct CipData {
    std::vector<std::int64_t> active_periods;   // t_a
    std::vector<std::int64_t> waiting_periods;  // t_w, inter-copy gaps
    std::vector<std::int64_t> activation_freqs; // h
    std::vector<std::int64_t> degrees;          // d, links per copy
    std::vector<std::int64_t> link_delays;      // t_c
    std::vector<std::int64_t> link_durations;   // t_d
};
CipData collect_cip(const ContactNetwork &net);

struct CipHistograms {
    Histogram active_period, waiting_period, activation_freq, degree, link_delay, link_duration;
};
CipHistograms cip_histograms(const ContactNetwork &net);

// Whole-window and per-day collapsed-graph metrics. An edge exists when at
// least one link ever connects the pair; clustering is computed on the
// undirected collapse.
struct StaticMetrics {
    std::vector<std::uint32_t> out_degree;
    std::vector<std::uint32_t> in_degree;
    std::vector<double> clustering;
    double mean_clustering = 0.0;
    std::uint64_t directed_edges = 0;
    std::uint64_t undirected_edges = 0;
    std::vector<double> daily_avg_out_degree;
    std::vector<double> daily_avg_clustering;
};
StaticMetrics static_metrics(const ContactNetwork &net, bool daily = true);

// Day-stamped directed edges (the day of the neighbour's join step),
// deduplicated per (day, host, neighbour).
struct DayAggregatedGraph {
    std::uint32_t n_nodes = 0;
    std::uint32_t days = 0;
    // Per node: (day, neighbour) pairs sorted by day then neighbour.
    std::vector<std::vector<std::pair<std::uint32_t, NodeId>>> out_edges;
};
DayAggregatedGraph day_aggregate(const ContactNetwork &net);

// Temporal betweenness/closeness over shortest time-respecting paths whose
// consecutive-edge day gaps lie in [1, max_gap_days]. Path length is the hop
// count; shortest paths are deduplicated by node sequence across start days;
// betweenness counts sequences with the node strictly interior; closeness
// sums 1/dist over ordered (source -> node) pairs.
struct TemporalMetrics {
    std::vector<double> betweenness;
    std::vector<double> closeness;
    // Distances from each processed source (row per source, n columns,
    // 0 = unreachable/self); kept only when keep_distances is set.
    std::vector<std::vector<std::uint32_t>> distances;
    std::vector<NodeId> sources;
};
TemporalMetrics temporal_metrics(const DayAggregatedGraph &graph, std::uint32_t max_gap_days = 5,
                                 std::span<const NodeId> sources = {},
                                 bool keep_distances = false);

} // namespace spdt

#endif
