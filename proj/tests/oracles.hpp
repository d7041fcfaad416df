// Test-only oracles: independent computation routes (quadrature, exhaustive
// enumeration, chain dynamics) used to pin expected values. Nothing here may
// call the library code paths it is checking.
#ifndef SPDT_TESTS_ORACLES_HPP
#define SPDT_TESTS_ORACLES_HPP

#include <cstdint>
#include <functional>
#include <vector>

#include "spdt/analysis.hpp"
#include "spdt/network.hpp"

namespace oracles {

// Adaptive Simpson integration to the requested absolute tolerance.
double integrate(const std::function<double(double)> &f, double a, double b, double tol = 1e-12);

// Chi-square upper-tail probability and a goodness-of-fit test statistic.
double chi2_upper_tail(double statistic, double dof);

// Exposure by numerical integration of the well-mixed room dynamics:
// concentration rises as (g / rV)(1 - e^{-r (t - ts)}) while the host is
// present and decays exponentially afterwards; exposure is the pulmonary rate
// times the integral of concentration over the neighbour's presence.
double exposure_by_quadrature(double host_arrive, double host_leave, double join, double leave,
                              double g, double p, double V, double r);

// Exact pmf of the number of inactive->active transitions inside a window of
// `steps` steps for the two-state chain at stationarity.
std::vector<double> chain_window_activation_pmf(double leave_prob, double arrive_prob,
                                                std::uint32_t steps, std::size_t max_count);

// Exhaustive temporal-path enumeration on small day-stamped graphs: shortest
// simple time-respecting paths, deduplicated by node sequence.
struct TemporalOracle {
    std::vector<double> betweenness;
    std::vector<double> closeness;
    std::vector<std::vector<std::uint32_t>> distances; // [source][target], 0 = unreachable/self
};
TemporalOracle enumerate_temporal(const spdt::DayAggregatedGraph &graph,
                                  std::uint32_t max_gap_days);

double pearson(const std::vector<double> &x, const std::vector<double> &y);

} // namespace oracles

#endif
