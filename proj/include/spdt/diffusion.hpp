#ifndef SPDT_DIFFUSION_HPP
#define SPDT_DIFFUSION_HPP

#include <cstdint>
#include <vector>

#include "spdt/network.hpp"
#include "spdt/random.hpp"

namespace spdt {

struct DiseaseParams {
    double particle_rate = 0.304;      // pathogen generation, PFU per second
    double pulmonary_rate = 1.25e-4;   // inhalation, m^3 per second (7.5 L/min)
    double volume = 2512.0;            // well-mixed interaction volume, m^3
    double median_removal_min = 60.0;  // median particle removal time r_t, minutes
    double removal_lo_min = 7.5;       // removal-time range, minutes
    double removal_hi_min = 300.0;
    double infectivity = 0.33;         // dose-response sigma, per PFU
    std::uint32_t infectious_days_min = 3;
    std::uint32_t infectious_days_max = 5;
    std::uint32_t incubation_days = 1;
    std::uint32_t seeds = 500;

    void check() const;
};

// Eq. 15 evaluated per link class from the well-mixed concentration dynamics.
// Times in seconds; only differences of times enter the exponentials, so the
// value is exactly translation invariant. removal_rate is per second.
double link_exposure(double host_arrive, double host_leave, double join, double leave,
                     double particle_rate, double pulmonary_rate, double volume,
                     double removal_rate);

// Eq. 16 over one susceptible's links of a day, one shared removal rate.
struct ExposureSpan {
    double host_arrive, host_leave, join, leave; // seconds
};
double total_exposure(const std::vector<ExposureSpan> &links, const DiseaseParams &params,
                      double removal_rate);

// Eq. 17.
double infection_probability(double exposure, double infectivity);

// Removal time b in minutes: two-piece log-uniform on [lo, median] and
// [median, hi] with equal mass, so the median equals median_removal_min.
double sample_removal_minutes(const DiseaseParams &params, RandomStream &rng);

struct SirEvent {
    std::uint32_t run;
    std::uint32_t day;
    NodeId node;
    enum class Kind : std::uint8_t { Seed, Infect, Recover } kind;
};

struct SirResult {
    std::uint32_t days = 0;
    std::uint32_t runs = 0;
    // Per-run series, runs x days.
    std::vector<std::vector<std::uint32_t>> prevalence; // I_p
    std::vector<std::vector<std::uint32_t>> cumulative; // I_a
    std::vector<double> prevalence_mean, prevalence_std;
    std::vector<double> cumulative_mean, cumulative_std;
    std::vector<SirEvent> events; // filled only when requested, (run,day,node) order
};

// Day-stepped SIR over any contact network. Per-(node,day) substreams make
// the outcome independent of traversal and thread count.
SirResult run_sir(const ContactNetwork &net, const DiseaseParams &params,
                  std::uint64_t master_seed, std::uint32_t runs, std::uint32_t days = 0,
                  bool record_events = false, std::uint32_t threads = 0);

// Absolute percentage variation of an observed series against a reference.
struct ApvResult {
    std::vector<double> per_day;
    double average = 0.0;
};
ApvResult apv(const std::vector<double> &reference, const std::vector<double> &observed);

} // namespace spdt

#endif
