#include "spdt/diffusion.hpp"

#include <algorithm>
#include <cmath>
#include <thread>

#include "spdt/errors.hpp"

namespace spdt {

namespace {
constexpr std::uint64_t kRunKey = 0x51e0;
constexpr std::uint64_t kSeedPickKey = 0x5eed;
} // namespace

void DiseaseParams::check() const
{
    if (!(particle_rate > 0.0) || !(pulmonary_rate > 0.0) || !(volume > 0.0))
        throw data_error("disease parameters g, p, V must be positive");
    if (!(removal_lo_min > 0.0) || !(removal_lo_min <= median_removal_min) ||
        !(median_removal_min <= removal_hi_min))
        throw data_error("removal times must satisfy 0 < lo <= median <= hi");
    if (!(infectivity >= 0.0))
        throw data_error("infectivity must be non-negative");
    if (infectious_days_min < 1 || infectious_days_min > infectious_days_max)
        throw data_error("infectious period range invalid");
    if (seeds == 0)
        throw data_error("seed count must be positive");
}

double link_exposure(double host_arrive, double host_leave, double join, double leave,
                     double particle_rate, double pulmonary_rate, double volume,
                     double removal_rate)
{
    if (!(removal_rate > 0.0))
        throw data_error("removal rate must be positive");
    if (!(host_arrive <= host_leave) || !(join <= leave) || !(join >= host_arrive))
        throw data_error("link times out of order");

    const double r = removal_rate;
    const double scale = particle_rate * pulmonary_rate / (volume * r * r);
    const double stay = host_leave - host_arrive; // concentration build-up span

    if (join >= host_leave) {
        // Indirect only: the neighbour breathes the decaying cloud.
        // (1 - e^{-r stay}) (e^{-r (join-host_leave)} - e^{-r (leave-host_leave)})
        const double built = -std::expm1(-r * stay);
        return scale * built *
               (std::exp(-r * (join - host_leave)) - std::exp(-r * (leave - host_leave)));
    }
    if (leave <= host_leave) {
        // Direct only: rising concentration for the whole presence.
        // r (leave-join) + e^{-r (leave-host_arrive)} - e^{-r (join-host_arrive)}
        return scale * (r * (leave - join) + std::exp(-r * (leave - host_arrive)) -
                        std::exp(-r * (join - host_arrive)));
    }
    // Mixed: rising part until the host leaves, decaying tail afterwards.
    const double direct = r * (host_leave - join) + std::exp(-r * stay) -
                          std::exp(-r * (join - host_arrive));
    const double built = -std::expm1(-r * stay);
    const double tail = built * (-std::expm1(-r * (leave - host_leave)));
    return scale * (direct + tail);
}

double total_exposure(const std::vector<ExposureSpan> &links, const DiseaseParams &params,
                      double removal_rate)
{
    // Compensated (Kahan) summation: the sum must not depend on link order.
    double sum = 0.0, carry = 0.0;
    for (const ExposureSpan &s : links) {
        const double e = link_exposure(s.host_arrive, s.host_leave, s.join, s.leave,
                                       params.particle_rate, params.pulmonary_rate,
                                       params.volume, removal_rate);
        const double y = e - carry;
        const double t = sum + y;
        carry = (t - sum) - y;
        sum = t;
    }
    return sum;
}

double infection_probability(double exposure, double infectivity)
{
    if (exposure < 0.0)
        throw data_error("exposure must be non-negative");
    return -std::expm1(-infectivity * exposure);
}

double sample_removal_minutes(const DiseaseParams &params, RandomStream &rng)
{
    const bool low_half = rng.next_bernoulli(0.5);
    const double u = rng.next_double();
    const double a = low_half ? params.removal_lo_min : params.median_removal_min;
    const double b = low_half ? params.median_removal_min : params.removal_hi_min;
    return std::exp(std::log(a) + u * (std::log(b) - std::log(a)));
}

// ------------------------------------------------------------- run_sir --

namespace {

struct SimLink {
    NodeId host;
    NodeId neighbour;
    std::uint32_t copy_start, copy_end, join, leave;
    std::uint32_t visit_day;
};

struct DayIndex {
    std::vector<SimLink> links;           // grouped by day of join step
    std::vector<std::uint64_t> day_begin; // days+1 offsets
};

DayIndex build_day_index(const ContactNetwork &net, std::uint32_t days)
{
    DayIndex idx;
    idx.links.reserve(net.links.size());
    for (const ContactLink &l : net.links)
        idx.links.push_back(SimLink{l.host, l.neighbour, l.copy_start, l.copy_end, l.join_step,
                                    l.leave_step, net.grid.day_of_step(l.copy_start)});
    std::stable_sort(idx.links.begin(), idx.links.end(),
                     [&](const SimLink &a, const SimLink &b) {
                         return net.grid.day_of_step(a.join) < net.grid.day_of_step(b.join);
                     });
    idx.day_begin.assign(days + 1, 0);
    std::uint64_t pos = 0;
    for (std::uint32_t d = 0; d <= days; ++d) {
        while (pos < idx.links.size() && net.grid.day_of_step(idx.links[pos].join) < d)
            ++pos;
        idx.day_begin[d] = pos;
    }
    return idx;
}

struct RunOutput {
    std::vector<std::uint32_t> prevalence, cumulative;
    std::vector<SirEvent> events;
};

RunOutput simulate_one_run(const ContactNetwork &net, const DayIndex &idx,
                           const DiseaseParams &params, std::uint64_t master_seed,
                           std::uint32_t run, std::uint32_t days, bool record_events)
{
    const std::uint32_t n = net.n_nodes;
    const double step_s = net.grid.step_seconds;
    const std::uint64_t run_seed = mix_keys(mix_keys(master_seed, kRunKey), run);

    enum : std::uint8_t { S = 0, I = 1, R = 2 };
    std::vector<std::uint8_t> comp(n, S);
    std::vector<std::uint32_t> infect_day(n, 0xffffffffu);  // day the node became infectious
    std::vector<std::uint32_t> recover_day(n, 0xffffffffu); // first day no longer infectious
    std::vector<NodeId> infectious; // current I set, activation order

    struct Pending {
        NodeId node;
        std::uint32_t tau;
    };
    std::vector<std::vector<Pending>> pending(days + params.incubation_days + 1);

    std::vector<double> exposure(n, 0.0);
    std::vector<double> removal_rate(n, 0.0);
    std::vector<std::uint8_t> touched_flag(n, 0);
    struct Touched {
        NodeId node;
        RandomStream rng; // positioned after the removal-time draw
    };
    std::vector<Touched> touched;

    RunOutput out;
    out.prevalence.assign(days, 0);
    out.cumulative.assign(days, 0);

    std::uint32_t ip = 0, ia = 0;
    auto log_event = [&](std::uint32_t day, NodeId node, SirEvent::Kind kind) {
        if (record_events)
            out.events.push_back(SirEvent{run, day, node, kind});
    };

    // Seed selection: distinct uniform nodes.
    {
        if (params.seeds > n)
            throw data_error("seed count " + std::to_string(params.seeds) +
                             " exceeds node count " + std::to_string(n));
        RandomStream seed_rng = RandomStream::derive(run_seed, kSeedPickKey);
        std::vector<NodeId> picked;
        picked.reserve(params.seeds);
        std::vector<std::uint8_t> taken(n, 0);
        while (picked.size() < params.seeds) {
            const NodeId cand = (NodeId)seed_rng.next_below(n);
            if (!taken[cand]) {
                taken[cand] = 1;
                picked.push_back(cand);
            }
        }
        const std::uint32_t span = params.infectious_days_max - params.infectious_days_min + 1;
        for (NodeId node : picked) {
            comp[node] = I;
            infect_day[node] = 0;
            recover_day[node] = params.infectious_days_min + (std::uint32_t)seed_rng.next_below(span);
            infectious.push_back(node);
            ++ip;
            ++ia;
            log_event(0, node, SirEvent::Kind::Seed);
        }
    }

    for (std::uint32_t day = 0; day < days; ++day) {
        // Morning: recoveries due today, then activations incubated for today.
        if (day > 0) {
            for (std::size_t i = 0; i < infectious.size();) {
                const NodeId node = infectious[i];
                if (recover_day[node] == day) {
                    comp[node] = R;
                    --ip;
                    log_event(day, node, SirEvent::Kind::Recover);
                    infectious[i] = infectious.back();
                    infectious.pop_back();
                } else {
                    ++i;
                }
            }
            for (const Pending &p : pending[day]) {
                comp[p.node] = I;
                infect_day[p.node] = day;
                recover_day[p.node] = day + p.tau;
                infectious.push_back(p.node);
                ++ip;
                ++ia;
                log_event(day, p.node, SirEvent::Kind::Infect);
            }
            pending[day].clear();
        }
        out.prevalence[day] = ip;
        out.cumulative[day] = ia;

        // Exposure pass over today's links.
        touched.clear();
        for (std::uint64_t li = idx.day_begin[day]; li < idx.day_begin[day + 1]; ++li) {
            const SimLink &l = idx.links[li];
            if (comp[l.neighbour] != S)
                continue;
            // The host must have been infectious on the day of its visit:
            // particles present were shed while it was at the location.
            if (!(infect_day[l.host] <= l.visit_day && l.visit_day < recover_day[l.host]))
                continue;
            if (!touched_flag[l.neighbour]) {
                touched_flag[l.neighbour] = 1;
                RandomStream node_rng = RandomStream::derive(run_seed, day, l.neighbour);
                // One removal time per (susceptible, day), shared by its links.
                const double b_min = sample_removal_minutes(params, node_rng);
                removal_rate[l.neighbour] = 1.0 / (60.0 * b_min);
                touched.push_back(Touched{l.neighbour, node_rng});
            }
            exposure[l.neighbour] +=
                link_exposure(l.copy_start * step_s, l.copy_end * step_s, l.join * step_s,
                              l.leave * step_s, params.particle_rate, params.pulmonary_rate,
                              params.volume, removal_rate[l.neighbour]);
        }

        // Evening: infection draws for every exposed susceptible.
        for (Touched &t : touched) {
            const double p_inf = infection_probability(exposure[t.node], params.infectivity);
            if (t.rng.next_double() < p_inf) {
                const std::uint32_t span =
                    params.infectious_days_max - params.infectious_days_min + 1;
                const std::uint32_t tau =
                    params.infectious_days_min + (std::uint32_t)t.rng.next_below(span);
                pending[day + params.incubation_days].push_back(Pending{t.node, tau});
            }
            exposure[t.node] = 0.0;
            removal_rate[t.node] = 0.0;
            touched_flag[t.node] = 0;
        }
    }
    return out;
}

} // namespace

SirResult run_sir(const ContactNetwork &net, const DiseaseParams &params,
                  std::uint64_t master_seed, std::uint32_t runs, std::uint32_t days,
                  bool record_events, std::uint32_t threads)
{
    params.check();
    if (days == 0)
        days = net.grid.horizon_days();
    if (days > net.grid.horizon_days())
        throw data_error("requested " + std::to_string(days) + " days but network horizon is " +
                         std::to_string(net.grid.horizon_days()) + " days");
    if (runs == 0)
        throw data_error("run count must be positive");

    const DayIndex idx = build_day_index(net, days);

    SirResult result;
    result.days = days;
    result.runs = runs;
    result.prevalence.resize(runs);
    result.cumulative.resize(runs);
    std::vector<std::vector<SirEvent>> run_events(runs);

    std::uint32_t nthreads = threads ? threads : std::thread::hardware_concurrency();
    if (nthreads == 0)
        nthreads = 1;
    nthreads = std::min(nthreads, runs);

    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(nthreads);
    for (std::uint32_t t = 0; t < nthreads; ++t) {
        pool.emplace_back([&, t] {
            try {
                for (std::uint32_t run = t; run < runs; run += nthreads) {
                    RunOutput out = simulate_one_run(net, idx, params, master_seed, run, days,
                                                     record_events);
                    result.prevalence[run] = std::move(out.prevalence);
                    result.cumulative[run] = std::move(out.cumulative);
                    run_events[run] = std::move(out.events);
                }
            } catch (...) {
                errors[t] = std::current_exception();
            }
        });
    }
    for (auto &th : pool)
        th.join();
    for (auto &e : errors)
        if (e)
            std::rethrow_exception(e);

    if (record_events) {
        for (auto &ev : run_events) {
            std::sort(ev.begin(), ev.end(), [](const SirEvent &a, const SirEvent &b) {
                if (a.day != b.day) return a.day < b.day;
                return a.node < b.node;
            });
            result.events.insert(result.events.end(), ev.begin(), ev.end());
        }
    }

    result.prevalence_mean.assign(days, 0.0);
    result.prevalence_std.assign(days, 0.0);
    result.cumulative_mean.assign(days, 0.0);
    result.cumulative_std.assign(days, 0.0);
    for (std::uint32_t d = 0; d < days; ++d) {
        double sp = 0, sa = 0;
        for (std::uint32_t r = 0; r < runs; ++r) {
            sp += result.prevalence[r][d];
            sa += result.cumulative[r][d];
        }
        const double mp = sp / runs, ma = sa / runs;
        double vp = 0, va = 0;
        for (std::uint32_t r = 0; r < runs; ++r) {
            vp += (result.prevalence[r][d] - mp) * (result.prevalence[r][d] - mp);
            va += (result.cumulative[r][d] - ma) * (result.cumulative[r][d] - ma);
        }
        result.prevalence_mean[d] = mp;
        result.prevalence_std[d] = std::sqrt(vp / runs);
        result.cumulative_mean[d] = ma;
        result.cumulative_std[d] = std::sqrt(va / runs);
    }
    return result;
}

ApvResult apv(const std::vector<double> &reference, const std::vector<double> &observed)
{
    if (reference.size() != observed.size())
        throw data_error("APV series length mismatch: " + std::to_string(reference.size()) +
                         " vs " + std::to_string(observed.size()));
    if (reference.empty())
        throw data_error("APV requires non-empty series");
    ApvResult out;
    out.per_day.reserve(reference.size());
    double sum = 0.0;
    for (std::size_t i = 0; i < reference.size(); ++i) {
        if (!(reference[i] > 0.0))
            throw data_error("APV reference is zero at day " + std::to_string(i));
        const double v = 100.0 * std::abs(reference[i] - observed[i]) / reference[i];
        out.per_day.push_back(v);
        sum += v;
    }
    out.average = sum / double(reference.size());
    return out;
}

} // namespace spdt
