#include "spdt/generator.hpp"

#include <algorithm>
#include <cmath>
#include <thread>

#include "spdt/errors.hpp"
#include "spdt/io.hpp"

namespace spdt {

namespace {

constexpr std::uint64_t kPhase1Key = 0xac71f1ed;
constexpr std::uint64_t kSocialKey = 0x50c1a1;
constexpr std::uint64_t kAdnKey = 0xadb;

std::uint32_t resolve_threads(std::uint32_t requested)
{
    if (requested != 0)
        return requested;
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : hw;
}

// Chunked parallel-for over node ranges; chunk order is fixed, so results
// placed per chunk are independent of scheduling.
template <typename Fn> void parallel_over_nodes(std::uint32_t n_nodes, std::uint32_t threads, Fn fn)
{
    threads = std::max<std::uint32_t>(1, std::min(threads, n_nodes == 0 ? 1 : n_nodes));
    if (threads == 1) {
        fn(0, 0, n_nodes);
        return;
    }
    std::vector<std::thread> pool;
    const std::uint32_t per = (n_nodes + threads - 1) / threads;
    for (std::uint32_t t = 0; t < threads; ++t) {
        const std::uint32_t lo = t * per;
        const std::uint32_t hi = std::min(n_nodes, lo + per);
        if (lo >= hi)
            break;
        pool.emplace_back([=] { fn(t, lo, hi); });
    }
    for (auto &th : pool)
        th.join();
}

} // namespace

void ModelParams::check() const
{
    auto prob = [](double p, const char *name) {
        if (!(p > 0.0) || p > 1.0)
            throw data_error(std::string("ModelParams: ") + name + " must be in (0,1], got " +
                             std::to_string(p));
    };
    prob(leave_prob, "leave_prob");
    prob(arrive_prob, "arrive_prob");
    prob(link_create_prob, "link_create_prob");
    prob(link_break_prob, "link_break_prob");
    if (link_create_prob == 1.0)
        throw data_error("ModelParams: link_create_prob must be below 1");
    if (!(novelty_weight > 0.0))
        throw data_error("ModelParams: novelty_weight must be positive");
    if (triadic_fraction < 0.0 || triadic_fraction > 1.0)
        throw data_error("ModelParams: triadic_fraction must be in [0,1]");
    if (n_nodes < 2)
        throw data_error("ModelParams: need at least 2 nodes");
    if (degree.kind == DegreeModel::Kind::Homogeneous) {
        if (!(degree.lambda > 0.0) || degree.lambda >= 1.0)
            throw data_error("ModelParams: lambda must be in (0,1)");
    }
}

std::vector<ActiveCopy> generate_activations(const ModelParams &params, NodeId node,
                                             RandomStream &rng)
{
    const auto [pi0, pi1] = equilibrium_probs(params.leave_prob, params.arrive_prob);
    (void)pi0;
    const std::uint64_t horizon = params.grid.horizon_steps;
    const GeometricParam active = GeometricParam::stop_prob(params.leave_prob);
    const GeometricParam inactive = GeometricParam::stop_prob(params.arrive_prob);

    std::vector<ActiveCopy> copies;
    std::uint64_t start = rng.next_bernoulli(pi1) ? 0 : sample_geometric(inactive, rng);
    while (start < horizon) {
        const std::uint64_t active_len = sample_geometric(active, rng);
        const std::uint64_t end = std::min(start + active_len, horizon);
        copies.push_back(ActiveCopy{node, (std::uint32_t)start, (std::uint32_t)end, 0, 0});
        if (start + active_len >= horizon)
            break;
        start = start + active_len + sample_geometric(inactive, rng);
    }
    return copies;
}

// ---------------------------------------------------------- SocialState --

SocialState::SocialState(std::uint32_t n_nodes, std::vector<double> lambdas,
                         double novelty_weight, double triadic_fraction)
    : n_nodes_(n_nodes), novelty_weight_(novelty_weight), triadic_fraction_(triadic_fraction),
      lambdas_(std::move(lambdas)), contacts_(n_nodes)
{
    if (!lambdas_.empty()) {
        if (lambdas_.size() != n_nodes_)
            throw data_error("SocialState: lambda count does not match node count");
        // Vose alias table.
        const std::size_t n = lambdas_.size();
        double total = 0.0;
        for (double l : lambdas_)
            total += l;
        alias_prob_.assign(n, 0.0);
        alias_idx_.assign(n, 0);
        std::vector<double> scaled(n);
        std::vector<std::uint32_t> small, large;
        for (std::size_t i = 0; i < n; ++i) {
            scaled[i] = lambdas_[i] * double(n) / total;
            (scaled[i] < 1.0 ? small : large).push_back((std::uint32_t)i);
        }
        while (!small.empty() && !large.empty()) {
            const std::uint32_t s = small.back();
            small.pop_back();
            const std::uint32_t l = large.back();
            alias_prob_[s] = scaled[s];
            alias_idx_[s] = l;
            scaled[l] = (scaled[l] + scaled[s]) - 1.0;
            if (scaled[l] < 1.0) {
                large.pop_back();
                small.push_back(l);
            }
        }
        for (std::uint32_t i : large)
            alias_prob_[i] = 1.0;
        for (std::uint32_t i : small)
            alias_prob_[i] = 1.0;
    }
}

NodeId SocialState::draw_global(RandomStream &rng)
{
    if (lambdas_.empty())
        return (NodeId)rng.next_below(n_nodes_);
    const auto i = (std::uint32_t)rng.next_below(n_nodes_);
    return rng.next_double() < alias_prob_[i] ? i : alias_idx_[i];
}

std::vector<NodeId> SocialState::select_neighbours(NodeId host, std::uint32_t d,
                                                   RandomStream &rng)
{
    if (d >= n_nodes_)
        throw data_error("select_neighbours: degree " + std::to_string(d) +
                         " not below node count " + std::to_string(n_nodes_));
    std::vector<NodeId> &contacts = contacts_[host];
    if (contact_mark_.empty()) {
        contact_mark_.assign(n_nodes_, 0);
        chosen_mark_.assign(n_nodes_, 0);
    }
    for (NodeId c : contacts)
        contact_mark_[c] = 1;
    // Repeat-branch pool: contacts not yet chosen for this copy. Contacts
    // added during the copy are chosen by definition and never enter it.
    available_ = contacts;
    bool triadic_built = false, fallback_built = false;

    std::vector<NodeId> chosen;
    chosen.reserve(d);
    for (std::uint32_t slot = 0; slot < d; ++slot) {
        const double n_t = double(contacts.size());
        if (rng.next_double() < n_t / (n_t + novelty_weight_) && !available_.empty()) {
            // Repeat branch; an exhausted pool forces a new neighbour.
            const std::size_t i = rng.next_below(available_.size());
            const NodeId pick = available_[i];
            available_[i] = available_.back();
            available_.pop_back();
            chosen.push_back(pick);
            chosen_mark_[pick] = 1;
            continue;
        }

        NodeId picked = n_nodes_; // sentinel
        if (rng.next_double() < triadic_fraction_) {
            // Contacts of contacts, minus existing contacts, self and chosen.
            // Built once per copy; entries that become invalid are dropped
            // lazily as they are drawn.
            if (!triadic_built) {
                triadic_built = true;
                triadic_pool_.clear();
                for (NodeId c : contacts)
                    for (NodeId cc : contacts_[c])
                        if (cc != host && !contact_mark_[cc] && !chosen_mark_[cc])
                            triadic_pool_.push_back(cc);
                std::sort(triadic_pool_.begin(), triadic_pool_.end());
                triadic_pool_.erase(std::unique(triadic_pool_.begin(), triadic_pool_.end()),
                                    triadic_pool_.end());
            }
            while (!triadic_pool_.empty()) {
                const std::size_t i = rng.next_below(triadic_pool_.size());
                const NodeId cand = triadic_pool_[i];
                triadic_pool_[i] = triadic_pool_.back();
                triadic_pool_.pop_back();
                if (!chosen_mark_[cand] && !contact_mark_[cand]) {
                    picked = cand;
                    break;
                }
            }
        }
        if (picked == n_nodes_) {
            // Global draw (lambda-weighted when heterogeneous), rejecting
            // self, existing contacts and already-chosen nodes.
            for (int attempt = 0; attempt < 64; ++attempt) {
                const NodeId cand = draw_global(rng);
                if (cand != host && !contact_mark_[cand] && !chosen_mark_[cand]) {
                    picked = cand;
                    break;
                }
            }
        }
        if (picked == n_nodes_) {
            // Everyone eligible is already a contact (tiny graphs or extreme
            // hubs): any node that is neither the host nor chosen this copy.
            if (!fallback_built) {
                fallback_built = true;
                fallback_pool_.clear();
                for (NodeId x = 0; x < n_nodes_; ++x)
                    if (x != host)
                        fallback_pool_.push_back(x);
            }
            while (!fallback_pool_.empty()) {
                const std::size_t i = rng.next_below(fallback_pool_.size());
                const NodeId cand = fallback_pool_[i];
                if (chosen_mark_[cand]) {
                    fallback_pool_[i] = fallback_pool_.back();
                    fallback_pool_.pop_back();
                    continue;
                }
                picked = cand;
                fallback_pool_[i] = fallback_pool_.back();
                fallback_pool_.pop_back();
                break;
            }
            if (picked == n_nodes_)
                throw data_error("select_neighbours: no eligible neighbour left");
        }
        if (!contact_mark_[picked]) {
            contacts.push_back(picked);
            contact_mark_[picked] = 1;
        }
        chosen.push_back(picked);
        chosen_mark_[picked] = 1;
    }
    for (NodeId c : contacts)
        contact_mark_[c] = 0;
    for (NodeId c : chosen)
        chosen_mark_[c] = 0;
    return chosen;
}

// ------------------------------------------------------- link timings --

std::vector<ContactLink> generate_links(const ActiveCopy &copy,
                                        const std::vector<NodeId> &neighbours,
                                        const ModelParams &params, RandomStream &rng)
{
    const std::uint32_t horizon = params.grid.horizon_steps;
    const TruncatedGeometricParam delay{params.link_create_prob,
                                        copy.duration() + params.delta_steps};
    const GeometricParam duration = GeometricParam::stop_prob(params.link_break_prob);
    std::vector<ContactLink> links;
    links.reserve(neighbours.size());
    for (NodeId nb : neighbours) {
        if (nb == copy.host)
            throw data_error("generate_links: neighbour equals host");
        const std::uint32_t t_c = sample_truncated_geometric(delay, rng);
        const std::uint64_t t_d = sample_geometric(duration, rng);
        const std::uint64_t join = std::uint64_t(copy.start_step) + t_c;
        if (join >= horizon)
            continue;
        const std::uint64_t leave = std::min<std::uint64_t>(join + t_d, 0xffffffffULL);
        links.push_back(ContactLink{copy.host, copy.start_step, copy.end_step, nb,
                                    (std::uint32_t)join, (std::uint32_t)leave});
    }
    return links;
}

// ------------------------------------------------------ full synthesis --

namespace {

struct CopyPlan {
    std::uint32_t start;
    std::uint32_t end;
    NodeId host;
    std::uint32_t degree;
    std::uint64_t slot_begin;
};

struct SlotPlan {
    std::uint32_t delay;
    std::uint32_t duration; // saturated at 32 bits; leave step also clamps
};

struct Phase1 {
    std::vector<CopyPlan> copies;
    std::vector<SlotPlan> slots;
    std::vector<double> lambdas; // heterogeneous only
};

std::uint32_t draw_degree(const ModelParams &params, double node_lambda, RandomStream &rng)
{
    const double lambda = params.degree.kind == DegreeModel::Kind::Homogeneous
                              ? params.degree.lambda
                              : node_lambda;
    std::uint64_t d = sample_geometric(GeometricParam::continuation_prob(lambda), rng);
    // select_neighbours needs d < n_nodes; extreme tails are clamped.
    if (d > params.n_nodes - 1)
        d = params.n_nodes - 1;
    return (std::uint32_t)d;
}

Phase1 run_phase1(const ModelParams &params)
{
    const std::uint32_t threads = resolve_threads(params.threads);
    const bool heterogeneous = params.degree.kind == DegreeModel::Kind::Heterogeneous;

    std::vector<Phase1> parts(threads);
    parallel_over_nodes(params.n_nodes, threads, [&](std::uint32_t t, std::uint32_t lo,
                                                     std::uint32_t hi) {
        Phase1 &part = parts[t];
        if (heterogeneous)
            part.lambdas.reserve(hi - lo);
        for (NodeId node = lo; node < hi; ++node) {
            RandomStream rng = RandomStream::derive(params.master_seed, kPhase1Key, node);
            double lambda = 0.0;
            if (heterogeneous) {
                lambda = sample_bounded_powerlaw(params.degree.powerlaw, rng);
                part.lambdas.push_back(lambda);
            }
            const std::vector<ActiveCopy> activations = generate_activations(params, node, rng);
            const GeometricParam duration = GeometricParam::stop_prob(params.link_break_prob);
            for (const ActiveCopy &c : activations) {
                const std::uint32_t d = draw_degree(params, lambda, rng);
                CopyPlan plan{c.start_step, c.end_step, node, d, part.slots.size()};
                const TruncatedGeometricParam delay{params.link_create_prob,
                                                    c.duration() + params.delta_steps};
                for (std::uint32_t j = 0; j < d; ++j) {
                    const std::uint32_t t_c = sample_truncated_geometric(delay, rng);
                    const std::uint64_t t_d = sample_geometric(duration, rng);
                    part.slots.push_back(
                        SlotPlan{t_c, (std::uint32_t)std::min<std::uint64_t>(t_d, 0xffffffffULL)});
                }
                part.copies.push_back(plan);
            }
        }
    });

    // Concatenate in chunk order (deterministic), fixing slot offsets.
    Phase1 merged;
    std::size_t total_copies = 0, total_slots = 0, total_lambdas = 0;
    for (const Phase1 &p : parts) {
        total_copies += p.copies.size();
        total_slots += p.slots.size();
        total_lambdas += p.lambdas.size();
    }
    merged.copies.reserve(total_copies);
    merged.slots.reserve(total_slots);
    merged.lambdas.reserve(total_lambdas);
    for (Phase1 &p : parts) {
        const std::uint64_t base = merged.slots.size();
        for (CopyPlan c : p.copies) {
            c.slot_begin += base;
            merged.copies.push_back(c);
        }
        merged.slots.insert(merged.slots.end(), p.slots.begin(), p.slots.end());
        merged.lambdas.insert(merged.lambdas.end(), p.lambdas.begin(), p.lambdas.end());
        p = Phase1{};
    }
    return merged;
}

// Phase 2: canonical copy order (start step, then host id), sequential.
template <typename LinkFn>
void run_phase2(const ModelParams &params, Phase1 &plan, LinkFn emit)
{
    std::vector<std::uint64_t> order(plan.copies.size());
    for (std::uint64_t i = 0; i < order.size(); ++i)
        order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::uint64_t a, std::uint64_t b) {
        const CopyPlan &ca = plan.copies[a];
        const CopyPlan &cb = plan.copies[b];
        return ca.start != cb.start ? ca.start < cb.start : ca.host < cb.host;
    });

    SocialState social(params.n_nodes, std::move(plan.lambdas), params.novelty_weight,
                       params.triadic_fraction);
    RandomStream rng = RandomStream::derive(params.master_seed, kSocialKey);
    const std::uint32_t horizon = params.grid.horizon_steps;

    for (std::uint64_t idx : order) {
        const CopyPlan &c = plan.copies[idx];
        const std::vector<NodeId> neighbours = social.select_neighbours(c.host, c.degree, rng);
        for (std::uint32_t j = 0; j < c.degree; ++j) {
            const SlotPlan &slot = plan.slots[c.slot_begin + j];
            const std::uint64_t join = std::uint64_t(c.start) + slot.delay;
            if (join >= horizon)
                continue;
            const std::uint64_t leave =
                std::min<std::uint64_t>(join + std::uint64_t(slot.duration), 0xffffffffULL);
            emit(ContactLink{c.host, c.start, c.end, neighbours[j], (std::uint32_t)join,
                             (std::uint32_t)leave});
        }
    }
}

void check_estimate(const ModelParams &params)
{
    const double est = estimate_link_count(params);
    if (est > double(params.max_links))
        throw data_error(
            "estimated link count " + std::to_string((std::uint64_t)est) + " exceeds the cap of " +
            std::to_string(params.max_links) +
            "; use the streaming generator output or raise max_links if this is intended");
}

} // namespace

double estimate_link_count(const ModelParams &params)
{
    const auto [pi0, pi1] = equilibrium_probs(params.leave_prob, params.arrive_prob);
    (void)pi0;
    // copies/node ~ horizon / (mean active + mean inactive cycle)
    const double cycle = 1.0 / params.leave_prob + 1.0 / params.arrive_prob;
    const double copies = params.grid.horizon_steps / cycle * params.n_nodes;
    double mean_degree;
    if (params.degree.kind == DegreeModel::Kind::Homogeneous) {
        mean_degree = 1.0 / (1.0 - params.degree.lambda);
    } else {
        mean_degree = 0.0;
        double tail = 1.0;
        for (std::uint64_t d = 1; d <= 100000 && tail > 1e-9; ++d) {
            const double p = mixed_degree_pmf(d, params.degree.powerlaw);
            mean_degree += double(d) * p;
            tail -= p;
        }
    }
    return copies * std::min(mean_degree, double(params.n_nodes - 1));
}

ContactNetwork generate_network(const ModelParams &params)
{
    params.check();
    check_estimate(params);
    Phase1 plan = run_phase1(params);

    std::vector<ActiveCopy> copies;
    copies.reserve(plan.copies.size());
    for (const CopyPlan &c : plan.copies)
        copies.push_back(ActiveCopy{c.host, c.start, c.end, 0, 0});

    std::vector<ContactLink> links;
    links.reserve(plan.slots.size());
    run_phase2(params, plan, [&](const ContactLink &l) { links.push_back(l); });
    plan = Phase1{};
    return assemble_network(params.grid, params.n_nodes, params.delta_steps, std::move(copies),
                            std::move(links));
}

std::uint64_t generate_network_to_dir(const ModelParams &params, const std::string &dir,
                                      std::size_t max_buffered_links)
{
    params.check();
    Phase1 plan = run_phase1(params);
    StreamingLinkWriter writer(dir, params.grid, params.n_nodes, params.delta_steps,
                               max_buffered_links);
    run_phase2(params, plan, [&](const ContactLink &l) { writer.add(l); });
    plan = Phase1{};
    writer.finish();
    return writer.links_written();
}

// -------------------------------------------------------- ADN baseline --

namespace {

template <typename LinkFn>
void run_adn(const AdnParams &adn, std::uint32_t n_nodes, const TimeGrid &grid,
             std::uint64_t master_seed, std::uint32_t threads, std::vector<ActiveCopy> *copies,
             LinkFn emit)
{
    if (n_nodes < 2)
        throw data_error("generate_adn: need at least 2 nodes");
    if (adn.adn_step_seconds % grid.step_seconds != 0)
        throw data_error("generate_adn: adn_step_seconds must be a multiple of step_seconds");
    const std::uint32_t stride = adn.adn_step_seconds / grid.step_seconds;
    const std::uint32_t horizon = grid.horizon_steps;

    struct Part {
        std::vector<ActiveCopy> copies;
        std::vector<ContactLink> links;
    };
    const std::uint32_t nthreads = resolve_threads(threads);
    std::vector<Part> parts(nthreads);

    parallel_over_nodes(n_nodes, nthreads, [&](std::uint32_t t, std::uint32_t lo,
                                               std::uint32_t hi) {
        Part &part = parts[t];
        struct PendingLink {
            NodeId nb;
            std::uint32_t join, leave;
        };
        std::vector<PendingLink> pending;
        for (NodeId node = lo; node < hi; ++node) {
            RandomStream rng = RandomStream::derive(master_seed, kAdnKey, node);
            const double activity = sample_bounded_powerlaw(adn.activity, rng);
            double node_lambda = 0.0;
            if (adn.heterogeneous_degree && adn.degree.kind == DegreeModel::Kind::Heterogeneous)
                node_lambda = sample_bounded_powerlaw(adn.degree.powerlaw, rng);

            // Activations at consecutive activity steps coalesce into one
            // copy (a node cannot re-arrive without leaving); every link
            // keeps its own one-step window.
            std::uint32_t cur_start = 0, cur_end = 0;
            bool open = false;
            pending.clear();
            auto flush = [&]() {
                if (!open)
                    return;
                part.copies.push_back(ActiveCopy{node, cur_start, cur_end, 0, 0});
                for (const PendingLink &pl : pending)
                    part.links.push_back(
                        ContactLink{node, cur_start, cur_end, pl.nb, pl.join, pl.leave});
                pending.clear();
                open = false;
            };
            for (std::uint32_t start = 0; start < horizon; start += stride) {
                if (!rng.next_bernoulli(activity))
                    continue;
                const std::uint32_t end = std::min(start + stride, horizon);
                std::uint64_t m = adn.links_per_activation;
                if (adn.heterogeneous_degree) {
                    const double lambda = adn.degree.kind == DegreeModel::Kind::Heterogeneous
                                              ? node_lambda
                                              : adn.degree.lambda;
                    m = sample_geometric(GeometricParam::continuation_prob(lambda), rng);
                }
                if (m > n_nodes - 1)
                    m = n_nodes - 1;
                if (open && start != cur_end)
                    flush();
                if (!open) {
                    open = true;
                    cur_start = start;
                }
                cur_end = end;
                // m distinct uniform neighbours, host excluded.
                std::vector<NodeId> picked;
                picked.reserve(m);
                while (picked.size() < m) {
                    const NodeId cand = (NodeId)rng.next_below(n_nodes);
                    if (cand == node ||
                        std::find(picked.begin(), picked.end(), cand) != picked.end())
                        continue;
                    picked.push_back(cand);
                }
                for (NodeId nb : picked)
                    pending.push_back(PendingLink{nb, start, end});
            }
            flush();
        }
    });

    for (Part &p : parts) {
        if (copies)
            copies->insert(copies->end(), p.copies.begin(), p.copies.end());
        for (const ContactLink &l : p.links)
            emit(l);
        p = Part{};
    }
}

} // namespace

ContactNetwork generate_adn(const AdnParams &adn, std::uint32_t n_nodes, const TimeGrid &grid,
                            std::uint64_t master_seed, std::uint32_t threads)
{
    std::vector<ActiveCopy> copies;
    std::vector<ContactLink> links;
    run_adn(adn, n_nodes, grid, master_seed, threads, &copies,
            [&](const ContactLink &l) { links.push_back(l); });
    return assemble_network(grid, n_nodes, /*delta_steps=*/0, std::move(copies),
                            std::move(links));
}

std::uint64_t generate_adn_to_dir(const AdnParams &adn, std::uint32_t n_nodes,
                                  const TimeGrid &grid, std::uint64_t master_seed,
                                  const std::string &dir, std::uint32_t threads,
                                  std::size_t max_buffered_links)
{
    StreamingLinkWriter writer(dir, grid, n_nodes, /*delta_steps=*/0, max_buffered_links);
    run_adn(adn, n_nodes, grid, master_seed, threads, nullptr,
            [&](const ContactLink &l) { writer.add(l); });
    writer.finish();
    return writer.links_written();
}

} // namespace spdt
