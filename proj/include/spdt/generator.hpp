#ifndef SPDT_GENERATOR_HPP
#define SPDT_GENERATOR_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "spdt/distributions.hpp"
#include "spdt/network.hpp"
#include "spdt/random.hpp"

namespace spdt {

struct DegreeModel {
    enum class Kind { Homogeneous, Heterogeneous } kind = Kind::Heterogeneous;
    double lambda = 0.32;                 // homogeneous continuation probability
    BoundedPowerLawParam powerlaw{};      // heterogeneous per-node continuation law

    static DegreeModel homogeneous(double lambda)
    {
        DegreeModel m;
        m.kind = Kind::Homogeneous;
        m.lambda = lambda;
        return m;
    }
    static DegreeModel heterogeneous(double exponent, double lower, double upper = 1.0)
    {
        DegreeModel m;
        m.kind = Kind::Heterogeneous;
        m.powerlaw = {exponent, lower, upper};
        return m;
    }
};

struct ModelParams {
    double leave_prob = 0.085;        // active -> inactive switch probability per step
    double arrive_prob = 0.0048;      // inactive -> active switch probability per step
    DegreeModel degree;
    double link_create_prob = 0.02;   // per-step link creation within the copy lifetime
    double link_break_prob = 0.085;   // per-step link break after creation
    std::uint32_t delta_steps = 36;   // indirect transmission window
    double novelty_weight = 0.1;      // weight of choosing a brand-new contact
    double triadic_fraction = 0.4;    // share of new contacts taken from contacts-of-contacts
    std::uint32_t n_nodes = 0;
    TimeGrid grid;
    std::uint64_t master_seed = 0;
    std::uint32_t threads = 0;        // 0: hardware concurrency
    std::uint64_t max_links = 2'000'000'000ULL; // guidance cap on the estimate

    void check() const;
};

// Activity-driven baseline: per node, one activation opportunity every
// adn_step_seconds; on activation, links to uniformly random distinct nodes
// lasting exactly one activity step. Direct links only (delta = 0).
struct AdnParams {
    BoundedPowerLawParam activity{2.95, 0.02, 0.18}; // activation potential law
    std::uint32_t links_per_activation = 3;          // homogeneous m
    bool heterogeneous_degree = false;               // draw m from the SPDT degree model
    DegreeModel degree;                              // used when heterogeneous_degree
    std::uint32_t adn_step_seconds = 3000;           // 50-minute stay periods
};

// Draw the full activation sequence of one node: stationary initial state,
// then alternating geometric active/inactive periods until the horizon.
// Copies truncated by the horizon are kept.
std::vector<ActiveCopy> generate_activations(const ModelParams &params, NodeId node,
                                             RandomStream &rng);

// Reinforcement-with-memory neighbour selection state. Contact sets only
// grow; growth happens exclusively through the new-neighbour branch.
class SocialState {
  public:
    SocialState(std::uint32_t n_nodes, std::vector<double> lambdas, double novelty_weight,
                double triadic_fraction);

    // d distinct neighbours for one active copy of `host`.
    std::vector<NodeId> select_neighbours(NodeId host, std::uint32_t d, RandomStream &rng);

    const std::vector<NodeId> &contacts(NodeId node) const { return contacts_[node]; }
    const std::vector<double> &lambdas() const { return lambdas_; }

  private:
    NodeId draw_global(RandomStream &rng);

    std::uint32_t n_nodes_;
    double novelty_weight_;
    double triadic_fraction_;
    std::vector<double> lambdas_; // empty: uniform global draws
    std::vector<std::vector<NodeId>> contacts_;
    // Vose alias table over lambdas_ for weighted global draws.
    std::vector<double> alias_prob_;
    std::vector<std::uint32_t> alias_idx_;
    // Per-copy scratch, reused across calls; marks are cleared on exit.
    std::vector<std::uint8_t> contact_mark_, chosen_mark_;
    std::vector<NodeId> available_, triadic_pool_, fallback_pool_;
};

// Timing for one link of a copy: creation delay (Eq. 6) and duration (Eq. 7).
std::vector<ContactLink> generate_links(const ActiveCopy &copy,
                                        const std::vector<NodeId> &neighbours,
                                        const ModelParams &params, RandomStream &rng);

// Full synthesis. Phase 1 draws activations, degrees and link timings from
// per-node streams (parallel); phase 2 resolves neighbour identities through
// SocialState in canonical copy order (sequential), so output depends only on
// the master seed.
ContactNetwork generate_network(const ModelParams &params);

// Same synthesis, but streams records through an external-sort writer so the
// full link set never has to fit in memory. Returns the number of links.
std::uint64_t generate_network_to_dir(const ModelParams &params, const std::string &dir,
                                      std::size_t max_buffered_links = 1u << 24);

ContactNetwork generate_adn(const AdnParams &adn, std::uint32_t n_nodes, const TimeGrid &grid,
                            std::uint64_t master_seed, std::uint32_t threads = 0);
std::uint64_t generate_adn_to_dir(const AdnParams &adn, std::uint32_t n_nodes,
                                  const TimeGrid &grid, std::uint64_t master_seed,
                                  const std::string &dir, std::uint32_t threads = 0,
                                  std::size_t max_buffered_links = 1u << 24);

// Rough expected link count, used for the out-of-memory guidance error.
double estimate_link_count(const ModelParams &params);

} // namespace spdt

#endif
