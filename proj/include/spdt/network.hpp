#ifndef SPDT_NETWORK_HPP
#define SPDT_NETWORK_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "spdt/time_grid.hpp"

namespace spdt {

using NodeId = std::uint32_t;

// One activation interval of a node. The copy owns the links created during
// [start_step, end_step + delta); consecutive copies of a host are disjoint
// and strictly increasing even though lifetimes (with +delta) may overlap.
struct ActiveCopy {
    NodeId host = 0;
    std::uint32_t start_step = 0; // t_s
    std::uint32_t end_step = 0;   // t_l, exclusive of the +delta tail
    std::uint32_t first_link = 0; // index into ContactNetwork::links
    std::uint32_t link_count = 0;

    std::uint32_t duration() const { return end_step - start_step; }
};

// One timed edge from an active copy of `host` to `neighbour`. Copy timing is
// carried inline so a link row maps 1:1 onto a link-event file record.
struct ContactLink {
    NodeId host = 0;
    std::uint32_t copy_start = 0; // t_s
    std::uint32_t copy_end = 0;   // t_l
    NodeId neighbour = 0;
    std::uint32_t join_step = 0;  // t_s'
    std::uint32_t leave_step = 0; // t_l'
};

enum class LinkClass { DirectOnly, Mixed, IndirectOnly };

// Indirect-only iff the neighbour arrives at or after the host leaves;
// mixed iff it arrives before but stays past the host's departure.
inline LinkClass classify_link(const ContactLink &link)
{
    if (link.join_step >= link.copy_end)
        return LinkClass::IndirectOnly;
    if (link.leave_step > link.copy_end)
        return LinkClass::Mixed;
    return LinkClass::DirectOnly;
}

const char *link_class_name(LinkClass c);

// Canonical link order: (host, copy_start, join_step, neighbour, leave_step).
// copy_start stands in for the copy index: copies of a host never share a
// start step. Total order, so serialization is reproducible.
inline bool link_less(const ContactLink &a, const ContactLink &b)
{
    if (a.host != b.host) return a.host < b.host;
    if (a.copy_start != b.copy_start) return a.copy_start < b.copy_start;
    if (a.join_step != b.join_step) return a.join_step < b.join_step;
    if (a.neighbour != b.neighbour) return a.neighbour < b.neighbour;
    return a.leave_step < b.leave_step;
}

// Immutable after construction; safe for concurrent reads.
struct ContactNetwork {
    TimeGrid grid;
    std::uint32_t n_nodes = 0;
    std::uint32_t delta_steps = 0;
    std::vector<ActiveCopy> copies;   // sorted by (host, start_step); may include link-less copies
    std::vector<ContactLink> links;   // canonical order
    std::vector<std::uint32_t> copy_offset; // n_nodes+1 offsets into copies, by host

    // Copies of `node` alive (start <= step < end + delta) at `step`.
    std::uint32_t concurrent_copies(NodeId node, std::uint64_t step) const;

    void rebuild_copy_offsets();
};

// Assemble a network from copy intervals and links in any order: sorts both
// canonically, attaches links to copies, and validates every invariant.
ContactNetwork assemble_network(TimeGrid grid, std::uint32_t n_nodes, std::uint32_t delta_steps,
                                std::vector<ActiveCopy> copies, std::vector<ContactLink> links);

// First-violation check of every model invariant. Returns an empty string if
// the network is valid, otherwise a description of the first violation.
std::string validate(const ContactNetwork &net);

} // namespace spdt

#endif
