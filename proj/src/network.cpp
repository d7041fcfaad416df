#include "spdt/network.hpp"

#include <algorithm>

#include "spdt/errors.hpp"

namespace spdt {

const char *link_class_name(LinkClass c)
{
    switch (c) {
    case LinkClass::DirectOnly: return "direct-only";
    case LinkClass::Mixed: return "mixed";
    case LinkClass::IndirectOnly: return "indirect-only";
    }
    return "?";
}

std::uint32_t ContactNetwork::concurrent_copies(NodeId node, std::uint64_t step) const
{
    if (node >= n_nodes)
        throw data_error("unknown node id " + std::to_string(node) + " (node count " +
                         std::to_string(n_nodes) + ")");
    std::uint32_t count = 0;
    for (std::uint32_t i = copy_offset[node]; i < copy_offset[node + 1]; ++i) {
        const ActiveCopy &c = copies[i];
        if (c.start_step <= step && step < std::uint64_t(c.end_step) + delta_steps)
            ++count;
    }
    return count;
}

void ContactNetwork::rebuild_copy_offsets()
{
    copy_offset.assign(n_nodes + 1, 0);
    for (const ActiveCopy &c : copies)
        ++copy_offset[c.host + 1];
    for (std::uint32_t i = 0; i < n_nodes; ++i)
        copy_offset[i + 1] += copy_offset[i];
}

ContactNetwork assemble_network(TimeGrid grid, std::uint32_t n_nodes, std::uint32_t delta_steps,
                                std::vector<ActiveCopy> copies, std::vector<ContactLink> links)
{
    ContactNetwork net;
    net.grid = grid;
    net.n_nodes = n_nodes;
    net.delta_steps = delta_steps;
    net.copies = std::move(copies);
    net.links = std::move(links);

    std::sort(net.copies.begin(), net.copies.end(), [](const ActiveCopy &a, const ActiveCopy &b) {
        return a.host != b.host ? a.host < b.host : a.start_step < b.start_step;
    });
    std::sort(net.links.begin(), net.links.end(), link_less);
    net.rebuild_copy_offsets();

    // Attach links to their copies; both sides share the (host, start) order.
    std::size_t li = 0;
    for (ActiveCopy &c : net.copies) {
        c.first_link = (std::uint32_t)li;
        while (li < net.links.size() && net.links[li].host == c.host &&
               net.links[li].copy_start == c.start_step) {
            if (net.links[li].copy_end != c.end_step)
                throw data_error("link copy_end disagrees with copy: host " +
                                 std::to_string(c.host) + " copy start " +
                                 std::to_string(c.start_step));
            ++li;
        }
        c.link_count = (std::uint32_t)(li - c.first_link);
    }
    if (li != net.links.size())
        throw data_error("link references a missing active copy: host " +
                         std::to_string(net.links[li].host) + " copy start " +
                         std::to_string(net.links[li].copy_start));

    const std::string problem = validate(net);
    if (!problem.empty())
        throw data_error("network validation failed: " + problem);
    return net;
}

std::string validate(const ContactNetwork &net)
{
    const std::uint64_t horizon = net.grid.horizon_steps;
    if (net.copy_offset.size() != std::size_t(net.n_nodes) + 1)
        return "copy offsets not built";
    for (std::size_t i = 0; i < net.copies.size(); ++i) {
        const ActiveCopy &c = net.copies[i];
        if (c.host >= net.n_nodes)
            return "copy " + std::to_string(i) + ": host id " + std::to_string(c.host) +
                   " out of range";
        if (!(c.start_step < c.end_step))
            return "copy " + std::to_string(i) + ": start_step " + std::to_string(c.start_step) +
                   " not before end_step " + std::to_string(c.end_step);
        if (c.end_step > horizon)
            return "copy " + std::to_string(i) + ": end_step " + std::to_string(c.end_step) +
                   " beyond horizon " + std::to_string(horizon);
        if (i > 0 && net.copies[i - 1].host == c.host &&
            !(c.start_step > net.copies[i - 1].end_step))
            return "copy " + std::to_string(i) + ": overlaps previous copy of host " +
                   std::to_string(c.host) + " (start " + std::to_string(c.start_step) +
                   " <= previous end " + std::to_string(net.copies[i - 1].end_step) + ")";
        if (c.first_link + std::uint64_t(c.link_count) > net.links.size())
            return "copy " + std::to_string(i) + ": link range out of bounds";
        for (std::uint32_t k = c.first_link; k < c.first_link + c.link_count; ++k) {
            const ContactLink &l = net.links[k];
            if (l.host != c.host || l.copy_start != c.start_step || l.copy_end != c.end_step)
                return "link " + std::to_string(k) + ": does not match its copy";
            if (l.neighbour == l.host)
                return "link " + std::to_string(k) + ": self-link on node " +
                       std::to_string(l.host);
            if (l.neighbour >= net.n_nodes)
                return "link " + std::to_string(k) + ": neighbour id " +
                       std::to_string(l.neighbour) + " out of range";
            if (!(l.join_step >= l.copy_start) ||
                !(l.join_step < std::uint64_t(l.copy_end) + net.delta_steps))
                return "link " + std::to_string(k) + ": join_step " + std::to_string(l.join_step) +
                       " outside copy lifetime [" + std::to_string(l.copy_start) + ", " +
                       std::to_string(l.copy_end) + "+" + std::to_string(net.delta_steps) + ")";
            if (!(l.join_step < l.leave_step))
                return "link " + std::to_string(k) + ": non-positive duration (join " +
                       std::to_string(l.join_step) + ", leave " + std::to_string(l.leave_step) +
                       ")";
            if (l.join_step >= horizon)
                return "link " + std::to_string(k) + ": join_step " + std::to_string(l.join_step) +
                       " at or beyond horizon " + std::to_string(horizon);
        }
    }
    // Every link must be owned by some copy range.
    std::uint64_t owned = 0;
    for (const ActiveCopy &c : net.copies)
        owned += c.link_count;
    if (owned != net.links.size())
        return "links not fully attached to copies (" + std::to_string(owned) + " of " +
               std::to_string(net.links.size()) + ")";
    if (!std::is_sorted(net.links.begin(), net.links.end(), link_less))
        return "links not in canonical order";
    return {};
}

} // namespace spdt
