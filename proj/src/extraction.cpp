#include "spdt/extraction.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <unordered_map>

#include "spdt/errors.hpp"
#include "spdt/io.hpp"
#include "spdt/random.hpp"

namespace spdt {

namespace {
constexpr std::uint64_t kDensifyKey = 0xdd7;
constexpr double kEarthRadiusM = 6371000.0;
constexpr double kDegToRad = 3.14159265358979323846 / 180.0;
} // namespace

double haversine_m(double lat1, double lon1, double lat2, double lon2)
{
    const double phi1 = lat1 * kDegToRad, phi2 = lat2 * kDegToRad;
    const double dphi = (lat2 - lat1) * kDegToRad;
    const double dlam = (lon2 - lon1) * kDegToRad;
    const double a = std::sin(dphi / 2) * std::sin(dphi / 2) +
                     std::cos(phi1) * std::cos(phi2) * std::sin(dlam / 2) * std::sin(dlam / 2);
    return 2.0 * kEarthRadiusM * std::asin(std::min(1.0, std::sqrt(a)));
}

std::vector<StayVisit> detect_stays(std::span<const GpsUpdate> updates,
                                    const ExtractionParams &params)
{
    std::vector<StayVisit> stays;
    std::size_t i = 0;
    while (i < updates.size()) {
        if (!std::isfinite(updates[i].lat) || !std::isfinite(updates[i].lon) ||
            std::abs(updates[i].lat) > 90.0 || std::abs(updates[i].lon) > 180.0)
            throw data_error("malformed coordinates for user " +
                             std::to_string(updates[i].user));
        std::size_t j = i + 1;
        while (j < updates.size() && updates[j].user == updates[i].user &&
               updates[j].timestamp - updates[j - 1].timestamp <= params.gap_seconds &&
               haversine_m(updates[i].lat, updates[i].lon, updates[j].lat, updates[j].lon) <=
                   params.radius_m)
            ++j;
        // Medoid: member update with the minimum summed distance to the rest.
        std::size_t best = i;
        double best_sum = std::numeric_limits<double>::infinity();
        for (std::size_t a = i; a < j; ++a) {
            double sum = 0.0;
            for (std::size_t b = i; b < j; ++b)
                if (a != b)
                    sum += haversine_m(updates[a].lat, updates[a].lon, updates[b].lat,
                                       updates[b].lon);
            if (sum < best_sum) {
                best_sum = sum;
                best = a;
            }
        }
        stays.push_back(StayVisit{updates[i].user, updates[best].lat, updates[best].lon,
                                  updates[i].timestamp, updates[j - 1].timestamp});
        i = j;
    }
    return stays;
}

GpsTrace load_gps_csv(const std::string &path)
{
    std::ifstream in(path);
    if (!in)
        throw data_error("cannot open GPS file: " + path);
    GpsTrace trace;
    std::string line;
    std::size_t lineno = 0;
    std::vector<std::pair<std::int64_t, GpsUpdate>> raw; // original id, update
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r')
            line.pop_back();
        if (line.empty())
            continue;
        const char *p = line.data();
        const char *end = p + line.size();
        std::int64_t user;
        double lat, lon;
        std::int64_t ts;
        auto skip_comma = [&]() {
            if (p == end || *p != ',')
                return false;
            ++p;
            return true;
        };
        auto r1 = std::from_chars(p, end, user);
        if (r1.ec != std::errc()) {
            if (lineno == 1)
                continue; // header
            throw data_error(path + ":" + std::to_string(lineno) + ": bad user id");
        }
        p = r1.ptr;
        if (!skip_comma())
            throw data_error(path + ":" + std::to_string(lineno) + ": expected 4 fields");
        char *dend = nullptr;
        lat = std::strtod(p, &dend);
        p = dend;
        if (!skip_comma())
            throw data_error(path + ":" + std::to_string(lineno) + ": expected 4 fields");
        lon = std::strtod(p, &dend);
        p = dend;
        if (!skip_comma())
            throw data_error(path + ":" + std::to_string(lineno) + ": expected 4 fields");
        auto r4 = std::from_chars(p, end, ts);
        if (r4.ec != std::errc() || r4.ptr != end)
            throw data_error(path + ":" + std::to_string(lineno) + ": bad timestamp");
        if (user < 0)
            throw data_error(path + ":" + std::to_string(lineno) + ": negative user id");
        raw.push_back({user, GpsUpdate{0, lat, lon, ts}});
    }
    // Dense ids in original-id order; updates sorted by (user, time).
    std::vector<std::int64_t> ids;
    ids.reserve(raw.size());
    for (const auto &[id, u] : raw)
        ids.push_back(id);
    std::sort(ids.begin(), ids.end());
    ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
    trace.original_ids = ids;
    trace.n_users = (std::uint32_t)ids.size();
    for (auto &[id, u] : raw) {
        u.user = (NodeId)(std::lower_bound(ids.begin(), ids.end(), id) - ids.begin());
        trace.updates.push_back(u);
    }
    std::sort(trace.updates.begin(), trace.updates.end(),
              [](const GpsUpdate &a, const GpsUpdate &b) {
                  return a.user != b.user ? a.user < b.user : a.timestamp < b.timestamp;
              });
    return trace;
}

// --------------------------------------------------------- link pairing --

namespace {

struct CellIndex {
    // 25 m grid over a local equirectangular projection; exact distances are
    // still haversine, the grid only prunes candidates.
    double lat0, coslat0, cell_m;
    std::unordered_map<std::uint64_t, std::vector<std::uint32_t>> cells; // update indices

    std::int64_t cx(double lat, double lon) const
    {
        (void)lat;
        return (std::int64_t)std::floor(lon * kDegToRad * kEarthRadiusM * coslat0 / cell_m);
    }
    std::int64_t cy(double lat) const
    {
        return (std::int64_t)std::floor(lat * kDegToRad * kEarthRadiusM / cell_m);
    }
    static std::uint64_t key(std::int64_t x, std::int64_t y)
    {
        return (std::uint64_t)(x & 0xffffffffLL) << 32 | (std::uint64_t)(y & 0xffffffffLL);
    }
};

} // namespace

ContactNetwork extract_network(const GpsTrace &trace, const ExtractionParams &params)
{
    if (trace.updates.empty())
        throw data_error("extract: no GPS updates");
    if (params.delta_seconds % params.step_seconds != 0)
        throw data_error("extract: delta_seconds must be a multiple of step_seconds");
    const std::uint32_t delta_steps =
        (std::uint32_t)(params.delta_seconds / params.step_seconds);

    // Time origin: UTC midnight at or before the earliest update.
    std::int64_t min_ts = trace.updates.front().timestamp;
    for (const GpsUpdate &u : trace.updates)
        min_ts = std::min(min_ts, u.timestamp);
    const std::int64_t origin = (min_ts / kSecondsPerDay) * kSecondsPerDay -
                                (min_ts < 0 && min_ts % kSecondsPerDay != 0 ? kSecondsPerDay : 0);
    auto to_step = [&](std::int64_t ts) {
        return (std::uint32_t)((ts - origin) / params.step_seconds);
    };

    // Stays per user.
    std::vector<StayVisit> stays;
    for (std::size_t i = 0; i < trace.updates.size();) {
        std::size_t j = i;
        while (j < trace.updates.size() && trace.updates[j].user == trace.updates[i].user)
            ++j;
        auto user_stays = detect_stays(
            std::span<const GpsUpdate>(trace.updates.data() + i, j - i), params);
        stays.insert(stays.end(), user_stays.begin(), user_stays.end());
        i = j;
    }

    // Spatial index over all updates.
    double lat_sum = 0.0;
    for (const GpsUpdate &u : trace.updates)
        lat_sum += u.lat;
    CellIndex grid;
    grid.lat0 = lat_sum / double(trace.updates.size());
    grid.coslat0 = std::max(0.05, std::cos(grid.lat0 * kDegToRad));
    grid.cell_m = 25.0;
    for (std::uint32_t i = 0; i < trace.updates.size(); ++i) {
        const GpsUpdate &u = trace.updates[i];
        grid.cells[CellIndex::key(grid.cx(u.lat, u.lon), grid.cy(u.lat))].push_back(i);
    }

    // Pair links per host stay.
    struct RawLink {
        NodeId host;
        std::int64_t host_start, host_end;
        NodeId neighbour;
        std::int64_t join, leave;
    };
    std::vector<RawLink> raw_links;
    std::vector<std::pair<NodeId, std::uint32_t>> candidates; // (user, update index)
    for (const StayVisit &stay : stays) {
        if (stay.end <= stay.start)
            continue; // single-update or instantaneous visit, cannot expose anyone
        candidates.clear();
        const std::int64_t x = grid.cx(stay.lat, stay.lon);
        const std::int64_t y = grid.cy(stay.lat);
        for (std::int64_t dx = -1; dx <= 1; ++dx)
            for (std::int64_t dy = -1; dy <= 1; ++dy) {
                auto it = grid.cells.find(CellIndex::key(x + dx, y + dy));
                if (it == grid.cells.end())
                    continue;
                for (std::uint32_t ui : it->second) {
                    const GpsUpdate &u = trace.updates[ui];
                    if (u.user == stay.user || u.timestamp < stay.start)
                        continue;
                    if (haversine_m(stay.lat, stay.lon, u.lat, u.lon) <= params.radius_m)
                        candidates.push_back({u.user, ui});
                }
            }
        std::sort(candidates.begin(), candidates.end(),
                  [&](const auto &a, const auto &b) {
                      if (a.first != b.first)
                          return a.first < b.first;
                      return trace.updates[a.second].timestamp <
                             trace.updates[b.second].timestamp;
                  });
        // Presence windows per candidate user: same consecutive-gap rule as
        // stay detection; a window forms a link when it has at least two
        // updates and starts inside [host_start, host_end + delta].
        for (std::size_t i = 0; i < candidates.size();) {
            std::size_t j = i;
            while (j < candidates.size() && candidates[j].first == candidates[i].first)
                ++j;
            std::size_t w = i;
            while (w < j) {
                std::size_t we = w + 1;
                while (we < j &&
                       trace.updates[candidates[we].second].timestamp -
                               trace.updates[candidates[we - 1].second].timestamp <=
                           params.gap_seconds)
                    ++we;
                const std::int64_t w_start = trace.updates[candidates[w].second].timestamp;
                const std::int64_t w_end = trace.updates[candidates[we - 1].second].timestamp;
                if (we - w >= 2 && w_start <= stay.end + params.delta_seconds)
                    raw_links.push_back(RawLink{stay.user, stay.start, stay.end,
                                                candidates[i].first, w_start, w_end});
                w = we;
            }
            i = j;
        }
    }

    // Assembly onto the step grid. Host stays collapse to copies; copies that
    // collide after flooring merge into one spanning copy.
    struct StepCopy {
        std::uint32_t start, end;
    };
    std::sort(raw_links.begin(), raw_links.end(), [](const RawLink &a, const RawLink &b) {
        if (a.host != b.host) return a.host < b.host;
        return a.host_start < b.host_start;
    });

    std::vector<ContactLink> links;
    std::vector<ActiveCopy> copies;
    std::uint32_t max_step = 0;
    for (std::size_t i = 0; i < raw_links.size();) {
        const NodeId host = raw_links[i].host;
        std::size_t j = i;
        while (j < raw_links.size() && raw_links[j].host == host)
            ++j;
        // Merge host stay intervals on the step grid.
        std::vector<std::pair<StepCopy, std::vector<std::size_t>>> merged;
        for (std::size_t k = i; k < j; ++k) {
            const std::uint32_t s = to_step(raw_links[k].host_start);
            const std::uint32_t e = to_step(raw_links[k].host_end);
            if (e <= s)
                continue; // sub-step stay
            if (!merged.empty() && s <= merged.back().first.end) {
                merged.back().first.end = std::max(merged.back().first.end, e);
                merged.back().second.push_back(k);
            } else {
                merged.push_back({StepCopy{s, e}, {k}});
            }
        }
        for (auto &[interval, members] : merged) {
            bool any = false;
            for (std::size_t k : members) {
                const RawLink &rl = raw_links[k];
                const std::uint32_t join = to_step(rl.join);
                const std::uint32_t leave = to_step(rl.leave);
                if (leave <= join)
                    continue; // sub-step presence
                if (join >= interval.end + delta_steps)
                    continue; // window boundary collapsed by flooring
                links.push_back(
                    ContactLink{host, interval.start, interval.end, rl.neighbour, join, leave});
                max_step = std::max(max_step, join + 1);
                any = true;
            }
            if (any) {
                copies.push_back(ActiveCopy{host, interval.start, interval.end, 0, 0});
                max_step = std::max(max_step, interval.end);
            }
        }
        i = j;
    }

    const std::uint32_t spd = kSecondsPerDay / params.step_seconds;
    const std::uint32_t days = std::max<std::uint32_t>(1, (max_step + spd - 1) / spd);
    TimeGrid net_grid = TimeGrid::from_days(params.step_seconds, days);
    return assemble_network(net_grid, trace.n_users, delta_steps, std::move(copies),
                            std::move(links));
}

// -------------------------------------------------------------- densify --

ContactNetwork densify(const ContactNetwork &net, std::uint64_t seed, bool single_fill,
                       DensifyStats *stats)
{
    const std::uint32_t spd = net.grid.steps_per_day();
    const std::uint32_t days = net.grid.horizon_days();
    DensifyStats local{};

    std::vector<ActiveCopy> copies(net.copies);
    std::vector<ContactLink> links(net.links);

    for (NodeId host = 0; host < net.n_nodes; ++host) {
        const std::uint32_t cbegin = net.copy_offset[host];
        const std::uint32_t cend = net.copy_offset[host + 1];
        if (cbegin == cend)
            continue; // never active: left empty
        // Days on which this host has links (day of the copy start).
        std::vector<std::uint32_t> have;
        for (std::uint32_t ci = cbegin; ci < cend; ++ci)
            if (net.copies[ci].link_count > 0)
                have.push_back(net.copies[ci].start_step / spd);
        if (have.empty())
            continue;
        std::sort(have.begin(), have.end());
        have.erase(std::unique(have.begin(), have.end()), have.end());
        std::vector<std::uint32_t> missing;
        for (std::uint32_t d = 0; d < days; ++d)
            if (!std::binary_search(have.begin(), have.end(), d))
                missing.push_back(d);
        if (missing.empty())
            continue;

        RandomStream rng = RandomStream::derive(seed, kDensifyKey, host);
        std::vector<std::uint32_t> targets;
        if (single_fill)
            targets.push_back(missing[rng.next_below(missing.size())]);
        else
            targets = missing;

        // Existing copy intervals of the host, kept sorted for collision checks.
        std::vector<std::pair<std::uint32_t, std::uint32_t>> intervals;
        for (std::uint32_t ci = cbegin; ci < cend; ++ci)
            intervals.push_back({net.copies[ci].start_step, net.copies[ci].end_step});

        for (std::uint32_t target : targets) {
            const std::uint32_t src = have[rng.next_below(have.size())];
            const std::int64_t shift =
                (std::int64_t(target) - std::int64_t(src)) * std::int64_t(spd);
            for (std::uint32_t ci = cbegin; ci < cend; ++ci) {
                const ActiveCopy &c = net.copies[ci];
                if (c.link_count == 0 || c.start_step / spd != src)
                    continue;
                const std::int64_t ns = c.start_step + shift;
                const std::int64_t ne = c.end_step + shift;
                if (ns < 0 || ne > std::int64_t(net.grid.horizon_steps)) {
                    ++local.skipped_collisions;
                    continue;
                }
                // Inter-copy ordering must stay strict: a shifted copy that
                // touches an existing interval is skipped.
                const auto pos = std::lower_bound(
                    intervals.begin(), intervals.end(),
                    std::make_pair((std::uint32_t)ns, (std::uint32_t)ne));
                const bool clash_next =
                    pos != intervals.end() && pos->first <= (std::uint32_t)ne;
                const bool clash_prev = pos != intervals.begin() &&
                                        (pos - 1)->second >= (std::uint32_t)ns;
                if (clash_next || clash_prev) {
                    ++local.skipped_collisions;
                    continue;
                }
                intervals.insert(pos, {(std::uint32_t)ns, (std::uint32_t)ne});
                copies.push_back(ActiveCopy{host, (std::uint32_t)ns, (std::uint32_t)ne, 0, 0});
                for (std::uint32_t li = c.first_link; li < c.first_link + c.link_count; ++li) {
                    const ContactLink &l = net.links[li];
                    const std::int64_t join = l.join_step + shift;
                    const std::int64_t leave = l.leave_step + shift;
                    if (join < 0 || join >= std::int64_t(net.grid.horizon_steps))
                        continue;
                    links.push_back(ContactLink{host, (std::uint32_t)ns, (std::uint32_t)ne,
                                                l.neighbour, (std::uint32_t)join,
                                                (std::uint32_t)leave});
                    ++local.copied_links;
                }
            }
            ++local.filled_days;
        }
    }
    if (stats)
        *stats = local;
    return assemble_network(net.grid, net.n_nodes, net.delta_steps, std::move(copies),
                            std::move(links));
}

} // namespace spdt
