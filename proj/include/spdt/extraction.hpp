#ifndef SPDT_EXTRACTION_HPP
#define SPDT_EXTRACTION_HPP

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "spdt/network.hpp"

namespace spdt {

struct GpsUpdate {
    NodeId user = 0;
    double lat = 0.0; // WGS-84 degrees
    double lon = 0.0;
    std::int64_t timestamp = 0; // seconds since epoch
};

struct StayVisit {
    NodeId user = 0;
    double lat = 0.0; // medoid update coordinates
    double lon = 0.0;
    std::int64_t start = 0; // seconds
    std::int64_t end = 0;
};

struct ExtractionParams {
    double radius_m = 20.0;            // airborne-particle travel distance
    std::int64_t gap_seconds = 1800;   // max spacing of consecutive in-stay updates
    std::int64_t delta_seconds = 10800;// indirect window after host departure
    std::uint32_t step_seconds = 300;
};

double haversine_m(double lat1, double lon1, double lat2, double lon2);

// Greedy stay segmentation of one user's time-sorted updates: grow while each
// update stays within radius of the segment's first update and within
// gap_seconds of the previous one. The visit centre is the medoid update.
std::vector<StayVisit> detect_stays(std::span<const GpsUpdate> user_updates,
                                    const ExtractionParams &params);

// Loaded GPS trace with user ids remapped to dense [0, N).
struct GpsTrace {
    std::vector<GpsUpdate> updates;           // sorted by (user, timestamp)
    std::vector<std::int64_t> original_ids;   // dense id -> original id
    std::uint32_t n_users = 0;
};

GpsTrace load_gps_csv(const std::string &path);

// Full SDT extraction: stay detection for every user, link pairing against a
// 25 m spatial grid, and assembly onto the step grid (the time origin is the
// UTC midnight before the earliest update).
ContactNetwork extract_network(const GpsTrace &trace, const ExtractionParams &params);

// SDT -> DDT: for each host, fill days without host links by copying the
// host links of a uniformly chosen available day, shifted by whole days.
// single_fill copies one available day to one missing day only.
struct DensifyStats {
    std::uint64_t filled_days = 0;
    std::uint64_t copied_links = 0;
    std::uint64_t skipped_collisions = 0;
};
ContactNetwork densify(const ContactNetwork &net, std::uint64_t seed, bool single_fill = false,
                       DensifyStats *stats = nullptr);

} // namespace spdt

#endif
