#include <doctest.h>

#include <cmath>
#include <filesystem>

#include "spdt/errors.hpp"
#include "spdt/extraction.hpp"
#include "spdt/io.hpp"

using namespace spdt;

namespace {

// ~1 metre of latitude in degrees.
constexpr double kLatM = 1.0 / 111320.0;

GpsUpdate at(NodeId user, double north_m, std::int64_t ts)
{
    return GpsUpdate{user, 31.0 + north_m * kLatM, 121.0, ts};
}

constexpr std::int64_t kDay = 86400;
// All fixtures live on one day starting at this epoch (a UTC midnight).
constexpr std::int64_t kBase = 1'500'000'000 / kDay * kDay;

std::int64_t clock_at(int hour, int minute) { return kBase + hour * 3600 + minute * 60; }

} // namespace

TEST_CASE("haversine distances")
{
    // One degree of latitude is ~111.2 km.
    CHECK(haversine_m(31.0, 121.0, 32.0, 121.0) == doctest::Approx(111195.0).epsilon(0.001));
    CHECK(haversine_m(31.0, 121.0, 31.0, 121.0) == 0.0);
    // 20 metres north.
    CHECK(haversine_m(31.0, 121.0, 31.0 + 20 * kLatM, 121.0) ==
          doctest::Approx(20.0).epsilon(0.01));
}

TEST_CASE("stay detection")
{
    ExtractionParams params;
    SUBCASE("single update is a zero-length visit")
    {
        const std::vector<GpsUpdate> u{at(0, 0, clock_at(9, 0))};
        const auto stays = detect_stays(u, params);
        REQUIRE(stays.size() == 1);
        CHECK(stays[0].start == stays[0].end);
    }
    SUBCASE("two updates 10 m and 10 min apart form one visit")
    {
        const std::vector<GpsUpdate> u{at(0, 0, clock_at(9, 0)), at(0, 10, clock_at(9, 10))};
        const auto stays = detect_stays(u, params);
        REQUIRE(stays.size() == 1);
        CHECK(stays[0].start == clock_at(9, 0));
        CHECK(stays[0].end == clock_at(9, 10));
    }
    SUBCASE("a 35-minute gap splits the visit")
    {
        const std::vector<GpsUpdate> u{
            at(0, 0, clock_at(9, 0)),  at(0, 5, clock_at(9, 10)), at(0, 8, clock_at(9, 20)),
            at(0, 6, clock_at(9, 55)), at(0, 2, clock_at(10, 5)), at(0, 4, clock_at(10, 15)),
        };
        const auto stays = detect_stays(u, params);
        REQUIRE(stays.size() == 2);
        CHECK(stays[0].start == clock_at(9, 0));
        CHECK(stays[0].end == clock_at(9, 20));
        CHECK(stays[1].start == clock_at(9, 55));
        CHECK(stays[1].end == clock_at(10, 15));
    }
    SUBCASE("leaving the 20 m radius splits the visit")
    {
        const std::vector<GpsUpdate> u{at(0, 0, clock_at(9, 0)), at(0, 25, clock_at(9, 5)),
                                       at(0, 26, clock_at(9, 10))};
        const auto stays = detect_stays(u, params);
        REQUIRE(stays.size() == 2);
    }
    SUBCASE("medoid is the central update")
    {
        const std::vector<GpsUpdate> u{at(0, 0, clock_at(9, 0)), at(0, 8, clock_at(9, 5)),
                                       at(0, 16, clock_at(9, 10))};
        const auto stays = detect_stays(u, params);
        REQUIRE(stays.size() == 1);
        CHECK(stays[0].lat == doctest::Approx(31.0 + 8 * kLatM));
    }
    SUBCASE("malformed coordinates rejected")
    {
        const std::vector<GpsUpdate> u{{0, 123.0, 500.0, clock_at(9, 0)}};
        CHECK_THROWS_AS(detect_stays(u, params), data_error);
    }
}

namespace {

// Three-user scenario: host 0 stays 09:00-10:00; user 1 is present
// 09:30-09:50 (direct/mixed); user 2 arrives 11:00, within delta = 3 h of the
// 10:00 departure, and stays to 11:40 (indirect-only).
GpsTrace fixture_trace()
{
    GpsTrace trace;
    auto add = [&](NodeId user, double north, int hh, int mm) {
        trace.updates.push_back(at(user, north, clock_at(hh, mm)));
    };
    add(0, 0, 9, 0);
    add(0, 5, 9, 15);
    add(0, 3, 9, 30);
    add(0, 6, 9, 45);
    add(0, 1, 10, 0);
    add(1, 4, 9, 30);
    add(1, 7, 9, 40);
    add(1, 2, 9, 50);
    add(2, 3, 11, 0);
    add(2, 8, 11, 20);
    add(2, 5, 11, 40);
    trace.n_users = 3;
    trace.original_ids = {0, 1, 2};
    return trace;
}

} // namespace

TEST_CASE("link extraction on the three-user fixture")
{
    // All users are treated as hosts, so besides the two expected links from
    // host 0 the extraction also finds 1->0 and 1->2 (user 2 enters within
    // delta of user 1's departure as well). The fixture checks host 0's view.
    const GpsTrace trace = fixture_trace();
    ExtractionParams params;
    const ContactNetwork net = extract_network(trace, params);
    CHECK(validate(net).empty());

    std::vector<ContactLink> host0;
    for (const ContactLink &l : net.links)
        if (l.host == 0)
            host0.push_back(l);
    REQUIRE(host0.size() == 2);

    const std::uint32_t nine = 9 * 12, ten = 10 * 12; // steps of 300 s
    bool copy_found = false;
    for (const ActiveCopy &c : net.copies)
        if (c.host == 0) {
            CHECK(c.start_step == nine);
            CHECK(c.end_step == ten);
            copy_found = true;
        }
    CHECK(copy_found);

    const ContactLink &direct = host0[0];
    CHECK(direct.neighbour == 1);
    CHECK(direct.join_step == nine + 6);   // 09:30
    CHECK(direct.leave_step == nine + 10); // 09:50
    CHECK(classify_link(direct) == LinkClass::DirectOnly);

    const ContactLink &indirect = host0[1];
    CHECK(indirect.neighbour == 2);
    CHECK(indirect.join_step == 11 * 12);
    CHECK(indirect.leave_step == 11 * 12 + 8);
    CHECK(classify_link(indirect) == LinkClass::IndirectOnly);
}

TEST_CASE("extraction rules")
{
    ExtractionParams params;
    SUBCASE("a single in-range update cannot form a link")
    {
        GpsTrace trace = fixture_trace();
        // Reduce user 1 to one update.
        std::erase_if(trace.updates, [](const GpsUpdate &u) {
            return u.user == 1 && u.timestamp != clock_at(9, 30);
        });
        const ContactNetwork net = extract_network(trace, params);
        for (const ContactLink &l : net.links)
            CHECK(!(l.host == 0 && l.neighbour == 1));
    }
    SUBCASE("arrival just past the delta window yields no link")
    {
        GpsTrace trace = fixture_trace();
        std::erase_if(trace.updates, [](const GpsUpdate &u) { return u.user == 2; });
        // First update delta + 1 seconds after the 10:00 departure.
        trace.updates.push_back(
            {2, 31.0, 121.0, clock_at(10, 0) + params.delta_seconds + 1});
        trace.updates.push_back(
            {2, 31.0, 121.0, clock_at(10, 0) + params.delta_seconds + 600});
        const ContactNetwork net = extract_network(trace, params);
        for (const ContactLink &l : net.links)
            CHECK(!(l.host == 0 && l.neighbour == 2));
    }
    SUBCASE("arrival one step inside the delta window is kept")
    {
        GpsTrace trace = fixture_trace();
        std::erase_if(trace.updates, [](const GpsUpdate &u) { return u.user == 2; });
        trace.updates.push_back(
            {2, 31.0, 121.0, clock_at(10, 0) + params.delta_seconds - 300});
        trace.updates.push_back(
            {2, 31.0, 121.0, clock_at(10, 0) + params.delta_seconds + 300});
        const ContactNetwork net = extract_network(trace, params);
        bool found = false;
        for (const ContactLink &l : net.links)
            found = found || (l.host == 0 && l.neighbour == 2);
        CHECK(found);
    }
    SUBCASE("arrival exactly at delta collapses onto the boundary step and is dropped")
    {
        // In seconds the window is inclusive, but flooring an exactly-delta
        // arrival onto the grid lands on the first step outside the copy
        // lifetime, which the link invariants exclude.
        GpsTrace trace = fixture_trace();
        std::erase_if(trace.updates, [](const GpsUpdate &u) { return u.user == 2; });
        trace.updates.push_back({2, 31.0, 121.0, clock_at(10, 0) + params.delta_seconds});
        trace.updates.push_back(
            {2, 31.0, 121.0, clock_at(10, 0) + params.delta_seconds + 600});
        const ContactNetwork net = extract_network(trace, params);
        for (const ContactLink &l : net.links)
            CHECK(!(l.host == 0 && l.neighbour == 2));
    }
    SUBCASE("neighbour presence before the host arrival is clipped")
    {
        GpsTrace trace = fixture_trace();
        // User 1 also pings in range at 08:55 and 09:20. Updates before the
        // host arrival (09:00) do not open the window; it starts at 09:20.
        trace.updates.push_back(at(1, 4, clock_at(8, 55)));
        trace.updates.push_back(at(1, 5, clock_at(9, 20)));
        std::sort(trace.updates.begin(), trace.updates.end(),
                  [](const GpsUpdate &a, const GpsUpdate &b) {
                      return a.user != b.user ? a.user < b.user : a.timestamp < b.timestamp;
                  });
        const ContactNetwork net = extract_network(trace, params);
        std::vector<ContactLink> host0;
        for (const ContactLink &l : net.links)
            if (l.host == 0)
                host0.push_back(l);
        REQUIRE(host0.size() == 2);
        CHECK(host0[0].join_step == 9 * 12 + 4);
        CHECK(host0[0].leave_step == 9 * 12 + 10);
    }
}

TEST_CASE("densification")
{
    // Build a 3-day network where host 0 is active on day 0 only and host 1
    // on all days. Nodes 2 and 3 are passive neighbours.
    const TimeGrid grid = TimeGrid::from_days(300, 3);
    std::vector<ActiveCopy> copies;
    std::vector<ContactLink> links;
    auto add_copy = [&](NodeId host, std::uint32_t s, std::uint32_t e, NodeId nb) {
        copies.push_back({host, s, e, 0, 0});
        links.push_back({host, s, e, nb, s + 1, s + 5});
    };
    add_copy(0, 10, 20, 2);
    add_copy(0, 50, 60, 3);
    for (std::uint32_t day = 0; day < 3; ++day)
        add_copy(1, day * 288 + 100, day * 288 + 110, 2);
    const ContactNetwork net =
        assemble_network(grid, 4, 36, std::move(copies), std::move(links));

    SUBCASE("fully active hosts are unchanged; missing days are filled")
    {
        DensifyStats stats;
        const ContactNetwork dense = densify(net, 77, false, &stats);
        CHECK(validate(dense).empty());
        CHECK(stats.filled_days == 2);     // host 0: days 1 and 2
        CHECK(stats.copied_links == 4);    // two links per filled day
        CHECK(stats.skipped_collisions == 0);
        // Host 1 untouched: 3 copies before and after.
        std::uint32_t host1 = 0;
        for (const ActiveCopy &c : dense.copies)
            if (c.host == 1)
                ++host1;
        CHECK(host1 == 3);
        // Link-count conservation: original 5 + 4 copied.
        CHECK(dense.links.size() == 9);
        // Existing links unchanged.
        for (const ContactLink &l : net.links) {
            bool found = false;
            for (const ContactLink &m : dense.links)
                found = found || (m.host == l.host && m.copy_start == l.copy_start &&
                                  m.neighbour == l.neighbour && m.join_step == l.join_step);
            CHECK(found);
        }
    }
    SUBCASE("single-fill copies exactly one day")
    {
        DensifyStats stats;
        const ContactNetwork dense = densify(net, 78, true, &stats);
        CHECK(stats.filled_days == 1);
        CHECK(dense.links.size() == 7);
    }
    SUBCASE("day-shifted copies carry day-shifted timestamps")
    {
        const ContactNetwork dense = densify(net, 79, false, nullptr);
        for (const ActiveCopy &c : dense.copies) {
            if (c.host != 0 || c.start_step < 288)
                continue;
            CHECK(c.start_step % 288 == 10 % 288);
            (void)c;
        }
    }
    SUBCASE("determinism")
    {
        const ContactNetwork a = densify(net, 80, false, nullptr);
        const ContactNetwork b = densify(net, 80, false, nullptr);
        REQUIRE(a.links.size() == b.links.size());
        for (std::size_t i = 0; i < a.links.size(); ++i)
            CHECK(a.links[i].join_step == b.links[i].join_step);
    }
}

TEST_CASE("gps csv loading remaps sparse ids")
{
    namespace fs = std::filesystem;
    const std::string dir = (fs::temp_directory_path() / "spdt_gps").string();
    fs::create_directories(dir);
    write_text_file(dir + "/u.csv", "user_id,lat,lon,unix_timestamp\n"
                                    "900,31.0,121.0,86400\n"
                                    "17,31.0001,121.0,86460\n"
                                    "900,31.0,121.0001,86520\n");
    const GpsTrace trace = load_gps_csv(dir + "/u.csv");
    CHECK(trace.n_users == 2);
    CHECK(trace.original_ids == std::vector<std::int64_t>{17, 900});
    CHECK(trace.updates.size() == 3);
    CHECK(trace.updates[0].user == 0); // user 17 first
    CHECK_THROWS_AS(load_gps_csv(dir + "/missing.csv"), data_error);
}
