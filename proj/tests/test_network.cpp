#include <doctest.h>

#include "spdt/errors.hpp"
#include "spdt/network.hpp"

using namespace spdt;

namespace {

ContactNetwork tiny_network()
{
    // Node 0: copies [0,10) and [20,40); node 1 passive neighbour.
    TimeGrid grid = TimeGrid::from_days(300, 1);
    std::vector<ActiveCopy> copies{
        {0, 0, 10, 0, 0},
        {0, 20, 40, 0, 0},
    };
    std::vector<ContactLink> links{
        {0, 0, 10, 1, 2, 8},
        {0, 20, 40, 1, 25, 50},
    };
    return assemble_network(grid, 2, 36, std::move(copies), std::move(links));
}

} // namespace

TEST_CASE("link classification")
{
    // Indirect-only: neighbour arrives after the host leaves.
    CHECK(classify_link({0, 0, 10, 1, 12, 20}) == LinkClass::IndirectOnly);
    // Direct-only: neighbour leaves before the host.
    CHECK(classify_link({0, 0, 10, 1, 2, 8}) == LinkClass::DirectOnly);
    // Mixed: straddles the host departure.
    CHECK(classify_link({0, 0, 10, 1, 5, 15}) == LinkClass::Mixed);
    // Boundary: arrival exactly at the departure step is indirect.
    CHECK(classify_link({0, 0, 10, 1, 10, 15}) == LinkClass::IndirectOnly);
}

TEST_CASE("concurrent copies")
{
    const ContactNetwork net = tiny_network();
    CHECK(net.concurrent_copies(0, 25) == 2);  // first copy alive through 10+36
    CHECK(net.concurrent_copies(0, 5) == 1);
    CHECK(net.concurrent_copies(0, 80) == 0);  // 40+36 = 76 < 80
    CHECK(net.concurrent_copies(1, 25) == 0);
    CHECK_THROWS_AS(net.concurrent_copies(7, 0), data_error);
}

TEST_CASE("assemble validates invariants")
{
    TimeGrid grid = TimeGrid::from_days(300, 1);
    SUBCASE("self-link rejected")
    {
        std::vector<ActiveCopy> copies{{0, 0, 10, 0, 0}};
        std::vector<ContactLink> links{{0, 0, 10, 0, 2, 8}};
        CHECK_THROWS_AS(
            assemble_network(grid, 2, 36, std::move(copies), std::move(links)), data_error);
    }
    SUBCASE("join outside copy lifetime rejected")
    {
        std::vector<ActiveCopy> copies{{0, 0, 10, 0, 0}};
        std::vector<ContactLink> links{{0, 0, 10, 1, 46, 50}}; // 46 == 10 + 36
        CHECK_THROWS_AS(
            assemble_network(grid, 2, 36, std::move(copies), std::move(links)), data_error);
    }
    SUBCASE("overlapping copies of one host rejected")
    {
        std::vector<ActiveCopy> copies{{0, 0, 10, 0, 0}, {0, 10, 20, 0, 0}};
        CHECK_THROWS_AS(assemble_network(grid, 2, 36, std::move(copies), {}), data_error);
    }
    SUBCASE("link without a copy rejected")
    {
        std::vector<ContactLink> links{{0, 0, 10, 1, 2, 8}};
        CHECK_THROWS_AS(assemble_network(grid, 2, 36, {}, std::move(links)), data_error);
    }
    SUBCASE("copies may be truncated at the horizon but not beyond")
    {
        std::vector<ActiveCopy> ok{{0, 280, 288, 0, 0}};
        CHECK(validate(assemble_network(grid, 2, 36, std::move(ok), {})).empty());
        std::vector<ActiveCopy> bad{{0, 280, 289, 0, 0}};
        CHECK_THROWS_AS(assemble_network(grid, 2, 36, std::move(bad), {}), data_error);
    }
}

TEST_CASE("validate passes a correct network and link-less copies survive")
{
    const ContactNetwork net = tiny_network();
    CHECK(validate(net).empty());
    CHECK(net.copies.size() == 2);
    CHECK(net.links.size() == 2);
}

TEST_CASE("time grid invariants")
{
    CHECK_THROWS_AS(TimeGrid(7, 100), data_error);      // 7 does not divide 86400
    CHECK_THROWS_AS(TimeGrid(300, 100), data_error);    // not a whole day
    const TimeGrid g = TimeGrid::from_days(300, 7);
    CHECK(g.steps_per_day() == 288);
    CHECK(g.horizon_steps == 2016);
    CHECK(g.horizon_days() == 7);
    CHECK(g.day_of_step(287) == 0);
    CHECK(g.day_of_step(288) == 1);
    CHECK(g.step_to_seconds(2) == 600.0);
}
