#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "harbor/ma/market_access.hpp"
#include "harbor/ma/regions.hpp"
#include "harbor/util/csv.hpp"
#include "harbor/util/errors.hpp"
#include "harbor/util/rng.hpp"

#include "testutil/fixtures.hpp"
#include "testutil/oracles.hpp"

#include <cmath>

using namespace harbor;
using namespace harbor::ma;
using harbor::geo::Point;

TEST_CASE("market access from explicit costs") {
    SUBCASE("single port at distance zero") {
        const std::vector<double> costs = {0.0};
        CHECK(market_access_from_costs(costs, -1.0) == 1.0);
        CHECK(market_access_from_costs(costs, -8.0) == 1.0);
    }
    SUBCASE("ports at distances 1 and 3 with theta -1") {
        const std::vector<double> costs = {1.0, 3.0};
        CHECK(market_access_from_costs(costs, -1.0) == doctest::Approx(0.75).epsilon(1e-15));
    }
    SUBCASE("unreachable ports contribute nothing") {
        const std::vector<double> costs = {1.0, std::numeric_limits<double>::infinity()};
        CHECK(market_access_from_costs(costs, -1.0) == doctest::Approx(0.5).epsilon(1e-15));
    }
    SUBCASE("theta must be negative") {
        CHECK_THROWS_AS(market_access_from_costs(std::vector<double>{1.0}, 1.0), ConfigError);
    }
}

TEST_CASE("market_access on a water row surface") {
    const auto s = fixtures::make_surface(5, 1, {0, 0, 0, 0, 0});
    const ParishSite parish{"p", {1.5, 0.5}, Region::Reference};
    const std::vector<Port> ports = {
        {"near", {2.5, 0.5}, true, true}, // distance 1
        {"far", {4.5, 0.5}, true, true},  // distance 3
    };
    CHECK(market_access(parish, ports, -1.0, s) == doctest::Approx(0.75).epsilon(1e-12));
    CHECK_THROWS_AS(market_access(parish, {}, -1.0, s), DataError);
}

TEST_CASE("delta_log_ma: adding a close port") {
    const auto s = fixtures::make_surface(5, 1, {0, 0, 0, 0, 0});
    const ParishSite parish{"p", {1.5, 0.5}, Region::Reference};
    const std::vector<Port> ports = {
        {"new", {2.5, 0.5}, false, true}, // only in H*
        {"old", {4.5, 0.5}, true, true},  // in both
    };
    const MarketAccessRecord rec = delta_log_ma(parish, ports, -1.0, s);
    CHECK(rec.ma_before == doctest::Approx(0.25).epsilon(1e-12));
    CHECK(rec.ma_after == doctest::Approx(0.75).epsilon(1e-12));
    CHECK(rec.delta_log_ma == doctest::Approx(std::log(3.0)).epsilon(1e-12));
    CHECK(!rec.unreachable);
}

TEST_CASE("delta_log_ma: identical port sets give exactly zero") {
    const auto s = fixtures::make_surface(5, 1, {0, 0, 0, 0, 0});
    const ParishSite parish{"p", {0.5, 0.5}, Region::Reference};
    const std::vector<Port> ports = {
        {"a", {2.5, 0.5}, true, true},
        {"b", {4.5, 0.5}, true, true},
    };
    const MarketAccessRecord rec = delta_log_ma(parish, ports, -1.0, s);
    CHECK(rec.delta_log_ma == 0.0);
}

TEST_CASE("delta_log_ma requires a nonempty baseline set") {
    const auto s = fixtures::make_surface(3, 1, {0, 0, 0});
    const std::vector<Port> ports = {{"cf_only", {0.5, 0.5}, false, true}};
    const ParishSite parish{"p", {0.5, 0.5}, Region::Reference};
    CHECK_THROWS_AS(delta_log_ma(parish, ports, -1.0, s), DataError);
}

TEST_CASE("batch market access equals a hand-composed Bellman-Ford + formula oracle") {
    const auto s = fixtures::random_surface(20, 20, 51, 0.3);
    std::vector<ParishSite> parishes;
    for (int i = 0; i < 10; ++i) {
        parishes.push_back({"p" + std::to_string(i),
                            {static_cast<double>((i * 7) % 20) + 0.5,
                             static_cast<double>((i * 3) % 20) + 0.5},
                            Region::Reference});
    }
    std::vector<Port> ports;
    const int px[4] = {0, 19, 5, 12};
    const int py[4] = {0, 19, 14, 2};
    for (int k = 0; k < 4; ++k) {
        ports.push_back({"h" + std::to_string(k), {px[k] + 0.5, py[k] + 0.5}, k < 2, true});
    }

    const auto records = compute_market_access(parishes, ports, -1.0, s, 2);
    REQUIRE(records.size() == parishes.size());

    for (std::size_t i = 0; i < parishes.size(); ++i) {
        double before = 0.0, after = 0.0;
        const auto parish_cell = *s.snap(parishes[i].centroid);
        for (std::size_t k = 0; k < ports.size(); ++k) {
            auto port_cell = *s.snap(ports[k].location);
            if (s.cell(port_cell) == geo::CellClass::Land) {
                const auto moved = s.nearest_navigable(port_cell);
                if (!moved) continue;
                port_cell = *moved;
            }
            const auto dist = oracles::bellman_ford_distances(s, port_cell);
            const double d = dist[parish_cell.row * 20 + parish_cell.col];
            if (std::isinf(d)) continue;
            const double term = std::pow(d + 1.0, -1.0);
            if (ports[k].in_baseline) before += term;
            after += term;
        }
        CHECK(fixtures::near_abs(records[i].ma_before, before, 1e-9));
        CHECK(fixtures::near_abs(records[i].ma_after, after, 1e-9));
        if (before > 0.0) {
            CHECK(fixtures::near_abs(records[i].delta_log_ma,
                                     std::log(after) - std::log(before), 1e-9));
        }
    }
}

TEST_CASE("MA invariants on explicit cost vectors") {
    const std::vector<double> base = {0.5, 2.0, 7.0};
    const double ma_base = market_access_from_costs(base, -1.0);
    SUBCASE("bounded by the port count") {
        CHECK(ma_base > 0.0);
        CHECK(ma_base <= 3.0);
    }
    SUBCASE("adding a reachable port strictly increases MA") {
        std::vector<double> more = base;
        more.push_back(4.0);
        CHECK(market_access_from_costs(more, -1.0) > ma_base);
    }
    SUBCASE("MA shrinks as |theta| grows when distances are positive") {
        double prev = market_access_from_costs(base, -1.0);
        for (double theta : {-2.0, -4.0, -8.0, -16.0}) {
            const double ma = market_access_from_costs(base, theta);
            CHECK(ma <= prev + 1e-15);
            prev = ma;
        }
    }
    SUBCASE("delta log MA ignores uniform rescaling of MA") {
        const std::vector<double> h = {2.0, 3.0};
        const std::vector<double> hstar = {2.0, 3.0, 1.0};
        const double d1 = std::log(market_access_from_costs(hstar, -1.0)) -
                          std::log(market_access_from_costs(h, -1.0));
        const double c = 3.7;
        const double d2 = std::log(c * market_access_from_costs(hstar, -1.0)) -
                          std::log(c * market_access_from_costs(h, -1.0));
        CHECK(fixtures::near_abs(d1, d2, 1e-12));
    }
}

TEST_CASE("classify_region: buffer and side rules") {
    // Planar-km fixture: fjord along y=50 for x in [0,100]; coasts along
    // y=0 and y=100; divider crossing the fjord at x=50.
    geo::Geometry fjord;
    fjord.segments.push_back({{0.0, 50.0}, {100.0, 50.0}});
    geo::Geometry coast;
    coast.segments.push_back({{0.0, 0.0}, {100.0, 0.0}});
    coast.segments.push_back({{0.0, 100.0}, {100.0, 100.0}});
    const Point da{50.0, 55.0}, db{50.0, 45.0};

    SUBCASE("centroid on the divider line is middle") {
        CHECK(classify_region({50.0, 50.0}, fjord, coast, da, db) == Region::Middle);
    }
    SUBCASE("fifty km west of the divider is west") {
        CHECK(classify_region({0.0, 50.0}, fjord, coast, da, db) == Region::West);
    }
    SUBCASE("east side symmetric") {
        CHECK(classify_region({100.0, 50.0}, fjord, coast, da, db) == Region::East);
    }
    SUBCASE("nearer the coast than the fjord is reference") {
        CHECK(classify_region({50.0, 5.0}, fjord, coast, da, db) == Region::Reference);
    }
    SUBCASE("degenerate divider throws") {
        CHECK_THROWS_AS(classify_region({50.0, 50.0}, fjord, coast, da, da), ConfigError);
    }
}

TEST_CASE("classify_region matches the segment-distance oracle on 30 centroids") {
    geo::Geometry fjord;
    fjord.segments.push_back({{0.0, 50.0}, {100.0, 50.0}});
    geo::Geometry coast;
    coast.segments.push_back({{0.0, 0.0}, {100.0, 0.0}});
    coast.segments.push_back({{0.0, 100.0}, {100.0, 100.0}});
    const Point da{50.0, 55.0}, db{50.0, 45.0};

    Rng rng(303);
    for (int i = 0; i < 30; ++i) {
        const Point c{rng.next_unit() * 100.0, rng.next_unit() * 100.0};
        const Region got = classify_region(c, fjord, coast, da, db);

        const double d_fjord =
            oracles::segment_distance_reference(c.x, c.y, 0.0, 50.0, 100.0, 50.0);
        const double d_coast =
            std::min(oracles::segment_distance_reference(c.x, c.y, 0.0, 0.0, 100.0, 0.0),
                     oracles::segment_distance_reference(c.x, c.y, 0.0, 100.0, 100.0, 100.0));
        Region want;
        if (d_fjord >= d_coast) {
            want = Region::Reference;
        } else {
            const double d_div =
                oracles::segment_distance_reference(c.x, c.y, 50.0, 55.0, 50.0, 45.0);
            if (d_div < 20.0) want = Region::Middle;
            else want = c.x < 50.0 ? Region::West : Region::East;
        }
        CHECK(got == want);
    }
}

TEST_CASE("ports csv honours the observation threshold") {
    const auto dir = fixtures::temp_dir("ma");
    fixtures::write_file(dir / "ports.csv",
                         "id,lon,lat,in_baseline,in_counterfactual,observations\n"
                         "a,1.5,0.5,1,1,12\n"
                         "b,2.5,0.5,0,1,1\n"
                         "c,3.5,0.5,1,1,2\n");
    std::vector<std::string> warnings;
    const auto ports = read_ports_csv(dir / "ports.csv", {}, &warnings);
    REQUIRE(ports.size() == 2);
    CHECK(ports[0].id == "a");
    CHECK(ports[1].id == "c");
    CHECK(warnings.size() == 1);

    fixtures::write_file(dir / "bad.csv",
                         "id,lon,lat,in_baseline,in_counterfactual\n"
                         "x,1.0,1.0,1,0\n");
    CHECK_THROWS_AS(read_ports_csv(dir / "bad.csv"), DataError);
}

TEST_CASE("market access csv round trip") {
    const auto dir = fixtures::temp_dir("ma");
    std::vector<MarketAccessRecord> recs = {{"p1", 0.25, 0.75, std::log(3.0), -1.0, false}};
    write_market_access_csv(dir / "ma.csv", recs, 10.0, "config=test seed=1");
    const CsvTable t = read_csv(dir / "ma.csv");
    REQUIRE(t.rows.size() == 1);
    CHECK(t.rows[0][t.col("parish_id")] == "p1");
    CHECK(parse_double(t.rows[0][t.col("delta_log_ma")], "ma.csv") ==
          doctest::Approx(std::log(3.0)).epsilon(1e-12));
}

TEST_CASE("parish cut off from every placeable baseline port is flagged") {
    // One port buried deep inside land (no navigable cell within 5 cells):
    // it never gets placed, so baseline MA collapses to zero.
    std::vector<int> cells(20 * 20, 1);
    for (int r = 0; r < 20; ++r) cells[r * 20] = 0; // water column at col 0
    const auto s = fixtures::make_surface(20, 20, cells);
    const std::vector<Port> ports = {{"buried", {15.5, 10.5}, true, true}};
    const std::vector<ParishSite> parishes = {{"p", {0.5, 0.5}, Region::Reference}};
    std::vector<std::string> warnings;
    const auto records = compute_market_access(parishes, ports, -1.0, s, 1, &warnings);
    REQUIRE(records.size() == 1);
    CHECK(records[0].unreachable);
    CHECK(records[0].ma_before == 0.0);
    CHECK(records[0].delta_log_ma == 0.0);
    CHECK(warnings.size() == 2); // port placement + parish exclusion
}
