#include <doctest.h>

#include <cstdio>
#include <filesystem>

#include "ccmdvsp/core.hpp"
#include "ccmdvsp/fixtures.hpp"

using namespace ccmdvsp;

TEST_CASE("grid example schedules cost 20") {
    const Instance inst = fixtures::grid_example();
    CHECK(inst.num_trips() == 8);
    CHECK(inst.num_depots() == 2);
    CHECK(inst.num_arcs() == inst.num_pairs() + 32);
    CHECK(inst.num_pairs() == 22);
    CHECK(inst.pull_out_cost(0, 0) == 4);
    CHECK(schedule_cost(inst, fixtures::grid_left()) == 20);
    CHECK(schedule_cost(inst, fixtures::grid_right()) == 20);
    Schedule perm = fixtures::grid_left();
    std::swap(perm.buses[0], perm.buses[1]);
    CHECK(schedule_cost(inst, perm) == 20);
    CHECK(schedule_cost(Instance(InstanceData{}), Schedule{}) == 0);
}

TEST_CASE("schedule arcs round trip") {
    const Instance inst = fixtures::grid_example();
    for (const Schedule& s : {fixtures::grid_left(), fixtures::grid_right()}) {
        const Schedule back = schedule_from_arcs(inst, schedule_arcs(inst, s));
        CHECK(schedule_to_json(canonical(back), inst) == schedule_to_json(canonical(s), inst));
    }
    const Schedule left = schedule_from_arcs(inst, schedule_arcs(inst, fixtures::grid_left()));
    bool found = false;
    for (const Bus& b : left.buses)
        if (b.trips == std::vector<int>{0, 2, 3, 1}) found = true;
    CHECK(found);

    std::vector<Arc> single = {{Arc::Kind::PullOut, 0, 4, 0}, {Arc::Kind::PullIn, 4, 0, 0}};
    Instance sub = inst.restrict_to({4});
    std::vector<Arc> sub_arcs = {{Arc::Kind::PullOut, 0, 0, 0}, {Arc::Kind::PullIn, 0, 0, 0}};
    CHECK(schedule_from_arcs(sub, sub_arcs).buses.size() == 1);

    auto arcs = schedule_arcs(inst, fixtures::grid_left());
    arcs.push_back({Arc::Kind::PullOut, 1, 0, 1});
    arcs.push_back({Arc::Kind::PullIn, 0, 1, 1});
    CHECK_THROWS_AS(schedule_from_arcs(inst, arcs), InputError);
}

TEST_CASE("instance json validation") {
    const Instance inst = fixtures::grid_example();
    json j = instance_to_json(inst);
    const Instance back = instance_from_json(j);
    CHECK(instance_to_json(back) == j);

    json neg = j;
    neg["costs"]["pairs"][0][2] = -1;
    CHECK_THROWS_AS(instance_from_json(neg), InputError);

    json two = j;
    two["routes"] = json::array({json::array({1, 2}), json::array({2, 3, 4}), json::array({5, 6}), json::array({7, 8})});
    try {
        instance_from_json(two);
        FAIL("expected error");
    } catch (const InputError& e) {
        CHECK(std::string(e.what()).find("2") != std::string::npos);
    }

    const auto path = std::filesystem::temp_directory_path() / "ccmdvsp_inst.json";
    save_instance(inst, path.string());
    CHECK(instance_to_json(load_instance(path.string())) == j);
    std::filesystem::remove(path);
    CHECK_THROWS_AS(load_instance("/nonexistent/x.json"), InputError);
}

TEST_CASE("schedule validation") {
    const Instance inst = fixtures::grid_example();
    Schedule bad = fixtures::grid_left();
    bad.buses[0].trips.push_back(7);
    CHECK_THROWS_AS(validate_schedule(inst, bad), InputError);
    Schedule wrong_pair = fixtures::grid_left();
    std::swap(wrong_pair.buses[0].trips[1], wrong_pair.buses[0].trips[3]);
    CHECK_THROWS_AS(schedule_cost(inst, wrong_pair), InputError);
}

TEST_CASE("requirements") {
    CHECK(floor_count(100, 0.29) == 29);
    CHECK(max_violated_scenarios(750, 0.05) == 37);
    CHECK(max_violated_scenarios(40, 0.05) == 2);
    const Instance inst = fixtures::grid_example();
    const Requirements r = derive_requirements(inst, fixtures::grid_params());
    CHECK(r.f_trip == 7);
    CHECK(r.f_route == std::vector<int>{1, 1, 1, 1});
}
