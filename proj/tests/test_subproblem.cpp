#include <doctest.h>

#include <random>

#include "ccmdvsp/fixtures.hpp"
#include "ccmdvsp/subproblem.hpp"
#include "support/random_cases.hpp"

using namespace ccmdvsp;

TEST_CASE("greedy: worked chain") {
    const Instance inst = fixtures::worked_chain();
    const ScenarioSet sc = fixtures::chain_scenario(inst);
    const GreedyResult g = greedy_evaluate(inst, fixtures::chain_params(), fixtures::chain_schedule(), sc, 0);
    CHECK(std::vector<int>(g.y.begin(), g.y.begin() + 6) == std::vector<int>{6, 24, 39, 60, 74, 97});
    CHECK(g.delayed == std::vector<int>{3, 5});
    CHECK(g.z == 1);
    REQUIRE(g.violated.size() == 1);
    CHECK(g.violated[0] == Requirement::trip());
    CHECK(g.y[6] == 29);
    CHECK(g.v[6] == 1);
}

TEST_CASE("greedy: grid example scenario verdicts") {
    const Instance inst = fixtures::grid_example();
    const ScenarioSet sc = fixtures::grid_scenarios(inst);
    const ServiceParams par = fixtures::grid_params();
    auto left0 = greedy_evaluate(inst, par, fixtures::grid_left(), sc, 0);
    auto left1 = greedy_evaluate(inst, par, fixtures::grid_left(), sc, 1);
    auto right0 = greedy_evaluate(inst, par, fixtures::grid_right(), sc, 0);
    auto right1 = greedy_evaluate(inst, par, fixtures::grid_right(), sc, 1);
    CHECK(left0.delayed == std::vector<int>{2, 3});
    CHECK(left1.delayed == std::vector<int>{1, 3});
    CHECK(right0.delayed == std::vector<int>{5});
    CHECK(right1.delayed == std::vector<int>{3});
    CHECK(left0.z == 1);
    CHECK(left1.z == 1);
    CHECK(right0.z == 0);
    CHECK(right1.z == 0);
    const int limit = max_violated_scenarios(2, par.epsilon);
    CHECK(count_violated_scenarios(inst, par, fixtures::grid_left(), sc) > limit);
    CHECK(count_violated_scenarios(inst, par, fixtures::grid_right(), sc) <= limit);
}

TEST_CASE("greedy: single-trip buses are never violated") {
    const Instance inst = testsupport::small_instance(12, 2, 5);
    const ScenarioSet sc = sample_scenarios(inst, 20, 3);
    Schedule singles;
    for (int i = 0; i < inst.num_trips(); ++i) singles.buses.push_back(Bus{i % 2, {i}});
    CHECK(count_violated_scenarios(inst, ServiceParams{}, singles, sc) == 0);
}

TEST_CASE("greedy: monotone in travel times and expressing") {
    std::mt19937_64 rng(3);
    for (int t = 0; t < 30; ++t) {
        const Instance inst = testsupport::small_instance(10, 2, 100 + t);
        const ScenarioSet sc = sample_scenarios(inst, 1, t);
        const Schedule sched = testsupport::random_schedule(inst, rng);
        const ServiceParams par;
        const GreedyResult base = greedy_evaluate(inst, par, sched, sc, 0);
        ScenarioSet slower = sc;
        for (int i = 0; i < inst.num_trips(); ++i) slower.dur(0, i) += static_cast<int>(rng() % 3);
        const GreedyResult g2 = greedy_evaluate(inst, par, sched, slower, 0);
        for (int i = 0; i < inst.num_trips(); ++i) CHECK(g2.y[i] >= base.y[i]);

        InstanceData d = inst.data();
        for (auto& tr : d.trips) tr.e = 0;
        const GreedyResult noexp = greedy_evaluate(Instance(d), par, sched, sc, 0);
        for (int i = 0; i < inst.num_trips(); ++i) CHECK(noexp.y[i] >= base.y[i]);

        CHECK(violated_requirements(inst, derive_requirements(inst, par), base.v) == base.violated);
    }
}

TEST_CASE("oracle: worked chain and on-time schedules") {
    const Instance inst = fixtures::worked_chain();
    const ScenarioSet sc = fixtures::chain_scenario(inst);
    auto o = milp_subproblem_oracle(inst, fixtures::chain_params(), fixtures::chain_schedule(), sc, 0);
    REQUIRE(o.status == milp::Status::Optimal);
    CHECK(o.z == 1);
    CHECK(o.on_time == 6);

    Schedule singles;
    for (int i = 0; i < inst.num_trips(); ++i) singles.buses.push_back(Bus{0, {i}});
    auto o2 = milp_subproblem_oracle(inst, fixtures::chain_params(), singles, sc, 0);
    CHECK(o2.z == 0);
    CHECK(o2.on_time == 8);
}

TEST_CASE("oracle agrees with greedy on random cases") {
    std::mt19937_64 rng(17);
    int cases = 0, violated = 0;
    for (int t = 0; t < 60; ++t) {
        const Instance inst = testsupport::tight_instance(6 + t % 8, 2, 500 + t);
        const ScenarioSet sc = sample_scenarios(inst, 2, t);
        const Schedule sched = testsupport::random_schedule(inst, rng, 0.9);
        ServiceParams par;
        par.delta_trip = 0.8;
        par.ub = 2;
        for (int s = 0; s < sc.size(); ++s) {
            const GreedyResult g = greedy_evaluate(inst, par, sched, sc, s);
            const OracleResult o = milp_subproblem_oracle(inst, par, sched, sc, s);
            REQUIRE(o.status == milp::Status::Optimal);
            CHECK(o.z == g.z);
            CHECK(o.on_time == g.on_time);
            for (int i = 0; i < inst.num_trips(); ++i) CHECK(o.y[i] == doctest::Approx(g.y[i]));
            ++cases;
            violated += g.z;
        }
    }
    CHECK(cases == 120);
    CHECK(violated > 20);
}
