#include <doctest.h>

#include <random>

#include "ccmdvsp/bnc.hpp"
#include "ccmdvsp/fixtures.hpp"
#include "support/brute.hpp"
#include "support/random_cases.hpp"

using namespace ccmdvsp;

namespace {

ServiceParams tight_params() {
    ServiceParams par;
    par.ub = 2;
    par.delta_trip = 0.9;
    par.delta_route = 0.7;
    par.epsilon = 0.2;
    return par;
}

}  // namespace

TEST_CASE("master size and probability row") {
    const Instance inst = fixtures::grid_example();
    ServiceParams par = fixtures::grid_params();
    const ScenarioSet sc = fixtures::grid_scenarios(inst);
    const Master ms = build_master(inst, par, sc, BnCConfig{});
    // |C| K pair arcs, 2 K I depot arcs, one z per scenario
    CHECK(ms.model.num_vars() == 22 * 2 + 32 + 2);
    CHECK(ms.pair_var.size() == 44);
    CHECK(ms.pull_out_var.size() + ms.pull_in_var.size() == 32);
    const ScenarioSet big = sample_scenarios(inst, 40, 1);
    par.epsilon = 0.05;
    const Master m40 = build_master(inst, par, big, BnCConfig{});
    CHECK(m40.model.rows().back().rhs == 2);
    par.epsilon = 0.0;
    const Master m0 = build_master(inst, par, big, BnCConfig{});
    CHECK(m0.model.rows().back().rhs == 0);
    BnCConfig capped;
    capped.max_master_vars = 10;
    CHECK_THROWS_AS(build_master(inst, par, big, capped), InputError);
}

TEST_CASE("bnc on the grid scenarios picks the right-hand schedule") {
    const Instance inst = fixtures::grid_example();
    const ScenarioSet sc = fixtures::grid_scenarios(inst);
    const ServiceParams par = fixtures::grid_params();
    for (CutKind fam : {CutKind::NoGood, CutKind::StrongNoGood, CutKind::MIS, CutKind::CMIS, CutKind::ECMIS}) {
        BnCConfig cfg;
        cfg.cut_family = fam;
        const BnCResult r = solve_bnc(inst, par, sc, cfg);
        REQUIRE(r.status == milp::Status::Optimal);
        CHECK(r.objective == 20);
        CHECK(r.violated <= max_violated_scenarios(2, par.epsilon));
        CHECK(r.objective == doctest::Approx(testsupport::brute_saa_optimum(inst, par, sc)));
    }
}

TEST_CASE("cut generation: several requirements and relaxed z") {
    // Trip-level and route-level violation in the worked chain scenario.
    const Instance inst = fixtures::worked_chain();
    const ScenarioSet sc = fixtures::chain_scenario(inst);
    ServiceParams par = fixtures::chain_params();
    par.delta_route = 1.0;
    BnCConfig cfg;
    cfg.cut_family = CutKind::ECMIS;
    cfg.relax_z = true;
    const Master ms = build_master(inst, par, sc, cfg);
    CutGenState st;
    st.inst = &inst;
    st.params = &par;
    st.scen = &sc;
    st.master = &ms;
    st.cfg = cfg;
    st.req = derive_requirements(inst, par);
    const Schedule sched = fixtures::chain_schedule();
    CHECK(greedy_evaluate(inst, par, sched, sc, 0).violated.size() == 3);
    const auto cuts = cut_generation_routine(sched, {0.4}, st);
    // the route containing trip 6 yields the same pair set as the trip level
    CHECK(cuts.size() == 2);
    for (const Cut& c : cuts) {
        CHECK(cut_violated(inst, c, sched, 0));
        // at the generating schedule the row forces z_s = 1
        CHECK(cut_lhs(inst, c, sched) - c.rhs + 1 == 1);
    }
    CHECK(cut_generation_routine(sched, {0.4}, st).empty());
    CHECK(cut_generation_routine(sched, {1.0}, st).empty());
}

TEST_CASE("bnc matches enumeration across families and variants") {
    int solved = 0;
    for (int t = 0; t < 6; ++t) {
        const Instance inst = testsupport::tight_instance(6, 2, 2000 + t);
        const ScenarioSet sc = sample_scenarios(inst, 6, 50 + t);
        const ServiceParams par = tight_params();
        const long long expect = testsupport::brute_saa_optimum(inst, par, sc);
        REQUIRE(expect >= 0);
        for (CutKind fam : {CutKind::NoGood, CutKind::StrongNoGood, CutKind::MIS, CutKind::CMIS, CutKind::ECMIS})
            for (int variant = 0; variant < 4; ++variant) {
                BnCConfig cfg;
                cfg.cut_family = fam;
                cfg.use_vi = variant & 1;
                cfg.relax_z = variant & 2;
                const BnCResult r = solve_bnc(inst, par, sc, cfg);
                REQUIRE(r.status == milp::Status::Optimal);
                CHECK(r.objective == expect);
                CHECK(r.violated <= max_violated_scenarios(sc.size(), par.epsilon));
                CHECK(schedule_cost(inst, r.schedule) == expect);
                ++solved;
            }
    }
    CHECK(solved == 120);
}

TEST_CASE("bnc result json") {
    const Instance inst = fixtures::grid_example();
    const BnCResult r = solve_bnc(inst, fixtures::grid_params(), fixtures::grid_scenarios(inst), BnCConfig{});
    const json j = bnc_result_to_json(inst, r);
    for (const char* key : {"objective", "bound", "gap", "nodes", "cuts", "time_s", "schedule", "z"}) CHECK(j.contains(key));
    CHECK(j["z"].size() == 2);
}
