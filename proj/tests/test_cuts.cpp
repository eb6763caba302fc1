#include <doctest.h>

#include <random>

#include "ccmdvsp/cuts.hpp"
#include "ccmdvsp/fixtures.hpp"
#include "support/brute.hpp"
#include "support/random_cases.hpp"

using namespace ccmdvsp;

namespace {

std::vector<std::pair<int, int>> ids(const Instance& inst, const std::vector<int>& pairs) {
    std::vector<std::pair<int, int>> out;
    for (int p : pairs) out.emplace_back(inst.pair(p).i + 1, inst.pair(p).j + 1);
    return out;
}

struct Chain {
    Instance inst = fixtures::worked_chain();
    ScenarioSet sc = fixtures::chain_scenario(inst);
    Schedule sched = fixtures::chain_schedule();
    ServiceParams par = fixtures::chain_params();
    GreedyResult g = greedy_evaluate(inst, par, sched, sc, 0);
};

}  // namespace

TEST_CASE("cmis: worked chain trace") {
    Chain f;
    const CMisContext ctx = build_cmis(f.inst, f.par, f.sched, f.sc, 0, f.g, Requirement::trip());
    CHECK(ctx.core == std::vector<int>{3, 5});
    std::vector<int> targets;
    for (const auto& st : ctx.trace) targets.push_back(st.target);
    CHECK(targets == std::vector<int>{96, 73, 59, 0});
    CHECK(ctx.trace.back().trip == 2);
    CHECK(ids(f.inst, ctx.pairs) == std::vector<std::pair<int, int>>{{3, 4}, {4, 5}, {5, 6}});
    CHECK(is_infeasible_set(f.inst, f.par, f.sc, 0, ctx.pairs, Requirement::trip()));
    const Cut cut = cmis_cut(ctx);
    CHECK(cut.kind == CutKind::CMIS);
    CHECK(cut.rhs == 3);
    CHECK(cut_violated(f.inst, cut, f.sched, 0));
    CHECK_FALSE(cut_violated(f.inst, cut, f.sched, 1));
}

TEST_CASE("cmis: extension through an alternative head") {
    Chain f;
    const CMisContext ctx = extend_cmis(f.inst, f.par, f.sc, build_cmis(f.inst, f.par, f.sched, f.sc, 0, f.g, Requirement::trip()));
    CHECK(ids(f.inst, ctx.extra) == std::vector<std::pair<int, int>>{{7, 4}});
    const Cut cut = cmis_cut(ctx);
    CHECK(cut.kind == CutKind::ECMIS);
    CHECK(cut.pairs.size() == 4);
    CHECK(cut.rhs == 3);
    // swapping the head keeps the cut binding
    Schedule alt;
    alt.buses = {Bus{0, {0, 1, 2}}, Bus{0, {6, 3, 4, 5}}, Bus{0, {7}}};
    CHECK(cut_violated(f.inst, cut, alt, 0));
    CHECK(greedy_evaluate(f.inst, f.par, alt, f.sc, 0).z == 1);
}

TEST_CASE("cmis: dual certificate on the worked chain") {
    Chain f;
    const CMisContext ctx = build_cmis(f.inst, f.par, f.sched, f.sc, 0, f.g, Requirement::trip());
    const CertificateReport rep = dual_certificate(f.inst, f.par, f.sched, f.sc, 0, f.g, ctx);
    std::vector<std::string> alpha;
    for (const auto& a : rep.alpha) alpha.push_back(a.second);
    CHECK(alpha == std::vector<std::string>{"1/60", "1/74", "1/97"});
    CHECK(rep.printed_feasible);
    CHECK(rep.cut_matches);
    CHECK(rep.lp_optimum_is_one);
    // The path head starts at 39, one tick after its earliest start 38, so the
    // constructed dual loses (39 - 38) / 60.
    CHECK(rep.objective == "59/60");
    CHECK_FALSE(rep.objective_is_one);
    CHECK_FALSE(rep.signed_dual_feasible);
}

TEST_CASE("no-good cuts on the grid example") {
    const Instance inst = fixtures::grid_example();
    const Schedule left = fixtures::grid_left();
    const Cut strong = strong_no_good_cut(inst, left, 0);
    CHECK(strong.rhs == 6);
    CHECK(strong.pairs.size() == 6);
    CHECK(cut_violated(inst, strong, left, 0));
    CHECK_FALSE(cut_violated(inst, strong, fixtures::grid_right(), 0));
    const Cut plain = no_good_cut(inst, left, 0);
    CHECK(plain.rhs == 10);
    CHECK(cut_lhs(inst, plain, left) == 10);
    CHECK(cut_violated(inst, plain, left, 0));
    CHECK_FALSE(cut_violated(inst, plain, fixtures::grid_right(), 0));
    const json j = cut_to_json(inst, strong);
    CHECK(j["kind"] == "strong_no_good");
    CHECK(j["pairs"].size() == 6);
}

TEST_CASE("infeasible-set test agrees with enumeration") {
    std::mt19937_64 rng(11);
    int checked = 0, positive = 0;
    for (int t = 0; t < 80; ++t) {
        const Instance inst = testsupport::tight_instance(6, 1, 400 + t);
        const ScenarioSet sc = sample_scenarios(inst, 1, t);
        ServiceParams par;
        par.ub = 2;
        par.delta_trip = 0.9;
        par.delta_route = 0.7;
        const Schedule sched = testsupport::random_schedule(inst, rng, 0.9);
        const std::vector<int> seq = sequenced_pairs(inst, sched);
        // random sub-paths of the schedule
        for (int rep = 0; rep < 3; ++rep) {
            std::vector<int> sub;
            for (int p : seq)
                if (std::uniform_int_distribution<int>(0, 3)(rng) > 0) sub.push_back(p);
            const bool fast = is_infeasible_set(inst, par, sc, 0, sub);
            CHECK(fast == testsupport::brute_infeasible_set(inst, par, sc, 0, sub));
            ++checked;
            positive += fast;
        }
    }
    CHECK(checked == 240);
    CHECK(positive > 10);
}

TEST_CASE("cuts from violated scenarios are valid and minimal") {
    std::mt19937_64 rng(5);
    int contexts = 0;
    for (int t = 0; t < 600 && contexts < 40; ++t) {
        const Instance inst = testsupport::tight_instance(6, 1, 900 + t);
        const ScenarioSet sc = sample_scenarios(inst, 1, t);
        ServiceParams par;
        par.ub = 2;
        par.delta_trip = 0.9;
        par.delta_route = 0.7;
        const Schedule sched = testsupport::random_schedule(inst, rng, 0.9);
        const Requirements req = derive_requirements(inst, par);
        const GreedyResult g = greedy_evaluate(inst, req, par, sched, sc, 0);
        if (g.z == 0) continue;

        const Cut mis = mis_cut(inst, par, sched, sc, 0);
        CHECK(testsupport::brute_infeasible_set(inst, par, sc, 0, mis.pairs));
        for (std::size_t k = 0; k < mis.pairs.size(); ++k) {
            std::vector<int> less = mis.pairs;
            less.erase(less.begin() + static_cast<long>(k));
            CHECK_FALSE(testsupport::brute_infeasible_set(inst, par, sc, 0, less));
        }

        for (const Requirement& con : g.violated) {
            ++contexts;
            const CMisContext ctx = extend_cmis(inst, par, sc, build_cmis(inst, par, sched, sc, 0, g, con));
            CHECK(ctx.core.size() == static_cast<std::size_t>(
                                         (con.kind == Requirement::Kind::Trip ? req.max_trip_delays() : req.max_route_delays(con.route)) + 1));
            CHECK(testsupport::brute_infeasible_set(inst, par, sc, 0, ctx.pairs, con));
            CHECK(mis_deletion_filter(inst, par, sc, 0, ctx.pairs, con) == ctx.pairs);
            const Cut cut = cmis_cut(ctx);
            CHECK(cut_violated(inst, cut, sched, 0));
            // no schedule that meets the requirement is cut off
            testsupport::enumerate_schedules(inst, [&](const Schedule& other) {
                if (!cut_violated(inst, cut, other, 0)) return;
                const GreedyResult go = greedy_evaluate(inst, req, par, other, sc, 0);
                CHECK(std::find(go.violated.begin(), go.violated.end(), con) != go.violated.end());
            });
        }
    }
    CHECK(contexts >= 20);
}

TEST_CASE("valid inequalities hold for feasible schedules") {
    int tested = 0;
    for (int t = 0; t < 20; ++t) {
        const Instance inst = testsupport::tight_instance(6, 1, 1300 + t);
        const ScenarioSet sc = sample_scenarios(inst, 2, t);
        ServiceParams par;
        par.ub = 2;
        par.delta_trip = 0.9;
        par.delta_route = 0.7;
        const auto vis = valid_inequalities(inst, par, sc);
        const auto literal = valid_inequalities(inst, par, sc, ViMode::PaperLiteral);
        CHECK(vis.size() == literal.size());
        testsupport::enumerate_schedules(inst, [&](const Schedule& sched) {
            for (int s = 0; s < sc.size(); ++s) {
                const GreedyResult g = greedy_evaluate(inst, par, sched, sc, s);
                for (const auto& vi : vis) {
                    if (vi.s != s) continue;
                    ++tested;
                    CHECK_FALSE(vi_violated(inst, vi, sched, g.z));
                    CHECK_FALSE(vi_violated(inst, vi, sched, 1));
                }
            }
        });
    }
    CHECK(tested > 100);
}

TEST_CASE("operational compatibility forces delays") {
    const Instance inst = testsupport::tight_instance(8, 1, 77);
    const ScenarioSet sc = sample_scenarios(inst, 5, 1);
    ServiceParams par;
    par.ub = 2;
    for (int s = 0; s < sc.size(); ++s) {
        const auto cs = operational_compat(inst, par, sc, s);
        for (int p = 0; p < inst.num_pairs(); ++p) {
            if (cs[p]) continue;
            Schedule two;
            for (int i = 0; i < inst.num_trips(); ++i)
                if (i != inst.pair(p).i && i != inst.pair(p).j) two.buses.push_back(Bus{0, {i}});
            two.buses.push_back(Bus{0, {inst.pair(p).i, inst.pair(p).j}});
            CHECK(greedy_evaluate(inst, par, two, sc, s).v[inst.pair(p).j] == 0);
        }
    }
}
