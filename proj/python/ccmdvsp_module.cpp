#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "ccmdvsp/baselines.hpp"
#include "ccmdvsp/bnc.hpp"
#include "ccmdvsp/lagrangian.hpp"

namespace py = pybind11;
using namespace ccmdvsp;

namespace {

py::object to_py(const json& j) { return py::module_::import("json").attr("loads")(j.dump()); }
json from_py(const py::object& o) { return json::parse(py::module_::import("json").attr("dumps")(o).cast<std::string>()); }

Schedule schedule_arg(const Instance& inst, const py::object& o) { return schedule_from_json(inst, from_py(o)); }

CutKind cut_kind(const std::string& s) {
    if (s == "nogood") return CutKind::NoGood;
    if (s == "snogood") return CutKind::StrongNoGood;
    return cut_kind_from_string(s);
}

BnCConfig bnc_config(const std::string& cuts, bool vi, bool zc, double time_limit) {
    BnCConfig cfg;
    cfg.cut_family = cut_kind(cuts);
    cfg.use_vi = vi;
    cfg.relax_z = zc;
    cfg.time_limit = time_limit;
    return cfg;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Chance-constrained multi-depot vehicle scheduling";

    py::register_exception<InputError>(m, "InputError", PyExc_ValueError);

    py::class_<ServiceParams>(m, "ServiceParams")
        .def(py::init<>())
        .def_readwrite("lb", &ServiceParams::lb)
        .def_readwrite("ub", &ServiceParams::ub)
        .def_readwrite("delta_trip", &ServiceParams::delta_trip)
        .def_readwrite("delta_route", &ServiceParams::delta_route)
        .def_readwrite("epsilon", &ServiceParams::epsilon)
        .def_readwrite("eps_tol", &ServiceParams::eps_tol);

    py::class_<Instance>(m, "Instance")
        .def_static("from_json", [](const py::object& o) { return instance_from_json(from_py(o)); })
        .def_static("load", &load_instance)
        .def("save", [](const Instance& inst, const std::string& path) { save_instance(inst, path); })
        .def("to_json", [](const Instance& inst) { return to_py(instance_to_json(inst)); })
        .def_property_readonly("num_trips", &Instance::num_trips)
        .def_property_readonly("num_depots", &Instance::num_depots)
        .def_property_readonly("num_pairs", &Instance::num_pairs);

    py::class_<ScenarioSet>(m, "ScenarioSet")
        .def_static("load", &load_scenarios)
        .def("save", [](const ScenarioSet& s, const std::string& path) { save_scenarios(s, path); })
        .def("to_json", [](const ScenarioSet& s) { return to_py(scenarios_to_json(s)); })
        .def_property_readonly("size", &ScenarioSet::size)
        .def_property_readonly("seed", &ScenarioSet::seed);

    m.def(
        "generate_instance",
        [](int trips, int depots, int route_size, std::uint64_t seed, int capacity) {
            GenParams p;
            p.n_trips = trips;
            p.n_depots = depots;
            p.trips_per_route = route_size;
            p.seed = seed;
            p.depot_capacity = capacity;
            return generate_instance(p);
        },
        py::arg("trips"), py::arg("depots"), py::arg("route_size") = 10, py::arg("seed") = 1, py::arg("capacity") = 0);

    m.def(
        "sample_scenarios",
        [](const Instance& inst, int S, std::uint64_t seed, double cv) {
            SampleOptions opt;
            opt.cv = cv;
            return sample_scenarios(inst, S, seed, opt);
        },
        py::arg("instance"), py::arg("scenarios"), py::arg("seed"), py::arg("cv") = 0.2);

    m.def(
        "schedule_cost", [](const Instance& inst, const py::object& sched) { return schedule_cost(inst, schedule_arg(inst, sched)); },
        py::arg("instance"), py::arg("schedule"));

    m.def(
        "greedy_evaluate",
        [](const Instance& inst, const ServiceParams& params, const py::object& sched, const ScenarioSet& scen, int s) {
            const GreedyResult g = greedy_evaluate(inst, params, schedule_arg(inst, sched), scen, s);
            std::vector<std::string> violated;
            for (const auto& r : g.violated) violated.push_back(to_string(r));
            py::dict d;
            d["z"] = g.z;
            d["y"] = g.y;
            d["on_time"] = g.on_time;
            d["delayed"] = g.delayed;
            d["violated"] = violated;
            return d;
        },
        py::arg("instance"), py::arg("params"), py::arg("schedule"), py::arg("scenarios"), py::arg("s"));

    m.def(
        "satisfaction_pct",
        [](const Instance& inst, const ServiceParams& params, const py::object& sched, const ScenarioSet& scen) {
            return satisfaction_pct(inst, params, schedule_arg(inst, sched), scen);
        },
        py::arg("instance"), py::arg("params"), py::arg("schedule"), py::arg("scenarios"));

    m.def(
        "solve_bnc",
        [](const Instance& inst, const ServiceParams& params, const ScenarioSet& scen, const std::string& cuts, bool vi, bool zc,
           double time_limit) {
            BnCResult r;
            {
                py::gil_scoped_release release;
                r = solve_bnc(inst, params, scen, bnc_config(cuts, vi, zc, time_limit));
            }
            return to_py(bnc_result_to_json(inst, r));
        },
        py::arg("instance"), py::arg("params"), py::arg("scenarios"), py::arg("cuts") = "cmis", py::arg("vi") = false,
        py::arg("zc") = false, py::arg("time_limit") = 600.0);

    m.def(
        "solve_lagrangian",
        [](const Instance& inst, const ServiceParams& params, const ScenarioSet& scen, int group_size, int max_iterations,
           const std::string& cuts, double time_limit) {
            LagrConfig cfg;
            cfg.group_size = group_size;
            cfg.max_iterations = max_iterations;
            cfg.group = bnc_config(cuts, true, false, time_limit);
            LagrResult r;
            {
                py::gil_scoped_release release;
                r = solve_lagrangian(inst, params, scen, cfg);
            }
            json j = bnc_result_to_json(inst, r.report);
            j["groups"] = r.partition.groups.size();
            j["iterations"] = r.iterations;
            j["best_lagrangian"] = r.best_lagrangian;
            j["dual_bound"] = r.dual_bound;
            return to_py(j);
        },
        py::arg("instance"), py::arg("params"), py::arg("scenarios"), py::arg("group_size") = 10, py::arg("max_iterations") = 100,
        py::arg("cuts") = "cmis", py::arg("time_limit") = 600.0);

    m.def(
        "solve_deterministic",
        [](const Instance& inst, const std::string& times, const ScenarioSet* scen, double q) {
            TimeTable table;
            if (times == "mean") {
                table = mean_times(inst);
            } else if (times == "percentile") {
                if (!scen) throw InputError("percentile times need a scenario set");
                table = percentile_times(inst, *scen, q);
            } else {
                throw InputError("times must be mean or percentile");
            }
            const DetResult d = solve_deterministic(inst, table);
            json j = {{"status", milp::to_string(d.status)}, {"cost", d.cost}, {"time_s", d.time_s}};
            j["schedule"] = d.has_schedule ? schedule_to_json(d.schedule, inst) : json(nullptr);
            return to_py(j);
        },
        py::arg("instance"), py::arg("times") = "mean", py::arg("scenarios") = nullptr, py::arg("q") = 75.0);
}
