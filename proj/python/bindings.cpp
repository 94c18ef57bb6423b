#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "maxpers/persist.hpp"
#include "maxpers/random_models.hpp"
#include "maxpers/uai.hpp"

namespace py = pybind11;
using namespace maxpers;

namespace {

GraphicalModel model_from_tables(
    const std::vector<int>& num_labels,
    const std::vector<std::vector<double>>& unary,
    const std::vector<std::tuple<int, int, std::vector<std::vector<double>>>>& edges,
    double constant) {
  GraphicalModel f(num_labels);
  require(unary.size() == num_labels.size(), "unary table count mismatch");
  for (size_t v = 0; v < unary.size(); ++v) {
    require(unary[v].size() == static_cast<size_t>(num_labels[v]),
            "unary table size mismatch");
    f.unary_table(v) = unary[v];
  }
  for (const auto& [u, v, table] : edges) {
    int e = f.add_edge(u, v);
    require(table.size() == static_cast<size_t>(f.num_labels(u)), "pairwise row count mismatch");
    for (int i = 0; i < f.num_labels(u); ++i) {
      require(table[i].size() == static_cast<size_t>(f.num_labels(v)),
              "pairwise column count mismatch");
      for (int j = 0; j < f.num_labels(v); ++j) f.set_pairwise(e, i, j, table[i][j]);
    }
  }
  f.set_constant(constant);
  if (f.all_costs_integral()) f.set_integer_costs(true);
  return f;
}

py::dict report_to_dict(const PersistencyReport& rep) {
  py::dict d;
  d["mode"] = rep.mode;
  d["y"] = rep.substitution.y();
  py::list elim;
  for (int v = 0; v < rep.substitution.num_nodes(); ++v)
    elim.append(rep.substitution.eliminated(v));
  d["eliminated"] = elim;
  d["label_fraction"] = rep.measure.label_fraction;
  d["log_fraction"] = rep.measure.log_fraction;
  d["outer_rounds"] = rep.outer_rounds;
  d["total_sweeps"] = rep.total_sweeps;
  d["final_lb"] = rep.final_lb;
  d["wall_time_s"] = rep.wall_time_s;
  d["json"] = rep.to_json();
  return d;
}

}  // namespace

PYBIND11_MODULE(maxpers, m) {
  m.doc() = "partial optimality (persistency) for pairwise discrete models";

  py::class_<GraphicalModel>(m, "GraphicalModel")
      .def(py::init(&model_from_tables), py::arg("num_labels"), py::arg("unary"),
           py::arg("edges") =
               std::vector<std::tuple<int, int, std::vector<std::vector<double>>>>{},
           py::arg("constant") = 0.0)
      .def_property_readonly("num_nodes", &GraphicalModel::num_nodes)
      .def_property_readonly("num_edges", &GraphicalModel::num_edges)
      .def("num_labels", py::overload_cast<int>(&GraphicalModel::num_labels, py::const_))
      .def_property_readonly("integer_costs", &GraphicalModel::integer_costs)
      .def("energy", [](const GraphicalModel& f, const Labeling& x) { return energy(f, x); })
      .def("to_uai", &serialize_uai);

  py::class_<SubsetToOne>(m, "SubsetToOne")
      .def(py::init<std::vector<int>, Labeling>())
      .def_property_readonly("y", &SubsetToOne::y)
      .def("eliminated", &SubsetToOne::eliminated)
      .def("apply", [](const SubsetToOne& p, const Labeling& x) { return apply(p, x); })
      .def("add", &SubsetToOne::add)
      .def("to_json", &SubsetToOne::to_json);

  m.def("parse_uai", &parse_uai);
  m.def(
      "gen_random",
      [](const std::string& family, int rows, int cols, int labels, int64_t lo,
         int64_t hi, uint64_t seed) {
        Family fam = family == "potts" ? Family::potts : Family::full;
        require(family == "potts" || family == "full", "family must be potts or full");
        return gen_random(fam, rows, cols, labels, lo, hi, seed);
      },
      py::arg("family"), py::arg("rows"), py::arg("cols"), py::arg("labels"),
      py::arg("lo") = 0, py::arg("hi") = 100, py::arg("seed") = 0);

  m.def(
      "choose_test_labeling",
      [](const GraphicalModel& f, int budget, const std::string& mode) {
        return choose_test_labeling(f, budget, mode_from_name(mode));
      },
      py::arg("model"), py::arg("budget") = 1000, py::arg("mode") = "budgeted");

  m.def(
      "find_persistency",
      [](const GraphicalModel& f, std::optional<Labeling> y, const std::string& mode,
         int sweeps_per_round, int budget, bool single_node, bool pruning_cut,
         bool fast_messages) {
        PersistencyConfig cfg;
        cfg.mode = mode_from_name(mode);
        cfg.sweeps_per_round = sweeps_per_round;
        cfg.speedups.single_node = single_node;
        cfg.speedups.pruning_cut = pruning_cut;
        cfg.speedups.fast_messages = fast_messages;
        Labeling test = y ? *y : choose_test_labeling(f, budget, cfg.mode);
        return report_to_dict(find_persistency(f, test, cfg));
      },
      py::arg("model"), py::arg("y") = std::nullopt, py::arg("mode") = "budgeted",
      py::arg("sweeps_per_round") = 50, py::arg("budget") = 1000,
      py::arg("single_node") = true, py::arg("pruning_cut") = true,
      py::arg("fast_messages") = true);

  m.def("is_strictly_improving", [](const GraphicalModel& f, const SubsetToOne& p) {
    return is_strictly_improving_brute(f, p).improving;
  });
  m.def("measures", [](const SubsetToOne& p) {
    Measures ms = measures(p);
    return py::make_tuple(ms.label_fraction, ms.log_fraction);
  });
  m.def("brute_force_min", [](const GraphicalModel& f) {
    auto [value, x] = brute_force_min(f);
    return py::make_tuple(value, x);
  });
}
