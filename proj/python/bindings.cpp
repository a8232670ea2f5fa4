#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "pathgat/discovery.hpp"
#include "pathgat/experiment.hpp"

namespace py = pybind11;
using namespace pathgat;

namespace {

py::list trajectory_values(const Trajectory& t) {
  py::list rows;
  for (const auto& v : t.values) rows.append(py::make_tuple(v[0], v[1], v[2]));
  return rows;
}

}  // namespace

PYBIND11_MODULE(_pathgat, m) {
  m.doc() = "pathway-structured graph attention for gene expression forecasting";

  py::register_exception<DataError>(m, "DataError");
  py::register_exception<DivergenceError>(m, "DivergenceError");
  py::register_exception<ShapeError>(m, "ShapeError");

  py::class_<Trajectory>(m, "Trajectory")
      .def_property_readonly("condition", [](const Trajectory& t) { return condition_name(t.condition); })
      .def_readonly("replicate_id", &Trajectory::replicate_id)
      .def_readonly("times_h", &Trajectory::times_h)
      .def_property_readonly("values", &trajectory_values);

  py::class_<SimConfig>(m, "SimConfig")
      .def(py::init<>())
      .def_readwrite("noise_sd", &SimConfig::noise_sd)
      .def_readwrite("init_jitter_sd", &SimConfig::init_jitter_sd)
      .def_readwrite("seed", &SimConfig::seed)
      .def_readwrite("sample_times", &SimConfig::sample_times)
      .def_property("condition",
                    [](const SimConfig& c) { return condition_name(c.condition); },
                    [](SimConfig& c, const std::string& s) { c.condition = condition_from_name(s); })
      .def_static("from_json", &SimConfig::from_json)
      .def("to_json", &SimConfig::to_json);

  m.def("simulate", &simulate, py::arg("config"));
  m.def("generate_dataset", &generate_dataset, py::arg("config"), py::arg("replicates") = 2);
  m.def("trajectories_to_csv", &trajectories_to_csv);
  m.def("trajectories_from_csv", &trajectories_from_csv);

  py::class_<PathwayConfig>(m, "PathwayConfig")
      .def(py::init<>())
      .def_static("canonical_p53", &PathwayConfig::canonical_p53)
      .def_static("from_json", &PathwayConfig::from_json)
      .def("to_json", &PathwayConfig::to_json)
      .def_readwrite("genes", &PathwayConfig::genes)
      .def_readwrite("relations", &PathwayConfig::relations);

  py::class_<LocoReport>(m, "LocoReport")
      .def("overall_mean", &LocoReport::overall_mean)
      .def("overall_std", &LocoReport::overall_std)
      .def("fold_mean", [](const LocoReport& r, const std::string& c) {
        return r.fold_mean(condition_from_name(c));
      })
      .def("to_csv", &LocoReport::to_csv)
      .def("to_table", &LocoReport::to_table);

  py::class_<SignedInteractionMatrix>(m, "SignedInteractionMatrix")
      .def_readonly("genes", &SignedInteractionMatrix::genes)
      .def_readonly("score", &SignedInteractionMatrix::score)
      .def("to_csv", &SignedInteractionMatrix::to_csv);

  py::class_<SignReport>(m, "SignReport")
      .def_readonly("num_correct", &SignReport::num_correct)
      .def_property_readonly("num_edges",
                             [](const SignReport& r) { return r.edges.size(); })
      .def("to_text", &SignReport::to_text);

  // high-level experiment entry points mirroring the CLI verbs
  m.def(
      "run_loco",
      [](const std::string& config_json, const std::string& model_kind, int seeds, int jobs,
         bool intervene) {
        ExperimentConfig cfg =
            config_json.empty() ? ExperimentConfig{} : ExperimentConfig::from_json(config_json);
        if (seeds > 0) {
          cfg.train.seeds.clear();
          for (int s = 0; s < seeds; ++s) cfg.train.seeds.push_back(static_cast<uint64_t>(s));
        }
        const std::vector<Sample> samples = window_all(cfg.load_or_simulate());
        const PathwayGraph graph = cfg.pathway.build();
        ModelSpec spec{model_kind == "mlp" ? ModelKind::kMlp : ModelKind::kGat, cfg.gat, cfg.mlp};
        return run_loco(samples, graph, spec, cfg.train,
                        intervene ? cfg.pathway.interventions
                                  : std::map<std::string, std::vector<Intervention>>{},
                        jobs);
      },
      py::arg("config_json") = "", py::arg("model_kind") = "gat", py::arg("seeds") = 0,
      py::arg("jobs") = 1, py::arg("intervene") = false);

  m.def(
      "discover",
      [](const std::string& config_json, int seeds, double threshold) {
        ExperimentConfig cfg =
            config_json.empty() ? ExperimentConfig{} : ExperimentConfig::from_json(config_json);
        if (seeds > 0) {
          cfg.discovery.seeds.clear();
          for (int s = 0; s < seeds; ++s) cfg.discovery.seeds.push_back(static_cast<uint64_t>(s));
        }
        cfg.discovery.gat.attention = AttentionActivation::kTanh;
        const std::vector<Sample> samples = window_all(cfg.load_or_simulate_discovery());
        SignedInteractionMatrix learned = discover(samples, cfg.pathway.genes, cfg.discovery);
        SignReport report = compare_signs(learned, GroundTruthSigns::from_config(cfg.pathway),
                                          threshold > 0 ? threshold : cfg.discovery_threshold);
        return py::make_tuple(learned, report);
      },
      py::arg("config_json") = "", py::arg("seeds") = 0, py::arg("threshold") = 0.0);
}
