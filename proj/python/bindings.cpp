#include <pybind11/eigen.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "scalesift/acquisition.hpp"
#include "scalesift/commands.hpp"
#include "scalesift/config.hpp"
#include "scalesift/error.hpp"
#include "scalesift/metrics.hpp"
#include "scalesift/scoring.hpp"
#include "scalesift/world.hpp"

namespace py = pybind11;
using namespace scalesift;

namespace {

py::object to_python(const Json& doc) {
  return py::module_::import("json").attr("loads")(dump_json(doc));
}

py::array_t<double> table_array(const ScoreTable& t) {
  py::array_t<double> out({t.num_concepts(), t.num_locations()});
  std::copy(t.values().begin(), t.values().end(), out.mutable_data());
  return out;
}

py::array_t<bool> label_array(const LabelTable& t) {
  py::array_t<bool> out({t.num_concepts(), t.num_locations()});
  auto v = out.mutable_unchecked<2>();
  for (std::size_t c = 0; c < t.num_concepts(); ++c)
    for (std::size_t l = 0; l < t.num_locations(); ++l)
      v(static_cast<py::ssize_t>(c), static_cast<py::ssize_t>(l)) = t.at(c, l);
  return out;
}

RunConfig load_config(const std::filesystem::path& path, std::optional<std::uint64_t> seed,
                      std::optional<std::filesystem::path> out) {
  RunConfig c = parse_config_file(path);
  if (seed) c.set_seed(*seed);
  if (out) c.output_dir = *out;
  return c;
}

}  // namespace

PYBIND11_MODULE(_scalesift, m) {
  m.doc() = "Budgeted high-resolution acquisition for concept retrieval.";

  auto base = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<ValidationError>(m, "ValidationError", base.ptr());
  py::register_exception<NotFoundError>(m, "NotFoundError", base.ptr());
  py::register_exception<ParseError>(m, "ParseError", base.ptr());
  py::register_exception<ConfigError>(m, "ConfigError", base.ptr());
  py::register_exception<TrainingError>(m, "TrainingError", base.ptr());
  py::register_exception<ProtocolError>(m, "ProtocolError", base.ptr());
  py::register_exception<TransportError>(m, "TransportError", base.ptr());
  py::register_exception<UndefinedMetricError>(m, "UndefinedMetricError", base.ptr());
  py::register_exception<MissingArtifactError>(m, "MissingArtifactError", base.ptr());

  py::class_<ScoreTable>(m, "ScoreTable")
      .def(py::init<std::vector<std::string>, std::vector<std::string>, std::vector<double>>(),
           py::arg("concepts"), py::arg("locations"), py::arg("values"))
      .def_property_readonly("concepts", &ScoreTable::concepts)
      .def_property_readonly("locations", &ScoreTable::locations)
      .def("at", py::overload_cast<const std::string&, const std::string&>(&ScoreTable::at, py::const_),
           py::arg("concept_id"), py::arg("location_id"))
      .def("to_numpy", &table_array)
      .def("select", &ScoreTable::select, py::arg("concepts"), py::arg("locations"))
      .def("to_csv", &score_cache_csv)
      .def("__eq__", &ScoreTable::operator==);
  m.def("read_score_table", [](const std::filesystem::path& p) { return read_score_cache(p).to_table(); },
        py::arg("path"));

  py::class_<LabelTable>(m, "LabelTable")
      .def(py::init<std::vector<std::string>, std::vector<std::string>, std::vector<std::uint8_t>>(),
           py::arg("concepts"), py::arg("locations"), py::arg("values"))
      .def_property_readonly("concepts", &LabelTable::concepts)
      .def_property_readonly("locations", &LabelTable::locations)
      .def("to_numpy", &label_array);

  py::class_<WorldSpec>(m, "WorldSpec")
      .def_static("default", &WorldSpec::default_spec)
      .def_readwrite("num_locations", &WorldSpec::num_locations)
      .def_readwrite("tiles_per_location", &WorldSpec::tiles_per_location)
      .def_readwrite("feature_dim", &WorldSpec::feature_dim)
      .def_readwrite("seed", &WorldSpec::seed)
      .def_property_readonly("concepts", &WorldSpec::concept_ids)
      .def_property_readonly("seen_concepts", &WorldSpec::seen_concepts)
      .def_property_readonly("unseen_concepts", &WorldSpec::unseen_concepts)
      .def("to_dict", [](const WorldSpec& s) { return to_python(to_json(s)); });

  py::class_<World, std::shared_ptr<World>>(m, "World")
      .def_readonly("spec", &World::spec)
      .def_readonly("locations", &World::location_ids)
      .def("label_table", &World::label_table, py::arg("concepts"), py::arg("locations"))
      .def("feature_matrix", &World::feature_matrix, py::arg("locations"));
  m.def("generate_world", [](const WorldSpec& s) { return std::make_shared<World>(generate_world(s)); },
        py::arg("spec"));

  py::class_<Split>(m, "Split")
      .def_readonly("train", &Split::train)
      .def_readonly("val", &Split::val)
      .def_readonly("test", &Split::test);
  m.def("split_locations", &split_locations, py::arg("world"),
        py::arg("fractions") = std::array<double, 3>{0.5, 0.2, 0.3}, py::arg("seed") = 7);

  m.def("ap_at_k",
        [](const std::vector<double>& s, const std::vector<std::uint8_t>& y, const std::vector<std::string>& ids,
           int k) { return ap_at_k(s, y, ids, k); },
        py::arg("scores"), py::arg("labels"), py::arg("ids"), py::arg("k"));
  m.def("precision_at_k",
        [](const std::vector<double>& s, const std::vector<std::uint8_t>& y, const std::vector<std::string>& ids,
           int k) { return precision_at_k(s, y, ids, k); },
        py::arg("scores"), py::arg("labels"), py::arg("ids"), py::arg("k"));
  m.def("spearman",
        [](const std::vector<double>& a, const std::vector<double>& b) { return spearman(a, b); },
        py::arg("a"), py::arg("b"));
  m.def("map_at_k",
        [](const ScoreTable& s, const LabelTable& y, int k, const std::vector<int>& cutoffs) {
          return to_python(to_json(map_at_k(s, y, k, cutoffs)));
        },
        py::arg("scores"), py::arg("labels"), py::arg("k"), py::arg("precision_cutoffs") = std::vector<int>{});

  m.def("disagreement",
        [](const ScoreTable& a, const ScoreTable& b, const std::vector<std::string>& seen) {
          return disagreement_true(a, b, seen);
        },
        py::arg("a"), py::arg("b"), py::arg("seen"));
  m.def("select_locations",
        [](const std::string& strategy, const std::vector<std::string>& candidates,
           const std::vector<double>& criterion, long budget, std::uint64_t seed,
           std::optional<ScoreTable> scores, const std::vector<double>& weights) {
          SelectionInputs in{candidates, criterion, std::move(scores), weights};
          return to_python(to_json(select_locations(sampler_strategy_from_string(strategy), in, Budget{budget}, seed)));
        },
        py::arg("strategy"), py::arg("candidates"), py::arg("criterion") = std::vector<double>{},
        py::arg("budget"), py::arg("seed") = 0, py::arg("scores") = py::none(),
        py::arg("weights") = std::vector<double>{});

  py::class_<Experiment>(m, "Experiment")
      .def(py::init([](const std::filesystem::path& config, std::optional<std::uint64_t> seed) {
             return Experiment::prepare(load_config(config, seed, std::nullopt));
           }),
           py::arg("config"), py::arg("seed") = py::none())
      .def_property_readonly("world", [](const Experiment& e) { return e.world; })
      .def_readonly("split", &Experiment::split)
      .def_readonly("concepts", &Experiment::concepts)
      .def_readonly("seen", &Experiment::seen)
      .def("train", [](Experiment& e) { return e.train().loss_history; },
           py::call_guard<py::gil_scoped_release>())
      .def("score_lr", [](const Experiment& e, const std::vector<std::string>& locs,
                          const std::vector<std::string>& cs) { return score_lr(e.providers.lr, locs, cs); },
           py::arg("locations"), py::arg("concepts"))
      .def("score_hr", [](const Experiment& e, const std::vector<std::string>& locs,
                          const std::vector<std::string>& cs) { return score_hr(e.providers.hr, locs, cs); },
           py::arg("locations"), py::arg("concepts"))
      .def("score_kd",
           [](const Experiment& e, const std::vector<std::string>& locs, const std::vector<std::string>& cs) {
             if (!e.providers.kd) throw MissingArtifactError("no KD model: call train() first", "");
             return score_lr(*e.providers.kd, locs, cs);
           },
           py::arg("locations"), py::arg("concepts"));

  m.def("run_command",
        [](const std::string& subcommand, const std::filesystem::path& config, std::optional<std::uint64_t> seed,
           std::optional<std::filesystem::path> out, std::optional<std::filesystem::path> scores,
           std::optional<std::filesystem::path> labels) {
          RunConfig c = load_config(config, seed, out);
          py::gil_scoped_release release;
          return run_command(subcommand, c, CommandOptions{scores, labels});
        },
        py::arg("subcommand"), py::arg("config"), py::arg("seed") = py::none(), py::arg("out") = py::none(),
        py::arg("scores") = py::none(), py::arg("labels") = py::none());
  m.def("subcommands", &subcommands);

  m.attr("__version__") = SCALESIFT_VERSION;
}
