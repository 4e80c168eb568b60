// Copyright 2026 The cmdp Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Python bindings. Secret keys cross the boundary as int tuples
// (x, v1, v2, ...); distributions as dicts.

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "cmdp/audit.h"
#include "cmdp/blanket.h"
#include "cmdp/common.h"
#include "cmdp/geo.h"
#include "cmdp/lp.h"
#include "cmdp/mechanisms.h"
#include "cmdp/priors.h"
#include "cmdp/roadnet.h"
#include "cmdp/sweep.h"
#include "cmdp/synth.h"
#include "cmdp/utility.h"

namespace py = pybind11;

namespace pybind11::detail {

template <>
struct type_caster<cmdp::SecretKey> {
  PYBIND11_TYPE_CASTER(cmdp::SecretKey, const_name("tuple[int, ...]"));

  bool load(handle src, bool) {
    if (py::isinstance<py::int_>(src)) {
      value = cmdp::SecretKey(src.cast<cmdp::LocationId>());
      return true;
    }
    if (!py::isinstance<py::sequence>(src) || py::isinstance<py::str>(src)) {
      return false;
    }
    const auto seq = py::reinterpret_borrow<py::sequence>(src);
    if (seq.size() == 0) return false;
    value = cmdp::SecretKey(seq[0].cast<cmdp::LocationId>());
    for (std::size_t i = 1; i < seq.size(); ++i) {
      value.context.push_back(seq[i].cast<cmdp::LocationId>());
    }
    return true;
  }

  static handle cast(const cmdp::SecretKey& k, return_value_policy, handle) {
    py::tuple t(1 + k.context.size());
    t[0] = py::int_(k.current);
    for (std::size_t i = 0; i < k.context.size(); ++i) {
      t[i + 1] = py::int_(k.context[i]);
    }
    return t.release();
  }
};

}  // namespace pybind11::detail

namespace cmdp {
namespace {

using Row = std::tuple<LocationId, double, double>;

std::vector<Location> ToLocations(const std::vector<Row>& rows) {
  std::vector<Location> out;
  for (const auto& [id, lat, lon] : rows) out.push_back({id, GeoPoint(lat, lon)});
  return out;
}

std::vector<std::vector<double>> Dense(const PerturbationMatrix& q) {
  std::vector<std::vector<double>> out;
  for (std::size_t k = 0; k < q.num_keys(); ++k) {
    const auto r = q.Row(k);
    out.emplace_back(r.begin(), r.end());
  }
  return out;
}

KeyMetric MetricFor(const LocationDomain& domain,
                    const std::vector<double>& weights) {
  return weights.empty() ? BaseKeyMetric(domain)
                         : PrefixKeyMetric(domain, ContextWeights(weights));
}

}  // namespace
}  // namespace cmdp

PYBIND11_MODULE(_cmdp, m) {
  using namespace cmdp;
  m.doc() = "Context-aware metric differential privacy for location data.";

  // Translators run newest first, so the base class goes in first.
  py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<InvalidArgument>(m, "InvalidArgument",
                                          PyExc_ValueError);
  py::register_exception<ParseError>(m, "ParseError", PyExc_ValueError);
  py::register_exception<IoError>(m, "IoError", PyExc_OSError);

  m.def("haversine_km",
        [](double lat1, double lon1, double lat2, double lon2) {
          return HaversineKm(GeoPoint(lat1, lon1), GeoPoint(lat2, lon2));
        },
        py::arg("lat1"), py::arg("lon1"), py::arg("lat2"), py::arg("lon2"));

  py::class_<LocationDomain>(m, "LocationDomain")
      .def(py::init([](const std::vector<Row>& secrets,
                       std::optional<std::vector<Row>> outputs) {
             return outputs ? LocationDomain(ToLocations(secrets),
                                             ToLocations(*outputs))
                            : LocationDomain(ToLocations(secrets));
           }),
           py::arg("secrets"), py::arg("outputs") = py::none())
      .def_property_readonly("secret_ids", &LocationDomain::secret_ids)
      .def_property_readonly("output_ids", &LocationDomain::output_ids)
      .def("distance", &LocationDomain::Distance)
      .def("context_distance",
           [](const LocationDomain& d, const SecretKey& a, const SecretKey& b,
              const std::vector<double>& w) {
             return ContextDistance(a, b, ContextWeights(w), d);
           });

  py::class_<RoadGraph>(m, "RoadGraph")
      .def(py::init([](const std::vector<Row>& nodes,
                       const std::vector<std::tuple<LocationId, LocationId, double>>& edges) {
             std::vector<RoadEdge> es;
             for (const auto& [a, b, km] : edges) es.push_back({a, b, km});
             return RoadGraph(ToLocations(nodes), std::move(es));
           }),
           py::arg("nodes"), py::arg("edges"))
      .def_static("load", &LoadGraph, py::arg("nodes_file"), py::arg("edges_file"))
      .def_property_readonly("node_ids", &RoadGraph::node_ids)
      .def_property_readonly("nodes", [](const RoadGraph& g) {
        std::vector<Row> out;
        for (const auto& l : g.nodes()) out.emplace_back(l.id, l.point.lat(), l.point.lon());
        return out;
      })
      .def("distances_to",
           [](const RoadGraph& g, LocationId root) {
             const auto t = BuildShortestPathTree(g, root);
             std::map<LocationId, double> out;
             for (std::size_t i = 0; i < g.num_nodes(); ++i) {
               out[g.nodes()[i].id] = t.DistanceByIndex(i);
             }
             return out;
           },
           py::arg("root"), "path length from every node to `root` (inf if none)")
      .def("snap", [](const RoadGraph& g, double lat, double lon) {
        return SnapToNode(GeoPoint(lat, lon), g);
      });

  py::class_<PriorModel>(m, "PriorModel")
      .def_property_readonly("gamma", &PriorModel::gamma)
      .def_property_readonly("p_x", &PriorModel::p_x)
      .def_property_readonly("p_joint", &PriorModel::p_joint)
      .def_property_readonly("p_task", &PriorModel::p_task)
      .def("set_task_prior", &PriorModel::set_task_prior)
      .def("blanket_prior", &PriorModel::BlanketPrior, py::arg("lags"))
      .def("next_location", &PriorModel::NextLocation, py::arg("key"),
           py::arg("lags"));

  m.def("estimate_priors",
        [](const std::vector<std::vector<LocationId>>& seqs,
           std::vector<LocationId> nodes, int gamma, bool smoothing) {
          PriorOptions o;
          o.smoothing = smoothing;
          return EstimatePriorsFromSequences(seqs, std::move(nodes), gamma, o);
        },
        py::arg("sequences"), py::arg("nodes"), py::arg("gamma"),
        py::arg("smoothing") = true);
  m.def("estimate_priors_from_files",
        [](const std::string& trajectories, const RoadGraph& g, int gamma,
           bool smoothing) {
          PriorOptions o;
          o.smoothing = smoothing;
          return EstimatePriors(LoadTrajectories(trajectories), g, gamma, o);
        },
        py::arg("trajectories"), py::arg("graph"), py::arg("gamma"),
        py::arg("smoothing") = true);

  py::class_<CostTensor>(m, "CostTensor")
      .def(py::init<std::vector<SecretKey>, std::vector<LocationId>,
                    std::vector<double>>(),
           py::arg("keys"), py::arg("outputs"), py::arg("values"))
      .def_property_readonly("keys", &CostTensor::keys)
      .def_property_readonly("outputs", &CostTensor::outputs)
      .def_property_readonly("values", &CostTensor::values)
      .def("at", &CostTensor::at);

  m.def("cost_context_free", [](const RoadGraph& g, const PriorModel& p,
                                const LocationDomain& d) {
    return CostContextFree(g, p, d);
  });
  m.def("cost_markov1", [](const RoadGraph& g, const PriorModel& p,
                           const LocationDomain& d) {
    return CostMarkov1(g, p, d);
  });
  m.def("cost_context_blanket",
        [](const RoadGraph& g, const PriorModel& p, const LocationDomain& d,
           std::vector<SecretKey> keys, const LagSet& lags) {
          return CostContextBlanket(g, p, d, std::move(keys), lags);
        },
        py::arg("graph"), py::arg("model"), py::arg("domain"), py::arg("keys"),
        py::arg("lags"));

  py::class_<PerturbationMatrix>(m, "Mechanism")
      .def_property_readonly("keys", &PerturbationMatrix::keys)
      .def_property_readonly("outputs", &PerturbationMatrix::outputs)
      .def_property_readonly("matrix", &Dense)
      .def_property_readonly("epsilon",
                             [](const PerturbationMatrix& q) { return q.metadata().epsilon; })
      .def_property_readonly("builder",
                             [](const PerturbationMatrix& q) { return q.metadata().builder; })
      .def("sample", &SampleOutput, py::arg("key"), py::arg("seed"))
      .def("to_text", &FormatMatrix)
      .def_static("from_text", [](const std::string& t) { return ParseMatrix(t); });

  m.def("exp_mechanism",
        [](const std::vector<SecretKey>& keys, const LocationDomain& d, double eps) {
          return ExpMechanism(keys, d, eps);
        },
        py::arg("keys"), py::arg("domain"), py::arg("epsilon"));

  m.def("solve_mechanism",
        [](const CostTensor& cost, const KeyDistribution& prior,
           const LocationDomain& d, double eps, double eta,
           const std::vector<double>& weights) {
          const MechanismLp lp =
              weights.empty()
                  ? BuildMdpLp(cost, prior, BaseKeyMetric(d), eps, eta)
                  : BuildCmdpReducedLp(cost, prior, MetricFor(d, weights), eps, eta);
          const LpSolution s = Solve(lp);
          if (s.status != SolveStatus::kOptimal) {
            throw Error("solver ended with status " + StatusName(s.status));
          }
          return py::make_tuple(s.q, s.objective);
        },
        py::arg("cost"), py::arg("prior"), py::arg("domain"), py::arg("epsilon"),
        py::arg("eta"), py::arg("weights") = std::vector<double>{},
        "Optimal mechanism and its expected loss. Empty `weights` builds the "
        "context-free LP; otherwise keys carry lag-prefix contexts.");

  m.def("expected_loss", &ExpectedLoss, py::arg("mechanism"), py::arg("cost"),
        py::arg("prior"));

  m.def("audit",
        [](const PerturbationMatrix& q, const LocationDomain& d,
           const KeyDistribution& prior, double eps, double eta,
           const std::vector<double>& weights, double tol) {
          const AuditReport r = Audit(q, MetricFor(d, weights), prior, eps, eta, tol);
          py::dict out;
          out["pass"] = r.pass;
          out["constraints_pass"] = r.constraints_pass;
          out["max_violation"] = r.max_violation;
          out["pl_pass"] = r.pl_pass;
          out["max_pl"] = r.max_pl;
          out["expected_pl"] = r.expected_pl;
          return out;
        },
        py::arg("mechanism"), py::arg("domain"), py::arg("prior"),
        py::arg("epsilon"), py::arg("eta"),
        py::arg("weights") = std::vector<double>{},
        py::arg("tolerance") = kDefaultAuditTolerance);

  m.def("ci_test",
        [](const std::vector<std::vector<LocationId>>& rows, int target,
           const LagSet& cond, int permutations, std::uint64_t seed) {
          CiSample s;
          s.gamma = rows.empty() ? 0 : static_cast<int>(rows[0].size()) - 1;
          s.rows = rows;
          const auto r = CiTest(s, target, cond, {permutations, seed});
          return py::make_tuple(r.g_statistic, r.p_value);
        },
        py::arg("rows"), py::arg("target_lag"), py::arg("conditioning"),
        py::arg("permutations") = kMinPermutations, py::arg("seed") = 0);

  m.def("identify_blanket",
        [](const std::vector<std::vector<LocationId>>& sequences, int gamma,
           std::uint64_t seed, int permutations) {
          return IdentifyBlanket(CiSample::FromSequences(sequences, gamma), gamma,
                                 seed, permutations)
              .lags;
        },
        py::arg("sequences"), py::arg("gamma"), py::arg("seed") = 0,
        py::arg("permutations") = kMinPermutations);

  m.def("synthesize_sequences", &SynthesizeSequences, py::arg("graph"),
        py::arg("order"), py::arg("count"), py::arg("length"),
        py::arg("persistence") = 0.85, py::arg("seed") = 1);

  m.def("synthesize",
        [](int rows, int cols, int order, int count, int length, bool heterogeneous,
           std::uint64_t seed) {
          SynthOptions o;
          o.rows = rows;
          o.cols = cols;
          o.order = order;
          o.count = count;
          o.length = length;
          o.heterogeneous = heterogeneous;
          o.seed = seed;
          const SynthData d = Synthesize(o);
          py::dict out;
          out["nodes"] = FormatLocations(d.nodes);
          out["edges"] = FormatEdges(d.edges);
          out["trajectories"] = FormatTrajectories(d.log);
          return out;
        },
        py::arg("rows") = 3, py::arg("cols") = 3, py::arg("order") = 1,
        py::arg("count") = 100, py::arg("length") = 20,
        py::arg("heterogeneous") = false, py::arg("seed") = 1,
        "CSV texts of a synthetic grid graph and its trajectories.");

  m.def("run_sweep",
        [](const std::string& nodes_text, const std::string& edges_text,
           const std::string& trajectories_text, int gamma, double eta,
           std::vector<double> epsilons, std::vector<std::string> mechanisms,
           std::uint64_t seed, int workers) {
          SweepConfig c;
          c.gamma = gamma;
          c.eta = eta;
          c.epsilons = std::move(epsilons);
          if (!mechanisms.empty()) c.mechanisms = std::move(mechanisms);
          c.seed = seed;
          c.workers = workers;
          const RoadGraph g = ParseGraph(nodes_text, edges_text);
          SweepResult r;
          {
            py::gil_scoped_release release;
            r = RunSweep(g, ParseTrajectories(trajectories_text), c);
          }
          return r.files;
        },
        py::arg("nodes"), py::arg("edges"), py::arg("trajectories"),
        py::arg("gamma") = 2, py::arg("eta") = 5.0,
        py::arg("epsilons") = std::vector<double>{0.1, 0.2, 0.3, 0.4, 0.5},
        py::arg("mechanisms") = std::vector<std::string>{}, py::arg("seed") = 1,
        py::arg("workers") = 1,
        "Runs the epsilon sweep on CSV texts; returns output file contents.");
}
