# Copyright 2026 The cmdp Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     https://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

import math
import os
import tempfile

import pytest

import cmdp

# Two points 1 km apart on the equator.
ONE_KM_DEG = 1.0 / 6371.0088 * 180.0 / math.pi
LINE = [(1, 0.0, 0.0), (2, 0.0, ONE_KM_DEG)]


def test_haversine_one_degree():
    assert cmdp.haversine_km(0, 0, 0, 1) == pytest.approx(111.195, abs=1e-3)


def test_two_by_two_lp():
    dom = cmdp.LocationDomain(LINE)
    cost = cmdp.CostTensor([1, 2], [1, 2], [0.0, 1.0, 1.0, 0.0])
    prior = {(1,): 0.5, (2,): 0.5}
    q, obj = cmdp.solve_mechanism(cost, prior, dom, math.log(2), 5.0)
    assert obj == pytest.approx(1 / 3, abs=1e-9)
    assert q.matrix[0] == pytest.approx([2 / 3, 1 / 3], abs=1e-9)
    assert q.keys == [(1,), (2,)]
    report = cmdp.audit(q, dom, prior, math.log(2), 5.0)
    assert report["pass"]
    assert report["max_pl"] == pytest.approx(math.log(2), abs=1e-9)
    assert cmdp.expected_loss(q, cost, prior) == pytest.approx(obj)


def test_exp_mechanism_and_sampling():
    dom = cmdp.LocationDomain(LINE)
    q = cmdp.exp_mechanism([1, 2], dom, math.log(4))
    assert q.matrix[0] == pytest.approx([2 / 3, 1 / 3])
    assert q.sample((1,), 7) == q.sample((1,), 7)
    back = cmdp.Mechanism.from_text(q.to_text())
    assert back.matrix == q.matrix


def test_graph_priors_and_cost():
    nodes = [(1, 0.0, 0.0), (2, 0.0, ONE_KM_DEG), (3, 0.0, 2 * ONE_KM_DEG)]
    edges = [(1, 2, 1.0), (2, 1, 1.0), (2, 3, 1.0), (3, 2, 1.0)]
    g = cmdp.RoadGraph(nodes, edges)
    assert g.distances_to(3) == {1: 2.0, 2: 1.0, 3: 0.0}
    model = cmdp.estimate_priors([[1], [3]], [1, 2, 3], 0)
    model.set_task_prior({3: 1.0})
    dom = cmdp.LocationDomain([nodes[0], nodes[2]], nodes)
    cost = cmdp.cost_context_free(g, model, dom)
    assert cost.at(0, 1) == pytest.approx(1.0)


def test_errors_map_to_python():
    with pytest.raises(ValueError):
        cmdp.exp_mechanism([1], cmdp.LocationDomain(LINE), 0.0)
    with pytest.raises(OSError):
        cmdp.RoadGraph.load("/nonexistent/nodes.csv", "/nonexistent/edges.csv")


def test_blanket_on_order_two_chain():
    data = cmdp.synthesize(rows=3, cols=3)
    with tempfile.TemporaryDirectory() as d:
        for name in ("nodes", "edges"):
            with open(os.path.join(d, name + ".csv"), "w") as f:
                f.write(data[name])
        g = cmdp.RoadGraph.load(os.path.join(d, "nodes.csv"),
                                os.path.join(d, "edges.csv"))
    seqs = cmdp.synthesize_sequences(g, 2, 60, 25, seed=4)
    assert cmdp.identify_blanket(seqs, 3, seed=1) == [1, 2]


def test_small_sweep_is_deterministic():
    data = cmdp.synthesize(rows=3, cols=3, count=60, length=12, seed=2)
    args = (data["nodes"], data["edges"], data["trajectories"])
    a = cmdp.run_sweep(*args, epsilons=[0.3], mechanisms=["LP", "ExpMech"])
    b = cmdp.run_sweep(*args, epsilons=[0.3], mechanisms=["LP", "ExpMech"])
    assert a == b
    assert a["results.csv"].startswith("mechanism,epsilon,expected_loss_km")
