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
"""Context-aware metric differential privacy for location data."""

from ._cmdp import (
    CostTensor,
    Error,
    InvalidArgument,
    IoError,
    LocationDomain,
    Mechanism,
    ParseError,
    PriorModel,
    RoadGraph,
    audit,
    ci_test,
    cost_context_blanket,
    cost_context_free,
    cost_markov1,
    estimate_priors,
    estimate_priors_from_files,
    exp_mechanism,
    expected_loss,
    haversine_km,
    identify_blanket,
    run_sweep,
    solve_mechanism,
    synthesize,
    synthesize_sequences,
)

__all__ = [name for name in dir() if not name.startswith("_")]
