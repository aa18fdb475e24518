# Copyright 2026 the bprb Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.
"""Prediction-guided reduction and search for binary programs."""

from bprb._core import (
    BprbError,
    GcnParams,
    MipInstance,
    binary_instance,
    bp_rb,
    evaluate,
    exact_bnb,
    generate_instance,
    label_instances,
    parse_instance,
    parse_mps,
    pb_dfs,
    predict,
    read_instance_file,
    reduce,
    rounding_baseline,
    serialize_instance,
    shifted_geomean,
    train,
    write_mps,
)

__all__ = [
    "BprbError",
    "GcnParams",
    "MipInstance",
    "binary_instance",
    "bp_rb",
    "evaluate",
    "exact_bnb",
    "generate_instance",
    "label_instances",
    "parse_instance",
    "parse_mps",
    "pb_dfs",
    "predict",
    "read_instance_file",
    "reduce",
    "rounding_baseline",
    "serialize_instance",
    "shifted_geomean",
    "train",
    "write_mps",
]
