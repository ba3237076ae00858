"""Coefficient file round trips and validation."""

import json
from pathlib import Path

import numpy as np
import pytest

from smurf.core import AffineMap
from smurf.errors import CoefficientFileError
from smurf.machine import WeightTable, smurf_expected_output
from smurf.weightio import (
    dumps_coefficients,
    loads_coefficients,
    read_coefficients,
    write_coefficients,
)

FIXTURE = Path(__file__).parent / "data" / "reference_distance_table.json"


def _sample_table():
    return WeightTable(
        n_states=3, arity=2,
        weights=np.linspace(0.0, 1.0, 9),
        target_name="demo",
        expression="x1 * x2",
        input_maps=[AffineMap(0, 1), AffineMap(-2, 3)],
        output_map=AffineMap(-2, 4),
        grid_resolution=33,
        solver_info={"iterations": 12, "phi": -0.25, "residual": 1e-12},
        master_seed=77,
    )


class TestRoundTrip:
    def test_write_read_identical_table(self, tmp_path):
        table = _sample_table()
        path = tmp_path / "w.json"
        write_coefficients(table, path)
        loaded = read_coefficients(path)
        assert loaded.n_states == table.n_states
        assert loaded.arity == table.arity
        np.testing.assert_array_equal(loaded.weights, table.weights)
        assert loaded.input_maps == table.input_maps
        assert loaded.output_map == table.output_map
        assert loaded.expression == table.expression
        assert loaded.solver_info == table.solver_info
        assert loaded.master_seed == 77

    def test_file_bytes_idempotent(self, tmp_path):
        path = tmp_path / "w.json"
        write_coefficients(_sample_table(), path)
        original = path.read_bytes()
        write_coefficients(read_coefficients(path), path)
        assert path.read_bytes() == original

    def test_weights_survive_at_full_precision(self):
        table = WeightTable(2, 1, [1 / 3, 2 / 3])
        loaded = loads_coefficients(dumps_coefficients(table))
        assert loaded.weights[0] == 1 / 3 and loaded.weights[1] == 2 / 3


class TestValidation:
    def _doc(self):
        return json.loads(dumps_coefficients(_sample_table()))

    def _reject(self, doc, match=None):
        with pytest.raises(CoefficientFileError, match=match):
            loads_coefficients(json.dumps(doc))

    def test_weight_above_one_rejected(self):
        doc = self._doc()
        doc["weights"][3] = 1.5
        self._reject(doc, "outside")

    def test_negative_weight_rejected(self):
        doc = self._doc()
        doc["weights"][0] = -0.2
        self._reject(doc, "outside")

    def test_wrong_length_rejected(self):
        doc = self._doc()
        doc["weights"] = doc["weights"][:-1]
        self._reject(doc, "exactly")

    def test_version_mismatch_rejected(self):
        doc = self._doc()
        doc["format_version"] = 2
        self._reject(doc, "format_version")

    def test_missing_field_rejected(self):
        doc = self._doc()
        del doc["codeword_order"]
        self._reject(doc, "missing")

    def test_foreign_codeword_order_rejected(self):
        doc = self._doc()
        doc["codeword_order"] = "digit1-most-significant"
        self._reject(doc, "codeword_order")

    def test_bad_map_rejected(self):
        doc = self._doc()
        doc["input_maps"][0] = {"lo": 1.0, "hi": 0.0}
        self._reject(doc)

    def test_non_numeric_weight_rejected(self):
        doc = self._doc()
        doc["weights"][5] = "high"
        self._reject(doc, "not a number")

    def test_garbage_rejected(self):
        with pytest.raises(CoefficientFileError):
            loads_coefficients("{not json")


class TestReferenceFixture:
    def test_hand_authored_file_loads_and_evaluates(self):
        table = read_coefficients(FIXTURE)
        assert table.n_states == 4 and table.arity == 2
        out = smurf_expected_output(table, [0.5, 0.5])
        assert abs(out - 0.489875) <= 1e-12
