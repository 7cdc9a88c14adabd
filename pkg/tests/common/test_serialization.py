import json

import numpy as np
import pytest

from rbm_trace.common.exc import RbmTraceError
from rbm_trace.common.serialization import canonical_json, read_json, write_csv, write_json


def test_canonical_json_sorts_keys_and_converts_numpy():
    doc = canonical_json({"b": np.float64(0.5), "a": np.arange(3), "c": (np.int64(1), np.bool_(True))})
    assert doc == '{"a":[0,1,2],"b":0.5,"c":[1,true]}'


def test_write_and_read_json(tmp_path):
    path = write_json(tmp_path / "sub" / "x.json", {"k": np.float32(1.5)})
    assert read_json(path) == {"k": 1.5}
    assert json.loads((tmp_path / "sub" / "x.json").read_text()) == {"k": 1.5}


def test_read_json_missing_file_has_path_context(tmp_path):
    with pytest.raises(RbmTraceError, match="missing.json"):
        read_json(tmp_path / "missing.json")


def test_write_csv_header_only_and_rows(tmp_path):
    empty = tmp_path / "empty.csv"
    write_csv(empty, ["a", "b"], [])
    assert empty.read_text() == "a,b\n"

    full = tmp_path / "full.csv"
    write_csv(full, ["a", "b"], {"a": np.array([1, 2]), "b": np.array([0.1, 0.25])})
    lines = full.read_text().splitlines()
    assert lines[0] == "a,b"
    assert len(lines) == 3
    assert float(lines[1].split(",")[1]) == 0.1
