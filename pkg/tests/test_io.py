import json

import numpy as np
import pytest

from qsm import io, zoo
from qsm.errors import InputError


def test_machine_roundtrip(tmp_path):
    m = zoo.renewal(5)
    path = tmp_path / "r5.json"
    io.write_machine(m, path)
    back = io.read_machine(path)
    assert back.alphabet == m.alphabet and back.states == m.states and back.name == m.name
    np.testing.assert_array_equal(back.transitions, m.transitions)


def test_yaml_machine(tmp_path):
    path = tmp_path / "gm.yaml"
    path.write_text(
        "alphabet: ['0', '1']\n"
        "states: [A, B]\n"
        "transitions:\n"
        "  - {from: A, symbol: '0', to: A, prob: 0.5}\n"
        "  - {from: A, symbol: '1', to: B, prob: 0.5}\n"
        "  - {from: B, symbol: '0', to: A, prob: 1.0}\n"
    )
    m = io.read_machine(path)
    assert m.name == "gm"
    np.testing.assert_array_equal(m.transitions, zoo.golden_mean(0.5).transitions)


@pytest.mark.parametrize(
    "doc, fragment",
    [
        ({"alphabet": ["0"], "states": ["A"]}, "missing key"),
        ({"alphabet": ["0"], "states": ["A"], "transitions": [{"from": "Z", "symbol": "0", "to": "A", "prob": 1}]}, "unresolved"),
        ({"alphabet": ["0"], "states": ["A"], "transitions": [{"from": "A", "symbol": "0", "to": "A", "prob": "x"}]}, "not a number"),
        (
            {"alphabet": ["0"], "states": ["A"],
             "transitions": [{"from": "A", "symbol": "0", "to": "A", "prob": 0.5}] * 2},
            "duplicate",
        ),
        ([1, 2], "mapping"),
    ],
)
def test_malformed_documents(tmp_path, doc, fragment):
    path = tmp_path / "bad.json"
    path.write_text(json.dumps(doc))
    with pytest.raises(InputError, match=fragment):
        io.read_machine(path)


def test_invalid_json(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text("{not json")
    with pytest.raises(io.MachineFileError):
        io.read_machine(path)


def test_load_prefers_existing_file(tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    io.write_machine(zoo.renewal(3), tmp_path / "renewal{2}")
    assert io.load_machine("renewal{2}").n_states == 3
    assert io.load_machine("golden_mean{0.5}").n_states == 2
    with pytest.raises(FileNotFoundError):
        io.load_machine("missing.json")


def test_blocks_roundtrip(tmp_path):
    rng = np.random.default_rng(0)
    blocks = {"lambda": rng.random(4), "Gamma[0]": rng.standard_normal((4, 4)), "W_r": rng.standard_normal((5, 3))}
    path = tmp_path / "b.csv"
    io.write_blocks(path, blocks, {"export": "canonical"})
    back, meta = io.read_blocks(path)
    assert meta == {"export": "canonical"}
    assert list(back) == list(blocks)
    for k in blocks:
        np.testing.assert_array_equal(back[k], blocks[k])


def test_fmt_is_lossless():
    for v in (1 / 3, np.pi, 1e-300, 0.1 + 0.2):
        assert float(io.fmt(v)) == v
