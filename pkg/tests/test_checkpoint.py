from __future__ import annotations

import numpy as np
import pytest

from shotwright.nn import CHECKPOINT_HEADER, CheckpointError, read_entries, write_entries


def test_round_trip_exact_values(tmp_path):
    rng = np.random.default_rng(0)
    entries = {
        "w": rng.normal(size=(3, 4)),
        "b": rng.normal(size=4),
        "scalar": np.float64(0.1 + 0.2),
    }
    meta = {"kind": "demo", "note": "two words here"}
    path = str(tmp_path / "model.ckpt")
    write_entries(path, meta, entries)
    meta2, entries2 = read_entries(path)
    assert meta2 == meta
    assert list(entries2) == ["w", "b", "scalar"]
    for name, arr in entries.items():
        got = entries2[name]
        assert got.shape == np.asarray(arr).shape
        # Byte-exact, not approximate: hex encoding preserves every bit.
        assert np.array_equal(got, np.asarray(arr, dtype=np.float64))


def test_write_is_byte_deterministic(tmp_path):
    entries = {"w": np.arange(6.0).reshape(2, 3)}
    p1 = tmp_path / "a.ckpt"
    p2 = tmp_path / "b.ckpt"
    write_entries(str(p1), {"k": "v"}, entries)
    write_entries(str(p2), {"k": "v"}, entries)
    assert p1.read_bytes() == p2.read_bytes()


def test_header_is_first_line(tmp_path):
    path = tmp_path / "m.ckpt"
    write_entries(str(path), {}, {"x": np.zeros(1)})
    assert path.read_text().split("\n")[0] == CHECKPOINT_HEADER


def test_rejects_bad_header(tmp_path):
    path = tmp_path / "m.ckpt"
    path.write_text("something-else v9\nend\n")
    with pytest.raises(CheckpointError, match="header"):
        read_entries(str(path))


def test_rejects_missing_end_marker(tmp_path):
    path = tmp_path / "m.ckpt"
    write_entries(str(path), {}, {"x": np.zeros(2)})
    text = path.read_text().replace("end\n", "")
    path.write_text(text)
    with pytest.raises(CheckpointError, match="end"):
        read_entries(str(path))


def test_rejects_truncated_data(tmp_path):
    path = tmp_path / "m.ckpt"
    path.write_text(f"{CHECKPOINT_HEADER}\nparam x 2")
    with pytest.raises(CheckpointError, match="truncated"):
        read_entries(str(path))


def test_rejects_wrong_byte_count(tmp_path):
    path = tmp_path / "m.ckpt"
    one_value = np.zeros(1).tobytes().hex()
    path.write_text(f"{CHECKPOINT_HEADER}\nparam x 2\n{one_value}\nend\n")
    with pytest.raises(CheckpointError, match="bytes"):
        read_entries(str(path))


def test_rejects_invalid_hex(tmp_path):
    path = tmp_path / "m.ckpt"
    path.write_text(f"{CHECKPOINT_HEADER}\nparam x 1\nzz\nend\n")
    with pytest.raises(CheckpointError, match="hex"):
        read_entries(str(path))


def test_rejects_duplicate_parameter(tmp_path):
    path = tmp_path / "m.ckpt"
    blob = np.zeros(1).tobytes().hex()
    path.write_text(f"{CHECKPOINT_HEADER}\nparam x 1\n{blob}\nparam x 1\n{blob}\nend\n")
    with pytest.raises(CheckpointError, match="duplicate"):
        read_entries(str(path))


def test_rejects_unrecognized_line(tmp_path):
    path = tmp_path / "m.ckpt"
    path.write_text(f"{CHECKPOINT_HEADER}\nbogus line\nend\n")
    with pytest.raises(CheckpointError, match="unrecognized"):
        read_entries(str(path))


def test_rejects_space_in_names(tmp_path):
    path = str(tmp_path / "m.ckpt")
    with pytest.raises(CheckpointError, match="spaces"):
        write_entries(path, {"bad key": "v"}, {})
    with pytest.raises(CheckpointError, match="spaces"):
        write_entries(path, {}, {"bad name": np.zeros(1)})


def test_scalar_shape_round_trip(tmp_path):
    path = str(tmp_path / "m.ckpt")
    write_entries(path, {}, {"s": np.float64(2.5)})
    _, entries = read_entries(path)
    assert entries["s"].shape == ()
    assert float(entries["s"]) == 2.5


def test_error_messages_carry_line_numbers(tmp_path):
    path = tmp_path / "m.ckpt"
    path.write_text(f"{CHECKPOINT_HEADER}\nmeta onlykey\nend\n")
    with pytest.raises(CheckpointError, match="line 2"):
        read_entries(str(path))
