"""Slice sampling of sub-level sets and byte-deterministic export."""

import json
import math

import numpy as np
import pytest

from henonlab import DomainError, HenonMap, SliceSpec, annulus_radius, export_grid, sample_slice
from henonlab.grid import (STATUS_NAMES, STATUS_K_CANDIDATE, STATUS_OMEGA_PRIME,
                           STATUS_OUTSIDE, export_bytes)

QUAD = HenonMap(2, 3, (0,))


def small_spec(n=32):
    return SliceSpec(origin=(0, 0), span_u=(1, 0), span_v=(0, 1),
                     grid_w=n, grid_h=n, extent=(3.0, 3.0))


@pytest.fixture(scope="module")
def grid():
    return sample_slice(QUAD, small_spec(), c=1.0, budget=150)


def test_degenerate_spans_rejected():
    with pytest.raises(DomainError):
        SliceSpec(origin=(0, 0), span_u=(1, 1), span_v=(2, 2),
                  grid_w=8, grid_h=8, extent=(1.0, 1.0))


def test_tiny_grid_rejected():
    with pytest.raises(DomainError):
        SliceSpec(origin=(0, 0), span_u=(1, 0), span_v=(0, 1),
                  grid_w=1, grid_h=8, extent=(1.0, 1.0))


def test_nonpositive_level_rejected():
    with pytest.raises(DomainError):
        sample_slice(QUAD, small_spec(8), c=0.0)


def test_annulus_radius_ranges():
    assert annulus_radius(0.0, 1.0) is None
    assert annulus_radius(2.0, 1.0) is None
    assert annulus_radius(0.5, 1.0) == pytest.approx(math.exp(0.5))
    with pytest.raises(ValueError):
        annulus_radius(-0.1, 1.0)


def test_statuses_and_annulus_consistent(grid):
    H, W = grid.green.shape
    assert grid.status.shape == (H, W)
    for s in np.unique(grid.status):
        assert int(s) in STATUS_NAMES
    omega = grid.status == STATUS_OMEGA_PRIME
    assert np.all(grid.green[omega] < 1.0)
    assert np.all(np.isfinite(grid.annulus[omega]) |
                  (grid.green[omega] == 0.0))
    outside = grid.status == STATUS_OUTSIDE
    assert np.all(grid.green[outside] >= 1.0)
    k_cand = grid.status == STATUS_K_CANDIDATE
    assert np.all(grid.green[k_cand] == 0.0)


def test_export_deterministic(grid):
    g2 = sample_slice(QUAD, small_spec(), c=1.0, budget=150)
    for fmt in ("csv", "pgm", "json"):
        assert export_bytes(grid, fmt) == export_bytes(g2, fmt)


def test_csv_shape_and_header(grid):
    lines = export_bytes(grid, "csv").decode().split("\r\n")
    assert lines[0] == "u,v,greenPlus,status,annulusRadius"
    assert len([ln for ln in lines[1:] if ln]) == 32 * 32


def test_json_round_trips(grid):
    doc = json.loads(export_bytes(grid, "json"))
    assert doc["metadata"]["map"]["d"] == 2
    assert len(doc["greenPlus"]) == 32 * 32
    assert doc["metadata"]["statusLegend"]["1"] == "in-omega-prime"
    assert np.allclose(np.array(doc["greenPlus"]).reshape(32, 32), grid.green)


def test_pgm_header_and_pixels(grid):
    data = export_bytes(grid, "pgm")
    assert data.startswith(b"P5\n32 32\n65535\n")
    pixels = np.frombuffer(data[len(b"P5\n32 32\n65535\n"):], dtype=">u2")
    assert pixels.size == 32 * 32
    assert pixels.max() == 65535  # extent 3 reaches well past G+ = c


def test_export_grid_writes_file(tmp_path, grid):
    out = tmp_path / "g.csv"
    export_grid(grid, "csv", out)
    assert out.read_bytes() == export_bytes(grid, "csv")


def test_unknown_format_rejected(grid):
    with pytest.raises(ValueError):
        export_bytes(grid, "bmp")
