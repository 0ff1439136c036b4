import math

import numpy as np
import pytest

import hgroup


def test_heisenberg_law():
    H = hgroup.heisenberg(1)
    assert H.dim == 3 and H.hom_dim == 4 and H.step == 2
    # [x,y,t].[u,v,w] = [x+u, y+v, t+w+2(yu-xv)]
    assert H.mul([1, 0, 0], [0, 1, 0]) == pytest.approx([1, 1, -2])
    assert H.norm([0, 0, 4]) == pytest.approx(2.0)
    x = [0.3, -0.7, 1.1]
    assert H.mul(x, H.inverse(x)) == pytest.approx([0, 0, 0], abs=1e-15)
    assert H.norm(H.dilate(2.0, x)) == pytest.approx(2 * H.norm(x))


def test_bump_matches_closed_form():
    H = hgroup.heisenberg(1)
    s = hgroup.GridSpec([9, 9, 9], [2.0, 2.0, 3.0])
    f = hgroup.make_test_function("bump", H, s, width=0.8)
    assert f.shape == (9, 9, 9)
    x, y, t = np.meshgrid(*[np.linspace(-L, L, 9) for L in (2.0, 2.0, 3.0)], indexing="ij")
    want = np.exp(-(x**2 + y**2) / 0.64 - t**2 / 0.64**2)
    assert np.max(np.abs(f - want)) <= 1e-15


def test_unknown_kind_raises():
    H = hgroup.heisenberg(1)
    s = hgroup.GridSpec([5, 5, 5], [1.0, 1.0, 1.0])
    with pytest.raises(hgroup.HgError, match="UnknownKind"):
        hgroup.make_test_function("nosuch", H, s)


def test_convolution_with_zero_and_mass():
    H = hgroup.heisenberg(1)
    s = hgroup.GridSpec([17, 17, 17], [3.0, 3.0, 4.0])
    f = hgroup.make_test_function("bump", H, s, width=0.7)
    z = np.zeros_like(f)
    assert not np.any(hgroup.convolve(H, s, z, f))
    bank = hgroup.KernelBank(H, s, -1, 1)
    assert hgroup.integral(s, bank.psi(0)) == pytest.approx(1.0, abs=1e-12)


def test_lp_pieces_sum_telescopes():
    H = hgroup.heisenberg(1)
    s = hgroup.GridSpec([17, 17, 17], [3.0, 3.0, 4.0])
    bank = hgroup.KernelBank(H, s, -1, 1)
    f = hgroup.make_test_function("band", H, s, width=0.8)
    pieces = bank.decompose(f, -1, 1)
    assert sorted(pieces) == [-1, 0, 1]
    total = sum(pieces.values())
    want = hgroup.convolve(H, s, f, bank.psi(2)) - hgroup.convolve(H, s, f, bank.psi(-1))
    assert np.max(np.abs(total - want)) <= 1e-10 * np.max(np.abs(want))


def test_config_round_trip_and_group_suite():
    text = hgroup.default_config()
    assert hgroup.canonical_config(text) == text
    cfg = text.replace("suites = group calculus lp bb dbarb", "suites = group")
    cfg = cfg.replace("samples = 10000", "samples = 500").replace("pair_samples = 100000", "pair_samples = 500")
    code, report = hgroup.run_suite(cfg)
    assert code == 0
    ids = [c["id"] for c in report["checks"]]
    assert "group.associativity" in ids
    assert all(c["pass"] for c in report["checks"])
    assert "timings" not in report
    with pytest.raises(hgroup.HgError, match="line 2"):
        hgroup.canonical_config("[grid]\nbogus = 1\n")


def test_empty_suite():
    code, report = hgroup.run_suite("[run]\nsuites =\n")
    assert code == 0 and report["checks"] == []
