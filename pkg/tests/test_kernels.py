"""Equivalence of the compiled sweep kernels and the pure-Python fallback."""

import numpy as np
import pytest

from phiharm import _kernels_py as pk
from phiharm import groups as gr
from phiharm import nfunction as nfn
from phiharm import solver as sv

ck = pytest.importorskip("phiharm._kernels")

NFS = [nfn.power(2), nfn.power(3), nfn.power_norm(1.5), nfn.cosh_nf(),
       nfn.plog(2)]


def _setup(spec="free:2", radius=3, seed=0):
    ball = gr.build_ball(spec, radius)
    rng = np.random.default_rng(seed)
    values = rng.normal(size=ball.n_vertices)
    nbr = np.ascontiguousarray(ball.nbr, dtype=np.int32)
    free = ball.interior_indices().astype(np.int64)
    inv = np.asarray(ball.group.inverse_index, dtype=np.int32)
    return ball, values, nbr, free, inv, rng


@pytest.mark.parametrize("nf", NFS, ids=lambda nf: nf.spec_string)
def test_plain_kernels_agree(nf):
    ball, values, nbr, free, inv, _ = _setup()
    kind, p = nf.kernel_spec
    v_c = values.copy()
    v_p = values.copy()
    for _ in range(3):
        ch_c = ck.sweep_plain(v_c, nbr, free, kind, p, 1e-13)
        ch_p = pk.sweep_plain(v_p, nbr, free, nf.dphi, 1e-13)
        assert ch_c == pytest.approx(ch_p, rel=1e-12, abs=1e-15)
        assert np.allclose(v_c, v_p, atol=1e-14)
    r_c = ck.residual_plain(v_c, nbr, free, kind, p)
    r_p = pk.residual_plain(v_p, nbr, free, nf.dphi)
    assert r_c == pytest.approx(r_p, rel=1e-10, abs=1e-13)
    e_c = ck.energy_plain(v_c, nbr, kind, p)
    e_p = pk.energy_plain(v_p, nbr, nf.phi_values)
    assert e_c == pytest.approx(e_p, rel=1e-12)


@pytest.mark.parametrize("nf", NFS, ids=lambda nf: nf.spec_string)
def test_offset_kernels_agree(nf):
    ball, values, nbr, free, inv, rng = _setup(seed=1)
    kind, p = nf.kernel_spec
    off = np.where(nbr >= 0, rng.normal(size=nbr.shape), 0.0)
    off = np.ascontiguousarray(off)
    v_c = values.copy()
    v_p = values.copy()
    for _ in range(3):
        ck.sweep_offset(v_c, nbr, off, inv, free, kind, p, 1e-13)
        pk.sweep_offset(v_p, nbr, off, inv, free, nf.dphi, 1e-13)
        assert np.allclose(v_c, v_p, atol=1e-14)
    r_c = ck.residual_offset(v_c, nbr, off, inv, free, kind, p)
    r_p = pk.residual_offset(v_p, nbr, off, inv, free, nf.dphi)
    assert r_c == pytest.approx(r_p, rel=1e-10, abs=1e-13)
    e_c = ck.energy_offset(v_c, nbr, off, kind, p)
    e_p = pk.energy_offset(v_p, nbr, off, nf.phi_values)
    assert e_c == pytest.approx(e_p, rel=1e-12)


def test_offset_zero_matches_plain():
    ball, values, nbr, free, inv, _ = _setup(seed=2)
    nf = nfn.cosh_nf()
    kind, p = nf.kernel_spec
    off = np.zeros(nbr.shape)
    v_a = values.copy()
    v_b = values.copy()
    ck.sweep_plain(v_a, nbr, free, kind, p, 1e-13)
    ck.sweep_offset(v_b, nbr, off, inv, free, kind, p, 1e-13)
    assert np.allclose(v_a, v_b, atol=1e-12)


def test_backend_selection(monkeypatch):
    assert sv.compiled_available()
    assert sv.kernel_backend(nfn.power(2)) == "compiled"
    parsed = nfn.parse_nfunction("abs(x)^p / p", "abs(x)^(p-1)", {"p": 2.0})
    assert sv.kernel_backend(parsed) == "pure"
    monkeypatch.setenv("PHIHARM_PURE", "1")
    assert sv.kernel_backend(nfn.power(2)) == "pure"


def test_pure_solver_path_matches_compiled(monkeypatch):
    import phiharm.phi_laplacian as pl

    ball = gr.build_ball("z:2", 4)
    form = pl.DirichletForm(nfn.cosh_nf(), ball)
    rng = np.random.default_rng(3)
    f = ball.function(rng.normal(size=ball.n_vertices))
    dec_fast = sv.decompose(form, f)
    monkeypatch.setenv("PHIHARM_PURE", "1")
    dec_pure = sv.decompose(form, f)
    assert np.max(np.abs(dec_fast.h.values - dec_pure.h.values)) <= 1e-10
