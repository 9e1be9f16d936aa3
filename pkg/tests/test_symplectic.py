import math

import numpy as np
import pytest

from symopt import symplectic as sym
from symopt.errors import DomainError, ParseError, SingularError


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def _close(m1, m2, tol):
    return np.max(np.abs(m1.as_array() - m2.as_array())) <= tol


def test_unimodular_validation():
    with pytest.raises(DomainError):
        sym.RayMatrix(1.0, 1.0, 1.0, 1.0)
    # small drift is renormalized
    m = sym.RayMatrix(1.0 + 1e-9, 0.0, 0.0, 1.0)
    assert abs(m.det - 1.0) < 1e-14


def test_text_round_trip():
    m = sym.RayMatrix(0.5, 1.25, -0.6, 0.5)
    assert sym.RayMatrix.from_text(m.to_text()) == m
    with pytest.raises(ParseError):
        sym.RayMatrix.from_text("ABCD 1 2 3")


def test_compose_examples(rng):
    m = sym.random_unimodular(rng)
    assert _close(sym.compose(sym.identity(), m), m, 0)
    f, d = 2.0, 0.7
    got = sym.compose(sym.thin_lens(f), sym.free_space(d))
    assert _close(got, sym.RayMatrix(1, d, -1 / f, 1 - d / f), 1e-15)
    for _ in range(100):
        m1, m2 = sym.random_unimodular(rng), sym.random_unimodular(rng)
        assert abs(sym.compose(m1, m2).det - 1.0) < 1e-9


def test_to_sr_examples():
    p = sym.to_sr(sym.identity())
    assert p.s == 1 and p.r == 0
    p = sym.to_sr(sym.fourier())
    assert abs(p.s + 1j) < 1e-15 and abs(p.r) < 1e-15
    assert _close(sym.from_sr(sym.SRParams(1, 0)), sym.identity(), 0)
    assert _close(sym.from_sr(sym.SRParams(-1j, 0)), sym.fourier(), 0)


def test_sr_round_trip_and_composition(rng):
    for _ in range(100):
        m1, m2 = sym.random_unimodular(rng), sym.random_unimodular(rng)
        assert _close(sym.from_sr(sym.to_sr(m1)), m1, 1e-12)
        p1, p2 = sym.to_sr(m1), sym.to_sr(m2)
        pc = sym.sr_compose(p1, p2)
        ref = sym.to_sr(sym.compose(sym.from_sr(p1), sym.from_sr(p2)))
        assert abs(pc.s - ref.s) < 1e-10 and abs(pc.r - ref.r) < 1e-10
        assert abs(abs(pc.s) ** 2 - abs(pc.r) ** 2 - 1) < 1e-10
    p = sym.to_sr(sym.random_unimodular(rng))
    same = sym.sr_compose(p, sym.SRParams(1, 0))
    assert abs(same.s - p.s) < 1e-15 and abs(same.r - p.r) < 1e-15


def test_sr_invariant_violation():
    with pytest.raises(DomainError):
        sym.SRParams(1.0, 0.5)


def test_q_forward(rng):
    q = 0.3 - 1.1j
    assert sym.q_forward(sym.identity(), q) == q
    assert abs(sym.q_forward(sym.free_space(2.5), q) - (q + 2.5)) < 1e-15
    for _ in range(20):
        m1, m2 = sym.random_unimodular(rng), sym.random_unimodular(rng)
        two = sym.q_forward(m2, sym.q_forward(m1, q))
        one = sym.q_forward(sym.compose(m2, m1), q)
        assert abs(two - one) < 1e-10
    with pytest.raises(SingularError):
        sym.q_forward(sym.RayMatrix(1, 0, -1, 1), 1.0)


def test_q_of_matrix(rng):
    gamma = 0.8
    q = sym.q_of_matrix(sym.RayMatrix(1, 0, -gamma, 1))
    assert abs(q - 1 / (gamma - 1j)) < 1e-15
    # the unsqueezed vacuum
    assert abs(sym.q_of_matrix(sym.identity()) - 1j) < 1e-15
    for _ in range(20):
        m, m2 = sym.random_unimodular(rng), sym.random_unimodular(rng)
        lhs = sym.q_forward(m2, -sym.q_of_matrix(m))
        rhs = -sym.q_of_matrix(sym.compose(m2, m))
        assert abs(lhs - rhs) < 1e-10


def test_chirp_scale_chirp(rng):
    assert sym.decompose_chirp_scale_chirp(sym.identity()) == (0.0, 1.0, 0.0)
    assert sym.decompose_chirp_scale_chirp(sym.free_space(1.7)) == (0.0, 1.0, 1.7)
    with pytest.raises(DomainError):
        sym.decompose_chirp_scale_chirp(sym.fourier())
    for _ in range(50):
        m = sym.random_unimodular(rng)
        assert _close(sym.product(sym.decompose(m)), m, 1e-12)
    for m in (sym.fourier(), sym.RayMatrix(0, -2, 0.5, 0), sym.RayMatrix(0, 1, -1, 3)):
        assert _close(sym.product(sym.decompose(m)), m, 1e-12)
    m = sym.RayMatrix(0, 1, -1, 0)
    assert _close(sym.product(sym.decompose_via_c(m)), m, 1e-12)


def test_frft_form(rng):
    p, ms, phi = sym.decompose_frft_form(sym.identity())
    assert (p, ms, phi) == (0.0, 1.0, 0.0)
    p, ms, phi = sym.decompose_frft_form(sym.fourier())
    assert abs(p) < 1e-15 and abs(ms - 1) < 1e-15 and abs(phi - math.pi / 2) < 1e-15
    for fe in (1.0, 0.4, 3.0):
        for _ in range(30):
            m = sym.random_unimodular(rng)
            rebuilt = sym.product(sym.frft_form_factors(*sym.decompose_frft_form(m, fe), fe=fe))
            assert _close(rebuilt, m, 1e-10)


def test_thick_lens(rng):
    n, l, r = 1.5, 0.4, 2.0
    m = sym.thick_lens_matrix(n, l, r, r)
    ref = [1 - (1 - 1 / n) * l / r, l / n,
           -((n - 1) * 2 / r - l * (n - 1) ** 2 / (n * r * r)), 1 - (1 - 1 / n) * l / r]
    assert np.max(np.abs(m.as_array().ravel() - ref)) < 1e-12
    # parameters chosen on the rotation family
    fe, phi = 0.8, 0.6
    l = n * fe * math.sin(phi)
    r = l * (n - 1) / (n * (1 - math.cos(phi)))
    rot = sym.thick_lens_matrix(n, l, r, r)
    ref = sym.RayMatrix(math.cos(phi), fe * math.sin(phi), -math.sin(phi) / fe, math.cos(phi))
    assert _close(rot, ref, 1e-10)
    for _ in range(30):
        args = (rng.uniform(1.1, 2.5), rng.uniform(0.05, 1.0),
                rng.uniform(0.5, 5.0) * rng.choice([-1, 1]), rng.uniform(0.5, 5.0))
        assert abs(sym.thick_lens_matrix(*args).det - 1) < 1e-10
    with pytest.raises(DomainError):
        sym.thick_lens_matrix(1.5, 0.4, 0.0, 1.0)


def test_random_unimodular_min_b(rng):
    for _ in range(20):
        assert abs(sym.random_unimodular(rng, min_b=0.5).b) >= 0.5
