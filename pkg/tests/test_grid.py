import numpy as np
import pytest

from koopman import ccr
from koopman.grid import (
    Axis, GridSpec, Wavefunction, apply_lambda, apply_mult, apply_ncpoly,
    dump_state, expectation, gaussian_init, inner_product, leakage,
    load_state, marginal_density, marginal_to_csv, norm, normalize,
    phase_mask, shift,
)


def make_grid(n=64, lo=-8.0, ext=16.0, axes="qp"):
    return GridSpec(tuple(Axis(a, a[0], lo, ext, n) for a in axes))


GRID = make_grid()
W = gaussian_init(GRID, centers=(0.0, 2.0), widths=(1.0, 1.0))


def test_axis_validation():
    with pytest.raises(ValueError, match="power of two"):
        Axis("q", "q", -1, 2, 24)
    with pytest.raises(ValueError, match="role letter"):
        Axis("z", "q", -1, 2, 16)
    with pytest.raises(ValueError, match="bad axis role"):
        Axis("y", "y", -1, 2, 16)


def test_inner_product_and_norm():
    assert abs(norm(W) - 1.0) <= 1e-12
    assert inner_product(W, Wavefunction(GRID, 1j * W.values)) \
        == pytest.approx(1j * inner_product(W, W), abs=1e-12)
    # discrete plane waves on the p axis are orthogonal
    p = GRID.coordinate("p")
    k = GRID.wavenumber("p")
    k1, k2 = np.sort(np.unique(np.abs(k)))[1:3]
    a = Wavefunction(GRID, np.broadcast_to(np.exp(1j * k1 * p), GRID.shape).copy())
    b = Wavefunction(GRID, np.broadcast_to(np.exp(1j * k2 * p), GRID.shape).copy())
    assert abs(inner_product(a, b)) <= 1e-12 * norm(a) * norm(b)


def test_grid_mismatch():
    other = gaussian_init(make_grid(32), (0, 0), (2, 2))
    with pytest.raises(ValueError, match="grid mismatch"):
        inner_product(W, other)


def test_apply_mult_identity_and_coordinate():
    assert np.array_equal(apply_mult(W, 1.0).values, W.values)
    got = apply_mult(W, GRID.coordinate("q"))
    assert np.allclose(got.values, GRID.coordinate("q") * W.values)
    # CPoly route: kinetic weighting
    from koopman.exactpoly import ring
    R = ring("q p")
    got2 = apply_mult(W, R["p"] ** 2 / 2)
    assert np.allclose(got2.values, GRID.coordinate("p") ** 2 / 2 * W.values)


def test_apply_lambda_eigenfunction():
    k = GRID.wavenumber("q")
    k0 = np.unique(k[k > 0])[2]
    q = GRID.coordinate("q")
    p = GRID.coordinate("p")
    vals = np.exp(1j * k0 * q) * np.exp(-(p ** 2))
    w = Wavefunction(GRID, np.broadcast_to(vals, GRID.shape).copy())
    got = apply_lambda(w, "q")
    assert np.max(np.abs(got.values - k0 * w.values)) <= 1e-10
    const = Wavefunction(GRID, np.ones(GRID.shape, dtype=complex))
    assert np.max(np.abs(apply_lambda(const, "q").values)) <= 1e-12


def test_lambda_on_real_even_gaussian_has_zero_expectation():
    w = gaussian_init(GRID, (0.0, 0.0), (1.0, 1.0))
    val = inner_product(w, apply_lambda(w, "q"))
    assert abs(val) <= 1e-10


def _band_limited(rng, grid, frac=6):
    spec = np.zeros(grid.shape, dtype=complex)
    cut = [n // frac for n in grid.shape]
    sl = tuple(slice(0, c) for c in cut)
    block = rng.standard_normal([c for c in cut]) + 1j * rng.standard_normal([c for c in cut])
    spec[sl] = block
    for ax in range(len(grid.shape)):
        spec = np.roll(spec, -cut[ax] // 2, axis=ax)
    vals = np.fft.ifftn(spec)
    return Wavefunction(grid, vals / np.sqrt(np.sum(np.abs(vals) ** 2) * grid.cell_weight))


def test_apply_lambda_self_adjoint_randomized():
    rng = np.random.default_rng(23)
    for _ in range(5):
        a = _band_limited(rng, GRID)
        b = _band_limited(rng, GRID)
        lhs = inner_product(a, apply_lambda(b, "q"))
        rhs = inner_product(apply_lambda(a, "q"), b)
        assert abs(lhs - rhs) <= 1e-10


def test_discrete_canonical_commutator():
    # [q-multiplication, -i d/dq] acts as i on states away from the seam
    w = gaussian_init(GRID, (0.0, 0.0), (1.0, 1.0))
    qw = apply_mult(w, GRID.coordinate("q"))
    c = apply_mult(apply_lambda(w, "q"), GRID.coordinate("q")).values \
        - apply_lambda(qw, "q").values
    assert np.max(np.abs(c - 1j * w.values)) <= 1e-8
    # multiplication operators commute: no discretization error at all,
    # only float reassociation at the last ulp
    pq = apply_mult(apply_mult(w, GRID.coordinate("q")), GRID.coordinate("p"))
    qp = apply_mult(apply_mult(w, GRID.coordinate("p")), GRID.coordinate("q"))
    assert np.max(np.abs(pq.values - qp.values)) <= 1e-15


def test_parseval():
    spec = np.fft.fftn(W.values)
    phys = np.sum(np.abs(W.values) ** 2) * GRID.cell_weight
    spectral = np.sum(np.abs(spec) ** 2) / W.values.size * GRID.cell_weight
    assert abs(phys - spectral) <= 1e-12


def test_expectation_examples():
    w = gaussian_init(GRID, (0.7, 1.3), (1.0, 0.8))
    assert expectation(w, GRID.coordinate("p")).real == pytest.approx(1.3, abs=1e-8)
    # composition route and exact Gaussian moments: for amplitude width s,
    # the density variance is s^2/2
    val = expectation(w, lambda u: apply_mult(u, (GRID.coordinate("p") ** 2
                                                  + GRID.coordinate("q") ** 2) / 2))
    expect = (0.8 ** 2 / 2 + 1.3 ** 2 + 1.0 ** 2 / 2 + 0.7 ** 2) / 2
    assert val.real == pytest.approx(expect, rel=1e-10)
    assert abs(val.imag) <= 1e-10


def test_expectation_of_quantum_momentum_plane_wave():
    g = GridSpec((Axis("x", "x", -8, 16, 128),))
    x = g.coordinate("x")
    k = g.wavenumber("x")
    k0 = np.unique(k[k > 0])[4]
    env = np.exp(-x ** 2 / 4)
    w = normalize(Wavefunction(g, env * np.exp(1j * k0 * x)))
    got = inner_product(w, apply_lambda(w, "x"))
    assert got.real == pytest.approx(k0, abs=1e-8)


def test_gaussian_init_contract():
    assert abs(norm(W) - 1) <= 1e-12
    assert np.max(np.abs(W.values.imag)) == 0.0
    with pytest.raises(ValueError, match="3 grid spacings"):
        gaussian_init(GRID, (0, 0), (0.1, 1.0))
    with pytest.raises(ValueError, match="one center"):
        gaussian_init(GRID, (0,), (1, 1))
    lin = gaussian_init(GRID, (0, 0), (1, 1), phase="linear", phase_coeffs=(2.0, 0.0))
    assert expectation(lin, lambda u: apply_lambda(u, "q")).real \
        == pytest.approx(2.0, abs=1e-8)
    act = gaussian_init(GRID, (0.0, 1.5), (1, 1), phase="action")
    assert expectation(act, lambda u: apply_lambda(u, "q")).real \
        == pytest.approx(1.5, abs=1e-8)


def test_gaussian_marginals():
    w = gaussian_init(GRID, (0.5, -0.3), (1.0, 1.4))
    dens, kept = marginal_density(w, ("q",))
    assert kept == ("q",)
    q = GRID.axis("q").coordinates()
    expect = np.exp(-(q - 0.5) ** 2 / 1.0)
    expect /= expect.sum() * GRID.axis("q").spacing
    assert np.max(np.abs(dens - expect)) <= 1e-10
    total, kept = marginal_density(w, ())
    assert kept == ()
    assert float(total) == pytest.approx(1.0, abs=1e-12)
    with pytest.raises(ValueError, match="unknown axes"):
        marginal_density(w, ("nope",))


def test_shift_matches_closed_form():
    w = gaussian_init(GRID, (0.0, 0.0), (1.0, 1.0))
    a = 0.3137  # not a grid multiple
    got = shift(w, "q", a)
    ref = w.closed_form({"q": GRID.coordinate("q") - a, "p": GRID.coordinate("p")})
    assert np.max(np.abs(got.values - np.broadcast_to(ref, GRID.shape))) <= 1e-12
    with pytest.raises(ValueError, match="shifted axis"):
        shift(w, "q", GRID.coordinate("q"))


def test_apply_ncpoly_matches_normal_ordered_square():
    # (q lam_q)^2 = q^2 lam_q^2 - i q lam_q, checked by acting on a state
    alg = ccr.single_classical()
    a = alg.op("q") * alg.op("lam_q")
    sq = a * a
    w = gaussian_init(GRID, (0.3, -0.2), (1.0, 1.0))
    once = apply_ncpoly(w, a, params={"m": 1.0, "t": 0.0})
    twice = apply_ncpoly(once, a, params={"m": 1.0, "t": 0.0})
    via_normal = apply_ncpoly(w, sq, params={"m": 1.0, "t": 0.0})
    assert np.max(np.abs(twice.values - via_normal.values)) <= 1e-8


def test_phase_mask_and_leakage():
    assert phase_mask(W).sum() < W.values.size
    assert leakage(W) <= 1e-8
    wide = gaussian_init(GRID, (6.0, 0.0), (1.5, 1.0))
    assert leakage(wide) > 1e-8


def test_dump_roundtrip(tmp_path):
    path = tmp_path / "state.kvhw"
    dump_state(W, path)
    back = load_state(path)
    assert back.grid == W.grid
    assert np.array_equal(back.values, W.values)
    bad = tmp_path / "bad.kvhw"
    bad.write_bytes(b"NOPE" + bytes(60))
    with pytest.raises(ValueError, match="not a KVHW"):
        load_state(bad)


def test_marginal_csv(tmp_path):
    path = tmp_path / "marg.csv"
    marginal_to_csv(W, ("q",), path)
    lines = path.read_text().splitlines()
    assert lines[0] == "q,density"
    assert len(lines) == 1 + GRID.axis("q").points
