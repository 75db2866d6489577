import numpy as np
import pytest
import scipy.linalg

from otocsim.dynamics import (EigensolverError, OtocSeries, Propagator,
                              TimeGrid, decompose_count, evolve,
                              long_time_limit, otoc_amplitude, otoc_series,
                              otoc_trace_oracle, reset_decompose_count,
                              spectral_decompose, time_average)
from otocsim.lattice import (HamiltonianMatrix, LatticeLayout,
                             build_nonhermitian_ssh, build_ssh)
from otocsim.operators import (StateVector, as_operator, basis_state,
                               chiral_partial, lowest_abs_eigenstate,
                               project_sublattice_a, site_projector,
                               sublattice_projector)


def bare_layout(dim):
    return LatticeLayout(kind="chain1d", cells_x=dim, cells_y=1,
                         sublattices=1, sublattice_names=("s",))


def wrap(entries, hermitian=True):
    entries = np.asarray(entries)
    return HamiltonianMatrix(dim=entries.shape[0], entries=entries,
                             hermitian=hermitian, layout=bare_layout(entries.shape[0]))


def test_time_grid_default_sampling():
    ts = TimeGrid().times()
    assert ts.size == 2001
    assert ts[0] == 0.0 and ts[-1] == pytest.approx(400.0)
    assert np.allclose(np.diff(ts), 0.2)


def test_time_grid_validation():
    with pytest.raises(ValueError):
        TimeGrid(t_max=-1.0)
    with pytest.raises(ValueError):
        TimeGrid(dt=0.0)
    with pytest.raises(ValueError):
        TimeGrid(t_max=1.0, dt=2.0)


def test_hermitian_decomposition_properties():
    prop = spectral_decompose(build_ssh(30, 0.7))
    assert prop.kind == "hermitian_spectral"
    assert prop.condition_estimate == 1.0
    assert np.isrealobj(prop.eigenvalues)
    V = prop.eigenvectors
    assert np.abs(V.conj().T @ V - np.eye(60)).max() <= 1e-10


def test_diagonal_matrix_eigenvalues():
    prop = spectral_decompose(wrap(np.diag([1.0, -1.0])))
    np.testing.assert_allclose(np.sort(prop.eigenvalues), [-1.0, 1.0], atol=1e-14)


def test_general_decomposition_reconstructs():
    H = build_nonhermitian_ssh(10, 1.5, 0.4)
    prop = spectral_decompose(H)
    assert prop.kind == "general_spectral"
    rebuilt = prop.eigenvectors @ np.diag(prop.eigenvalues) @ prop.inverse_eigenvectors
    assert np.abs(rebuilt - H.entries).max() <= 1e-9 * np.abs(H.entries).max()


def test_ill_conditioned_eigenbasis_falls_back_to_stepping():
    # deep in the skin-effect regime the eigenvector matrix is numerically
    # singular; the propagator must switch to exponential stepping
    prop = spectral_decompose(build_nonhermitian_ssh(200, 0.9, 0.4))
    assert prop.kind == "scaled_expm"
    assert prop.condition_estimate > 1e8
    assert prop.hamiltonian is not None


def test_eigensolver_failure_is_reported():
    bad = HamiltonianMatrix(dim=4, entries=np.full((4, 4), np.nan),
                            hermitian=False,
                            layout=LatticeLayout(kind="chain1d", cells_x=2,
                                                 cells_y=1, sublattices=2))
    with pytest.raises(EigensolverError):
        spectral_decompose(bad)


def test_evolve_identity_at_zero_time():
    H = build_ssh(10, 0.7)
    prop = spectral_decompose(H)
    psi = basis_state(H.layout, 1, "A")
    out = evolve(prop, psi, 0.0)
    assert np.abs(out.amplitudes - psi.amplitudes).max() <= 1e-14
    assert not out.normalized


def test_hermitian_evolution_preserves_norm(rng):
    H = build_ssh(100, 0.7)
    prop = spectral_decompose(H)
    psi = basis_state(H.layout, 1, "A")
    for t in rng.uniform(0.0, 400.0, size=20):
        out = evolve(prop, psi, float(t))
        assert abs(np.linalg.norm(out.amplitudes) - 1.0) <= 1e-10


def test_forward_backward_echo():
    H = build_ssh(200, 0.5)
    prop = spectral_decompose(H)
    psi = basis_state(H.layout, 1, "A")
    mid = evolve(prop, psi, 400.0)
    back = evolve(prop, mid, -400.0)
    assert np.abs(back.amplitudes - psi.amplitudes).max() <= 1e-10

    Hn = build_nonhermitian_ssh(10, 1.5, 0.4)
    propn = spectral_decompose(Hn)
    psin = basis_state(Hn.layout, 1, "A")
    backn = evolve(propn, evolve(propn, psin, 7.3), -7.3)
    assert np.abs(backn.amplitudes - psin.amplitudes).max() <= 1e-10


def test_evolve_matches_dense_exponential():
    for H in (build_ssh(6, 0.7), build_nonhermitian_ssh(6, 1.5, 0.4)):
        prop = spectral_decompose(H)
        psi = basis_state(H.layout, 2, "B")
        t = 3.7
        want = scipy.linalg.expm(-1j * H.entries * t) @ psi.amplitudes
        got = evolve(prop, psi, t).amplitudes
        assert np.abs(got - want).max() <= 1e-10


def test_otoc_starts_at_one_for_standard_probes():
    H = build_ssh(20, 0.5)
    prop = spectral_decompose(H)
    psi = basis_state(H.layout, 1, "A")
    grid = TimeGrid(t_max=10.0, dt=0.5)
    for W in (site_projector(H.layout, [[1, "A"]]),
              sublattice_projector(H.layout, "A"),
              chiral_partial(H.layout, j=3)):
        series = otoc_series(prop, W, psi, grid=grid)
        assert abs(series.values[0] - 1.0) <= 1e-12


def test_decoupled_site_gives_flat_unit_series():
    H = build_ssh(5, 0.0)
    prop = spectral_decompose(H)
    psi = basis_state(H.layout, 1, "A")
    W = site_projector(H.layout, [[1, "A"]])
    series = otoc_series(prop, W, psi, grid=TimeGrid(t_max=40.0, dt=0.5))
    assert np.abs(series.values - 1.0).max() <= 1e-12


def test_identity_probe_gives_unit_series():
    H = build_ssh(8, 0.7)
    prop = spectral_decompose(H)
    psi = basis_state(H.layout, 3, "A")
    W = as_operator(np.eye(16), opnorm_bound=1.0)
    series = otoc_series(prop, W, psi, grid=TimeGrid(t_max=20.0, dt=1.0))
    assert np.abs(series.values - 1.0).max() <= 1e-12


def test_series_squares_its_amplitudes():
    H = build_ssh(12, 0.6)
    prop = spectral_decompose(H)
    psi = basis_state(H.layout, 1, "A")
    W = chiral_partial(H.layout)
    series = otoc_series(prop, W, psi, grid=TimeGrid(t_max=30.0, dt=0.3))
    assert np.abs(series.values - np.abs(series.amplitudes) ** 2).max() <= 1e-12


def test_series_matches_pointwise_amplitude():
    H = build_nonhermitian_ssh(8, 1.5, 0.4)
    prop = spectral_decompose(H)
    psi = basis_state(H.layout, 1, "A")
    W = site_projector(H.layout, [[1, "A"]])
    ts = np.array([0.0, 1.3, 4.1, 9.7])
    series = otoc_series(prop, W, psi, times=ts)
    for i, t in enumerate(ts):
        s = otoc_amplitude(prop, W, psi, float(t))
        assert abs(series.amplitudes[i] - s) <= 1e-12


def test_series_respects_operator_norm_bound():
    H = build_ssh(20, 0.5)
    prop = spectral_decompose(H)
    psi = basis_state(H.layout, 1, "A")
    for W in (chiral_partial(H.layout), sublattice_projector(H.layout, "B")):
        series = otoc_series(prop, W, psi, grid=TimeGrid(t_max=60.0, dt=0.2))
        assert series.values.max() <= W.opnorm_bound ** 2 + 1e-9


def test_trace_oracle_agrees_with_amplitude_form(rng):
    # the |s|^2 evaluation must agree with the independent trace formula
    # tr[rho W(t)^dag rho W(t)] on pure states
    for _ in range(100):
        d = int(rng.integers(2, 17))
        A = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
        H = wrap(A + A.conj().T)
        Wm = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
        psi = rng.normal(size=d) + 1j * rng.normal(size=d)
        psi = psi / np.linalg.norm(psi)
        state = StateVector(dim=d, amplitudes=psi)
        t = float(rng.uniform(0.0, 20.0))
        prop = spectral_decompose(H)
        val = abs(otoc_amplitude(prop, as_operator(Wm), state, t)) ** 2
        rho = np.outer(psi, psi.conj())
        ref = otoc_trace_oracle(H, Wm, rho, t)
        assert abs(val - ref) <= 1e-12 * max(1.0, abs(ref))


def test_trace_oracle_dimension_cap():
    H = wrap(np.zeros((65, 65)))
    with pytest.raises(ValueError):
        otoc_trace_oracle(H, np.eye(65), np.eye(65) / 65.0, 1.0)


def test_trace_oracle_flags_nonphysical_input():
    H = wrap(np.diag([1.0, -1.0]))
    W = np.array([[0.0, 1.0], [1.0, 0.0]])
    rho = np.array([[0.0, 1.0], [0.0, 0.0]])
    with pytest.raises(FloatingPointError):
        otoc_trace_oracle(H, W, rho, 0.3)


def test_projected_eigenstate_desk_check():
    # half-weight projected eigenstate on a short trivial-phase chain: the
    # oracle series peaks at 1/4 and time-averages to 3/32
    H = build_ssh(16, 2.0)
    psi = lowest_abs_eigenstate(H)
    psi_a = project_sublattice_a(H.layout, psi).amplitudes
    assert abs(np.linalg.norm(psi_a) ** 2 - 0.5) <= 1e-6
    rho = np.outer(psi_a, psi_a.conj())
    W = sublattice_projector(H.layout, "A").entries
    ts = np.arange(0.0, 100.5, 0.5)
    vals = np.array([otoc_trace_oracle(H, W, rho, t) for t in ts])
    assert abs(vals.max() - 0.25) <= 1e-3
    assert abs(vals.mean() - 3.0 / 32.0) <= 2e-3


def test_tail_is_stable_under_grid_refinement():
    H = build_ssh(100, 0.5)
    prop = spectral_decompose(H)
    psi = basis_state(H.layout, 1, "A")
    W = site_projector(H.layout, [[1, "A"]])
    tails = []
    for dt in (0.2, 0.1):
        series = otoc_series(prop, W, psi, grid=TimeGrid(t_max=200.0, dt=dt))
        tails.append(long_time_limit(series).mean)
    assert abs(tails[0] - tails[1]) < 1e-3


def test_stepping_propagator_matches_spectral():
    H = build_ssh(10, 0.7)
    spectral = spectral_decompose(H)
    stepping = Propagator(kind="scaled_expm", dim=H.dim,
                          energy_unit=H.energy_unit, hamiltonian=H.entries)
    psi = basis_state(H.layout, 1, "A")
    W = site_projector(H.layout, [[1, "A"]])
    grid = TimeGrid(t_max=20.0, dt=0.5)
    a = otoc_series(spectral, W, psi, grid=grid)
    b = otoc_series(stepping, W, psi, grid=grid)
    assert np.abs(a.values - b.values).max() <= 1e-10


def test_stepping_needs_uniform_grid():
    H = build_ssh(4, 0.7)
    stepping = Propagator(kind="scaled_expm", dim=H.dim,
                          energy_unit=H.energy_unit, hamiltonian=H.entries)
    psi = basis_state(H.layout, 1, "A")
    W = site_projector(H.layout, [[1, "A"]])
    with pytest.raises(ValueError):
        otoc_series(stepping, W, psi, times=np.array([0.0, 1.0, 3.0]))


def test_decompose_counter_tracks_calls():
    reset_decompose_count()
    H = build_ssh(4, 0.7)
    spectral_decompose(H)
    spectral_decompose(H)
    assert decompose_count() == 2
    reset_decompose_count()
    assert decompose_count() == 0


def test_tail_statistics_window():
    series = OtocSeries(times=np.arange(10.0), values=np.arange(10.0))
    stats = long_time_limit(series, tail_fraction=0.5)
    assert stats.mean == pytest.approx(7.0)
    assert stats.std == pytest.approx(np.sqrt(2.0))
    whole = long_time_limit(series, tail_fraction=1.0)
    assert whole.mean == pytest.approx(4.5)
    last = long_time_limit(series, tail_fraction=1e-9)
    assert last.mean == pytest.approx(9.0) and last.std == 0.0
    with pytest.raises(ValueError):
        long_time_limit(series, tail_fraction=0.0)
    with pytest.raises(ValueError):
        long_time_limit(series, tail_fraction=1.5)
    assert time_average(series) == pytest.approx(4.5)


def test_series_shape_validation():
    with pytest.raises(ValueError):
        OtocSeries(times=np.arange(3.0), values=np.arange(4.0))
