"""Probe operators and initial states for the OTOC pipeline."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .lattice import (SIGMA_2, SIGMA_3, HamiltonianMatrix, LatticeError,
                      LatticeLayout, chiral_matrix)

_NORM_TOL = 1e-12


@dataclass
class OperatorMatrix:
    """Dense probe operator. opnorm_bound is any upper bound on the spectral
    norm; it caps the admissible OTOC values."""

    dim: int
    entries: np.ndarray
    opnorm_bound: float

    def __post_init__(self):
        self.entries = np.asarray(self.entries)
        if self.entries.shape != (self.dim, self.dim):
            raise ValueError(f"entries must be {self.dim}x{self.dim}")
        if self.opnorm_bound < 0:
            raise ValueError("opnorm_bound must be nonnegative")

    @property
    def is_diagonal(self) -> bool:
        off = self.entries - np.diag(np.diagonal(self.entries))
        return not np.any(off)


@dataclass
class StateVector:
    dim: int
    amplitudes: np.ndarray
    normalized: bool = True

    def __post_init__(self):
        self.amplitudes = np.asarray(self.amplitudes, dtype=complex)
        if self.amplitudes.shape != (self.dim,):
            raise ValueError(f"amplitudes must have length {self.dim}")
        if self.normalized:
            nrm2 = float(np.vdot(self.amplitudes, self.amplitudes).real)
            if abs(nrm2 - 1.0) > _NORM_TOL:
                raise ValueError(f"normalized flag set but ||psi||^2 = {nrm2!r}")


def as_operator(entries: np.ndarray, opnorm_bound: float | None = None) -> OperatorMatrix:
    entries = np.asarray(entries)
    if opnorm_bound is None:
        nrm = float(np.linalg.norm(entries, 2))
        opnorm_bound = nrm * (1.0 + 1e-12) + 1e-15
    return OperatorMatrix(dim=entries.shape[0], entries=entries, opnorm_bound=opnorm_bound)


def site_projector(layout: LatticeLayout, sites) -> OperatorMatrix:
    """Projector onto the listed (cell, sublattice) sites. Duplicate or
    out-of-range sites are rejected."""
    indices = []
    for cell, subl in sites:
        indices.append(layout.index_of(cell, subl))
    if len(set(indices)) != len(indices):
        raise ValueError("duplicate sites in projector")
    if not indices:
        raise ValueError("projector needs at least one site")
    diag = np.zeros(layout.dim)
    diag[indices] = 1.0
    return OperatorMatrix(dim=layout.dim, entries=np.diag(diag), opnorm_bound=1.0)


def sublattice_projector(layout: LatticeLayout, sublattice) -> OperatorMatrix:
    """Projector onto every site of one sublattice, all cells."""
    s = layout.sublattice_index(sublattice)
    diag = np.zeros(layout.dim)
    diag[s::layout.sublattices] = 1.0
    return OperatorMatrix(dim=layout.dim, entries=np.diag(diag), opnorm_bound=1.0)


def chiral_partial(layout: LatticeLayout, j: int = 3) -> OperatorMatrix:
    """Sublattice-symmetry block operator summed over all cells but the last:
    sigma_j on cells 1..N-1, a zero block on cell N. j is 3 for the dimerized
    chain and 2 for the ladder."""
    if layout.kind != "chain1d" or layout.sublattices != 2:
        raise LatticeError("chiral_partial applies to two-sublattice chains")
    if j not in (2, 3):
        raise ValueError("j must be 2 or 3")
    N = layout.cells_x
    if j == 3:
        diag = np.zeros(2 * N)
        diag[0:2 * (N - 1):2] = 1.0
        diag[1:2 * (N - 1):2] = -1.0
        entries = np.diag(diag)
    else:
        entries = np.zeros((2 * N, 2 * N), dtype=complex)
        for n in range(N - 1):
            entries[2 * n:2 * n + 2, 2 * n:2 * n + 2] = SIGMA_2
    return OperatorMatrix(dim=2 * N, entries=entries, opnorm_bound=1.0)


def chiral_operator(model: str, N: int) -> OperatorMatrix:
    """Full sublattice-symmetry operator C with C^2 = I (Hermitian, unitary):
    diag(+1,-1) per cell for the dimerized chain, sigma_2 per cell for the
    ladder."""
    return OperatorMatrix(dim=2 * N, entries=chiral_matrix(model, N),
                          opnorm_bound=1.0)


def basis_state(layout: LatticeLayout, cell, sublattice) -> StateVector:
    amp = np.zeros(layout.dim, dtype=complex)
    amp[layout.index_of(cell, sublattice)] = 1.0
    return StateVector(dim=layout.dim, amplitudes=amp, normalized=True)


def staggered_state(layout: LatticeLayout, M: int, flavor: str = "ssh_A") -> StateVector:
    """Sign-alternating superposition over the first M cells.

    ssh_A: sum_m (-1)^(m-1) |m,A> / sqrt(M)
    creutz_AB: sum_m (-1)^(m-1) (|m,A> + i|m,B>) / sqrt(2M)
    """
    if layout.kind != "chain1d" or layout.sublattices != 2:
        raise LatticeError("staggered states are defined on two-sublattice chains")
    if not 1 <= M <= layout.cells_x:
        raise ValueError(f"M must lie in 1..{layout.cells_x}")
    amp = np.zeros(layout.dim, dtype=complex)
    if flavor == "ssh_A":
        for m in range(M):
            amp[2 * m] = (-1.0) ** m / np.sqrt(M)
    elif flavor == "creutz_AB":
        for m in range(M):
            sign = (-1.0) ** m
            amp[2 * m] = sign / np.sqrt(2 * M)
            amp[2 * m + 1] = 1j * sign / np.sqrt(2 * M)
    else:
        raise ValueError(f"unknown staggered flavor {flavor!r}")
    return StateVector(dim=layout.dim, amplitudes=amp, normalized=True)


def _sublattice_a_mask(layout: LatticeLayout) -> np.ndarray:
    mask = np.zeros(layout.dim)
    mask[0::layout.sublattices] = 1.0
    return mask


def lowest_abs_eigenstate(H: HamiltonianMatrix,
                          degeneracy_tol: float | None = None) -> StateVector:
    """Eigenstate of smallest |energy|.

    When the two smallest-|energy| levels are within degeneracy_tol of each
    other (default 1e-8 * energy_unit), the returned state is the combination
    inside that two-dimensional eigenspace with maximal weight on sublattice A.
    Ties among distinct levels of equal |energy| resolve to the lower signed
    energy.
    """
    if not H.hermitian:
        raise ValueError("lowest_abs_eigenstate needs a Hermitian Hamiltonian")
    if degeneracy_tol is None:
        degeneracy_tol = 1e-8 * H.energy_unit
    lam, V = np.linalg.eigh(H.entries)
    order = np.lexsort((lam, np.abs(lam)))
    i0, i1 = order[0], order[1]
    if abs(lam[i0] - lam[i1]) <= degeneracy_tol:
        vs = V[:, [i0, i1]]
        mask = _sublattice_a_mask(H.layout)
        G = vs.conj().T @ (mask[:, None] * vs)
        gval, gvec = np.linalg.eigh(G)
        psi = vs @ gvec[:, -1]
    else:
        psi = V[:, i0]
    psi = psi / np.linalg.norm(psi)
    return StateVector(dim=H.dim, amplitudes=psi.astype(complex), normalized=True)


def project_sublattice_a(layout: LatticeLayout, state: StateVector) -> StateVector:
    """Zero out every amplitude off sublattice A. The result is not
    renormalized; its norm measures the A-sublattice weight."""
    amp = state.amplitudes * _sublattice_a_mask(layout)
    return StateVector(dim=state.dim, amplitudes=amp, normalized=False)
