"""Config-driven single runs: model -> propagator -> probe -> observable.

Everything here consumes plain validated config mappings (see config.py) so
that grid points and ensemble members can be shipped to worker processes.
"""

from __future__ import annotations

import numpy as np

from . import lattice, operators
from .config import fingerprint
from .dynamics import (Propagator, TimeGrid, long_time_limit, otoc_series,
                       spectral_decompose, time_average)
from .ensemble import draw_disorder
from .analytic import extended_chain_hamiltonian
from .lattice import DisorderConfig, HamiltonianMatrix
from .operators import OperatorMatrix, StateVector

MODELS = ("ssh", "nonhermitian_ssh", "creutz", "haldane", "qwz", "ssh2d",
          "extended_chain")


def build_hamiltonian(model: str, params: dict,
                      disorder: DisorderConfig | None = None) -> HamiltonianMatrix:
    if disorder is not None and model != "ssh":
        raise ValueError(f"disorder is only supported for model 'ssh', not {model!r}")
    if model == "ssh":
        return lattice.build_ssh(int(params["N"]), params["nu"],
                                 eta=params.get("eta", 0.0),
                                 epsilon=params.get("epsilon", 1.0),
                                 disorder=disorder)
    if model == "nonhermitian_ssh":
        return lattice.build_nonhermitian_ssh(int(params["N"]), params["nu"],
                                              params["delta"],
                                              epsilon=params.get("epsilon", 1.0))
    if model == "creutz":
        return lattice.build_creutz(int(params["N"]), params["eta0"],
                                    params["eta0p"])
    if model == "haldane":
        return lattice.build_haldane(int(params["Nx"]), int(params["Ny"]),
                                     params["eta1"], params["eta2"],
                                     params["phi"], params["mu"])
    if model == "qwz":
        return lattice.build_qwz(int(params["Nx"]), int(params["Ny"]),
                                 params["eta0"], params["mu_p"])
    if model == "ssh2d":
        return lattice.build_ssh2d(int(params["Nx"]), int(params["Ny"]),
                                   params["nu_p"], params["w"])
    if model == "extended_chain":
        return extended_chain_hamiltonian(int(params["N"]), params["nu"],
                                          epsilon=params.get("epsilon", 1.0))
    raise ValueError(f"unknown model {model!r}")


def build_initial_state(H: HamiltonianMatrix, spec: dict) -> StateVector:
    kind = spec["kind"]
    layout = H.layout
    if kind == "basis":
        cell = spec["cell"]
        if isinstance(cell, list):
            cell = tuple(cell)
        return operators.basis_state(layout, cell, spec.get("sublattice", "A"))
    if kind == "index":
        amp = np.zeros(H.dim, dtype=complex)
        amp[int(spec["index"])] = 1.0
        return StateVector(dim=H.dim, amplitudes=amp, normalized=True)
    if kind == "site":
        # 1-based site coordinates of the four-component square lattice
        idx = lattice.ssh2d_site_index(layout, int(spec["x"]), int(spec["y"]))
        amp = np.zeros(H.dim, dtype=complex)
        amp[idx] = 1.0
        return StateVector(dim=H.dim, amplitudes=amp, normalized=True)
    if kind == "staggered":
        return operators.staggered_state(layout, int(spec["M"]),
                                         flavor=spec.get("flavor", "ssh_A"))
    if kind == "eigenstate":
        state = operators.lowest_abs_eigenstate(H, spec.get("degeneracy_tol"))
        if spec.get("project_a", True):
            projected = operators.project_sublattice_a(layout, state)
            nrm = float(np.linalg.norm(projected.amplitudes))
            if nrm == 0.0:
                raise ValueError("eigenstate has no sublattice-A weight to project onto")
            state = StateVector(dim=H.dim, amplitudes=projected.amplitudes / nrm,
                                normalized=True)
        return state
    raise ValueError(f"unknown initial state kind {kind!r}")


def build_w_operator(H: HamiltonianMatrix, spec: dict) -> OperatorMatrix:
    kind = spec["kind"]
    layout = H.layout
    if kind == "site_projector":
        sites = []
        for cell, subl in spec["sites"]:
            if isinstance(cell, list):
                cell = tuple(cell)
            sites.append((cell, subl))
        return operators.site_projector(layout, sites)
    if kind == "sublattice_projector":
        return operators.sublattice_projector(layout, spec["sublattice"])
    if kind == "chiral_partial":
        return operators.chiral_partial(layout, j=int(spec.get("j", 3)))
    if kind == "index_projector":
        indices = [int(i) for i in spec["indices"]]
        if len(set(indices)) != len(indices):
            raise ValueError("duplicate indices in projector")
        diag = np.zeros(H.dim)
        diag[indices] = 1.0
        return OperatorMatrix(dim=H.dim, entries=np.diag(diag), opnorm_bound=1.0)
    if kind == "identity":
        return OperatorMatrix(dim=H.dim, entries=np.eye(H.dim), opnorm_bound=1.0)
    raise ValueError(f"unknown operator kind {kind!r}")


def _disorder_from_config(cfg: dict, seed: int | None) -> DisorderConfig | None:
    dis = cfg.get("disorder")
    if dis is None:
        return None
    if seed is None:
        seed = dis.get("seed")
    if seed is None:
        raise ValueError("disorder requires a seed (or seed0 via the ensemble runner)")
    N = int(cfg["params"]["N"])
    return draw_disorder(int(seed), N, dis["d1"], dis["d2"])


def make_propagator(cfg: dict, seed: int | None = None) -> Propagator:
    disorder = _disorder_from_config(cfg, seed)
    H = build_hamiltonian(cfg["model"], cfg["params"], disorder)
    return spectral_decompose(H)


def run_point(cfg: dict, observable: str = "full_series",
              seed: int | None = None):
    """One pipeline pass: build, decompose once, evolve, reduce.

    Returns an OtocSeries for "full_series", otherwise a float.
    """
    disorder = _disorder_from_config(cfg, seed)
    H = build_hamiltonian(cfg["model"], cfg["params"], disorder)
    prop = spectral_decompose(H)
    psi0 = build_initial_state(H, cfg["initial_state"])
    W = build_w_operator(H, cfg["w_operator"])
    tg = cfg.get("time_grid", {})
    grid = TimeGrid(t_max=tg.get("t_max", 400.0), dt=tg.get("dt", 0.2))
    series = otoc_series(prop, W, psi0, grid)
    series.metadata.update(model=cfg["model"], fingerprint=fingerprint(cfg))
    if observable == "full_series":
        return series
    if observable == "long_time_limit":
        frac = cfg.get("observable", {}).get("tail_fraction", 0.5)
        return long_time_limit(series, frac).mean
    if observable == "time_average":
        return time_average(series)
    raise ValueError(f"unknown observable {observable!r}")


def run_series_at(cfg: dict, times, seed: int | None = None):
    """Like run_point but samples O(t) at an explicit list of times."""
    disorder = _disorder_from_config(cfg, seed)
    H = build_hamiltonian(cfg["model"], cfg["params"], disorder)
    prop = spectral_decompose(H)
    psi0 = build_initial_state(H, cfg["initial_state"])
    W = build_w_operator(H, cfg["w_operator"])
    series = otoc_series(prop, W, psi0, times=times)
    series.metadata.update(model=cfg["model"], fingerprint=fingerprint(cfg))
    return series
