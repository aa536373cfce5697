"""Winding numbers, gap invariants, and the (tx, ty) phase diagram."""

import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .errors import InsufficientResolutionError
from .model import Frame, ModelParams, axis_field, brillouin_grid, quasienergy

DEFAULT_RESOLUTION = 2048
MIN_RESOLUTION = 256
RESOLUTION_CAP = 2**20

# A phase-diagram cell is a boundary cell when either gap drops below this.
BOUNDARY_TOL = 1e-3

# Secondary-oracle agreement tolerance (trapezoid integral, before rounding).
INTEGRAL_TOL = 1e-3


def _planar_angle(k, params, frame):
    _, n = axis_field(k, params, frame)
    return np.arctan2(n[..., 1], n[..., 0])


def winding_number(
    params: ModelParams,
    frame: Frame,
    resolution: int = DEFAULT_RESOLUTION,
) -> int:
    """Winding of the planar Bloch axis over one Brillouin zone.

    Accumulates wrapped atan2 increments around the closed loop, doubling
    the grid until every step satisfies |dphi| < pi/2 (integer-valued by
    construction).  Raises GaplessPointError on a gapless grid point and
    InsufficientResolutionError if the step bound fails at the cap.
    """
    if resolution < MIN_RESOLUTION:
        raise ValueError(f"resolution must be >= {MIN_RESOLUTION}")
    res = int(resolution)
    while True:
        phi = _planar_angle(brillouin_grid(res), params, frame)
        dphi = np.diff(np.concatenate([phi, phi[:1]]))
        dphi = (dphi + np.pi) % (2.0 * np.pi) - np.pi
        if np.max(np.abs(dphi)) < np.pi / 2.0:
            break
        if res >= RESOLUTION_CAP:
            raise InsufficientResolutionError(
                "insufficient resolution: per-step angle bound unmet at cap"
            )
        res = min(2 * res, RESOLUTION_CAP)
    total = dphi.sum() / (2.0 * np.pi)
    return int(np.rint(total))


def winding_integral(
    params: ModelParams,
    frame: Frame,
    resolution: int = DEFAULT_RESOLUTION,
) -> float:
    """Secondary oracle: trapezoid rule for (1/2pi) \\int (nx dny - ny dnx).

    Returns the raw (unrounded) integral; derivative by centered differences
    on the periodic grid.
    """
    ks = brillouin_grid(resolution)
    _, n = axis_field(ks, params, frame)
    nx, ny = n[:, 0], n[:, 1]
    h = 2.0 * np.pi / resolution
    dnx = (np.roll(nx, -1) - np.roll(nx, 1)) / (2.0 * h)
    dny = (np.roll(ny, -1) - np.roll(ny, 1)) / (2.0 * h)
    return float(np.sum(nx * dny - ny * dnx) * h / (2.0 * np.pi))


@dataclass(frozen=True)
class InvariantPair:
    """Topological invariants of the 0- and pi-quasienergy gaps."""

    nu0: int
    nu_pi: int


def gap_invariants(
    params: ModelParams, resolution: int = DEFAULT_RESOLUTION
) -> InvariantPair:
    """nu0 = (nu1 + nu2)/2 and nu_pi = (nu1 - nu2)/2 from the two frames."""
    nu1 = winding_number(params, Frame.SYM1, resolution)
    nu2 = winding_number(params, Frame.SYM2, resolution)
    if (nu1 + nu2) % 2:
        raise RuntimeError(
            f"parity violation: frame windings {nu1}, {nu2} differ in parity"
        )
    return InvariantPair(nu0=(nu1 + nu2) // 2, nu_pi=(nu1 - nu2) // 2)


def min_gap(
    params: ModelParams, which, resolution: int = DEFAULT_RESOLUTION
) -> float:
    """Minimum distance of E(k) to the gap center (0 or pi).

    Scans the momentum grid and then refines every local minimum by
    golden-section search; a pure grid minimum can overshoot the true gap
    by orders of magnitude when a closing sits between grid points, which
    would let effectively gapless parameters through boundary detection.
    """
    ks = brillouin_grid(resolution)
    energies = quasienergy(ks, params)
    if which == 0:
        f = lambda k: quasienergy(k, params)
        values = energies
    elif which in ("pi", np.pi):
        f = lambda k: np.pi - quasienergy(k, params)
        values = np.pi - energies
    else:
        raise ValueError("which must be 0 or 'pi'")
    local = (values <= np.roll(values, 1)) & (values <= np.roll(values, -1))
    idx = np.where(local)[0]
    if idx.size == 0:
        return float(values.min())
    h = 2.0 * np.pi / resolution
    lo, hi = ks[idx] - h, ks[idx] + h
    invphi = (np.sqrt(5.0) - 1.0) / 2.0
    a, b = lo, hi
    c = b - invphi * (b - a)
    d = a + invphi * (b - a)
    fc, fd = f(c), f(d)
    for _ in range(50):
        take_left = fc < fd
        b = np.where(take_left, d, b)
        a = np.where(take_left, a, c)
        d = np.where(take_left, c, d)
        c = np.where(take_left, b - invphi * (b - a), d)
        fd = np.where(take_left, fc, fd)
        fc = np.where(take_left, f(c), fc)
        # symmetric update for the right branch
        c2 = np.where(take_left, c, c)
        d2 = a + invphi * (b - a)
        fd = np.where(take_left, fd, f(d2))
        d = np.where(take_left, d, d2)
    refined = np.minimum(fc, fd)
    return float(min(values.min(), refined.min()))


@dataclass(frozen=True)
class PhaseDiagramCell:
    tx: float
    ty: float
    boundary: bool
    min_gap0: float
    min_gap_pi: float
    invariants: InvariantPair | None  # None for boundary cells


@dataclass(frozen=True)
class PhaseDiagram:
    tx_range: tuple
    ty_range: tuple
    cells_per_axis: tuple
    resolution: int
    boundary_tol: float
    cells: list = field(default_factory=list)  # row-major, ty fastest

    def cell_at(self, tx: float, ty: float) -> PhaseDiagramCell:
        """Cell whose center is nearest to (tx, ty)."""
        return min(
            self.cells, key=lambda c: (c.tx - tx) ** 2 + (c.ty - ty) ** 2
        )


def _cell_centers(lo: float, hi: float, count: int) -> np.ndarray:
    if count < 1:
        raise ValueError("cell count must be positive")
    if hi == lo:
        return np.full(count, lo)
    step = (hi - lo) / count
    return lo + step * (np.arange(count) + 0.5)


def _evaluate_cell(args) -> PhaseDiagramCell:
    tx, ty, resolution, boundary_tol = args
    params = ModelParams(tx, ty)
    g0 = min_gap(params, 0, resolution)
    gpi = min_gap(params, "pi", resolution)
    if g0 < boundary_tol or gpi < boundary_tol:
        return PhaseDiagramCell(tx, ty, True, g0, gpi, None)
    inv = gap_invariants(params, resolution)
    return PhaseDiagramCell(tx, ty, False, g0, gpi, inv)


def default_workers() -> int:
    env = os.environ.get("FLOQLAB_WORKERS")
    if env:
        return max(1, int(env))
    return 1


def phase_diagram(
    tx_range=(0.0, 3.0 * np.pi),
    ty_range=(0.0, 3.0 * np.pi),
    cells: int | tuple = 60,
    resolution: int = DEFAULT_RESOLUTION,
    boundary_tol: float = BOUNDARY_TOL,
    workers: int | None = None,
) -> PhaseDiagram:
    """Invariants over a (tx, ty) grid of cell centers.

    Cells are independent; with workers > 1 they are evaluated in a process
    pool in fixed chunks, and results are reassembled in grid order, so the
    output is identical for any worker count.
    """
    nx, ny = (cells, cells) if np.isscalar(cells) else cells
    txs = _cell_centers(tx_range[0], tx_range[1], nx)
    tys = _cell_centers(ty_range[0], ty_range[1], ny)
    tasks = [
        (float(tx), float(ty), resolution, boundary_tol)
        for tx in txs
        for ty in tys
    ]
    workers = default_workers() if workers is None else max(1, workers)
    if workers == 1:
        results = [_evaluate_cell(t) for t in tasks]
    else:
        chunk = max(1, len(tasks) // (workers * 8))
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_evaluate_cell, tasks, chunksize=chunk))
    return PhaseDiagram(
        tx_range=(float(tx_range[0]), float(tx_range[1])),
        ty_range=(float(ty_range[0]), float(ty_range[1])),
        cells_per_axis=(nx, ny),
        resolution=resolution,
        boundary_tol=boundary_tol,
        cells=results,
    )
