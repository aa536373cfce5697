import numpy as np
import pytest

from conftest import CASE1, CASE2, random_nonboundary_params
from floqlab.errors import GaplessPointError
from floqlab.model import Frame, ModelParams, brillouin_grid, quasienergy
from floqlab.topology import (
    InvariantPair,
    gap_invariants,
    min_gap,
    phase_diagram,
    winding_number,
    winding_integral,
)


class TestWindingNumber:
    def test_case1_both_frames(self):
        assert winding_number(CASE1, Frame.SYM1) == 1
        assert winding_number(CASE1, Frame.SYM2) == 1

    def test_case2_frames(self):
        assert winding_number(CASE2, Frame.SYM1) == 1
        assert winding_number(CASE2, Frame.SYM2) == 5

    def test_weak_drive_region(self):
        # the weak-drive region is connected to the (pi/2, pi/2) phase
        # (no gap closing in between), so it carries the same windings;
        # the trapezoid-integral oracle below pins the same value
        params = ModelParams(0.1, 0.1)
        for frame in (Frame.SYM1, Frame.SYM2):
            w = winding_number(params, frame)
            assert w == 1
            assert winding_integral(params, frame) == pytest.approx(w, abs=1e-3)

    def test_matches_integral_oracle(self, rng, sym_frame):
        # centered differences converge as h^2; 8192 points keep the raw
        # integral well inside the 1e-3 agreement band even at winding 5
        for params in random_nonboundary_params(rng, 8):
            w = winding_number(params, sym_frame)
            integral = winding_integral(params, sym_frame, resolution=8192)
            assert integral == pytest.approx(w, abs=1e-3)

    def test_integer_quantization(self, rng):
        # raw accumulated winding deviates from an integer by < 1e-6
        from floqlab.model import axis_field

        for params in random_nonboundary_params(rng, 25):
            for frame in (Frame.SYM1, Frame.SYM2):
                _, n = axis_field(brillouin_grid(4096), params, frame)
                phi = np.arctan2(n[:, 1], n[:, 0])
                dphi = np.diff(np.concatenate([phi, phi[:1]]))
                dphi = (dphi + np.pi) % (2 * np.pi) - np.pi
                total = dphi.sum() / (2 * np.pi)
                assert abs(total - round(total)) < 1e-6

    def test_resolution_stability(self, rng, sym_frame):
        for params in random_nonboundary_params(rng, 6):
            w1 = winding_number(params, sym_frame, 512)
            w2 = winding_number(params, sym_frame, 1024)
            w4 = winding_number(params, sym_frame, 4096)
            assert w1 == w2 == w4

    def test_gapless_grid_point_rejected(self):
        with pytest.raises(GaplessPointError):
            winding_number(ModelParams(np.pi, 0.5 * np.pi), Frame.SYM1)

    def test_resolution_floor(self):
        with pytest.raises(ValueError):
            winding_number(CASE1, Frame.SYM1, resolution=64)


class TestGapInvariants:
    def test_case1(self):
        assert gap_invariants(CASE1) == InvariantPair(1, 0)

    def test_case2(self):
        assert gap_invariants(CASE2) == InvariantPair(3, -2)

    def test_identity_drive_is_gapless(self):
        # tx = ty = 0 gives the identity operator: E == 0 everywhere, the
        # invariants are undefined (phase-boundary corner), so this errors
        with pytest.raises(GaplessPointError):
            gap_invariants(ModelParams(0.0, 0.0))

    def test_frame_windings_share_parity(self, rng):
        for params in random_nonboundary_params(rng, 10):
            nu1 = winding_number(params, Frame.SYM1)
            nu2 = winding_number(params, Frame.SYM2)
            assert (nu1 + nu2) % 2 == 0


class TestMinGap:
    def test_pi_gap_closes_on_tx_pi_line(self):
        assert min_gap(ModelParams(np.pi, 0.5 * np.pi), "pi") == pytest.approx(0.0, abs=1e-12)

    def test_zero_gap_closed_at_origin(self):
        assert min_gap(ModelParams(0.0, 0.0), 0) == pytest.approx(0.0, abs=1e-15)

    def test_case1_both_gaps_open(self):
        assert min_gap(CASE1, 0) > 0.5
        assert min_gap(CASE1, "pi") > 0.5

    def test_matches_direct_scan(self):
        ks = brillouin_grid(2048)
        energies = quasienergy(ks, CASE2)
        assert min_gap(CASE2, 0) == pytest.approx(float(energies.min()))
        assert min_gap(CASE2, "pi") == pytest.approx(float(np.pi - energies.max()))


class TestPhaseDiagram:
    def test_single_cell_case1(self):
        pd = phase_diagram((CASE1.tx, CASE1.tx), (CASE1.ty, CASE1.ty), cells=1,
                           resolution=512)
        cell = pd.cells[0]
        assert not cell.boundary
        assert cell.invariants == InvariantPair(1, 0)

    def test_single_cell_case2(self):
        pd = phase_diagram((CASE2.tx, CASE2.tx), (CASE2.ty, CASE2.ty), cells=1,
                           resolution=512)
        assert pd.cells[0].invariants == InvariantPair(3, -2)

    def test_cell_on_pi_gap_line_is_boundary(self):
        pd = phase_diagram((np.pi, np.pi), (0.3, 0.3), cells=1, resolution=512)
        cell = pd.cells[0]
        assert cell.boundary
        assert cell.invariants is None
        assert cell.min_gap_pi < cell.min_gap0

    def test_grid_covers_both_paper_cells(self):
        pd = phase_diagram((0.2, 3 * np.pi - 0.2), (0.2, 3 * np.pi - 0.2),
                           cells=10, resolution=512)
        c1 = pd.cell_at(CASE1.tx, CASE1.ty)
        c2 = pd.cell_at(CASE2.tx, CASE2.ty)
        assert c1.invariants == InvariantPair(1, 0)
        assert c2.invariants == InvariantPair(3, -2)

    def test_parallel_matches_serial(self):
        kwargs = dict(
            tx_range=(0.3, 2.8), ty_range=(0.3, 2.8), cells=4, resolution=512
        )
        serial = phase_diagram(workers=1, **kwargs)
        parallel = phase_diagram(workers=2, **kwargs)
        assert serial == parallel

    def test_invariant_changes_cross_gap_closings(self):
        # crossing tx = pi at small ty flips nu_pi and leaves nu0 alone;
        # the pi gap (not the zero gap) must close in between
        left = gap_invariants(ModelParams(0.8 * np.pi, 0.3), 512)
        right = gap_invariants(ModelParams(1.2 * np.pi, 0.3), 512)
        assert left.nu0 == right.nu0
        assert left.nu_pi != right.nu_pi
        gaps_pi = [
            min_gap(ModelParams(tx, 0.3), "pi", 512)
            for tx in np.linspace(0.8 * np.pi, 1.2 * np.pi, 33)
        ]
        gaps_0 = [
            min_gap(ModelParams(tx, 0.3), 0, 512)
            for tx in np.linspace(0.8 * np.pi, 1.2 * np.pi, 33)
        ]
        assert min(gaps_pi) < 0.05
        assert min(gaps_0) > 0.2
