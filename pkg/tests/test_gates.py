import math

import numpy as np
import pytest

from sqewit import fock, gates, states
from sqewit.errors import ContractViolationError, ProjectionAnnihilatedError
from sqewit.states import CatSpec


class TestConditionalOutput:
    def test_vacuum_resource_bs(self):
        out = gates.conditional_output(fock.vacuum(12), "BS")
        assert fock.overlap_fidelity(out.output, fock.vacuum(12)) == pytest.approx(1.0, abs=1e-10)
        assert out.success_norm == pytest.approx(math.pi ** -0.25, abs=1e-10)

    def test_single_photon_resource_bs(self):
        # psi_1(0) = 0, so only the |0,1> branch survives the projection.
        out = gates.conditional_output(fock.basis_state(12, 1), "BS")
        assert fock.overlap_fidelity(out.output, fock.basis_state(12, 1)) == pytest.approx(
            1.0, abs=1e-10
        )

    def test_high_squeezing_qnd_limit(self):
        cat = states.squeezed_cat(CatSpec(u=3.0, r=2.0, phi=0.0, dim=50), max_loss=0.1)
        out = gates.conditional_output(cat, "QND")
        target = states.ideal_gate_target("QND", 3.0, 0.0, 50)
        assert fock.overlap_fidelity(out.output, target) > 0.99

    def test_projection_annihilation(self):
        # Mode 1 holding |1> alone is killed by <p=0| (odd Hermite zero).
        vec = np.kron(fock.basis_state(6, 1).amps, fock.vacuum(6).amps)
        with pytest.raises(ProjectionAnnihilatedError):
            gates.project_p0_mode1(vec, 6)

    def test_dim_mismatch(self):
        with pytest.raises(ContractViolationError):
            gates.couple_and_condition(fock.vacuum(8), fock.vacuum(10), "BS")

    def test_success_norm_bounded_by_bra_norm(self):
        rng = np.random.default_rng(11)
        bra_norm = np.linalg.norm(fock.momentum_eigenbra(0.0, 14))
        for _ in range(25):
            resource = fock.FockState(rng.standard_normal(14) + 1j * rng.standard_normal(14))
            out = gates.conditional_output(resource, "BS")
            assert 0.0 < out.success_norm <= bra_norm + 1e-12


class TestXRepresentationOracle:
    """Slow dual-route check: quadrature of the convolution integrals."""

    @staticmethod
    def _project_on_fock(xs, omega, dim):
        phi = fock.hermite_functions(dim - 1, xs)
        coeffs = np.trapezoid(phi * omega[None, :], xs, axis=1)
        return fock.FockState(coeffs)

    def test_conditional_outputs_match_integral_forms(self):
        dim = 24
        resource = states.squeezed_cat(CatSpec(u=2.0, r=0.5, phi=0.0, dim=dim))
        xs = np.arange(-14.0, 14.0, 0.01)
        r_wave = np.real(fock.position_wavefunction(resource, xs))

        def vac(t):
            return math.pi ** -0.25 * np.exp(-0.5 * t * t)

        vac_wave = vac(xs)

        # QND: convolution with the vacuum wave packet.
        omega_qnd = np.trapezoid(r_wave[None, :] * vac(xs[:, None] - xs[None, :]), xs, axis=1)
        got = gates.conditional_output(resource, "QND").output
        want = self._project_on_fock(xs, omega_qnd, dim)
        assert fock.overlap_fidelity(got, want) > 1.0 - 1e-6

        # BS: the sqrt(2)-contracted correlation form.
        arg_r = (xs[None, :] - xs[:, None]) / math.sqrt(2.0)
        arg_v = (xs[:, None] + xs[None, :]) / math.sqrt(2.0)
        r_interp = np.interp(arg_r, xs, r_wave, left=0.0, right=0.0)
        omega_bs = np.trapezoid(r_interp * vac(arg_v), xs, axis=1)
        got_bs = gates.conditional_output(resource, "BS").output
        want_bs = self._project_on_fock(xs, omega_bs, dim)
        assert fock.overlap_fidelity(got_bs, want_bs) > 1.0 - 1e-6


class TestInteractionFidelity:
    def test_equality_of_couplings_on_cat_family(self):
        for u in (2.0, 3.0):
            for r in (0.5, 1.0):
                for phi in (0.0, math.pi):
                    cat = states.squeezed_cat(CatSpec(u=u, r=r, phi=phi, dim=50), max_loss=0.01)
                    f_bs = gates.interaction_fidelity(cat, "BS", u, phi)
                    f_qnd = gates.interaction_fidelity(cat, "QND", u, phi)
                    assert abs(f_bs - f_qnd) <= 1e-4, (u, r, phi)

    def test_vacuum_resource_regression(self):
        f = gates.interaction_fidelity(fock.vacuum(60), "BS", 3.0, 0.0)
        assert f == pytest.approx(0.093867812213857, rel=1e-9)

    def test_monotone_resource_quality(self):
        # F_BS rises with the resource squeezing while the cat still fits;
        # the r = 2.0 grid point dips below r = 1.6 from gate truncation.
        fids = []
        for r in (0.0, 0.4, 0.8, 1.2, 1.6):
            cat = states.squeezed_cat(CatSpec(u=3.0, r=r, phi=0.0, dim=60), max_loss=0.01)
            fids.append(gates.interaction_fidelity(cat, "BS", 3.0, 0.0))
        assert all(b >= a for a, b in zip(fids, fids[1:]))
        assert fids[-1] > 0.999

    def test_gauge_independence(self):
        cat = states.squeezed_cat(CatSpec(u=2.0, r=0.5, phi=0.0, dim=40))
        rotated = fock.FockState(np.exp(1j * 1.234) * cat.amps)
        f0 = gates.interaction_fidelity(cat, "BS", 2.0, 0.0)
        f1 = gates.interaction_fidelity(rotated, "BS", 2.0, 0.0)
        assert abs(f0 - f1) < 1e-12

    def test_truncation_stability_50_vs_60(self):
        for u, r in ((3.0, 0.8), (2.0, 1.0)):
            f50 = gates.interaction_fidelity(
                states.squeezed_cat(CatSpec(u=u, r=r, phi=0.0, dim=50), max_loss=0.01), "BS", u, 0.0
            )
            f60 = gates.interaction_fidelity(
                states.squeezed_cat(CatSpec(u=u, r=r, phi=0.0, dim=60), max_loss=0.01), "BS", u, 0.0
            )
            assert abs(f50 - f60) < 1e-3

    def test_gate_report_fields(self):
        report = gates.gate_report(fock.vacuum(20), "bs", 2.0, 0.0)
        assert set(report) == {"fidelity", "success_norm", "kind", "u", "phi", "dim"}
        assert report["kind"] == "BS"
        assert report["dim"] == 20
        assert 0.0 <= report["fidelity"] <= 1.0
