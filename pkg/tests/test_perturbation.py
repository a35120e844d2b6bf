import numpy as np
import pytest

from susyep.perturbation import (
    ChannelZeroError,
    PerturbationPlan,
    build_perturbed,
    classify_puiseux_order,
    leading_coefficient_oracle,
    puiseux_fit,
    splitting_sweep,
    symmetry_audit,
)
from susyep.synthesis import ChainSpec, build_chain

EPS_GRID = tuple(np.logspace(-12, -4, 17))


def plan(kind, bond=None, grid=EPS_GRID):
    return PerturbationPlan(kind=kind, epsilon_grid=grid, bond_index=bond)


def test_plan_validation():
    with pytest.raises(ValueError):
        PerturbationPlan("bogus", EPS_GRID)
    with pytest.raises(ValueError):
        PerturbationPlan("all_bonds", (1e-3, 1e-4))  # not ascending
    with pytest.raises(ValueError):
        PerturbationPlan("all_bonds", (-1e-6, 1e-3))
    with pytest.raises(ValueError):
        PerturbationPlan("all_bonds", (1e-4, 1e-3))  # < 3 decades
    with pytest.raises(ValueError):
        PerturbationPlan("single_bond", EPS_GRID)  # missing bond


def test_build_perturbed_single_bond_entries():
    spec = ChainSpec(3, 1.0, gamma=1.0)
    H = build_perturbed(spec, "single_bond", 1, 1e-3)
    s2 = np.sqrt(2.0)
    assert H[0, 1] == pytest.approx(s2 + 1e-3)
    assert H[1, 0] == pytest.approx(s2 + 1e-3)
    assert H[1, 2] == pytest.approx(s2)
    assert np.allclose(np.diag(H), np.diag(build_chain(spec)))

    H5 = build_perturbed(ChainSpec(5, 1.0, gamma=1.0), "single_bond", 1, 1e-3)
    assert H5[0, 1] == pytest.approx(2.0 + 1e-3)


def test_build_perturbed_all_bonds_and_zero():
    spec = ChainSpec(4, 1.0, gamma=1.0)
    H = build_perturbed(spec, "all_bonds", None, 2e-3)
    base = build_chain(spec)
    off = H - base
    for m in range(3):
        assert off[m, m + 1] == pytest.approx(2e-3)
    assert np.allclose(np.diag(off), 0)
    assert np.array_equal(build_perturbed(spec, "all_bonds", None, 0.0), base)


def test_build_perturbed_bond_range():
    spec = ChainSpec(4, 1.0, gamma=1.0)
    with pytest.raises(ValueError):
        build_perturbed(spec, "single_bond", 0, 1e-3)
    with pytest.raises(ValueError):
        build_perturbed(spec, "single_bond", 4, 1e-3)


@pytest.mark.parametrize("N,pair", [(3, (0, 1)), (4, (0, 3)), (5, (0, 4))])
def test_single_bond_puiseux_slopes(N, pair):
    spec = ChainSpec(N, 1.0, gamma=1.0)
    records = splitting_sweep(spec, plan("single_bond", 1), pair)
    for channel in ("real", "imag"):
        fit = puiseux_fit(records, channel)
        assert fit.slope == pytest.approx(1.0 / N, abs=0.01)
        assert fit.r_squared >= 0.999
        assert classify_puiseux_order(fit, N) == "1/N"


def test_all_bonds_n6_both_pairs_both_channels():
    spec = ChainSpec(6, 1.0, gamma=1.0)
    for pair in ((0, 5), (0, 2)):
        records = splitting_sweep(spec, plan("all_bonds"), pair)
        for channel in ("real", "imag"):
            fit = puiseux_fit(records, channel)
            assert fit.slope == pytest.approx(1.0 / 6.0, abs=0.02)
            assert fit.r_squared >= 0.999


def test_all_bonds_dimer_square_root_and_zero_channel():
    # uniform perturbation of the dimer is J -> J + eps: splitting
    # 2*sqrt((J+eps)^2 - J^2) is purely real, ~ eps^(1/2)
    spec = ChainSpec(2, 1.0, gamma=1.0)
    records = splitting_sweep(spec, plan("all_bonds"), (0, 1))
    fit = puiseux_fit(records, "real")
    assert fit.slope == pytest.approx(0.5, abs=0.01)
    with pytest.raises(ChannelZeroError):
        puiseux_fit(records, "imag")


def test_all_bonds_trimer_stays_in_family():
    # both couplings of the N=3 chain equal sqrt(2) J, so the all-bond
    # perturbation is a pure rescaling J -> J + eps/sqrt(2): the
    # response is eps^(1/2), not eps^(1/3)
    spec = ChainSpec(3, 1.0, gamma=1.0)
    records = splitting_sweep(spec, plan("all_bonds"), (0, 2))
    fit = puiseux_fit(records, "real")
    assert fit.slope == pytest.approx(0.5, abs=0.01)
    # extremal branches sit at +-2*sqrt(J'^2 - J^2) ~ +-2*(2)^(1/4)*sqrt(eps)
    oracle = 4.0 * 2.0 ** 0.25
    assert 10.0 ** fit.intercept == pytest.approx(oracle, rel=0.05)


def test_all_bonds_pentamer_protected_zero_mode():
    # odd N keeps the exact zero eigenvalue under the chiral-symmetric
    # all-bond perturbation; the remaining four branches split like
    # eps^(1/4)
    spec = ChainSpec(5, 1.0, gamma=1.0)
    records = splitting_sweep(spec, plan("all_bonds"), (0, 4))
    for channel in ("real", "imag"):
        fit = puiseux_fit(records, channel)
        assert fit.slope == pytest.approx(0.25, abs=0.01)


@pytest.mark.parametrize("N", [3, 4])
def test_hermitian_limit_linear_response(N):
    # at gamma=0 the single-bond response of the extremal splitting is
    # linear in eps (diabolic-point contrast)
    spec = ChainSpec(N, 1.0, gamma=0.0)
    grid = tuple(np.logspace(-8, -3, 11))
    records = splitting_sweep(spec, plan("single_bond", 1, grid), (0, N - 1))
    baseline = 2.0 * (N - 1)  # extremal splitting of the unperturbed chain
    eps = np.array([r.epsilon for r in records])
    resp = np.array([abs(r.split_real - baseline) for r in records])
    slope, _ = np.polyfit(np.log10(eps), np.log10(resp), 1)
    assert slope == pytest.approx(1.0, abs=0.02)


def test_symmetry_audit():
    assert symmetry_audit(
        build_perturbed(ChainSpec(6, 1.0, gamma=1.0), "all_bonds", None, 1e-3))
    # measured outcome: the symmetric single-bond perturbation of H3
    # keeps the spectrum chiral-symmetric
    assert symmetry_audit(
        build_perturbed(ChainSpec(3, 1.0, gamma=1.0), "single_bond", 1, 1e-4))
    # diagonal detuning breaks it
    H = build_chain(ChainSpec(4, 1.0, gamma=1.0))
    H[0, 0] += 0.05
    assert not symmetry_audit(H)


def test_symmetry_audit_with_offset():
    H = build_perturbed(ChainSpec(4, 1.0, gamma=1.0, omega0=1.3),
                        "all_bonds", None, 1e-3)
    assert symmetry_audit(H, omega0=1.3)
    assert not symmetry_audit(H, omega0=0.0)


def test_leading_coefficient_stability_and_oracle():
    spec = ChainSpec(4, 1.0, gamma=1.0)
    lo = tuple(np.logspace(-12, -9, 9))
    hi = tuple(np.logspace(-8, -5, 9))
    c_lo = 10.0 ** puiseux_fit(
        splitting_sweep(spec, plan("single_bond", 1, lo), (0, 3)), "real").intercept
    c_hi = 10.0 ** puiseux_fit(
        splitting_sweep(spec, plan("single_bond", 1, hi), (0, 3)), "real").intercept
    assert abs(c_lo - c_hi) / c_lo <= 0.10
    c_oracle = leading_coefficient_oracle(
        spec, "single_bond", 1, (0, 3), (1e-12, 1e-10, 1e-8), "real")
    assert abs(c_oracle - c_lo) / c_lo <= 0.10


def test_splitting_sweep_validation():
    spec = ChainSpec(4, 1.0, gamma=1.0)
    with pytest.raises(ValueError):
        splitting_sweep(spec, plan("all_bonds"), (0, 7))
    with pytest.raises(ValueError):
        splitting_sweep(spec, plan("single_bond", 9), (0, 3))


def test_puiseux_fit_guards():
    spec = ChainSpec(3, 1.0, gamma=1.0)
    records = splitting_sweep(spec, plan("single_bond", 1), (0, 1))
    with pytest.raises(ValueError):
        puiseux_fit(records[:5], "real")
    with pytest.raises(ValueError):
        puiseux_fit(records, "modulus")
