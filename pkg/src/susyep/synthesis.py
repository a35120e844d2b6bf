"""Construction of PT-symmetric SUSY resonator chains.

The same N-site chain is built four independent ways:

* level-adding recursion on the intertwining factorization
  (``susy_step_up`` / ``susy_partner_remove``),
* the closed-form tridiagonal chain (``build_chain``) with couplings
  J*sqrt(m*(N-m)) and a linear gain/loss gradient on the diagonal,
* the spin form omega0*I + J*Sx + (delta + i*gamma)*Sz for a spin of
  length (N-1)/2 in Pauli-like normalization (``spin_operators``),
* the bosonic two-site model restricted to the (N-1)-particle Fock
  sector (``fock_two_site``).

All four agree entrywise; the test suite asserts the triangle.
"""

from __future__ import annotations

from dataclasses import dataclass

import mpmath as mp
import numpy as np

from .linalg import eig

__all__ = [
    "ChainSpec",
    "IntertwinePair",
    "SpinOps",
    "intertwine_Q",
    "susy_step_up",
    "susy_partner_remove",
    "build_chain",
    "build_chain_mp",
    "hermitian_chain",
    "analytic_eigenvalues",
    "spin_operators",
    "fock_two_site",
]


@dataclass(frozen=True)
class ChainSpec:
    """Physical parameters of one SUSY array.

    N sites, coupling scale J > 0, gain/loss gradient gamma, detuning
    gradient delta, resonant frequency omega0.
    """

    N: int
    J: float = 1.0
    gamma: float = 0.0
    delta: float = 0.0
    omega0: float = 0.0

    def __post_init__(self):
        if int(self.N) != self.N or self.N < 2:
            raise ValueError(f"N must be an integer >= 2, got {self.N}")
        if self.J <= 0:
            raise ValueError(f"J must be positive, got {self.J}")


@dataclass(frozen=True)
class IntertwinePair:
    """Bidiagonal factorization pair Q (N x N-1) and R = Q^T.

    Q @ R equals the size-N Hermitian chain h_N; R @ Q equals the
    size-(N-1) partner h_{N-1} + shift*I with shift = 2J (the energy
    offset applied before factorizing).
    """

    Q: np.ndarray
    R: np.ndarray
    shift: float


@dataclass(frozen=True)
class SpinOps:
    """Angular-momentum operators with [S_a, S_b] = 2i eps_abc S_c."""

    Sx: np.ndarray
    Sy: np.ndarray
    Sz: np.ndarray


def intertwine_Q(N: int, J: float = 1.0) -> IntertwinePair:
    """Bidiagonal intertwining factor for the size-N chain.

    Q(j, k) = sqrt(J*(j-1)) at k = j-1 plus sqrt(J*(N-j)) at k = j
    (1-based indices).
    """
    if N < 2:
        raise ValueError(f"N must be >= 2, got {N}")
    if J <= 0:
        raise ValueError(f"J must be positive, got {J}")
    Q = np.zeros((N, N - 1))
    for j in range(1, N + 1):
        if j >= 2:
            Q[j - 1, j - 2] = np.sqrt(J * (j - 1))
        if j <= N - 1:
            Q[j - 1, j - 1] = np.sqrt(J * (N - j))
    return IntertwinePair(Q=Q, R=Q.T.copy(), shift=2.0 * J)


def hermitian_chain(N: int, J: float = 1.0) -> np.ndarray:
    """The Hermitian SUSY chain h_N with spectrum {0, 2J, ..., 2(N-1)J}."""
    pair = intertwine_Q(N, J)
    return pair.Q @ pair.R


def _check_chain_spectrum(h: np.ndarray, J: float, offset: float = 0.0,
                          rtol: float = 1e-8) -> None:
    """Verify h has the equally spaced spectrum {offset, offset+2J, ...}."""
    n = h.shape[0]
    expected = offset + 2.0 * J * np.arange(n)
    w = np.sort(eig(h).eigenvalues.real)
    scale = max(abs(expected[-1]), J)
    if np.max(np.abs(w - expected)) > rtol * scale:
        raise ValueError(
            "input is not the SUSY chain: spectrum "
            f"{np.round(w, 6)} != {expected}"
        )


def susy_step_up(h_prev, J: float = 1.0) -> np.ndarray:
    """Add a zero level: h_{N-1} with spectrum {0,...,2(N-2)J} ->
    h_N = Q R with spectrum {0, 2J, ..., 2(N-1)J}.

    The input must be the Hermitian SUSY chain; both the spectrum and
    the factorization identity R Q = h_prev + 2J I are verified.
    """
    h_prev = np.asarray(h_prev, dtype=float)
    if h_prev.ndim == 0:
        h_prev = h_prev.reshape(1, 1)
    N = h_prev.shape[0] + 1
    if N >= 3:
        _check_chain_spectrum(h_prev, J)
    elif abs(float(h_prev[0, 0])) > 1e-10 * J:
        raise ValueError("h_1 must be the scalar zero level")
    pair = intertwine_Q(N, J)
    back = pair.R @ pair.Q
    if np.max(np.abs(back - (h_prev + pair.shift * np.eye(N - 1)))) > 1e-12 * N * J:
        raise ValueError("factorization identity R Q = h_prev + 2J I failed")
    return pair.Q @ pair.R


def susy_partner_remove(h, J: float = 1.0, reshift: bool = False) -> np.ndarray:
    """Remove the zero level: h_N -> (N-1)-dim partner R Q.

    The partner spectrum is {2J, ..., 2(N-1)J}; with reshift=True the
    between-step offset -2J is applied, giving {0, ..., 2(N-2)J} so the
    result is directly the (N-1)-site chain of the same family.
    """
    h = np.asarray(h, dtype=float)
    N = h.shape[0]
    if N < 2:
        raise ValueError("need at least a 2-site chain to remove a level")
    _check_chain_spectrum(h, J)
    pair = intertwine_Q(N, J)
    if np.max(np.abs(pair.Q @ pair.R - h)) > 1e-12 * N * J:
        raise ValueError("input does not factor as Q R of the SUSY chain")
    partner = pair.R @ pair.Q
    if reshift:
        partner = partner - pair.shift * np.eye(N - 1)
    return partner


def build_chain(spec: ChainSpec) -> np.ndarray:
    """Closed-form N-site chain.

    H(m, m+1) = H(m+1, m) = J*sqrt(m*(N-m));
    H(m, m) = omega0 + (delta + i*gamma)*(N + 1 - 2m).
    """
    N = spec.N
    m = np.arange(1, N)
    couplings = spec.J * np.sqrt(m * (N - m))
    grad = spec.delta + 1j * spec.gamma
    diag = spec.omega0 + grad * (N + 1 - 2 * np.arange(1, N + 1))
    return np.diag(couplings, 1) + np.diag(couplings, -1) + np.diag(diag)


def build_chain_mp(spec: ChainSpec, coupling_eps=0, bond: int | None = None) -> mp.matrix:
    """Arbitrary-precision chain, optionally with a coupling perturbation.

    coupling_eps is added to every bond (bond=None) or to one 1-based
    bond index.  Couplings are evaluated with mp.sqrt so the EPN
    structure is not broken at the 1e-16 level by rounded entries.
    """
    N = spec.N
    A = mp.zeros(N)
    for m in range(1, N):
        c = mp.mpf(spec.J) * mp.sqrt(mp.mpf(m) * (N - m))
        if bond is None:
            c += mp.mpf(coupling_eps)
        elif bond == m:
            c += mp.mpf(coupling_eps)
        A[m - 1, m] = c
        A[m, m - 1] = c
    grad = mp.mpf(spec.delta) + 1j * mp.mpf(spec.gamma)
    for m in range(1, N + 1):
        A[m - 1, m - 1] = mp.mpf(spec.omega0) + grad * (N + 1 - 2 * m)
    return A


def analytic_eigenvalues(spec: ChainSpec) -> np.ndarray:
    """omega0 + n*sqrt(J^2 - (gamma - i*delta)^2 ... ), n = -(N-1), ..., N-1.

    For the pure gamma chain this is omega0 + n*sqrt(J^2 - gamma^2); the
    detuned chain replaces i*gamma by delta + i*gamma, i.e. the field
    magnitude is sqrt(J^2 + (delta + i*gamma)^2).
    """
    n = np.arange(-(spec.N - 1), spec.N, 2)
    root = np.sqrt(complex(spec.J**2 + (spec.delta + 1j * spec.gamma) ** 2))
    return spec.omega0 + n * root


def spin_operators(N: int) -> SpinOps:
    """Spin-(N-1)/2 operators in the chain basis, Pauli normalization.

    build_chain(spec) == omega0*I + J*Sx + (delta + i*gamma)*Sz; the
    commutators satisfy [S_a, S_b] = 2i eps_abc S_c and Sx has
    eigenvalues {-(N-1), -(N-3), ..., N-1}.
    """
    if N < 2:
        raise ValueError(f"N must be >= 2, got {N}")
    s = (N - 1) / 2.0
    m = s - np.arange(N)  # basis ordered by descending Sz, matching the chain
    # ladder elements <m+1| J_+ |m> = sqrt(s(s+1) - m(m+1)) (standard spin)
    lower = np.sqrt(s * (s + 1) - m[1:] * (m[1:] + 1))  # connects k+1 -> k
    Jp = np.diag(lower, 1)
    Jm = Jp.T.copy()
    Sx = (Jp + Jm).astype(complex)  # = 2 * Jx in Pauli normalization
    Sy = (-1j * (Jp - Jm)).astype(complex)
    Sz = np.diag(2 * m).astype(complex)
    return SpinOps(Sx=Sx, Sy=Sy, Sz=Sz)


def fock_two_site(N: int, J: float = 1.0, gamma: float = 0.0) -> np.ndarray:
    """Two-site boson model in the (N-1)-particle Fock sector.

    Matrix of J*(a1+ a2 + a2+ a1) + i*gamma*(a1+ a1 - a2+ a2) in the
    normalized basis |l> with N-1-l particles on site 1 and l on site 2,
    l = 0..N-1 (l = 0, all particles on the gain site, is chain site 1).
    """
    if N < 2:
        raise ValueError(f"N must be >= 2, got {N}")
    H = np.zeros((N, N), dtype=complex)
    for l in range(N):
        n1 = N - 1 - l
        n2 = l
        H[l, l] = 1j * gamma * (n1 - n2)
        if l >= 1:
            # a1^dag a2 : |l> -> |l-1>, amplitude sqrt(n2)*sqrt(n1+1)
            H[l - 1, l] = J * np.sqrt(n2 * (n1 + 1))
        if l <= N - 2:
            # a2^dag a1 : |l> -> |l+1>, amplitude sqrt(n1)*sqrt(n2+1)
            H[l + 1, l] = J * np.sqrt(n1 * (n2 + 1))
    return H
