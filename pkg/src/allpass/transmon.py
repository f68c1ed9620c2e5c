"""Two resonators symmetrically coupled to a transmon: Fock-basis eigenmodes.

The Hamiltonian (MHz units, h = 1)::

    H = wr a1^+ a1 + wr a2^+ a2 + w01 q^+ q - (E_C/2) q^+ q^+ q q
        + g_total (a1^+ + a1)(a2^+ + a2)
        + g (a1^+ + a1)(q^+ + q) + g (a2^+ + a2)(q^+ + q)

is built in the product basis |n1, n2, nq> (nq fastest). By default the
couplings are kept in their excitation-conserving form; ``counter_rotating``
restores the a^+a^+ / aa pieces.

Exchange of the two resonators is an exact symmetry, so diagonalization is
done in the symmetric/antisymmetric subspaces. The even mode lives in the
symmetric block and the odd mode in the antisymmetric one, which keeps the
labeling well defined even when the two modes are degenerate.
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
import scipy.constants as const
from scipy.optimize import brentq

from ._validation import check_qubit_state
from .device import AllPassModel, SquidSpec, TransmonSpec
from .exceptions import (
    DomainError,
    HamiltonianSizeError,
    LabelingAmbiguityError,
    NoRootError,
    NonConvergenceError,
    StraddlingRegimeError,
)

MAX_DIM = 10_000
MAX_LEVELS = 12
CONVERGENCE_MHZ = 1e-3  # 1 kHz
LABEL_MARGIN = 0.10
STRADDLE_GUARD_MHZ = 1.0

__all__ = [
    "DispersiveResult",
    "ModeFrequencies",
    "allpass_flux_point",
    "build_hamiltonian",
    "degeneracy_gtotal",
    "dispersive_chi",
    "dispersive_estimate",
    "dispersive_numeric",
    "dressed_qubit_frequency",
    "eigenmodes_for_state",
    "even_mode_pull",
    "josephson_energy",
    "josephson_inductance",
    "qubit_freq_from_flux",
]


class ModeFrequencies(NamedTuple):
    omega_e: float
    omega_o: float


@dataclass(frozen=True)
class DispersiveResult:
    omega01_dressed: float
    omega_e: float
    omega_o: float
    chi01: float


# ---------------------------------------------------------------------------
# Hamiltonian construction
# ---------------------------------------------------------------------------


def _lowering(n):
    return np.diag(np.sqrt(np.arange(1, n, dtype=float)), 1)


def _hamiltonian(omega_r, g_total, g, omega_01, e_c, n_res, n_qubit, counter_rotating):
    a = _lowering(n_res)
    b = _lowering(n_qubit)
    ir = np.eye(n_res)
    iq = np.eye(n_qubit)
    a1 = np.kron(np.kron(a, ir), iq)
    a2 = np.kron(np.kron(ir, a), iq)
    q = np.kron(np.kron(ir, ir), b)

    nq = np.arange(n_qubit, dtype=float)
    n_r = np.arange(n_res, dtype=float)
    diag = (
        omega_r * (n_r[:, None, None] + n_r[None, :, None])
        + omega_01 * nq[None, None, :]
        - 0.5 * e_c * (nq * (nq - 1.0))[None, None, :]
    )
    h = np.diag(diag.ravel())

    if counter_rotating:
        x1, x2, xq = a1 + a1.T, a2 + a2.T, q + q.T
        h += g_total * (x1 @ x2) + g * (x1 @ xq) + g * (x2 @ xq)
    else:
        h += g_total * (a1.T @ a2 + a2.T @ a1)
        h += g * (a1.T @ q + q.T @ a1 + a2.T @ q + q.T @ a2)
    return h


def build_hamiltonian(model, n_levels_res=None, n_levels_qubit=None, *, counter_rotating=None,
                      max_dim=MAX_DIM):
    """Dense real-symmetric Hamiltonian of ``model`` in MHz.

    Basis order is (n1, n2, nq) with nq varying fastest. Truncation levels
    default to the ones stored on ``model.transmon``.
    """
    tr = model.transmon
    n_res = int(n_levels_res if n_levels_res is not None else tr.n_levels_res)
    n_qubit = int(n_levels_qubit if n_levels_qubit is not None else tr.n_levels_qubit)
    if n_res < 2 or n_qubit < 2:
        raise DomainError("truncation levels must be >= 2")
    dim = n_res * n_res * n_qubit
    if dim > max_dim:
        raise HamiltonianSizeError(f"Hilbert-space dimension {dim} exceeds cap {max_dim}")
    if counter_rotating is None:
        counter_rotating = tr.counter_rotating
    return _hamiltonian(model.omega_r, model.g_total, model.g, tr.omega_01, tr.e_c,
                        n_res, n_qubit, bool(counter_rotating))


# ---------------------------------------------------------------------------
# Symmetry-adapted diagonalization
# ---------------------------------------------------------------------------


@functools.lru_cache(maxsize=64)
def _parity_basis(n_res, n_qubit, by_number):
    """Columns of the exchange-symmetry-adapted basis, grouped into blocks.

    Returns ``{(parity, key): (U, labels)}`` where ``U`` has orthonormal
    columns in the product basis and ``labels[k] = (n1, n2, nq)`` with
    n1 <= n2. ``key`` is the excitation number (``by_number``) or its parity.
    """
    blocks = {}

    def idx(n1, n2, k):
        return (n1 * n_res + n2) * n_qubit + k

    dim = n_res * n_res * n_qubit
    s = 1.0 / math.sqrt(2.0)
    for n1 in range(n_res):
        for n2 in range(n1, n_res):
            for k in range(n_qubit):
                total = n1 + n2 + k
                key = total if by_number else total % 2
                sym = np.zeros(dim)
                if n1 == n2:
                    sym[idx(n1, n2, k)] = 1.0
                else:
                    sym[idx(n1, n2, k)] = s
                    sym[idx(n2, n1, k)] = s
                    anti = np.zeros(dim)
                    anti[idx(n1, n2, k)] = s
                    anti[idx(n2, n1, k)] = -s
                    blocks.setdefault((-1, key), ([], []))
                    blocks[(-1, key)][0].append(anti)
                    blocks[(-1, key)][1].append((n1, n2, k))
                blocks.setdefault((1, key), ([], []))
                blocks[(1, key)][0].append(sym)
                blocks[(1, key)][1].append((n1, n2, k))
    return {key: (np.array(cols).T, tuple(labels)) for key, (cols, labels) in blocks.items()}


@functools.lru_cache(maxsize=256)
def _block_operators(omega_r, g, transmon, n_res, n_qubit):
    """Symmetry blocks of H split as ``H0 + g_total * Hg`` (H is linear in g_total)."""
    cr = transmon.counter_rotating
    h0 = _hamiltonian(omega_r, 0.0, g, transmon.omega_01, transmon.e_c, n_res, n_qubit, cr)
    hg = _hamiltonian(0.0, 1.0, 0.0, 0.0, 0.0, n_res, n_qubit, cr)
    blocks = {}
    for key, (u, labels) in _parity_basis(n_res, n_qubit, not cr).items():
        blocks[key] = (u.T @ h0 @ u, u.T @ hg @ u, labels)
    return blocks


def _block_eigh(blocks, block, g_total):
    h0, hg, labels = blocks[block]
    energies, vecs = np.linalg.eigh(h0 + g_total * hg)
    return energies, vecs, labels


def _labeled_energy(energies, vecs, labels, target):
    """Energy of the eigenstate with maximal overlap onto ``target``."""
    row = labels.index(target)
    overlaps = vecs[row, :] ** 2
    order = np.argsort(-overlaps, kind="stable")
    best = order[0]
    # an exact tie would also land here, so no separate tie-break is needed
    if len(order) > 1 and overlaps[order[1]] > (1.0 - LABEL_MARGIN) * overlaps[best]:
        raise LabelingAmbiguityError(
            f"state {target}: overlaps {overlaps[best]:.3f} vs {overlaps[order[1]]:.3f} "
            f"are within {LABEL_MARGIN:.0%}"
        )
    return float(energies[best])


def _modes_at_truncation(omega_r, g_total, g, transmon, state, n_res, n_qubit):
    cr = transmon.counter_rotating
    blocks = _block_operators(omega_r, g, transmon, n_res, n_qubit)

    def key(n):
        return n % 2 if cr else n

    e_ref = _labeled_energy(*_block_eigh(blocks, (1, key(state)), g_total), (0, 0, state))
    e_even = _labeled_energy(*_block_eigh(blocks, (1, key(state + 1)), g_total), (0, 1, state))
    e_odd = _labeled_energy(*_block_eigh(blocks, (-1, key(state + 1)), g_total), (0, 1, state))
    return e_even - e_ref, e_odd - e_ref, e_ref


@functools.lru_cache(maxsize=8192)
def _converged_modes(omega_r, g_total, g, transmon, state, max_levels):
    n_res = max(transmon.n_levels_res, state + 2)
    n_qubit = max(transmon.n_levels_qubit, state + 2)
    prev = _modes_at_truncation(omega_r, g_total, g, transmon, state, n_res, n_qubit)
    while n_res < max_levels or n_qubit < max_levels:
        n_res = min(n_res + 1, max_levels)
        n_qubit = min(n_qubit + 1, max_levels)
        if n_res * n_res * n_qubit > MAX_DIM:
            break
        cur = _modes_at_truncation(omega_r, g_total, g, transmon, state, n_res, n_qubit)
        if max(abs(cur[0] - prev[0]), abs(cur[1] - prev[1])) < CONVERGENCE_MHZ:
            return cur
        prev = cur
    raise NonConvergenceError(
        f"eigenfrequencies for qubit state {state} did not converge to "
        f"{CONVERGENCE_MHZ * 1e3:.0f} kHz within {max_levels} levels"
    )


def eigenmodes_for_state(model, qubit_state, *, max_levels=MAX_LEVELS):
    """Even- and odd-mode single-photon frequencies with the qubit in ``qubit_state``.

    Frequencies are measured from the dressed |0, 0, qubit_state> level.
    Truncation grows one level at a time (resonators and transmon together)
    until both frequencies move by less than 1 kHz.
    """
    tr = model.transmon
    check_qubit_state(qubit_state, max_levels)
    e, o, _ = _converged_modes(float(model.omega_r), float(model.g_total), float(model.g), tr,
                               int(qubit_state), int(max_levels))
    return ModeFrequencies(e, o)


def dressed_qubit_frequency(model, *, max_levels=MAX_LEVELS):
    """Numerically dressed 0-1 transition of the transmon (MHz)."""
    args = (float(model.omega_r), float(model.g_total), float(model.g), model.transmon)
    e0 = _converged_modes(*args, 0, int(max_levels))[2]
    e1 = _converged_modes(*args, 1, int(max_levels))[2]
    return e1 - e0


def dispersive_numeric(model, *, max_levels=MAX_LEVELS):
    """Dressed spectrum from diagonalization.

    ``chi01`` is a quarter of the even-mode swing between qubit states 0 and
    1: the even mode sits at ``... + 2 chi01 sigma_z`` and sigma_z changes by 2.
    """
    m0 = eigenmodes_for_state(model, 0, max_levels=max_levels)
    m1 = eigenmodes_for_state(model, 1, max_levels=max_levels)
    return DispersiveResult(
        omega01_dressed=dressed_qubit_frequency(model, max_levels=max_levels),
        omega_e=m0.omega_e,
        omega_o=m0.omega_o,
        chi01=(m1.omega_e - m0.omega_e) / 4.0,
    )


def even_mode_pull(model, qubit_state, *, max_levels=MAX_LEVELS):
    """Half the even-mode shift from qubit state 0 to ``qubit_state`` (= 2 chi_0j)."""
    m0 = eigenmodes_for_state(model, 0, max_levels=max_levels)
    mj = eigenmodes_for_state(model, qubit_state, max_levels=max_levels)
    return 0.5 * (mj.omega_e - m0.omega_e)


# ---------------------------------------------------------------------------
# Dispersive-limit closed forms
# ---------------------------------------------------------------------------


def _check_detuning(delta, e_c):
    if abs(delta) < STRADDLE_GUARD_MHZ or abs(delta - e_c) < STRADDLE_GUARD_MHZ:
        raise StraddlingRegimeError(
            f"detuning {delta} MHz (E_C={e_c}) is within {STRADDLE_GUARD_MHZ} MHz of a pole"
        )


def dispersive_chi(g, delta, e_c):
    """chi01 = -g^2 E_C / (Delta (Delta - E_C)), all in MHz."""
    _check_detuning(delta, e_c)
    return -g * g * e_c / (delta * (delta - e_c))


def degeneracy_gtotal(g, delta, e_c):
    """Resonator-resonator coupling that makes the even and odd modes degenerate."""
    _check_detuning(delta, e_c)
    return g * g / (delta - e_c)


def dispersive_estimate(model):
    """Closed-form dispersive spectrum (qubit in the ground state)."""
    tr = model.transmon
    delta = model.detuning
    chi = dispersive_chi(model.g, delta, tr.e_c)
    g2 = model.g * model.g
    return DispersiveResult(
        omega01_dressed=tr.omega_01 + 2.0 * g2 / delta,
        # ground state: sigma_z = -1
        omega_e=model.omega_r + model.g_total - 2.0 * g2 / (delta - tr.e_c) - 2.0 * chi,
        omega_o=model.omega_r - model.g_total,
        chi01=chi,
    )


# ---------------------------------------------------------------------------
# SQUID flux dependence
# ---------------------------------------------------------------------------


def josephson_energy(squid):
    """E_J(flux) = 2 E_J |cos(pi flux)| in MHz."""
    return 2.0 * squid.e_j_max * 1e3 * abs(math.cos(math.pi * squid.flux))


def josephson_inductance(squid):
    """L_J(flux) = (hbar / 2e)^2 / E_J(flux), in henries."""
    e_j = josephson_energy(squid)
    if e_j <= 0.0:
        raise DomainError("E_J vanishes at half-integer flux")
    phi0_reduced = const.hbar / (2.0 * const.e)
    return phi0_reduced ** 2 / (const.h * e_j * 1e6)


def qubit_freq_from_flux(squid):
    """Bare transmon frequency sqrt(8 E_J(flux) E_C) - E_C in MHz."""
    if abs(math.cos(math.pi * squid.flux)) < 1e-12:
        raise DomainError("E_J -> 0 at half-integer flux; transmon approximation invalid")
    return math.sqrt(8.0 * josephson_energy(squid) * squid.e_c) - squid.e_c


def allpass_flux_point(model, squid, *, n_scan=2000, xtol=1e-7):
    """Smallest |flux| in [0, 0.5) where the even and odd modes become degenerate.

    Solves ``g^2 / (Delta(flux) - E_C) = g_total`` with ``Delta`` from the
    SQUID flux map. Raises NoRootError when the residual never changes sign.
    """

    def parts(flux):
        w01 = qubit_freq_from_flux(SquidSpec(squid.e_j_max, squid.e_c, flux))
        delta = w01 - model.omega_r
        return degeneracy_gtotal(model.g, delta, squid.e_c) - model.g_total, delta - squid.e_c

    def residual(flux):
        return parts(flux)[0]

    grid = np.linspace(0.0, 0.5, n_scan + 1)[:-1]
    values = []
    for f in grid:
        try:
            values.append(parts(float(f)))
        except DomainError:
            values.append((math.nan, math.nan))
    for i in range(len(grid) - 1):
        (r0, p0), (r1, p1) = values[i], values[i + 1]
        if not (np.isfinite(r0) and np.isfinite(r1)):
            continue
        if np.sign(p0) != np.sign(p1):
            continue  # pole of the residual, not a root
        if r0 == 0.0:
            return float(grid[i])
        if r0 * r1 < 0.0:
            return float(brentq(residual, grid[i], grid[i + 1], xtol=xtol))
    raise NoRootError("degeneracy residual does not change sign on flux in [0, 0.5)")
