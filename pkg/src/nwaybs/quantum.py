"""Closed-form detection statistics after the frequency-beamsplitter interaction.

Singles (first-order) and coincidence (second-order) correlation functions
for the supported input classes:

* single weak coherent state
* dual coherent states with randomized relative phase (phase-averaged)
* a photon pair in two channels
* two-mode squeezed vacuum with pre/post-interaction losses (multiphoton)

All formulas are written through the diagonal/off-diagonal coefficients
p_N, q_N (or a full transfer matrix), so they hold for any N; the familiar
three-channel expressions are the N = 3 specialization.  Coincidences are
normalized to their value at zero nonlinear phase.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .transfer import TransferMatrix, ideal_transfer, p_coeff, q_coeff

INPUT_KINDS = ("single_coherent", "dual_coherent", "photon_pair", "squeezed_vacuum")


@dataclass(frozen=True)
class InputState:
    """Weak-field input description.

    ``modes`` are 1-based channel indices: one for single_coherent, two for
    the dual-channel kinds.  ``pre_loss``/``post_loss`` are per-channel
    amplitude transmissions in (0, 1], applied before and after the
    interaction.
    """

    kind: str
    modes: tuple[int, ...] = (1, 3)
    amplitude: float = 1.0
    zeta: complex = 0.0
    phase_averaged: bool = True
    pre_loss: tuple[float, ...] | None = None
    post_loss: tuple[float, ...] | None = None

    def __post_init__(self):
        if self.kind not in INPUT_KINDS:
            raise ValueError(f"unknown input kind {self.kind!r}")
        modes = tuple(int(m) for m in self.modes)
        expected = 1 if self.kind == "single_coherent" else 2
        if len(modes) != expected:
            raise ValueError(f"{self.kind} takes {expected} mode index(es)")
        if len(set(modes)) != len(modes):
            raise ValueError("mode indices must be distinct")
        if any(m < 1 for m in modes):
            raise ValueError("mode indices are 1-based")
        object.__setattr__(self, "modes", modes)
        for name in ("pre_loss", "post_loss"):
            t = getattr(self, name)
            if t is not None:
                t = tuple(float(x) for x in t)
                if any(not (0.0 < x <= 1.0) for x in t):
                    raise ValueError(f"{name} transmissions must lie in (0, 1]")
                object.__setattr__(self, name, t)

    def transmissions(self, name: str, n_modes: int) -> np.ndarray:
        t = getattr(self, name)
        if t is None:
            return np.ones(n_modes)
        if len(t) != n_modes:
            raise ValueError(f"{name} must supply one transmission per channel")
        return np.asarray(t)


@dataclass(frozen=True)
class CorrelationResult:
    """Sampled singles and normalized coincidences versus nonlinear phase."""

    phi: np.ndarray
    singles: np.ndarray          # shape (len(phi), N)
    g2: dict = field(default_factory=dict)  # (i, j) -> array over phi


def singles(state: InputState, transfer: TransferMatrix) -> np.ndarray:
    """Expected singles counts per channel for the given transfer matrix."""
    u = transfer.entries
    n = transfer.n_modes
    if any(m > n for m in state.modes):
        raise ValueError("input mode index exceeds the number of channels")
    cols = [m - 1 for m in state.modes]
    if state.kind == "single_coherent":
        return state.amplitude**2 * np.abs(u[:, cols[0]]) ** 2
    if state.kind == "dual_coherent":
        if not state.phase_averaged:
            amp = u[:, cols[0]] + u[:, cols[1]]
            return state.amplitude**2 * np.abs(amp) ** 2
        return state.amplitude**2 * (np.abs(u[:, cols]) ** 2).sum(axis=1)
    if state.kind == "photon_pair":
        return (np.abs(u[:, cols]) ** 2).sum(axis=1)
    # squeezed vacuum with losses
    t_pre = state.transmissions("pre_loss", n)
    t_post = state.transmissions("post_loss", n)
    s2 = math.sinh(abs(state.zeta)) ** 2
    body = (np.abs(u[:, cols] * t_pre[cols]) ** 2).sum(axis=1)
    return t_post**2 * s2 * body


def g2_dual_coherent(phi, n_modes: int = 3):
    """Normalized (1,3) coincidences for phase-averaged dual coherent input.

    Phase averaging makes the two intensities independent, so the
    coincidence factorizes: (1 - |q|^2)^2.
    """
    q2 = np.abs(q_coeff(n_modes, np.asarray(phi))) ** 2
    return (1.0 - q2) ** 2


def pair_coincidence(transfer: TransferMatrix, in_modes=(1, 3), ports=(1, 3)) -> float:
    """Unnormalized two-photon coincidence |U_i,m1 U_j,m2 + U_i,m2 U_j,m1|^2.

    The coherent sum of the two routing amplitudes carries the two-photon
    interference; for a balanced two-channel splitter it vanishes (the
    Hong-Ou-Mandel null).
    """
    u = transfer.entries
    i, j = (p - 1 for p in ports)
    m1, m2 = (m - 1 for m in in_modes)
    return float(np.abs(u[i, m1] * u[j, m2] + u[i, m2] * u[j, m1]) ** 2)


def g2_photon_pair(phi, n_modes: int = 3):
    """Normalized photon-pair coincidences (g2_13, g2_12) versus phi.

    g2_13 = |p^2 + q^2|^2 and g2_12 = g2_23 = |p q + q^2|^2.
    """
    phi = np.asarray(phi)
    p = p_coeff(n_modes, phi)
    q = q_coeff(n_modes, phi)
    g13 = np.abs(p * p + q * q) ** 2
    g12 = np.abs(p * q + q * q) ** 2
    return g13, g12


def g2_multiphoton(phi, zeta: complex, t1_alpha: float = 1.0, t3_alpha: float = 1.0,
                   n_modes: int = 3):
    """Normalized (1,3) coincidences for squeezed-vacuum input with pre-loss.

    |p^2+q^2|^2 + 2|p|^2|q|^2 (T1^2/T3^2 + T3^2/T1^2) sinh^2 / (1 + 2 sinh^2);
    the second term is the multiphoton contribution, which is where loss
    asymmetry enters.
    """
    if not (0.0 < t1_alpha <= 1.0 and 0.0 < t3_alpha <= 1.0):
        raise ValueError("transmissions must lie in (0, 1]")
    phi = np.asarray(phi)
    p = p_coeff(n_modes, phi)
    q = q_coeff(n_modes, phi)
    s2 = math.sinh(abs(zeta)) ** 2
    ratio = (t1_alpha / t3_alpha) ** 2 + (t3_alpha / t1_alpha) ** 2
    pair = np.abs(p * p + q * q) ** 2
    mult = 2.0 * np.abs(p) ** 2 * np.abs(q) ** 2 * ratio * s2 / (1.0 + 2.0 * s2)
    return pair + mult


def coincidence_squeezed(state: InputState, transfer: TransferMatrix, ports=(1, 3)) -> float:
    """Unnormalized squeezed-vacuum coincidence G2_ij with both loss stages."""
    if state.kind != "squeezed_vacuum":
        raise ValueError("requires a squeezed_vacuum input state")
    u = transfer.entries
    n = transfer.n_modes
    i, j = (p - 1 for p in ports)
    m1, m2 = (m - 1 for m in state.modes)
    t_pre = state.transmissions("pre_loss", n)
    t_post = state.transmissions("post_loss", n)
    t1, t2 = t_pre[m1], t_pre[m2]
    s2 = math.sinh(abs(state.zeta)) ** 2
    prefac = t_post[i] ** 2 * t_post[j] ** 2 * t1**2 * t2**2
    paired = np.abs(u[i, m1] * u[j, m2] + u[i, m2] * u[j, m1]) ** 2 * (s2 + 2.0 * s2**2)
    uncorr = 2.0 * (
        np.abs(u[i, m1]) ** 2 * np.abs(u[j, m1]) ** 2 * (t1 / t2) ** 2
        + np.abs(u[i, m2]) ** 2 * np.abs(u[j, m2]) ** 2 * (t2 / t1) ** 2
    ) * s2**2
    return float(prefac * (paired + uncorr))


def g2_squeezed_full(state: InputState, transfer: TransferMatrix, ports=(1, 3)) -> float:
    """Squeezed-vacuum coincidence normalized to its zero-phase value.

    Post-interaction losses cancel in the ratio; pre-interaction loss
    asymmetry survives through the multiphoton term.
    """
    raw = coincidence_squeezed(state, transfer, ports)
    ref = coincidence_squeezed(state, ideal_transfer(transfer.n_modes, 0.0), ports)
    if ref == 0.0:
        raise ValueError("zero-phase coincidence vanishes; cannot normalize")
    return raw / ref


def multiphoton_scaling_curve(zeta_grid) -> np.ndarray:
    """Model count rates for the 50:50 tap characterization of |zeta|.

    One squeezed-vacuum channel is split 50:50; coincidences between the two
    halves isolate multiphoton events while cross-channel coincidences
    measure pairs.  Columns (structured array):

    * ``sinh2``  -- sinh^2|zeta|, proportional to the singles rate
    * ``pair``   -- accidental-subtracted cross-channel coincidences,
                    sinh^2 cosh^2 (linear in the singles rate at small zeta)
    * ``mult``   -- same-channel tap coincidences, sinh^4 / 2 (quadratic)
    * ``ratio``  -- mult / pair = sinh^2 / (2 (1 + sinh^2))
    """
    zg = np.atleast_1d(np.asarray(zeta_grid, dtype=float))
    if np.any(zg <= 0):
        raise ValueError("zeta grid must be positive")
    s2 = np.sinh(zg) ** 2
    pair = s2 * (1.0 + s2)
    mult = 0.5 * s2**2
    out = np.zeros(len(zg), dtype=[("zeta", float), ("sinh2", float),
                                   ("pair", float), ("mult", float), ("ratio", float)])
    out["zeta"] = zg
    out["sinh2"] = s2
    out["pair"] = pair
    out["mult"] = mult
    out["ratio"] = mult / pair
    return out


def multiphoton_ratio_model(sinh2) -> np.ndarray:
    """Tap-coincidence ratio as a function of sinh^2|zeta|."""
    s2 = np.asarray(sinh2, dtype=float)
    return s2 / (2.0 * (1.0 + s2))


def correlation_curve(state: InputState, phis, n_modes: int = 3) -> CorrelationResult:
    """Sweep singles and normalized coincidences over a nonlinear-phase grid."""
    phis = np.asarray(phis, dtype=float)
    sgl = np.empty((len(phis), n_modes))
    pairs = [(i, j) for i in range(1, n_modes + 1) for j in range(i + 1, n_modes + 1)]
    g2 = {pr: np.full(len(phis), np.nan) for pr in pairs}
    ref = 0.0
    if state.kind != "single_coherent":
        # one common normalization: the zero-phase coincidence on the input
        # port pair.  Cross-port pairs start at exactly zero, so normalizing
        # each pair by its own zero-phase value would be 0/0 for them.
        ident = ideal_transfer(n_modes, 0.0)
        in_pair = (min(state.modes), max(state.modes))
        ref = _coincidence(state, ident, in_pair)
    for k, phi in enumerate(phis):
        u = ideal_transfer(n_modes, phi)
        sgl[k] = singles(state, u)
        if state.kind == "single_coherent" or ref <= 0.0:
            continue
        for pr in pairs:
            g2[pr][k] = _coincidence(state, u, pr) / ref
    return CorrelationResult(phi=phis, singles=sgl, g2=g2)


def _coincidence(state: InputState, transfer: TransferMatrix, ports) -> float:
    """Unnormalized coincidence for any dual-channel input class."""
    if state.kind == "dual_coherent":
        s = singles(state, transfer)
        return float(s[ports[0] - 1] * s[ports[1] - 1])
    if state.kind == "photon_pair":
        return pair_coincidence(transfer, state.modes, ports)
    if state.kind == "squeezed_vacuum":
        return coincidence_squeezed(state, transfer, ports)
    raise ValueError(f"no coincidence model for input kind {state.kind!r}")
