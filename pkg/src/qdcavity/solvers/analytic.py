"""Closed-form amplitudes for the resonant two-atom multiphoton model.

Each excitation block ``{|ee,n>, |eg,n+m>, |ge,n+m>, |gg,n+2m>}`` couples
through ``nu1(n) = <n|A^m|n+m>`` and ``nu2(n) = <n+m|A^m|n+2m>`` (times
lambda).  The antisymmetric combination of ``eg`` and ``ge`` decouples and
the rest is a three-level chain with Rabi frequency ``2 mu``,
``mu = sqrt((nu1^2 + nu2^2) / 2)``.

Two policies are offered.  ``CORRECTED`` is the exact solution of that
block and agrees with the numerical solvers.  ``AS_PRINTED`` keeps the
published expressions character for character, typos included, so their
discrepancy can be measured; see ``TYPO_NOTES.md`` and :data:`CORRECTIONS`.
"""

from dataclasses import dataclass
from enum import Enum

import numpy as np

from ..algebra import eval_G_printed, multiphoton_element
from ..errors import UnsupportedConfigurationError
from ..model import FullState, build_initial_state, coherent_weights


class TypoPolicy(Enum):
    AS_PRINTED = "as-printed"
    CORRECTED = "corrected"


# id -> (anchor, printed, corrected)
CORRECTIONS = {
    "kets-photon-offset": (
        "Eq. (11)",
        "|e,g,n+2>, |g,e,n+2>, |g,g,n+4>",
        "|e,g,n+m>, |g,e,n+m>, |g,g,n+2m>"),
    "ket-bracket": (
        "Eq. (11)",
        "B_n(|e,g,n+2> + C_n|g,e,n+2>)",
        "B_n|e,g,n+m> + C_n|g,e,n+m>"),
    "q-index-offset": (
        "Eq. (12)",
        "Q_{n+1}, Q_{n+2}",
        "Q_{n+m}, Q_{n+2m}"),
    "A-sinc-denominator": (
        "Eq. (12)",
        "A_n: sin(2 mu t)/(2 mu t)",
        "A_n: sin(2 mu t)/(2 mu)"),
    "BC-sinc-denominator": (
        "Eq. (12)",
        "B_n, C_n: sin(mu t)/(2 mu t)",
        "B_n, C_n: sin(2 mu t)/(2 mu)"),
    "D-sinc-denominator": (
        "Eq. (12)",
        "D_n: sin(2 mu t)/(2 mu t)",
        "D_n: sin(2 mu t)/(2 mu)"),
    "D-prefactor": (
        "Eq. (12)",
        "D_n: -nu1 (a1 nu2 Q_n + a4 nu2 Q_{n+2}) sin^2/mu^2",
        "D_n: -nu2 (a1 nu1 Q_n + a4 nu2 Q_{n+2m}) sin^2/mu^2"),
    "G-factor-count": (
        "Eq. (13)",
        "G(n+m) = f(n) f(n+1) ... f(n+m)",
        "G = f(n+1) ... f(n+m), m factors"),
    "G-outside-root": (
        "Eq. (13)",
        "nu1 = lam sqrt((n+m)!/n! G(n+m))",
        "nu1 = lam sqrt((n+m)!/n!) G"),
    "nu2-factorial-ratio": (
        "Eq. (13)",
        "nu2 = lam sqrt((n+m)!/n! G(n+2m))",
        "nu2 = lam sqrt((n+2m)!/(n+m)!) f(n+m+1) ... f(n+2m)"),
}


@dataclass
class AnalyticAmplitudes:
    """Block amplitudes at one time; index ``i`` is the block with ``|ee, n[i]>``."""

    n: np.ndarray
    A: np.ndarray
    B: np.ndarray
    C: np.ndarray
    D: np.ndarray
    nu1: np.ndarray
    nu2: np.ndarray
    mu: np.ndarray


def _safe_div(num, den):
    out = np.zeros(np.broadcast(num, den).shape, dtype=np.result_type(num, den, float))
    np.divide(num, den, out=out, where=den != 0)
    return out


def _check_supported(cfg):
    if not cfg.is_resonant:
        raise UnsupportedConfigurationError(
            f"closed form needs resonance, got detunings {cfg.detunings}")
    if cfg.omega != 0.0 and not cfg.profile.is_identity:
        raise UnsupportedConfigurationError(
            "deformed field energy splits the block diagonal when omega != 0; "
            "closed form covers omega = 0 or the undeformed field")
    if tuple(cfg.couplings) != (1.0, 1.0):
        raise UnsupportedConfigurationError("closed form assumes both atoms couple equally")


def _padded_q(Q, k):
    out = np.zeros(len(k), dtype=complex)
    inside = (k >= 0) & (k < len(Q))
    out[inside] = Q[k[inside]]
    return out


def _corrected_couplings(cfg, n):
    m, top = cfg.m, cfg.n_max
    nu1 = np.array([cfg.lam * multiphoton_element(cfg.profile, k, m) if 0 <= k and k + m <= top else 0.0
                    for k in n])
    nu2 = np.array([cfg.lam * multiphoton_element(cfg.profile, k + m, m)
                    if 0 <= k + m and k + 2 * m <= top else 0.0 for k in n])
    return nu1, nu2


def _printed_couplings(cfg, n):
    m = cfg.m
    prof = cfg.profile.extended(cfg.n_max + 2 * m)
    ratio = np.array([np.prod(np.arange(k + 1, k + m + 1, dtype=float)) for k in n])
    g1 = np.array([eval_G_printed(prof, k, k + m) for k in n])
    g2 = np.array([eval_G_printed(prof, k, k + 2 * m) for k in n])
    return cfg.lam * np.sqrt(ratio * g1), cfg.lam * np.sqrt(ratio * g2)


def analytic_amplitudes(cfg, spec, t, policy=TypoPolicy.CORRECTED):
    _check_supported(cfg)
    policy = TypoPolicy(policy)
    a1, a2, a3, a4 = spec.amplitudes
    # field weights of the truncated, normalized initial state
    build_initial_state(spec, cfg)
    Q = coherent_weights(cfg.alpha if spec.alpha is None else spec.alpha, cfg.n_max)
    Q = Q / np.linalg.norm(Q)
    m = cfg.m

    if policy is TypoPolicy.CORRECTED:
        n = np.arange(-2 * m, cfg.n_max + 1)
        nu1, nu2 = _corrected_couplings(cfg, n)
        mu = np.sqrt(0.5 * (nu1 ** 2 + nu2 ** 2))
        Qa, Qb, Qd = _padded_q(Q, n), _padded_q(Q, n + m), _padded_q(Q, n + 2 * m)
        s2 = np.sin(mu * t) ** 2
        c2 = np.cos(mu * t) ** 2
        s2_mu2 = _safe_div(s2, mu ** 2)
        sinc = _safe_div(np.sin(2 * mu * t), 2 * mu)
        outer = a1 * nu1 * Qa + a4 * nu2 * Qd
        A = a1 * Qa - nu1 * outer * s2_mu2 - 1j * nu1 * (a2 + a3) * Qb * sinc
        B = Qb * (a2 * c2 - a3 * s2) - 1j * outer * sinc
        C = Qb * (a3 * c2 - a2 * s2) - 1j * outer * sinc
        D = a4 * Qd - nu2 * outer * s2_mu2 - 1j * nu2 * (a2 + a3) * Qb * sinc
        phase = np.exp(-1j * cfg.omega * (n + m) * t)
        return AnalyticAmplitudes(n, A * phase, B * phase, C * phase, D * phase, nu1, nu2, mu)

    n = np.arange(0, cfg.n_max + 1)
    nu1, nu2 = _printed_couplings(cfg, n)
    mu = np.sqrt(0.5 * (nu1 ** 2 + nu2 ** 2))
    Q0, Q1, Q2 = _padded_q(Q, n), _padded_q(Q, n + 1), _padded_q(Q, n + 2)
    s2 = np.sin(mu * t) ** 2
    c2 = np.cos(mu * t) ** 2
    s2_mu2 = _safe_div(s2, mu ** 2)
    sinc2 = _safe_div(np.sin(2 * mu * t), 2 * mu * t)
    sinc1 = _safe_div(np.sin(mu * t), 2 * mu * t)
    outer = a1 * nu1 * Q0 + a4 * nu2 * Q2
    A = a1 * Q0 - nu1 * outer * s2_mu2 - 1j * nu1 * (a2 + a3) * Q1 * sinc2
    B = Q1 * (a2 * c2 - a3 * s2) - 1j * outer * sinc1
    C = Q1 * (a3 * c2 - a2 * s2) - 1j * outer * sinc1
    D = a4 * Q2 - nu1 * (a1 * nu2 * Q0 + a4 * nu2 * Q2) * s2_mu2 - 1j * nu2 * (a2 + a3) * Q1 * sinc2
    return AnalyticAmplitudes(n, A, B, C, D, nu1, nu2, mu)


def _assemble(cfg, amp, policy):
    n_f = cfg.n_fock
    psi = np.zeros((4, n_f), dtype=complex)
    if policy is TypoPolicy.CORRECTED:
        offsets = (0, cfg.m, cfg.m, 2 * cfg.m)
        values = (amp.A, amp.B, amp.C, amp.D)
    else:
        offsets = (0, 2, 2, 4)
        values = (amp.A, amp.B, amp.B * amp.C, amp.D)
    for pair, (off, val) in enumerate(zip(offsets, values)):
        k = amp.n + off
        keep = (k >= 0) & (k < n_f)
        psi[pair, k[keep]] = val[keep]
    return psi.reshape(-1)


def evolve_analytic(cfg, spec, times, typo_policy=TypoPolicy.CORRECTED):
    """States built from the closed-form amplitudes, renormalized.

    Each returned state's ``norm_defect`` is ``| ||psi||^2 - 1 |`` before
    renormalization.
    """
    policy = TypoPolicy(typo_policy)
    _check_supported(cfg)
    out = []
    for t in np.asarray(times, dtype=float):
        psi = _assemble(cfg, analytic_amplitudes(cfg, spec, t, policy), policy)
        norm2 = float(np.vdot(psi, psi).real)
        defect = abs(norm2 - 1.0)
        if norm2 > 0:
            psi = psi / np.sqrt(norm2)
        out.append(FullState(psi, float(t), defect))
    return out


def calibrate_block_form(H_block, times, energy_offset=0.0):
    """Fit block propagator entries onto ``{1, sin^2(mu t), sin(2 mu t)/(2 mu)}``.

    ``H_block`` is one bulk excitation block in the order
    ``(ee, eg, ge, gg)``.  ``mu`` is read off the block spectrum, the
    propagator is computed by diagonalization, and each matrix element of
    ``exp(-i (H - offset) t)`` is least-squares fitted.  Returns ``mu``, the
    three 4x4 coefficient matrices and the worst fit residual.
    """
    E, V = np.linalg.eigh(H_block - energy_offset * np.eye(len(H_block)))
    mu = 0.5 * float(np.max(np.abs(E)))
    times = np.asarray(times, dtype=float)
    U = np.einsum("ik,tk,jk->tij", V, np.exp(-1j * np.outer(times, E)), V.conj())
    basis = np.column_stack([np.ones_like(times), np.sin(mu * times) ** 2,
                             np.sin(2 * mu * times) / (2 * mu)])
    coef, *_ = np.linalg.lstsq(basis, U.reshape(len(times), -1), rcond=None)
    residual = float(np.max(np.abs(basis @ coef - U.reshape(len(times), -1))))
    K = coef.reshape(3, *H_block.shape)
    return mu, K[0], K[1], K[2], residual
