"""Formal adjoints and factorizations L* = A2 . R . L . R . A1^{-1}.

The formal adjoint for the complex L2 pairing is
``L* = sum_a (-1)^{|a|} (M_a)^dagger D^a``.  For a square operator whose
coefficients satisfy a simultaneous similarity ``(M_a)^dagger = A2 M_a A1^{-1}``
(possibly with an extra per-order sign absorbed), the adjoint factors through
constant matrices and a variable reflection R, and every symmetry of the
operator then yields a conservation law downstream.

The solver treats two variants of the coefficient similarity:

* plain:  ``(M_a)^dagger A1 = A2 M_a`` for every a.  The factorization then
  needs the reflection R of all variables (R absorbs the (-1)^{|a|} signs),
  so ``parity_mask`` is all-True.
* sign-absorbed:  ``(M_a)^dagger A1 = (-1)^{|a|} A2 M_a``.  No reflection is
  needed (``parity_mask`` all-False) and ``L* = A2 L A1^{-1}`` directly.

The sign-absorbed variant is preferred when it exists since the resulting
conserved densities are local in time.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .opcore import ConstCoeffOperator, midx_order

__all__ = [
    "formal_adjoint",
    "transpose_adjoint",
    "classify_adjointness",
    "ConjugacyPair",
    "AdjointFactorization",
    "SemiConjugacyNotFound",
    "semi_conjugacy_solve",
    "clifford_conjugators",
    "adjoint_factorization",
]


def formal_adjoint(L):
    """Adjoint for the complex L2 inner product: transpose, conjugate, sign."""
    terms = {
        alpha: (-1) ** midx_order(alpha) * mat.conj().T for alpha, mat in L.terms.items()
    }
    return ConstCoeffOperator(L.nvars, (L.cols, L.rows), terms)


def transpose_adjoint(L):
    """Adjoint without complex conjugation (the bilinear pairing's adjoint).

    Coincides with :func:`formal_adjoint` for real coefficients.  This is the
    operator entering the bilinear divergence identity; complex conjugation is
    applied to field samples at evaluation time instead.
    """
    terms = {alpha: (-1) ** midx_order(alpha) * mat.T for alpha, mat in L.terms.items()}
    return ConstCoeffOperator(L.nvars, (L.cols, L.rows), terms)


def classify_adjointness(L):
    """Return ``"self_adjoint"``, ``"skew_adjoint"`` or ``"neither"``."""
    if not L.is_square():
        raise ValueError("classification needs a square operator")
    Ls = formal_adjoint(L)
    if Ls == L or Ls.allclose(L):
        return "self_adjoint"
    if Ls == -L or Ls.allclose(-L):
        return "skew_adjoint"
    return "neither"


class SemiConjugacyNotFound(Exception):
    """No invertible conjugating pair was found.

    This is "not found", not a nonexistence certificate; it signals that the
    conservation-law factory is unavailable for this operator.
    """


@dataclass(frozen=True)
class ConjugacyPair:
    """Invertible pair with ``(M_a)^dagger A1 = s_a A2 M_a`` for every term.

    ``s_a = (-1)^{|a|}`` when ``parity_mask`` is empty (signs absorbed into
    the matrices), else ``s_a = 1`` and the factorization carries the
    reflection of the masked variables.
    """

    A1: np.ndarray
    A2: np.ndarray
    parity_mask: tuple  # bool per variable; all-True or all-False here
    residual: float = 0.0
    seed: int | None = None
    sample_index: int | None = None

    @property
    def sign_absorbed(self):
        return not any(self.parity_mask)

    def cond(self):
        return max(np.linalg.cond(self.A1), np.linalg.cond(self.A2))


def _pair_residual(L, A1, A2, sign_absorbed):
    """Max over terms of ||M^dagger A1 - s A2 M|| / ||M||."""
    worst = 0.0
    for alpha, mat in L.terms.items():
        s = (-1) ** midx_order(alpha) if sign_absorbed else 1.0
        lhs = mat.conj().T @ A1 - s * (A2 @ mat)
        scale = np.linalg.norm(mat)
        worst = max(worst, np.linalg.norm(lhs) / max(scale, 1e-300))
    return worst


def _joint_nullspace(L, sign_absorbed, tol=1e-10):
    """Nullspace basis of the stacked constraints, as (2m^2, k) array."""
    m = L.rows
    eye = np.eye(m)
    blocks = []
    for alpha, mat in L.terms.items():
        s = (-1) ** midx_order(alpha) if sign_absorbed else 1.0
        scale = max(np.linalg.norm(mat), 1e-300)
        left = np.kron(mat.conj().T, eye) / scale
        right = -s * np.kron(eye, mat.T) / scale
        blocks.append(np.hstack([left, right]))
    K = np.vstack(blocks)
    _, sv, vh = np.linalg.svd(K)
    smax = sv[0] if len(sv) else 0.0
    if smax == 0.0:
        return np.eye(2 * m * m, dtype=complex)
    keep = sv <= tol * smax
    null = vh[len(sv) :].conj().T  # rows beyond rank when K is wide
    extra = vh[: len(sv)][keep].conj().T
    if null.size and extra.size:
        return np.hstack([extra, null])
    return extra if extra.size else null


def _try_pair(L, A1, A2, sign_absorbed, cond_threshold):
    m = L.rows
    if np.linalg.matrix_rank(A1) < m or np.linalg.matrix_rank(A2) < m:
        return None
    if np.linalg.cond(A1) > cond_threshold or np.linalg.cond(A2) > cond_threshold:
        return None
    res = _pair_residual(L, A1, A2, sign_absorbed)
    if res > 1e-10:
        return None
    return res


def _normalize(A1, A2):
    idx = np.unravel_index(np.argmax(np.abs(A1)), A1.shape)
    c = A1[idx]
    return A1 / c, A2 / c


def semi_conjugacy_solve(L, seed=0, max_samples=64, cond_threshold=1e8):
    """Find an invertible pair conjugating every coefficient to its adjoint.

    Solves the joint linear system over all terms, first in the sign-absorbed
    variant (no reflection needed), then in the plain variant (full
    reflection).  In each variant the identity pair is tried first, then
    ``max_samples`` random elements of the solution space (seeded, so NotFound
    is reproducible).  Raises :class:`SemiConjugacyNotFound` if no invertible
    pair with condition number below ``cond_threshold`` turns up.
    """
    if not L.is_square():
        raise ValueError("semi-conjugacy needs a square operator")
    if L.is_zero():
        raise ValueError("semi-conjugacy of the zero operator is vacuous")
    m = L.rows
    eye = np.eye(m, dtype=complex)
    for sign_absorbed in (True, False):
        mask = (False,) * L.nvars if sign_absorbed else (True,) * L.nvars
        null = _joint_nullspace(L, sign_absorbed)
        if null.shape[1] == 0:
            continue
        for cand in ((eye, eye), (eye, -eye)):
            res = _try_pair(L, cand[0], cand[1], sign_absorbed, cond_threshold)
            if res is not None:
                return ConjugacyPair(cand[0].copy(), cand[1].copy(), mask, res, seed, None)
        rng = np.random.default_rng(seed)
        for i in range(max_samples):
            g = rng.standard_normal(null.shape[1]) + 1j * rng.standard_normal(null.shape[1])
            vec = null @ g
            A1 = vec[: m * m].reshape(m, m)
            A2 = vec[m * m :].reshape(m, m)
            if np.linalg.norm(A1) < 1e-12 or np.linalg.norm(A2) < 1e-12:
                continue
            A1, A2 = _normalize(A1, A2)
            res = _try_pair(L, A1, A2, sign_absorbed, cond_threshold)
            if res is not None:
                return ConjugacyPair(A1, A2, mask, res, seed, i)
    raise SemiConjugacyNotFound(
        f"no invertible conjugating pair found after {max_samples} samples (seed={seed})"
    )


def clifford_conjugators(gammas, tol=1e-12):
    """Conjugating pair for a unitary Clifford family, signature (+,-,...,-).

    Checks the anticommutation relations and unitarity of the generators; the
    timelike generator (the first one, squaring to +I) then conjugates every
    generator to its Hermitian adjoint, so ``A1 = A2 = gammas[0]``.
    """
    gammas = [np.asarray(g, dtype=complex) for g in gammas]
    if not gammas:
        raise ValueError("need at least one generator")
    m = gammas[0].shape[0]
    eye = np.eye(m)
    eta = [1.0] + [-1.0] * (len(gammas) - 1)
    for i, gi in enumerate(gammas):
        if gi.shape != (m, m):
            raise ValueError("generators must share a square shape")
        if np.max(np.abs(gi @ gi.conj().T - eye)) > tol:
            raise ValueError(f"generator {i} is not unitary")
        for j, gj in enumerate(gammas):
            anti = gi @ gj + gj @ gi
            want = 2.0 * eta[i] * eye if i == j else np.zeros((m, m))
            if np.max(np.abs(anti - want)) > tol:
                raise ValueError(f"Clifford relation fails for generators ({i}, {j})")
    g0 = gammas[0]
    for i, gi in enumerate(gammas):
        if np.max(np.abs(gi.conj().T - g0 @ gi @ g0)) > tol:
            raise ValueError(f"adjoint conjugation fails for generator {i}")
    return g0.copy(), g0.copy()


@dataclass(frozen=True)
class AdjointFactorization:
    """Operator-level factorization ``L* = A2 . R . L . R . A1^{-1}``.

    ``R`` reflects the variables flagged in ``parity_mask`` (identity when the
    mask is empty).  In symbol space R acts as ``k -> sigma(k)`` with the
    masked components negated; in verification contexts the time slot reflects
    as ``t -> s - t`` with a scenario parameter ``s``.
    """

    operator: ConstCoeffOperator
    pair: ConjugacyPair
    symbol_residual: float = 0.0

    @property
    def A1(self):
        return self.pair.A1

    @property
    def A2(self):
        return self.pair.A2

    @property
    def parity_mask(self):
        return self.pair.parity_mask

    def reflect_wavevector(self, k):
        k = np.asarray(k, dtype=complex).copy()
        for slot, flip in enumerate(self.parity_mask):
            if flip:
                k[slot] = -k[slot]
        return k

    def characteristic_matrix(self):
        """Matrix applied to (reflected) kernel elements to build Q."""
        return self.A1.copy()


def _symbol_identity_residual(L, pair, nchecks=50, seed=7):
    Ls = formal_adjoint(L)
    rng = np.random.default_rng(seed)
    A1inv = np.linalg.inv(pair.A1)
    worst = 0.0
    for _ in range(nchecks):
        k = rng.standard_normal(L.nvars)
        sig = k.astype(complex)
        if any(pair.parity_mask):
            sig = sig.copy()
            for slot, flip in enumerate(pair.parity_mask):
                if flip:
                    sig[slot] = -sig[slot]
        lhs = Ls.symbol(k)
        rhs = pair.A2 @ L.symbol(sig) @ A1inv
        scale = max(np.linalg.norm(lhs), np.linalg.norm(rhs), 1e-300)
        worst = max(worst, np.linalg.norm(lhs - rhs) / scale)
    return worst


def adjoint_factorization(L, pair, tol=1e-10):
    """Verify ``pair`` against ``L`` and package the factorization.

    Raises ``ValueError`` when the coefficient residual or the symbol-identity
    residual exceeds ``tol``.
    """
    res = _pair_residual(L, pair.A1, pair.A2, pair.sign_absorbed)
    if res > tol:
        raise ValueError(f"conjugating pair does not verify: coefficient residual {res:.3e}")
    sym = _symbol_identity_residual(L, pair)
    if sym > tol:
        raise ValueError(f"factorization symbol identity fails: residual {sym:.3e}")
    return AdjointFactorization(L, pair, sym)
