"""Bilinear currents: X with Div X = Q.L[P] - P.Lt[Q], built by peeling.

Terms of jet bilinears are keyed by ``(beta, i, gamma, j)`` meaning
``c * (d^beta Q_i) * (d^gamma P_j)``.  The divergence identity uses the
transpose adjoint ``Lt`` (no complex conjugation), which makes it an exact
polynomial identity in the jets of Q and P over C.  For the Hermitian pairing
the Q side is conjugated at evaluation time, and the adjoint-annihilation
condition ``L*[Q] = 0`` is equivalent to ``Lt[conj(Q)] = 0``.

The flux is canonical: derivatives are peeled off P lowest variable first
(t before x1 before x2 ...), so X is deterministic; it is only unique up to
curl terms anyway.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .adjoint import AdjointFactorization, formal_adjoint
from .fields import AnalyticField
from .opcore import midx_order

__all__ = [
    "bilinear_concomitant_terms",
    "BilinearFlux",
    "concomitant_flux",
    "Characteristic",
    "adjoint_characteristic",
    "verify_characteristic",
]


def _add_term(terms, key, c):
    if c == 0:
        return
    cur = terms.get(key)
    if cur is None:
        terms[key] = c
    else:
        cur = cur + c
        if cur == 0:
            del terms[key]
        else:
            terms[key] = cur


def bilinear_concomitant_terms(L):
    """Jet terms of ``Q.L[P] - P.Lt[Q]`` for square ``L``."""
    if not L.is_square():
        raise ValueError("the bilinear pairing needs a square operator")
    nv = L.nvars
    zero = (0,) * nv
    terms = {}
    for alpha, mat in L.terms.items():
        sign = (-1.0) ** midx_order(alpha)
        for i in range(L.rows):
            for j in range(L.cols):
                c = mat[i, j]
                if c == 0:
                    continue
                _add_term(terms, (zero, i, alpha, j), c)
                _add_term(terms, (alpha, i, zero, j), -sign * c)
    return terms


@dataclass(frozen=True)
class BilinearFlux:
    """Current X with one jet-bilinear term dict per variable.

    ``components[v]`` holds the X^v terms; ``components[0]`` is the density
    slot X^0 whose spatial integral is the conserved functional.
    """

    nvars: int
    ncomp: int
    components: tuple  # tuple of dicts (beta, i, gamma, j) -> complex

    def divergence_terms(self):
        """Symbolic expansion of Div X as a jet bilinear."""
        out = {}
        for v, comp in enumerate(self.components):
            ev = tuple(1 if d == v else 0 for d in range(self.nvars))
            for (beta, i, gamma, j), c in comp.items():
                _add_term(out, (tuple(b + e for b, e in zip(beta, ev)), i, gamma, j), c)
                _add_term(out, (beta, i, tuple(g + e for g, e in zip(gamma, ev)), j), c)
        return out

    def divergence_defect(self, L):
        """Max |coefficient| of Div X - (Q.L[P] - P.Lt[Q]); zero when exact."""
        target = bilinear_concomitant_terms(L)
        got = self.divergence_terms()
        worst = 0.0
        for key in set(target) | set(got):
            worst = max(worst, abs(got.get(key, 0.0) - target.get(key, 0.0)))
        return worst

    @property
    def density_terms(self):
        return self.components[0]

    def term_count(self):
        return sum(len(c) for c in self.components)


def concomitant_flux(L):
    """Construct the canonical bilinear current for a square operator.

    Each term ``Q_i M_ij d^alpha P_j`` is integrated by parts one derivative
    at a time (lowest variable first); every peel deposits a flux term and
    flips the residue's sign, and the final order-0 residues cancel against
    the transpose-adjoint part of the pairing.
    """
    if not L.is_square():
        raise ValueError("flux construction needs a square operator")
    nv = L.nvars
    components = tuple({} for _ in range(nv))
    for alpha, mat in L.terms.items():
        for i in range(L.rows):
            for j in range(L.cols):
                c = mat[i, j]
                if c == 0:
                    continue
                beta = (0,) * nv
                gamma = alpha
                coeff = c
                while any(gamma):
                    v = next(d for d in range(nv) if gamma[d])
                    gm = tuple(g - 1 if d == v else g for d, g in enumerate(gamma))
                    _add_term(components[v], (beta, i, gm, j), coeff)
                    beta = tuple(b + 1 if d == v else b for d, b in enumerate(beta))
                    gamma = gm
                    coeff = -coeff
    return BilinearFlux(nv, L.rows, components)


def evaluate_terms(terms, jet_q, jet_p, conjugate_first=True):
    """Numerically contract jet-bilinear terms against two jet providers.

    ``jet_q(beta)`` and ``jet_p(gamma)`` return arrays indexed by component in
    axis 0.  The Q side is conjugated by default (Hermitian pairing); pass
    ``conjugate_first=False`` for the raw bilinear form.
    """
    out = None
    for (beta, i, gamma, j), c in terms.items():
        q = jet_q(beta)[i]
        if conjugate_first:
            q = np.conj(q)
        val = c * q * jet_p(gamma)[j]
        out = val if out is None else out + val
    return out


# -- characteristics ---------------------------------------------------------


@dataclass(frozen=True)
class Characteristic:
    """Builder of adjoint-kernel elements Q from solutions.

    For a symmetry generator the map is ``u -> A1 . R[Gu]`` with ``R`` the
    factorization's reflection (identity when the parity mask is empty); for a
    fixed kernel element ``w`` it is the constant builder ``A1 . R[w]``.  In
    verification contexts the time slot of R reflects as ``t -> s - t``.

    ``direct=True`` marks generators that already produce Q themselves
    (catalogued characteristic maps); A1 and R are then skipped.
    """

    factorization: AdjointFactorization
    generator: object  # SymmetryOp or KernelShift
    direct: bool = False

    @property
    def operator(self):
        return self.factorization.operator

    @property
    def matrix(self):
        return self.factorization.A1

    @property
    def parity_mask(self):
        return self.factorization.parity_mask


def adjoint_characteristic(L, fact, generator):
    """Characteristic for a verified factorization and a generator.

    ``generator`` is a symmetry chain, a fixed kernel element, or a chain
    flagged as a direct characteristic map (``char_map``).
    """
    if fact.operator is not L and fact.operator != L:
        raise ValueError("factorization belongs to a different operator")
    direct = bool(getattr(generator, "char_map", False))
    return Characteristic(fact, generator, direct)


def characteristic_analytic(char, u, s=0.0):
    """Apply a characteristic to an exact closed-form solution field."""
    from .symmetry import apply_symmetry_analytic

    g = char.generator
    if hasattr(g, "field"):  # fixed kernel element
        f = g.field
    else:
        f = apply_symmetry_analytic(g, u, s=s)
    if char.direct:
        return f
    if any(char.parity_mask):
        f = f.point_reflect(char.parity_mask, s=s)
    return f.apply_matrix(char.matrix)


def verify_characteristic(char, kspace_list, s=1.0, seed=0, tol=1e-8):
    """Check ``L*[Q] = 0`` on random kernel superpositions.

    Builds exact kernel samples at the given spatial wavevectors, pushes a
    random superposition through the characteristic and evaluates the adjoint
    residual on random points; returns the max relative residual.
    """
    from .fields import kernel_sample

    L = char.operator
    Lstar = formal_adjoint(L)
    rng = np.random.default_rng(seed)
    waves = []
    for kspace in kspace_list:
        waves.extend(kernel_sample(L, kspace))
    u = AnalyticField(L.nvars, L.cols, {})
    for w in waves:
        u = u + complex(rng.standard_normal(), rng.standard_normal()) * w
    q = characteristic_analytic(char, u, s=s)
    resid = q.apply_operator(Lstar)
    pts = rng.standard_normal((16, L.nvars - 1))
    times = rng.uniform(0.2 * s if s else 0.0, 0.8 * s if s else 1.0, size=4)
    worst = 0.0
    scale = 0.0
    for t in times:
        r = np.max(np.abs(resid.evaluate(t, pts)))
        base = np.max(np.abs(q.evaluate(t, pts))) * max(L.max_norm(), 1.0)
        worst = max(worst, r)
        scale = max(scale, base)
    rel = worst / max(scale, 1e-300)
    return rel, rel <= tol
