"""Constant-coefficient matrix differential operators and their Fourier symbols.

An operator is a finite sum ``sum_a M_a * D^a`` where ``a`` ranges over
multi-indices in ``n + 1`` variables (slot 0 is always time) and every ``M_a``
is a complex ``l x m`` matrix.  Multi-indices are plain tuples of nonnegative
ints.  All operations are pure; operators are immutable after construction.

Coefficient arithmetic is done in complex128.  When entries are exact (small
integers, Gaussian integers scaled to floats) sums and products stay exact, so
``==`` is exact dict comparison; ``allclose`` is available for inexact data.
"""

from __future__ import annotations

import numpy as np

__all__ = [
    "MultiIndex",
    "midx_order",
    "midx_add",
    "ConstCoeffOperator",
    "op_add",
    "op_compose",
    "op_commutator",
    "symbol_eval",
    "identity_operator",
    "zero_operator",
]

MultiIndex = tuple  # tuple of n+1 nonnegative ints, slot 0 = time


def midx_order(alpha):
    """Total order |alpha| of a multi-index."""
    return sum(alpha)


def midx_add(alpha, beta):
    return tuple(a + b for a, b in zip(alpha, beta))


def _check_multiindex(alpha, nvars):
    if len(alpha) != nvars:
        raise ValueError(f"multi-index {alpha} has {len(alpha)} slots, expected {nvars}")
    if any((not isinstance(a, (int, np.integer))) or a < 0 for a in alpha):
        raise ValueError(f"multi-index {alpha} must consist of nonnegative integers")


class ConstCoeffOperator:
    """A constant-coefficient matrix differential operator.

    Parameters
    ----------
    nvars : int
        Number of independent variables (time + space), so ``nvars = n + 1``.
    shape : (int, int)
        Matrix shape ``(rows, cols)`` of the coefficients.
    terms : dict
        Map multi-index -> array_like of shape ``shape``.  Zero matrices are
        dropped; term order never matters.
    """

    __slots__ = ("nvars", "shape", "terms")

    def __init__(self, nvars, shape, terms):
        shape = (int(shape[0]), int(shape[1]))
        canon = {}
        for alpha, mat in terms.items():
            alpha = tuple(int(a) for a in alpha)
            _check_multiindex(alpha, nvars)
            mat = np.asarray(mat, dtype=complex)
            if mat.shape != shape:
                raise ValueError(f"term {alpha} has shape {mat.shape}, expected {shape}")
            if not mat.any():
                continue
            if alpha in canon:
                mat = canon[alpha] + mat
                if not mat.any():
                    del canon[alpha]
                    continue
            mat = mat.copy()
            mat.flags.writeable = False
            canon[alpha] = mat
        object.__setattr__(self, "nvars", int(nvars))
        object.__setattr__(self, "shape", shape)
        object.__setattr__(self, "terms", canon)

    def __setattr__(self, name, value):
        raise AttributeError("ConstCoeffOperator is immutable")

    # -- basic structure -------------------------------------------------

    @property
    def rows(self):
        return self.shape[0]

    @property
    def cols(self):
        return self.shape[1]

    @property
    def order(self):
        """Highest total derivative order appearing (0 for the zero operator)."""
        return max((midx_order(a) for a in self.terms), default=0)

    def is_zero(self):
        return not self.terms

    def is_square(self):
        return self.shape[0] == self.shape[1]

    def time_order(self):
        """Highest power of D_t appearing."""
        return max((a[0] for a in self.terms), default=0)

    def coefficient(self, alpha):
        """Coefficient matrix of D^alpha (zero matrix if absent)."""
        alpha = tuple(int(a) for a in alpha)
        _check_multiindex(alpha, self.nvars)
        mat = self.terms.get(alpha)
        if mat is None:
            return np.zeros(self.shape, dtype=complex)
        return mat.copy()

    # -- algebra ----------------------------------------------------------

    def __add__(self, other):
        return op_add(self, other)

    def __sub__(self, other):
        return op_add(self, -other)

    def __neg__(self):
        return ConstCoeffOperator(
            self.nvars, self.shape, {a: -m for a, m in self.terms.items()}
        )

    def __mul__(self, scalar):
        scalar = complex(scalar)
        return ConstCoeffOperator(
            self.nvars, self.shape, {a: scalar * m for a, m in self.terms.items()}
        )

    __rmul__ = __mul__

    def __matmul__(self, other):
        return op_compose(self, other)

    def __eq__(self, other):
        if not isinstance(other, ConstCoeffOperator):
            return NotImplemented
        if self.nvars != other.nvars or self.shape != other.shape:
            return False
        if set(self.terms) != set(other.terms):
            return False
        return all(np.array_equal(self.terms[a], other.terms[a]) for a in self.terms)

    def __hash__(self):
        return hash(
            (self.nvars, self.shape, frozenset((a, m.tobytes()) for a, m in self.terms.items()))
        )

    def allclose(self, other, rtol=1e-12):
        """Tolerant equality for operators with inexact coefficients."""
        if self.nvars != other.nvars or self.shape != other.shape:
            return False
        scale = max(self.max_norm(), other.max_norm(), 1e-300)
        for alpha in set(self.terms) | set(other.terms):
            a = self.terms.get(alpha)
            b = other.terms.get(alpha)
            if a is None:
                a = np.zeros(self.shape)
            if b is None:
                b = np.zeros(self.shape)
            if np.max(np.abs(a - b)) > rtol * scale:
                return False
        return True

    def max_norm(self):
        return max((np.max(np.abs(m)) for m in self.terms.values()), default=0.0)

    # -- Fourier symbol ---------------------------------------------------

    def symbol(self, k):
        """Evaluate the symbol ``sum_a M_a (ik)^a`` at wavevector ``k``.

        ``k`` may be real or complex with ``nvars`` entries (slot 0 is the
        dual of time).  The symbol of a composition is the matrix product of
        the symbols.
        """
        k = np.asarray(k, dtype=complex)
        if k.shape != (self.nvars,):
            raise ValueError(f"wavevector must have {self.nvars} entries")
        ik = 1j * k
        out = np.zeros(self.shape, dtype=complex)
        for alpha, mat in self.terms.items():
            factor = 1.0 + 0j
            for e, z in zip(alpha, ik):
                if e:
                    factor *= z**e
            out += factor * mat
        return out

    def spatial_symbol(self, kspace, time_power):
        """Matrix coefficient of ``(d/dt)^time_power`` at spatial wavevector.

        Collects all terms with ``alpha[0] == time_power`` and evaluates the
        spatial part at ``kspace`` (length ``nvars - 1``).
        """
        kspace = np.asarray(kspace, dtype=complex)
        out = np.zeros(self.shape, dtype=complex)
        for alpha, mat in self.terms.items():
            if alpha[0] != time_power:
                continue
            factor = 1.0 + 0j
            for e, kj in zip(alpha[1:], kspace):
                if e:
                    factor *= (1j * kj) ** e
            out += factor * mat
        return out

    # -- display ----------------------------------------------------------

    def __repr__(self):
        from .dsl import format_operator

        return f"<ConstCoeffOperator {self.shape[0]}x{self.shape[1]}: {format_operator(self)}>"


def zero_operator(nvars, shape):
    return ConstCoeffOperator(nvars, shape, {})


def identity_operator(nvars, m):
    return ConstCoeffOperator(nvars, (m, m), {(0,) * nvars: np.eye(m)})


def op_add(L1, L2):
    """Termwise sum of two operators of equal shape."""
    if L1.nvars != L2.nvars:
        raise ValueError("operators act on different variable counts")
    if L1.shape != L2.shape:
        raise ValueError(f"shape mismatch: {L1.shape} vs {L2.shape}")
    terms = {a: m.copy() for a, m in L1.terms.items()}
    for alpha, mat in L2.terms.items():
        if alpha in terms:
            terms[alpha] = terms[alpha] + mat
        else:
            terms[alpha] = mat
    return ConstCoeffOperator(L1.nvars, L1.shape, terms)


def op_compose(L1, L2):
    """Composition ``L1 after L2``: multi-indices add, matrices multiply."""
    if L1.nvars != L2.nvars:
        raise ValueError("operators act on different variable counts")
    if L1.cols != L2.rows:
        raise ValueError(f"shape mismatch for composition: {L1.shape} o {L2.shape}")
    terms = {}
    for a1, m1 in L1.terms.items():
        for a2, m2 in L2.terms.items():
            alpha = midx_add(a1, a2)
            prod = m1 @ m2
            if alpha in terms:
                terms[alpha] = terms[alpha] + prod
            else:
                terms[alpha] = prod
    return ConstCoeffOperator(L1.nvars, (L1.rows, L2.cols), terms)


def op_commutator(L, G):
    """Commutator ``L o G - G o L`` of two square operators of equal shape."""
    if not (L.is_square() and G.is_square() and L.shape == G.shape):
        raise ValueError("commutator needs two square operators of equal shape")
    return op_compose(L, G) - op_compose(G, L)


def symbol_eval(L, k):
    """Functional form of :meth:`ConstCoeffOperator.symbol`."""
    return L.symbol(k)
