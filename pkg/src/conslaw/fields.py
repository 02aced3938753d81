"""Exact closed-form fields: sums of polynomial x exponential terms.

Every term is ``c * t^p0 * x1^p1 ... * exp(lam*t) * exp(i k.x)`` attached to
one component.  The family is closed under differentiation, constant-matrix
application, coordinate multiplication, point reflections (with the time slot
reflecting as ``t -> s - t``), and complex conjugation, so operators and
symmetry chains act on it exactly.  This is the workhorse for kernel
construction and residual-free verification.
"""

from __future__ import annotations

from math import comb

import numpy as np

__all__ = ["AnalyticField", "plane_wave", "polynomial_field", "evolution_matrix", "kernel_sample"]


class AnalyticField:
    """Sum of polynomial-times-exponential terms on R^{n+1}.

    ``terms`` maps ``(i, pol, lam, k)`` to a complex coefficient where ``i``
    is the component, ``pol`` the monomial exponents over (t, x1..xn), ``lam``
    the time rate and ``k`` the spatial wavevector (tuple of floats).
    """

    __slots__ = ("nvars", "ncomp", "terms")

    def __init__(self, nvars, ncomp, terms=None):
        self.nvars = int(nvars)
        self.ncomp = int(ncomp)
        self.terms = {}
        if terms:
            for key, c in terms.items():
                if c != 0:
                    self.terms[key] = self.terms.get(key, 0.0) + complex(c)
        self.terms = {k: v for k, v in self.terms.items() if v != 0}

    # -- construction helpers ------------------------------------------

    def copy(self):
        return AnalyticField(self.nvars, self.ncomp, dict(self.terms))

    def _like(self, terms):
        return AnalyticField(self.nvars, self.ncomp, terms)

    def __add__(self, other):
        if other.nvars != self.nvars or other.ncomp != self.ncomp:
            raise ValueError("field shape mismatch")
        terms = dict(self.terms)
        for key, c in other.terms.items():
            terms[key] = terms.get(key, 0.0) + c
        return self._like(terms)

    def __sub__(self, other):
        return self + (other * (-1.0))

    def __mul__(self, scalar):
        scalar = complex(scalar)
        return self._like({key: scalar * c for key, c in self.terms.items()})

    __rmul__ = __mul__

    def is_zero(self):
        return not self.terms

    def max_coeff(self):
        return max((abs(c) for c in self.terms.values()), default=0.0)

    # -- calculus --------------------------------------------------------

    def diff(self, slot):
        """Partial derivative along variable ``slot`` (0 = time)."""
        terms = {}

        def put(key, c):
            if c != 0:
                terms[key] = terms.get(key, 0.0) + c

        for (i, pol, lam, k), c in self.terms.items():
            e = pol[slot]
            if e:
                newpol = pol[:slot] + (e - 1,) + pol[slot + 1 :]
                put((i, newpol, lam, k), e * c)
            rate = lam if slot == 0 else 1j * k[slot - 1]
            put((i, pol, lam, k), rate * c)
        return self._like(terms)

    def diff_multi(self, alpha):
        out = self
        for slot, e in enumerate(alpha):
            for _ in range(e):
                out = out.diff(slot)
        return out

    def apply_matrix(self, mat):
        mat = np.asarray(mat, dtype=complex)
        if mat.shape[1] != self.ncomp:
            raise ValueError("matrix does not fit field components")
        terms = {}
        for (i, pol, lam, k), c in self.terms.items():
            for r in range(mat.shape[0]):
                m = mat[r, i]
                if m != 0:
                    key = (r, pol, lam, k)
                    terms[key] = terms.get(key, 0.0) + m * c
        return AnalyticField(self.nvars, mat.shape[0], terms)

    def apply_operator(self, L):
        if L.nvars != self.nvars or L.cols != self.ncomp:
            raise ValueError("operator does not fit field")
        out = AnalyticField(self.nvars, L.rows, {})
        for alpha, mat in L.terms.items():
            out = out + self.diff_multi(alpha).apply_matrix(mat)
        return out

    def multiply_coordinate(self, slot):
        """Multiply by the coordinate of variable ``slot``."""
        terms = {}
        for (i, pol, lam, k), c in self.terms.items():
            newpol = pol[:slot] + (pol[slot] + 1,) + pol[slot + 1 :]
            terms[(i, newpol, lam, k)] = terms.get((i, newpol, lam, k), 0.0) + c
        return self._like(terms)

    def point_reflect(self, mask, s=0.0):
        """Compose with the reflection of masked variables; time uses t -> s - t."""
        terms = {}

        def put(key, c):
            if c != 0:
                terms[key] = terms.get(key, 0.0) + c

        for (i, pol, lam, k), c in self.terms.items():
            newk = tuple(-kj if mask[d + 1] else kj for d, kj in enumerate(k))
            sign = 1.0
            for d in range(1, self.nvars):
                if mask[d] and pol[d] % 2:
                    sign = -sign
            base = sign * c
            if mask[0]:
                # t^a exp(lam t) -> (s-t)^a exp(lam s) exp(-lam t)
                a = pol[0]
                amp = base * np.exp(lam * s)
                for r in range(a + 1):
                    cc = amp * comb(a, r) * (s ** (a - r)) * ((-1.0) ** r)
                    put((i, (r,) + pol[1:], -lam, newk), cc)
            else:
                put((i, pol, lam, newk), base)
        return self._like(terms)

    def conjugate(self):
        terms = {}
        for (i, pol, lam, k), c in self.terms.items():
            key = (i, pol, np.conj(lam), tuple(-kj for kj in k))
            terms[key] = terms.get(key, 0.0) + np.conj(c)
        return self._like(terms)

    # -- evaluation --------------------------------------------------------

    def evaluate(self, t, points):
        """Values at time ``t`` on spatial ``points`` of shape (npts, n)."""
        points = np.atleast_2d(np.asarray(points, dtype=float))
        npts = points.shape[0]
        out = np.zeros((self.ncomp, npts), dtype=complex)
        for (i, pol, lam, k), c in self.terms.items():
            val = c * (t ** pol[0]) * np.exp(lam * t)
            mono = np.ones(npts, dtype=complex)
            for d in range(1, self.nvars):
                if pol[d]:
                    mono = mono * points[:, d - 1] ** pol[d]
            phase = np.exp(1j * points @ np.asarray(k, dtype=float))
            out[i] += val * mono * phase
        return out

    def __repr__(self):
        return f"<AnalyticField {self.ncomp} comps, {len(self.terms)} terms>"


def plane_wave(nvars, vector, lam, kspace):
    """Field ``v * exp(lam t + i k.x)`` for a complex amplitude vector."""
    vector = np.asarray(vector, dtype=complex)
    pol = (0,) * nvars
    k = tuple(float(kj) for kj in kspace)
    terms = {
        (i, pol, complex(lam), k): vector[i] for i in range(len(vector)) if vector[i] != 0
    }
    return AnalyticField(nvars, len(vector), terms)


def polynomial_field(nvars, ncomp, comp_polys):
    """Static polynomial field; ``comp_polys[i]`` maps exponent tuple -> coeff."""
    terms = {}
    k = (0.0,) * (nvars - 1)
    for i, poly in enumerate(comp_polys):
        for pol, c in poly.items():
            if c != 0:
                terms[(i, tuple(pol), 0j, k)] = complex(c)
    return AnalyticField(nvars, ncomp, terms)


def evolution_matrix(L, kspace, cond_limit=1e12):
    """Companion matrix A(k) of the first-order system for one spatial mode.

    For ``L = sum_r C_r(Dx) Dt^r`` the per-mode ODE is
    ``sum_r C_r(k) y^(r) = 0``; the returned block-companion A acts on the
    stacked state ``(y, y', ..., y^(R-1))``.  Requires the leading time
    coefficient ``C_R(k)`` to be invertible.
    """
    m = L.cols
    if not L.is_square():
        raise ValueError("evolution form needs a square operator")
    R = L.time_order()
    if R == 0:
        raise ValueError("operator has no time derivative; no evolution form")
    C = [L.spatial_symbol(kspace, r) for r in range(R + 1)]
    lead = C[R]
    if np.linalg.cond(lead) > cond_limit:
        raise ValueError(f"leading time coefficient is singular at k={tuple(kspace)}")
    lead_inv = np.linalg.inv(lead)
    A = np.zeros((m * R, m * R), dtype=complex)
    for r in range(R - 1):
        A[r * m : (r + 1) * m, (r + 1) * m : (r + 2) * m] = np.eye(m)
    for r in range(R):
        A[(R - 1) * m :, r * m : (r + 1) * m] = -lead_inv @ C[r]
    return A


def kernel_sample(L, kspace, tol=1e-8):
    """Exact plane-wave kernel elements of ``L`` at one spatial wavevector.

    Solves the per-mode dispersion via the companion matrix and returns one
    field ``v exp(lam t + i k.x)`` per eigenpair (defective modes contribute
    only their genuine eigenvectors).  Raises when nothing is found.
    """
    m = L.cols
    kspace = tuple(float(kj) for kj in kspace)
    A = evolution_matrix(L, kspace)
    lams, vecs = np.linalg.eig(A)
    out = []
    scale = max(np.linalg.norm(A), 1.0)
    for lam, w in zip(lams, vecs.T):
        v = w[:m]
        nv = np.linalg.norm(v)
        if nv < 1e-12:
            continue
        v = v / nv
        # residual of the matrix polynomial at this rate
        acc = np.zeros(m, dtype=complex)
        for r in range(L.time_order() + 1):
            acc = acc + L.spatial_symbol(kspace, r) @ v * lam**r
        if np.linalg.norm(acc) <= tol * max(scale, abs(lam) ** L.time_order()):
            out.append(plane_wave(L.nvars, v, lam, kspace))
    if not out:
        raise ValueError(f"no plane-wave kernel elements at k={kspace}")
    return out
