"""Independent brute-force checks used to validate the exact code.

``ehrhart_volume`` recovers the normalized volume from lattice point counts of
dilates.  ``witness_search`` looks numerically for a non-degenerate multiple
root of a small sparse system: a common zero ``u`` of ``f_0, ..., f_k`` at
which the gradients are linearly dependent while any ``k`` of them are
independent.  ``separable_impossibility`` is the structural argument that rules
such roots out when the supports live in disjoint coordinate blocks.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from math import factorial
from typing import Sequence

import numpy as np

from .exceptions import InputError, PreconditionError
from .pointconfig import Family
from .polytope import VPolytope, dilate, lattice_points

TOL = 1e-9
RANK_TOL = 1e-6


def ehrhart_volume(p: VPolytope) -> int:
    """Normalized volume from ``|tP cap Z^n|`` for ``t = 0..n`` by exact interpolation."""
    n = p.ambient_dim
    if not p.vertices:
        return 0
    counts = [len(lattice_points(dilate(p, t))) if t else 1 for t in range(n + 1)]
    # leading coefficient of the interpolating polynomial is the n-th divided difference
    lead = Fraction(0)
    for t, y in enumerate(counts):
        denom = 1
        for s in range(n + 1):
            if s != t:
                denom *= t - s
        lead += Fraction(y, denom)
    vol = lead * factorial(n)
    if vol.denominator != 1:
        raise AssertionError(f"non-integral normalized volume {vol}")
    return int(vol)


@dataclass(frozen=True)
class SparseSystem:
    """Polynomials ``f_i = sum_{a in A_i} c_{i,a} x^a`` with coefficients in the order of ``A_i.points``."""

    supports: Family
    coefficients: tuple[tuple[complex, ...], ...]

    def __post_init__(self):
        if len(self.coefficients) != len(self.supports):
            raise InputError("one coefficient list per support is required")
        for i, (c, cs) in enumerate(zip(self.supports, self.coefficients)):
            if len(cs) != len(c):
                raise InputError(f"support A_{i} has {len(c)} points but {len(cs)} coefficients")
            if any(z == 0 for z in cs):
                raise InputError(f"coefficients of f_{i} must be nonzero")

    @classmethod
    def of(cls, supports: Family, coefficients: Sequence[Sequence[complex]]) -> SparseSystem:
        return cls(supports, tuple(tuple(complex(z) for z in cs) for cs in coefficients))

    @classmethod
    def from_polynomials(cls, n: int, polys: Sequence[dict]) -> SparseSystem:
        """Build from ``[{exponent tuple: coefficient}, ...]``."""
        supports = Family.of(*[list(p) for p in polys])
        coeffs = []
        for c, p in zip(supports, polys):
            lookup = {tuple(a): z for a, z in p.items()}
            coeffs.append([lookup[a] for a in c.points])
        return cls.of(supports, coeffs)

    @property
    def n(self) -> int:
        return self.supports.ambient_dim

    def evaluate(self, u: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """Values ``f_i(u)`` and the gradient matrix (rows ``grad f_i``)."""
        vals, grads = _evaluate(self._arrays(), np.asarray(u, dtype=complex)[None, :])
        return vals[0], grads[0]

    def _arrays(self):
        return [(np.array(c.points, dtype=float).reshape(len(c), self.n), np.array(cs))
                for c, cs in zip(self.supports, self.coefficients)]


@dataclass(frozen=True)
class RootWitness:
    u: tuple[complex, ...]
    residuals: tuple[float, ...]
    dependence_certificate: tuple[complex, ...]
    dependence_residual: float
    subrank_checks: tuple[float, ...]

    def to_dict(self) -> dict:
        def cx(z):
            return [z.real, z.imag]
        return {
            "u": [cx(z) for z in self.u],
            "residuals": list(self.residuals),
            "dependence_certificate": [cx(z) for z in self.dependence_certificate],
            "dependence_residual": self.dependence_residual,
            "subrank_checks": list(self.subrank_checks),
        }


def _evaluate(arrays, u: np.ndarray):
    """Batched values ``(B, m)`` and gradients ``(B, m, n)`` at points ``u`` of shape ``(B, n)``."""
    b, n = u.shape
    vals = np.empty((b, len(arrays)), dtype=complex)
    grads = np.empty((b, len(arrays), n), dtype=complex)
    for i, (exps, coeffs) in enumerate(arrays):
        mono = np.prod(u[:, None, :] ** exps[None, :, :], axis=2)  # (B, |A_i|)
        vals[:, i] = mono @ coeffs
        # d/dx_j x^a = a_j x^a / x_j
        grads[:, i, :] = np.einsum("ba,a,aj->bj", mono, coeffs, exps) / u
    return vals, grads


def _second_derivatives(arrays, u: np.ndarray):
    """Hessians ``(B, m, n, n)``."""
    b, n = u.shape
    out = np.empty((b, len(arrays), n, n), dtype=complex)
    for i, (exps, coeffs) in enumerate(arrays):
        mono = np.prod(u[:, None, :] ** exps[None, :, :], axis=2)
        ajk = exps[:, :, None] * exps[:, None, :] - np.einsum("aj,jk->ajk", exps, np.eye(n))
        out[:, i] = np.einsum("ba,a,ajk->bjk", mono, coeffs, ajk) / (u[:, :, None] * u[:, None, :])
    return out


def _augmented(arrays, z: np.ndarray, xi: np.ndarray, n: int, m: int):
    """Residual and Jacobian of ``f(u) = 0, grad(f)^T lam = 0, xi . lam = 1`` in ``z = (u, lam)``."""
    u, lam = z[:, :n], z[:, n:]
    vals, grads = _evaluate(arrays, u)
    hess = _second_derivatives(arrays, u)
    dep = np.einsum("bij,bi->bj", grads, lam)
    norm = lam @ xi - 1.0
    res = np.concatenate([vals, dep, norm[:, None]], axis=1)
    b = z.shape[0]
    jac = np.zeros((b, m + n + 1, n + m), dtype=complex)
    jac[:, :m, :n] = grads
    jac[:, m:m + n, :n] = np.einsum("bijk,bi->bjk", hess, lam)
    jac[:, m:m + n, n:] = np.transpose(grads, (0, 2, 1))
    jac[:, m + n, n:] = xi
    return res, jac


def _newton(arrays, z, xi, n, m, steps):
    # Gauss-Newton: the augmented system has one more equation than unknowns
    for _ in range(steps):
        res, jac = _augmented(arrays, z, xi, n, m)
        jh = np.conj(np.transpose(jac, (0, 2, 1)))
        normal = jh @ jac + 1e-14 * np.eye(n + m)
        z = z - np.linalg.solve(normal, jh @ res[:, :, None])[:, :, 0]
        z[~np.isfinite(z).all(axis=1)] = 1.0
    return z


def _accept(s: SparseSystem, arrays, z, tol: float, rank_tol: float) -> RootWitness | None:
    n, m = s.n, len(s.supports)
    u, lam = z[:n], z[n:]
    if not np.all(np.isfinite(z)) or np.min(np.abs(u)) < 1e-6 or np.max(np.abs(u)) > 1e6:
        return None
    vals, grads = _evaluate(arrays, u[None, :])
    vals, grads = vals[0], grads[0]
    scale = np.linalg.norm(lam)
    if scale == 0:
        return None
    lam = lam / scale
    dep_res = float(np.linalg.norm(grads.T @ lam))
    if np.max(np.abs(vals)) > tol or dep_res > tol:
        return None
    k = m - 1
    sub = []
    for idx in combinations(range(m), k) if k else ():
        sv = np.linalg.svd(grads[list(idx)], compute_uv=False)
        sub.append(float(sv[-1]))
    if any(x < rank_tol for x in sub):
        return None
    return RootWitness(tuple(complex(x) for x in u), tuple(float(abs(v)) for v in vals),
                       tuple(complex(x) for x in lam), dep_res, tuple(sub))


def witness_search(s: SparseSystem, samples: int = 1000, seed: int = 0, steps: int = 40,
                   tol: float = TOL, rank_tol: float = RANK_TOL) -> RootWitness | None:
    """Seeded randomized search for a non-degenerate multiple root.

    Returns the first accepted witness or ``None``.  ``None`` is probabilistic
    evidence only.  Candidates must pass again at ``tol / 2`` after five more
    Newton steps.
    """
    n, m = s.n, len(s.supports)
    if n > 2 or m > 3 or sum(len(c) for c in s.supports) > 12:
        raise PreconditionError("witness search is limited to n <= 2, k <= 2 and at most 12 monomials")
    if samples < 1:
        raise InputError("samples must be positive")
    rng = np.random.default_rng(seed)
    arrays = s._arrays()
    u0 = np.exp(rng.uniform(-1.0, 1.0, (samples, n)) + 1j * rng.uniform(-np.pi, np.pi, (samples, n)))
    lam0 = rng.normal(size=(samples, m)) + 1j * rng.normal(size=(samples, m))
    xi = rng.normal(size=m) + 1j * rng.normal(size=m)
    lam0 = lam0 / (lam0 @ xi)[:, None]
    with np.errstate(all="ignore"):
        z = _newton(arrays, np.concatenate([u0, lam0], axis=1), xi, n, m, steps)
        res, _ = _augmented(arrays, z, xi, n, m)
        # cheap batch filter before the per-candidate checks
        close = np.nan_to_num(np.abs(res).max(axis=1), nan=np.inf) < 1e3 * tol
        for row in z[close]:
            if _accept(s, arrays, row, tol, rank_tol) is None:
                continue
            refined = _newton(arrays, row[None, :].copy(), xi, n, m, 5)[0]
            w = _accept(s, arrays, refined, tol / 2, rank_tol)
            if w is not None:
                return w
    return None


def separable_impossibility(f: Family) -> bool:
    """True when each ``A_i`` varies only in its own block of coordinates, disjoint from the others.

    Then the gradients lie in independent coordinate subspaces, so a linear
    dependence forces some gradient to vanish and no non-degenerate multiple
    root exists for any coefficients.
    """
    f.require_nonempty()
    if f.k == 0:
        raise PreconditionError("the independence clause is vacuous for a single configuration")
    blocks = []
    for c in f:
        p0 = c.points[0]
        blocks.append({j for p in c.points for j in range(f.ambient_dim) if p[j] != p0[j]})
    for a, b in combinations(blocks, 2):
        if a & b:
            return False
    return True
