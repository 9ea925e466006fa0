"""Mixed volume of ``n`` configurations in ``Z^n`` by two independent formulas.

``mixed_volume`` polarizes the Euclidean volume::

    MV(P_0, ..., P_{n-1}) = sum over nonempty I of (-1)^(n - |I|) vol(sum_{i in I} P_i)

normalized so that ``n`` copies of the standard simplex give ``1`` (this is the
generic number of torus solutions of a sparse system with these supports).

``mixed_volume_ilp`` only counts interior lattice points::

    MV = 1 + sum over nonempty I of (-1)^(n - |I|) |int(conv(sum_{i in I} A_i)) cap Z^n|

which holds when every member is full-dimensional.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations

from .exceptions import PreconditionError
from .pointconfig import Family, PointConfiguration, is_full_dimensional, minkowski_sum_all
from .polytope import euclidean_volume, interior_lattice_points, vertices_of


class Method(str, enum.Enum):
    POLARIZATION = "Polarization"
    INTERIOR_LATTICE_POINTS = "InteriorLatticePoints"


@dataclass(frozen=True)
class MixedVolumeTerm:
    subset: tuple[int, ...]
    sign: int
    magnitude: Fraction


@dataclass(frozen=True)
class MixedVolumeResult:
    value: int
    method: Method
    terms: tuple[MixedVolumeTerm, ...]

    def resum(self) -> Fraction:
        return sum((t.sign * t.magnitude for t in self.terms), Fraction(0))

    def to_dict(self) -> dict:
        return {
            "value": self.value,
            "method": self.method.value,
            "terms": [{"subset": list(t.subset), "sign": t.sign, "magnitude": str(t.magnitude)}
                      for t in self.terms],
        }


def _check_shape(f: Family) -> None:
    f.require_nonempty()
    if len(f) != f.ambient_dim:
        raise PreconditionError(
            f"mixed volume needs exactly n = {f.ambient_dim} configurations, got {len(f)}")


def _subset_sum(f: Family, subset) -> PointConfiguration:
    # vertices suffice: conv(A + B) = conv(vert A + vert B)
    return minkowski_sum_all((vertices_of(f[i]).as_config() for i in subset), f.ambient_dim)


def mixed_volume(f: Family) -> MixedVolumeResult:
    _check_shape(f)
    n = f.ambient_dim
    terms = []
    for size in range(1, n + 1):
        for subset in combinations(range(n), size):
            vol = euclidean_volume(vertices_of(_subset_sum(f, subset)))
            terms.append(MixedVolumeTerm(subset, (-1) ** (n - size), vol))
    total = sum((t.sign * t.magnitude for t in terms), Fraction(0))
    if total.denominator != 1:
        raise AssertionError(f"non-integral mixed volume {total}")
    return MixedVolumeResult(int(total), Method.POLARIZATION, tuple(terms))


def mixed_volume_ilp(f: Family) -> MixedVolumeResult:
    _check_shape(f)
    n = f.ambient_dim
    for i, c in enumerate(f):
        if not is_full_dimensional(c):
            raise PreconditionError(
                f"the interior-point formula needs full-dimensional members; A_{i} is not")
    terms = [MixedVolumeTerm((), 1, Fraction(1))]
    for size in range(1, n + 1):
        for subset in combinations(range(n), size):
            count = len(interior_lattice_points(vertices_of(_subset_sum(f, subset))))
            terms.append(MixedVolumeTerm(subset, (-1) ** (n - size), Fraction(count)))
    total = sum((t.sign * t.magnitude for t in terms), Fraction(0))
    return MixedVolumeResult(int(total), Method.INTERIOR_LATTICE_POINTS, tuple(terms))
