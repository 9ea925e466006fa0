"""Deciding or bounding defectivity of a family of configurations.

:func:`analyze` runs a fixed cascade of criteria and stops at the first one
that is conclusive:

1. Members that are not full-dimensional skip every interior-point criterion;
   for such families an interior lattice point says nothing.
2. Spanning, full-dimensional and ``k = n - 1``: the family is defective iff
   its mixed volume is 1.  Both mixed volume formulas are evaluated and must
   agree.
3. Spanning, full-dimensional and ``k <= n``: an interior lattice point of
   ``conv(A_0 + ... + A_k)`` rules out defectivity.
4. Not spanning (full-dimensional, ``k <= n``): the same test after
   translating each ``A_i`` by a point of itself, counting only interior
   points in the lattice ``Lambda`` spanned by the family.
5. ``k = 0``, spanning and full-dimensional: lattice width greater than 1
   rules out defectivity.  A defective spanning configuration projects onto a
   Cayley sum with at least two parts and thus onto a segment of length 1.
6. Bounded search for a projection whose image is a join-type Cayley sum,
   run on the Cayley sum of the family (which has the same defectivity when
   all members are full-dimensional) or on the single configuration when
   ``k = 0``.  A certificate proves defectivity.
7. Otherwise the verdict is ``Unknown``.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Sequence

from .cayley import (
    bounded_fi_search,
    certificate_from_dict,
    certificate_to_dict,
    verify_fi_certificate,
)
from .exceptions import InputError, PreconditionError
from .intlat import IntMatrix, Lattice, lattice_span
from .mixedvol import mixed_volume, mixed_volume_ilp
from .pointconfig import (
    Family,
    PointConfiguration,
    cayley_sum,
    difference_lattice,
    family_lattice,
    is_full_dimensional,
    is_isomorphic,
    is_spanning,
    minkowski_sum_all,
    standard_simplex,
)
from .polytope import (
    convex_hull,
    interior_lattice_points,
    vertices_of,
    width_along,
    width_certificate,
)


class Verdict(str, enum.Enum):
    DEFECTIVE = "Defective"
    NOT_DEFECTIVE = "NotDefective"
    UNKNOWN = "Unknown"


class Rule(str, enum.Enum):
    MIXED_VOLUME_ONE = "MixedVolumeOne"
    MIXED_VOLUME_GREATER = "MixedVolumeGreater"
    INTERIOR_POINT_FOUND = "InteriorPointFound"
    LATTICE_WIDTH_RULE = "LatticeWidthRule"
    SUBLATTICE_INTERIOR_POINT = "SublatticeInteriorPoint"
    FI_CERTIFICATE = "FICertificate"
    INSUFFICIENT_CRITERIA = "InsufficientCriteria"


@dataclass
class DefectReport:
    verdict: Verdict
    rule: Rule
    evidence: dict[str, Any] = field(default_factory=dict)
    simplex_family: bool = False
    criteria_attempted: list[str] = field(default_factory=list)
    notes: list[str] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "verdict": self.verdict.value,
            "rule": self.rule.value,
            "simplex_family": self.simplex_family,
            "evidence": self.evidence,
            "criteria_attempted": list(self.criteria_attempted),
            "notes": list(self.notes),
        }


def is_unimodular_simplex_family(f: Family) -> bool:
    """All members are translates of the vertex set of one unimodular simplex."""
    f.require_nonempty()
    n = f.ambient_dim
    shapes = set()
    for c in f:
        if len(c) != n + 1:
            return False
        p0 = c.points[0]
        shapes.add(c.translate(tuple(-x for x in p0)))
    if len(shapes) != 1:
        return False
    return is_isomorphic(shapes.pop(), standard_simplex(n))


def _sum_polytope(configs: Sequence[PointConfiguration], n: int):
    return vertices_of(minkowski_sum_all((vertices_of(c).as_config() for c in configs), n))


def lambda_interior_points(f: Family, basepoints: Sequence[Sequence[int]] | None = None) -> tuple[Lattice, list]:
    """``int(conv(sum (A_i - a_i))) cap Lambda`` for the given (default: first) basepoints."""
    f.require_nonempty()
    n = f.ambient_dim
    if basepoints is None:
        basepoints = [c.points[0] for c in f]
    if len(basepoints) != len(f):
        raise InputError("one basepoint per configuration is required")
    shifted = []
    for c, a in zip(f, basepoints):
        a = tuple(a)
        if a not in c:
            raise InputError(f"basepoint {a} is not a point of its configuration")
        shifted.append(c.translate(tuple(-x for x in a)))
    lam = family_lattice(f)
    pts = [x for x in interior_lattice_points(_sum_polytope(shifted, n)) if x in lam]
    return lam, pts


def check_interior_condition(f: Family, mode: str = "spanning",
                             basepoints: Sequence[Sequence[int]] | None = None,
                             require_full_dimensional: bool = False):
    """An interior witness violating the no-interior-point condition, or ``None``.

    ``mode="spanning"`` tests ``int(conv(A_0 + ... + A_k)) cap Z^n``.
    ``mode="lambda"`` tests ``int(conv((A_0 - a_0) + ... + (A_k - a_k))) cap Lambda``;
    the interior is taken of the convex hull of the translated Minkowski sum.

    The witness only bears on defectivity when every member is
    full-dimensional; pass ``require_full_dimensional=True`` to refuse other
    families instead of reporting a point that proves nothing.
    """
    f.require_nonempty()
    if require_full_dimensional:
        for i, c in enumerate(f):
            if not is_full_dimensional(c):
                raise PreconditionError(
                    f"the interior-point condition needs full-dimensional members; A_{i} is not")
    if mode == "spanning":
        pts = interior_lattice_points(_sum_polytope(list(f), f.ambient_dim))
        return pts[0] if pts else None
    if mode == "lambda":
        _, pts = lambda_interior_points(f, basepoints)
        return pts[0] if pts else None
    raise InputError(f"unknown mode {mode!r}")


def _fi_target(f: Family) -> tuple[PointConfiguration, dict]:
    """Configuration handed to the certificate search, in coordinates where it is spanning."""
    target = cayley_sum(f).config if f.k else f[0]
    frame = {"cayley_sum": f.k > 0, "base": None, "basis": None}
    lat = difference_lattice(target)
    if lat.is_full():
        return target, frame
    base = target.points[0]
    local = PointConfiguration(lat.rank, tuple(lat.coordinates(tuple(x - y for x, y in zip(p, base)))
                                               for p in target.points))
    frame["base"] = list(base)
    frame["basis"] = lat.basis.tolist()
    return local, frame


def _rebuild_fi_target(f: Family, frame: dict) -> PointConfiguration:
    target = cayley_sum(f).config if frame.get("cayley_sum") else f[0]
    if frame.get("basis") is None:
        return target
    base = tuple(frame["base"])
    basis = IntMatrix.from_rows(frame["basis"], cols=None if frame["basis"] else 0)
    lat = lattice_span(basis.columns(), target.ambient_dim)
    coords = []
    for p in target.points:
        z = lat.coordinates(tuple(x - y for x, y in zip(p, base)))
        if z is None:
            raise InputError("recorded coordinate lattice does not contain the configuration")
        coords.append(z)
    return PointConfiguration(lat.rank, tuple(coords))


def analyze(f: Family, fi_search: bool = True, fi_entry_bound: int = 1, fi_c_max: int = 1,
            lambda_mode: bool = False) -> DefectReport:
    """Decide or bound defectivity of ``f``; see the module docstring for the cascade."""
    for i, c in enumerate(f):
        if c.is_empty():
            raise InputError(f"configuration A_{i} is empty")
    n, k = f.ambient_dim, f.k
    full = all(is_full_dimensional(c) for c in f)
    spanning = is_spanning(f)
    attempted: list[str] = []
    ev: dict[str, Any] = {"n": n, "k": k, "spanning": spanning, "full_dimensional": full}
    notes: list[str] = []

    def report(verdict, rule, simplex=False):
        return DefectReport(verdict, rule, ev, simplex, attempted, notes)

    if not full:
        attempted.append("full-dimensionality gate: some member is lower-dimensional, "
                         "interior-point criteria do not apply")
    else:
        if spanning and k == n - 1:
            attempted.append("mixed volume equals 1 (spanning, full-dimensional, k = n - 1)")
            mv = mixed_volume(f)
            mv_ilp = mixed_volume_ilp(f)
            ev["mixed_volume"] = mv.to_dict()
            ev["mixed_volume_ilp"] = mv_ilp.to_dict()
            if mv.value != mv_ilp.value:
                raise AssertionError(f"mixed volume methods disagree: {mv.value} vs {mv_ilp.value}")
            if mv.value == 1:
                return report(Verdict.DEFECTIVE, Rule.MIXED_VOLUME_ONE,
                              is_unimodular_simplex_family(f))
            return report(Verdict.NOT_DEFECTIVE, Rule.MIXED_VOLUME_GREATER)
        if k <= n and spanning and not lambda_mode:
            attempted.append("interior lattice point of conv(A_0 + ... + A_k)")
            w = check_interior_condition(f, "spanning")
            if w is not None:
                ev["interior_witness"] = list(w)
                return report(Verdict.NOT_DEFECTIVE, Rule.INTERIOR_POINT_FOUND)
        if k <= n and (not spanning or lambda_mode):
            attempted.append("interior point in Lambda of conv(sum (A_i - a_i))")
            lam, pts = lambda_interior_points(f)
            ev["lambda_basis"] = lam.basis.tolist()
            ev["basepoints"] = [list(c.points[0]) for c in f]
            notes.append("interior is taken of the convex hull of the translated Minkowski sum")
            if pts:
                ev["interior_witness"] = list(pts[0])
                return report(Verdict.NOT_DEFECTIVE, Rule.SUBLATTICE_INTERIOR_POINT)
        if k > n:
            notes.append("k > n: interior-point criteria are stated for k <= n and were not applied")

    if k == 0 and full and spanning:
        attempted.append("lattice width > 1 for a single spanning full-dimensional configuration")
        wr = width_certificate(vertices_of(f[0]))
        ev["lattice_width"] = {"width": wr.width, "direction": list(wr.direction),
                               "search_bound": list(wr.search_bound),
                               "directions_tried": wr.directions_tried}
        if wr.width > 1:
            return report(Verdict.NOT_DEFECTIVE, Rule.LATTICE_WIDTH_RULE)

    if fi_search and (k == 0 or full):
        attempted.append(f"join-type Cayley projection search (entry bound {fi_entry_bound}, "
                         f"c <= {fi_c_max})")
        target, frame = _fi_target(f)
        res = bounded_fi_search(target, fi_entry_bound, fi_c_max)
        ev["fi_search"] = {"entry_bound": fi_entry_bound, "c_max": fi_c_max,
                           "kernels_tried": res.kernels_tried,
                           "partitions_tried": res.partitions_tried,
                           "found": res.found, "target": frame}
        if res.found:
            ev["fi_search"]["certificate"] = certificate_to_dict(res.certificate)
            return report(Verdict.DEFECTIVE, Rule.FI_CERTIFICATE)
        notes.append("no certificate within the search bounds; this does not prove non-defectivity")
    elif fi_search:
        attempted.append("join-type Cayley projection search on the Cayley sum (informational "
                         "only: the Cayley sum reduction needs full-dimensional members)")
        target, frame = _fi_target(f)
        res = bounded_fi_search(target, fi_entry_bound, fi_c_max)
        ev["fi_search_informational"] = {"entry_bound": fi_entry_bound, "c_max": fi_c_max,
                                         "found": res.found, "target": frame}
        if res.found:
            ev["fi_search_informational"]["certificate"] = certificate_to_dict(res.certificate)
            notes.append("the Cayley sum has a certificate, but it does not transfer to a family "
                         "with lower-dimensional members")

    return report(Verdict.UNKNOWN, Rule.INSUFFICIENT_CRITERIA)


def recheck(f: Family, report: dict) -> tuple[bool, list[str]]:
    """Replay the evidence of a serialized report against ``f`` without repeating searches."""
    msgs: list[str] = []
    verdict = report.get("verdict")
    rule = report.get("rule")
    ev = report.get("evidence", {})
    n = f.ambient_dim

    if rule in (Rule.MIXED_VOLUME_ONE.value, Rule.MIXED_VOLUME_GREATER.value):
        if not (is_spanning(f) and f.k == n - 1 and all(is_full_dimensional(c) for c in f)):
            msgs.append("mixed volume rule used outside its hypotheses")
        for key in ("mixed_volume", "mixed_volume_ilp"):
            mv = ev.get(key)
            if mv is None:
                msgs.append(f"{key} audit missing")
                continue
            total = sum(Fraction(t["sign"]) * Fraction(t["magnitude"]) for t in mv["terms"])
            if total != mv["value"]:
                msgs.append(f"{key} terms re-sum to {total}, not {mv['value']}")
        value = ev.get("mixed_volume", {}).get("value")
        if rule == Rule.MIXED_VOLUME_ONE.value and value != 1:
            msgs.append("MixedVolumeOne with mixed volume != 1")
        if rule == Rule.MIXED_VOLUME_GREATER.value and (value is None or value <= 1):
            msgs.append("MixedVolumeGreater without mixed volume > 1")
    elif rule == Rule.INTERIOR_POINT_FOUND.value:
        w = tuple(ev.get("interior_witness", ()))
        _, hp = convex_hull(_sum_polytope(list(f), n).as_config())
        if not (len(w) == n and hp.contains(w, strict=True)):
            msgs.append(f"witness {w} is not interior to conv(A_0 + ... + A_k)")
    elif rule == Rule.SUBLATTICE_INTERIOR_POINT.value:
        w = tuple(ev.get("interior_witness", ()))
        bps = [tuple(b) for b in ev.get("basepoints", [])]
        if len(bps) != len(f) or any(b not in c for b, c in zip(bps, f)):
            msgs.append("basepoints missing or not in their configurations")
        else:
            shifted = [c.translate(tuple(-x for x in b)) for c, b in zip(f, bps)]
            _, hp = convex_hull(_sum_polytope(shifted, n).as_config())
            if not (len(w) == n and hp.contains(w, strict=True)):
                msgs.append(f"witness {w} is not interior to the translated sum")
            if w not in family_lattice(f):
                msgs.append(f"witness {w} is not in Lambda")
    elif rule == Rule.LATTICE_WIDTH_RULE.value:
        lw = ev.get("lattice_width", {})
        p = vertices_of(f[0])
        if width_along(p, lw.get("direction", [0] * n)) != lw.get("width"):
            msgs.append("recorded direction does not realize the recorded width")
        redo = width_certificate(p)
        if redo.width != lw.get("width") or redo.width <= 1:
            msgs.append(f"width recomputes to {redo.width}")
    elif rule == Rule.FI_CERTIFICATE.value:
        fs = ev.get("fi_search", {})
        try:
            target = _rebuild_fi_target(f, fs.get("target", {}))
            cert = certificate_from_dict(target, fs["certificate"])
            check = verify_fi_certificate(target, cert)
            msgs.extend(check.failures)
        except (KeyError, InputError, PreconditionError) as exc:
            msgs.append(f"certificate does not replay: {exc}")
    elif rule == Rule.INSUFFICIENT_CRITERIA.value:
        if verdict != Verdict.UNKNOWN.value:
            msgs.append("InsufficientCriteria must come with an Unknown verdict")
        if not report.get("criteria_attempted"):
            msgs.append("Unknown verdict without the list of attempted criteria")
    else:
        msgs.append(f"unknown rule {rule!r}")

    expected = {
        Rule.MIXED_VOLUME_ONE.value: Verdict.DEFECTIVE.value,
        Rule.FI_CERTIFICATE.value: Verdict.DEFECTIVE.value,
        Rule.INSUFFICIENT_CRITERIA.value: Verdict.UNKNOWN.value,
    }.get(rule, Verdict.NOT_DEFECTIVE.value)
    if verdict != expected:
        msgs.append(f"rule {rule} cannot produce verdict {verdict}")
    return not msgs, msgs
