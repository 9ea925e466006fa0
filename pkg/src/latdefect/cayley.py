"""Cayley decompositions, join type and defectivity certificates.

Deciding whether a partition ``A = P_0 u ... u P_k`` comes from a lattice
projection ``pi : Z^n -> Z^k`` with ``pi(P_i) = {e_i}`` reduces to integer
linear algebra.  Fix basepoints ``b_i`` in ``P_i`` and let
``D = sum_i <P_i - P_i>``.  Any such ``pi`` kills ``D``, hence (the target
being torsion-free) its saturation ``L``, so it factors as ``u o q`` with
``q : Z^n -> Z^n / L`` the quotient map.  The remaining condition
``u(q(b_i - b_0)) = e_i`` has an integer solution ``u`` exactly when the
vectors ``q(b_i - b_0)`` form a primitive system, and then ``u`` is a left
inverse of that system and ``pi`` is automatically surjective.

Detection enumerates candidate parts among faces ``F`` of ``A`` whose
complement is also a face, since ``P_i`` and its complement are preimages of
faces of the simplex.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations, product
from typing import Iterator, Sequence

from .exceptions import InputError, PreconditionError
from .intlat import (
    IntMatrix,
    LatticeProjection,
    complete_to_unimodular,
    is_primitive_system,
    lattice_span,
    left_inverse,
    quotient_projection,
    saturation,
)
from .pointconfig import (
    Face,
    Family,
    PointConfiguration,
    dimension,
    face_from_normal,
    faces,
    family_lattice,
    is_spanning,
)
from .polytope import project_config


@dataclass(frozen=True)
class CayleyStructure:
    """Parts ``F_0, ..., F_k`` of ``parent`` with ``projection(F_i) = {e_i}``."""

    parent: PointConfiguration
    parts: tuple[PointConfiguration, ...]
    projection: LatticeProjection

    @property
    def k(self) -> int:
        return len(self.parts) - 1


@dataclass(frozen=True)
class RestrictedStructure:
    face: Face
    parts: tuple[PointConfiguration, ...]
    projection: LatticeProjection
    empty_parts: tuple[int, ...]


@dataclass(frozen=True)
class FICertificate:
    """Projection of codimension ``c`` whose image is a join-type Cayley sum of ``r + 1`` parts."""

    c: int
    r: int
    projection: LatticeProjection
    structure: CayleyStructure


@dataclass
class CertificateCheck:
    valid: bool
    failures: list[str] = field(default_factory=list)

    def __bool__(self) -> bool:
        return self.valid


@dataclass
class FISearchResult:
    certificate: FICertificate | None
    entry_bound: int
    c_max: int
    kernels_tried: int = 0
    partitions_tried: int = 0

    @property
    def found(self) -> bool:
        return self.certificate is not None


def _vertex(i: int, k: int) -> tuple[int, ...]:
    return tuple(int(j == i - 1) for j in range(k))


def _check_partition(a: PointConfiguration, parts: Sequence[PointConfiguration]) -> None:
    if not parts:
        raise InputError("a partition needs at least one part")
    seen = set()
    for i, p in enumerate(parts):
        if p.ambient_dim != a.ambient_dim:
            raise InputError(f"part {i} lives in Z^{p.ambient_dim}, not Z^{a.ambient_dim}")
        if p.is_empty():
            raise InputError(f"part {i} is empty")
        for x in p.points:
            if x not in a:
                raise InputError(f"part {i} contains {x}, which is not in the configuration")
            if x in seen:
                raise InputError(f"point {x} appears in two parts")
            seen.add(x)
    if len(seen) != len(a):
        raise InputError("parts do not cover the configuration")


def verify_cayley_partition(a: PointConfiguration,
                            parts: Sequence[PointConfiguration]) -> LatticeProjection | None:
    """Lattice projection sending part ``i`` to ``e_i`` (``e_0 = 0``), or ``None``."""
    _check_partition(a, parts)
    n, k = a.ambient_dim, len(parts) - 1
    bases = [p.points[0] for p in parts]
    diffs = [tuple(x - y for x, y in zip(q, b)) for p, b in zip(parts, bases) for q in p.points]
    sat = saturation(lattice_span(diffs, n))
    q = quotient_projection(sat)
    m = q.target_dim
    if k > m:
        return None
    offsets = [q(tuple(x - y for x, y in zip(b, bases[0]))) for b in bases[1:]]
    cmat = IntMatrix.from_columns(offsets, m)
    if k and not is_primitive_system(cmat):
        return None
    u = left_inverse(cmat) if k else IntMatrix.zeros(0, m)
    return LatticeProjection(u @ q.matrix, bases[0])


def _candidate_parts(a: PointConfiguration) -> list[frozenset]:
    everything = frozenset(a.points)
    sets = {frozenset(F.points.points) for F in faces(a)}
    cands = [s for s in sets if s != everything and (everything - s) in sets]
    cands.sort(key=lambda s: (min(s), sorted(s)))
    return cands


def iter_cayley_decompositions(a: PointConfiguration, k: int,
                               stats: dict | None = None) -> Iterator[CayleyStructure]:
    """All Cayley structures of ``a`` with ``k + 1`` parts, parts ordered by smallest point."""
    if k < 1:
        raise PreconditionError("Cayley detection needs k >= 1")
    if len(a) < k + 1:
        raise PreconditionError(f"{len(a)} points cannot form {k + 1} non-empty parts")
    cands = _candidate_parts(a)
    n = a.ambient_dim

    def rec(remaining: frozenset, chosen: list):
        if len(chosen) == k + 1:
            if not remaining:
                yield chosen
            return
        if len(remaining) < k + 1 - len(chosen):
            return
        p = min(remaining)
        last = len(chosen) == k
        for s in cands:
            if p in s and s <= remaining and (not last or s == remaining):
                yield from rec(remaining - s, chosen + [s])

    for chosen in rec(frozenset(a.points), []):
        if stats is not None:
            stats["partitions"] = stats.get("partitions", 0) + 1
        parts = tuple(PointConfiguration(n, tuple(s)) for s in chosen)
        proj = verify_cayley_partition(a, parts)
        if proj is not None:
            yield CayleyStructure(a, parts, proj)


def detect_cayley_decomposition(a: PointConfiguration, k: int) -> CayleyStructure | None:
    return next(iter_cayley_decompositions(a, k), None)


def summands(s: CayleyStructure) -> list[PointConfiguration]:
    """Configurations ``B_i`` in ``Z^(n-k)`` with ``parent`` isomorphic to ``B_0 * ... * B_k``.

    ``x -> (Q (x - b), projection(x))`` is unimodular for the completion ``Q``
    of the projection matrix, and carries part ``i`` onto ``B_i x {e_i}``.
    """
    q = complete_to_unimodular(s.projection.matrix)
    base = s.projection.basepoint
    return [PointConfiguration(q.rows, tuple(q @ tuple(x - y for x, y in zip(p, base))
                                             for p in part.points))
            for part in s.parts]


def is_join_type(f: Family) -> bool:
    """Dimensions of the summands add up to the dimension of their Minkowski sum."""
    f.require_nonempty()
    return sum(dimension(c) for c in f) == family_lattice(f).rank


def face_restrict(s: CayleyStructure, face: Face) -> RestrictedStructure:
    if face.parent != s.parent:
        raise InputError("face does not belong to the decomposed configuration")
    if face_from_normal(s.parent, face.normal).points != face.points:
        raise InputError("face points are not the maximizers of its normal")
    n = s.parent.ambient_dim
    parts = tuple(PointConfiguration(n, tuple(p for p in part.points if p in face.points))
                  for part in s.parts)
    empty = tuple(i for i, p in enumerate(parts) if p.is_empty())
    return RestrictedStructure(face, parts, s.projection, empty)


def _require_spanning(a: PointConfiguration) -> None:
    if a.is_empty() or not is_spanning(Family((a,))):
        raise PreconditionError("projection certificates apply to spanning configurations only")


def verify_fi_certificate(a: PointConfiguration, cert: FICertificate) -> CertificateCheck:
    _require_spanning(a)
    fails = []
    n = a.ambient_dim
    if cert.c < 0:
        fails.append(f"c = {cert.c} is negative")
    if not cert.c < cert.r:
        fails.append(f"c = {cert.c} is not smaller than r = {cert.r}")
    pi = cert.projection
    if pi.source_dim != n or pi.target_dim != n - cert.c:
        fails.append(f"projection goes Z^{pi.source_dim} -> Z^{pi.target_dim}, "
                     f"expected Z^{n} -> Z^{n - cert.c}")
        return CertificateCheck(False, fails)
    image = project_config(a, pi)
    s = cert.structure
    if s.parent != image:
        fails.append("structure is not a decomposition of the projected configuration")
        return CertificateCheck(False, fails)
    if len(s.parts) != cert.r + 1:
        fails.append(f"structure has {len(s.parts)} parts, expected r + 1 = {cert.r + 1}")
    if any(p.is_empty() for p in s.parts):
        fails.append("some part is empty")
        return CertificateCheck(False, fails)
    try:
        proj = verify_cayley_partition(image, s.parts)
    except InputError as exc:
        fails.append(f"parts are not a partition: {exc}")
        return CertificateCheck(False, fails)
    if proj is None:
        fails.append("no lattice projection maps the parts onto the simplex vertices")
        return CertificateCheck(False, fails)
    kk = s.k
    if s.projection.source_dim != image.ambient_dim or s.projection.target_dim != kk or any(
            s.projection(p) != _vertex(i, kk) for i, part in enumerate(s.parts) for p in part.points):
        fails.append("the structure's own projection does not send part i to e_i")
    if not is_join_type(Family(tuple(summands(s)))):
        fails.append("the recovered Cayley summands are not of join type")
    return CertificateCheck(not fails, fails)


def _saturated_kernels(n: int, c: int, bound: int) -> Iterator:
    if c == 0:
        yield lattice_span([], n)
        return
    vecs = []
    for v in product(range(-bound, bound + 1), repeat=n):
        lead = next((x for x in v if x), 0)
        if lead > 0:
            vecs.append(v)
    seen = set()
    for combo in combinations(vecs, c):
        k = saturation(lattice_span(combo, n))
        if k.rank != c or k in seen:
            continue
        seen.add(k)
        yield k


def bounded_fi_search(a: PointConfiguration, entry_bound: int = 1, c_max: int = 1) -> FISearchResult:
    """Look for a certificate among projections whose kernel has a generating set in ``[-B, B]^n``.

    Projections with the same kernel differ by an automorphism of the target,
    which does not affect the criterion, so kernels are enumerated instead of
    matrices.  Within each ``c``, ``r`` runs from its largest feasible value
    down.  A negative result only means nothing was found in this box.
    """
    _require_spanning(a)
    n = a.ambient_dim
    res = FISearchResult(None, entry_bound, c_max)
    stats: dict = {}
    for c in range(0, min(c_max, n) + 1):
        for ker in _saturated_kernels(n, c, entry_bound):
            res.kernels_tried += 1
            pi = quotient_projection(ker)
            image = project_config(a, pi)
            top = min(dimension(image), len(image) - 1)
            for r in range(top, c, -1):
                for s in iter_cayley_decompositions(image, r, stats):
                    if is_join_type(Family(tuple(summands(s)))):
                        res.partitions_tried = stats.get("partitions", 0)
                        res.certificate = FICertificate(c, r, pi, s)
                        return res
    res.partitions_tried = stats.get("partitions", 0)
    return res


# ---------------------------------------------------------------------------
# Serialization
# ---------------------------------------------------------------------------

def certificate_to_dict(cert: FICertificate) -> dict:
    return {
        "c": cert.c,
        "r": cert.r,
        "projection": {"matrix": cert.projection.matrix.tolist(),
                       "basepoint": list(cert.projection.basepoint)},
        "parts": [part.tolist() for part in cert.structure.parts],
    }


def certificate_from_dict(a: PointConfiguration, doc: dict) -> FICertificate:
    """Rebuild a certificate for ``a``; the structure projection is re-derived from the parts."""
    try:
        c, r = int(doc["c"]), int(doc["r"])
        pdoc = doc["projection"]
        matrix = IntMatrix.from_rows(pdoc["matrix"], cols=a.ambient_dim)
        pi = LatticeProjection(matrix, tuple(pdoc.get("basepoint") or (0,) * a.ambient_dim))
        m = pi.target_dim
        parts = tuple(PointConfiguration(m, tuple(tuple(p) for p in part)) for part in doc["parts"])
    except (KeyError, TypeError) as exc:
        raise InputError(f"malformed certificate: {exc}") from exc
    image = project_config(a, pi)
    try:
        proj = verify_cayley_partition(image, parts)
    except InputError:
        proj = None
    if proj is None:
        # keep the claimed parts; verification will report the failure
        proj = LatticeProjection(IntMatrix.zeros(0, m))
    return FICertificate(c, r, pi, CayleyStructure(image, parts, proj))
