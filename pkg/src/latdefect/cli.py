"""Command line interface: JSON configurations in, JSON reports out.

Input documents look like::

    {"ambient_dim": 2,
     "configurations": [{"points": [[0, 0], [1, 0], [2, 0]], "label": "A0"},
                        {"points": [[0, 0], [0, 1], [0, 2]]}]}

and may carry a ``certificate`` (for ``fi-verify``) or ``coefficients`` (for
``oracle-witness``).  Exit codes: 0 ran, 1 input error, 2 the input is outside
the hypotheses of the requested computation, 3 a ``--recheck`` failed.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import sys
import time
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Sequence

from . import __version__
from .cayley import (
    bounded_fi_search,
    certificate_from_dict,
    certificate_to_dict,
    detect_cayley_decomposition,
    is_join_type,
    summands,
    verify_cayley_partition,
    verify_fi_certificate,
)
from .defect import analyze, lambda_interior_points, recheck
from .exceptions import InputError, PreconditionError
from .intlat import Lattice
from .mixedvol import mixed_volume, mixed_volume_ilp
from .oracle import SparseSystem, ehrhart_volume, separable_impossibility, witness_search
from .pointconfig import (
    Family,
    PointConfiguration,
    cayley_sum,
    dimension,
    family_lattice,
    is_full_dimensional,
    is_spanning,
    minkowski_sum_all,
)
from .polytope import (
    codegree,
    convex_hull,
    interior_lattice_points,
    normalized_volume,
    vertices_of,
    width_along,
    width_certificate,
)

COMMANDS = (
    "spanning", "mixed-volume", "interior-points", "codegree", "width", "cayley-sum",
    "cayley-detect", "join-type", "fi-verify", "fi-search", "defective", "oracle-ehrhart",
    "oracle-witness",
)

EXIT_OK, EXIT_INPUT, EXIT_PRECONDITION, EXIT_RECHECK = 0, 1, 2, 3


@dataclass
class InputDocument:
    ambient_dim: int
    configurations: list[list[list[int]]]
    labels: list[str | None] = field(default_factory=list)
    certificate: dict | None = None
    coefficients: list | None = None
    warnings: list[str] = field(default_factory=list)

    def family(self) -> Family:
        return Family(tuple(PointConfiguration(self.ambient_dim, tuple(map(tuple, pts)))
                            for pts in self.configurations))

    def to_dict(self) -> dict:
        confs = []
        for pts, label in zip(self.configurations, self.labels):
            c: dict[str, Any] = {"points": pts}
            if label is not None:
                c["label"] = label
            confs.append(c)
        out: dict[str, Any] = {"ambient_dim": self.ambient_dim, "configurations": confs}
        if self.certificate is not None:
            out["certificate"] = self.certificate
        if self.coefficients is not None:
            out["coefficients"] = self.coefficients
        return out


def _is_int(x) -> bool:
    return isinstance(x, int) and not isinstance(x, bool)


def parse_input(data: bytes | str) -> InputDocument:
    """Validate an input document; duplicate points are dropped with a warning."""
    if isinstance(data, bytes):
        try:
            data = data.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise InputError(f"input is not UTF-8: {exc}") from exc
    try:
        doc = json.loads(data)
    except json.JSONDecodeError as exc:
        raise InputError(f"malformed JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}") from exc
    if not isinstance(doc, dict):
        raise InputError("top level must be an object")
    n = doc.get("ambient_dim")
    if not _is_int(n) or n < 0:
        raise InputError("field 'ambient_dim' must be a non-negative integer")
    confs = doc.get("configurations")
    if not isinstance(confs, list) or not confs:
        raise InputError("field 'configurations' must be a non-empty list")
    out = InputDocument(n, [], [], doc.get("certificate"), doc.get("coefficients"))
    for i, conf in enumerate(confs):
        where = f"configurations[{i}]"
        if not isinstance(conf, dict) or not isinstance(conf.get("points"), list):
            raise InputError(f"{where} must be an object with a 'points' list")
        label = conf.get("label")
        if label is not None and not isinstance(label, str):
            raise InputError(f"{where}.label must be a string")
        pts, seen = [], set()
        for j, p in enumerate(conf["points"]):
            if not isinstance(p, list) or len(p) != n:
                raise InputError(f"{where}.points[{j}] must be a list of {n} integers")
            for t, x in enumerate(p):
                if not _is_int(x):
                    raise InputError(f"{where}.points[{j}][{t}] is not an integer: {x!r}")
            if tuple(p) in seen:
                out.warnings.append(f"{where}: duplicate point {p} removed")
                continue
            seen.add(tuple(p))
            pts.append(list(p))
        if not pts:
            raise InputError(f"{where} is empty")
        out.configurations.append(pts)
        out.labels.append(label)
    return out


def serialize_input(doc: InputDocument) -> str:
    return json.dumps(doc.to_dict(), sort_keys=True)


def document_from_matrices(matrices: Sequence[Sequence[Sequence[int]]],
                           labels: Sequence[str] | None = None) -> dict:
    """Input document from matrices that hold one point per column.

    >>> document_from_matrices([[[0, 1, 2], [0, 0, 0]]])["configurations"][0]["points"]
    [[0, 0], [1, 0], [2, 0]]
    """
    if not matrices:
        raise InputError("at least one matrix is required")
    n = len(matrices[0])
    confs = []
    for i, m in enumerate(matrices):
        if len(m) != n or len({len(row) for row in m}) > 1:
            raise InputError(f"matrix {i} must have {n} rows of equal length")
        conf: dict[str, Any] = {"points": [list(col) for col in zip(*m)]}
        if labels is not None:
            conf["label"] = labels[i]
        confs.append(conf)
    return {"ambient_dim": n, "configurations": confs}


# ---------------------------------------------------------------------------
# Commands
# ---------------------------------------------------------------------------

def _lattice_dict(lat: Lattice) -> dict:
    return {"basis_columns": [list(g) for g in lat.generators], "rank": lat.rank,
            "index_in_saturation": lat.index()}


def _single_or_cayley(f: Family) -> PointConfiguration:
    return f[0] if len(f) == 1 else cayley_sum(f).config


def _cmd_spanning(f, doc, args):
    lat = family_lattice(f)
    return {"spanning": is_spanning(f), "lattice": _lattice_dict(lat)}


def _cmd_mixed_volume(f, doc, args):
    pol = mixed_volume(f)
    out = {"value": pol.value, "polarization": pol.to_dict()}
    bad = [i for i, c in enumerate(f) if not is_full_dimensional(c)]
    if bad:
        out["interior_lattice_points"] = {
            "applicable": False,
            "reason": f"members {bad} are not full-dimensional; the interior-point formula "
                      "needs full-dimensional members"}
    else:
        ilp = mixed_volume_ilp(f)
        if ilp.value != pol.value:
            raise AssertionError(f"mixed volume methods disagree: {pol.value} vs {ilp.value}")
        out["interior_lattice_points"] = {"applicable": True, **ilp.to_dict()}
    return out


def _cmd_interior_points(f, doc, args):
    if args.lambda_mode:
        lam, pts = lambda_interior_points(f)
        return {"mode": "lambda", "lattice": _lattice_dict(lam),
                "basepoints": [list(c.points[0]) for c in f],
                "points": [list(p) for p in pts]}
    p = vertices_of(minkowski_sum_all((vertices_of(c).as_config() for c in f), f.ambient_dim))
    return {"mode": "sum", "sum_vertices": [list(v) for v in p.vertices],
            "points": [list(x) for x in interior_lattice_points(p)]}


def _cmd_codegree(f, doc, args):
    return {"codegrees": [codegree(vertices_of(c)) for c in f]}


def _cmd_width(f, doc, args):
    out = []
    for c in f:
        w = width_certificate(vertices_of(c))
        out.append({"width": w.width, "direction": list(w.direction),
                    "search_bound": list(w.search_bound), "directions_tried": w.directions_tried})
    return {"widths": out}


def _cmd_cayley_sum(f, doc, args):
    cs = cayley_sum(f)
    return {"ambient_dim": cs.config.ambient_dim, "points": cs.config.tolist(),
            "parts": [cs.part(i).tolist() for i in range(len(f))],
            "dimension": dimension(cs.config)}


def _cmd_cayley_detect(f, doc, args):
    if len(f) != 1:
        raise InputError("cayley-detect takes exactly one configuration")
    if args.k is None:
        raise InputError("cayley-detect needs --k")
    s = detect_cayley_decomposition(f[0], args.k)
    if s is None:
        return {"found": False, "k": args.k}
    return {"found": True, "k": args.k, "parts": [p.tolist() for p in s.parts],
            "projection": {"matrix": s.projection.matrix.tolist(),
                           "basepoint": list(s.projection.basepoint)},
            "summands": [b.tolist() for b in summands(s)]}


def _cmd_join_type(f, doc, args):
    return {"join_type": is_join_type(f), "dimensions": [dimension(c) for c in f],
            "lattice_rank": family_lattice(f).rank}


def _cmd_fi_verify(f, doc, args):
    if doc.certificate is None:
        raise InputError("fi-verify needs a 'certificate' field in the input")
    a = _single_or_cayley(f)
    cert = certificate_from_dict(a, doc.certificate)
    check = verify_fi_certificate(a, cert)
    return {"valid": check.valid, "failures": list(check.failures),
            "target": "cayley_sum" if len(f) > 1 else "configuration"}


def _cmd_fi_search(f, doc, args):
    a = _single_or_cayley(f)
    res = bounded_fi_search(a, args.entry_bound, args.c_max)
    out = {"found": res.found, "entry_bound": args.entry_bound, "c_max": args.c_max,
           "kernels_tried": res.kernels_tried, "partitions_tried": res.partitions_tried,
           "target": "cayley_sum" if len(f) > 1 else "configuration"}
    if res.found:
        out["certificate"] = certificate_to_dict(res.certificate)
    return out


def _cmd_defective(f, doc, args):
    return analyze(f, fi_entry_bound=args.entry_bound, fi_c_max=args.c_max,
                   lambda_mode=args.lambda_mode).to_dict()


def _cmd_oracle_ehrhart(f, doc, args):
    out = []
    for c in f:
        p = vertices_of(c)
        out.append({"ehrhart_volume": ehrhart_volume(p), "normalized_volume": normalized_volume(p)})
    return {"volumes": out}


def _parse_coefficients(doc: InputDocument, f: Family) -> list[list[complex]]:
    raw = doc.coefficients
    if not isinstance(raw, list) or len(raw) != len(f):
        raise InputError("'coefficients' must hold one list per configuration")
    out = []
    for i, cs in enumerate(raw):
        if not isinstance(cs, list):
            raise InputError(f"coefficients[{i}] must be a list")
        row = []
        for j, z in enumerate(cs):
            if isinstance(z, list) and len(z) == 2:
                row.append(complex(z[0], z[1]))
            elif isinstance(z, (int, float)) and not isinstance(z, bool):
                row.append(complex(z))
            else:
                raise InputError(f"coefficients[{i}][{j}] must be a number or [re, im]")
        out.append(row)
    return out


def _cmd_oracle_witness(f, doc, args):
    import numpy as np

    if doc.coefficients is not None:
        coeffs = _parse_coefficients(doc, f)
        source = "input"
    else:
        rng = np.random.default_rng(args.seed)
        coeffs = [list(rng.normal(size=len(c)) + 1j * rng.normal(size=len(c))) for c in f]
        source = "random"
    system = SparseSystem.of(f, coeffs)
    w = witness_search(system, args.samples, args.seed)
    out = {"found": w is not None, "samples": args.samples, "coefficient_source": source,
           "coefficients": [[[z.real, z.imag] for z in cs] for cs in system.coefficients]}
    if w is None:
        out["note"] = "no witness found; this is probabilistic evidence only"
    else:
        out["witness"] = w.to_dict()
    if f.k >= 1:
        out["separable_impossibility"] = separable_impossibility(f)
    return out


HANDLERS = {
    "spanning": _cmd_spanning,
    "mixed-volume": _cmd_mixed_volume,
    "interior-points": _cmd_interior_points,
    "codegree": _cmd_codegree,
    "width": _cmd_width,
    "cayley-sum": _cmd_cayley_sum,
    "cayley-detect": _cmd_cayley_detect,
    "join-type": _cmd_join_type,
    "fi-verify": _cmd_fi_verify,
    "fi-search": _cmd_fi_search,
    "defective": _cmd_defective,
    "oracle-ehrhart": _cmd_oracle_ehrhart,
    "oracle-witness": _cmd_oracle_witness,
}

RANDOMIZED = {"oracle-witness"}


# ---------------------------------------------------------------------------
# Rechecking
# ---------------------------------------------------------------------------

def recheck_report(command: str, f: Family, doc: InputDocument, result: dict) -> list[str]:
    """Replay the evidence of ``result`` against ``f``; returns the failures (empty if sound)."""
    fails: list[str] = []
    n = f.ambient_dim
    if command == "defective":
        return recheck(f, result)[1]
    if command == "mixed-volume":
        for key in ("polarization", "interior_lattice_points"):
            part = result.get(key, {})
            if key == "interior_lattice_points" and not part.get("applicable"):
                continue
            total = sum(Fraction(t["sign"]) * Fraction(t["magnitude"]) for t in part.get("terms", []))
            if total != result.get("value"):
                fails.append(f"{key} terms re-sum to {total}")
        return fails
    if command == "interior-points":
        if result.get("mode") == "lambda":
            lam = family_lattice(f)
            shifted = [c.translate(tuple(-x for x in b))
                       for c, b in zip(f, map(tuple, result["basepoints"]))]
        else:
            lam, shifted = None, list(f)
        _, hp = convex_hull(minkowski_sum_all(shifted, n))
        for p in map(tuple, result.get("points", [])):
            if not hp.contains(p, strict=True):
                fails.append(f"{list(p)} is not interior")
            if lam is not None and p not in lam:
                fails.append(f"{list(p)} is not in the lattice")
        return fails
    if command == "width":
        for c, w in zip(f, result.get("widths", [])):
            if width_along(vertices_of(c), w["direction"]) != w["width"]:
                fails.append(f"direction {w['direction']} does not give width {w['width']}")
        return fails
    if command == "cayley-detect" and result.get("found"):
        parts = [PointConfiguration(n, tuple(map(tuple, p))) for p in result["parts"]]
        if verify_cayley_partition(f[0], parts) is None:
            fails.append("parts do not form a Cayley decomposition")
        return fails
    if command in ("fi-search", "fi-verify") and result.get("certificate"):
        a = _single_or_cayley(f)
        check = verify_fi_certificate(a, certificate_from_dict(a, result["certificate"]))
        return list(check.failures)
    if command == "oracle-witness" and result.get("found"):
        import numpy as np

        coeffs = [[complex(*z) for z in cs] for cs in result["coefficients"]]
        system = SparseSystem.of(f, coeffs)
        u = np.array([complex(*z) for z in result["witness"]["u"]])
        lam = np.array([complex(*z) for z in result["witness"]["dependence_certificate"]])
        vals, grads = system.evaluate(u)
        if np.max(np.abs(vals)) > 1e-8 or np.linalg.norm(grads.T @ lam) > 1e-8:
            fails.append("witness does not satisfy the system")
        return fails
    # remaining results are recomputed outright
    fresh = HANDLERS[command](f, doc, _recheck_args(result))
    if fresh != result:
        fails.append("recomputed result differs")
    return fails


def _recheck_args(result: dict) -> argparse.Namespace:
    return argparse.Namespace(k=result.get("k"), entry_bound=result.get("entry_bound", 1),
                              c_max=result.get("c_max", 1), lambda_mode=result.get("mode") == "lambda",
                              samples=result.get("samples", 1), seed=0)


# ---------------------------------------------------------------------------
# Entry point
# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="latdefect",
                                description="Exact lattice-polytope computations on point configurations.")
    p.add_argument("command", choices=COMMANDS)
    p.add_argument("input", nargs="?", default="-", help="input JSON file ('-' for stdin)")
    p.add_argument("--k", type=int, help="number of parts minus one for cayley-detect")
    p.add_argument("--entry-bound", type=int, default=1, help="kernel generator entry bound for certificate search")
    p.add_argument("--c-max", type=int, default=1, help="largest kernel rank for certificate search")
    p.add_argument("--samples", type=int, default=1000, help="start points for oracle-witness")
    p.add_argument("--seed", type=int, default=0, help="random seed for oracle-witness")
    p.add_argument("--lambda", dest="lambda_mode", action="store_true",
                   help="test interior points against the family lattice after translating each member")
    p.add_argument("--format", choices=("json",), default="json")
    p.add_argument("--recheck", metavar="REPORT", help="replay the evidence of a saved report instead of computing")
    return p


def _read(path: str) -> bytes:
    if path == "-":
        return sys.stdin.buffer.read()
    with open(path, "rb") as fh:
        return fh.read()


def run(argv: Sequence[str] | None = None, stdout=None) -> int:
    stdout = stdout or sys.stdout
    args = build_parser().parse_intermixed_args(argv)
    report: dict[str, Any] = {"command": args.command, "tool_version": __version__}
    start = time.perf_counter()
    code = EXIT_OK
    try:
        raw = _read(args.input)
        report["input_sha256"] = hashlib.sha256(raw).hexdigest()
        doc = parse_input(raw)
        report["warnings"] = list(doc.warnings)
        f = doc.family()
        if args.recheck:
            saved = json.loads(_read(args.recheck))
            if saved.get("command") != args.command:
                raise InputError(f"report is for command {saved.get('command')!r}")
            fails = recheck_report(args.command, f, doc, saved.get("result", {}))
            report["result"] = {"recheck": not fails, "failures": fails}
            code = EXIT_OK if not fails else EXIT_RECHECK
        else:
            report["result"] = HANDLERS[args.command](f, doc, args)
            if args.command in RANDOMIZED:
                report["seed"] = args.seed
    except (InputError, OSError, json.JSONDecodeError) as exc:
        report["error"] = {"kind": "input", "message": str(exc)}
        code = EXIT_INPUT
    except PreconditionError as exc:
        report["error"] = {"kind": "precondition", "message": str(exc)}
        code = EXIT_PRECONDITION
    report["elapsed_seconds"] = round(time.perf_counter() - start, 6)
    json.dump(report, stdout, sort_keys=True, indent=2)
    stdout.write("\n")
    if "error" in report:
        print(f"error: {report['error']['message']}", file=sys.stderr)
    return code


def main() -> None:
    sys.exit(run())
