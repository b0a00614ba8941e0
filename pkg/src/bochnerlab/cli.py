"""Batch driver: run a scenario file, write a CSV table and a JSON summary.

Usage::

    python -m bochnerlab <command> --scenario FILE [--out DIR] [--eps E]
        [--depth D] [--resolution R] [--n-max N] [--window W]

Commands: integrate-sf, approx, bint, compare-lebesgue, dominated, sep-check.
Exit codes: 0 ok, 1 numeric failure, 2 configuration error.

CSV columns are fixed: ``n, c0, ..., c{d-1}, l1, l1_bound, flags``.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import sys
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Any

import numpy as np

from .bochner import (
    BIntParams, DCTParams, VectorFn, bif_from_separable, bint_detail, bint_sf, bint_vs_lintp,
    constant, dominated_convergence_run, scaled,
)
from .lebesgue import PiecewiseLipschitz, Tabulated
from .separability import DenseSeq, dense_seq, dyadic_seq, weak_sep_check
from .simple_fn import integrable_sf, nonintegrable_index, sf_from_json, sf_indicator
from .spaces import FiniteSpace, IntervalSet, IntervalSpace, MeasureSpace, PointSet, space_from_json
from .vectors import REAL, RVec, Vector, VSpace

COMMANDS = ("integrate-sf", "approx", "bint", "compare-lebesgue", "dominated", "sep-check")
CATALOG = ("constant", "linear-pair", "identity", "indicator", "table", "scaled-family")


class ConfigError(ValueError):
    """Schema violation; the message starts with the offending field path."""


# --------------------------------------------------------------------------
# scenario

@dataclass
class Scenario:
    space: dict
    function: dict | None = None
    simple_fn: dict | None = None
    dense_seq: dict = field(default_factory=lambda: {"kind": "rational", "pairing": "cantor"})
    eps: float = 1e-3
    depth: int = 12
    resolution: int = 12
    n_max: int = 1 << 20
    window: int = 100
    l1_tol: float | None = None
    dominated: dict = field(default_factory=dict)
    sep: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return asdict(self)


_KNOBS = {"eps": float, "depth": int, "resolution": int, "n_max": int, "window": int}


def _number(value, kind, path):
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"{path}: expected a number, got {value!r}")
    if kind is int and float(value) != int(value):
        raise ConfigError(f"{path}: expected an integer, got {value!r}")
    if not math.isfinite(value) or value <= 0:
        raise ConfigError(f"{path}: must be positive, got {value!r}")
    return kind(value)


def load_scenario(obj: Any, overrides: dict | None = None) -> Scenario:
    if not isinstance(obj, dict):
        raise ConfigError("scenario: expected a JSON object")
    known = set(Scenario.__dataclass_fields__)
    for k in obj:
        if k not in known:
            raise ConfigError(f"{k}: unknown field")
    if "space" not in obj:
        raise ConfigError("space: missing")
    data = dict(obj)
    for k, v in (overrides or {}).items():
        if v is not None:
            data[k] = v
    for k, kind in _KNOBS.items():
        if k in data:
            data[k] = _number(data[k], kind, k)
    if data.get("l1_tol") is not None:
        data["l1_tol"] = _number(data["l1_tol"], float, "l1_tol")
    for k in ("space", "dense_seq", "dominated", "sep"):
        if k in data and not isinstance(data[k], dict):
            raise ConfigError(f"{k}: expected an object")
    return Scenario(**data)


def build_space(sc: Scenario) -> MeasureSpace:
    try:
        return space_from_json(sc.space)
    except ValueError as exc:
        raise ConfigError(f"space.{exc}") from None


def build_dense_seq(sc: Scenario, carrier: VSpace) -> DenseSeq:
    spec = sc.dense_seq
    kind = spec.get("kind", "rational")
    if kind == "rational":
        pairing = spec.get("pairing", "cantor")
        if pairing not in ("cantor", "szudzik"):
            raise ConfigError(f"dense_seq.pairing: unknown pairing {pairing!r}")
        return dense_seq(carrier, True, pairing)
    if kind == "dyadic":
        return dyadic_seq(carrier)
    raise ConfigError(f"dense_seq.kind: unknown kind {kind!r}")


def _vector(value, path) -> Vector:
    vals = value if isinstance(value, list) else [value]
    if not vals or not all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in vals):
        raise ConfigError(f"{path}: expected a number or a list of numbers")
    return Vector(REAL if len(vals) == 1 else RVec(len(vals)), vals)


def _mset(space: MeasureSpace, value, path):
    try:
        if isinstance(space, FiniteSpace):
            s = PointSet.of(value)
        else:
            s = IntervalSet.of([tuple(iv) for iv in value])
        space.check_set(s)
        return s
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"{path}: {exc}") from None


def build_function(space: MeasureSpace, spec: Any, path: str = "function") -> VectorFn:
    if not isinstance(spec, dict) or "name" not in spec:
        raise ConfigError(f"{path}.name: missing")
    name = spec["name"]
    params = spec.get("params", {})
    if not isinstance(params, dict):
        raise ConfigError(f"{path}.params: expected an object")
    pp = f"{path}.params"
    if name == "constant":
        return constant(space, _vector(params.get("value", 1.0), f"{pp}.value"))
    if name in ("linear-pair", "identity"):
        if not isinstance(space, IntervalSpace):
            raise ConfigError(f"{path}.name: {name!r} needs the interval space")
        if name == "identity":
            return VectorFn(space, lambda xs: np.asarray(xs, float), REAL, 1.0, name="identity")
        return VectorFn(space, lambda xs: np.stack([xs, 1.0 - xs], -1), RVec(2), math.sqrt(2.0),
                        name="linear-pair")
    if name == "indicator":
        s = _mset(space, params.get("set", []), f"{pp}.set")
        v = _vector(params.get("value", 1.0), f"{pp}.value").coords
        if isinstance(space, FiniteSpace):
            mask = np.zeros(space.n_points, bool)
            mask[list(s.indices)] = True
            return VectorFn(space, lambda xs: np.where(mask[np.asarray(xs, np.int64)][:, None], v, 0.0),
                            REAL if v.size == 1 else RVec(v.size), name="indicator")
        ivs = s.intervals
        br = [e for iv in ivs for e in iv]

        def ind(xs):
            xs = np.asarray(xs, float)
            inside = np.zeros(xs.size, bool)
            for a, b in ivs:
                inside |= (xs >= a) & (xs < b)
            return np.where(inside[:, None], v, 0.0)
        return VectorFn(space, ind, REAL if v.size == 1 else RVec(v.size), 0.0, br, name="indicator")
    if name == "table":
        if not isinstance(space, FiniteSpace):
            raise ConfigError(f"{path}.name: 'table' needs a finite space")
        values = params.get("values")
        if not isinstance(values, list) or len(values) != space.n_points:
            raise ConfigError(f"{pp}.values: expected one entry per atom ({space.n_points})")
        rows = [_vector(v, f"{pp}.values[{i}]").coords for i, v in enumerate(values)]
        if len({r.size for r in rows}) != 1:
            raise ConfigError(f"{pp}.values: entries of different lengths")
        from .bochner import from_table
        return from_table(space, np.stack(rows), name="table")
    if name == "scaled-family":
        raise ConfigError(f"{path}.name: 'scaled-family' is only valid for the dominated command")
    raise ConfigError(f"{path}.name: unknown catalog entry {name!r} (known: {', '.join(CATALOG)})")


# --------------------------------------------------------------------------
# output

def _fmt(x) -> str:
    if x is None:
        return ""
    if isinstance(x, float):
        return repr(x)
    return str(x)


def write_table(path: Path, d: int, rows: list[dict]):
    cols = ["n"] + [f"c{i}" for i in range(d)] + ["l1", "l1_bound", "flags"]
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(cols)
        for r in rows:
            comps = [float(c) for c in r.get("value", [None] * d)]
            w.writerow([_fmt(r["n"])] + [_fmt(c) for c in comps]
                       + [_fmt(r.get("l1")), _fmt(r.get("l1_bound")), r.get("flags", "")])


def _jsonable(x):
    if isinstance(x, float) and not math.isfinite(x):
        return "inf" if x > 0 else ("-inf" if x < 0 else "nan")
    if isinstance(x, dict):
        return {k: _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, np.generic):
        return _jsonable(x.item())
    return x


def write_summary(path: Path, command: str, sc: Scenario, result: dict):
    doc = {"command": command, "config": sc.to_json(), "result": result}
    path.write_text(json.dumps(_jsonable(doc), indent=2, sort_keys=True) + "\n")


# --------------------------------------------------------------------------
# commands

def cmd_integrate_sf(sc: Scenario, space: MeasureSpace):
    if sc.simple_fn is not None:
        try:
            sf = sf_from_json(sc.simple_fn, space)
        except (KeyError, TypeError, ValueError) as exc:
            raise ConfigError(f"simple_fn: {exc}") from None
    elif sc.function is not None and sc.function.get("name") == "indicator":
        params = sc.function.get("params", {})
        s = _mset(space, params.get("set", []), "function.params.set")
        sf = sf_indicator(space, s, _vector(params.get("value", 1.0), "function.params.value"))
    else:
        raise ConfigError("simple_fn: missing (or give function.name = 'indicator')")
    ok = integrable_sf(sf)
    v = bint_sf(sf)
    rows = [{"n": 0, "value": v.coords.tolist(), "flags": "integrable" if ok else "nonintegrable"}]
    return sf.carrier.d, rows, {"value": v.coords.tolist(), "integrable": ok,
                                "max_which": sf.max_which, "nonintegrable_index": nonintegrable_index(sf)}


def _witness(sc, space, f):
    u = build_dense_seq(sc, f.carrier)
    return bif_from_separable(space, f, u, sc.n_max, sc.resolution, window=min(sc.window, sc.n_max))


def _witness_rows(w):
    engine = w.meta["engine"]
    rows = []
    for r in w.l1:
        flags = ["integrable" if r.integrable else "nonintegrable"]
        if r.misclassified:
            flags.append(f"misclassified={r.misclassified!r}")
        rows.append({"n": r.n, "value": engine.integral(r.n).tolist(), "l1": r.value,
                     "l1_bound": r.bound, "flags": ";".join(flags)})
    return rows


def _witness_summary(w):
    return {"l1_final": w.l1[-1].value, "l1_bound_final": w.l1[-1].bound,
            "lint_norm": w.norm_integral.value.value, "pointwise_ok": w.pw.ok,
            "domination_ok": w.meta["domination"]["ok"], "dense_seq": w.meta["dense_seq"]}


def cmd_approx(sc: Scenario, space: MeasureSpace):
    f = build_function(space, sc.function)
    w = _witness(sc, space, f)
    return f.carrier.d, _witness_rows(w), _witness_summary(w)


def cmd_bint(sc: Scenario, space: MeasureSpace):
    f = build_function(space, sc.function)
    w = _witness(sc, space, f)
    b = bint_detail(w, sc.eps, sc.window, sc.l1_tol)
    res = _witness_summary(w)
    res.update({"value": b.value.coords.tolist(), "n_start": b.n_start, "n_star": b.n_star,
                "l1_upper": b.l1_upper})
    return f.carrier.d, _witness_rows(w), res


def cmd_compare_lebesgue(sc: Scenario, space: MeasureSpace):
    f = build_function(space, sc.function)
    if f.carrier != REAL:
        raise ConfigError("function: compare-lebesgue needs a real-valued function")
    params = BIntParams(sc.n_max, sc.resolution, sc.eps, sc.window, sc.l1_tol, sc.depth)
    rep = bint_vs_lintp(space, f, params)
    rows = [{"n": sc.n_max, "value": [rep.bint], "l1": rep.diff, "l1_bound": rep.tolerance,
             "flags": "passed" if rep.passed else "failed"}]
    return 1, rows, rep.to_json()


def cmd_dominated(sc: Scenario, space: MeasureSpace):
    spec = sc.function
    if not isinstance(spec, dict) or spec.get("name") != "scaled-family":
        raise ConfigError("function.name: dominated needs 'scaled-family'")
    params = spec.get("params", {})
    base = build_function(space, params.get("base"), "function.params.base")
    c = params.get("c", 1.0)
    if isinstance(c, bool) or not isinstance(c, (int, float)) or c < 0:
        raise ConfigError("function.params.c: expected a number >= 0")
    dom = sc.dominated
    n_values = dom.get("n_values", [0, 1, 2, 5, 10, 20, 50, 100, 200])
    if not isinstance(n_values, list) or not n_values or not all(
            isinstance(n, int) and not isinstance(n, bool) and n >= 0 for n in n_values):
        raise ConfigError("dominated.n_values: expected a nonempty list of integers >= 0")
    final_eps = _number(dom.get("eps", 5e-3), float, "dominated.eps")

    def f_seq(n):
        return scaled(1.0 + c / (n + 1), base)

    gscale = 1.0 + c
    if isinstance(space, FiniteSpace):
        g = Tabulated(space, gscale * np.linalg.norm(base(np.arange(space.n_points)), axis=1))
    else:
        g = PiecewiseLipschitz(space, lambda xs: gscale * np.linalg.norm(base(xs), axis=1),
                               gscale * base.lipschitz, base.breakpoints)
    p = DCTParams(n_values=tuple(n_values), eps=final_eps, bint_eps=sc.eps, window=sc.window,
                  resolution=sc.resolution, n_max=sc.n_max, l1_tol=sc.l1_tol)
    rep = dominated_convergence_run(space, f_seq, g, p, limit=base,
                                    u=build_dense_seq(sc, base.carrier))
    rows = [{"n": r.n, "value": r.value, "l1": r.diff, "l1_bound": r.l1_upper, "flags": f"n_star={r.n_star}"}
            for r in rep.rows]
    return base.carrier.d, rows, rep.to_json()


def cmd_sep_check(sc: Scenario, space: MeasureSpace):
    spec = sc.sep
    carrier = VSpace.from_tag(spec.get("carrier", "real"))
    count = int(_number(spec.get("samples", 1000), int, "sep.samples"))
    lo, hi = spec.get("low", -10.0), spec.get("high", 10.0)
    if not hi > lo:
        raise ConfigError("sep.high: must exceed sep.low")
    max_n = int(_number(spec.get("max_n", 1_000_000), int, "sep.max_n"))
    seed = spec.get("seed", 0)
    rng = np.random.default_rng(seed)
    ys = rng.uniform(lo, hi, size=(count, carrier.d))
    u = build_dense_seq(sc, carrier)
    rep = weak_sep_check(u, ys, sc.eps, max_n)
    rows = [{"n": int(h), "value": y.tolist(), "flags": "hit" if h >= 0 else "miss"}
            for y, h in zip(ys, rep.first_hits)]
    return carrier.d, rows, {"ok": rep.ok, "worst_index": rep.worst_index, "eps": sc.eps,
                             "max_n": max_n, "samples": count, "misses": int(np.sum(rep.first_hits < 0))}


HANDLERS = {
    "integrate-sf": cmd_integrate_sf,
    "approx": cmd_approx,
    "bint": cmd_bint,
    "compare-lebesgue": cmd_compare_lebesgue,
    "dominated": cmd_dominated,
    "sep-check": cmd_sep_check,
}


def run_scenario(command: str, sc: Scenario, out: Path) -> dict:
    space = build_space(sc)
    d, rows, result = HANDLERS[command](sc, space)
    out.mkdir(parents=True, exist_ok=True)
    write_table(out / f"{command}.csv", d, rows)
    write_summary(out / f"{command}.summary.json", command, sc, result)
    return result


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="bochnerlab", description=__doc__.splitlines()[0])
    ap.add_argument("command", choices=COMMANDS)
    ap.add_argument("--scenario", required=True, help="scenario JSON file")
    ap.add_argument("--out", default="out", help="output directory")
    ap.add_argument("--eps", type=float)
    ap.add_argument("--depth", type=int)
    ap.add_argument("--resolution", type=int)
    ap.add_argument("--n-max", dest="n_max", type=int)
    ap.add_argument("--window", type=int)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        obj = json.loads(Path(args.scenario).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        print(f"error: scenario: {exc}", file=sys.stderr)
        return 2
    overrides = {k: getattr(args, k) for k in _KNOBS}
    try:
        sc = load_scenario(obj, overrides)
        result = run_scenario(args.command, sc, Path(args.out))
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (ValueError, ArithmeticError, RuntimeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    print(json.dumps(_jsonable(result), sort_keys=True))
    return 0


if __name__ == "__main__":
    sys.exit(main())
