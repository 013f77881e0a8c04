"""Command-line front end: one JSON document per run on stdout.

Every run is keyed by the SHA-256 of its canonical configuration; the
record is stored under $WEYL_CACHE_DIR (default ./.weyl-cache) and replayed
on the next identical invocation unless --no-cache is given.  Logs go to
stderr.  Exit codes: 0 ok, 2 invalid input, 3 resource budget, 4 I/O.
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import hashlib
import json
import logging
import math
import os
import sys
import time
from fractions import Fraction
from pathlib import Path
from typing import Any, Callable, Mapping, Sequence

import numpy as np

from . import __version__
from . import counterexample as cx
from . import maximal as mx
from . import numtheory as nt
from . import sums
from .errors import InvalidInputError, PrecisionError, QuadratureError, ResourceError

SCHEMA = "weyl/1"
EXIT_OK, EXIT_INVALID, EXIT_RESOURCE, EXIT_IO = 0, 2, 3, 4
CSV_HEADER = ("index", "x", "t", "re", "im", "magnitude")

log = logging.getLogger("weyllab")


def to_jsonable(obj: Any) -> Any:
    """Plain JSON value for dataclasses, numpy scalars, complex and Fraction."""
    if dataclasses.is_dataclass(obj) and not isinstance(obj, type):
        return {f.name: to_jsonable(getattr(obj, f.name)) for f in dataclasses.fields(obj)}
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return to_jsonable(obj.tolist())
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        v = float(obj)
        return v if math.isfinite(v) else None
    if isinstance(obj, (complex, np.complexfloating)):
        return {"re": to_jsonable(obj.real), "im": to_jsonable(obj.imag)}
    if isinstance(obj, Fraction):
        return f"{obj.numerator}/{obj.denominator}"
    return obj


def canonical_json(obj: Any) -> str:
    return json.dumps(to_jsonable(obj), sort_keys=True, separators=(",", ":"), allow_nan=False)


def config_hash(command: str, config: Mapping[str, Any]) -> str:
    blob = canonical_json({"command": command, "config": config, "version": __version__})
    return hashlib.sha256(blob.encode()).hexdigest()


def cache_dir() -> Path:
    return Path(os.environ.get("WEYL_CACHE_DIR", ".weyl-cache"))


def emit_csv(path: str | os.PathLike, values: Sequence[complex], xs: Sequence[float], ts: Sequence[float]) -> None:
    """Write one row per grid point with 17 significant digits."""
    with open(path, "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(CSV_HEADER)
        for i, (v, x, t) in enumerate(zip(values, xs, ts)):
            v = complex(v)
            w.writerow([i] + [f"{u:.17g}" for u in (x, t, v.real, v.imag, abs(v))])


def parse_csv(path: str | os.PathLike) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Inverse of emit_csv: (values, xs, ts)."""
    with open(path, encoding="utf-8", newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows or tuple(rows[0]) != CSV_HEADER:
        raise InvalidInputError(f"{path} is not a grid CSV")
    body = rows[1:]
    xs = np.array([float(r[1]) for r in body])
    ts = np.array([float(r[2]) for r in body])
    vals = np.array([complex(float(r[3]), float(r[4])) for r in body])
    return vals, xs, ts


def _ints(text: str) -> list[int]:
    return [int(v) for v in text.split(",") if v.strip()]


def _floats(text: str) -> list[float]:
    return [float(v) for v in text.split(",") if v.strip()]


def _fraction(text: str) -> Fraction:
    try:
        return Fraction(text.strip())
    except (ValueError, ZeroDivisionError) as exc:
        raise argparse.ArgumentTypeError(f"not a rational number: {text!r}") from exc


# --- command handlers: each takes the parsed namespace and returns a JSON-able value


def cmd_eval(a) -> Any:
    params = sums.WeylParams(a.N, a.k)
    if a.grid is None:
        if a.t_exact is not None:
            pt = sums.PhasePoint.rational(a.x, a.t_exact)
        else:
            pt = sums.PhasePoint(a.x, a.t)
        v = sums.eval_weyl_sum(params, pt)
        return {"re": v.real, "im": v.imag, "abs": abs(v), "x": pt.x, "t": pt.t}
    if a.M is None:
        raise InvalidInputError("--grid needs --M")
    if a.grid == "x":
        vals = sums.eval_weyl_grid_x(params, a.t, a.M)
        xs, ts = np.arange(a.M) / a.M, np.full(a.M, a.t % 1.0)
    else:
        vals = sums.eval_weyl_grid_t(params, a.x, a.M)
        xs, ts = np.full(a.M, a.x % 1.0), np.arange(a.M) / a.M
    mags = np.abs(vals)
    i = int(np.argmax(mags))
    if a.csv:
        emit_csv(a.csv, vals, xs, ts)
    return {"grid": a.grid, "M": a.M, "max_abs": mags[i], "argmax": i, "x": xs[i], "t": ts[i], "csv": a.csv}


def cmd_gauss(a) -> Any:
    v = sums.eval_gauss_sum(a.k, a.a, a.b, a.q)
    return {"re": v.real, "im": v.imag, "magnitude": abs(v)}


def cmd_integral(a) -> Any:
    v = sums.eval_oscillatory_integral(a.xi, a.N, a.tol)
    return {"re": v.real, "im": v.imag, "abs": abs(v)}


def cmd_arc(a) -> Any:
    params = sums.WeylParams(a.N, a.k)
    pt = sums.PhasePoint.rational(a.x, a.t_exact) if a.t_exact is not None else sums.PhasePoint(a.x, a.t)
    out: dict[str, Any] = {}
    center = tuple(a.center) if a.center else None
    if a.A is not None:
        diag: dict = {}
        arc = mx.locate_major_arc(params, pt, a.A, a.eps, diag)
        out["arc"] = arc
        out["diagnostics"] = diag
        if center is None and arc is not None:
            center = (arc.q, arc.r1, arc.rk)
    if center is None:
        raise InvalidInputError("arc needs --center q,r1,rk or --A")
    if len(center) != 3:
        raise InvalidInputError("--center takes q,r1,rk")
    dec = sums.major_arc_decompose(params, pt, center)
    out["center"] = list(center)
    out["decomposition"] = dec
    out["constant"] = dec.constant
    return out


def cmd_decompose(a) -> Any:
    dec = nt.decompose_modulus(a.q, a.k)
    return {"q": a.q, "k": a.k, "parts": list(dec.parts), "factorization": nt.factorize(a.q), "violations": dec.violations()}


def cmd_powerfull(a) -> Any:
    vals = nt.enumerate_power_full(a.i, a.x)
    out = {"i": a.i, "x": a.x, "count": len(vals), "ratio": len(vals) / a.x ** (1 / a.i)}
    if a.list:
        out["values"] = vals
    return out


def cmd_dirichlet(a) -> Any:
    f = nt.dirichlet_approx(a.alpha, a.M)
    err = abs(a.alpha - f)
    return {"a": f.numerator, "q": f.denominator, "error": float(err), "bound": 1 / (f.denominator * a.M)}


def cmd_sup(a) -> Any:
    return mx.sup_over_t(sums.WeylParams(a.N, a.k), a.x, a.oversample, a.budget)


def cmd_lpnorm(a) -> Any:
    params = sums.WeylParams(a.N, a.k)
    est = mx.lp_norm_report(params, a.p, a.x_grid, a.oversample, not a.no_farey, a.budget, a.threads)
    return {**to_jsonable(est), "converged": est.converged, "trivial_floor": a.N ** (1 - 1 / a.p)}


def cmd_levelset(a) -> Any:
    params = sums.WeylParams(a.N, a.k)
    levels = a.A if a.A else [a.N**e for e in a.A_exponents]
    x_grid = a.x_grid or 8 * a.N
    rows = []
    for A in levels:
        r1 = mx.superlevel_measure(params, A, x_grid, a.oversample, a.method, a.budget, a.threads)
        r2 = mx.superlevel_measure(params, A, 2 * x_grid, a.oversample, a.method, a.budget, a.threads)
        rel = abs(r2.measure - r1.measure) / r2.measure if r2.measure else abs(r1.measure)
        rows.append({"report": r1, "report_doubled": r2, "rel_change": rel})
    return {"x_grid": x_grid, "method": a.method, "levels": rows}


def cmd_exponent_fit(a) -> Any:
    return mx.exponent_fit(a.k, a.p, a.N, a.oversample, a.x_grid_factor, not a.no_farey, a.budget, a.threads)


def cmd_conjecture_scan(a) -> Any:
    return mx.conjecture_scan_report(a.k, a.N, a.samples, a.seed)


def cmd_census(a) -> Any:
    c = cx.good_set_census(a.k, a.q)
    return {**to_jsonable(c), "alpha2_bound": c.alpha2 * a.q**2, "good_set": c.good_set(c.best_b)}


def _cert_json(cert: cx.LowerBoundCertificate) -> dict:
    out = to_jsonable(cert)
    out["ratio"] = cert.ratio
    return out


def cmd_certificate(a) -> Any:
    return _cert_json(cx.build_certificate(a.N, a.k, a.c1))


def _cert_from_json(d: Mapping[str, Any]) -> cx.LowerBoundCertificate:
    try:
        ivs = [cx.CertificateInterval(**iv) for iv in d["intervals"]]
        return cx.LowerBoundCertificate(
            int(d["N"]), int(d["k"]), float(d["c1"]), [int(q) for q in d["primes"]],
            {int(q): int(b) for q, b in d["chosen_b"].items()}, ivs, float(d["l1_lower"]), float(d["target"]),
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise InvalidInputError(f"malformed certificate: {exc}") from exc


def cmd_verify(a) -> Any:
    if a.cert:
        with open(a.cert, encoding="utf-8") as fh:
            doc = json.load(fh)
        cert = _cert_from_json(doc.get("outputs", doc))
    else:
        if a.N is None or a.k is None:
            raise InvalidInputError("verify needs --cert FILE or --N and --k")
        cert = cx.build_certificate(a.N, a.k, a.c1)
    return cx.verify_certificate(cert, a.seed)


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--no-cache", action="store_true", help="recompute and overwrite the cached record")
    p.add_argument("--threads", type=int, default=1, help="worker threads for independent work items")
    p.add_argument("-v", "--verbose", action="store_true")


def _budget(p: argparse.ArgumentParser) -> None:
    p.add_argument("--oversample", type=int, default=mx.DEFAULT_OVERSAMPLE)
    p.add_argument("--budget", type=int, default=mx.DEFAULT_BUDGET, help="max t-grid points per sup call")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="weyllab", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)
    handlers: dict[str, Callable] = {}

    def add(name: str, fn: Callable, help: str) -> argparse.ArgumentParser:
        p = sub.add_parser(name, help=help)
        _common(p)
        handlers[name] = fn
        return p

    p = add("eval", cmd_eval, "omega_{N,k}(x, t) at a point or on a grid")
    p.add_argument("--N", type=int, required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--x", type=float, default=0.0)
    p.add_argument("--t", type=float, default=0.0)
    p.add_argument("--t-exact", type=_fraction, help="rational t such as 3/7 (exact phases)")
    p.add_argument("--grid", choices=("x", "t"))
    p.add_argument("--M", type=int)
    p.add_argument("--csv", help="write the grid to this CSV file")

    p = add("gauss", cmd_gauss, "complete sum S_k(a, b, q)")
    for f in ("k", "a", "b", "q"):
        p.add_argument(f"--{f}", type=int, required=True)

    p = add("integral", cmd_integral, "oscillatory integral I(xi) over [0, N]")
    p.add_argument("--xi", type=_floats, required=True, help="comma separated xi_1..xi_k")
    p.add_argument("--N", type=float, required=True)
    p.add_argument("--tol", type=float)

    p = add("arc", cmd_arc, "locate a major arc and split omega around it")
    p.add_argument("--N", type=int, required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--x", type=float, required=True)
    p.add_argument("--t", type=float, default=0.0)
    p.add_argument("--t-exact", type=_fraction)
    p.add_argument("--A", type=float)
    p.add_argument("--eps", type=float, default=0.0)
    p.add_argument("--center", type=_ints, help="q,r1,rk")

    p = add("decompose", cmd_decompose, "power-class splitting of a modulus")
    p.add_argument("--q", type=int, required=True)
    p.add_argument("--k", type=int, required=True)

    p = add("powerfull", cmd_powerfull, "count i-th power full integers up to x")
    p.add_argument("--i", type=int, required=True)
    p.add_argument("--x", type=int, required=True)
    p.add_argument("--list", action="store_true")

    p = add("dirichlet", cmd_dirichlet, "rational approximation with q <= M")
    p.add_argument("--alpha", type=_fraction, required=True)
    p.add_argument("--M", type=float, required=True)

    p = add("sup", cmd_sup, "sup over t of |omega(x, t)|")
    p.add_argument("--N", type=int, required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--x", type=float, required=True)
    _budget(p)

    p = add("lpnorm", cmd_lpnorm, "L^p norm of the maximal function")
    p.add_argument("--N", type=int, required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--p", type=float, required=True)
    p.add_argument("--x-grid", type=int)
    p.add_argument("--no-farey", action="store_true")
    _budget(p)

    p = add("levelset", cmd_levelset, "measure of {x : sup_t |omega| > A}")
    p.add_argument("--N", type=int, required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--A", type=_floats, help="comma separated levels")
    p.add_argument("--A-exponents", type=_floats, default=[0.95, 0.9, 0.85, 0.8], help="levels N**e")
    p.add_argument("--x-grid", type=int)
    p.add_argument("--method", choices=("count", "interp"), default="count")
    _budget(p)

    p = add("exponent-fit", cmd_exponent_fit, "log-log slope of the maximal L^p norm")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--p", type=float, required=True)
    p.add_argument("--N", type=_ints, required=True, help="comma separated N values")
    p.add_argument("--x-grid-factor", type=int, default=8)
    p.add_argument("--no-farey", action="store_true")
    _budget(p)

    p = add("conjecture-scan", cmd_conjecture_scan, "largest ratio against the conjectural pointwise bound")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--N", type=int, required=True)
    p.add_argument("--samples", type=int, default=10_000)
    p.add_argument("--seed", type=int, default=0)

    p = add("census", cmd_census, "good-set census for a prime modulus")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--q", type=int, required=True)

    p = add("certificate", cmd_certificate, "build the L^1 lower-bound certificate")
    p.add_argument("--N", type=int, required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--c1", type=float, default=0.5)

    p = add("verify", cmd_verify, "re-evaluate a certificate independently")
    p.add_argument("--cert", help="JSON file written by the certificate command")
    p.add_argument("--N", type=int)
    p.add_argument("--k", type=int)
    p.add_argument("--c1", type=float, default=0.5)
    p.add_argument("--seed", type=int, default=0)

    parser.set_defaults(_handlers=handlers)
    return parser


_META = {"command", "no_cache", "threads", "verbose", "_handlers"}


def _config(ns: argparse.Namespace) -> dict[str, Any]:
    cfg = {k: v for k, v in vars(ns).items() if k not in _META}
    if cfg.get("cert"):
        # key verification runs by certificate content, not by path
        cfg["cert"] = hashlib.sha256(Path(cfg["cert"]).read_bytes()).hexdigest()
    return to_jsonable(cfg)


def run_command(argv: Sequence[str] | None = None, stdout=None) -> int:
    stdout = stdout or sys.stdout
    parser = build_parser()
    ns = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if ns.verbose else logging.WARNING, stream=sys.stderr)
    handler = ns._handlers[ns.command]
    try:
        config = _config(ns)
        digest = config_hash(ns.command, config)
        record_path = cache_dir() / f"{digest}.json"
        use_cache = not ns.no_cache and not getattr(ns, "csv", None)
        outputs = None
        if use_cache and record_path.exists():
            try:
                outputs = json.loads(record_path.read_text(encoding="utf-8"))["outputs"]
                log.info("replayed %s", record_path)
            except (ValueError, KeyError):
                log.warning("ignoring corrupt cache record %s", record_path)
        if outputs is None:
            start = time.perf_counter()
            outputs = to_jsonable(handler(ns))
            record = {
                "config_hash": digest,
                "version": __version__,
                "timestamp": time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime()),
                "wall_time": time.perf_counter() - start,
                "command": ns.command,
                "config": config,
                "outputs": outputs,
            }
            try:
                record_path.parent.mkdir(parents=True, exist_ok=True)
                record_path.write_text(canonical_json(record), encoding="utf-8")
            except OSError as exc:
                log.warning("could not write cache record: %s", exc)
        doc = {
            "schema": SCHEMA,
            "command": ns.command,
            "config": config,
            "config_hash": digest,
            "version": __version__,
            "outputs": outputs,
        }
        stdout.write(json.dumps(doc, sort_keys=True, indent=2, allow_nan=False) + "\n")
        return EXIT_OK
    except (InvalidInputError, PrecisionError, argparse.ArgumentTypeError) as exc:
        print(f"weyllab: invalid input: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except (ResourceError, QuadratureError) as exc:
        print(f"weyllab: resource budget: {exc}", file=sys.stderr)
        return EXIT_RESOURCE
    except OSError as exc:
        print(f"weyllab: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO


def main(argv: Sequence[str] | None = None) -> int:
    try:
        return run_command(argv)
    except SystemExit as exc:  # argparse usage errors already went to stderr
        return int(exc.code) if isinstance(exc.code, int) else EXIT_INVALID
