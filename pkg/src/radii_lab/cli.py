"""Single-binary command line front end for the radii laboratory.

Subcommands mirror the library surface: assembled radius bound reports
(``radii``), the Bohr radius of one polynomial (``bohr``), Fourier-matrix
polynomial construction and verification (``mq``), randomized Agler-to-sup
ratio search (``agler-search``), transfer-realization coefficient checks
(``transfer``), partial Steiner bounds and construction (``steiner``), and
the explicit constant pipeline (``constants``).

Exit codes: 0 on success, 1 on usage or domain errors (bad flags, missing
files, out-of-range parameters, exhausted construction budgets), 2 when
computed data violates a structural invariant (a lower bound crossing an
upper bound, a failed verification row, or a construction falling short of
its guaranteed count).

Output formats: ``json`` (canonical: sorted keys, two-space indent, byte
identical across runs for a fixed configuration), ``csv`` (lossless: floats
are written with full repr precision), and ``markdown`` (display: floats
rounded to six digits).  ``--out`` writes the report to a file instead of
stdout.  The environment variable RADII_LAB_THREADS caps the worker count
used to parallelize independent dimensions on the ``radii`` range path;
results are assembled in dimension order either way.
"""

from __future__ import annotations

import argparse
import csv as _csv
import io
import json
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, List, Optional, Sequence, TextIO, Tuple

import numpy as np

from . import poly_core, steiner_constants
from .mq_builder import MQSpec, block_evaluate, build_mq_poly, mq_agler_upper
from .operator_lab import (
    agler_ratio_search,
    eval_poly,
    random_commuting_tuple,
    spectral_norm,
    tuple_to_json,
)
from .poly_core import bohr_radius_estimate, l1_norm, poly_from_json, poly_to_json
from .radii_bounds import (
    BoundReport,
    ConsistencyError,
    assemble_report,
    report_rows,
    report_to_json_obj,
)
from .steiner_constants import (
    DixonConstants,
    EXHAUSTIVE_CAP,
    ck_upper,
    greedy_steiner,
    pol_bound,
    steiner_bounds,
)
from .transfer_realization import random_colligation, verify_lemma

OK = 0
USAGE_ERROR = 1
INVARIANT_ERROR = 2

CSV_COLUMNS = ("d", "quantity", "direction", "value", "method", "anchor")

_DOMAIN_ERRORS = (
    ValueError,
    OSError,
    poly_core.BudgetError,
    steiner_constants.BudgetError,
)


@dataclass
class RunConfig:
    """One resolved invocation: the subcommand plus its parameters."""

    command: str
    tol: float = 1e-8
    seed: int = 0
    precision: str = "double"
    fmt: str = "json"
    out: Optional[str] = None
    params: Dict[str, Any] = field(default_factory=dict)


# -- rendering -------------------------------------------------------------


def _json_text(payload: Any) -> str:
    return json.dumps(payload, sort_keys=True, indent=2) + "\n"


def _csv_text(header: Sequence[str], rows: Sequence[Sequence[Any]]) -> str:
    buf = io.StringIO()
    writer = _csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([repr(x) if isinstance(x, float) else str(x) for x in row])
    return buf.getvalue()


def _md_text(header: Sequence[str], rows: Sequence[Sequence[Any]], digits: int = 6) -> str:
    def fmt(x: Any) -> str:
        if isinstance(x, float):
            return f"{x:.{digits}f}" if 1e-4 <= abs(x) < 1e6 or x == 0.0 else f"{x:.{digits}g}"
        return str(x)

    lines = ["| " + " | ".join(header) + " |"]
    lines.append("| " + " | ".join("---" for _ in header) + " |")
    for row in rows:
        lines.append("| " + " | ".join(fmt(x) for x in row) + " |")
    return "\n".join(lines) + "\n"


def emit_table(reports: Sequence[BoundReport], fmt: str) -> str:
    """Render bound reports as canonical json, lossless csv, or markdown.

    csv uses the fixed column set ``CSV_COLUMNS`` with full-precision float
    repr so parsing the text recovers the values exactly; markdown keeps the
    same columns (anchors included) with six-digit display values.  An empty
    report list yields a header-only table.
    """
    if fmt == "json":
        return _json_text({"reports": [report_to_json_obj(r) for r in reports]})
    rows = [row for r in reports for row in report_rows(r)]
    if fmt == "csv":
        return _csv_text(CSV_COLUMNS, rows)
    if fmt == "markdown":
        return _md_text(CSV_COLUMNS, rows)
    raise ValueError(f"unknown format {fmt!r}")


def _kv_rows(payload: Dict[str, Any], prefix: str = "") -> List[Tuple[str, str]]:
    """Flatten a payload to sorted (field, value) rows for tabular formats."""
    rows: List[Tuple[str, str]] = []
    for key in sorted(payload):
        val = payload[key]
        name = prefix + key
        if isinstance(val, dict):
            rows.extend(_kv_rows(val, name + "."))
        elif isinstance(val, (list, tuple)):
            rows.append((name, json.dumps(val, sort_keys=True)))
        elif isinstance(val, float):
            rows.append((name, repr(val)))
        else:
            rows.append((name, str(val)))
    return rows


def _render(
    payload: Dict[str, Any],
    fmt: str,
    table: Optional[Tuple[Sequence[str], Sequence[Sequence[Any]]]] = None,
) -> str:
    """Generic command output: json payload, or a table (falls back to k/v)."""
    if fmt == "json":
        return _json_text(payload)
    if table is not None:
        header, rows = table
    else:
        header, rows = ("field", "value"), _kv_rows(payload)
    if fmt == "csv":
        return _csv_text(header, rows)
    if fmt == "markdown":
        return _md_text(header, rows)
    raise ValueError(f"unknown format {fmt!r}")


def _write_output(text: str, out: Optional[str], write: Callable[[str], Any]) -> None:
    if out is None:
        write(text)
    else:
        with open(out, "w") as fh:
            fh.write(text)


# -- subcommand handlers ---------------------------------------------------


def _worker_count(n: int) -> int:
    raw = os.environ.get("RADII_LAB_THREADS", "")
    try:
        cap = int(raw) if raw else min(8, os.cpu_count() or 1)
    except ValueError:
        cap = 1
    return max(1, min(n, cap))


def _plot_path(out: Optional[str]) -> str:
    if out is None:
        raise ValueError("--plot needs --out so the figure has a path to sit beside")
    base, _ = os.path.splitext(out)
    path = base + ".png"
    if path == out:
        path = base + ".fig.png"
    return path


def _cmd_radii(cfg: RunConfig, write: Callable[[str], Any]) -> int:
    if cfg.params.get("d") is not None:
        ds = [int(cfg.params["d"])]
    else:
        ds = list(cfg.params["d_range"])
    tol = cfg.tol if cfg.precision == "double" else min(cfg.tol, 1e-12)
    workers = _worker_count(len(ds))
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as ex:
            reports = list(ex.map(lambda d: assemble_report(d, tol), ds))
    else:
        reports = [assemble_report(d, tol) for d in ds]
    _write_output(emit_table(reports, cfg.fmt), cfg.out, write)
    if cfg.params.get("plot"):
        from .figures import plot_radii

        plot_radii(reports, _plot_path(cfg.out))
    return OK


def _cmd_bohr(cfg: RunConfig, write: Callable[[str], Any]) -> int:
    with open(cfg.params["poly"]) as fh:
        f = poly_from_json(json.load(fh))
    est = bohr_radius_estimate(f, tol=min(cfg.tol, 1e-10))
    payload = {
        "dim": f.dim,
        "degree": f.degree(),
        "terms": len(f.coeffs),
        "l1_norm": float(l1_norm(f)),
        "bohr_radius": float(est.value),
        "capped": bool(est.capped),
    }
    _write_output(_render(payload, cfg.fmt), cfg.out, write)
    return OK


def _cmd_mq(cfg: RunConfig, write: Callable[[str], Any]) -> int:
    spec = MQSpec(cfg.params["q"], cfg.params["m"])
    f = build_mq_poly(spec)
    l1 = float(l1_norm(f))
    upper = float(mq_agler_upper(spec))
    payload: Dict[str, Any] = {
        "q": spec.q,
        "m": spec.m,
        "d": spec.d,
        "terms": len(f.coeffs),
        "l1_norm": l1,
        "agler_upper": upper,
        "l1_to_agler_ratio": l1 / upper,
    }
    code = OK
    if cfg.params.get("verify"):
        violations: List[str] = []
        if abs(l1 - spec.q**spec.m) > 1e-9 * spec.q**spec.m:
            violations.append(f"l1 norm {l1} differs from q^m = {spec.q ** spec.m}")
        worst = max(abs(abs(c) - 1.0) for c in f.coeffs.values())
        if worst > 1e-12:
            violations.append(f"coefficient modulus deviates from 1 by {worst}")
        a = spec.matrix()
        gram_err = float(spectral_norm(a.conj().T @ a - spec.q * np.eye(spec.q)))
        if gram_err > 1e-9:
            violations.append(f"matrix gram defect {gram_err}")
        rng = np.random.default_rng(cfg.seed)
        norm_excess = 0.0
        eval_err = 0.0
        trials = 3
        for _ in range(trials):
            T = random_commuting_tuple(rng, spec.d, 4)
            direct = eval_poly(f, T)
            blocked = block_evaluate(spec, T)
            eval_err = max(eval_err, float(spectral_norm(direct - blocked)))
            norm_excess = max(norm_excess, float(spectral_norm(direct)) - upper)
        if eval_err > 1e-8 * max(1.0, upper):
            violations.append(f"block evaluation mismatch {eval_err}")
        if norm_excess > 1e-6:
            violations.append(f"operator norm exceeds bound by {norm_excess}")
        payload["verify"] = {
            "trials": trials,
            "max_eval_mismatch": eval_err,
            "max_norm_excess": norm_excess,
            "violations": violations,
        }
        if violations:
            code = INVARIANT_ERROR
    if cfg.params.get("emit"):
        with open(cfg.params["emit"], "w") as fh:
            fh.write(_json_text(poly_to_json(f)))
    _write_output(_render(payload, cfg.fmt), cfg.out, write)
    return code


def _cmd_agler_search(cfg: RunConfig, write: Callable[[str], Any]) -> int:
    with open(cfg.params["poly"]) as fh:
        f = poly_from_json(json.load(fh))
    res = agler_ratio_search(
        f,
        cfg.params["budget"],
        cfg.seed,
        cfg.params["dims"],
        certified=bool(cfg.params.get("certified")),
    )
    payload = {
        "dim": f.dim,
        "budget": cfg.params["budget"],
        "seed": cfg.seed,
        "dims": list(cfg.params["dims"]),
        "ratio": float(res.ratio),
        "denominator": float(res.denominator),
        "certified": bool(res.certified),
        "evaluations": int(res.evaluations),
        "budget_exhausted": bool(res.budget_exhausted),
        "witness": tuple_to_json(res.witness) if res.witness is not None else None,
    }
    _write_output(_render(payload, cfg.fmt), cfg.out, write)
    return OK


def _cmd_transfer(cfg: RunConfig, write: Callable[[str], Any]) -> int:
    d = cfg.params["d"]
    blocks = list(cfg.params["blocks"])
    kmax = cfg.params["kmax"]
    col = random_colligation(cfg.seed, d, blocks)
    rep = verify_lemma(col, kmax, tol=cfg.tol)
    records = [
        {
            "k": rec["k"],
            "coefficient_sum": float(rec["S_k"]),
            "bound": float(rec["bound"]),
            "margin": float(rec["margin"]),
            "holds": bool(rec["holds"]),
        }
        for rec in rep
    ]
    chain = rep.l1_chain
    payload = {
        "d": d,
        "blocks": blocks,
        "kmax": kmax,
        "seed": cfg.seed,
        "records": records,
        "l1_chain": {
            "r": float(chain.r),
            "lhs": float(chain.lhs),
            "rhs": float(chain.rhs),
            "margin": float(chain.margin),
            "holds": bool(chain.holds),
        },
        "all_hold": bool(rep.all_hold()),
    }
    header = ("k", "coefficient_sum", "bound", "margin", "holds")
    rows = [[rec[h] for h in header] for rec in records]
    _write_output(_render(payload, cfg.fmt, table=(header, rows)), cfg.out, write)
    return OK if rep.all_hold() else INVARIANT_ERROR


def _fraction_obj(fr) -> Dict[str, Any]:
    return {
        "numerator": fr.numerator,
        "denominator": fr.denominator,
        "value": float(fr),
    }


def _cmd_steiner(cfg: RunConfig, write: Callable[[str], Any]) -> int:
    t, k, d = cfg.params["t"], cfg.params["k"], cfg.params["d"]
    b = steiner_bounds(t, k, d)
    guarantee = math.ceil(b.dixon_lower)
    payload: Dict[str, Any] = {
        "t": t,
        "k": k,
        "d": d,
        "upper": _fraction_obj(b.upper),
        "dixon_lower": _fraction_obj(b.dixon_lower),
        "dixon_ceiling": guarantee,
        "crude_lower": b.crude_lower,
    }
    code = OK
    if cfg.params.get("construct"):
        system = greedy_steiner(t, k, d, cfg.seed)
        strategy = "exhaustive" if math.comb(d, k) <= EXHAUSTIVE_CAP else "sample"
        meets = len(system) >= guarantee
        payload["construction"] = {
            "strategy": strategy,
            "count": len(system),
            "guarantee": guarantee,
            "meets_guarantee": meets,
            "blocks": [list(blk) for blk in system.blocks],
        }
        # the counting guarantee is a theorem only for maximal (exhaustive) runs
        if strategy == "exhaustive" and not meets:
            code = INVARIANT_ERROR
    _write_output(_render(payload, cfg.fmt), cfg.out, write)
    return code


def _cmd_constants(cfg: RunConfig, write: Callable[[str], Any]) -> int:
    k, d = cfg.params["k"], cfg.params["d"]
    kwargs = {}
    if cfg.params.get("kappa") is not None:
        kwargs["kappa"] = cfg.params["kappa"]
    consts = DixonConstants(**kwargs)
    bound = ck_upper(
        k,
        d,
        consts,
        b_value=cfg.params.get("b_value"),
        crude_c=cfg.params.get("c"),
    )
    payload = {
        "k": k,
        "d": d,
        "G_lo": consts.G_lo,
        "G_hi": consts.G_hi,
        "gamma": consts.gamma,
        "kappa": bound.kappa,
        "bm_exponent": consts.bm_exponent,
        "pol_k": float(pol_bound(k)),
        "b_value": float(bound.b_value),
        "corollary": float(bound.corollary),
        "crude": bound.crude,
        "kappa_normalized": bool(bound.kappa_normalized),
    }
    _write_output(_render(payload, cfg.fmt), cfg.out, write)
    return OK


_HANDLERS: Dict[str, Callable[[RunConfig, Callable[[str], Any]], int]] = {
    "radii": _cmd_radii,
    "bohr": _cmd_bohr,
    "mq": _cmd_mq,
    "agler-search": _cmd_agler_search,
    "transfer": _cmd_transfer,
    "steiner": _cmd_steiner,
    "constants": _cmd_constants,
}


def run(config: RunConfig, stdout: Optional[TextIO] = None) -> int:
    """Execute one configured command, mapping failures to exit codes."""
    write = (stdout or sys.stdout).write
    handler = _HANDLERS.get(config.command)
    if handler is None:
        sys.stderr.write(f"error: unknown command {config.command!r}\n")
        return USAGE_ERROR
    try:
        return handler(config, write)
    except ConsistencyError as exc:
        sys.stderr.write(f"invariant violation: {exc}\n")
        return INVARIANT_ERROR
    except _DOMAIN_ERRORS as exc:
        sys.stderr.write(f"error: {exc}\n")
        return USAGE_ERROR


# -- argument parsing ------------------------------------------------------


class _Parser(argparse.ArgumentParser):
    """argparse exits with 2 on usage errors; 2 is reserved for invariant
    violations here, so usage problems are remapped to exit code 1."""

    def error(self, message):
        self.exit(USAGE_ERROR, f"{self.prog}: error: {message}\n")


def _drange(text: str) -> List[int]:
    parts = text.split(":")
    if len(parts) != 2:
        raise argparse.ArgumentTypeError(f"expected A:B, got {text!r}")
    try:
        lo, hi = int(parts[0]), int(parts[1])
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected integer endpoints, got {text!r}")
    if lo < 1 or hi < lo:
        raise argparse.ArgumentTypeError(f"need 1 <= A <= B, got {text!r}")
    return list(range(lo, hi + 1))


def _int_list(text: str) -> List[int]:
    try:
        vals = [int(p) for p in text.split(",") if p != ""]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")
    if not vals:
        raise argparse.ArgumentTypeError("expected at least one integer")
    return vals


def _add_output_options(sub: argparse.ArgumentParser) -> None:
    sub.add_argument(
        "--format",
        choices=("json", "csv", "markdown"),
        default="json",
        help="output format (default json)",
    )
    sub.add_argument("--out", default=None, help="write the report to this file instead of stdout")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(
        prog="radii-lab",
        description="explicit bounds for polydisk Bohr, Bohr-Agler, and Schur-Agler radii",
    )
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("radii", help="assemble consistency-checked bound reports")
    grp = p.add_mutually_exclusive_group(required=True)
    grp.add_argument("--d", type=int, default=None, help="single dimension")
    grp.add_argument("--d-range", type=_drange, default=None, metavar="A:B", help="inclusive dimension range")
    p.add_argument("--tol", type=float, default=1e-8, help="root and consistency tolerance")
    p.add_argument(
        "--precision",
        choices=("double", "extended"),
        default="double",
        help="extended tightens root tolerances to 1e-12",
    )
    p.add_argument("--plot", action="store_true", help="also render the bounds to a png beside --out")
    _add_output_options(p)

    p = sub.add_parser("bohr", help="Bohr radius of a polynomial from its json file")
    p.add_argument("--poly", required=True, help="polynomial json file")
    p.add_argument("--tol", type=float, default=1e-8, help="root tolerance")
    _add_output_options(p)

    p = sub.add_parser("mq", help="build a Fourier-matrix polynomial")
    p.add_argument("--q", type=int, required=True, help="block size q >= 2")
    p.add_argument("--m", type=int, required=True, help="stage count m >= 1")
    p.add_argument("--verify", action="store_true", help="check norms, gram identity, and block evaluation")
    p.add_argument("--emit", default=None, metavar="FILE", help="write the polynomial json here")
    p.add_argument("--seed", type=int, default=0, help="seed for the verification tuples")
    _add_output_options(p)

    p = sub.add_parser("agler-search", help="randomized Agler-to-sup ratio search")
    p.add_argument("--poly", required=True, help="polynomial json file")
    p.add_argument("--budget", type=int, required=True, help="number of tuple evaluations")
    p.add_argument("--seed", type=int, default=0, help="search seed")
    p.add_argument("--dims", type=_int_list, required=True, metavar="L", help="comma-separated matrix sizes")
    p.add_argument("--certified", action="store_true", help="use the certified l1 denominator")
    _add_output_options(p)

    p = sub.add_parser("transfer", help="verify coefficient bounds of a random colligation")
    p.add_argument("--seed", type=int, default=0, help="colligation seed")
    p.add_argument("--d", type=int, required=True, help="number of variables")
    p.add_argument("--blocks", type=_int_list, required=True, metavar="LIST", help="comma-separated block sizes")
    p.add_argument("--kmax", type=int, required=True, help="highest level to check")
    p.add_argument("--tol", type=float, default=1e-8, help="margin tolerance")
    _add_output_options(p)

    p = sub.add_parser("steiner", help="partial Steiner system bounds and construction")
    p.add_argument("--t", type=int, required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--construct", action="store_true", help="run the greedy construction")
    p.add_argument("--seed", type=int, default=0, help="candidate-order seed")
    _add_output_options(p)

    p = sub.add_parser("constants", help="explicit constant pipeline for degree-k ratios")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--kappa", type=float, default=None, help="normalization of the B_m bound")
    p.add_argument("--c", type=float, default=None, help="calibrated constant for the crude form")
    p.add_argument("--b-value", type=float, default=None, help="override B_{k-1} (use 1.0 at k=2)")
    _add_output_options(p)

    return parser


_BASE_KEYS = {"command", "tol", "seed", "precision", "format", "out"}


def config_from_args(args: argparse.Namespace) -> RunConfig:
    params = {k: v for k, v in vars(args).items() if k not in _BASE_KEYS}
    return RunConfig(
        command=args.command,
        tol=getattr(args, "tol", 1e-8),
        seed=getattr(args, "seed", 0),
        precision=getattr(args, "precision", "double"),
        fmt=getattr(args, "format", "json"),
        out=getattr(args, "out", None),
        params=params,
    )


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    return run(config_from_args(args))


if __name__ == "__main__":
    sys.exit(main())
