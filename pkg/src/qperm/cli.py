"""Command-line runner: reproducible verification runs with JSON and CSV reports.

Exit status: 0 when every requested certificate is EQUAL / passes, 2 when a
run completes with a negative finding (STRICTLY_LARGER, FAILS_AT, invalid
model), 1 on errors.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import os
import random
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path

from . import __version__
from .errors import QpermError
from .partitions import ColoredWord

log = logging.getLogger("qperm")

EXIT_OK, EXIT_ERROR, EXIT_NEGATIVE = 0, 1, 2


class UsageError(QpermError):
    pass


@dataclass
class RunConfig:
    command: str
    params: dict = field(default_factory=dict)
    out: str | None = None
    seed: int = 0

    def validate(self) -> None:
        tol = self.params.get("tol")
        if tol is not None and not 0 < tol < 1e-2:
            raise UsageError(f"tol: must lie in (0, 1e-2), got {tol}")
        for key in ("kmax", "rmax", "cap", "jobs"):
            val = self.params.get(key)
            if val is not None and val <= 0:
                raise UsageError(f"{key}: must be positive, got {val}")

    def resolved(self) -> dict:
        d = asdict(self)
        d["version"] = __version__
        d["cap"] = os.environ.get("QPERM_CAP")
        return d


def _write_reports(cfg: RunConfig, payload: dict, csv_text: str | None) -> None:
    doc = {"config": cfg.resolved(), **payload}
    text = json.dumps(doc, indent=2, default=str)
    if cfg.out is None:
        print(text)
        return
    out = Path(cfg.out)
    out.mkdir(parents=True, exist_ok=True)
    (out / f"{cfg.command}.json").write_text(text + "\n")
    if csv_text is not None:
        (out / f"{cfg.command}.csv").write_text(csv_text)
    log.info("reports written to %s", out)


def _parse_word_list(s: int, text: str) -> list[ColoredWord]:
    words = []
    for part in text.split(";"):
        part = part.strip()
        words.append(ColoredWord.parse(s, part) if part != "-" else ColoredWord(s, ()))
    return words


# ---------------------------------------------------------------- commands

def cmd_topgen(cfg: RunConfig, args) -> int:
    from .invariants import Verdict, certificates_to_csv, topgen_certificate

    ks = list(range(args.kmin, args.kmax + 1))
    with ThreadPoolExecutor(max_workers=args.jobs) as pool:
        certs = list(pool.map(lambda k: topgen_certificate(args.N, args.M, k, args.tol), ks))
    for c in certs:
        print(f"k={c.params['k']}: {c.dim_lhs} vs {c.dim_rhs} {c.verdict.value}"
              + (f" witness={c.witness_partitions}" if c.witness_partitions else ""), file=sys.stderr)
    _write_reports(cfg, {"certificates": [c.to_json() for c in certs],
                         "scope": f"verified up to degree {args.kmax}"},
                   certificates_to_csv(certs, args.timing))
    return _verdict_exit([c.verdict for c in certs], Verdict)


def cmd_refl_topgen(cfg: RunConfig, args) -> int:
    from .invariants import Verdict, all_words, certificates_to_csv, reflection_topgen_certificate

    if args.words:
        words = _parse_word_list(args.s, args.words)
    else:
        words = list(all_words(args.s, args.maxlen))
    with ThreadPoolExecutor(max_workers=args.jobs) as pool:
        certs = list(pool.map(lambda w: reflection_topgen_certificate(args.N, args.s, w, args.tol, args.M), words))
    for c in certs:
        print(f"w=({c.params['w']}): {c.dim_lhs} vs {c.dim_rhs} {c.verdict.value}", file=sys.stderr)
    _write_reports(cfg, {"certificates": [c.to_json() for c in certs]}, certificates_to_csv(certs, args.timing))
    return _verdict_exit([c.verdict for c in certs], Verdict)


def _verdict_exit(verdicts, Verdict) -> int:
    if any(v is Verdict.INCONCLUSIVE for v in verdicts):
        return EXIT_ERROR
    if any(v is Verdict.STRICTLY_LARGER for v in verdicts):
        return EXIT_NEGATIVE
    return EXIT_OK


def cmd_haar(cfg: RunConfig, args) -> int:
    from .exact import format_rational
    from .weingarten import haar_fix_dimension, haar_moment, weingarten_table

    payload: dict = {}
    rows_out = [["quantity", "k", "N", "value"]]
    if args.rows is not None or args.cols is not None:
        if args.rows is None or args.cols is None:
            raise UsageError("rows/cols: both must be given for a moment")
        rows = [int(x) for x in args.rows.split(",")]
        cols = [int(x) for x in args.cols.split(",")]
        val = haar_moment(args.N, rows, cols)
        payload["moment"] = {"rows": rows, "cols": cols, "value": format_rational(val)}
        rows_out.append([f"h(u[{args.rows}][{args.cols}])", len(rows), args.N, format_rational(val)])
    else:
        table = weingarten_table(args.k, args.N)
        payload["table"] = table.to_json()
        payload["fix_dimension"] = haar_fix_dimension(args.k, args.N)
        rows_out.append(["fix_dimension", args.k, args.N, payload["fix_dimension"]])
    buf = io.StringIO()
    csv.writer(buf, lineterminator="\n").writerows(rows_out)
    _write_reports(cfg, payload, buf.getvalue())
    return EXIT_OK


def _build(args):
    from . import latin, models

    kind = args.kind
    if kind == "latin":
        return models.from_latin(latin.corner_2x2_square(args.N))
    if kind == "circulant":
        return models.from_latin(latin.circulant_corner_square(args.N, args.M or args.N // 2))
    if kind == "generating":
        return models.from_latin(models.full_symmetric_latin_square(args.N))
    if kind == "deformed":
        return models.deform_corner_2x2(models.from_latin(latin.corner_2x2_square(args.N)))
    if kind == "random-latin":
        rng = random.Random(args.seed)
        sq = latin.complete_rectangle(latin.LatinRectangle(args.N, ()))
        perm = list(range(args.N))
        rng.shuffle(perm)
        rows = [[perm[x] for x in row] for row in sq.rows]
        rng.shuffle(rows)
        return models.from_latin(latin.LatinSquare(args.N, tuple(map(tuple, rows))))
    if kind == "glued":
        M = args.M or 5
        inner = models.deform_corner_2x2(models.from_latin(latin.corner_2x2_square(M)))
        return models.glue_corner(inner, args.N)
    if kind == "sum":
        x = models.deform_corner_2x2(models.from_latin(latin.corner_2x2_square(args.N)))
        y = models.from_latin(models.full_symmetric_latin_square(args.N))
        return models.direct_sum([x, y])
    raise UsageError(f"kind: unknown model kind {kind!r}")


def cmd_build_model(cfg: RunConfig, args) -> int:
    from .models import save_model, validate

    m = _build(args)
    rep = validate(m)
    if args.output:
        save_model(m, args.output)
        print(f"wrote {args.output} (N={m.N}, d={m.d}, flat={m.flat}, valid={rep.ok})", file=sys.stderr)
    else:
        print(json.dumps(m.to_json()))
    return EXIT_OK if rep.ok else EXIT_NEGATIVE


def cmd_check_model(cfg: RunConfig, args) -> int:
    from .models import is_classical, load_model, max_commutator, validate

    m = load_model(args.model)
    rep = validate(m, args.tol)
    payload = {"validation": rep.to_json(), "classical": is_classical(m, args.tol), "max_commutator": max_commutator(m)}
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["model", "N", "d", "flat", "valid", "classical", "max_commutator"])
    w.writerow([args.model, m.N, m.d, m.flat, rep.ok, payload["classical"], f"{payload['max_commutator']:.6g}"])
    _write_reports(cfg, payload, buf.getvalue())
    if not rep.ok:
        for f in rep.failures:
            print(f"validation: {f}", file=sys.stderr)
        return EXIT_ERROR
    return EXIT_OK


def cmd_describe(cfg: RunConfig, args) -> int:
    from .models import describe, load_model

    _write_reports(cfg, {"description": describe(load_model(args.model))}, None)
    return EXIT_OK


def cmd_inner_faithful(cfg: RunConfig, args) -> int:
    from .hopf_image import inner_faithfulness_report
    from .models import load_model, validate

    m = load_model(args.model)
    rep = validate(m)
    if not rep.ok:
        raise UsageError("model: invalid magic unitary: " + "; ".join(rep.failures[:5]))
    report = inner_faithfulness_report(m, args.rmax, args.tol, model_id=Path(args.model).stem,
                                       method=args.method, allow_large=args.allow_large)
    print(f"{report.verdict} dims={report.dims}", file=sys.stderr)
    _write_reports(cfg, {"report": report.to_json()}, report.to_csv())
    if report.verdict.startswith("INCONCLUSIVE"):
        return EXIT_ERROR
    return EXIT_NEGATIVE if report.fails_at is not None else EXIT_OK


def cmd_fusion(cfg: RunConfig, args) -> int:
    from . import fusion

    f = ColoredWord.parse(args.s, args.f)
    if args.op == "multiply":
        if args.g is None:
            raise UsageError("g: required for multiply")
        g = ColoredWord.parse(args.s, args.g)
        result = fusion.multiply(f, g)
        print(result)
        payload = {"op": "multiply", "f": str(f), "g": str(g), "result": result.to_json()}
    elif args.op == "dimension":
        val = fusion.dimension(f, args.N)
        print(val)
        payload = {"op": "dimension", "f": str(f), "N": args.N, "result": val}
    elif args.op == "restrict":
        if args.target is None:
            raise UsageError("target: required for restrict")
        result = fusion.restrict(f, args.target)
        print(result)
        payload = {"op": "restrict", "f": str(f), "target": args.target, "result": result.to_json()}
    else:  # involute
        result = fusion.involute(f)
        print(result)
        payload = {"op": "involute", "f": str(f), "result": str(result)}
    if cfg.out is not None:
        _write_reports(cfg, payload, None)
    return EXIT_OK


# ---------------------------------------------------------------- parser

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="qperm", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"qperm {__version__}")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, tol=1e-8, out=True):
        sp.add_argument("--tol", type=float, default=tol)
        if out:
            sp.add_argument("--out", help="directory for JSON/CSV reports (default: JSON on stdout)")
        sp.add_argument("--seed", type=int, default=0)

    sp = sub.add_parser("topgen", help="S_N vs corner S_M^+ generation certificates")
    sp.add_argument("--N", type=int, required=True)
    sp.add_argument("--M", type=int, required=True)
    sp.add_argument("--kmax", type=int, default=4)
    sp.add_argument("--kmin", type=int, default=1)
    sp.add_argument("--jobs", type=int, default=1)
    sp.add_argument("--timing", action="store_true", help="fill the CSV seconds column")
    common(sp)
    sp.set_defaults(func=cmd_topgen)

    sp = sub.add_parser("refl-topgen", help="S_N vs corner H_{N-1}^{s+} certificates on colored words")
    sp.add_argument("--N", type=int, required=True)
    sp.add_argument("--s", type=int, required=True)
    sp.add_argument("--M", type=int, default=None)
    sp.add_argument("--words", help="semicolon-separated words, letters comma-separated (e.g. '1,1;1,0')")
    sp.add_argument("--maxlen", type=int, default=3)
    sp.add_argument("--jobs", type=int, default=1)
    sp.add_argument("--timing", action="store_true")
    common(sp)
    sp.set_defaults(func=cmd_refl_topgen)

    sp = sub.add_parser("haar", help="Weingarten tables and Haar moments")
    sp.add_argument("--N", type=int, required=True)
    sp.add_argument("--k", type=int, default=2)
    sp.add_argument("--rows", help="comma-separated row indices (1-based)")
    sp.add_argument("--cols", help="comma-separated column indices (1-based)")
    common(sp)
    sp.set_defaults(func=cmd_haar)

    sp = sub.add_parser("build-model", help="construct a model and write model.json")
    sp.add_argument("--kind", required=True,
                    choices=["latin", "circulant", "generating", "deformed", "random-latin", "glued", "sum"])
    sp.add_argument("--N", type=int, required=True)
    sp.add_argument("--M", type=int, default=None)
    sp.add_argument("--output", "-o")
    common(sp, out=False)
    sp.set_defaults(func=cmd_build_model, out=None)

    sp = sub.add_parser("check-model", help="validate a model file and test commutativity")
    sp.add_argument("--model", required=True)
    common(sp)
    sp.set_defaults(func=cmd_check_model)

    sp = sub.add_parser("describe", help="row/column Gram summary of a model file")
    sp.add_argument("--model", required=True)
    common(sp)
    sp.set_defaults(func=cmd_describe)

    sp = sub.add_parser("inner-faithful", help="level-by-level Hopf image dimensions")
    sp.add_argument("--model", required=True)
    sp.add_argument("--rmax", type=int, default=4)
    sp.add_argument("--method", choices=["eigen", "cesaro"], default="eigen")
    sp.add_argument("--allow-large", action="store_true", help="permit levels beyond r=4")
    common(sp)
    sp.set_defaults(func=cmd_inner_faithful)

    sp = sub.add_parser("fusion", help="fusion ring R_s computations")
    sp.add_argument("op", choices=["multiply", "dimension", "restrict", "involute"])
    sp.add_argument("--s", type=int, required=True)
    sp.add_argument("--f", required=True, help="word, letters comma-separated ('' for the empty word)")
    sp.add_argument("--g")
    sp.add_argument("--N", type=int, default=5)
    sp.add_argument("--target", type=int, help="target modulus for restrict")
    common(sp, tol=1e-8)
    sp.set_defaults(func=cmd_fusion)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    params = {k: v for k, v in vars(args).items() if k not in ("func", "command", "out", "seed", "verbose")}
    cfg = RunConfig(args.command, params, getattr(args, "out", None), args.seed)
    try:
        cfg.validate()
        return args.func(cfg, args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    except (QpermError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
