"""Command-line interface: one subcommand per library operation.

Output is JSON (default), CSV or plain text. JSON and CSV output is
byte-for-byte deterministic. Exact rationals are written as
``{"exact": "num/den", "float": ...}`` in JSON and as a pair of columns
(``x`` and ``x_float``) in CSV. Integers beyond 2**53 - 1 in magnitude are
written as decimal strings so that no consumer has to assume 64-bit numbers.

Exit status: 0 on success, 1 on a domain error (a JSON error object is
printed in JSON mode), 2 on a usage error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Callable

from . import __version__
from .constructor import DEFAULT_STATE_CAP, build_sequence
from .core import Decomposition, Sequence, ZeckError, parse_schedule
from .decomposer import DEFAULT_LIMIT, decompose, enumerate_decompositions
from .gnary import build_gnary_bruteforce, build_gnary_gapformula, gap_report
from .stats import (
    empirical_summand_pmf,
    gaussian_distance,
    lyapunov_series,
    model_summand_pmf,
    schedule_moments,
    theorem35_check,
)
from .tree import bin_equivalence_check, build_tree, recurrence_check, telephone_check, unique_decomposition_check
from .uniqueness import classify, divisibility_check, verify_exhaustive

SAFE_INT = 2**53 - 1

# Errors that mean "the request was well formed but cannot be carried out".
DOMAIN_ERRORS = (ZeckError, ValueError, IndexError, OverflowError, RuntimeError)


# -- rendering helpers -------------------------------------------------------


def _float(q: Fraction) -> float | None:
    try:
        return float(q)
    except OverflowError:
        return None


def rational(q: Fraction) -> dict[str, Any]:
    q = Fraction(q)
    return {"exact": f"{q.numerator}/{q.denominator}", "float": _float(q)}


def jsonable(obj: Any) -> Any:
    if isinstance(obj, bool) or obj is None or isinstance(obj, (str, float)):
        return obj
    if isinstance(obj, int):
        return obj if -SAFE_INT <= obj <= SAFE_INT else str(obj)
    if isinstance(obj, Fraction):
        return rational(obj)
    if isinstance(obj, dict):
        return {str(k): jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [jsonable(v) for v in obj]
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def _cell(v: Any) -> str:
    if v is None:
        return ""
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return repr(v)
    if isinstance(v, (list, tuple)):
        return " ".join(_cell(x) for x in v)
    return str(v)


def _qcells(q: Fraction | None) -> list[str]:
    """``[exact, float]`` CSV cells for a rational (blank when absent)."""
    if q is None:
        return ["", ""]
    f = _float(q)
    return [f"{q.numerator}/{q.denominator}", "" if f is None else repr(f)]


@dataclass
class Result:
    payload: dict[str, Any]
    header: list[str]
    rows: list[list[Any]] = field(default_factory=list)
    text: str = ""

    def render(self, fmt: str) -> str:
        if fmt == "json":
            return json.dumps(jsonable(self.payload), indent=2) + "\n"
        if fmt == "csv":
            buf = io.StringIO()
            w = csv.writer(buf, lineterminator="\n")
            w.writerow(self.header)
            for row in self.rows:
                w.writerow([_cell(v) for v in row])
            return buf.getvalue()
        return self.text if self.text.endswith("\n") else self.text + "\n"


def _decomp(seq: Sequence, d: Decomposition) -> dict[str, Any]:
    return {
        "value": d.value,
        "numSummands": d.num_summands,
        "summands": d.summands(seq),
        "picks": [
            {"bin": n, "positions": list(pos), "terms": [seq.bin(n)[p] for p in pos]}
            for n, pos in d.picks
        ],
    }


def _decomp_rows(seq: Sequence, d: Decomposition, prefix: list[Any] = ()) -> list[list[Any]]:
    return [[*prefix, n, p, seq.bin(n)[p]] for n, pos in d.picks for p in pos]


def _plus(seq: Sequence, d: Decomposition) -> str:
    return " + ".join(str(t) for t in sorted(d.summands(seq), reverse=True))


def _bins_text(bins, label: str = "bin") -> str:
    return "\n".join(f"{label} {n}: " + " ".join(map(str, terms)) for n, terms in enumerate(bins, 1))


# -- command handlers --------------------------------------------------------


def _sequence(args) -> Sequence:
    return build_sequence(parse_schedule(args.schedule), args.bins, args.state_cap)


def cmd_construct(args) -> Result:
    seq = _sequence(args)
    payload = {
        "command": "construct",
        "schedule": seq.schedule.render(),
        "numBins": seq.num_bins,
        "bins": [list(b) for b in seq.bins],
    }
    rows = [[n, p, t] for n, terms in enumerate(seq.bins, 1) for p, t in enumerate(terms)]
    return Result(payload, ["bin", "position", "term"], rows, _bins_text(seq.bins))


def cmd_decompose(args) -> Result:
    seq = _sequence(args)
    d = decompose(seq, args.x)
    payload = {
        "command": "decompose",
        "schedule": seq.schedule.render(),
        "numBins": seq.num_bins,
        "x": args.x,
        "found": d is not None,
        "decomposition": _decomp(seq, d) if d else None,
    }
    if d is None:
        return Result(payload, ["bin", "position", "term"], [], f"{args.x}: no legal decomposition")
    return Result(payload, ["bin", "position", "term"], _decomp_rows(seq, d), f"{args.x} = {_plus(seq, d)}")


def cmd_enumerate(args) -> Result:
    seq = _sequence(args)
    ds = enumerate_decompositions(seq, args.x, args.limit)
    payload = {
        "command": "enumerate",
        "schedule": seq.schedule.render(),
        "numBins": seq.num_bins,
        "x": args.x,
        "limit": args.limit,
        "count": len(ds.found),
        "truncated": ds.truncated,
        "decompositions": [_decomp(seq, d) for d in ds.found],
    }
    rows = [r for i, d in enumerate(ds.found) for r in _decomp_rows(seq, d, [i])]
    lines = [f"{args.x} = {_plus(seq, d)}" for d in ds.found]
    lines.append(f"{len(ds.found)} decomposition(s)" + (" (truncated)" if ds.truncated else ""))
    return Result(payload, ["index", "bin", "position", "term"], rows, "\n".join(lines))


def cmd_classify(args) -> Result:
    sched = parse_schedule(args.schedule)
    v = classify(sched, args.bins)
    per_bin = []
    rows = []
    for r in v.per_bin:
        b = sched.size(r.n)
        allowed = sorted(sched.allowed_set(r.n))
        per_bin.append({
            "n": r.n, "b": b, "allowed": allowed, "form": r.form,
            "case": r.case, "k": r.k, "subcase": r.subcase, "label": r.label(),
        })
        rows.append([r.n, b, allowed, r.form, r.case, r.k, r.subcase, r.label()])
    payload = {
        "command": "classify",
        "schedule": sched.render(),
        "numBins": args.bins,
        "classifierVerdict": v.classifier_verdict,
        "perBin": per_bin,
    }
    text = [f"verdict: {v.classifier_verdict}"] + [f"bin {row[0]}: {row[-1]}" for row in rows]
    return Result(payload, ["n", "b", "allowed", "form", "case", "k", "subcase", "label"], rows, "\n".join(text))


def cmd_verify_unique(args) -> Result:
    seq = _sequence(args)
    v = verify_exhaustive(seq, args.bound, args.threads, args.state_cap)
    col = v.collision
    payload = {
        "command": "verify-unique",
        "schedule": seq.schedule.render(),
        "numBins": seq.num_bins,
        "bound": v.bound,
        "empiricalVerdict": v.empirical_verdict,
        "gap": v.gap,
        "collision": None if col is None else {
            "x": col.x, "first": _decomp(seq, col.first), "second": _decomp(seq, col.second),
        },
    }
    if col is not None:
        row = [v.empirical_verdict, v.bound, col.x, _plus(seq, col.first), _plus(seq, col.second)]
        text = f"collision: {col.x} = {row[3]} = {row[4]}"
    elif v.gap is not None:
        row = [v.empirical_verdict, v.bound, v.gap, None, None]
        text = f"gap: {v.gap} has no legal decomposition"
    else:
        row = [v.empirical_verdict, v.bound, None, None, None]
        text = f"unique decompositions for 1..{v.bound}"
    return Result(payload, ["empiricalVerdict", "bound", "x", "first", "second"], [row], text)


def cmd_divisibility(args) -> Result:
    seq = _sequence(args)
    r = divisibility_check(seq, args.n)
    payload = {
        "command": "divisibility",
        "schedule": seq.schedule.render(),
        "numBins": seq.num_bins,
        "n0": r.n0,
        "k": r.k,
        "modulus": r.k + 1,
        "allDivisible": r.all_divisible,
        "offenders": list(r.offenders),
    }
    text = f"bins 1..{r.n0 - 1} give 1..{r.k}; later terms divisible by {r.k + 1}: {r.all_divisible}"
    return Result(payload, ["n0", "k", "allDivisible", "offenders"], [[r.n0, r.k, r.all_divisible, list(r.offenders)]], text)


def cmd_moments(args) -> Result:
    sched = parse_schedule(args.schedule)
    ns = [args.n] if args.n is not None else list(range(1, args.max_n + 1))
    out, rows, lines = [], [], []
    for n in ns:
        m = schedule_moments(sched, n, args.delta)
        b = sched.size(n)
        out.append({"n": n, "b": b, "mu": m.mu, "sigma2": m.sigma2, "rho2d": m.rho2d})
        rows.append([n, b, *_qcells(m.mu), *_qcells(m.sigma2), *_qcells(m.rho2d)])
        lines.append(f"n={n} b={b} mu={m.mu} sigma2={m.sigma2} rho2d={m.rho2d}")
    payload = {"command": "moments", "schedule": sched.render(), "delta": args.delta, "rows": out}
    header = ["n", "b", "mu", "mu_float", "sigma2", "sigma2_float", "rho2d", "rho2d_float"]
    return Result(payload, header, rows, "\n".join(lines))


def cmd_lyapunov(args) -> Result:
    sched = parse_schedule(args.schedule)
    series = lyapunov_series(sched, args.delta, args.max_n)
    out, rows, lines = [], [], []
    for r in series.rows:
        out.append({"N": r.N, "s2": r.s2, "e": r.e, "squaredRatio": r.squared_ratio})
        rows.append([r.N, *_qcells(r.s2), *_qcells(r.e), *_qcells(r.squared_ratio)])
        lines.append(f"N={r.N} squaredRatio={r.squared_ratio}")
    payload = {"command": "lyapunov", "schedule": sched.render(), "delta": args.delta, "rows": out}
    header = ["N", "s2", "s2_float", "e", "e_float", "squaredRatio", "squaredRatio_float"]
    return Result(payload, header, rows, "\n".join(lines))


def _pmf_result(command: str, schedule: str, pmf) -> Result:
    probs = pmf.probs
    payload = {
        "command": command,
        "schedule": schedule,
        "source": pmf.source,
        "N": pmf.N,
        "includeTopBin": pmf.include_top_bin,
        "total": pmf.total,
        "rows": [{"k": k, "count": pmf.counts[k], "prob": probs[k]} for k in pmf.support],
        "mean": pmf.mean,
        "variance": pmf.variance,
    }
    rows = [[k, pmf.counts[k], *_qcells(probs[k])] for k in pmf.support]
    lines = [f"{k}: {pmf.counts[k]}/{pmf.total}" for k in pmf.support]
    lines.append(f"mean={pmf.mean} variance={pmf.variance}")
    return Result(payload, ["k", "count", "prob", "prob_float"], rows, "\n".join(lines))


def cmd_model_dist(args) -> Result:
    sched = parse_schedule(args.schedule)
    pmf = model_summand_pmf(sched, args.n, args.include_top_bin)
    return _pmf_result("model-dist", sched.render(), pmf)


def cmd_empirical_dist(args) -> Result:
    sched = parse_schedule(args.schedule)
    seq = build_sequence(sched, args.bins if args.bins is not None else args.n, args.state_cap)
    pmf = empirical_summand_pmf(seq, args.n)
    return _pmf_result("empirical-dist", sched.render(), pmf)


def cmd_ks(args) -> Result:
    sched = parse_schedule(args.schedule)
    rep = gaussian_distance(model_summand_pmf(sched, args.n, args.include_top_bin))
    payload = {
        "command": "ks",
        "schedule": sched.render(),
        "N": args.n,
        "includeTopBin": args.include_top_bin,
        "ksDistance": rep.ks_distance,
        "mean": rep.mean,
        "std": rep.std,
        "gridSize": rep.grid_size,
    }
    row = [args.n, args.include_top_bin, rep.ks_distance, rep.mean, rep.std, rep.grid_size]
    return Result(payload, ["N", "includeTopBin", "ksDistance", "mean", "std", "gridSize"], [row],
                  f"KS distance {rep.ks_distance!r} (mean {rep.mean!r}, std {rep.std!r})")


def cmd_thm35(args) -> Result:
    rep = theorem35_check(args.max_n, args.delta)
    payload = {
        "command": "thm35",
        "delta": rep.delta,
        "maxN": args.max_n,
        "rows": [{"n": n, "rho": r, "ratio": q} for n, (r, q) in enumerate(zip(rep.rho, rep.ratios), 1)],
        "maxRatio": rep.max_ratio,
        "argmax": rep.argmax,
        "degree": rep.degree,
        "bounded": rep.bounded,
        "edgeProxy": rep.edge_proxy,
        "sigma2IsNOver4": rep.sigma2_is_n_over_4,
        "matchesGeneralFormula": rep.matches_general_formula,
        "cancellations": list(rep.cancellations),
    }
    rows = [[n, *_qcells(r), *_qcells(q)] for n, (r, q) in enumerate(zip(rep.rho, rep.ratios), 1)]
    text = (f"bounded={rep.bounded} degree={rep.degree} maxRatio={rep.max_ratio} at n={rep.argmax}\n"
            f"sigma2 = n/4: {rep.sigma2_is_n_over_4}")
    return Result(payload, ["n", "rho", "rho_float", "ratio", "ratio_float"], rows, text)


def _gnary_sequence(args) -> tuple[Sequence, str]:
    if args.formula:
        return build_gnary_gapformula(args.b, args.g, args.bins), "gap-formula"
    return build_gnary_bruteforce(args.b, args.g, args.bins), "bruteforce"


def cmd_gnary(args) -> Result:
    seq, method = _gnary_sequence(args)
    payload = {
        "command": "gnary",
        "b": args.b,
        "g": args.g,
        "method": method,
        "schedule": seq.schedule.render(),
        "numBins": seq.num_bins,
        "bins": [list(t) for t in seq.bins],
    }
    rows = [[n, p, t] for n, terms in enumerate(seq.bins, 1) for p, t in enumerate(terms)]
    return Result(payload, ["bin", "position", "term"], rows, _bins_text(seq.bins))


def cmd_gnary_report(args) -> Result:
    seq, method = _gnary_sequence(args)
    rep = gap_report(seq, args.state_cap)
    gaps, rows = [], []
    for (n, j), gap in rep.gaps.items():
        item = {
            "n": n, "j": j, "gap": gap, "omegaPrev": rep.omegas[n - 1],
            "exceedsOmegaPrev": rep.gap_verdicts[(n, j)],
            "equalsOmegaPrevPlusOne": rep.uniform_gap_verdicts.get((n, j)),
            "equalsOmegaN": rep.literal_remark_verdicts.get((n, j)),
        }
        gaps.append(item)
        rows.append(list(item.values()))
    payload = {
        "command": "gnary-report",
        "b": args.b,
        "g": args.g,
        "method": method,
        "bins": [list(t) for t in seq.bins],
        "omegas": rep.omegas,
        "gaps": gaps,
        "representable": [
            {"n": n, "actual": a, "predicted": p}
            for n, (a, p) in enumerate(zip(rep.representable, rep.predicted), 1)
        ],
        "allGapsExceedOmega": rep.all_gaps_exceed_omega,
        "gapsEqualOmegaPlusOne": rep.gaps_equal_omega_plus_one,
    }
    lines = [_bins_text(seq.bins), f"omegas: {' '.join(map(str, rep.omegas))}"]
    lines += [f"|I_{n}| = {a} (predicted {p})" for n, (a, p) in enumerate(zip(rep.representable, rep.predicted), 1)]
    lines.append(f"all gaps exceed previous omega: {rep.all_gaps_exceed_omega}")
    header = ["n", "j", "gap", "omegaPrev", "exceedsOmegaPrev", "equalsOmegaPrevPlusOne", "equalsOmegaN"]
    return Result(payload, header, rows, "\n".join(lines))


def cmd_tree(args) -> Result:
    tree = build_tree(args.levels)
    payload = {"command": "tree", "numLevels": args.levels, "levels": [list(lv) for lv in tree.levels]}
    rows = [[i, j, t] for i, lv in enumerate(tree.levels, 1) for j, t in enumerate(lv, 1)]
    width = len(" ".join(map(str, tree.levels[-1])))
    text = "\n".join(" ".join(map(str, lv)).center(width).rstrip() for lv in tree.levels)
    return Result(payload, ["level", "position", "term"], rows, text)


def cmd_tree_check(args) -> Result:
    tree = build_tree(args.levels)
    tel = telephone_check(tree)
    equiv = bin_equivalence_check(args.levels, args.state_cap)
    rec = recurrence_check(tree)
    failures = unique_decomposition_check(tree)
    payload = {
        "command": "tree-check",
        "numLevels": args.levels,
        "diagonal": tree.diagonal,
        "telephone": tel,
        "binEquivalence": equiv,
        "recurrence": {
            name: {"checked": len(r.checked), "mismatches": [list(m) for m in r.mismatches]}
            for name, r in rec.items()
        },
        "uniqueDecomposition": {"ok": not failures, "failures": [list(f) for f in failures]},
    }
    rows = [["telephone", tel], ["binEquivalence", equiv]]
    rows += [[f"recurrence:{name}", not r.mismatches] for name, r in rec.items()]
    rows.append(["uniqueDecomposition", not failures])
    text = "\n".join(f"{name}: {ok}" for name, ok in rows)
    return Result(payload, ["check", "passed"], rows, text)


# -- argument parsing --------------------------------------------------------


def _uint(text: str) -> int:
    if not text.isdigit():
        raise argparse.ArgumentTypeError(f"expected a nonnegative integer, got {text!r}")
    return int(text)


def _posint(text: str) -> int:
    v = _uint(text)
    if v < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text!r}")
    return v


def _add(p: argparse.ArgumentParser, *names: str) -> None:
    for name in names:
        if name == "schedule":
            p.add_argument("--schedule", required=True, metavar="SPEC", help="bin schedule, e.g. const:1/zero-one/adj:1")
        elif name == "bins":
            p.add_argument("--bins", type=_uint, required=True, help="number of bins to build")
        elif name == "x":
            p.add_argument("--x", type=_posint, required=True, help="target integer")
        elif name == "delta":
            p.add_argument("--delta", type=_posint, required=True)
        elif name == "max-n":
            p.add_argument("--max-n", type=_posint, required=True)
        elif name == "n":
            p.add_argument("--n", type=_posint, required=True, help="bin index")
        elif name == "include-top-bin":
            p.add_argument("--include-top-bin", action="store_true", help="count a nonzero pick from bin N")
        elif name == "state-cap":
            p.add_argument("--state-cap", type=_posint, default=DEFAULT_STATE_CAP)
        elif name == "gnary":
            p.add_argument("--b", type=_posint, required=True, help="bin size")
            p.add_argument("--g", type=_posint, required=True, help="terms per used bin")
            p.add_argument("--bins", type=_posint, required=True)
            p.add_argument("--formula", action="store_true", help="use the uniform-gap formula after bin 1")
        elif name == "levels":
            p.add_argument("--levels", type=_posint, required=True)
        else:  # pragma: no cover
            raise KeyError(name)
    p.add_argument("--format", choices=("json", "csv", "text"), default="json")
    p.add_argument("--out", metavar="PATH", help="write output here instead of stdout")


COMMANDS: dict[str, tuple[Callable[[Any], Result], str]] = {
    "construct": (cmd_construct, "build a sequence greedily"),
    "decompose": (cmd_decompose, "first legal decomposition of x"),
    "enumerate": (cmd_enumerate, "all legal decompositions of x"),
    "classify": (cmd_classify, "uniqueness classifier on the allowed sets"),
    "verify-unique": (cmd_verify_unique, "exhaustive uniqueness check"),
    "divisibility": (cmd_divisibility, "divisibility of later terms by k+1"),
    "moments": (cmd_moments, "exact per-bin moments"),
    "lyapunov": (cmd_lyapunov, "cumulative Lyapunov ratio"),
    "model-dist": (cmd_model_dist, "model distribution of the number of summands"),
    "empirical-dist": (cmd_empirical_dist, "empirical distribution of the number of summands"),
    "ks": (cmd_ks, "KS distance of the model distribution to the normal law"),
    "thm35": (cmd_thm35, "absolute-moment growth for b_n = n, A_n = {0..n}"),
    "gnary": (cmd_gnary, "build a g-nary sequence"),
    "gnary-report": (cmd_gnary_report, "gaps and representable counts of a g-nary sequence"),
    "tree": (cmd_tree, "build the Zeckendorf tree"),
    "tree-check": (cmd_tree_check, "checks on the Zeckendorf tree"),
}

FLAGS = {
    "construct": ("schedule", "bins", "state-cap"),
    "decompose": ("schedule", "bins", "x", "state-cap"),
    "enumerate": ("schedule", "bins", "x", "state-cap"),
    "classify": ("schedule", "bins"),
    "verify-unique": ("schedule", "bins", "state-cap"),
    "divisibility": ("schedule", "bins", "n", "state-cap"),
    "moments": ("schedule", "delta"),
    "lyapunov": ("schedule", "delta", "max-n"),
    "model-dist": ("schedule", "n", "include-top-bin"),
    "empirical-dist": ("schedule", "n", "state-cap"),
    "ks": ("schedule", "n", "include-top-bin"),
    "thm35": ("max-n",),
    "gnary": ("gnary",),
    "gnary-report": ("gnary", "state-cap"),
    "tree": ("levels",),
    "tree-check": ("levels", "state-cap"),
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="zeckbins", description=__doc__.splitlines()[0], allow_abbrev=False)
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")
    for name, (_, help_text) in COMMANDS.items():
        p = sub.add_parser(name, help=help_text, allow_abbrev=False)
        _add(p, *FLAGS[name])
        if name == "enumerate":
            p.add_argument("--limit", type=_posint, default=DEFAULT_LIMIT)
        elif name == "verify-unique":
            p.add_argument("--bound", type=_posint, help="check 1..bound (default min(omega_N, 10000))")
            p.add_argument("--threads", type=_posint, default=1)
        elif name == "moments":
            g = p.add_mutually_exclusive_group(required=True)
            g.add_argument("--n", type=_posint, help="a single bin")
            g.add_argument("--max-n", type=_posint, help="bins 1..max-n")
        elif name == "empirical-dist":
            p.add_argument("--bins", type=_posint, help="bins to build (default N)")
        elif name == "thm35":
            p.add_argument("--delta", type=_posint, default=2)
    return parser


def _write(text: str, out: str | None) -> None:
    if out:
        with open(out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # argparse reports usage errors this way
        return exc.code if isinstance(exc.code, int) else 2
    handler = COMMANDS[args.command][0]
    try:
        result = handler(args)
    except DOMAIN_ERRORS as exc:
        if args.format == "json":
            err = {"error": {"type": type(exc).__name__, "message": str(exc)}}
            sys.stdout.write(json.dumps(err, indent=2) + "\n")
        else:
            sys.stderr.write(f"error: {type(exc).__name__}: {exc}\n")
        return 1
    _write(result.render(args.format), args.out)
    return 0


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
