"""Command-line harness: ``framesplit verify | fuzz | sweep | show``.

Exit codes: 0 when every check passed (or was inapplicable), 1 on any
violation, 2 on usage or input errors.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Iterable, List, Optional

import numpy as np

from . import _stream
from .errors import FormatError, FrameSplitError, PreconditionError
from .frame import (Frame, canonical_dual, frame_bounds, frame_from_json, frame_to_json,
                    parseval_deviation, random_alternate_dual, to_parseval)
from .gen import (GenConfig, named_frame, random_frame, random_parseval, random_split_pair,
                  random_subset, random_unit_vector, random_weights)
from .inequalities import (FAMILY_CHECKS, Family, dual_split_operators, identity_split_margin,
                           verify_dual_identity, verify_dual_split, verify_general_identity,
                           verify_mixed_energy_scalar, verify_parseval_identity,
                           verify_weighted_dual_split)
from .linalg import MarginReport, psd_tolerance_from_env
from .splitting import IndexSubset, SplitPair, check_lemma_part, split_from_subset

EXIT_OK, EXIT_VIOLATION, EXIT_USAGE = 0, 1, 2

RELATIONS = ("lemma", "t22", "t27", "t210", "cor25", "parseval", "general",
             "dual", "t213", "weighted", "lemma212")
LAMBDA_FREE = {"lemma", "parseval", "general", "dual"}

# relation -> report id the sweep follows when only the family is named
SWEEP_DEFAULTS = {"t22": "t22.lower", "t27": "t27.upper", "t210": "t210.lower",
                  "cor25": "cor25.lower", "t213": "t213", "weighted": "weighted",
                  "lemma212": "lemma212"}


class CliUsageError(Exception):
    pass


# --- inputs ------------------------------------------------------------------


def load_frame(source: str) -> Frame:
    """``named:<name>``, ``random:<d>,<m>,<seed>``, ``parseval:<d>,<m>,<seed>`` or a JSON path."""
    if source.startswith("named:"):
        return named_frame(source[len("named:"):])
    for prefix, make in (("random:", random_frame), ("parseval:", random_parseval)):
        if source.startswith(prefix):
            parts = source[len(prefix):].split(",")
            try:
                d, m, seed = (int(x) for x in parts)
            except ValueError:
                raise CliUsageError(f"expected {prefix}<d>,<m>,<seed>, got {source!r}") from None
            return make(GenConfig(d, m, seed))
    path = Path(source)
    try:
        text = path.read_text()
    except OSError as exc:
        raise CliUsageError(f"cannot read frame file {source!r}: {exc.strerror}") from None
    try:
        return frame_from_json(text)
    except FormatError as exc:
        raise CliUsageError(f"{source}: {exc}") from None


def parse_floats(text: str, what: str) -> List[float]:
    out = []
    for tok in text.split(","):
        tok = tok.strip()
        try:
            x = float(tok)
        except ValueError:
            raise CliUsageError(f"bad {what} value {tok!r}") from None
        if not math.isfinite(x):
            raise CliUsageError(f"{what} values must be finite, got {tok!r}")
        out.append(x)
    return out


def parse_range(text: str, what: str, cast=float):
    """``lo,hi`` (integer ranges may also be written ``lo-hi``)."""
    parts = text.split(",")
    if len(parts) == 1 and cast is int and text.count("-") == 1:
        parts = text.split("-")
    if len(parts) != 2:
        raise CliUsageError(f"{what} must look like lo,hi, got {text!r}")
    try:
        lo, hi = cast(parts[0]), cast(parts[1])
    except ValueError:
        raise CliUsageError(f"{what} must look like lo,hi, got {text!r}") from None
    if not (math.isfinite(lo) and math.isfinite(hi)) or lo > hi:
        raise CliUsageError(f"{what} needs finite lo <= hi, got {text!r}")
    return lo, hi


def parse_relations(text: Optional[str]) -> List[str]:
    if not text or text == "all":
        return list(RELATIONS)
    rels = [r.strip() for r in text.split(",") if r.strip()]
    bad = [r for r in rels if r not in RELATIONS]
    if bad:
        raise CliUsageError(f"unknown relation(s) {bad}; choose from {', '.join(RELATIONS)}")
    return rels


# --- report emission ---------------------------------------------------------


@dataclass
class Tally:
    counts: dict = field(default_factory=lambda: {"passed": 0, "failed": 0, "inapplicable": 0})
    worst_margin: Optional[float] = None

    def add(self, rep: MarginReport) -> None:
        self.counts[rep.outcome] += 1
        if rep.margin is not None:
            norm = rep.margin / rep.scale
            if self.worst_margin is None or norm < self.worst_margin:
                self.worst_margin = norm

    @property
    def total(self) -> int:
        return sum(self.counts.values())


def emit(rep: MarginReport, inputs: dict, out) -> None:
    out.write(json.dumps(rep.to_dict(inputs)) + "\n")


# --- relation suites ---------------------------------------------------------


def frame_relations(fr: Frame, subset: IndexSubset, f: np.ndarray, lams: Iterable[float],
                    relations: Iterable[str], tol: float, dual_frame: Optional[Frame] = None,
                    weights: Optional[np.ndarray] = None, pq: Optional[tuple] = None,
                    force: bool = False) -> List[MarginReport]:
    """Run the selected relations on one (frame, subset, vector) instance."""
    relations = list(relations)
    lams = list(lams)
    reports: List[MarginReport] = []
    sp = split_from_subset(fr, subset, tol)
    if "lemma" in relations:
        reports += lemma_suite(sp, tol, pq, force)
    if "parseval" in relations:
        try:
            reports += verify_parseval_identity(fr, subset, f, tol)
        except PreconditionError as exc:
            reports += [MarginReport.inapplicable(r, 1.0, tol, note=str(exc))
                        for r in ("parseval.identity", "parseval.bound")]
    if "general" in relations:
        reports += verify_general_identity(fr, subset, f, tol)
    if dual_frame is None and {"dual", "t213", "weighted", "lemma212"} & set(relations):
        dual_frame = canonical_dual(fr, tol).dual
    if "dual" in relations:
        reports += verify_dual_identity(fr, dual_frame, subset, f, tol)
    if weights is None:
        weights = subset.complement().indicator()
    for lam in lams:
        for fam in Family:
            if fam.value in relations:
                reports += FAMILY_CHECKS[fam](sp, lam, tol)
        if "cor25" in relations:
            reports += verify_mixed_energy_scalar(fr, subset, f, lam, tol)
        if "t213" in relations:
            reports.append(verify_dual_split(fr, dual_frame, subset, f, lam, tol))
        if "weighted" in relations:
            reports.append(verify_weighted_dual_split(fr, dual_frame, weights, f, lam, tol))
        if "lemma212" in relations:
            u, v = dual_split_operators(fr, dual_frame, subset)
            reports.append(identity_split_margin(u, v, lam, tol))
    return reports


def lemma_suite(sp: SplitPair, tol: float, pq: Optional[tuple] = None,
                force: bool = False) -> List[MarginReport]:
    reports = [check_lemma_part(sp, k, tol=tol) for k in (1, 2, 3, 4)]
    if pq is not None:
        p, q = pq
        reports += [check_lemma_part(sp, k, p, q, tol=tol, force=force) for k in (5, 6, 7)]
    return reports


# --- commands ----------------------------------------------------------------


def cmd_verify(args, out) -> int:
    tol = psd_tolerance_from_env()
    fr = load_frame(args.frame)
    if args.subset is not None:
        subset = IndexSubset.parse(args.subset, fr.count)
    else:
        subset = random_subset(fr.count, args.subset_seed)
    lams = parse_floats(args.lam, "lambda")
    relations = parse_relations(args.relations)
    f = random_unit_vector(fr.dim, args.vector_seed)
    if args.dual == "alternate":
        dual = random_alternate_dual(fr, args.dual_seed, args.perturbation, tol).dual
    else:
        dual = canonical_dual(fr, tol).dual
    weights = random_weights(fr.count, args.weights_seed) if args.weights_seed is not None else None
    pq = tuple(parse_floats(args.pq, "p,q")) if args.pq else None
    if pq is not None and len(pq) != 2:
        raise CliUsageError("--pq takes exactly two numbers p,q")
    reports = frame_relations(fr, subset, f, lams, relations, tol, dual, weights, pq, args.force)
    inputs = {"frame_label": fr.label or args.frame, "subset": str(subset), "seed": args.vector_seed}
    tally = Tally()
    for rep in reports:
        emit(rep, inputs, out)
        tally.add(rep)
    return EXIT_VIOLATION if tally.counts["failed"] else EXIT_OK


def _fuzz_trial(mode: str, seed: int, trial: int, dims, mults, lam_range, tol: float):
    ts = _stream.derive_seed(seed, trial)
    rng = _stream.stream(ts, _stream.TRIAL)
    d = int(rng.integers(dims[0], dims[1] + 1))
    m_lo = max(d, math.ceil(d * mults[0]))
    m_hi = max(m_lo, math.floor(d * mults[1]))
    m = int(rng.integers(m_lo, m_hi + 1))
    lam = float(rng.uniform(*lam_range))
    p, q = (float(x) for x in rng.uniform(-2, 2, size=2))
    inputs = {"frame_label": "", "subset": "", "seed": ts, "trial": trial}
    if mode == "operator":
        sp = random_split_pair(d, ts, tol=tol)
        inputs["frame_label"] = f"split:{d},{ts}"
        reports = lemma_suite(sp, tol, (p, q))
        for fam in Family:
            reports += FAMILY_CHECKS[fam](sp, lam, tol)
        return reports, inputs
    fr = random_frame(GenConfig(d, m, ts))
    subset = random_subset(m, ts)
    f = random_unit_vector(d, ts)
    inputs.update(frame_label=fr.label, subset=str(subset))
    if mode == "frame":
        reports = frame_relations(fr, subset, f, [lam],
                                  ["lemma", "t22", "t27", "t210", "cor25", "general"], tol, pq=(p, q))
        reports += verify_parseval_identity(to_parseval(fr), subset, f, tol)
        return reports, inputs
    dual = random_alternate_dual(fr, ts, 1.0, tol).dual
    weights = random_weights(m, ts)
    reports = frame_relations(fr, subset, f, [lam], ["dual", "t213", "weighted", "lemma212"],
                              tol, dual, weights)
    reports.append(verify_weighted_dual_split(fr, dual, subset.complement().indicator(), f, lam, tol))
    u = _stream.complex_normal(_stream.stream(ts, _stream.MISC), (d, d))
    reports.append(identity_split_margin(u, np.eye(d) - u, lam, tol))
    return reports, inputs


@dataclass
class RunManifest:
    command: str
    parameters: dict
    outcome_counts: dict
    worst_margin: Optional[float]
    elapsed: float
    checks: int


def cmd_fuzz(args, out) -> int:
    tol = psd_tolerance_from_env()
    if args.trials < 1:
        raise CliUsageError("--trials must be at least 1")
    if args.workers < 1:
        raise CliUsageError("--workers must be at least 1")
    dims = parse_range(args.dims, "--dims", int)
    if dims[0] < 2 or dims[1] > 64:
        raise CliUsageError("--dims must lie within [2, 64]")
    mults = parse_range(args.count_mult, "--count-mult")
    if mults[0] < 1:
        raise CliUsageError("--count-mult lower end must be >= 1")
    lam_range = parse_range(args.lambda_range, "--lambda-range")
    start = time.perf_counter()
    tally = Tally()

    def run(trial):
        return _fuzz_trial(args.mode, args.seed, trial, dims, mults, lam_range, tol)

    with ThreadPoolExecutor(max_workers=args.workers) as pool:
        # map preserves trial order, so emitted output is independent of scheduling
        for reports, inputs in pool.map(run, range(args.trials)):
            for rep in reports:
                tally.add(rep)
                if args.reports or (args.show_failures and rep.outcome == "failed"):
                    emit(rep, inputs, out)
    manifest = RunManifest(
        command="fuzz",
        parameters={"trials": args.trials, "mode": args.mode, "seed": args.seed, "dims": list(dims),
                    "count_mult": list(mults), "lambda_range": list(lam_range), "tol": tol,
                    "workers": args.workers},
        outcome_counts=tally.counts,
        worst_margin=tally.worst_margin,
        elapsed=round(time.perf_counter() - start, 6),
        checks=tally.total,
    )
    out.write(json.dumps(asdict(manifest)) + "\n")
    return EXIT_VIOLATION if tally.counts["failed"] else EXIT_OK


def cmd_sweep(args, out) -> int:
    tol = psd_tolerance_from_env()
    relation = args.relation
    family = relation.split(".")[0]
    if family in LAMBDA_FREE or family not in RELATIONS:
        raise CliUsageError(
            f"relation {relation!r} cannot be swept; choose one of {', '.join(SWEEP_DEFAULTS)}")
    target = SWEEP_DEFAULTS[family] if relation == family else relation
    if args.steps < 2:
        raise CliUsageError("--steps must be at least 2")
    lo, hi = args.lambda_min, args.lambda_max
    if not (math.isfinite(lo) and math.isfinite(hi)) or lo >= hi:
        raise CliUsageError("need finite --lambda-min < --lambda-max")
    fr = load_frame(args.frame)
    subset = (IndexSubset.parse(args.subset, fr.count) if args.subset is not None
              else random_subset(fr.count, args.subset_seed))
    f = random_unit_vector(fr.dim, args.vector_seed)
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(["lambda", "margin", "passed"])
    failed = False
    for lam in np.linspace(lo, hi, args.steps):
        reps = frame_relations(fr, subset, f, [float(lam)], [family], tol)
        match = [r for r in reps if r.relation == target]
        if not match:
            raise CliUsageError(f"relation {relation!r} produced no report named {target!r}")
        rep = match[0]
        failed |= rep.outcome == "failed"
        writer.writerow([repr(float(lam)), repr(rep.margin), "true" if rep.passed else "false"])
    return EXIT_VIOLATION if failed else EXIT_OK


def cmd_show(args, out) -> int:
    fr = load_frame(args.frame)
    if args.emit_json:
        out.write(frame_to_json(fr) + "\n")
        return EXIT_OK
    bounds = frame_bounds(fr)
    dual = canonical_dual(fr).dual
    lines = [
        f"label: {fr.label or '-'}",
        f"dim: {fr.dim}",
        f"count: {fr.count}",
        f"frame bounds: ({bounds.lower!r}, {bounds.upper!r})",
        f"condition (B/A): {bounds.ratio!r}",
        f"parseval deviation ||S - I||: {parseval_deviation(fr)!r}",
        f"canonical dual (first {min(args.preview, fr.count)} vectors):",
    ]
    for i, g in enumerate(dual.vectors[: args.preview]):
        lines.append(f"  g[{i}] = " + " ".join(_fmt_complex(z) for z in g))
    out.write("\n".join(lines) + "\n")
    return EXIT_OK


def _fmt_complex(z: complex) -> str:
    return f"{z.real:+.6g}{z.imag:+.6g}j"


# --- entry point -------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="framesplit",
                                     description="Verify lambda-parametrized frame inequalities.")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_instance_args(p):
        p.add_argument("frame", help="named:<name> | random:<d>,<m>,<seed> | parseval:<d>,<m>,<seed> | JSON file")
        p.add_argument("--subset", help="indices of J, e.g. '0,2-4' ('none', 'all' allowed)")
        p.add_argument("--subset-seed", type=int, default=0, help="draw J at random when --subset is absent")
        p.add_argument("--vector-seed", type=int, default=0, help="seed of the test vector f")

    p = sub.add_parser("verify", help="check relations on one instance; one JSON report per line")
    add_instance_args(p)
    p.add_argument("--lambda", dest="lam", default="1", help="comma-separated lambda values")
    p.add_argument("--relations", default="all", help=f"comma-separated subset of: {', '.join(RELATIONS)}")
    p.add_argument("--dual", choices=("canonical", "alternate"), default="canonical")
    p.add_argument("--dual-seed", type=int, default=0)
    p.add_argument("--perturbation", type=float, default=1.0)
    p.add_argument("--weights-seed", type=int, default=None,
                   help="random complex weights for 'weighted' (default: indicator of J^c)")
    p.add_argument("--pq", help="p,q for lemma parts 5-7")
    p.add_argument("--force", action="store_true",
                   help="evaluate lemma parts 5-7 even when their certificate fails")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("fuzz", help="run the relation suite on random instances")
    p.add_argument("--trials", type=int, default=100)
    p.add_argument("--dims", default="2,8", help="dimension range lo,hi")
    p.add_argument("--count-mult", default="1,2", help="count/dim range lo,hi")
    p.add_argument("--lambda-range", default="-2,3")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--mode", choices=("frame", "operator", "dual"), default="frame")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--reports", action="store_true", help="also stream every report as JSON lines")
    p.add_argument("--show-failures", action="store_true", help="stream failing reports")
    p.set_defaults(func=cmd_fuzz)

    p = sub.add_parser("sweep", help="CSV of one relation's margin across lambda")
    add_instance_args(p)
    p.add_argument("--relation", required=True)
    p.add_argument("--lambda-min", type=float, required=True)
    p.add_argument("--lambda-max", type=float, required=True)
    p.add_argument("--steps", type=int, default=101)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("show", help="describe a frame")
    p.add_argument("frame")
    p.add_argument("--preview", type=int, default=4, help="number of dual vectors to print")
    p.add_argument("--emit-json", action="store_true", help="print the frame in the JSON file format")
    p.set_defaults(func=cmd_show)
    return parser


def main(argv: Optional[List[str]] = None, out=None) -> int:
    out = sys.stdout if out is None else out
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args, out)
    except (CliUsageError, FrameSplitError) as exc:
        print(f"framesplit {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
