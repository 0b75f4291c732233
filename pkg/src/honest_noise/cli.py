"""Command-line front end.

Exit codes: 0 ok, 1 unreadable input, 2 no honest mixture, 3 SDP failure,
4 dishonest approximation, 5 reference-table mismatch.
"""
from __future__ import annotations

import argparse
import csv
import datetime as _dt
import hashlib
import io
import json
import logging
import sys
from pathlib import Path

import numpy as np

from . import __version__, golden, reproduce
from .approximate import Infeasible, OptimizerOptions, approximate, named_mixing_set
from .channels import (
    DimensionMismatch,
    InvalidChannel,
    NotTracePreserving,
    QuantumChannel,
    bloch_map,
    kraus_to_chi,
    n_qubits_of,
    validate_cptp,
)
from .diamond import diamond_distance_full, diamond_lower_bound
from .honesty import certify_channel, empirical_honesty_check
from .sdp import SolverFailure
from .twirl import pauli_twirl
from .zoo import make_preset

log = logging.getLogger("honest_noise")

EXIT_OK, EXIT_PARSE, EXIT_INFEASIBLE, EXIT_SOLVER, EXIT_DISHONEST, EXIT_MISMATCH = range(6)
HONEST_TOL = 1e-8


class ParseError(ValueError):
    pass


# -- channel documents ---------------------------------------------------------------

def _complex_matrix(obj, where: str) -> np.ndarray:
    try:
        arr = np.asarray(obj, dtype=float)
    except (TypeError, ValueError):
        raise ParseError(f"{where}: matrix entries must be [re, im] number pairs") from None
    if arr.ndim != 3 or arr.shape[2] != 2 or arr.shape[0] != arr.shape[1]:
        raise ParseError(f"{where}: expected a square matrix of [re, im] pairs, got shape {arr.shape}")
    return arr[..., 0] + 1j * arr[..., 1]


def encode_matrix(m: np.ndarray) -> list:
    m = np.asarray(m, dtype=complex)
    return [[[float(z.real), float(z.imag)] for z in row] for row in m]


def _load_json(text: str, source: str):
    try:
        return json.loads(text)
    except json.JSONDecodeError as e:
        raise ParseError(f"{source}: line {e.lineno}, column {e.colno}: {e.msg}") from None


def parse_channel_document(doc, source: str = "<document>") -> QuantumChannel:
    if not isinstance(doc, dict):
        raise ParseError(f"{source}: top level must be an object")
    has_kraus, has_preset = "kraus" in doc, "preset" in doc
    if has_kraus == has_preset:
        raise ParseError(f"{source}: give exactly one of 'kraus' or 'preset'")
    label = str(doc.get("label", ""))
    try:
        if has_preset:
            params = doc.get("params", {})
            if not isinstance(params, dict):
                raise ParseError(f"{source}: 'params' must be an object")
            ch = make_preset(str(doc["preset"]), params)
            ch = QuantumChannel(ch.kraus, label=label or ch.label or str(doc["preset"]))
        else:
            if not isinstance(doc["kraus"], list) or not doc["kraus"]:
                raise ParseError(f"{source}: 'kraus' must be a non-empty list")
            ops = tuple(_complex_matrix(k, f"{source}: kraus[{i}]") for i, k in enumerate(doc["kraus"]))
            n = doc.get("n_qubits")
            if n is not None and 2 ** int(n) != ops[0].shape[0]:
                raise ParseError(f"{source}: n_qubits={n} but Kraus operators are {ops[0].shape[0]}-dimensional")
            n_qubits_of(ops[0].shape[0])
            ch = QuantumChannel(ops, label=label)
    except ParseError:
        raise
    except (KeyError, ValueError, TypeError) as e:
        raise ParseError(f"{source}: {e.args[0] if e.args else e}") from None
    report = validate_cptp(ch)
    if not report.passed:
        raise ParseError(f"{source}: not a CPTP map ({report})")
    return ch


def load_channel(path: str) -> QuantumChannel:
    try:
        text = Path(path).read_text()
    except OSError as e:
        raise ParseError(f"{path}: {e.strerror}") from None
    return parse_channel_document(_load_json(text, path), path)


def channel_document(ch: QuantumChannel, label: str = "") -> dict:
    return {"label": label or ch.label, "n_qubits": ch.n_qubits, "kraus": [encode_matrix(k) for k in ch.kraus]}


def channel_digest(ch: QuantumChannel) -> str:
    """Short SHA-256 of the Kraus data rounded to 12 decimals."""
    data = np.round(np.stack(ch.kraus), 12) + 0.0
    return hashlib.sha256(data.tobytes()).hexdigest()[:16]


def load_mixing_set(name_or_path: str):
    if name_or_path in ("pauli", "pauli+H", "pauli+Z90"):
        return named_mixing_set(name_or_path)
    doc = _load_json(Path(name_or_path).read_text(), name_or_path) if Path(name_or_path).exists() else None
    if doc is None:
        raise ParseError(f"mixing set {name_or_path!r} is neither a known name nor a readable file")
    try:
        entries = doc["unitaries"]
        ops = [_complex_matrix(e["matrix"], f"{name_or_path}: unitaries[{i}]") for i, e in enumerate(entries)]
        labels = [str(e.get("label", f"U{i}")) for i, e in enumerate(entries)]
    except (KeyError, TypeError):
        raise ParseError(f"{name_or_path}: expected {{'unitaries': [{{'label', 'matrix'}}, ...]}}") from None
    return ops, labels


# -- output helpers ------------------------------------------------------------------

def _fmt17(x: float) -> str:
    return f"{x:.17g}"


def write_csv(path: Path, header: list, rows) -> None:
    """Comma-separated text with a single ``#`` header line."""
    buf = io.StringIO()
    buf.write("# " + ",".join(header) + "\n")
    writer = csv.writer(buf, lineterminator="\n")
    for row in rows:
        writer.writerow([v if isinstance(v, str) else _fmt17(float(v)) for v in row])
    path.write_text(buf.getvalue())


def _emit_json(obj, out: str | None) -> None:
    text = json.dumps(obj, indent=2)
    if out:
        Path(out).write_text(text + "\n")
    else:
        print(text)


def run_report(ch: QuantumChannel, set_name: str, labels, result, opts: OptimizerOptions) -> dict:
    cert = result.certificate
    rep = {
        "tool_version": __version__,
        "timestamp": _dt.datetime.now(_dt.timezone.utc).isoformat(timespec="seconds"),
        "input": {"label": ch.label, "digest": channel_digest(ch), "n_qubits": ch.n_qubits},
        "mixing_set": {"name": set_name, "labels": list(labels)},
        "options": opts.as_dict(),
        "mixture": result.mixture.as_dict(),
        "chi_diag": [float(v) for v in result.chi_diag],
        "diamond_dist": result.diamond_dist,
        "duality_gap": result.duality_gap,
        "certificate": {
            "verdict": cert.verdict,
            "mode": cert.mode,
            "min_eig_a_minus_b": cert.min_eig_a_minus_b,
            "tol": cert.tol,
        },
        "evaluations": result.evaluations,
        "restarts": [
            {"restart": t.restart, "probs": [float(p) for p in t.probs], "diamond_dist": t.diamond_dist,
             "min_eig": t.min_eig, "evaluations": t.evaluations}
            for t in result.restarts
        ],
        "approximation": channel_document(result.channel, "approximation"),
    }
    if result.empirical is not None:
        rep["empirical"] = {"max_violation": result.empirical.max_violation,
                            "n_samples": result.empirical.n_samples, "seed": result.empirical.seed}
    return rep


# -- commands --------------------------------------------------------------------------

def cmd_approximate(args) -> int:
    ch = load_channel(args.channel)
    ops, labels = load_mixing_set(args.set)
    opts = OptimizerOptions(seed=args.seed, restarts=args.restarts, max_iter=args.max_iter, penalty=args.penalty)
    result = approximate(ch, ops, opts, labels)
    rep = run_report(ch, args.set, labels, result, opts)
    _emit_json(rep, args.out)
    print(f"diamond_dist {result.diamond_dist:.6f}  chi_diag "
          + " ".join(f"{v:.4f}" for v in result.chi_diag[:16])
          + f"  certificate {result.certificate.verdict}", file=sys.stderr)
    return EXIT_OK


def cmd_reproduce_tables(args) -> int:
    tables = sorted(golden.GOLDEN) if args.table == "all" else [int(args.table)]
    opts = OptimizerOptions(seed=args.seed, restarts=args.restarts)
    rows, worst = [], EXIT_OK
    for t in tables:
        for c in reproduce.compare_table(t, args.tol, opts):
            status = "pass" if c.passed else "FAIL"
            if not c.passed:
                worst = EXIT_MISMATCH
            rows.append([str(t), c.cell.row, c.cell.quantity, f"{c.computed:.4f}", f"{c.cell.value:.4f}",
                         f"{c.deviation:.2e}", f"{c.tol:.1e}", status, c.cell.provenance])
    header = ["table", "row", "quantity", "computed", "reference", "abs_dev", "tol", "status", "provenance"]
    widths = [max(len(h), *(len(r[i]) for r in rows)) for i, h in enumerate(header[:-1])]
    print("  ".join(h.ljust(w) for h, w in zip(header, widths)))
    for r in rows:
        print("  ".join(v.ljust(w) for v, w in zip(r, widths)))
    if args.out:
        write_csv(Path(args.out), header, rows)
    return worst


def cmd_fig1_data(args) -> int:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    js = (0, 1, 2) if args.j == "all" else (int(args.j),)
    opts = OptimizerOptions(seed=args.seed, restarts=args.restarts)
    for j in js:
        header, data = reproduce.fig1_xz_data(j, opts)
        write_csv(out / f"fig1_j{j}_xz_plane.csv", header, data)
        header, data = reproduce.fig1_distinguishability(j, opts)
        write_csv(out / f"fig1_j{j}_distinguishability.csv", header, data)
        bad = reproduce.ordering_violations(data)
        print(f"j={j}: wrote {out}/fig1_j{j}_*.csv; ordering P >= D >= t fails at {len(bad)} of {len(data)} angles")
    return EXIT_OK


def cmd_diamond(args) -> int:
    a, b = load_channel(args.a), load_channel(args.b)
    res = diamond_distance_full(a, b)
    lb = diamond_lower_bound(a, b, seed=args.seed)
    print(f"{res.value:.6f}")
    print(f"duality_gap {res.gap:.3e}  iterations {res.solution.iterations}  lower_bound {lb:.6f}", file=sys.stderr)
    return EXIT_OK


def cmd_honesty_check(args) -> int:
    approx, truth = load_channel(args.approx), load_channel(args.truth)
    if approx.dim != truth.dim:
        raise DimensionMismatch(f"channels act on dimensions {approx.dim} and {truth.dim}")
    out = {}
    honest = True
    try:
        bloch_map(approx)
        cert = certify_channel(approx, truth)
        out["certificate"] = {"verdict": cert.verdict, "mode": cert.mode, "min_eig_a_minus_b": cert.min_eig_a_minus_b}
        # the quadratic-form test needs an approximation with zero translation
        if np.linalg.norm(bloch_map(approx).t) <= 1e-12:
            honest &= cert.passed
    except NotTracePreserving:
        out["certificate"] = None
    emp = empirical_honesty_check(approx, truth, args.samples, args.seed)
    out["empirical"] = {"max_violation": emp.max_violation, "n_samples": emp.n_samples, "seed": emp.seed}
    if not emp.honest(HONEST_TOL):
        honest = False
        out["empirical"]["witness"] = encode_matrix(emp.witness)
    out["honest"] = bool(honest)
    _emit_json(out, args.out)
    return EXIT_OK if honest else EXIT_DISHONEST


def cmd_twirl(args) -> int:
    ch = load_channel(args.channel)
    tw = pauli_twirl(ch)
    dist = diamond_distance_full(ch, tw)
    doc = channel_document(tw, f"twirl({ch.label})" if ch.label else "twirl")
    doc["chi_diag"] = [float(v) for v in kraus_to_chi(tw).diag]
    doc["diamond_to_input"] = dist.value
    _emit_json(doc, args.out)
    return EXIT_OK


# -- entry point -------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="honest-noise", description=__doc__.splitlines()[0])
    p.add_argument("-v", "--verbose", action="store_true")
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True)
    d = OptimizerOptions()

    def optimizer_flags(sp):
        sp.add_argument("--seed", type=int, default=d.seed)
        sp.add_argument("--restarts", type=int, default=d.restarts)

    s = sub.add_parser("approximate", help="closest honest mixture for a channel file")
    s.add_argument("channel")
    s.add_argument("--set", default="pauli", help="pauli, pauli+H, pauli+Z90 or a JSON file of unitaries")
    optimizer_flags(s)
    s.add_argument("--max-iter", type=int, default=d.max_iter)
    s.add_argument("--penalty", type=float, default=d.penalty)
    s.add_argument("--out")
    s.set_defaults(func=cmd_approximate)

    s = sub.add_parser("reproduce-tables", help="recompute the reference tables and compare")
    s.add_argument("--table", default="all", choices=["1", "2", "3", "4", "5", "all"])
    s.add_argument("--tol", type=float, default=None, help="override the per-table tolerance")
    optimizer_flags(s)
    s.add_argument("--out")
    s.set_defaults(func=cmd_reproduce_tables)

    s = sub.add_parser("fig1-data", help="export Bloch-plane and distinguishability curves")
    s.add_argument("--j", default="all", choices=["0", "1", "2", "all"])
    optimizer_flags(s)
    s.add_argument("--out", default="fig1_data")
    s.set_defaults(func=cmd_fig1_data)

    s = sub.add_parser("diamond", help="diamond-norm distance between two channel files")
    s.add_argument("a")
    s.add_argument("b")
    s.add_argument("--seed", type=int, default=0)
    s.set_defaults(func=cmd_diamond)

    s = sub.add_parser("honesty-check", help="does APPROX ever under-report the error of TRUTH?")
    s.add_argument("approx")
    s.add_argument("truth")
    s.add_argument("--samples", type=int, default=10_000)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--out")
    s.set_defaults(func=cmd_honesty_check)

    s = sub.add_parser("twirl", help="Pauli twirl of a channel file")
    s.add_argument("channel")
    s.add_argument("--out")
    s.set_defaults(func=cmd_twirl)
    return p


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as e:
        # argparse uses 2 for usage errors, which the exit-code contract reserves for Infeasible
        return EXIT_OK if e.code in (0, None) else EXIT_PARSE
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        return args.func(args)
    except (ParseError, InvalidChannel) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_PARSE
    except DimensionMismatch as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_PARSE
    except Infeasible as e:
        print(f"infeasible: {e}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except SolverFailure as e:
        print(f"solver failure: {e}", file=sys.stderr)
        return EXIT_SOLVER


if __name__ == "__main__":
    sys.exit(main())
