"""Command-line front end. Every subcommand prints JSON (or CSV for curves) to stdout.

Exit codes: 0 success, 2 invalid input or invariant violation, 3 size cap exceeded.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import sys
from fractions import Fraction
from pathlib import Path
from typing import Any, Sequence

import numpy as np

from . import behaviors as bh
from . import bellops as bo
from . import hvmodels as hv
from . import monogamy as mo
from . import parallel
from . import qalgebra as qa
from . import sepcrit as sc
from . import statelib as sl
from . import tradeoff as tr
from .errors import InvariantError, SizeCapError

EXIT_OK, EXIT_INVARIANT, EXIT_SIZE = 0, 2, 3
HV_CHUNKS = 8


def exact(x: float, max_den: int = 10_000, tol: float = 1e-9) -> str | None:
    """Small-denominator fraction equal to ``x`` within ``tol``, as text."""
    f = Fraction(x).limit_denominator(max_den)
    return str(f) if abs(float(f) - x) <= tol else None


def _jsonable(obj: Any) -> Any:
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _jsonable(obj.tolist())
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.floating,)):
        return float(obj)
    if isinstance(obj, Fraction):
        return str(obj)
    return obj


def emit(obj: Any) -> None:
    print(json.dumps(_jsonable(obj), indent=2))


def _with_exact(name: str, value: float, out: dict) -> None:
    out[name] = value
    out[f"{name}_exact"] = exact(value)


# ------------------------------------------------------------------ inputs


def load_json(path: str) -> dict:
    try:
        return json.loads(Path(path).read_text())
    except FileNotFoundError:
        raise InvariantError(f"file not found: {path}") from None
    except json.JSONDecodeError as exc:
        raise InvariantError(f"malformed JSON in {path}: {exc}") from None


def load_state(text: str) -> np.ndarray:
    """A named state, ``ghz:N``, ``w``, ``werner:p`` or a state JSON file."""
    if text in sl.NAMED_STATES:
        return sl.NAMED_STATES[text]()
    head, _, rest = text.partition(":")
    try:
        if head == "ghz" and rest:
            return sl.projector(sl.ghz(int(rest)))
        if head == "werner" and rest:
            return sl.werner(float(rest))
        if head == "dicke" and rest:
            k, n = (int(v) for v in rest.split(","))
            return sl.projector(sl.dicke(k, n))
    except ValueError as exc:
        raise InvariantError(f"bad state parameters in {text!r}: {exc}") from None
    if Path(text).exists():
        return sl.state_from_json(load_json(text))
    raise InvariantError(f"unknown state {text!r}; names: {', '.join(sl.NAMED_STATES)}")


def load_polynomial(text: str) -> bo.BellPolynomial:
    """``chsh``, ``mermin:N``, ``mermin':N``, ``svetlichny+:N``, ``svetlichny-:N`` or a JSON file."""
    head, _, rest = text.partition(":")
    try:
        if text == "chsh":
            return bo.chsh()
        if head in ("mermin", "mermin'"):
            return bo.mermin(int(rest), primed=head.endswith("'"))
        if head in ("svetlichny", "svetlichny+", "svetlichny-"):
            return bo.svetlichny(int(rest), -1 if head.endswith("-") else +1)
    except ValueError as exc:
        raise InvariantError(f"bad polynomial parameters in {text!r}: {exc}") from None
    if Path(text).exists():
        return bo.BellPolynomial.from_json(load_json(text))
    raise InvariantError(f"unknown polynomial {text!r}")


def parse_settings(text: str, poly: bo.BellPolynomial) -> list[tuple[float, float]]:
    """``mermin-ghz``, ``ghz-optimal`` or ``a0:a0p,a1:a1p,...`` angles in the x-y plane."""
    if text == "mermin-ghz":
        return bo.mermin_ghz_settings(poly.parties)
    if text == "ghz-optimal":
        return bo.ghz_optimal_settings(poly.parties)
    try:
        pairs = [tuple(float(v) for v in part.split(":")) for part in text.split(",")]
    except ValueError:
        raise InvariantError(f"cannot parse settings {text!r}") from None
    if len(pairs) != poly.parties or any(len(p) != poly.settings for p in pairs):
        raise InvariantError("settings need one angle per setting for every party")
    return pairs


# ------------------------------------------------------------- subcommands


def cmd_bounds(args) -> dict:
    return bo.bounds(args.kind, args.n).as_dict()


def cmd_evaluate(args) -> dict:
    poly = load_polynomial(args.polynomial)
    rho = load_state(args.state)
    angles = parse_settings(args.settings, poly)
    op = bo.to_operator(poly, bo.angles_to_observables(angles))
    if op.shape != rho.shape:
        raise InvariantError("state and polynomial have different party counts")
    return {"polynomial": poly.name, "value": qa.expectation(op, rho), "max_eigenvalue": qa.max_eigenvalue(op)}


def cmd_detect(args) -> dict:
    rho = qa.check_density(load_state(args.state))
    n = qa.num_qubits(rho.shape[0])
    records = []
    if args.split:
        for v in sc.split_criterion(rho, args.split):
            records.append(v.as_dict())
    elif args.k:
        records.append(sc.k_sep_criterion(rho, args.k).as_dict())
        records.append(sc.k_sep_first(rho, args.k).as_dict())
    else:
        if n == 2:
            records.append(sc.two_qubit_criterion(rho).as_dict())
        records.append(sc.biseparability_matrix(rho).as_dict())
        records.append(sc.full_sep_matrix(rho).as_dict())
        return {"records": records, "classification": sc.classify(rho)}
    return {"records": records}


def _family(text: str):
    """``ghz:N:channel`` returns a callable family ``p -> rho``; anything else a state."""
    parts = text.split(":")
    if parts[0] == "ghz" and len(parts) == 3:
        n, channel = int(parts[1]), parts[2]
        if channel not in sl.GHZ_CHANNELS:
            raise InvariantError(f"unknown channel {channel!r}")
        return lambda p: sl.noisy_ghz(n, channel, p)
    return load_state(text)


def cmd_robustness(args) -> dict:
    target = _family(args.family)
    kind = {"full": "full", "some": "some", "split": "split"}[args.criterion]
    return sc.noise_robustness(target, kind, args.split).as_dict()


def cmd_tradeoff(args) -> None:
    rows = tr.curve(args.curve, args.grid)
    writer = csv.writer(sys.stdout)
    header = ["theta_a", "theta_b", "value"]
    if args.verify and args.curve in ("c", "d"):
        fn = tr.verify_c if args.curve == "c" else tr.verify_d
        checks = parallel.pmap(lambda r: fn(r[0], r[1]), rows)
        rows = [r + (v,) for r, v in zip(rows, checks)]
        header.append("numeric")
    writer.writerow(header)
    for r in rows:
        writer.writerow([f"{x:.12g}" for x in r])


def cmd_polytope(args) -> dict:
    b = bh.behavior_from_json(load_json(args.behavior))
    if args.action == "membership":
        ns, worst = bh.is_no_signaling(b)
        verdict = bh.is_local(b)
        return {"local": verdict.local, "no_signaling": ns, "signaling_gap": worst}
    if args.action == "facets":
        out = {"chsh_facets": bh.chsh_facets(b)}
        ineq = bh.ns_nontrivial_inequalities(b)
        out.update({k: v for k, v in ineq.items()})
        out["max_chsh"] = float(np.max(out["chsh_facets"]))
        return out
    verts = bh.local_deterministic_vertices(b.scenario)
    return {"scenario": {"parties": b.parties, "settings": list(b.scenario.settings)},
            "count": len(verts), "vertices": [bh.behavior_to_json(v) for v in verts] if len(verts) <= 256 else None}


def cmd_monogamy(args) -> dict:
    rng = np.random.default_rng(args.seed)
    if args.audit == "tv":
        return mo.tv_audit(args.samples, rng)
    if args.audit == "ns":
        return mo.ns_audit(args.samples, rng)
    return mo.d3_audit(args.samples, rng, orthogonal=args.orthogonal)


def cmd_hv_sim(args) -> dict:
    # fixed chunking keeps results independent of the thread count
    chunks = min(HV_CHUNKS, max(1, args.samples))
    seeds = np.random.SeedSequence(args.seed).spawn(chunks)
    sizes = [args.samples // chunks + (i < args.samples % chunks) for i in range(chunks)]
    reports = parallel.pmap(lambda job: hv.audit_chsh(args.family, job[0], np.random.default_rng(job[1])),
                            list(zip(sizes, seeds)))
    return {"family": args.family, "samples": args.samples, "seed": args.seed,
            "max_chsh": max(r["max_chsh"] for r in reports), "bound": 2.0,
            "violations": sum(r["violations"] for r in reports)}


# ---------------------------------------------------------------- reproduce


def reproduce_phi4() -> dict:
    rho = sl.NAMED_STATES["phi4"]()
    out: dict = {}
    _with_exact("full", sc.noise_robustness(rho, "full").p0, out)
    _with_exact("some", sc.noise_robustness(rho, "some").p0, out)
    return out


def reproduce_ghz() -> dict:
    rows = []
    for n in range(3, 9):
        formula = sc.ghz_white_noise_thresholds(n)
        rho = sl.projector(sl.ghz(n))
        some = sc.noise_robustness(rho, "some").p0
        full = sc.noise_robustness(rho, "full").p0 if n <= 6 else float(formula["full"])
        rows.append({"n": n, "some": some, "some_exact": str(formula["some"]),
                     "full": full, "full_exact": str(formula["full"]),
                     "stabilizer": float(formula["stabilizer_full"]), "stabilizer_exact": str(formula["stabilizer_full"])})
    return {"rows": rows}


def reproduce_svetlichny() -> dict:
    rows = []
    for n in range(2, 7):
        row = {"n": n}
        for sign in (+1, -1):
            poly = bo.svetlichny(n, sign)
            obs = bo.angles_to_observables(bo.ghz_optimal_settings(n, sign))
            row["ghz_plus" if sign > 0 else "ghz_minus"] = qa.expectation(bo.to_operator(poly, obs), sl.ghz(n))
        row["qm"] = 2 ** (n - 1) * math.sqrt(2)
        if n <= 4:
            row["plhv"] = bo.plhv_max(bo.svetlichny(n))
        rows.append(row)
    return {"rows": rows}


def reproduce_w_d3() -> dict:
    w = sl.w_state()
    general = mo.d3_values(w, [(-0.133, 0.460)] * 3)
    orth = mo.d3_values(w, [(0.54, 0.54 + math.pi / 2)] * 3)
    return {"general": np.abs(general), "orthogonal": np.abs(orth),
            "pairwise_general": float(general[0] ** 2 + general[1] ** 2)}


def reproduce_ch9() -> dict:
    obs = bo.corr_of_corr_observables()
    return {"value": bo.corr_of_corr_test(), "target": 2 * math.sqrt(2),
            "squares_identity": {k: bool(np.allclose(v @ v, np.eye(4), atol=1e-12)) for k, v in obs.items()}}


REPRODUCE = {
    "phi4-robustness": reproduce_phi4,
    "ghz-thresholds": reproduce_ghz,
    "svetlichny-max": reproduce_svetlichny,
    "w-state-d3": reproduce_w_d3,
    "ch9-bell": reproduce_ch9,
}


def cmd_reproduce(args) -> dict:
    if args.id not in REPRODUCE:
        raise InvariantError(f"unknown reproduce id {args.id!r}; choose from {', '.join(REPRODUCE)}")
    return REPRODUCE[args.id]()


# ------------------------------------------------------------------ parser


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="qcorr", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("bounds", help="local, partially local, quantum and absolute maxima")
    s.add_argument("kind", choices=["chsh", "mermin", "svetlichny"])
    s.add_argument("n", type=int)
    s.set_defaults(func=cmd_bounds)

    s = sub.add_parser("evaluate", help="expectation of a Bell polynomial operator")
    s.add_argument("polynomial")
    s.add_argument("--state", required=True)
    s.add_argument("--settings", default="ghz-optimal")
    s.set_defaults(func=cmd_evaluate)

    s = sub.add_parser("detect", help="run separability criteria on a state")
    s.add_argument("state")
    g = s.add_mutually_exclusive_group()
    g.add_argument("--split")
    g.add_argument("--k", type=int)
    s.set_defaults(func=cmd_detect)

    s = sub.add_parser("robustness", help="white-noise threshold of a criterion")
    s.add_argument("family", help="state name or file, or ghz:N:channel")
    s.add_argument("--criterion", choices=["full", "some", "split"], default="full")
    s.add_argument("--split")
    s.set_defaults(func=cmd_robustness)

    s = sub.add_parser("tradeoff", help="CSV of a trade-off curve")
    s.add_argument("--curve", choices=["c", "d", "roy", "x", "d-equal"], required=True)
    s.add_argument("--grid", type=int, default=20)
    s.add_argument("--verify", action="store_true", help="add a numeric recomputation column")
    s.set_defaults(func=cmd_tradeoff)

    s = sub.add_parser("polytope", help="facet values, membership or vertices for a behavior")
    s.add_argument("action", choices=["facets", "membership", "vertices"])
    s.add_argument("behavior", help="behavior JSON file")
    s.set_defaults(func=cmd_polytope)

    s = sub.add_parser("monogamy", help="Monte-Carlo monogamy audits")
    s.add_argument("--audit", choices=["tv", "ns", "d3"], required=True)
    s.add_argument("--samples", type=int, default=1000)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--orthogonal", action="store_true")
    s.set_defaults(func=cmd_monogamy)

    s = sub.add_parser("hv-sim", help="CHSH audit of random hidden-variable models")
    s.add_argument("--family", choices=list(hv.FAMILIES), required=True)
    s.add_argument("--samples", type=int, default=1000)
    s.add_argument("--seed", type=int, default=0)
    s.set_defaults(func=cmd_hv_sim)

    s = sub.add_parser("reproduce", help="recompute a tabulated result")
    s.add_argument("id", help=", ".join(REPRODUCE))
    s.set_defaults(func=cmd_reproduce)
    return p


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        parallel.worker_count()
        result = args.func(args)
    except SizeCapError as exc:
        emit({"error": "size-cap", "message": str(exc)})
        return EXIT_SIZE
    except InvariantError as exc:
        emit({"error": "invariant", "message": str(exc)})
        return EXIT_INVARIANT
    if result is not None:
        emit(result)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
