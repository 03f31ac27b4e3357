"""Command-line front end.

Exit codes: 0 success/true, 1 check failed/false, 2 invalid input,
3 numerical failure.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import io
from ._config import override
from .core import (
    DensityMatrix,
    Effect,
    ModelRepresentation,
    check_physical,
    map_from_unitary,
    probability_table,
    random_model,
    random_unitary,
    sample_table,
)
from .equivalence import classify_transform, distributions_equal, recover_gauge_gst
from .errors import (
    FOutOfWindow,
    NotComplete,
    NotEquivalent,
    NotPhysical,
    NumericalError,
    QModelError,
    TrivialModel,
)
from .gauge import apply_gauge, depolarizing, max_depolarizing_F, random_gauge, unitary_gauge
from .tomography import (
    collect_dataset,
    fiducial_frame,
    gauge_fix,
    lgst_reconstruct,
    sample_dataset,
)
from .uniqueness import (
    assess_uniqueness,
    counterexample,
    default_counterexample_F,
    projection_set_pi,
    projection_set_qpt,
    spectral_certificate,
)

EXIT_OK, EXIT_FALSE, EXIT_INVALID, EXIT_NUMERIC = 0, 1, 2, 3

_TOL_FLAGS = {
    "tol_herm": "herm", "tol_trace": "trace", "tol_psd": "psd", "tol_prob": "prob",
    "tol_unitary": "unitary", "tol_rank": "rank", "tol_singular": "singular",
    "tol_boundary": "boundary", "tol_angle": "angle", "max_condition": "max_condition",
    "table_cap": "table_cap",
}


class UsageError(Exception):
    pass


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _emit_json(doc: dict, out: str | None) -> None:
    _emit(io.dumps(doc), out)


def _indices(text: str | None):
    if text is None:
        return None
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise UsageError(f"expected comma-separated integers, got {text!r}") from None


# ---------------------------------------------------------------------------
# Subcommands
# ---------------------------------------------------------------------------


def cmd_gen(args) -> int:
    if args.pi_qpt or args.pi:
        pset = projection_set_qpt(args.dim) if args.pi_qpt else projection_set_pi(args.dim)
        rng = np.random.default_rng(args.seed)
        maps = [map_from_unitary(random_unitary(args.dim, rng), f"U{j}")
                for j in range(args.maps or 0)]
        rep = ModelRepresentation(
            args.dim,
            [DensityMatrix(m, lab) for lab, m in pset],
            maps,
            [Effect(m, lab) for lab, m in pset],
            unitary_complete=args.unitary_complete,
            label=f"{'pi_qpt' if args.pi_qpt else 'pi'}(d={args.dim}, seed={args.seed})")
    else:
        rep = random_model(
            args.dim, args.states, args.maps, args.effects, args.seed,
            state_rank=args.state_rank, kraus_rank=args.kraus_rank,
            effect_rank=args.effect_rank,
            pure_states=_indices(args.pure_states) or (),
            singular_effects=_indices(args.singular_effects) or (),
            singular_maps=_indices(args.singular_maps) or (),
            unitary_complete=args.unitary_complete)
    _emit_json(io.model_to_dict(rep), args.out)
    return EXIT_OK


def cmd_check(args) -> int:
    rep = io.load_model(args.model)
    report = check_physical(rep)
    doc = {"physical": report.to_dict()}
    if report.passed:
        doc["verdict"] = io.verdict_to_dict(assess_uniqueness(rep))
    _emit_json(io.jsonable(doc), args.out)
    return EXIT_OK if report.passed else EXIT_FALSE


def cmd_prob(args) -> int:
    rep = io.load_model(args.model)
    if args.shots is not None:
        table = sample_table(rep, args.max_len, args.shots, args.seed)
    else:
        table = probability_table(rep, args.max_len, threads=args.threads)
    if args.json:
        rows = [{"i": i, "seq": list(seq), "k": k, "p": p} for (i, seq, k), p in table.items()]
        doc = {"kind": table.kind, "max_len": table.max_len, "rows": rows}
        if table.kind == "sampled":
            doc.update(shots=table.shots, seed=table.seed)
        _emit_json(doc, args.out)
    else:
        _emit(io.table_to_csv(table), args.out)
    return EXIT_OK


def cmd_gauge(args) -> int:
    rep = io.load_model(args.model)
    if args.gauge:
        t = io.load_gauge(args.gauge)
    elif args.depolarizing is not None:
        t = depolarizing(args.depolarizing, rep.dim)
    elif args.unitary_seed is not None:
        t = unitary_gauge(random_unitary(rep.dim, np.random.default_rng(args.unitary_seed)))
    elif args.random_seed is not None:
        t = random_gauge(rep.dim, np.random.default_rng(args.random_seed))
    else:
        raise UsageError("choose one of --gauge, --depolarizing, --unitary-seed, --random-seed")
    out = apply_gauge(rep, t)
    doc = {"model": io.model_to_dict(out), "gauge": io.gauge_to_dict(t),
           "physical": check_physical(out).passed}
    _emit_json(io.jsonable(doc), args.out)
    return EXIT_OK


def cmd_counterexample(args) -> int:
    rep = io.load_model(args.model)
    F_max = max_depolarizing_F(rep)
    F = default_counterexample_F(F_max) if args.F is None else args.F
    ce = counterexample(rep, F)
    doc = {"F": F, "F_max": F_max, "model": io.model_to_dict(ce),
           "certificate": spectral_certificate(rep, ce, F) if F > 1 else None}
    _emit_json(io.jsonable(doc), args.out)
    return EXIT_OK


def _gauge_class(a: ModelRepresentation, b: ModelRepresentation) -> tuple[str, dict | None]:
    try:
        t = recover_gauge_gst(a, b)
    except (NotComplete, NotEquivalent, NumericalError):
        return "none", None
    w = classify_transform(t)
    gauge = io.gauge_to_dict(t)
    if w is None:
        return "other", gauge
    return w.kind, gauge


def cmd_equiv(args) -> int:
    a = io.load_model(args.model_a)
    b = io.load_model(args.model_b)
    res = distributions_equal(a, b, args.max_len)
    doc = res.to_dict()
    doc["gauge_class"], gauge = _gauge_class(a, b) if res.equal else ("none", None)
    if args.with_gauge and gauge is not None:
        doc["gauge"] = gauge
    _emit_json(io.jsonable(doc), args.out)
    return EXIT_OK if res.equal else EXIT_FALSE


def cmd_pi_set(args) -> int:
    pset = projection_set_qpt(args.dim) if args.qpt else projection_set_pi(args.dim)
    doc = {"dim": args.dim, "kind": "pi_qpt" if args.qpt else "pi", "size": len(pset),
           "projections": [{"label": lab, **io.encode_matrix(m)} for lab, m in pset]}
    _emit_json(doc, args.out)
    return EXIT_OK


def cmd_gst(args) -> int:
    states, effects = _indices(args.states), _indices(args.effects)
    hidden = None
    if args.dataset:
        ds = io.load_dataset(args.dataset)
    elif args.model:
        hidden = io.load_model(args.model)
        if args.shots is not None:
            ds = sample_dataset(hidden, states, effects, args.shots, args.seed)
        else:
            ds = collect_dataset(hidden, states, effects)
    else:
        raise UsageError("gst needs a model file or --dataset")
    recon = lgst_reconstruct(ds)
    total = None  # gauge taking the hidden model to the output
    if hidden is not None:
        total = fiducial_frame(hidden, ds.state_indices, ds.effect_indices).m_in
    if args.prior:
        prior_rep = io.load_model(args.prior)
        prior = fiducial_frame(prior_rep, ds.state_indices, ds.effect_indices)
        recon = gauge_fix(recon, prior)
        if total is not None:
            total = total @ np.linalg.inv(prior.m_in)
    s = np.linalg.svd(np.asarray(ds.g), compute_uv=False)
    doc = {"model": io.model_to_dict(recon),
           "condition_number": float(s[0] / s[-1]),
           "dataset_kind": ds.kind,
           "physical": check_physical(recon).passed}
    if total is not None:
        doc["gauge"] = io.encode_matrix(total)
    if args.save_dataset:
        io.save_dataset(ds, args.save_dataset)
    _emit_json(io.jsonable(doc), args.out)
    return EXIT_OK


def cmd_sample(args) -> int:
    rep = io.load_model(args.model)
    ds = sample_dataset(rep, _indices(args.states), _indices(args.effects),
                        args.shots, args.seed)
    _emit_json(io.dataset_to_dict(ds), args.out)
    return EXIT_OK


# ---------------------------------------------------------------------------
# Parser
# ---------------------------------------------------------------------------


def _add_tol_flags(p: argparse.ArgumentParser) -> None:
    g = p.add_argument_group("tolerances")
    for flag in _TOL_FLAGS:
        kind = int if flag == "table_cap" else float
        g.add_argument("--" + flag.replace("_", "-"), dest=flag, type=kind, default=None)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qmodelid",
                                     description="Quantum device models, gauges and uniqueness.")
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, func, help_):
        p = sub.add_parser(name, help=help_)
        p.set_defaults(func=func)
        p.add_argument("-o", "--out", default=None, help="output file (default stdout)")
        _add_tol_flags(p)
        return p

    p = add("gen", cmd_gen, "generate a random model")
    p.add_argument("--dim", type=int, required=True)
    p.add_argument("--states", type=int, default=4)
    p.add_argument("--maps", type=int, default=2)
    p.add_argument("--effects", type=int, default=4)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--state-rank", type=int)
    p.add_argument("--kraus-rank", type=int)
    p.add_argument("--effect-rank", type=int)
    p.add_argument("--pure-states", help="comma-separated state indices")
    p.add_argument("--singular-effects", help="comma-separated effect indices")
    p.add_argument("--singular-maps", help="comma-separated map indices")
    p.add_argument("--unitary-complete", action="store_true")
    grp = p.add_mutually_exclusive_group()
    grp.add_argument("--pi-qpt", action="store_true", help="states and effects = QPT projections")
    grp.add_argument("--pi", action="store_true", help="states and effects = full projection set")

    p = add("check", cmd_check, "physicality and uniqueness verdict")
    p.add_argument("model")
    p.add_argument("--json", action="store_true", help="JSON output (default)")

    p = add("prob", cmd_prob, "probability table")
    p.add_argument("model")
    p.add_argument("-N", "--max-len", type=int, default=2)
    p.add_argument("--shots", type=int)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--threads", type=int)
    fmt = p.add_mutually_exclusive_group()
    fmt.add_argument("--csv", action="store_true", help="CSV output (default)")
    fmt.add_argument("--json", action="store_true")

    p = add("gauge", cmd_gauge, "apply a gauge transformation")
    p.add_argument("model")
    p.add_argument("--gauge", help="gauge JSON file")
    p.add_argument("--depolarizing", type=float, metavar="F")
    p.add_argument("--unitary-seed", type=int)
    p.add_argument("--random-seed", type=int)

    p = add("counterexample", cmd_counterexample, "depolarizing counterexample")
    p.add_argument("model")
    p.add_argument("--F", type=float)

    p = add("equiv", cmd_equiv, "distribution equivalence and gauge class")
    p.add_argument("model_a")
    p.add_argument("model_b")
    p.add_argument("-N", "--max-len", type=int, default=3)
    p.add_argument("--with-gauge", action="store_true")

    p = add("pi-set", cmd_pi_set, "projection sets")
    p.add_argument("--dim", type=int, required=True)
    p.add_argument("--qpt", action="store_true")

    p = add("gst", cmd_gst, "linear-inversion gate-set tomography")
    p.add_argument("model", nargs="?")
    p.add_argument("--dataset")
    p.add_argument("--states", help="fiducial state indices")
    p.add_argument("--effects", help="fiducial effect indices")
    p.add_argument("--shots", type=int)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--prior", help="model file providing prior fiducials")
    p.add_argument("--save-dataset")

    p = add("sample", cmd_sample, "finite-shot tomography dataset")
    p.add_argument("model")
    p.add_argument("--states")
    p.add_argument("--effects")
    p.add_argument("--shots", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    return parser


def _exit_code(exc: Exception) -> int:
    if isinstance(exc, NumericalError):
        return EXIT_NUMERIC
    if isinstance(exc, (FOutOfWindow, TrivialModel, NotPhysical)):
        return EXIT_FALSE
    return EXIT_INVALID


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    overrides = {field: getattr(args, flag) for flag, field in _TOL_FLAGS.items()
                 if getattr(args, flag, None) is not None}
    try:
        with override(**overrides):
            return args.func(args)
    except (QModelError, UsageError, OSError, json.JSONDecodeError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return _exit_code(exc)


if __name__ == "__main__":
    sys.exit(main())
