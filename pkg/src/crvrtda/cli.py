"""Command-line interface.

    crvrtda generate --structure assortative --groups 4 --size 10 --seed 7 -o net.edges
    crvrtda analyze net.edges --outdir out/
    crvrtda louvain net.edges
    crvrtda wsbm net.edges --K 4
    crvrtda compare net.edges -o report.json

Exit codes: 0 success, 1 runtime error, 2 usage error.
"""
from __future__ import annotations

import argparse
import json
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import numpy as np

from . import __version__
from .community import louvain
from .crvr import DEFAULT_ZETA, build_flag_filtration, crvr_distance, load_filtration
from .diagram import (CLASSIFIER_THRESHOLDS, CLASSIFIER_VERSION, classify_structure, emit_diagram_csv,
                      emit_diagram_svg, extract_features)
from .netgen import (RNG_NAME, STRUCTURES, BlockSpec, generate_block_network, generate_er_weighted,
                     generate_noisy_block_network)
from .network import FORMATS, dumps_network, guess_format, load_network
from .persistence import compute_persistence
from .wsbm import WsbmConfig, ari, fit


class UsageError(Exception):
    pass


def _dump(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def _write(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text, encoding="utf-8")


def _emit(text: str, out: str | None) -> None:
    if out:
        _write(Path(out), text)
    else:
        sys.stdout.write(text)


def stage_seeds(seed: int) -> dict[str, int]:
    """Expand one user seed into independent per-stage seeds."""
    children = np.random.SeedSequence(seed).spawn(2)
    return {"louvain": int(children[0].generate_state(1)[0]),
            "wsbm": int(children[1].generate_state(1)[0])}


def _sidecar(path) -> Path:
    return Path(str(path) + ".json")


def _planted_labels(path):
    side = _sidecar(path)
    if side.exists():
        labels = json.loads(side.read_text(encoding="utf-8")).get("planted_labels")
        if labels is not None:
            return np.array(labels)
    return None


# ---------------------------------------------------------------- commands

def cmd_generate(args) -> int:
    if args.er:
        net = generate_er_weighted(args.n, args.p, tuple(args.interval), args.floor, args.seed)
        meta = {"kind": "erdos_renyi", "n": args.n, "p": args.p, "weight_interval": list(args.interval),
                "floor_weight": args.floor, "seed": args.seed}
    else:
        noisy = args.noisy or args.p != 1.0 or args.q != 1.0
        weak = args.weak if args.weak is not None else ([0.1, 1.0] if noisy else [0.0, 1.0])
        spec = BlockSpec(structure=args.structure, k_groups=args.groups, group_size=args.size,
                         strong_interval=tuple(args.strong), weak_interval=tuple(weak), p=args.p, q=args.q,
                         floor_weight=args.floor, seed=args.seed)
        net = generate_noisy_block_network(spec) if noisy else generate_block_network(spec)
        meta = {"kind": "noisy_block" if noisy else "block", "spec": spec.to_dict()}
    meta["rng"] = RNG_NAME
    meta["seed"] = args.seed
    meta["planted_labels"] = None if net.planted_labels is None else [int(x) for x in net.planted_labels]
    out = Path(args.out)
    fmt = args.format or guess_format(out)
    meta["format"] = fmt
    _write(out, dumps_network(net, fmt))
    _write(_sidecar(out), _dump(meta))
    print(f"wrote {out} ({net.n} vertices)")
    return 0


def _analyze(args):
    """Run the topological pipeline; returns (barcode, features, classification, meta)."""
    if args.filtration_in:
        filt = load_filtration(args.filtration_in)
        n = filt.n_vertices
    else:
        net = load_network(args.input, args.format)
        filt = build_flag_filtration(crvr_distance(net, args.zeta), args.max_dim)
        n = net.n
    barcode = compute_persistence(filt, keep_zero_length=args.keep_zero)
    cap = 1.0 / args.zeta
    shown = barcode.cap_to_infinity(cap) if args.cap_infinite else barcode
    feats = extract_features(barcode, args.tau, cap)
    cls = classify_structure(feats, k_groups=args.groups)
    meta = {"n": n, "zeta": args.zeta, "tau": args.tau, "max_dim": filt.max_dim, "seed": args.seed,
            "classifier_version": CLASSIFIER_VERSION, "classifier_thresholds": CLASSIFIER_THRESHOLDS}
    return shown, feats, cls, meta


def cmd_analyze(args) -> int:
    barcode, feats, cls, meta = _analyze(args)
    outdir = Path(args.outdir)
    stem = args.prefix
    _write(outdir / f"{stem}barcode.csv", emit_diagram_csv(barcode, args.zeta, args.tau, args.seed))
    _write(outdir / f"{stem}diagram.svg", emit_diagram_svg(barcode, args.tau))
    report = {**meta, "features": feats.to_dict(), "classification": cls.to_dict()}
    _write(outdir / f"{stem}features.json", _dump(report))
    print(f"{cls.label} {cls.score:.6f}")
    return 0


def cmd_louvain(args) -> int:
    net = load_network(args.input, args.format)
    part = louvain(net, seed=args.seed)
    report = part.to_dict()
    report["rng"] = RNG_NAME
    _emit(_dump(report), args.out)
    return 0


def _wsbm_config(args, seed: int) -> WsbmConfig:
    return WsbmConfig(K=args.K, alpha=args.alpha, edge_prior=tuple(args.edge_prior),
                      weight_prior=tuple(args.weight_prior), floor=args.floor, max_iter=args.max_iter,
                      tol=args.tol, restarts=args.restarts, seed=seed, init=args.init)


def cmd_wsbm(args) -> int:
    net = load_network(args.input, args.format)
    result = fit(net, _wsbm_config(args, args.seed))
    report = result.report()
    planted = _planted_labels(args.input)
    if planted is not None:
        report["ari_vs_planted"] = ari(result.labels, planted)
    _emit(_dump(report), args.out)
    return 0


def cmd_compare(args) -> int:
    seeds = stage_seeds(args.seed)
    barcode, feats, cls, meta = _analyze(args)
    net = load_network(args.input, args.format)
    part = louvain(net, seed=seeds["louvain"])
    result = fit(net, _wsbm_config(args, seeds["wsbm"]))
    planted = _planted_labels(args.input)
    wsbm_report = result.report()
    louvain_report = part.to_dict()
    if planted is not None:
        wsbm_report["ari_vs_planted"] = ari(result.labels, planted)
        louvain_report["ari_vs_planted"] = ari(part.labels, planted)
    report = {
        "input": Path(args.input).name,
        "seed": args.seed,
        "stage_seeds": seeds,
        "rng": RNG_NAME,
        "topology": {**meta, "label": cls.label, "score": cls.score, "features": feats.to_dict()},
        "louvain": louvain_report,
        "wsbm": wsbm_report,
    }
    _emit(_dump(report), args.out)
    if args.outdir:
        outdir = Path(args.outdir)
        _write(outdir / f"{args.prefix}barcode.csv", emit_diagram_csv(barcode, args.zeta, args.tau, args.seed))
        _write(outdir / f"{args.prefix}diagram.svg", emit_diagram_svg(barcode, args.tau))
    return 0


COMMANDS = {"generate": cmd_generate, "analyze": cmd_analyze, "louvain": cmd_louvain,
            "wsbm": cmd_wsbm, "compare": cmd_compare}


# ------------------------------------------------------------------ parser

def _positive(kind):
    def parse(text):
        try:
            x = kind(text)
        except ValueError:
            raise argparse.ArgumentTypeError(f"invalid {kind.__name__} value: {text!r}") from None
        if not x > 0:
            raise argparse.ArgumentTypeError(f"must be > 0, got {text}")
        return x
    return parse


def _probability(text):
    x = float(text)
    if not 0 <= x <= 1:
        raise argparse.ArgumentTypeError(f"must lie in [0, 1], got {text}")
    return x


def _add_common(p):
    p.add_argument("--seed", type=int, default=0, help="master RNG seed")
    p.add_argument("--format", choices=FORMATS, default=None,
                   help="network file format (default: by suffix, .mat/.dense = dense)")
    p.add_argument("--repeat", type=int, default=1, help="run N consecutive seeds, one worker per run")
    p.add_argument("--config", help="key=value config file; command-line flags win")


def _add_input(p, required=True):
    p.add_argument("input", nargs=None if required else "?", help="network file")


def _add_topology(p):
    p.add_argument("--zeta", type=_positive(float), default=DEFAULT_ZETA, help="cropping parameter (> 0)")
    p.add_argument("--tau", type=_positive(float), default=1.0, help="reference threshold for features")
    p.add_argument("--max-dim", type=int, default=3, help="simplex dimension cap (3 gives H0-H2)")
    p.add_argument("--groups", type=int, default=4, help="expected number of groups for the classifier")
    p.add_argument("--keep-zero", action="store_true", help="keep zero-length intervals")
    p.add_argument("--cap-infinite", action="store_true", help="report deaths at 1/zeta as infinite")
    p.add_argument("--prefix", default="", help="prefix for artifact file names")


def _add_wsbm(p):
    p.add_argument("--K", type=int, default=4, help="number of blocks")
    p.add_argument("--alpha", type=_probability, default=0.5, help="edge/weight mixing parameter")
    p.add_argument("--edge-prior", type=float, nargs=2, default=[1.0, 1.0], metavar=("A0", "B0"))
    p.add_argument("--weight-prior", type=float, nargs=4, default=[0.0, 0.1, 1.0, 1.0],
                   metavar=("MU0", "KAPPA0", "SHAPE0", "RATE0"))
    p.add_argument("--floor", type=float, default=0.0, help="weights <= floor count as non-edges")
    p.add_argument("--max-iter", type=int, default=200)
    p.add_argument("--tol", type=_positive(float), default=1e-6)
    p.add_argument("--restarts", type=int, default=5)
    p.add_argument("--init", choices=("kmeans", "dirichlet"), default="kmeans")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="crvrtda", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    g = sub.add_parser("generate", help="generate a synthetic weighted network")
    _add_common(g)
    g.add_argument("--structure", choices=STRUCTURES, default="assortative")
    g.add_argument("--groups", type=int, default=4)
    g.add_argument("--size", type=int, default=10)
    g.add_argument("--strong", type=float, nargs=2, default=[1.0, 10.0], metavar=("LO", "HI"))
    g.add_argument("--weak", type=float, nargs=2, default=None, metavar=("LO", "HI"),
                   help="weak interval (default [0,1] strict, [0.1,1] noisy)")
    g.add_argument("--p", type=_probability, default=1.0, help="strong-pair (or ER edge) probability")
    g.add_argument("--q", type=_probability, default=1.0, help="weak-pair probability")
    g.add_argument("--noisy", action="store_true", help="use the noisy p/q generator")
    g.add_argument("--floor", type=float, default=0.1, help="weight of dropped pairs / ER non-edges")
    g.add_argument("--er", action="store_true", help="weighted Erdos-Renyi instead of a block model")
    g.add_argument("--n", type=int, default=40, help="ER vertex count")
    g.add_argument("--interval", type=float, nargs=2, default=[0.1, 10.0], metavar=("LO", "HI"),
                   help="ER edge weight interval")
    g.add_argument("-o", "--out", default="network.edges", help="output network file")

    a = sub.add_parser("analyze", help="CRVR persistence diagram, features and structure label")
    _add_common(a)
    _add_input(a, required=False)
    _add_topology(a)
    a.add_argument("--filtration-in", help="read a filtration ('value dim v0 v1 ...') instead of a network")
    a.add_argument("--outdir", default=".", help="directory for barcode.csv, diagram.svg, features.json")

    lv = sub.add_parser("louvain", help="weighted Louvain partition")
    _add_common(lv)
    _add_input(lv)
    lv.add_argument("-o", "--out", help="output JSON (default stdout)")

    w = sub.add_parser("wsbm", help="variational WSBM fit")
    _add_common(w)
    _add_input(w)
    _add_wsbm(w)
    w.add_argument("-o", "--out", help="output JSON (default stdout)")

    c = sub.add_parser("compare", help="topology vs Louvain vs WSBM report")
    _add_common(c)
    _add_input(c)
    _add_topology(c)
    _add_wsbm(c)
    c.add_argument("-o", "--out", help="output JSON (default stdout)")
    c.add_argument("--outdir", help="also write barcode.csv and diagram.svg here")
    c.set_defaults(filtration_in=None)
    return parser


def read_config(path) -> dict:
    """Parse ``key = value`` lines; ``#`` starts a comment."""
    out = {}
    for lineno, raw in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"{path}:{lineno}: expected key = value")
        key, value = (s.strip() for s in line.split("=", 1))
        out[key.replace("-", "_")] = value
    return out


def _apply_config(parser, argv):
    """Re-parse with config-file values as defaults so explicit flags win."""
    args = parser.parse_args(argv)
    if not getattr(args, "config", None):
        return args
    try:
        cfg = read_config(args.config)
    except OSError as exc:
        parser.error(f"cannot read config: {exc}")
    sub_action = next(a for a in parser._actions if isinstance(a, argparse._SubParsersAction))
    sub = sub_action.choices[args.command]
    known = {a.dest: a for a in sub._actions}
    defaults = {}
    for key, value in cfg.items():
        action = known.get(key)
        if action is None:
            parser.error(f"unknown config key {key!r} for {args.command}")
        if action.nargs in (0,) or isinstance(action, argparse._StoreTrueAction):
            defaults[key] = value.lower() in ("1", "true", "yes", "on")
        elif action.nargs in (2, 4) or isinstance(action.nargs, int) and action.nargs > 1:
            defaults[key] = [action.type(v) if action.type else v for v in value.split()]
        else:
            defaults[key] = action.type(value) if action.type else value
    sub.set_defaults(**defaults)
    return parser.parse_args(argv)


def _validate(parser, args) -> None:
    cmd = args.command
    if getattr(args, "repeat", 1) < 1:
        parser.error("--repeat must be >= 1")
    if cmd in ("analyze", "compare"):
        if args.max_dim < 0:
            parser.error("--max-dim must be >= 0")
    if cmd == "analyze" and not args.input and not args.filtration_in:
        parser.error("analyze needs a network file or --filtration-in")
    for attr in ("input", "filtration_in"):
        path = getattr(args, attr, None)
        if path and not Path(path).exists():
            parser.error(f"input file not found: {path}")
    if cmd in ("wsbm", "compare"):
        if args.K < 1 or args.restarts < 1 or args.max_iter < 1:
            parser.error("--K, --restarts and --max-iter must be >= 1")
    if cmd == "generate":
        if args.groups < 1 or args.size < 1 or args.n < 1:
            parser.error("--groups, --size and --n must be >= 1")


def _suffixed(path, seed) -> str | None:
    if path is None:
        return None
    p = Path(path)
    return str(p.with_name(f"{p.stem}_seed{seed}{p.suffix}"))


def _run_one(args) -> int:
    return COMMANDS[args.command](args)


def _expand_repeats(args) -> list:
    runs = []
    for r in range(args.repeat):
        a = argparse.Namespace(**vars(args))
        a.seed = args.seed + r
        if hasattr(a, "out"):
            a.out = _suffixed(a.out, a.seed) if a.out else None
            if a.out is None and a.command != "generate":
                a.out = f"{a.command}_seed{a.seed}.json"
        if hasattr(a, "prefix"):
            a.prefix = f"{args.prefix}seed{a.seed}_"
        runs.append(a)
    return runs


def main(argv=None) -> int:
    parser = build_parser()
    args = _apply_config(parser, argv)
    _validate(parser, args)
    try:
        if args.repeat == 1:
            return _run_one(args)
        runs = _expand_repeats(args)
        with ProcessPoolExecutor(max_workers=len(runs)) as pool:
            codes = list(pool.map(_run_one, runs))
        return max(codes)
    except UsageError as exc:
        print(f"crvrtda: error: {exc}", file=sys.stderr)
        return 2
    except (OSError, ValueError, ArithmeticError, MemoryError) as exc:
        print(f"crvrtda: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
