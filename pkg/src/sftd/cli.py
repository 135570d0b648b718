"""``sftd`` command line.

Exit codes: 0 on success, 1 when a gradient check fails, 2 for bad input
(missing or malformed files, incompatible fields, invalid parameters).
"""

from __future__ import annotations

import argparse
import csv
import io
import sys
import time
from pathlib import Path

import numpy as np

from .core import FieldError, GraphField, load_edges, load_field, load_graph_field, save_edges, save_field
from .cross_barcode import cross_barcode, site, sublevel_barcode, sublevel_site
from .divergence import SftdConfig, barcode_divergence
from .gradcheck import gradcheck
from .metrics import bottleneck_distance
from .report import CompareReport, dumps, encode_barcode, finite_diagram, loads
from .svg import barcode_svg, heatmap_svg
from . import synth

DEFAULT_MINIMA = ((16, 16), (16, 40), (44, 20))


def _ints(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(x) for x in text.split(",") if x.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def _points(text: str) -> tuple[tuple[float, ...], ...]:
    try:
        return tuple(tuple(float(x) for x in p.split(",")) for p in text.split(";") if p.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected 'x,y;x,y;...', got {text!r}") from None


def _add_inputs(p, pair: bool):
    p.add_argument("--f", help="field file (.npy or .csv)")
    p.add_argument("--edges", help="graph edge list csv")
    p.add_argument("--fvals", help="graph values csv for f")
    if pair:
        p.add_argument("--g", help="second field file")
        p.add_argument("--gvals", help="graph values csv for g")


def _load_one(args, field_attr: str, vals_attr: str):
    path = getattr(args, field_attr)
    if path:
        return load_field(path)
    if args.edges and getattr(args, vals_attr):
        return load_graph_field(args.edges, getattr(args, vals_attr))
    raise FieldError(f"need --{field_attr} or --edges with --{vals_attr}")


def _write(path, text: str):
    Path(path).write_text(text)


def _output(args, text: str):
    if args.out:
        _write(args.out, text)
    else:
        sys.stdout.write(text)


# --- commands ---------------------------------------------------------------


def cmd_compare(args) -> int:
    f = _load_one(args, "f", "fvals")
    g = _load_one(args, "g", "gvals")
    if isinstance(f, GraphField) != isinstance(g, GraphField):
        raise FieldError("f and g must both be lattice fields or both graph functions")
    config = SftdConfig(args.dims, args.p, args.sym)
    top = max(config.degrees)

    start = time.perf_counter()
    fwd_code, fwd_cx = cross_barcode(f, g, top)
    bwd_code, bwd_cx = cross_barcode(g, f, top)
    elapsed = (time.perf_counter() - start) * 1000

    fwd = {str(k): barcode_divergence(fwd_code, k, config.p) for k in config.degrees}
    bwd = {str(k): barcode_divergence(bwd_code, k, config.p) for k in config.degrees}
    sym = {k: 0.5 * (fwd[k] + bwd[k]) for k in fwd}
    values = {"forward": fwd, "backward": bwd, "symmetric": sym,
              "total": sum((sym if config.symmetric else fwd).values())}
    fwd_json = encode_barcode(fwd_code, lambda v: site(v, fwd_cx), config.degrees)
    bwd_json = encode_barcode(bwd_code, lambda v: site(v, bwd_cx), config.degrees)
    report = CompareReport(
        config={"degrees": list(config.degrees), "p": config.p, "symmetric": config.symmetric,
                "domain": "graph" if isinstance(f, GraphField) else "lattice"},
        sftd=values, dims=fwd_json["dims"], essential=fwd_json["essential"], backward=bwd_json,
        timing_ms=elapsed if args.timing else None,
    )
    _output(args, report.to_json())

    oriented = [("forward", fwd_json)] + ([("backward", bwd_json)] if config.symmetric else [])
    if args.points:
        _write(args.points, _points_csv(oriented, len(f.shape) if not isinstance(f, GraphField) else 1))
    if args.svg:
        bars = {k: [(b[0], b[1]) for name, js in oriented for b in js["dims"][str(k)]]
                for k in config.degrees}
        _write(args.svg, barcode_svg(bars, title="F-Cross-Barcode"))
    return 0


def _points_csv(oriented, ndim: int) -> str:
    """One row per localized birth or death; cone-point sites are skipped."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["degree", "event", "birth_or_death_value"] + [f"c{i + 1}" for i in range(ndim)])
    for _, js in oriented:
        for k, rows in js["dims"].items():
            for b, d, bs, ds in rows:
                for event, value, where in (("birth", b, bs), ("death", d, ds)):
                    if where is not None:
                        w.writerow([k, event, repr(value)] + where)
    return buf.getvalue()


def cmd_barcode(args) -> int:
    f = _load_one(args, "f", "fvals")
    dims = tuple(sorted(set(args.dims)))
    code = sublevel_barcode(f, max(dims))
    out = encode_barcode(code, lambda v: sublevel_site(v, f), dims)
    out["config"] = {"degrees": list(dims)}
    _output(args, dumps(out))
    if args.svg:
        bars = {k: [(b.birth, b.death) for b in code.bars + code.essential if b.dim == k] for k in dims}
        _write(args.svg, barcode_svg(bars, title="Barcode"))
    return 0


def cmd_gradcheck(args) -> int:
    f = _load_one(args, "f", "fvals")
    g = _load_one(args, "g", "gvals")
    config = SftdConfig(args.dims, args.p, args.sym)
    rep = gradcheck(f, g, config, eps=args.eps, trials=args.trials, jitter=args.jitter, seed=args.seed)
    out = rep.to_dict()
    if rep.tied_input:
        out["note"] = (
            f"input has values closer than 3*eps; values were jittered by up to {args.jitter} "
            f"and then separated by 4*eps per rank before checking")
    _output(args, dumps(out))
    return 0 if rep.passed else 1


def cmd_synth(args) -> int:
    kind = args.kind
    if kind == "minima":
        shape = args.shape
        if args.random:
            rng = synth.make_rng(args.seed)
            centers = [tuple(float(rng.integers(0, d)) for d in shape) for _ in range(args.random)]
        else:
            centers = args.centers or DEFAULT_MINIMA
        if args.mirror:
            centers = [tuple(c[:-1]) + (shape[-1] - 1 - c[-1],) for c in centers]
        save_field(synth.gaussian_minima_field(shape, centers, args.depth, args.sigma), args.out)
    elif kind == "lattice":
        defects = [tuple(d) for d in args.defect or ()]
        for d in defects:
            if len(d) != 2:
                raise FieldError(f"defect cell needs two indices, got {d}")
        save_field(synth.lattice_defect_field(args.cells, args.pitch, defects), args.out)
    elif kind == "spheres":
        save_field(synth.spheres_bridge_field(args.grid, args.r_inner, args.r_outer, args.width,
                                              args.bridge), args.out)
    else:
        save_edges(synth.watts_strogatz(args.n, args.k, args.beta, args.seed), args.out)
    return 0


def cmd_eigmap(args) -> int:
    edges = load_edges(args.edges)
    n = args.n if args.n else (int(edges.max()) + 1 if edges.size else 0)
    heat = synth.eigenvector_heatmap(n, edges, args.dims, args.p)
    buf = io.StringIO()
    csv.writer(buf, lineterminator="\n").writerows([[repr(float(x)) for x in row] for row in heat])
    _output(args, buf.getvalue())
    if args.svg:
        _write(args.svg, heatmap_svg(heat.tolist(), title="SFTD between Laplacian eigenvectors"))
    return 0


def cmd_bottleneck(args) -> int:
    a = finite_diagram(loads(Path(args.a).read_text()), args.dim)
    b = finite_diagram(loads(Path(args.b).read_text()), args.dim)
    print(repr(bottleneck_distance(np.array(a), np.array(b))))
    return 0


# --- parser -----------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="sftd", description="F-Cross-Barcodes and SFTD")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("compare", help="SFTD and localized cross-barcodes of two functions")
    _add_inputs(p, pair=True)
    p.add_argument("--dims", type=_ints, default=(0,))
    p.add_argument("--p", type=float, default=1.0)
    p.add_argument("--sym", action="store_true", help="symmetrize the reported total")
    p.add_argument("--out", help="report JSON (default: stdout)")
    p.add_argument("--points", help="csv of localized birth/death sites")
    p.add_argument("--svg", help="barcode drawing")
    p.add_argument("--timing", action="store_true", help="include timing_ms in the report")
    p.set_defaults(run=cmd_compare)

    p = sub.add_parser("barcode", help="sublevel barcode of one function")
    _add_inputs(p, pair=False)
    p.add_argument("--dims", type=_ints, default=(0,))
    p.add_argument("--out")
    p.add_argument("--svg")
    p.set_defaults(run=cmd_barcode)

    p = sub.add_parser("gradcheck", help="finite-difference check of the SFTD gradient")
    _add_inputs(p, pair=True)
    p.add_argument("--dims", type=_ints, default=(0, 1))
    p.add_argument("--p", type=float, default=2.0)
    p.add_argument("--sym", action="store_true")
    p.add_argument("--eps", type=float, default=1e-5)
    p.add_argument("--trials", type=int, default=3)
    p.add_argument("--jitter", type=float, default=1e-3)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out")
    p.set_defaults(run=cmd_gradcheck)

    p = sub.add_parser("synth", help="synthetic fields and graphs")
    kinds = p.add_subparsers(dest="kind", required=True)
    k = kinds.add_parser("minima", help="sum of Gaussian wells")
    k.add_argument("--shape", type=_ints, default=(64, 64))
    k.add_argument("--centers", type=_points, help="'x,y;x,y;...'")
    k.add_argument("--random", type=int, default=0, help="draw this many centres from --seed")
    k.add_argument("--mirror", action="store_true", help="reflect centres along the last axis")
    k.add_argument("--depth", type=float, default=1.0)
    k.add_argument("--sigma", type=float, default=6.0)
    k = kinds.add_parser("lattice", help="square wall lattice with optional defects")
    k.add_argument("--cells", type=_ints, default=(3, 3))
    k.add_argument("--pitch", type=int, default=6)
    k.add_argument("--defect", type=_ints, action="append", help="r,c of a cell whose wall opens")
    k = kinds.add_parser("spheres", help="concentric shells joined by a tube")
    k.add_argument("--grid", type=int, default=32)
    k.add_argument("--bridge", choices=("above", "below"), default="above")
    k.add_argument("--r-inner", type=float, default=0.2)
    k.add_argument("--r-outer", type=float, default=0.4)
    k.add_argument("--width", type=float, default=0.05)
    k = kinds.add_parser("ws-graph", help="Watts-Strogatz edge list")
    k.add_argument("--n", type=int, default=30)
    k.add_argument("--k", type=int, default=4)
    k.add_argument("--beta", type=float, default=0.3)
    for k in kinds.choices.values():
        k.add_argument("--seed", type=int, default=0)
        k.add_argument("--out", required=True)
    p.set_defaults(run=cmd_synth)

    p = sub.add_parser("eigmap", help="SFTD between Laplacian eigenvectors")
    p.add_argument("--edges", required=True)
    p.add_argument("--n", type=int, help="vertex count (default: largest endpoint + 1)")
    p.add_argument("--dims", type=_ints, default=(0, 1))
    p.add_argument("--p", type=float, default=1.0)
    p.add_argument("--out")
    p.add_argument("--svg")
    p.set_defaults(run=cmd_eigmap)

    p = sub.add_parser("bottleneck", help="bottleneck distance between two barcode JSON files")
    p.add_argument("--a", required=True)
    p.add_argument("--b", required=True)
    p.add_argument("--dim", type=int, default=0)
    p.set_defaults(run=cmd_bottleneck)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.run(args)
    except (FieldError, OSError) as e:
        print(f"sftd: error: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
