"""Command-line entry point: ``pinwheel <command> [options]``.

Exit codes: 1 computation mismatch, 2 resource cap, 3 I/O problem.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import sys
from fractions import Fraction
from pathlib import Path

from . import __version__
from .geometry import PLUS
from .substitution import LevelCapExceeded, SubstitutionRule, patch, validate_rule

log = logging.getLogger("pinwheel")

EXIT_MISMATCH, EXIT_RESOURCE, EXIT_IO = 1, 2, 3


class Mismatch(RuntimeError):
    """A computed value disagrees with a required invariant."""


# ------------------------------------------------------------------ output


def _frac(q: Fraction) -> str:
    return f"{q.numerator}/{q.denominator}" if q.denominator != 1 else str(q.numerator)


def _emit(args, data: dict | None = None, rows: list[list] | None = None, lines: list[str] = ()) -> None:
    """Write the report in the requested format and the summary lines to stdout."""
    body = None
    if args.format == "json" and data is not None:
        body = json.dumps(data, indent=1, sort_keys=True) + "\n"
    elif args.format == "csv" and rows is not None:
        buf = io.StringIO()
        csv.writer(buf, lineterminator="\n").writerows(rows)
        body = buf.getvalue()
    if args.out:
        if body is not None:
            Path(args.out).write_text(body)
        for line in lines:
            print(line)
    elif body is not None and args.format == "json":
        sys.stdout.write(body)
    else:
        if body is not None:
            sys.stdout.write(body)
        for line in lines:
            print(line)


def patch_svg(p, plane_scale: bool = False, rule: SubstitutionRule | None = None) -> str:
    """Tiles as SVG polygons; coordinates pinned to 12 significant digits."""
    pts = [[(float(v.x), float(v.y)) for v in t.vertices()] for t in p.tiles]
    if plane_scale and p.level:
        m, o = complex(float(rule.expansion.x), float(rule.expansion.y)), complex(float(rule.offset.x), float(rule.offset.y))
        # inverse of phi^n: z -> (z - o_n) / m^n with o_n = o (m^n - 1) / (m - 1)
        mn = m**p.level
        on = o * (mn - 1) / (m - 1)
        pts = [[(((complex(x, y) - on) / mn).real, ((complex(x, y) - on) / mn).imag) for x, y in tri] for tri in pts]
    xs = [x for tri in pts for x, _ in tri]
    ys = [y for tri in pts for _, y in tri]
    x0, x1, y0, y1 = min(xs), max(xs), min(ys), max(ys)
    pad = 0.02 * max(x1 - x0, y1 - y0)

    def g(v: float) -> str:
        return f"{v + 0.0:.12g}"  # + 0.0 folds -0.0 into 0.0

    out = [
        '<svg xmlns="http://www.w3.org/2000/svg" '
        f'viewBox="{g(x0 - pad)} {g(-y1 - pad)} {g(x1 - x0 + 2 * pad)} {g(y1 - y0 + 2 * pad)}">',
        f'<g stroke="black" stroke-width="{g(pad / 10)}">',
    ]
    for t, tri in zip(p.tiles, pts):
        fill = "#d9a441" if t.chirality == PLUS else "#3c6e9f"
        coords = " ".join(f"{g(x)},{g(-y)}" for x, y in tri)
        out.append(f'<polygon points="{coords}" fill="{fill}"/>')
    out += ["</g>", "</svg>"]
    return "\n".join(out) + "\n"


def corona_sheet_svg(e, columns: int = 12) -> str:
    """All collared classes on one sheet: centre tile dark, neighbours light."""
    cell = 10.0
    rows = -(-len(e) // columns)

    def g(v: float) -> str:
        return f"{v + 0.0:.12g}"

    out = [
        '<svg xmlns="http://www.w3.org/2000/svg" '
        f'viewBox="0 0 {g(columns * cell)} {g(rows * cell)}">',
        '<g stroke="black" stroke-width="0.03">',
    ]
    for c in e:
        ox = (c.id % columns) * cell + cell / 2 - 1
        oy = (c.id // columns) * cell + cell / 2
        out.append(f'<g id="class-{c.id}">')
        for k, t in enumerate(c.representative.tiles):
            if k == 0:
                fill = "#8a5a00" if t.chirality == PLUS else "#1d3f66"
            else:
                fill = "#f0d9a8" if t.chirality == PLUS else "#b7cde3"
            coords = " ".join(f"{g(float(v.x) + ox)},{g(oy - float(v.y))}" for v in t.vertices())
            out.append(f'<polygon points="{coords}" fill="{fill}"/>')
        out.append(f'<text x="{g(ox - 3.5)}" y="{g(oy - 3.5)}" font-size="1.2">{c.id}</text></g>')
    out += ["</g>", "</svg>"]
    return "\n".join(out) + "\n"


# ---------------------------------------------------------------- commands


def cmd_generate(args, pipe) -> None:
    p = patch(args.level, pipe.rule, pipe.config.max_level)
    if args.format == "svg":
        text = patch_svg(p, args.plane_scale, pipe.rule)
        if args.out:
            Path(args.out).write_text(text)
        else:
            sys.stdout.write(text)
        return
    data = {**p.to_json(), **pipe.provenance()}
    rows = [["chirality", "c", "s", "x", "y"]] + [
        [t.chirality, _frac(t.rot.c), _frac(t.rot.s), _frac(t.trans.x), _frac(t.trans.y)] for t in p.tiles
    ]
    _emit(args, data, rows, [f"level = {p.level}; tiles = {len(p)}"])


def cmd_coronas(args, pipe) -> None:
    from .substitution import pose_to_json

    e = pipe.enumeration
    if args.format == "svg":
        text = corona_sheet_svg(e)
        if args.out:
            Path(args.out).write_text(text)
        else:
            sys.stdout.write(text)
        return
    counts = e.chirality_counts()
    partners = [c.chirality_partner for c in e]
    if any(p < 0 or partners[p] != i for i, p in enumerate(partners)):
        raise Mismatch("mirror partners do not form an involution")
    data = {
        "count": len(e),
        "chirality_counts": {"+": counts[1], "-": counts[-1]},
        "levels": e.levels,
        "classes_per_level": e.counts,
        "stable": e.stable,
        "closed": e.closed,
        "classes": [
            {"id": c.id, "chirality": c.chirality, "partner": c.chirality_partner,
             "corona_size": len(c.representative.tiles), "children": e.children[c.id],
             "key": c.key.hex(), "corona": [pose_to_json(t) for t in c.representative.tiles]}
            for c in e
        ],
        **pipe.provenance(),
    }
    rows = [["id", "chirality", "partner", "corona_size", "children"]] + [
        [c.id, c.chirality, c.chirality_partner, len(c.representative.tiles), " ".join(map(str, e.children[c.id]))]
        for c in e
    ]
    _emit(args, data, rows, [f"classes = {len(e)} ({counts[1]} + {counts[-1]} mirrored)"])


def cmd_matrix(args, pipe) -> None:
    if args.uncollared:
        from .corona import enumerate_uncollared

        _, a = enumerate_uncollared(pipe.rule)
    else:
        a = pipe.matrix
    from .perron import column_sums, primitivity

    sums = sorted(set(column_sums(a)))
    k, _ = primitivity(a)
    data = {"matrix": a, "column_sums": sums, "primitive_power": k, **pipe.provenance()}
    _emit(args, data, a, [f"size = {len(a)}; column sums = {sums}; primitive at power {k}"])


def cmd_perron(args, pipe) -> None:
    pd = pipe.perron
    e = pipe.enumeration
    data = {
        "eigenvalue": pd.eigenvalue,
        "denominator": pd.denominator,
        "gcd": pd.gcd,
        "rank_defect": pd.rank_defect,
        "alpha_prime": list(pd.alpha_prime),
        **pipe.provenance(),
    }
    rows = [["id", "chirality", "alpha", "alpha_prime"]] + [
        [i, e[i].chirality, _frac(a), ap] for i, (a, ap) in enumerate(zip(pd.alpha, pd.alpha_prime))
    ]
    _emit(args, data, rows, [f"lambda = {pd.eigenvalue}; D = {pd.denominator}; gcd = {pd.gcd}; rank(A−{pd.eigenvalue}I) = {pd.rank_defect}"])


def cmd_gaplabel(args, pipe) -> None:
    from .gaplabel import gap_module, report

    pd = pipe.perron
    m = gap_module(pd.alpha_prime, pd.denominator, pd.eigenvalue)
    data = {**report(pd.alpha_prime, pd.denominator, pd.eigenvalue), **pipe.provenance()}
    rows = [["coefficient", "base", "gcd", "denominator"], [_frac(m.coefficient), m.base, pd.gcd, pd.denominator]]
    lines = [
        f"c = {_frac(m.coefficient)}",
        f"lambda = {m.base}",
        f"gcd(alpha') = {pd.gcd}",
        f"D = {pd.denominator}",
        f"module = {m}",
    ]
    _emit(args, data, rows, lines)


def cmd_state(args, pipe) -> None:
    from .gaplabel import LimitElement, state

    try:
        vec = json.loads(Path(args.vector).read_text())
    except ValueError as exc:
        raise Mismatch(f"vector file is not valid JSON: {exc}") from exc
    pd = pipe.perron
    value = state(LimitElement(tuple(int(x) for x in vec), args.level), pd.alpha_prime, pd.denominator, pd.eigenvalue)
    _emit(args, {"level": args.level, "state": [value.numerator, value.denominator]}, [["state"], [_frac(value)]],
          [f"state = {_frac(value)}"])


def cmd_freq(args, pipe) -> None:
    from .gaplabel import class_frequency

    try:
        f = class_frequency(pipe.perron.alpha, args.class_id, args.level)
    except IndexError as exc:
        raise Mismatch(str(exc)) from exc
    _emit(args, {"class": args.class_id, "level": args.level, "frequency": [f.numerator, f.denominator]},
          [["class", "level", "frequency"], [args.class_id, args.level, _frac(f)]],
          [f"frequency = {_frac(f)}"])


def cmd_complex(args, pipe) -> None:
    from .apcomplex import check_boundaries, cohomology, cohomology_action, forgetful_map, inflation_map

    if args.action == "build":
        cx = pipe.complex(args.level, args.structure, args.orientation)
        if not check_boundaries(cx):
            raise Mismatch("boundary of boundary is not zero")
        v, ed, f = cx.counts
        data = {**cx.to_json(), **pipe.provenance()}
        rows = [["dimension", "cells"], [0, v], [1, ed], [2, f]]
        _emit(args, data, rows, [f"cells = {v}, {ed}, {f}; euler = {cx.euler}; d1*d2 = 0"])
    elif args.action == "cohomology":
        cx = pipe.complex(args.level, args.structure, args.orientation)
        h = cohomology(cx)
        if sum((-1) ** k * d.rank for k, d in enumerate(h.degrees)) != cx.euler:
            raise Mismatch("Euler characteristic disagrees with the Betti numbers")
        data = {**h.to_json(), "counts": list(cx.counts), **pipe.provenance()}
        rows = [["degree", "rank", "torsion"]] + [[k, d.rank, " ".join(map(str, d.torsion))] for k, d in enumerate(h.degrees)]
        _emit(args, data, rows, [f"H{k} = {d}" for k, d in enumerate(h.degrees)])
    else:
        k0 = pipe.complex(0, "polygonal", args.orientation)
        k1 = pipe.complex(1, "polygonal", args.orientation)
        sigma = inflation_map(k0, k1, pipe.rule).then(forgetful_map(k1, k0))
        h = cohomology(k0)
        acts = [cohomology_action(h, sigma, d) for d in range(3)]
        data = {"actions": [a.to_json() for a in acts], **pipe.provenance()}
        rows = [["degree", "rank", "eventual_rank"]] + [[a.degree, len(a.matrix), a.eventual_rank] for a in acts]
        lines = [f"H{a.degree}: rank {len(a.matrix)}, eventual rank of M* = {a.eventual_rank}" for a in acts]
        _emit(args, data, rows, lines)


def cmd_report(args, pipe) -> None:
    """Tables, JSON and figures for the whole pipeline in one directory."""
    from .apcomplex import cohomology
    from .corona import classify, scan_level
    from .gaplabel import empirical_frequencies, report
    from .plotting import plot_alpha, plot_corona_sheet, plot_frequencies, plot_patch

    out = Path(args.out or "report")
    out.mkdir(parents=True, exist_ok=True)
    e, pd = pipe.enumeration, pipe.perron
    partners = [c.chirality_partner for c in e]
    with open(out / "classes.csv", "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["id", "chirality", "partner", "alpha", "alpha_prime", "children"])
        for c in e:
            w.writerow([c.id, c.chirality, c.chirality_partner, _frac(pd.alpha[c.id]), pd.alpha_prime[c.id],
                        " ".join(map(str, e.children[c.id]))])
    level = min(args.level, pipe.config.max_level)
    scan = scan_level(level, pipe.rule, pipe.config.max_level)
    labels = classify(scan, e)
    emp = empirical_frequencies(labels.values(), len(e))
    with open(out / "frequencies.csv", "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["id", "exact", "observed", "difference"])
        for i in range(len(e)):
            w.writerow([i, f"{float(pd.alpha[i]):.12g}", f"{float(emp[i]):.12g}", f"{float(emp[i] - pd.alpha[i]):.12g}"])
    h = cohomology(pipe.complex(0, "simplicial"))
    summary = {
        "classes": len(e),
        "gap_labelling": report(pd.alpha_prime, pd.denominator, pd.eigenvalue),
        "cohomology_B0": h.to_json(),
        "frequency_level": level,
        "certified_tiles": len(labels),
        "max_frequency_error": float(max(abs(a - b) for a, b in zip(emp, pd.alpha))),
        **pipe.provenance(),
    }
    (out / "summary.json").write_text(json.dumps(summary, indent=1, sort_keys=True) + "\n")
    small = scan_level(min(4, level), pipe.rule, pipe.config.max_level)
    lab = classify(small, e)
    tiles = small.index.patch.tiles
    plot_patch(tiles, out / "patch_classes.png", [lab.get(i) for i in range(len(tiles))],
               title=f"collared classes in the level-{small.level} patch")
    plot_alpha(pd.alpha_prime, partners, out / "alpha.png")
    plot_corona_sheet(e, out / "collared_classes.png")
    plot_frequencies(pd.alpha, emp, out / "frequencies.png", tolerance=0.02)
    print(f"report written to {out}")


# -------------------------------------------------------------------- main


def _parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--rule", help="substitution rule as JSON (default: built-in pinwheel rule)")
    common.add_argument("--out", help="output file (directory for 'report')")
    common.add_argument("--format", choices=["json", "csv", "svg"], default=None)
    common.add_argument("--cache-dir", help="cache directory (env PINWHEEL_CACHE)")
    common.add_argument("--no-cache", action="store_true")
    common.add_argument("--max-level", type=int, default=None)
    common.add_argument("-v", "--verbose", action="store_true")

    p = argparse.ArgumentParser(prog="pinwheel", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    g = sub.add_parser("generate", parents=[common], help="write patch(n)")
    g.add_argument("--level", type=int, required=True)
    g.add_argument("--plane-scale", action="store_true", help="SVG only: shrink by phi^n back to tile size")
    g.set_defaults(func=cmd_generate)

    sub.add_parser("coronas", parents=[common], help="enumerate collared classes").set_defaults(func=cmd_coronas)
    m = sub.add_parser("matrix", parents=[common], help="substitution matrix")
    m.add_argument("--uncollared", action="store_true")
    m.set_defaults(func=cmd_matrix)
    sub.add_parser("perron", parents=[common], help="Perron eigendata").set_defaults(func=cmd_perron)
    sub.add_parser("gaplabel", parents=[common], help="module of patch frequencies").set_defaults(func=cmd_gaplabel)

    s = sub.add_parser("state", parents=[common], help="state of a limit element")
    s.add_argument("--vector", required=True)
    s.add_argument("--level", type=int, default=1)
    s.set_defaults(func=cmd_state)

    f = sub.add_parser("freq", parents=[common], help="frequency of a collared class")
    f.add_argument("--class", dest="class_id", type=int, required=True)
    f.add_argument("--level", type=int, default=0)
    f.set_defaults(func=cmd_freq)

    c = sub.add_parser("complex", parents=[common], help="approximant complexes")
    c.add_argument("action", choices=["build", "cohomology", "subst-action"])
    c.add_argument("--level", type=int, default=0, choices=[0, 1])
    c.add_argument("--structure", choices=["simplicial", "polygonal"], default="simplicial")
    c.add_argument("--orientation", choices=["plane", "chiral"], default="plane")
    c.set_defaults(func=cmd_complex)

    r = sub.add_parser("report", parents=[common], help="tables and figures")
    r.add_argument("--level", type=int, default=7, help="patch level for observed frequencies")
    r.set_defaults(func=cmd_report)
    return p


def _pipeline(args):
    from .pipeline import Pipeline, RunConfig

    rule = None
    if args.rule:
        rule = SubstitutionRule.from_json(json.loads(Path(args.rule).read_text()))
        rep = validate_rule(rule)
        if not rep.ok:
            raise Mismatch(f"rule fails validation: {', '.join(rep.failures)}")
    cfg = RunConfig()
    if args.max_level is not None:
        cfg.max_level = args.max_level
    if args.cache_dir:
        cfg.cache_dir = Path(args.cache_dir)
    cfg.use_cache = not args.no_cache
    cfg.__post_init__()
    return Pipeline(rule, cfg)


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    if args.format is None:
        args.format = "svg" if args.command == "generate" and args.out and args.out.endswith(".svg") else (
            "json" if args.command == "generate" else "text")
    if args.format == "svg" and args.command not in ("generate", "coronas"):
        print("error: svg output is only available for 'generate' and 'coronas'", file=sys.stderr)
        return EXIT_IO
    try:
        args.func(args, _pipeline(args))
    except (LevelCapExceeded, MemoryError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RESOURCE
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except (ValueError, RuntimeError, ArithmeticError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_MISMATCH
    return 0


if __name__ == "__main__":
    sys.exit(main())
