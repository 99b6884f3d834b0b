"""Chart documents, renderers, and the command-line front end.

A chart document is the serialization-friendly form of one page of a
bigraded dimension table: dots at (stem, filtration) positions, optional
product/differential edges between them, and a metadata block.  Emitters
are pure functions of (document, style) and write canonical output — keys
sorted, dots and edges in a fixed order, fixed-point coordinates — so two
runs of the same computation produce byte-identical files.

The CLI exposes the engine end to end: resolving a module file, printing
its chart, running a connecting map or a composite of two, running the
full glued-sequence pipeline with the abutment comparison, checking the
slow independent Ext oracle against the resolution, and rendering chart
documents.  Exit status 0 means success, 1 means a computation-level
mismatch (acceptance mode), 2 means a usage or parse problem.
"""

from __future__ import annotations

import argparse
import json
import sys

from .connect import WiringError, compose_connecting, connecting_hom
from .fpmod import IllDefined, ParseError, load_mod, load_ses
from .jay import PageError, abutment_check, build_scenario, d2_page, \
    later_pages
from .oracle import bar_ext_dims
from .resolve import CapError, ext_dims, minimal_resolution
from .steenrod import ProfileError, named_profile


class ChartError(Exception):
    """Malformed chart document or rendering constraint violation."""


EDGE_KINDS = ("h0", "h1", "other-product", "differential")


def canonical_json(obj):
    """Canonical serialization: sorted keys, no whitespace, one newline."""
    return json.dumps(obj, sort_keys=True, separators=(",", ":")) + "\n"


class ChartDoc:
    """Dots at (stem, s, index) plus typed edges between dot positions.

    Vertical unit-product edges rise one filtration step in the same stem;
    slope-one product edges move one stem and one filtration; a page-r
    differential edge moves one stem left and r filtrations up."""

    def __init__(self, metadata, dots, edges=()):
        self.metadata = dict(metadata)
        self.dots = [tuple(int(x) for x in d) for d in dots]
        self.edges = [dict(e) for e in edges]
        self._validate()

    def _validate(self):
        seen = set()
        for d in self.dots:
            if len(d) != 3:
                raise ChartError(f"dot {d!r} is not (stem, s, index)")
            if d in seen:
                raise ChartError(f"duplicate dot {d!r}")
            seen.add(d)
        for e in self.edges:
            kind = e.get("kind")
            if kind not in EDGE_KINDS:
                raise ChartError(f"unknown edge kind {kind!r}")
            a, b = e.get("from"), e.get("to")
            for end in (a, b):
                if not isinstance(end, int) or not 0 <= end < len(self.dots):
                    raise ChartError(f"edge endpoint {end!r} out of range")
            (n0, s0, _), (n1, s1, _) = self.dots[a], self.dots[b]
            step = (n1 - n0, s1 - s0)
            if kind == "h0" and step != (0, 1):
                raise ChartError(f"unit-product edge {a}->{b} is not "
                                 f"vertical: {step}")
            if kind == "h1" and step != (1, 1):
                raise ChartError(f"slope-one edge {a}->{b} moves {step}")
            if kind == "differential":
                r = e.get("page")
                if not isinstance(r, int) or r < 2:
                    raise ChartError(f"differential edge {a}->{b} needs an "
                                     f"integer page >= 2")
                if step != (-1, r):
                    raise ChartError(f"page-{r} differential edge {a}->{b} "
                                     f"moves {step}")

    def dims(self):
        """Dot counts per (stem, s) cell."""
        out = {}
        for (n, s, _) in self.dots:
            out[(n, s)] = out.get((n, s), 0) + 1
        return out

    def column_counts(self):
        out = {}
        for (n, _, _) in self.dots:
            out[n] = out.get(n, 0) + 1
        return out

    def window(self):
        """(stem_lo, stem_hi, s_lo, s_hi), or None for an empty chart."""
        if not self.dots:
            return None
        ns = [n for (n, _, _) in self.dots]
        ss = [s for (_, s, _) in self.dots]
        return min(ns), max(ns), min(ss), max(ss)

    def __eq__(self, other):
        return (isinstance(other, ChartDoc)
                and self.metadata == other.metadata
                and self.dots == other.dots
                and self.edges == other.edges)

    def __repr__(self):
        return (f"<ChartDoc {len(self.dots)} dots {len(self.edges)} edges "
                f"{self.metadata.get('module', '')}>")


def chart_from_dims(metadata, dims):
    """Chart document from a table keyed by (s, t): one indexed dot per
    dimension unit, in canonical (stem, s, index) order."""
    dots = []
    for (s, t), d in dims.items():
        for i in range(d):
            dots.append((t - s, s, i))
    return ChartDoc(metadata, sorted(dots))


def _edge_key(e):
    return (e["from"], e["to"], e["kind"], e.get("page", 0))


def emit_json(chart):
    """Canonical JSON for a chart document; stable across runs."""
    return canonical_json({
        "metadata": chart.metadata,
        "dots": [list(d) for d in sorted(chart.dots)],
        "edges": sorted(chart.edges, key=_edge_key),
    })


def read_chart(text):
    try:
        obj = json.loads(text)
        return ChartDoc(obj["metadata"], obj["dots"], obj.get("edges", ()))
    except (KeyError, TypeError, ValueError) as exc:
        raise ChartError(f"bad chart document: {exc}") from None


def _meta_line(metadata):
    return " ".join(f"{k}={metadata[k]}" for k in sorted(metadata))


def emit_text(chart, config=None):
    """Fixed-width grid, one cell per (stem, s); blank cell for zero."""
    config = config or {}
    max_width = int(config.get("text_width", 120))
    header = "# " + _meta_line(chart.metadata)
    win = chart.window()
    if win is None:
        return header + "\n(empty)\n"
    n_lo, n_hi, _, s_hi = win
    n_lo = min(n_lo, 0)
    dims = chart.dims()
    cell = max(len(str(d)) for d in dims.values()) + 1
    label = len(str(s_hi)) + 1
    width = label + cell * (n_hi - n_lo + 1)
    if width > max_width:
        raise ChartError(f"grid is {width} columns wide; text_width is "
                         f"{max_width}")
    lines = [header]
    for s in range(s_hi, -1, -1):
        row = [str(s).rjust(label - 1), "|"]
        for n in range(n_lo, n_hi + 1):
            d = dims.get((n, s), 0)
            row.append((str(d) if d else "").rjust(cell))
        lines.append("".join(row).rstrip())
    axis = [" " * (label - 1), "+"]
    marks = [" " * label]
    for n in range(n_lo, n_hi + 1):
        axis.append("-" * cell)
        marks.append(str(n).rjust(cell) if n % 4 == 0 else " " * cell)
    lines.append("".join(axis))
    lines.append("".join(marks).rstrip())
    return "\n".join(lines) + "\n"


_SVG_STYLE = ("circle{fill:#222}"
              "line.h0{stroke:#222;stroke-width:1}"
              "line.h1{stroke:#777;stroke-width:1}"
              "line.other-product{stroke:#aaa;stroke-width:1}"
              "line.differential{stroke:#b22;stroke-width:1}"
              "line.axis{stroke:#000;stroke-width:1}"
              "text{font:10px sans-serif;fill:#000}")


def emit_svg(chart, style=None):
    """Deterministic SVG: x grows with the stem, y drops with filtration."""
    style = style or {}
    u = float(style.get("unit", 16))
    r = float(style.get("radius", 3))
    margin = float(style.get("margin", 24))
    win = chart.window()
    if win is None:
        n_lo, n_hi, s_lo, s_hi = 0, 0, 0, 0
    else:
        n_lo, n_hi, s_lo, s_hi = win
        n_lo = min(n_lo, 0)
    w = margin * 2 + (n_hi - n_lo + 1) * u
    h = margin * 2 + (s_hi + 1) * u

    def x(n, i=0, c=1):
        off = (i - (c - 1) / 2.0) * (0.5 * u / c) if c > 1 else 0.0
        return margin + (n - n_lo + 0.5) * u + off

    def y(s):
        return margin + (s_hi - s + 0.5) * u

    dims = chart.dims()
    out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{w:.0f}" '
           f'height="{h:.0f}" viewBox="0 0 {w:.0f} {h:.0f}">',
           f"<style>{_SVG_STYLE}</style>",
           '<defs><marker id="arrow" markerWidth="6" markerHeight="6" '
           'refX="5" refY="3" orient="auto"><path d="M0,0 L6,3 L0,6 z" '
           'fill="#b22"/></marker></defs>',
           f'<title>{_meta_line(chart.metadata)}</title>']
    ax = margin - 0.25 * u
    ay = margin + (s_hi + 1) * u + 0.25 * u
    out.append(f'<line class="axis" x1="{ax:.2f}" y1="{ay:.2f}" '
               f'x2="{margin + (n_hi - n_lo + 1) * u:.2f}" y2="{ay:.2f}"/>')
    out.append(f'<line class="axis" x1="{ax:.2f}" y1="{ay:.2f}" '
               f'x2="{ax:.2f}" y2="{margin - 0.25 * u:.2f}"/>')
    for n in range(n_lo, n_hi + 1):
        if n % 4 == 0:
            out.append(f'<text x="{x(n):.2f}" y="{ay + 12:.2f}" '
                       f'text-anchor="middle">{n}</text>')
    for s in range(0, s_hi + 1, 4):
        out.append(f'<text x="{ax - 4:.2f}" y="{y(s) + 3:.2f}" '
                   f'text-anchor="end">{s}</text>')

    def dot_xy(idx):
        n, s, i = chart.dots[idx]
        return x(n, i, dims[(n, s)]), y(s)

    for e in sorted(chart.edges, key=_edge_key):
        x1, y1 = dot_xy(e["from"])
        x2, y2 = dot_xy(e["to"])
        extra = ' marker-end="url(#arrow)"' if e["kind"] == "differential" \
            else ""
        out.append(f'<line class="{e["kind"]}" x1="{x1:.2f}" y1="{y1:.2f}" '
                   f'x2="{x2:.2f}" y2="{y2:.2f}"{extra}/>')
    for idx in range(len(chart.dots)):
        cx, cy = dot_xy(idx)
        out.append(f'<circle cx="{cx:.2f}" cy="{cy:.2f}" r="{r:.1f}"/>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def read_config(path):
    """Small key = value file: ints and floats coerced, commas make lists."""
    out = {}
    with open(path) as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            key, eq, value = line.partition("=")
            if not eq:
                raise ChartError(f"{path}:{lineno}: expected 'key = value'")
            key, value = key.strip(), value.strip()
            if "," in value:
                out[key] = [v.strip() for v in value.split(",") if v.strip()]
                continue
            for conv in (int, float):
                try:
                    value = conv(value)
                    break
                except ValueError:
                    pass
            out[key] = value
    return out


def golden_payload(sc, e2, pages):
    """Dimension tables for the algebraic-differential page, the first
    ladder page, and the final in-window page, as one JSON-ready dict.

    Serialized with canonical_json these are the golden per-variant tables:
    regenerating them must be byte-identical run over run."""
    def rows(dims):
        return [[s, t, d] for (s, t), d in sorted(dims.items()) if d]
    return {
        "variant": sc.variant, "prime": sc.p,
        "s_cap": sc.s_cap, "stem_cap": sc.stem_cap,
        "pages": {"e2": rows(e2.dims), "e3": rows(pages[0].dims),
                  "einf": rows(pages[-1].dims)},
    }


# ---------------------------------------------------------------------------
# command-line front end

def _load_presentation(args):
    pres = load_mod(args.module)
    if named_profile(args.algebra, pres.profile.p) is not pres.profile:
        raise ChartError(f"module {args.module} is over "
                         f"{pres.profile.name}, not {args.algebra}")
    return pres


def _write(path, text):
    if path == "-":
        sys.stdout.write(text)
    else:
        with open(path, "w") as fh:
            fh.write(text)


def _dims_rows(dims):
    return [[s, t, d] for (s, t), d in sorted(dims.items()) if d]


def _cmd_resolve(args):
    pres = _load_presentation(args)
    res = minimal_resolution(pres.realize(t_max=args.tmax),
                             s_max=args.smax, t_max=args.tmax)
    table = ext_dims(res)
    gens = sorted((s, t) for (s, t), d in table.items() for _ in range(d))
    for s in range(args.smax + 1):
        degs = [str(t) for (s0, t) in gens if s0 == s]
        print(f"s={s}: {' '.join(degs) if degs else '-'}")
    if args.json:
        doc = {"algebra": args.algebra, "module": pres.name,
               "generators": [list(g) for g in gens],
               "smax": args.smax, "tmax": args.tmax}
        _write(args.json, canonical_json(doc))
    return 0


def _cmd_ext(args):
    pres = _load_presentation(args)
    res = minimal_resolution(pres.realize(t_max=args.tmax),
                             s_max=args.smax, t_max=args.tmax)
    table = ext_dims(res)
    for s, t, d in _dims_rows(table):
        print(f"{s} {t} {d}")
    if args.json:
        doc = {"algebra": args.algebra, "module": pres.name,
               "dims": _dims_rows(table), "smax": args.smax,
               "tmax": args.tmax}
        _write(args.json, canonical_json(doc))
    return 0


def _cmd_delta(args):
    ses = load_ses(args.ses)
    conn = connecting_hom(ses, args.smax, args.tmax)
    print("s t rank kernel cokernel")
    for s in range(conn.s_max + 1):
        for t in range(conn.t_max + 1):
            r = conn.rank(s, t)
            k = conn.kernel_dim(s, t)
            c = conn.cokernel_dim(s, t)
            if r or k or c:
                print(f"{s} {t} {r} {k} {c}")
    return 0


def _cmd_d2compose(args):
    inner = load_ses(args.inner)
    outer = load_ses(args.outer)
    comp = compose_connecting(inner, outer, args.smax, args.tmax)
    print("s t rank kernel")
    for s in range(comp.s_max + 1):
        for t in range(comp.t_max + 1):
            r = comp.rank(s, t)
            k = comp.kernel_dim(s, t)
            if r or k:
                print(f"{s} {t} {r} {k}")
    return 0


def _cmd_jay(args):
    sc = build_scenario(args.prime, args.variant)
    e2 = d2_page(sc)
    pages = later_pages(sc, e2.turn())
    rep = abutment_check(sc, pages, n_max=args.nmax)
    print(f"# variant={args.variant} prime={args.prime} "
          f"final_page={pages[-1].r}")
    print("n computed expected ok")
    for n, got, want, ok in rep.entries:
        print(f"{n} {'Z' if got is None else got} "
              f"{'Z' if want is None else want} {'yes' if ok else 'NO'}")
    if args.svg:
        final = pages[-1]
        meta = {"prime": args.prime, "algebra": sc.profile_high.name,
                "module": args.variant, "page": final.r}
        _write(args.svg, emit_svg(chart_from_dims(meta, final.dims),
                                  style=_style_from(args)))
    if args.check and not rep.ok:
        print(f"mismatch in stems {rep.failing_stems}", file=sys.stderr)
        return 1
    return 0


def _cmd_oracle_check(args):
    pres = _load_presentation(args)
    mod = pres.realize(t_max=args.tmax)
    slow = bar_ext_dims(pres.profile, mod, args.smax, args.tmax)
    fast = ext_dims(minimal_resolution(mod, s_max=args.smax,
                                       t_max=args.tmax))
    bad = []
    for s in range(args.smax + 1):
        for t in range(args.tmax + 1):
            a, b = slow.get((s, t), 0), fast.get((s, t), 0)
            if a != b:
                bad.append((s, t, a, b))
    if bad:
        for s, t, a, b in bad:
            print(f"mismatch at ({s},{t}): bar {a} != resolution {b}",
                  file=sys.stderr)
        return 1
    print(f"ok: {sum(slow.values())} classes agree "
          f"(s<={args.smax}, t<={args.tmax})")
    return 0


def _style_from(args):
    return read_config(args.config) if getattr(args, "config", None) else {}


def _cmd_chart(args):
    with open(args.infile) as fh:
        doc = read_chart(fh.read())
    cfg = _style_from(args)
    if args.svg:
        _write(args.svg, emit_svg(doc, style=cfg))
    else:
        sys.stdout.write(emit_text(doc, config=cfg))
    return 0


def _window_flags(sp):
    sp.add_argument("--smax", type=int, required=True)
    sp.add_argument("--tmax", type=int, required=True)


def _module_flags(sp):
    sp.add_argument("--algebra", required=True,
                    help="profile name, e.g. A(1)")
    sp.add_argument("--module", required=True, help=".mod file")


def build_parser():
    parser = argparse.ArgumentParser(
        prog="extchart",
        description="Ext charts over finite Steenrod subalgebras")
    sub = parser.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("resolve", help="minimal resolution generators")
    _module_flags(sp)
    _window_flags(sp)
    sp.add_argument("--json", metavar="PATH")
    sp.set_defaults(fn=_cmd_resolve)

    sp = sub.add_parser("ext", help="Ext dimension table")
    _module_flags(sp)
    _window_flags(sp)
    sp.add_argument("--json", metavar="PATH")
    sp.set_defaults(fn=_cmd_ext)

    sp = sub.add_parser("delta", help="connecting map of a .ses file")
    sp.add_argument("--ses", required=True)
    _window_flags(sp)
    sp.set_defaults(fn=_cmd_delta)

    sp = sub.add_parser("d2compose", help="composite of two connecting maps")
    sp.add_argument("--inner", required=True, help="first .ses file")
    sp.add_argument("--outer", required=True, help="second .ses file")
    _window_flags(sp)
    sp.set_defaults(fn=_cmd_d2compose)

    sp = sub.add_parser("jay", help="glued-sequence pipeline and abutment")
    sp.add_argument("--prime", type=int, choices=(2, 3), required=True)
    sp.add_argument("--variant", required=True,
                    choices=("j2", "jmod2", "jp", "jpmodp"))
    sp.add_argument("--nmax", type=int, required=True)
    sp.add_argument("--check", action="store_true",
                    help="exit 1 if the abutment comparison fails")
    sp.add_argument("--svg", metavar="PATH")
    sp.add_argument("--config", metavar="PATH")
    sp.set_defaults(fn=_cmd_jay)

    sp = sub.add_parser("oracle-check",
                        help="independent slow Ext against the resolution")
    _module_flags(sp)
    _window_flags(sp)
    sp.set_defaults(fn=_cmd_oracle_check)

    sp = sub.add_parser("chart", help="render a chart document")
    sp.add_argument("--in", dest="infile", required=True, metavar="PATH")
    group = sp.add_mutually_exclusive_group(required=True)
    group.add_argument("--svg", metavar="PATH")
    group.add_argument("--text", action="store_true")
    sp.add_argument("--config", metavar="PATH")
    sp.set_defaults(fn=_cmd_chart)
    return parser


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code else 0
    try:
        return args.fn(args)
    except (ParseError, IllDefined, ChartError, WiringError, CapError,
            ProfileError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except PageError as exc:
        print(f"inconsistent pages: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
