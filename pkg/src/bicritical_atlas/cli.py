"""Command-line interface: classification, arc work, rendering, serving.

Reports are the same records the HTTP service returns, printed as
`key=value` lines (single records) or JSON (nested reports).
"""

from __future__ import annotations

import argparse
import json
import sys

from .records import (
    arc_trace_records,
    classification_record,
    parse_family,
    parse_param,
    scan_record,
    visibility_record,
)


def _print_record(record: dict) -> None:
    for key, value in record.items():
        print(f"{key}={value}")


def _print_json(doc) -> None:
    json.dump(doc, sys.stdout, indent=1, sort_keys=True)
    print()


def _add_family(sub, required=True):
    sub.add_argument("--family", choices=["newton", "antipodal"],
                     required=required)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="atlas")
    subs = parser.add_subparsers(dest="command", required=True)

    s = subs.add_parser("classify", help="classify one parameter")
    _add_family(s)
    s.add_argument("--param", required=True, help="RE,IM")
    s.add_argument("--tier", default="standard",
                   choices=["preview", "standard", "analysis"])

    s = subs.add_parser("trace-arc", help="trace Ecalle heights along an arc")
    _add_family(s)
    s.add_argument("--center", required=True, help="component center RE,IM")
    s.add_argument("--direction", required=True, help="outward ray RE,IM")
    s.add_argument("--period", type=int, required=True)
    s.add_argument("--targets", required=True,
                   help="comma-separated Ecalle heights")

    s = subs.add_parser("phase", help="perturbed Fatou phase along an approach")
    _add_family(s)
    s.add_argument("--center", required=True, help="component center RE,IM")
    s.add_argument("--direction", required=True, help="outward ray RE,IM")
    s.add_argument("--period", type=int, required=True)
    s.add_argument("--distances", default="1e-3,1e-4,1e-5")

    s = subs.add_parser("visibility", help="boundary triple and verdicts")
    _add_family(s)
    s.add_argument("--param", required=True, help="RE,IM")

    s = subs.add_parser("scan-arc", help="classify the strip beside an arc")
    _add_family(s)
    s.add_argument("--center", required=True, help="component center RE,IM")
    s.add_argument("--direction", required=True, help="outward ray RE,IM")
    s.add_argument("--period", type=int, required=True)
    s.add_argument("--targets", required=True)
    s.add_argument("--window", type=float, default=1e-2)

    for name in ("render-param", "render-dyn"):
        s = subs.add_parser(name, help=f"{name.split('-')[1]} plane render")
        _add_family(s)
        if name == "render-dyn":
            s.add_argument("--param", required=True, help="anchor RE,IM")
        s.add_argument("--center", required=True, help="RE,IM")
        s.add_argument("--scale", type=float, required=True,
                       help="plane units per pixel")
        s.add_argument("--size", default="512x512", help="WxH")
        s.add_argument("--tier", default="standard",
                       choices=["preview", "standard", "analysis"])
        s.add_argument("--out", required=True)
        s.add_argument("--meta", required=True)

    s = subs.add_parser("figure", help="reproduce a configured figure")
    s.add_argument("figure_id")
    s.add_argument("--outdir", default=".")

    s = subs.add_parser("serve", help="run the HTTP service")
    s.add_argument("--port", type=int, default=8000)
    s.add_argument("--cache-dir", default=None)
    s.add_argument("--max-zoom", type=int, default=40)

    return parser


def _targets(text: str) -> list:
    return [float(t) for t in text.split(",") if t.strip()]


def _viewport(args):
    from .render import Viewport
    w_s, h_s = args.size.lower().split("x")
    return Viewport(parse_param(args.center), args.scale, int(w_s), int(h_s))


def _run_render(args) -> None:
    from .families import Family
    from .records import make_parameter
    from .render import (
        Tile,
        colorize_basins,
        colorize_classification,
        render_dynamical_view,
        render_parameter_view,
        _classification_meta,
        _write_meta,
    )
    family = Family(args.family)
    viewport = _viewport(args)
    if args.command == "render-param":
        kind, period = render_parameter_view(family, viewport, args.tier)
        pixels = colorize_classification(kind, period)
        extra = _classification_meta(kind, period, args.tier)
    else:
        anchor = parse_param(args.param)
        codes = render_dynamical_view(make_parameter(family, anchor),
                                      viewport, args.tier)
        pixels = colorize_basins(codes)
        extra = {"tier": args.tier, "anchor": [anchor.real, anchor.imag]}
    with open(args.out, "wb") as fh:
        fh.write(Tile(pixels, extra).png_bytes())
    _write_meta(args.meta, family, viewport, extra)
    print(f"wrote {args.out} and {args.meta}")


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)

    if args.command == "classify":
        _print_record(classification_record(parse_family(args.family),
                                            parse_param(args.param), args.tier))
    elif args.command == "trace-arc":
        records = arc_trace_records(parse_family(args.family),
                                    parse_param(args.center),
                                    parse_param(args.direction),
                                    args.period, _targets(args.targets))
        print("parameter h multiplier_residual petal_kind")
        for r in records:
            print(f"{r['parameter'][0]!r},{r['parameter'][1]!r} {r['h']:+.6f} "
                  f"{r['multiplier_residual']:.3e} {r['petal_kind']}")
    elif args.command == "phase":
        from .parabolic import find_boundary_parabolic, repelling_fatou_and_phase
        from .records import make_parameter
        family = parse_family(args.family)
        center = parse_param(args.center)
        direction = parse_param(args.direction)
        datum = find_boundary_parabolic(make_parameter(family, center),
                                        direction, args.period)
        nvec = direction / abs(direction)
        print("distance escape_time lifted_phase incoming_height transit_height")
        for dist in _targets(args.distances):
            ps = repelling_fatou_and_phase(datum.param.value + dist * nvec, datum)
            print(f"{dist:.1e} {ps.escape_time} {ps.lifted_phase:+.6f} "
                  f"{ps.incoming_height:+.6f} {ps.transit_height:+.6f}")
    elif args.command == "visibility":
        _print_json(visibility_record(parse_family(args.family),
                                      parse_param(args.param)))
    elif args.command == "scan-arc":
        _print_json(scan_record(parse_family(args.family),
                                parse_param(args.center),
                                parse_param(args.direction), args.period,
                                _targets(args.targets), args.window))
    elif args.command in ("render-param", "render-dyn"):
        _run_render(args)
    elif args.command == "figure":
        from .render import figure_command
        for path in figure_command(args.figure_id, args.outdir):
            print(path)
    elif args.command == "serve":
        from .service import serve
        serve(port=args.port, cache_dir=args.cache_dir,
              max_zoom=args.max_zoom)
    return 0


if __name__ == "__main__":
    sys.exit(main())
