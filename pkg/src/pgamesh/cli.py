"""Command-line interface: ``pgamesh {measure,slice,inertia,validate} <mesh> [options]``.

Exit codes: 0 success, 1 usage, 2 unreadable or malformed input, 3 numeric failure.
"""
from __future__ import annotations

import argparse
import os
import sys
import time
import warnings

import numpy as np

from . import algebra as ga
from . import io as mio
from . import kernels
from .errors import MalformedMeshError, ParseError, PGAError
from .inertia import align_to_eigenframe, jacobi_diagonalize, mesh_inertia
from .mesh import center_of_mass, gap_magnitude, mesh_area, mesh_volume, sum_face_carriers, validate
from .slicer import SlicePlane, clip_below, fill_curve, sliced_com, sliced_volume

SCHEMA = "pgamesh.result/1"
EXIT_OK, EXIT_USAGE, EXIT_PARSE, EXIT_NUMERIC = 0, 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def _plane(text):
    try:
        vals = [float(t) for t in text.split(",")]
    except ValueError:
        raise argparse.ArgumentTypeError(f"plane must be a,b,c,d; got {text!r}") from None
    if len(vals) != 4 or not all(np.isfinite(vals)):
        raise argparse.ArgumentTypeError(f"plane must be four finite numbers a,b,c,d; got {text!r}")
    return vals


def _positive_int(text):
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError("must be a positive integer")
    return v


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("mesh", help="OBJ or STL file")
    common.add_argument("--json", action="store_true", help="emit a JSON record on stdout")
    common.add_argument("--epsilon", type=float, default=1e-9,
                        help="relative geometric tolerance (default 1e-9)")
    common.add_argument("--weld", type=float, default=0.0,
                        help="STL weld grid spacing; 0 merges exactly equal vertices only")
    common.add_argument("--deterministic", action="store_true",
                        help="omit timings and default to one thread")
    common.add_argument("--threads", type=_positive_int, default=None, help="worker threads")

    p = _Parser(prog="pgamesh", description="Mesh integrals with plane-based geometric algebra.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)
    sub.add_parser("measure", parents=[common], help="area, volume, centroid, closedness")
    s = sub.add_parser("slice", parents=[common], help="volume and centroid below a plane")
    s.add_argument("--plane", type=_plane, required=True,
                   help="a,b,c,d for ax+by+cz+d=0; keeps the side where it is <= 0")
    s.add_argument("--fill-levels", type=_positive_int, default=None,
                   help="tabulate N planes parallel to the given one across the mesh")
    s.add_argument("--no-complement", action="store_true",
                   help="always integrate the requested side directly")
    i = sub.add_parser("inertia", parents=[common], help="inertia frame and principal axes")
    i.add_argument("--about-com", action="store_true", help="about the centre of mass instead of the origin")
    i.add_argument("--align-out", default=None, help="write the mesh rotated into its principal frame (OBJ)")
    i.add_argument("--raw", action="store_true", help="unit-density tensor instead of per unit mass")
    sub.add_parser("validate", parents=[common], help="closedness and orientation report")
    return p


def _vec(v):
    return None if v is None else [float(x) for x in v]


def cmd_measure(mf, args):
    m = mf.mesh
    f_sum = sum_face_carriers(m).f_sum
    com = center_of_mass(m, tol=args.epsilon)
    return {
        "area": mesh_area(m),
        "volume": mesh_volume(m, signed=True, tol=args.epsilon),
        "volume_unsigned": mesh_volume(m, signed=False, tol=args.epsilon),
        "centroid": _vec(com.position),
        "closedness_defect": ga.euclidean_norm(f_sum),
        "gap_magnitude": gap_magnitude(m),
    }


def cmd_slice(mf, args):
    m = mf.mesh
    plane = SlicePlane.from_coefficients(*args.plane)
    complement = not args.no_complement
    if args.fill_levels:
        a, b, c, _ = args.plane
        table = fill_curve(m, (a, b, c), args.fill_levels, eps=args.epsilon, use_complement=complement)
        return {"axis": [a, b, c],
                "fill": [{"level": r.level, "volume": r.volume, "centroid": _vec(r.centroid)} for r in table]}
    r = clip_below(m, plane, eps=args.epsilon, use_complement=complement)
    return {
        "plane": list(args.plane),
        "volume": sliced_volume(r, plane),
        "centroid": _vec(sliced_com(r).position),
        "triangles_below": r.triangles_below,
        "triangles_split": r.triangles_split,
        "used_complement": r.used_complement,
    }


def cmd_inertia(mf, args):
    m = mf.mesh
    about = center_of_mass(m, tol=args.epsilon).position if args.about_com else np.zeros(3)
    if about is None:
        raise PGAError("zero volume: centre of mass undefined")
    frame = mesh_inertia(m, about=about, per_unit_mass=not args.raw, tol=args.epsilon)
    e = jacobi_diagonalize(frame)
    out = {
        "about": _vec(about),
        "per_unit_mass": not args.raw,
        "frame": [_vec(col) for col in frame.matrix().T],
        "moments": list(e.moments),
        "eigenvectors": [_vec(v) for v in e.eigenvectors()],
        "rotor": dict(zip(("1", "e01", "e02", "e03", "e12", "e31", "e23", "e0123"),
                          e.rotor_even_coefficients())),
        "sweeps": e.sweeps,
    }
    if args.align_out:
        aligned = align_to_eigenframe(m, e, about=about if args.about_com else None)
        with open(args.align_out, "w", encoding="utf-8") as fh:
            mio.write_obj(aligned, fh)
        out["aligned_mesh"] = args.align_out
    return out


def cmd_validate(mf, args):
    return validate(mf.mesh, tol=args.epsilon).as_dict()


COMMANDS = {"measure": cmd_measure, "slice": cmd_slice, "inertia": cmd_inertia, "validate": cmd_validate}


def _format_text(record):
    lines = [f"{record['command']}: {record['input']['path']} "
             f"({record['input']['n_vertices']} vertices, {record['input']['n_faces']} faces)"]
    skip = {"schema", "command", "input", "config", "timings", "diagnostics", "warnings"}
    for key, value in record.items():
        if key in skip:
            continue
        if key == "fill":
            lines.append("level volume centroid")
            for row in value:
                lines.append(f"  {row['level']:.6g} {row['volume']:.10g} {row['centroid']}")
        else:
            lines.append(f"{key}: {value}")
    return "\n".join(lines)


def run(args, stdout, stderr):
    threads = args.threads or (1 if args.deterministic else None)
    if threads:
        kernels.set_threads(threads)
    t0 = time.perf_counter()
    mf = mio.load_mesh(args.mesh, weld_epsilon=args.weld)
    t1 = time.perf_counter()
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        quantities = COMMANDS[args.command](mf, args)
    t2 = time.perf_counter()
    notes = sorted({str(w.message) for w in caught})
    for n in mf.diagnostics + notes:
        print(f"warning: {n}", file=stderr)
    config = {"epsilon": args.epsilon, "weld": args.weld, "threads": threads,
              "deterministic": args.deterministic, "backend": kernels.backend_name()}
    for key in ("plane", "fill_levels", "no_complement", "about_com", "align_out", "raw"):
        if hasattr(args, key):
            config[key] = getattr(args, key)
    record = {
        "schema": SCHEMA,
        "command": args.command,
        "input": {"path": os.path.basename(args.mesh), "format": mf.format, "sha256": mf.digest,
                  "n_vertices": mf.mesh.n_vertices, "n_faces": mf.mesh.n_faces},
        "config": config,
        "diagnostics": list(mf.diagnostics),
        "warnings": notes,
    }
    record.update(quantities)
    if not args.deterministic:
        record["timings"] = {"parse_s": t1 - t0, "compute_s": t2 - t1}
    text = mio.dumps(record) if args.json else _format_text(mio.to_jsonable(record))
    print(text, file=stdout)
    return EXIT_OK


def main(argv=None, stdout=None, stderr=None):
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    try:
        args = build_parser().parse_args(argv)
    except UsageError as exc:
        print(str(exc), file=stderr)
        return EXIT_USAGE
    except SystemExit as exc:  # --help
        return EXIT_OK if not exc.code else EXIT_USAGE
    try:
        return run(args, stdout, stderr)
    except (ParseError, MalformedMeshError, OSError) as exc:
        print(f"error: {exc}", file=stderr)
        return EXIT_PARSE
    except (PGAError, ValueError, ArithmeticError) as exc:
        print(f"error: {exc}", file=stderr)
        if getattr(exc, "partial", None) is not None:
            print(f"partial result: moments {list(exc.partial.moments)}", file=stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
