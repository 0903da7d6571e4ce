"""Time the numba and numpy kernel backends on icospheres of growing size.

Usage: python3 benchmarks/bench_kernels.py [--levels 3 4 5] [--repeat 5]
"""
import argparse
import time

import numpy as np

from pgamesh import kernels, shapes
from pgamesh.slicer import SlicePlane


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def cases(backend, m):
    pos, faces = m.positions, m.faces
    carriers = backend.face_carriers(pos, faces)
    apex = np.array([0.1, -0.2, 0.05])
    weights, _ = backend.cone_terms(pos, faces, carriers, apex)
    plane = SlicePlane.from_coefficients(0.3, -0.2, 1.0, -0.1).p.coefficients
    tol = 1e-9 * float(np.abs(pos).max())
    return {
        "face_carriers": lambda: backend.face_carriers(pos, faces),
        "cone_terms": lambda: backend.cone_terms(pos, faces, carriers, apex),
        "clip_terms": lambda: backend.clip_terms(pos, faces, carriers, plane, apex, tol),
        "inertia_terms": lambda: backend.inertia_terms(pos, faces, weights, apex),
    }


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--levels", type=int, nargs="+", default=[3, 4, 5])
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()

    backends = {"numpy": kernels.load_backend("numpy")}
    try:
        backends["numba"] = kernels.load_backend("numba")
    except ImportError:
        print("numba not installed; timing numpy only")

    print(f"{'faces':>8} {'kernel':<14} " + " ".join(f"{b + ' ms':>10}" for b in backends) + "   speedup")
    for level in args.levels:
        m = shapes.icosphere(level)
        per_backend = {}
        for name, backend in backends.items():
            fns = cases(backend, m)
            for fn in fns.values():
                fn()  # compile (numba) and warm caches
            per_backend[name] = {k: best_of(fn, args.repeat) for k, fn in fns.items()}
        for kernel in per_backend["numpy"]:
            row = [per_backend[b][kernel] * 1e3 for b in backends]
            speed = f"{row[0] / row[1]:8.1f}x" if len(row) > 1 and row[1] > 0 else ""
            print(f"{m.n_faces:>8} {kernel:<14} " + " ".join(f"{t:10.3f}" for t in row) + "  " + speed)


if __name__ == "__main__":
    main()
