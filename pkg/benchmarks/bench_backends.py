"""Time the compiled and pure-numpy assignment kernels on the same input.

    python benchmarks/bench_backends.py [--height 321 --width 481 --k 200 --repeat 3]

Also checks that both backends return the same label map.
"""

import argparse
import statistics
import time

import numpy as np

from scalp.clustering import available_backends, decompose
from scalp.core import ScalpParams
from scalp.render import fallback_prior


def synthetic_image(h, w, seed=0):
    rng = np.random.default_rng(seed)
    cells = rng.integers(0, 256, (12, 16, 3))
    img = np.repeat(np.repeat(cells, -(-h // 12), axis=0), -(-w // 16), axis=1)[:h, :w]
    img = img + rng.normal(0, 6, img.shape)
    return np.clip(np.round(img), 0, 255).astype(np.uint8)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--height", type=int, default=321)
    ap.add_argument("--width", type=int, default=481)
    ap.add_argument("--k", type=int, default=200)
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--workers", type=int, default=1)
    args = ap.parse_args()

    rgb = synthetic_image(args.height, args.width)
    contour = fallback_prior(rgb)
    params = ScalpParams(k=args.k)
    results = {}
    print(f"image {args.height}x{args.width}, k={args.k}, workers={args.workers}")
    for backend in available_backends():
        decompose(rgb[:32, :32], contour[:32, :32], ScalpParams(k=4), backend=backend)
        times = []
        for _ in range(args.repeat):
            t0 = time.perf_counter()
            labels, _ = decompose(rgb, contour, params, workers=args.workers, backend=backend)
            times.append(time.perf_counter() - t0)
        results[backend] = labels.labels
        print(f"{backend:8s} median {statistics.median(times):.3f}s  min {min(times):.3f}s")
    maps = list(results.values())
    same = all(np.array_equal(maps[0], m) for m in maps[1:])
    print("label maps identical" if same else "label maps DIFFER")
    return 0 if same else 1


if __name__ == "__main__":
    raise SystemExit(main())
