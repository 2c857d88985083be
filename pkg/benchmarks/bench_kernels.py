"""Compare the compiled and pure-Python kernel backends.

    python3 benchmarks/bench_kernels.py [--cells 2000] [--repeat 3]
"""
import argparse
import time

import numpy as np

from spinmca import kernels
from spinmca.memristor import MemristorParams, WriteController, level_spacing, target_conductance
from spinmca.spintronic import DWParams


def _best(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def cases(n_cells, n_im):
    p, c, d = MemristorParams(), WriteController(), DWParams()
    rng = np.random.default_rng(0)
    vt = (p.k_on, p.k_off, p.v_on, p.v_off, p.alpha_on, p.alpha_off)
    targets = np.array([target_conductance(int(m), p) for m in rng.integers(0, 32, n_cells)])
    starts = np.full(n_cells, p.w_off)
    prog = (p.w_on, p.w_off, p.r_on, p.r_off, *vt, c.pulse_voltage, c.pulse_width,
            c.verify_voltage, c.tolerance * level_spacing(p), c.max_pulses, c.max_step)
    ip, im = rng.uniform(0, 30e-6, (2, n_im))
    im_args = (1.0, 1.0, d.i_center, d.mobility, 2e-9, d.length, d.v_bias, d.r_low, d.r_high)
    return {
        f"program_cells x{n_cells}": lambda mod: mod.program_cells(starts, targets, *prog),
        "vteam_integrate 100 ns": lambda mod: mod.vteam_integrate(p.w_on, 0.9, 100e-9, 1e-9, p.w_on, p.w_off, *vt),
        f"im_evaluate x{n_im}": lambda mod: mod.im_evaluate(ip, im, *im_args),
    }


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--cells", type=int, default=2000)
    ap.add_argument("--im", type=int, default=100_000)
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args(argv)
    backends = kernels.backends()
    print(f"active backend: {kernels.BACKEND}; available: {', '.join(sorted(backends))}")
    names = sorted(backends)
    print(f"{'kernel':28s}" + "".join(f"{n:>12s}" for n in names) + ("     speedup" if len(names) > 1 else ""))
    for label, fn in cases(args.cells, args.im).items():
        t = {n: _best(lambda: fn(backends[n]), args.repeat) for n in names}
        line = f"{label:28s}" + "".join(f"{t[n] * 1e3:10.2f}ms" for n in names)
        if "cython" in t and "python" in t:
            line += f"  {t['python'] / t['cython']:9.1f}x"
        print(line)


if __name__ == "__main__":
    main()
