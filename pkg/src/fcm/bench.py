"""Assembly timing, optionally comparing the jit and numpy kernel paths.

The kernel path is fixed at import time by the FCM_NUMBA environment
variable, so the comparison runs each path in a fresh subprocess."""

import argparse
import json
import os
import subprocess
import sys
import time

from . import harness, kernels
from .assembly import assemble_system


def run_bench(h=0.05, repeat=3, shift=0.37, log=None):
    """Median assembly wall time on the reference disc case."""
    cfg = harness.ExperimentConfig()
    domain = harness.disc_domain(cfg)
    data = harness.manufactured_problem()
    params = cfg.params()
    grid, mesh, space, layer = harness.build_case(domain, h, shift, cfg.p)
    assemble_system(space, domain, layer, params, data, cuts=mesh)  # warm jit
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        assemble_system(space, domain, layer, params, data, cuts=mesh)
        times.append(time.perf_counter() - t0)
    result = {
        "path": "numba" if kernels.USING_NUMBA else "numpy",
        "h": h,
        "dofs": space.n_dofs,
        "elements": len(space.active_elements),
        "repeat": repeat,
        "times": times,
        "best_s": min(times),
        "median_s": sorted(times)[len(times) // 2],
    }
    if log:
        log(f"assembly [{result['path']}] h={h:g} dofs={result['dofs']}: "
            f"best {result['best_s']*1e3:.1f} ms, "
            f"median {result['median_s']*1e3:.1f} ms over {repeat} runs")
    return result


def _bench_subprocess(use_numba, h, repeat):
    env = dict(os.environ, FCM_NUMBA="1" if use_numba else "0")
    out = subprocess.run(
        [sys.executable, "-m", "fcm.bench", "--h", str(h),
         "--repeat", str(repeat), "--json"],
        env=env, capture_output=True, text=True, check=True)
    return json.loads(out.stdout.strip().splitlines()[-1])


def compare_paths(h=0.05, repeat=3, log=print):
    """Time both kernel paths in subprocesses and report the speedup."""
    results = {}
    for use_numba in (False, True):
        try:
            res = _bench_subprocess(use_numba, h, repeat)
        except subprocess.CalledProcessError as err:
            log(f"path {'numba' if use_numba else 'numpy'} failed: "
                f"{err.stderr.strip().splitlines()[-1]}")
            continue
        results[res["path"]] = res
        log(f"  {res['path']:>6}: best {res['best_s']*1e3:.1f} ms, "
            f"median {res['median_s']*1e3:.1f} ms (dofs={res['dofs']})")
    if "numba" in results and "numpy" in results:
        speedup = results["numpy"]["best_s"] / results["numba"]["best_s"]
        log(f"  speedup (numpy/numba best): {speedup:.2f}x")
    return results


def main(argv=None):
    ap = argparse.ArgumentParser(description="assembly benchmark")
    ap.add_argument("--h", type=float, default=0.05)
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--json", action="store_true")
    args = ap.parse_args(argv)
    result = run_bench(h=args.h, repeat=args.repeat,
                       log=None if args.json else print)
    if args.json:
        print(json.dumps(result))
    return 0


if __name__ == "__main__":
    sys.exit(main())
