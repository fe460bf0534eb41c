#!/usr/bin/env python3
"""One-time desk-scale search for the committed defaults in src/bench.cpp.

gamma0 per superiorized method: best reconstruction error at the stopping
iterate, subject to reaching eps and landing below plain CG's stopping-time
TV. FISTA lambda: the strongest regularization that still stops. Past some
lambda the composite minimum's data term sits above eps and the f-test never
fires; bisect that boundary, then back off 8% so the run keeps stopping on
reseeded noise while f stays nearly flat after the stop.

The search runs on the default bench instance (128x128 head phantom,
120 angles x 184 rays, noise 0.05, seed 7), then validates the cross-method
orderings on seeds 7..11. Paste the printed snippet over the constants in
src/bench.cpp when the numbers change.
"""

import math
import sys

import numpy as np

try:
    import tvscg
except ImportError:
    sys.exit("tvscg module not importable; build first and run via tune_defaults.sh")

SIZE, ANGLES, RAYS, NOISE = 128, 120, 184, 0.05
SEEDS = [7, 8, 9, 10, 11]
SUPERIORIZED = ["s-cg-2", "s-cg", "s-cg-cd", "s-pcg-2", "s-pcg"]
GAMMA_GRID = [0.05, 0.1, 0.2, 0.5, 1.0, 2.0, 2.5, 3.0, 3.5, 4.0, 5.0, 10.0, 20.0, 50.0]
MAX_ITER = 200  # tuning cap; the desk instance stops in well under 50


def make_instance(seed):
    truth = tvscg.phantom(SIZE)
    clean = tvscg.project(truth, ANGLES, RAYS)
    noisy, sigma2 = tvscg.add_noise(clean, NOISE, seed)
    eps = ANGLES * RAYS * sigma2
    return truth, noisy, eps


def run(inst, method, **kw):
    truth, noisy, eps = inst
    r = tvscg.reconstruct(noisy, SIZE, SIZE, method=method, eps=eps,
                          max_iter=MAX_ITER, post_stop=0.25, truth=truth, **kw)
    s = int(r["stop_k"])
    row = s if s >= 0 else len(r["f"]) - 1
    # Judge the reconstruction the run hands back (for superiorized methods
    # the perturbed point that passed the test), as summary.csv does.
    x = np.asarray(r["x"])
    t = np.asarray(truth)
    return {
        "reached": bool(r["reached_epsilon"]),
        "iters": s if s >= 0 else MAX_ITER,
        "f": r["f"], "tv": float(tvscg.tv_norm(x)),
        "rel": float(np.linalg.norm(x - t) / np.linalg.norm(t)),
        "stop": row,
    }


def tune_gamma0(inst, cg_tv):
    picks = {}
    for m in SUPERIORIZED:
        best = None
        fallback = None
        print(f"  {m}:")
        for g in GAMMA_GRID:
            r = run(inst, m, gamma0=g)
            # 5% TV slack so the below-CG ordering survives reseeding.
            ok = r["reached"] and r["tv"] < 0.95 * cg_tv
            print(f"    gamma0={g:<6g} reached={int(r['reached'])} iters={r['iters']:<4d}"
                  f" tv={r['tv']:<9.2f} rel={r['rel']:.4f} {'ok' if ok else '--'}")
            if ok and (best is None or (r["rel"], r["tv"]) < (best[1]["rel"], best[1]["tv"])):
                best = (g, r)
            if r["reached"] and (fallback is None or r["tv"] < fallback[1]["tv"]):
                fallback = (g, r)
        if best is None:
            if fallback is None:
                sys.exit(f"no gamma0 in the grid lets {m} reach eps; widen the grid")
            print(f"    !! no grid gamma0 puts {m} below CG's stopping TV "
                  f"({fallback[1]['tv']:.2f} vs {cg_tv:.2f}); taking the lowest-TV run")
            best = fallback
        picks[m] = best[0]
    return picks


def tune_lambda(inst, tv_truth):
    c = tvscg.spectral_norm(ANGLES, RAYS, SIZE, SIZE)
    c2 = c * c
    print(f"  c^2 = {c2:.6g}, phantom TV = {tv_truth:.2f}")
    lo, hi = 1e-3 * c2, 1e-1 * c2
    if not run(inst, "fista", lam=lo)["reached"]:
        sys.exit("FISTA misses eps even at the weakest probe lambda; rescale the range")
    if run(inst, "fista", lam=hi)["reached"]:
        print("    !! reach boundary above the probe range; using its top")
        lam_max = hi
    else:
        for _ in range(8):
            mid = math.sqrt(lo * hi)
            r = run(inst, "fista", lam=mid)
            print(f"    lambda={mid:<12.6g} reached={int(r['reached'])} "
                  f"iters={r['iters']:<4d} tv={r['tv']:.2f}")
            lo, hi = (mid, hi) if r["reached"] else (lo, mid)
        lam_max = lo
    lam = round(0.92 * lam_max)
    r = run(inst, "fista", lam=lam)
    post = r["f"][r["stop"]:]
    dev = max(abs(v - post[0]) for v in post) / post[0] if r["reached"] else math.inf
    print(f"    pick lambda={lam:g} (0.92 x boundary {lam_max:.4g}): "
          f"reached={int(r['reached'])} iters={r['iters']} "
          f"window_dev={dev * 100:.2f}% tv/truth={r['tv'] / tv_truth:.3f}")
    if not r["reached"] or dev > 0.05:
        print("    !! backed-off lambda fails the stop-or-flatness check at the tuning seed")
    return float(lam)


def validate(picks, lam):
    tallies = {}

    def tally(name, ok):
        a, b = tallies.get(name, (0, 0))
        tallies[name] = (a + int(ok), b + 1)

    for seed in SEEDS:
        inst = make_instance(seed)
        cg = run(inst, "cg")
        fista = run(inst, "fista", lam=lam)
        sup = {m: run(inst, m, gamma0=picks[m]) for m in SUPERIORIZED}
        tally("rel_err: s-cg-cd < cg", sup["s-cg-cd"]["rel"] < cg["rel"])
        for m in SUPERIORIZED:
            tally(f"stop TV: {m} < cg", sup[m]["tv"] < cg["tv"])
        fewest = all(sup["s-pcg-2"]["iters"] < r["iters"]
                     for m, r in sup.items() if m != "s-pcg-2")
        tally("iterations: s-pcg-2 fewest superiorized", fewest)
        tally("iterations: s-pcg-2 < fista", sup["s-pcg-2"]["iters"] < fista["iters"])
        for m, r in sup.items():
            post = r["f"][r["stop"]:]
            tally(f"post-stop f decreasing: {m}",
                  len(post) < 2 or post[-1] < post[0])
        post = fista["f"][fista["stop"]:]
        flat = max(abs(v - post[0]) for v in post) <= 0.05 * post[0]
        tally("post-stop f within 5%: fista", flat)

    print("\nordering checks over seeds", SEEDS, "(majority needed):")
    bad = 0
    for name, (got, total) in tallies.items():
        ok = got * 2 > total
        bad += not ok
        print(f"  [{'pass' if ok else 'FAIL'}] {got}/{total}  {name}")
    return bad == 0


def main():
    inst = make_instance(SEEDS[0])
    truth = inst[0]

    print("baseline cg:")
    cg = run(inst, "cg")
    print(f"    iters={cg['iters']} tv={cg['tv']:.2f} rel={cg['rel']:.4f}")

    print("gamma0 grid:")
    picks = tune_gamma0(inst, cg["tv"])

    print("lambda grid:")
    lam = tune_lambda(inst, tvscg.tv_norm(truth))

    ok = validate(picks, lam)

    print("\npaste into src/bench.cpp:")
    print("double default_gamma0(const std::string& method) {")
    print("    // Desk-scale grid picks, regenerated by tools/tune_defaults.sh.")
    for m in ("s-cg", "s-cg-cd", "s-pcg"):
        print(f'    if (method == "{m}") return {picks[m]};')
    print(f'    if (k_suffix(method, "s-cg") > 0) return {picks["s-cg-2"]};')
    print(f'    if (k_suffix(method, "s-pcg") > 0) return {picks["s-pcg-2"]};')
    print(f'    return {picks["s-cg"]};')
    print("}")
    print()
    print(f"double default_lambda() {{ return {lam:.6g}; }}")
    sys.exit(0 if ok else 1)


if __name__ == "__main__":
    main()
