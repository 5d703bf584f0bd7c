"""Compare every deterministic MI/MMSE value in the corpus with its Monte Carlo estimate."""

import argparse
import time

from infobound.mc import McConfig, run_concordance


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--samples", type=int, default=2_000_000)
    ap.add_argument("--seed", type=int, default=42)
    ap.add_argument("--batch", type=int, default=20)
    args = ap.parse_args()
    t0 = time.perf_counter()
    checks = run_concordance(McConfig(args.samples, args.seed, args.batch))
    print(f"{'setting':<28} {'qty':<5} {'deterministic':>14} {'monte carlo':>14} {'stderr':>10} {'z':>6}")
    for c in checks:
        flag = "" if c.passed else "  <-- outside 3 SE"
        print(f"{c.name:<28} {c.quantity:<5} {c.deterministic:>14.8f} {c.estimate:>14.8f} "
              f"{c.stderr:>10.2e} {c.z:>6.2f}{flag}")
    n_pass = sum(c.passed for c in checks)
    print(f"\n{n_pass}/{len(checks)} within 3 batch standard errors ({time.perf_counter() - t0:.1f} s)")


if __name__ == "__main__":
    main()
