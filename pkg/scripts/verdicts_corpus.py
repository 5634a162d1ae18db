"""Compare the step-wise rank verdicts with the obstruction verdicts on a
random corpus and print a tally."""

import argparse
import time
from collections import Counter

from jetvessiot.corpus import random_corpus, RandomSystemConfig
from jetvessiot.connection import step_verdicts
from jetvessiot.involution import monster


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--count", type=int, default=300)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--max-n", type=int, default=3)
    ap.add_argument("--max-m", type=int, default=3)
    args = ap.parse_args()
    cfg = RandomSystemConfig(max_n=args.max_n, max_m=args.max_m)
    t0 = time.time()
    tally = Counter()
    bad = []
    for s in random_corpus(args.count, args.seed, cfg):
        rep = monster(s)
        if not rep.applicable:
            tally["skipped"] += 1
            continue
        got = step_verdicts(s)
        want = (rep.symbol_involutive, rep.equation_involutive)
        tally[want] += 1
        if got != want:
            bad.append((s, got, want))
    for k, v in sorted(tally.items(), key=str):
        print("%-16s %d" % (k, v))
    print("counterexamples: %d  (%.1fs)" % (len(bad), time.time() - t0))
    for s, got, want in bad:
        print("  %r: steps %s, obstructions %s" % (s, got, want))


if __name__ == "__main__":
    main()
