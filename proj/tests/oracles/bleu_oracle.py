"""multi-bleu style corpus BLEU over space-separated characters."""
import math
import pathlib
import sys
from collections import Counter


def tokens(line):
    return " ".join(line.strip()).split()


def bleu(hyps, refs):
    correct = [0] * 4
    total = [0] * 4
    hyp_len = ref_len = 0
    for h, r in zip(hyps, refs):
        h, r = tokens(h), tokens(r)
        hyp_len += len(h)
        ref_len += len(r)
        for n in range(1, 5):
            hc = Counter(tuple(h[i:i + n]) for i in range(len(h) - n + 1))
            rc = Counter(tuple(r[i:i + n]) for i in range(len(r) - n + 1))
            for g, c in hc.items():
                total[n - 1] += c
                correct[n - 1] += min(c, rc.get(g, 0))
    prec = [c / t if t else 0.0 for c, t in zip(correct, total)]
    bp = math.exp(1 - ref_len / hyp_len) if hyp_len < ref_len else 1.0
    if min(prec) == 0:
        return 0.0, prec, bp
    return 100 * bp * math.exp(sum(math.log(p) for p in prec) / 4), prec, bp


if __name__ == "__main__":
    data = pathlib.Path(sys.argv[1])
    hyps = (data / "bleu_hyp.txt").read_text(encoding="utf-8").splitlines()
    refs = (data / "bleu_ref.txt").read_text(encoding="utf-8").splitlines()
    score, prec, bp = bleu(hyps, refs)
    print(f"{score:.10f}")
    print(" ".join(f"{p:.10f}" for p in prec), f"{bp:.10f}", file=sys.stderr)
