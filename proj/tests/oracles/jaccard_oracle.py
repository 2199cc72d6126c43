"""Mean per-line Jaccard of index sets, empty vs empty counted as 1."""
import pathlib
import sys
from fractions import Fraction


def parse(cell):
    return {int(x) for x in cell.split(",") if x}


def main():
    rows = []
    for line in pathlib.Path(sys.argv[1]).read_text(encoding="utf-8").splitlines():
        if line.startswith("#"):
            continue
        a, b = line.split("\t")
        rows.append((parse(a), parse(b)))
    total = Fraction(0)
    for a, b in rows:
        total += Fraction(1) if not a and not b else Fraction(len(a & b), len(a | b))
    mean = total / len(rows)
    print(f"{len(rows)} lines, mean = {mean} = {float(mean):.15f}")


if __name__ == "__main__":
    main()
