"""Builds tests/data/tones.tsv covering every character of the fixture corpora.

Tone class comes from the Mandarin reading (tones 1-2 level, 3-4 and neutral
oblique); the rhyme group is the index of the syllable final.
"""
import pathlib

from pypinyin import Style, pinyin

DATA = pathlib.Path(__file__).resolve().parent.parent / "data"
SOURCES = ["wujue20.txt", "styled.txt", "qijue4.txt"]


def corpus_chars():
    chars = set()
    for name in SOURCES:
        for line in (DATA / name).read_text(encoding="utf-8").splitlines():
            if not line or line.startswith("#"):
                continue
            poem = line.split("\t")[0]
            chars.update(c for c in poem if c != "|")
    return sorted(chars)


def main():
    chars = corpus_chars()
    finals = {}
    rows = []
    for c in chars:
        tone3 = pinyin(c, style=Style.TONE3)[0][0]
        final = pinyin(c, style=Style.FINALS)[0][0] or tone3.rstrip("12345")
        tone = tone3[-1] if tone3[-1].isdigit() else "5"
        cls = "P" if tone in "12" else "Z"
        group = finals.setdefault(final, len(finals))
        rows.append(f"{c}\t{cls}\t{group}")
    header = "# character<TAB>tone (P level, Z oblique)<TAB>rhyme group\n"
    (DATA / "tones.tsv").write_text(header + "\n".join(rows) + "\n", encoding="utf-8")
    print(f"{len(rows)} characters, {len(finals)} rhyme groups")


if __name__ == "__main__":
    main()
