"""Brute-force check of a setup batch: uniqueness and necessity over all 125 codes.

Usage: setup_oracle.py CATALOG.json BATCH.jsonl [BATCH.jsonl ...]
Prints one JSON summary line. Shares no code with the C++ generator.
"""
import json
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent))
from rule_oracle import ext  # noqa: E402

SLOTS = {"easy": 4, "medium": 5, "hard": 6}


def check(setup, by_id):
    cards = setup["cards"]
    sec = setup["secret"]
    if len(cards) != SLOTS[setup["difficulty"]] or len(set(cards)) != len(cards):
        return "card count"
    perm = sec["permutation"]
    if sorted(perm) != list(range(1, len(cards) + 1)):
        return "permutation"
    if setup["mode"] == "classic" and perm != sorted(perm):
        return "classic permutation"
    exts = [ext(by_id[c]["criteria"][a]["rule"]) for c, a in zip(cards, sec["active"])]
    inter = frozenset.intersection(*exts)
    code = tuple(int(d) for d in sec["code"])
    if inter != {code}:
        return "uniqueness"
    for i in range(len(exts)):
        rest = frozenset.intersection(*[e for j, e in enumerate(exts) if j != i])
        if len(rest) < 2:
            return "necessity"
    return None


def main():
    catalog = json.loads(Path(sys.argv[1]).read_text())
    by_id = {c["id"]: c for c in catalog["cards"]}
    out = {"checked": 0, "unique": 0, "necessary": 0, "failures": []}
    for path in sys.argv[2:]:
        for line in Path(path).read_text().splitlines():
            if not line.strip():
                continue
            s = json.loads(line)
            out["checked"] += 1
            why = check(s, by_id)
            if why is None:
                out["unique"] += 1
                out["necessary"] += 1
            else:
                if why != "uniqueness":
                    out["unique"] += 1
                out["failures"].append([s["id"], why])
    print(json.dumps(out))


if __name__ == "__main__":
    main()
