"""Reference computation of the error-path statistics for the analytics
fixture. Test-only; written from the definitions, shares nothing with the C++.
Prints JSON that the C++ test compares against."""
import json
import sys
from collections import defaultdict
from fractions import Fraction

data = json.load(open(sys.argv[1]))
games = {g["game"]: g for g in data["games"]}
live = {k: g for k, g in games.items() if g["strategy"] == "cot" and g["status"] in ("won", "lost")}

# last judgment per (game, verifier, round), by seq
last = {}
for j in data["judgments"]:
    if j["category"] == "unresolved" or j["game"] not in live:
        continue
    key = (j["game"], j["verifier"], j["round"])
    if key not in last or last[key]["seq"] <= j["seq"]:
        last[key] = j
seqs = defaultdict(list)
for (g, v, r), j in sorted(last.items()):
    seqs[(g, v)].append(j["category"])

paths = []
curve_den = defaultdict(int)
curve_still = defaultdict(int)
for (g, v), cats in sorted(seqs.items()):
    if "incorrect" not in cats:
        continue
    i = cats.index("incorrect")
    ncs = cats[i + 1] if i + 1 < len(cats) else "none"
    csbs = cats[-1]
    paths.append({"game": g, "verifier": v, "ncs": ncs, "csbs": csbs, "gs": live[g]["status"]})
    k = 1
    while i + k < len(cats):
        curve_den[k] += 1
        if cats[i + k] != "incorrect":
            break
        curve_still[k] += 1
        k += 1

flow = defaultdict(int)
for p in paths:
    flow[("FIC", "NCS:" + p["ncs"])] += 1
    flow[("NCS:" + p["ncs"], "CSBS:" + p["csbs"])] += 1
    flow[("CSBS:" + p["csbs"], "GS:" + p["gs"])] += 1

n = len(paths)
persistent_games = {p["game"] for p in paths if p["csbs"] != "correct"}
despite = [g for g in live if g in persistent_games]
fixed = [g for g in live if g not in persistent_games]
out = {
    "initial_verifier_errors": n,
    "persistence": [sum(p["csbs"] != "correct" for p in paths), n],
    "no_final_conclusion": [sum(p["ncs"] == "none" for p in paths), n],
    "next_turn_still_incorrect": [sum(p["ncs"] == "incorrect" for p in paths), n],
    "success_despite_persistent": [sum(live[g]["status"] == "won" for g in despite), len(despite)],
    "success_when_no_or_fixed": [sum(live[g]["status"] == "won" for g in fixed), len(fixed)],
    "flow": sorted([a, b, c] for (a, b), c in flow.items()),
    "curve": [[k, curve_still[k], curve_den[k]] for k in sorted(curve_den)],
    "paths": [[p["game"], p["verifier"], p["ncs"], p["csbs"], p["gs"]] for p in paths],
}
print(json.dumps(out, indent=1))
