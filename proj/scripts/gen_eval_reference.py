#!/usr/bin/env python3
"""Generates tests/fixtures/eval_reference.json.

Randomized retrieval-evaluation cases with metric values computed by this
script's own straightforward implementations (kept deliberately independent
of the C++ code: plain loops over doc lists, no shared helpers).

Each case is a miniature evaluation: up to 5 queries, up to 20 judged or
retrieved documents per query. Every query has at least one judged-relevant
document. Expected values cover per-query metrics, the 11-point interpolated
precision-recall curve and the aggregate report.

Output is committed as a frozen fixture; rerun only to regenerate it
deliberately (the RNG seed is fixed, so output is reproducible).
"""

import json
import math
import random
from pathlib import Path

SEED = 74123
N_CASES = 50
GM_EPSILON = 1e-5
RECALL_TOLERANCE = 1e-12


def precision_at(ranked, rel, k):
    hits = 0
    for doc in ranked[:k]:
        if doc in rel:
            hits += 1
    return hits / k


def average_precision(ranked, rel):
    hits = 0
    total = 0.0
    for i, doc in enumerate(ranked, start=1):
        if doc in rel:
            hits += 1
            total += hits / i
    return total / len(rel)


def bpref(ranked, rel, nonrel):
    big_r = len(rel)
    big_n = len(nonrel)
    if big_n == 0:
        found = sum(1.0 for doc in ranked if doc in rel)
        return found / big_r
    denom = min(big_r, big_n)
    nonrel_above = 0
    total = 0.0
    for doc in ranked:
        if doc in rel:
            total += 1.0 - min(nonrel_above, denom) / denom
        elif doc in nonrel:
            nonrel_above += 1
    return total / big_r


def f_measure(ranked, rel):
    if not ranked:
        return 0.0
    rel_ret = sum(1 for doc in ranked if doc in rel)
    p = rel_ret / len(ranked)
    r = rel_ret / len(rel)
    if p + r == 0.0:
        return 0.0
    return 2.0 * p * r / (p + r)


def interpolated_pr(ranked, rel):
    big_r = len(rel)
    points = []  # (recall, precision) after each rank
    hits = 0
    for i, doc in enumerate(ranked, start=1):
        if doc in rel:
            hits += 1
        points.append((hits / big_r, hits / i))
    curve = []
    for level in range(11):
        rho = level / 10.0
        best = 0.0
        for recall, precision in points:
            if recall >= rho - RECALL_TOLERANCE and precision > best:
                best = precision
        curve.append(best)
    return curve


def make_query(rng, qi):
    n_universe = rng.randint(3, 20)
    universe = [f"q{qi}d{j:02d}" for j in range(n_universe)]
    n_rel = rng.randint(1, max(1, n_universe // 2))
    rel = set(rng.sample(universe, n_rel))
    rest = [d for d in universe if d not in rel]
    n_nonrel = rng.randint(0, len(rest))
    nonrel = set(rng.sample(rest, n_nonrel))
    # retrieved: a shuffled subset of the universe plus a few unjudged strays
    pool = universe + [f"q{qi}x{j}" for j in range(rng.randint(0, 4))]
    n_ret = rng.randint(1, len(pool))
    ranked = rng.sample(pool, n_ret)
    return ranked, rel, nonrel


def evaluate_query(ranked, rel, nonrel):
    return {
        "ap": average_precision(ranked, rel),
        "p5": precision_at(ranked, rel, 5),
        "p10": precision_at(ranked, rel, 10),
        "p20": precision_at(ranked, rel, 20),
        "p30": precision_at(ranked, rel, 30),
        "bpref": bpref(ranked, rel, nonrel),
        "f1": f_measure(ranked, rel),
        "rel_ret": sum(1 for doc in ranked if doc in rel),
        "n_relevant": len(rel),
        "retrieved": len(ranked),
        "pr": interpolated_pr(ranked, rel),
    }


def aggregate(per_query):
    n = len(per_query)
    aps = [m["ap"] for m in per_query.values()]
    mean_pr = [
        sum(m["pr"][i] for m in per_query.values()) / n for i in range(11)
    ]
    return {
        "map": sum(aps) / n,
        "gm_map": math.exp(
            sum(math.log(max(ap, GM_EPSILON)) for ap in aps) / n
        ),
        "mean_p5": sum(m["p5"] for m in per_query.values()) / n,
        "mean_p10": sum(m["p10"] for m in per_query.values()) / n,
        "mean_p20": sum(m["p20"] for m in per_query.values()) / n,
        "mean_p30": sum(m["p30"] for m in per_query.values()) / n,
        "mean_bpref": sum(m["bpref"] for m in per_query.values()) / n,
        "mean_f1": sum(m["f1"] for m in per_query.values()) / n,
        "total_rel_ret": sum(m["rel_ret"] for m in per_query.values()),
        "total_relevant": sum(m["n_relevant"] for m in per_query.values()),
        "total_retrieved": sum(m["retrieved"] for m in per_query.values()),
        "mean_pr": mean_pr,
        "n_queries": n,
    }


def main():
    rng = random.Random(SEED)
    cases = []
    for ci in range(N_CASES):
        n_queries = rng.randint(1, 5)
        queries = []
        per_query = {}
        for qi in range(n_queries):
            qid = f"c{ci:02d}q{qi}"
            ranked, rel, nonrel = make_query(rng, qi)
            queries.append(
                {
                    "query_id": qid,
                    "ranked": ranked,
                    "relevant": sorted(rel),
                    "nonrelevant": sorted(nonrel),
                }
            )
            per_query[qid] = evaluate_query(ranked, rel, nonrel)
        cases.append(
            {
                "name": f"case{ci:02d}",
                "queries": queries,
                "expected_per_query": per_query,
                "expected_aggregate": aggregate(per_query),
            }
        )

    out_path = Path(__file__).resolve().parent.parent / "tests" / "fixtures" / "eval_reference.json"
    out_path.parent.mkdir(parents=True, exist_ok=True)
    with open(out_path, "w") as fh:
        json.dump({"seed": SEED, "cases": cases}, fh, indent=1, sort_keys=False)
        fh.write("\n")
    print(f"wrote {out_path} ({len(cases)} cases)")


if __name__ == "__main__":
    main()
