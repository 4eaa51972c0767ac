#!/usr/bin/env python3
"""Generates the end-to-end test fixtures under tests/fixtures/:

  topics.tsv       5 topics
  snapshot.jsonl   3 engines x 20 results per topic, synthetic article text
  collection.jsonl 50 target documents (10 per topic)
  qrels.txt        relevance judgments (6 relevant + 2 judged nonrelevant
                   per topic; 2 documents per topic stay unjudged)

The corpus is engineered so that query expansion measurably helps retrieval:

  * per topic, 4 relevant documents contain the topic title words plus topic
    vocabulary ("direct" docs, baseline-reachable),
  * 2 relevant documents contain topic vocabulary but none of the title words
    ("vocabulary-only" docs — only an expanded query can reach them),
  * 2 judged-nonrelevant documents contain exactly one title word buried in
    another topic's vocabulary (baseline distractors),
  * 2 unjudged documents are boilerplate noise.

Topic word pools are disjoint from the SMART stoplist, and no pool word
shares a Porter stem with any topic title word, so title-word occurrences in
the collection are exactly the ones placed deliberately.

Snapshot sizes also guarantee enough distinct terms per engine subset for
the selection stage across the whole sweep grid (asserted below).

Deterministic: fixed RNG seed; rerun only to regenerate deliberately.
"""

import json
import random
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent))
from gen_porter_pairs import stem  # noqa: E402

ROOT = Path(__file__).resolve().parent.parent
OUT = ROOT / "tests" / "fixtures"
SEED = 47112
ENGINES = ["bing", "duckduckgo", "google"]
FETCHED_AT = "2026-08-17T12:00:00Z"
CREATED_AT = "2026-08-17T12:05:00Z"

TOPICS = [
    ("T01", "life water space"),
    ("T02", "wind turbine energy"),
    ("T03", "methods of organic farming"),
    ("T04", "coral reef restoration"),
    ("T05", "electric vehicle battery"),
]

# Title words as queries see them (stopwords removed, unstemmed).
TITLE_TERMS = {
    "T01": ["life", "water", "space"],
    "T02": ["wind", "turbine", "energy"],
    "T03": ["methods", "organic", "farming"],
    "T04": ["coral", "reef", "restoration"],
    "T05": ["electric", "vehicle", "battery"],
}

CORE = {
    "T01": """planet mars europa ocean ice liquid microbial creatures habitable
        exoplanet telescope mission rover evidence molecules oxygen hydrogen
        atmosphere surface subsurface geyser plume moon jupiter saturn
        enceladus titan methane carbon minerals salts lake drilling probe
        orbit biosignature spectrometer radiation crust vents hydrothermal
        microbes bacteria extremophile habitability samples detection""",
    "T02": """blade blades rotor generator offshore onshore grid watts
        power megawatt capacity gearbox nacelle tower foundation kinetic
        renewable installation maintenance yaw pitch airflow velocity output
        efficiency storage inverter transmission converter propeller hub
        shaft voltage alternator anemometer gusts breeze coastal altitude
        windward lattice composite fiberglass aerodynamics gantry pylons""",
    "T03": """farmers soil compost crop crops rotation fertilizer pesticide
        pesticides yield harvest livestock manure mulch weeds tillage seeds
        certification nitrogen legumes orchard greenhouse irrigation
        pollinators biodiversity agriculture agroecology sustainable
        vegetables grains pasture cattle poultry dairy erosion nutrients
        microbiome worms aphids clover barley lentils beans hives beetles silage""",
    "T04": """bleaching polyps symbiotic algae zooxanthellae nursery fragments
        transplant larvae spawning calcium carbonate acidification
        temperature marine fish divers substrate outplanting colonies
        genotypes resilience heatwave mortality recovery sanctuary caribbean
        pacific atoll lagoon snorkel conservation ecosystem survey seagrass
        turtles sponges plankton tides currents salinity buoys moorings
        epoxy hatchery juveniles predators urchins starfish""",
    "T05": """lithium cathode anode electrolyte charging charger cells pack
        degradation recycling cobalt nickel graphite thermal management motor
        regenerative braking plug hybrid sedan chassis ampere station
        infrastructure mileage warranty automaker commuter highway garage
        dashboard odometer torque horsepower acceleration alloy modules
        coolant firmware diagnostics sensors adapters
        connectors sockets relays fuses""",
}

NOISE = """website article report news research study science data analysis
    review guide blog author editor publisher comments share click subscribe
    newsletter privacy policy copyright contact trending popular featured
    headline archive category homepage sitemap""".split()

FILLER = """weather traffic recipes celebrity horoscope lottery sports cinema
    fashion gossip travel hotels""".split()


def load_stoplist():
    words = set()
    for line in (ROOT / "data" / "smart_stopwords.txt").read_text().splitlines():
        line = line.strip()
        if line and not line.startswith("#"):
            words.add(line)
    return words


def check_pools():
    stops = load_stoplist()
    title_stems = {stem(w) for terms in TITLE_TERMS.values() for w in terms}
    for name, pool in list(CORE.items()) + [("noise", " ".join(NOISE)), ("filler", " ".join(FILLER))]:
        for w in pool.split():
            assert w not in stops, f"{name}: '{w}' is a stopword"
            assert len(w) >= 2, f"{name}: '{w}' too short"
            assert w.isalpha() and w.islower(), f"{name}: '{w}' not plain lowercase"
            assert stem(w) not in title_stems, f"{name}: '{w}' stems onto a title word"
    all_core = [w for pool in CORE.values() for w in pool.split()]
    assert len(all_core) == len(set(all_core)), "core pools overlap"


def window(pool, start, size):
    return [pool[(start + i) % len(pool)] for i in range(size)]


def sentenceify(words):
    # punctuation is cosmetic; the analyzer strips it
    out = []
    for i, w in enumerate(words):
        out.append(w)
        if i % 11 == 10:
            out[-1] += "."
    return " ".join(out)


def make_snapshot_doc(rng, topic_id, engine_idx, rank):
    """One synthetic article: title words repeated, a rotating window over the
    topic pool (coverage guarantee), random extras, light noise."""
    titles = TITLE_TERMS[topic_id]
    core = CORE[topic_id].split()
    words = []
    for t in titles:
        words += [t] * rng.randint(2, 4)
    start = (engine_idx * 20 + (rank - 1)) * 3
    words += window(core, start, 18)
    words += rng.choices(core, k=rng.randint(8, 16))
    words += rng.choices(NOISE, k=rng.randint(4, 8))
    if rank > 10:
        words += rng.choices(NOISE, k=6)
    rng.shuffle(words)
    return sentenceify(words)


def core_by_snapshot_frequency(topic_id, snapshot_entries):
    counts = {}
    core = set(CORE[topic_id].split())
    for e in snapshot_entries:
        if e["query_id"] != topic_id:
            continue
        for w in e["text"].replace(".", " ").split():
            if w in core:
                counts[w] = counts.get(w, 0) + 1
    return [w for w, _ in sorted(counts.items(), key=lambda kv: (-kv[1], kv[0]))]


def distinct_terms(entries, stops):
    seen = set()
    for e in entries:
        for w in e["text"].replace(".", " ").split():
            if len(w) >= 2 and w not in stops:
                seen.add(w)
    return seen


def build_snapshot(rng):
    entries = []
    for topic_id, _ in TOPICS:
        for ei, engine in enumerate(ENGINES):
            for rank in range(1, 21):
                entries.append(
                    {
                        "query_id": topic_id,
                        "engine": engine,
                        "rank": rank,
                        "url": f"https://example.org/{topic_id.lower()}/{engine}/{rank}",
                        "fetched_at": FETCHED_AT,
                        "text": make_snapshot_doc(rng, topic_id, ei, rank),
                    }
                )
    # one shared URL per topic (google #2 mirrors bing #1) for dedup tests
    by_key = {(e["query_id"], e["engine"], e["rank"]): e for e in entries}
    for topic_id, _ in TOPICS:
        src = by_key[(topic_id, "bing", 1)]
        dst = by_key[(topic_id, "google", 2)]
        dst["url"] = src["url"]
        dst["text"] = src["text"]
    return entries


def assert_snapshot_floors(entries, stops):
    for topic_id, _ in TOPICS:
        mine = [e for e in entries if e["query_id"] == topic_id]
        top5 = [e for e in mine if e["rank"] <= 5]
        assert len(distinct_terms(top5, stops)) >= 55, f"{topic_id}: top-5 pool too small"
        for engine in ENGINES:
            single = [e for e in mine if e["engine"] == engine]
            n = len(distinct_terms(single, stops))
            assert n >= 52, f"{topic_id}/{engine}: single-engine pool too small ({n})"
        assert len(distinct_terms(mine, stops)) >= 78, f"{topic_id}: full pool too small"


def build_collection(rng, snapshot_entries):
    docs = []
    qrels = []
    topic_ids = [t for t, _ in TOPICS]
    for ti, topic_id in enumerate(topic_ids):
        titles = TITLE_TERMS[topic_id]
        ranked_core = core_by_snapshot_frequency(topic_id, snapshot_entries)
        frequent = ranked_core[:25]
        other_core = CORE[topic_ids[(ti + 1) % len(topic_ids)]].split()

        # 4 direct docs: titles + frequent vocabulary
        for i in range(4):
            words = []
            for t in titles:
                words += [t] * rng.randint(2, 3)
            words += window(frequent, i * 6, 12)
            words += rng.choices(frequent, k=8)
            words += rng.choices(NOISE, k=3)
            rng.shuffle(words)
            doc_id = f"{topic_id}-a{i + 1}"
            docs.append((doc_id, sentenceify(words)))
            qrels.append((topic_id, doc_id, 1))

        # 2 vocabulary-only docs: no title words at all
        for i in range(2):
            words = window(frequent, i * 9, 22)
            words += rng.choices(frequent, k=14)
            words += rng.choices(NOISE, k=2)
            rng.shuffle(words)
            doc_id = f"{topic_id}-b{i + 1}"
            docs.append((doc_id, sentenceify(words)))
            qrels.append((topic_id, doc_id, 1))

        # 2 distractors: exactly one title word, foreign vocabulary
        for i in range(2):
            words = [titles[i % len(titles)]]
            words += rng.choices(other_core, k=22)
            words += rng.choices(NOISE, k=8)
            rng.shuffle(words)
            doc_id = f"{topic_id}-c{i + 1}"
            docs.append((doc_id, sentenceify(words)))
            qrels.append((topic_id, doc_id, 0))

        # 2 unjudged noise docs
        for i in range(2):
            words = rng.choices(NOISE, k=15) + rng.choices(FILLER, k=8)
            rng.shuffle(words)
            docs.append((f"{topic_id}-d{i + 1}", sentenceify(words)))
    return docs, qrels


def assert_collection(docs, qrels):
    stops = load_stoplist()
    title_stems = {t: {stem(w) for w in TITLE_TERMS[t]} for t, _ in TOPICS}
    by_id = dict(docs)
    for topic_id, _ in TOPICS:
        for suffix in ("b1", "b2", "d1", "d2"):
            text = by_id[f"{topic_id}-{suffix}"]
            stems = {stem(w.rstrip(".")) for w in text.split()}
            assert not (stems & title_stems[topic_id]), f"{topic_id}-{suffix} leaks a title stem"
        for i, suffix in enumerate(("c1", "c2")):
            text = by_id[f"{topic_id}-{suffix}"]
            stems = [stem(w.rstrip(".")) for w in text.split()]
            own = [s for s in stems if s in title_stems[topic_id]]
            assert len(own) == 1, f"{topic_id}-{suffix}: want exactly 1 title word, got {len(own)}"
    rel = {}
    for qid, _doc, grade in qrels:
        rel[qid] = rel.get(qid, 0) + (1 if grade > 0 else 0)
    assert all(v == 6 for v in rel.values()), rel
    assert len(docs) == 50 and len({d for d, _ in docs}) == 50
    _ = stops


def write_outputs(snapshot_entries, docs, qrels):
    OUT.mkdir(parents=True, exist_ok=True)
    compact = dict(separators=(",", ":"), ensure_ascii=False)

    with open(OUT / "topics.tsv", "w") as fh:
        fh.write("# fixture topics\n")
        for tid, title in TOPICS:
            fh.write(f"{tid}\t{title}\n")

    with open(OUT / "snapshot.jsonl", "w") as fh:
        meta = {"created_at": CREATED_AT, "provider": "fixture", "n_requested": 20}
        fh.write(json.dumps(meta, **compact) + "\n")
        ordered = sorted(snapshot_entries, key=lambda e: (e["query_id"], e["engine"], e["rank"]))
        for e in ordered:
            rec = {
                "query_id": e["query_id"],
                "engine": e["engine"],
                "rank": e["rank"],
                "url": e["url"],
                "fetched_at": e["fetched_at"],
                "text": e["text"],
            }
            fh.write(json.dumps(rec, **compact) + "\n")

    with open(OUT / "collection.jsonl", "w") as fh:
        for doc_id, text in docs:
            fh.write(json.dumps({"doc_id": doc_id, "text": text}, **compact) + "\n")

    with open(OUT / "qrels.txt", "w") as fh:
        for qid, doc_id, grade in qrels:
            fh.write(f"{qid} 0 {doc_id} {grade}\n")


def main():
    check_pools()
    rng = random.Random(SEED)
    snapshot_entries = build_snapshot(rng)
    assert_snapshot_floors(snapshot_entries, load_stoplist())
    docs, qrels = build_collection(rng, snapshot_entries)
    assert_collection(docs, qrels)
    write_outputs(snapshot_entries, docs, qrels)
    stops = load_stoplist()
    for topic_id, _ in TOPICS:
        mine = [e for e in snapshot_entries if e["query_id"] == topic_id]
        print(f"{topic_id}: snapshot distinct terms = {len(distinct_terms(mine, stops))}")
    print(f"wrote fixtures to {OUT}")


if __name__ == "__main__":
    main()
