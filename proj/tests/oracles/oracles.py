#!/usr/bin/env python3
"""Independent reference computations whose outputs are frozen into the C++
tests. Nothing here imports or shells out to the C++ code except `bias`,
which reads spec files produced by `forge generate`.

    python3 tests/oracles/oracles.py lcs
    python3 tests/oracles/oracles.py overlap
    python3 tests/oracles/oracles.py relatedness
    python3 tests/oracles/oracles.py transformation tests/golden/wikimystery-bieber-7.json
    python3 tests/oracles/oracles.py bias <dir-of-specs> assets/regions.tsv
    python3 tests/oracles/oracles.py culprit
    python3 tests/oracles/oracles.py pool
"""

import itertools
import json
import math
import re
import sys
from collections import Counter
from pathlib import Path

import networkx as nx

ROOT = Path(__file__).resolve().parents[2]


def lcs(a: bytes, b: bytes) -> int:
    prev = [0] * (len(b) + 1)
    for x in a:
        cur = [0]
        for j, y in enumerate(b):
            cur.append(prev[j] + 1 if x == y else max(prev[j + 1], cur[j]))
        prev = cur
    return prev[-1]


def similarity(a: str, b: str) -> float:
    a8, b8 = a.encode(), b.encode()
    if not a8 and not b8:
        return 1.0
    return 2 * lcs(a8, b8) / (len(a8) + len(b8))


def tokens(text):
    return {t for t in re.sub(r"[^\w\s]", " ", text.lower()).split() if t}


def overlap(caption, label):
    lab = tokens(label)
    return len(tokens(caption) & lab) / len(lab) if lab else 0.0


def corpus_graph(directory):
    g = nx.Graph()
    entities = {}
    for path in sorted((ROOT / directory / "entities").iterdir()):
        e = json.loads(path.read_text())
        entities[e["id"]] = e
        g.add_node(e["id"])
    for e in entities.values():
        for f in e["facts"]:
            o = f["object"]
            if o["type"] == "entity" and o["id"] in entities and o["id"] != e["id"]:
                g.add_edge(e["id"], o["id"])
    return g


def relatedness(g, a, b, w=(0.5, 0.3, 0.2)):
    if a == b:
        return 1.0
    direct = 1.0 if g.has_edge(a, b) else 0.0
    na = set(g[a]) - {b}
    nb = set(g[b]) - {a}
    union = na | nb
    jac = len(na & nb) / len(union) if union else 0.0
    try:
        d = nx.shortest_path_length(g, a, b)
        path = 1.0 / (1 + d)
    except nx.NetworkXNoPath:
        path = 0.0
    return w[0] * direct + w[1] * jac + w[2] * path


def haversine(p, q):
    r = 6371.0
    la1, lo1, la2, lo2 = map(math.radians, (p[0], p[1], q[0], q[1]))
    h = math.sin((la2 - la1) / 2) ** 2 + math.cos(la1) * math.cos(la2) * math.sin((lo2 - lo1) / 2) ** 2
    return 2 * r * math.asin(math.sqrt(h))


def main():
    cmd = sys.argv[1]
    if cmd == "lcs":
        for text in ["I was born on 1879-03-14.", "Hello, I am Albert Einstein."]:
            src = "1879-03-14" if "born" in text else "Albert Einstein"
            print(f"{text!r} vs {src!r}: lcs={lcs(src.encode(), text.encode())} similarity={similarity(src, text):.12f}")
    elif cmd == "overlap":
        for cap in ["Margaret Thatcher portrait", "Downing Street, 1985", "Margaret Thatcher"]:
            print(f"{cap!r}: {overlap(cap, 'Margaret Thatcher'):.12f}")
    elif cmd == "relatedness":
        g = corpus_graph("tests/data/small12")
        dbr = "http://dbpedia.org/resource/"
        for a, b in [("Ed_Five", "Vera_Victim"), ("Ada_One", "Vera_Victim"), ("Flo_Six", "Gus_Seven")]:
            print(f"{a} ~ {b}: shared={len((set(g[dbr+a]) & set(g[dbr+b])))} "
                  f"adjacent={g.has_edge(dbr+a, dbr+b)} d={nx.shortest_path_length(g, dbr+a, dbr+b)} "
                  f"r={relatedness(g, dbr+a, dbr+b):.12f}")
    elif cmd == "transformation":
        spec = json.loads(Path(sys.argv[2]).read_text())
        sims = []
        for npc in spec["npcs"]:
            for line in npc["dialog"]["lines"]:
                t = line["transformation"]
                sims.append(1.0 if t["kind"] == "verbatim" else similarity(t["source_text"], line["text"]))
        print(f"lines={len(sims)} transformation={1 - sum(sims) / len(sims):.12f}")
    elif cmd == "bias":
        table = {}
        for row in Path(sys.argv[3]).read_text().splitlines():
            if not row or row.startswith("#"):
                continue
            c, region, lat, lon = row.split("\t")
            table[c] = (region, float(lat), float(lon))
        regions = Counter({r: 0 for r, _, _ in table.values()})
        locs = Counter()
        for path in sorted(Path(sys.argv[2]).glob("*.json")):
            spec = json.loads(path.read_text())
            bundle = {e["id"]: e for e in spec["bundle"]}
            for loc in spec["locations"]:
                lid = loc["id"]
                locs[lid] += 1
                cur, seen, country = lid, set(), None
                while cur and cur not in seen:
                    if cur in table:
                        country = cur
                        break
                    seen.add(cur)
                    ent = bundle.get(cur)
                    nxt = None
                    if ent:
                        for f in ent["facts"]:
                            if f["predicate"] == "located-in" and f["object"]["type"] == "entity":
                                nxt = f["object"]["id"]
                                break
                    cur = nxt
                if country is None:
                    geo = bundle[lid]["geo"]
                    country = min(sorted(table), key=lambda c: haversine((geo["lat"], geo["lon"]), table[c][1:]))
                    print(f"  nearest-centroid fallback: {lid} -> {country}")
                regions[table[country][0]] += 1
        print("regions:", dict(sorted(regions.items())))
        top = sorted(locs.items(), key=lambda kv: (-kv[1], kv[0]))[:8]
        print("occurrences:", sum(locs.values()))
        for lid, n in top:
            print(f"  {n} {lid}")
    elif cmd == "culprit":
        # Binomial bounds for 1000 draws over 5 members.
        n, p = 1000, 0.2
        sd = math.sqrt(n * p * (1 - p))
        print(f"mean={n * p} sd={sd:.3f} 3sd=[{n * p - 3 * sd:.1f}, {n * p + 3 * sd:.1f}]")
    elif cmd == "pool":
        # Vera_Victim's suspect pool on small12 and the best 5-subset by
        # exhaustive search: mean pairwise relatedness + mean to the victim.
        g = corpus_graph("tests/data/small12")
        dbr = "http://dbpedia.org/resource/"
        victim = dbr + "Vera_Victim"
        people = []
        for path in sorted((ROOT / "tests/data/small12/entities").iterdir()):
            e = json.loads(path.read_text())
            if e["kind"] == "person" and e["id"] != victim:
                people.append(e["id"])
        scored = sorted(((relatedness(g, p, victim), p) for p in people), key=lambda t: (-t[0], t[1]))
        for r, p in scored:
            print(f"  {r:.12f} {p.rsplit('/', 1)[-1]}")

        def fitness(members):
            pairs = list(itertools.combinations(members, 2))
            pair = sum(relatedness(g, a, b) for a, b in pairs) / len(pairs) if pairs else 0.0
            return pair + sum(relatedness(g, m, victim) for m in members) / len(members)

        best = max(itertools.combinations(sorted(people), 5), key=fitness)
        print(f"best5={[m.rsplit('/', 1)[-1] for m in best]} fitness={fitness(best):.12f}")
    else:
        sys.exit(f"unknown command {cmd}")


if __name__ == "__main__":
    main()
