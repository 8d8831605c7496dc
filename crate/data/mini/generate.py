"""Regenerates the bundled mini dataset. Deterministic (seed 20180605)."""
import json
import random
from pathlib import Path

rng = random.Random(20180605)
DIM = 16
HERE = Path(__file__).parent

CONCEPTS = {
    "frog": ["legs", "green", "water", "jump", "amphibian"],
    "snail": ["shell", "slow", "garden", "slime"],
    "dog": ["legs", "fur", "tail", "bark"],
    "fish": ["fins", "water", "scales", "swim"],
    "bird": ["wings", "feathers", "legs", "fly"],
    "car": ["wheels", "engine", "road", "metal"],
    "bicycle": ["wheels", "pedals", "road", "metal"],
    "apple": ["red", "fruit", "sweet", "tree"],
    "banana": ["yellow", "fruit", "sweet", "peel"],
    "lemon": ["yellow", "fruit", "sour", "tree"],
    "knife": ["sharp", "metal", "blade", "cut"],
    "spoon": ["metal", "soup", "round"],
    "chair": ["legs", "wood", "seat"],
    "rose": ["red", "thorns", "flower", "garden"],
    "tulip": ["flower", "garden", "bulb"],
}
FILLER = ["animal", "small", "tool", "vehicle", "plant", "kitchen", "common",
          "furniture", "the", "is", "a", "with", "and", "of", "has", "many"]
RELATION_OF = {
    "HasA": ["legs", "fur", "tail", "fins", "wings", "feathers", "wheels", "engine",
             "pedals", "shell", "blade", "thorns", "seat", "peel", "scales", "bulb"],
    "HasProperty": ["green", "red", "yellow", "sweet", "sour", "sharp", "slow", "round", "slime"],
    "AtLocation": ["water", "garden", "road", "tree"],
    "CapableOf": ["jump", "swim", "fly", "bark", "cut"],
    "IsA": ["fruit", "flower", "amphibian"],
    "MadeOf": ["metal", "wood"],
    "UsedFor": ["soup"],
}
PART_OF = {"legs", "tail", "fins", "wings", "wheels", "engine", "pedals", "blade", "seat", "peel"}


def unit(v):
    n = sum(x * x for x in v) ** 0.5
    return [x / n for x in v]


def gauss():
    return [rng.gauss(0, 1) for _ in range(DIM)]


attributes = sorted({a for attrs in CONCEPTS.values() for a in attrs})
vectors = {w: unit(gauss()) for w in attributes + FILLER}
for c, attrs in CONCEPTS.items():
    noise = gauss()
    v = [sum(vectors[a][i] for a in attrs) + 0.3 * noise[i] for i in range(DIM)]
    vectors[c] = unit(v)

with open(HERE / "embeddings.txt", "w") as f:
    f.write(f"{len(vectors)} {DIM}\n")
    for w in sorted(vectors):
        f.write(w + " " + " ".join(f"{x:.6f}" for x in vectors[w]) + "\n")

with open(HERE / "leads.tsv", "w") as f:
    for c, attrs in CONCEPTS.items():
        words = ["the", c, "is", "a", "common"] + rng.sample(attrs, max(1, len(attrs) - 1))
        words += rng.sample(FILLER[:8], 2)
        f.write(f"{c}\t{' '.join(words)}\n")

with open(HERE / "lexicon.jsonl", "w") as f:
    for c, attrs in CONCEPTS.items():
        others = [o for o in CONCEPTS if o != c]
        rec = {
            "word": c,
            "synonyms": [],
            "related": rng.sample(others, 1),
            "gloss_words": rng.sample(attrs, max(1, len(attrs) // 2)) + rng.sample(FILLER, 2),
        }
        f.write(json.dumps(rec) + "\n")

with open(HERE / "unigrams.tsv", "w") as f:
    for w in sorted(vectors):
        f.write(f"{w}\t{rng.randint(10**3, 10**6)}\n")

with open(HERE / "bigrams.tsv", "w") as f:
    for c, attrs in CONCEPTS.items():
        for a in attrs:
            f.write(f"{c} {a}\t{rng.randint(500, 20000)}\n")
        stray = rng.choice([a for a in attributes if a not in attrs])
        f.write(f"{c} {stray}\t{rng.randint(1, 40)}\n")

with open(HERE / "edges.tsv", "w") as f:
    f.write("# relation\thead\ttail\n")
    for c, attrs in CONCEPTS.items():
        for a in attrs:
            rel = next(r for r, ws in RELATION_OF.items() if a in ws)
            f.write(f"{rel}\t{c}\t{a}\n")
            if a in PART_OF:
                f.write(f"PartOf\t{a}\t{c}\n")
    for c in ["frog", "dog", "fish", "bird", "snail"]:
        f.write(f"IsA\t{c}\tanimal\n")
    f.write("HasContext\tbark\tdog\n")


def triples(n_pos, n_neg, used):
    out = []
    names = list(CONCEPTS)
    while sum(1 for t in out if t[3] == 1) < n_pos or sum(1 for t in out if t[3] == 0) < n_neg:
        t1, t2 = rng.sample(names, 2)
        a1, a2 = set(CONCEPTS[t1]), set(CONCEPTS[t2])
        if rng.random() < 0.5:
            pool = sorted(a1 - a2)
            label = 1
        else:
            pool = sorted((a1 & a2) | (a2 - a1))
            label = 0
        if not pool:
            continue
        att = rng.choice(pool)
        key = (t1, t2, att)
        count = sum(1 for t in out if t[3] == label)
        if key in used or count >= (n_pos if label else n_neg):
            continue
        used.add(key)
        out.append((t1, t2, att, label))
    rng.shuffle(out)
    return out


used = set()
for name, (p, n) in {"train": (10, 10), "validation": (6, 6), "test": (6, 6)}.items():
    with open(HERE / f"{name}.csv", "w") as f:
        for t in triples(p, n, used):
            f.write(",".join(map(str, t)) + "\n")
