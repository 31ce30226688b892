#!/usr/bin/env python3
"""Regenerate the bundled lexical resources under resources/.

Inputs (not shipped with the repo):
  --wordnet   directory holding the WordNet 3.0 database files
              (index.noun, index.verb, ..., *.exc, cntlist.rev)
  --freq      pyspellchecker's en.json.gz word-frequency table

Outputs:
  dictionary.txt  one lowercase word per line
  senses.tsv      word<TAB>number of WordNet senses (summed over parts of speech)
  tags.tsv        word<TAB>most frequent coarse tag (N, V, ADJ, ADV, O)
  stopwords.txt   scikit-learn's English stop-word list

connectors.txt is curated by hand and is not touched by this script.
"""

import argparse
import collections
import gzip
import json
import os
import re

from sklearn.feature_extraction.text import ENGLISH_STOP_WORDS

POS_FILES = {"n": "noun", "v": "verb", "a": "adj", "r": "adv"}
TAG_NAMES = {"n": "N", "v": "V", "a": "ADJ", "r": "ADV"}
SS_TYPE = {"1": "n", "2": "v", "3": "a", "4": "r", "5": "a"}

MORPH_RULES = {
    "n": [("s", ""), ("ses", "s"), ("xes", "x"), ("zes", "z"), ("ches", "ch"),
          ("shes", "sh"), ("men", "man"), ("ies", "y")],
    "v": [("s", ""), ("ies", "y"), ("es", "e"), ("es", ""), ("ed", "e"),
          ("ed", ""), ("ing", "e"), ("ing", "")],
    "a": [("er", ""), ("est", ""), ("er", "e"), ("est", "e")],
    "r": [],
}

# Closed-class words get a fixed tag and no sense count.
CLOSED_OTHER = """
a an the this that these those some any each every either neither no all both
half several many much more most few fewer less least own such what which
whose whatever whichever i me my mine myself we us our ours ourselves you your
yours yourself yourselves he him his himself she her hers herself it its itself
they them their theirs themselves one ones someone somebody something anyone
anybody anything everyone everybody everything nobody nothing who whom whoever
about above across after against along amid among around as at before behind
below beneath beside besides between beyond by despite down during except for
from in inside into like near of off on onto out outside over past per since
through throughout till to toward towards under underneath unlike until up upon
via with within without and but or nor so yet because although though while
whereas if unless whether than lest can could may might must shall should will
would ought
""".split()
CLOSED_VERB = """
be am is are was were been being have has had having do does did done doing
""".split()
CLOSED_ADV = """not n't never also very too just only even still already soon
often always sometimes usually here there now then thus hence however moreover
furthermore therefore nevertheless nonetheless meanwhile otherwise instead
""".split()


def read_index(wn_dir):
    senses = {}
    for pos, name in POS_FILES.items():
        with open(os.path.join(wn_dir, "index." + name), encoding="latin-1") as fh:
            for line in fh:
                if line.startswith(" "):
                    continue
                parts = line.split()
                lemma, synset_cnt = parts[0], int(parts[2])
                senses[(lemma, pos)] = synset_cnt
    return senses


def read_exceptions(wn_dir):
    exc = collections.defaultdict(list)
    for pos, name in POS_FILES.items():
        with open(os.path.join(wn_dir, name + ".exc"), encoding="latin-1") as fh:
            for line in fh:
                parts = line.split()
                for base in parts[1:]:
                    exc[(parts[0], pos)].append(base)
    return exc


def read_tag_counts(wn_dir):
    counts = collections.Counter()
    with open(os.path.join(wn_dir, "cntlist.rev"), encoding="latin-1") as fh:
        for line in fh:
            key, _, tag_cnt = line.split()
            lemma, rest = key.split("%", 1)
            counts[(lemma, SS_TYPE[rest[0]])] += int(tag_cnt)
    return counts


def base_forms(word, pos, senses, exc):
    if (word, pos) in senses:
        yield word
    for base in exc.get((word, pos), []):
        if (base, pos) in senses:
            yield base
    for suffix, repl in MORPH_RULES[pos]:
        if word.endswith(suffix) and len(word) > len(suffix) + 1:
            base = word[: -len(suffix)] + repl
            if (base, pos) in senses:
                yield base


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--wordnet", required=True)
    ap.add_argument("--freq", required=True)
    ap.add_argument("--min-freq", type=int, default=60)
    ap.add_argument("--out", default=os.path.join(os.path.dirname(__file__), "..", "resources"))
    args = ap.parse_args()

    senses = read_index(args.wordnet)
    exc = read_exceptions(args.wordnet)
    tag_counts = read_tag_counts(args.wordnet)
    with gzip.open(args.freq) as fh:
        freq = json.load(fh)

    alpha = re.compile(r"^[a-z]+$")
    words = sorted(w for w, c in freq.items() if c >= args.min_freq and alpha.match(w))
    closed = set(CLOSED_OTHER) | set(CLOSED_VERB) | set(CLOSED_ADV)
    dictionary = set(words) | {w for w in closed if alpha.match(w)}

    sense_rows, tag_rows = {}, {}
    for word in sorted(dictionary):
        if word in CLOSED_OTHER:
            tag_rows[word] = "O"
            continue
        if word in CLOSED_VERB:
            tag_rows[word] = "V"
            continue
        if word in CLOSED_ADV:
            tag_rows[word] = "ADV"
            continue
        total_senses, best = 0, None
        for pos in POS_FILES:
            bases = list(base_forms(word, pos, senses, exc))
            if not bases:
                continue
            base = bases[0]
            total_senses += senses[(base, pos)]
            score = (tag_counts.get((base, pos), 0), senses[(base, pos)])
            if best is None or score > best[0]:
                best = (score, pos)
        if best is not None:
            sense_rows[word] = total_senses
            tag_rows[word] = TAG_NAMES[best[1]]

    os.makedirs(args.out, exist_ok=True)
    with open(os.path.join(args.out, "dictionary.txt"), "w") as fh:
        fh.writelines(w + "\n" for w in sorted(dictionary))
    with open(os.path.join(args.out, "senses.tsv"), "w") as fh:
        fh.writelines(f"{w}\t{c}\n" for w, c in sorted(sense_rows.items()))
    with open(os.path.join(args.out, "tags.tsv"), "w") as fh:
        fh.writelines(f"{w}\t{t}\n" for w, t in sorted(tag_rows.items()))
    with open(os.path.join(args.out, "stopwords.txt"), "w") as fh:
        fh.writelines(w + "\n" for w in sorted(ENGLISH_STOP_WORDS))
    print(f"dictionary={len(dictionary)} senses={len(sense_rows)} tags={len(tag_rows)}")


if __name__ == "__main__":
    main()
