#!/usr/bin/env python3
"""Export a WordNet 3.0 database directory to the line-oriented inventory format.

One synset per line, tab-separated:

    synset_id  pos  lexname  lemmas  sensekeys  hypernyms  gloss  sense_numbers

Requires nltk (only its WordNet corpus reader is used; no download happens).
"""

import argparse
import os
import sys
from collections import defaultdict

from nltk.corpus.reader.wordnet import WordNetCorpusReader


def read_sense_numbers(dict_dir):
    numbers = {}
    with open(os.path.join(dict_dir, "index.sense"), encoding="utf-8") as f:
        for line in f:
            parts = line.split()
            if len(parts) >= 3:
                numbers[parts[0]] = int(parts[2])
    return numbers


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("dict_dir", help="WordNet dict/ directory (data.noun, index.sense, ...)")
    ap.add_argument("out", help="output inventory path")
    ap.add_argument("--include-instance-hypernyms", action="store_true",
                    help="also emit instance-of pointers as hypernym edges")
    args = ap.parse_args()

    wn = WordNetCorpusReader(os.path.abspath(args.dict_dir), None)
    sense_numbers = read_sense_numbers(args.dict_dir)

    def synset_id(s):
        return "%08d%s" % (s.offset(), s.pos())

    rows = []
    for s in wn.all_synsets():
        lemmas, keys, numbers = [], [], []
        seen = set()
        for lemma in s.lemmas():
            key = lemma.key()
            # WordNet lists a few case variants (A/a, Baroque/baroque) under one key.
            if key in seen:
                continue
            seen.add(key)
            lemmas.append(lemma.name())
            keys.append(key)
            number = sense_numbers.get(key)
            if number is None:
                # Keys absent from index.sense: fall back to the reader's synset order.
                pos = "a" if s.pos() == "s" else s.pos()
                ranked = wn.synsets(lemma.name(), pos)
                number = ranked.index(s) + 1 if s in ranked else len(ranked) + 1
            numbers.append(str(number))
        hyps = s.hypernyms()
        if args.include_instance_hypernyms:
            hyps = hyps + s.instance_hypernyms()
        hyp_ids = sorted({synset_id(h) for h in hyps})
        gloss = " ".join(s.definition().split()) or s.name()
        rows.append((synset_id(s), s.pos(), s.lexname(), ",".join(lemmas), ",".join(keys),
                     ",".join(hyp_ids) if hyp_ids else "-", gloss, ",".join(numbers)))

    rows.sort()
    with open(args.out, "w", encoding="utf-8", newline="\n") as f:
        for row in rows:
            f.write("\t".join(row) + "\n")
    print("wrote %d synsets to %s" % (len(rows), args.out), file=sys.stderr)


if __name__ == "__main__":
    main()
