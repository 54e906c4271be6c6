#!/usr/bin/env python3
# Copyright 2026 The tibadv Authors. All Rights Reserved.
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.
# ==============================================================================
"""Writes the synthetic sentiment benchmark used by the acceptance suite.

Outputs (in --out-dir):
  benchmark.tsv   id, label, text
  lexicon.txt     two-syllable words for word segmentation
  mock.json       {"classifier": unigram spec, "masked_lm": table spec}

The classifier votes with marker syllables. The fill tables rank neutral
tokens first and one marker of each polarity last, so a random fill rarely
helps while a scored search finds the opposite marker.
"""

import argparse
import json
import os
import random

TSHEG = "་"

POSITIVE = ["བདེ", "སྐྱིད", "ལེགས", "དགའ"]
NEGATIVE = ["སྡུག", "ངན", "ཉེས", "འཁྲུག"]
NEUTRAL = [
    "ཡིན", "དེ", "ནི", "ལ", "ཀྱི", "ནས", "དང", "འདི", "གཅིག", "ཡོད",
    "རེད", "བྱས", "སོང", "མི", "ཡུལ", "ལོ", "ཟླ", "ཉིན", "དུས", "ཆུ",
    "རི", "ཤིང", "ལམ", "ཁང", "སྐད", "ཡིག", "ཚིག", "གཏམ", "བ", "པ",
]
# Two-syllable neutral words, plus one word per marker.
NEUTRAL_WORDS = [
    "ཡུལ་ལུང", "ལོ་རྒྱུས", "ཟླ་བ", "ཉིན་མོ", "དུས་ཚོད", "ཆུ་བོ", "རི་བོ",
    "ཤིང་སྡོང", "ལམ་ཁ", "ཁང་པ", "སྐད་ཆ", "ཡིག་ཆ", "ཚིག་གྲུབ", "གཏམ་རྒྱུད",
    "མི་སེར", "ས་ཆ",
]
MARKER_WORD_SUFFIX = {"བདེ": "བ", "སྐྱིད": "པོ", "ལེགས": "པ", "དགའ": "བ",
                      "སྡུག": "པ", "ངན": "པ", "ཉེས": "པ", "འཁྲུག": "པ"}


def marker_word(marker):
    return marker + TSHEG + MARKER_WORD_SUFFIX[marker]


def classifier_spec():
    markers = [{"token": t, "label": 0, "weight": 1.0} for t in POSITIVE]
    markers += [{"token": t, "label": 1, "weight": 1.0} for t in NEGATIVE]
    return {"model_id": "bench-unigram", "labels": ["positive", "negative"],
            "markers": markers}


def table_spec():
    syllables = [{"token": t, "weight": float(40 - i)}
                 for i, t in enumerate(NEUTRAL[:8])]
    syllables += [{"token": "ངན", "weight": 5.0}, {"token": "བདེ", "weight": 4.0}]
    syllables += [{"token": t, "weight": 1.0} for t in NEUTRAL[8:16]]
    words = [{"token": w, "weight": float(40 - i)}
             for i, w in enumerate(NEUTRAL_WORDS[:8])]
    words += [{"token": marker_word("ངན"), "weight": 5.0},
              {"token": marker_word("བདེ"), "weight": 4.0}]
    words += [{"token": w, "weight": 1.0} for w in NEUTRAL_WORDS[8:]]
    return {"model_id": "bench-table", "syllables": syllables, "words": words}


def make_text(rng, polarity):
    own = POSITIVE if polarity == 0 else NEGATIVE
    other = NEGATIVE if polarity == 0 else POSITIVE
    units = []
    for _ in range(rng.randint(1, 2)):
        m = rng.choice(own)
        units.append(marker_word(m) if rng.random() < 0.5 else m)
    if rng.random() < 0.2:
        units.append(rng.choice(other))
        units.append(marker_word(rng.choice(own)))
    for _ in range(rng.randint(1, 5)):
        if rng.random() < 0.4:
            units.append(rng.choice(NEUTRAL_WORDS))
        else:
            units.append(rng.choice(NEUTRAL))
    rng.shuffle(units)
    return TSHEG.join(units) + "།"


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--out-dir", default=os.path.join(
        os.path.dirname(os.path.abspath(__file__)), "..", "tests", "data"))
    parser.add_argument("--samples", type=int, default=200)
    parser.add_argument("--seed", type=int, default=1729)
    parser.add_argument("--label-noise", type=float, default=0.1)
    args = parser.parse_args()

    rng = random.Random(args.seed)
    os.makedirs(args.out_dir, exist_ok=True)
    labels = ["positive", "negative"]
    with open(os.path.join(args.out_dir, "benchmark.tsv"), "w",
              encoding="utf-8", newline="\n") as out:
        out.write("id\tlabel\ttext\n")
        for i in range(args.samples):
            polarity = rng.randint(0, 1)
            text = make_text(rng, polarity)
            gold = polarity
            if rng.random() < args.label_noise:
                gold = 1 - gold
            out.write(f"b{i:03d}\t{labels[gold]}\t{text}\n")

    lexicon = sorted(set(NEUTRAL_WORDS) |
                     {marker_word(m) for m in POSITIVE + NEGATIVE})
    with open(os.path.join(args.out_dir, "lexicon.txt"), "w",
              encoding="utf-8", newline="\n") as out:
        out.write("\n".join(lexicon) + "\n")

    with open(os.path.join(args.out_dir, "mock.json"), "w",
              encoding="utf-8", newline="\n") as out:
        json.dump({"classifier": classifier_spec(), "masked_lm": table_spec()},
                  out, ensure_ascii=False, indent=2)
        out.write("\n")


if __name__ == "__main__":
    main()
