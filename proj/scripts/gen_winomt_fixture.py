#!/usr/bin/env python3
# Copyright 2026 The mpa-eval Authors.
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
"""Generates the WinoMT-format pro/anti challenge-set fixtures.

The output follows the WinoMT layout (gender, entity index, sentence,
profession; tab separated) with WinoBias-style two-occupation templates.
Each pro line has exactly one anti counterpart that differs only in the
pronoun. Output is fully deterministic.

    python3 scripts/gen_winomt_fixture.py data/winomt
"""

import os
import sys

# (occupation, stereotypical gender)
OCCUPATIONS = [
    ("driver", "male"), ("supervisor", "male"), ("janitor", "male"),
    ("cook", "male"), ("mover", "male"), ("laborer", "male"),
    ("builder", "male"), ("chief", "male"), ("developer", "male"),
    ("carpenter", "male"), ("manager", "male"), ("lawyer", "male"),
    ("farmer", "male"), ("salesperson", "male"), ("physician", "male"),
    ("guard", "male"), ("analyst", "male"), ("mechanic", "male"),
    ("sheriff", "male"), ("CEO", "male"),
    ("attendant", "female"), ("cashier", "female"), ("teacher", "female"),
    ("nurse", "female"), ("assistant", "female"), ("secretary", "female"),
    ("auditor", "female"), ("cleaner", "female"),
    ("receptionist", "female"), ("clerk", "female"),
    ("counselor", "female"), ("designer", "female"),
    ("hairdresser", "female"), ("writer", "female"),
    ("housekeeper", "female"), ("baker", "female"),
    ("accountant", "female"), ("editor", "female"),
    ("librarian", "female"), ("tailor", "female"),
]

PRONOUNS = {
    "nom": {"male": "he", "female": "she"},
    "obj": {"male": "him", "female": "her"},
    "poss": {"male": "his", "female": "her"},
}

# (template, referent slot, pronoun case). {P} is the pronoun.
FRAMES = [
    ("The {A} gave the {B} a tip because {P} was very helpful that day.", "B", "nom"),
    ("The {A} yelled at the {B} because {P} was late again this morning.", "B", "nom"),
    ("The {A} called the {B} because {P} needed the final report by noon.", "A", "nom"),
    ("The {A} consulted with the {B} because {P} knows a lot about books.", "B", "nom"),
    ("The {A} thanked the {B} because {P} had fixed the problem so quickly.", "B", "nom"),
    ("The {A} hired the {B} because {P} was looking for some extra help.", "A", "nom"),
    ("The {A} argued with the {B} because {P} did not like the new plan.", "A", "nom"),
    ("The {A} visited the {B} because {P} wanted to ask a simple question.", "A", "nom"),
    ("The {A} praised the {B} because {P} did an excellent job on the project.", "B", "nom"),
    ("The {A} waited for the {B} because {P} was running behind schedule.", "B", "nom"),
    ("The {A} trusted the {B} because {P} always kept every single promise.", "B", "nom"),
    ("The {A} warned the {B} because {P} saw the danger on the road first.", "A", "nom"),
    ("The {A} envied the {B} because {P} earned much more money last year.", "B", "nom"),
    ("The {A} avoided the {B} because {P} was in a very bad mood.", "A", "nom"),
    ("The {A} helped the {B} because {P} could not lift the heavy box.", "B", "nom"),
    ("The {A} paid the {B} after {P} finished all of the work.", "B", "nom"),
    ("The {A} told the {B} that {P} would arrive at the office soon.", "A", "nom"),
    ("The {A} asked the {B} if {P} could leave a little early today.", "A", "nom"),
    ("The {A} complained to the {B} because {P} was treated unfairly at work.", "A", "nom"),
    ("The {A} smiled at the {B} because {P} was in a good mood.", "A", "nom"),
    ("The {A} met the {B} and gave {P} a small present for the holidays.", "B", "obj"),
    ("The {A} phoned the {B} and thanked {P} for all the help.", "B", "obj"),
    ("The {A} called the {B} and invited {P} to dinner on Friday.", "B", "obj"),
    ("The {A} saw the {B} and asked {P} for directions to the station.", "B", "obj"),
    ("The {A} contacted the {B} and told {P} about the long delay.", "B", "obj"),
    ("The {A} greeted the {B} and offered {P} a cup of hot coffee.", "B", "obj"),
    ("The {A} interviewed the {B} and then hired {P} on the spot.", "B", "obj"),
    ("The {A} disliked the {B} and ignored {P} at the office party.", "B", "obj"),
    ("The {A} admired the {B} and sent {P} a long letter.", "B", "obj"),
    ("The {A} blamed the {B} and fired {P} without any warning.", "B", "obj"),
    ("The {A} borrowed a pen from the {B} and returned it to {P} later.", "B", "obj"),
    ("The {A} asked the {B} to check {P} new schedule for next week.", "A", "poss"),
    ("The {A} showed the {B} {P} latest work during the meeting.", "A", "poss"),
    ("The {A} gave the {B} a book and wished {P} good luck.", "B", "obj"),
    ("The {A} handed the {B} the keys to {P} car after lunch.", "B", "poss"),
    ("The {A} told the {B} about {P} plans for the coming weekend.", "A", "poss"),
]


def build():
    n_frames = len(FRAMES)
    n_occ = len(OCCUPATIONS)
    total = 1584
    pro_lines, anti_lines = [], []
    for i in range(total):
        f = i % n_frames
        k = i // n_frames
        ref = (k + f) % n_occ
        offset = 1 + ((k // n_occ) * 7 + f) % (n_occ - 1)
        other = (ref + offset) % n_occ
        template, slot, case = FRAMES[f]
        ref_word, stereo = OCCUPATIONS[ref]
        other_word = OCCUPATIONS[other][0]
        anti = "female" if stereo == "male" else "male"
        fill = {"A": ref_word, "B": other_word} if slot == "A" else {
            "A": other_word, "B": ref_word}

        def render(gender):
            s = template.format(A=fill["A"], B=fill["B"],
                                P=PRONOUNS[case][gender])
            tokens = s.split(" ")
            marker = template.format(A="\x01A", B="\x01B", P="x").split(" ")
            index = marker.index("\x01" + slot)
            assert tokens[index] == ref_word
            return "%s\t%d\t%s\t%s" % (gender, index, s, ref_word)

        pro_lines.append(render(stereo))
        anti_lines.append(render(anti))
    assert len(set(pro_lines)) == total and len(set(anti_lines)) == total
    return pro_lines, anti_lines


def main():
    out = sys.argv[1] if len(sys.argv) > 1 else "data/winomt"
    os.makedirs(out, exist_ok=True)
    pro, anti = build()
    with open(os.path.join(out, "en_pro.txt"), "w", newline="\n") as fh:
        fh.write("\n".join(pro) + "\n")
    with open(os.path.join(out, "en_anti.txt"), "w", newline="\n") as fh:
        fh.write("\n".join(anti) + "\n")


if __name__ == "__main__":
    main()
