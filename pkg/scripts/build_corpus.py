#!/usr/bin/env python3
"""Regenerate src/regreason/data/mini_corpus.jsonl.

Each record is written out only after checking that the referent-selection
rules reproduce its hand-labeled oracle and that the REG pipeline accepts it.
Run from the repository root:  python3 scripts/build_corpus.py
"""

from __future__ import annotations

import json
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "src"))

from regreason.amr import parse_penman
from regreason.corpus import parse_record
from regreason.pipeline import build_record
from regreason.reg import validate


def rec(id, expression, tokens, pos, deps, penman, rule, token_index, concept):
    """tokens: list of (surface, lemma)."""
    return {
        "id": id,
        "expression": expression,
        "tokens": [
            {"index": i, "surface": s, "lemma": l} for i, (s, l) in enumerate(tokens)
        ],
        "pos": pos,
        "deps": deps,
        "penman": penman,
        "oracle": {"rule": rule, "token_index": token_index, "concept": concept},
    }


RECORDS = [
    rec(
        "c1c_cat_cage",
        "cat is standing near the cage",
        [("cat", "cat"), ("is", "be"), ("standing", "stand"), ("near", "near"),
         ("the", "the"), ("cage", "cage")],
        ["NN", "VBZ", "VBG", "IN", "DT", "NN"],
        [[2, 0, "nsubj"], [5, 4, "det"], [2, 5, "obl"]],
        "(s / stand-01 :ARG1 (c~0 / cat) :ARG2 (n~3 / near-02 :ARG1 c :ARG2 (g~5 / cage)))",
        "POS-rule", 0, "c",
    ),
    rec(
        "c1a_bird_branch",
        "a bird is climbing up a branch",
        [("a", "a"), ("bird", "bird"), ("is", "be"), ("climbing", "climb"),
         ("up", "up"), ("a", "a"), ("branch", "branch")],
        ["DT", "NN", "VBZ", "VBG", "RP", "DT", "NN"],
        [[1, 0, "det"], [3, 1, "nsubj"], [6, 5, "det"], [3, 6, "obl"]],
        "(w / climb-01~3 :ARG0 (b~1 / bird) :ARG1 (r~6 / branch) :direction (u~4 / up))",
        "POS-rule", 1, "b",
    ),
    rec(
        "c1b_guy_dogs",
        "a guy on the left is walking with his two dogs",
        [("a", "a"), ("guy", "guy"), ("on", "on"), ("the", "the"), ("left", "left"),
         ("is", "be"), ("walking", "walk"), ("with", "with"), ("his", "he"),
         ("two", "two"), ("dogs", "dog")],
        ["DT", "NN", "IN", "DT", "NN", "VBZ", "VBG", "IN", "PRP$", "CD", "NNS"],
        [[1, 0, "det"], [6, 1, "nsubj"], [4, 2, "case"], [1, 4, "nmod"],
         [10, 9, "nummod"], [6, 10, "obl"]],
        "(w / walk-01~6 :ARG0 (g~1 / guy :location (l~4 / left)) "
        ":accompanier (d~10 / dog :quant 2~9 :poss (h~8 / he)))",
        "POS-rule", 1, "g",
    ),
    rec(
        "track_runner",
        "man in white shirt running on the track",
        [("man", "man"), ("in", "in"), ("white", "white"), ("shirt", "shirt"),
         ("running", "run"), ("on", "on"), ("the", "the"), ("track", "track")],
        ["NN", "IN", "JJ", "NN", "VBG", "IN", "DT", "NN"],
        [[3, 2, "amod"], [0, 3, "nmod"], [4, 0, "nsubj"], [7, 6, "det"], [4, 7, "obl"]],
        "(r / run-02~4 :ARG0 (m~0 / man :prep-in (s~3 / shirt :mod (w~2 / white))) "
        ":location (t~7 / track))",
        "POS-rule", 0, "m",
    ),
    rec(
        "bowling_ball",
        "man throwing a bowling ball",
        [("man", "man"), ("throwing", "throw"), ("a", "a"), ("bowling", "bowling"),
         ("ball", "ball")],
        ["NN", "VBG", "DT", "NN", "NN"],
        [[1, 0, "nsubj"], [4, 3, "compound"], [1, 4, "obj"]],
        "(t / throw-01~1 :ARG0 (m~0 / man) :ARG1 (b~4 / ball :mod (bw~3 / bowling)))",
        "POS-rule", 0, "m",
    ),
    rec(
        "bottom_runner",
        "the first man from the bottom is running",
        [("the", "the"), ("first", "first"), ("man", "man"), ("from", "from"),
         ("the", "the"), ("bottom", "bottom"), ("is", "be"), ("running", "run")],
        ["DT", "JJ", "NN", "IN", "DT", "NN", "VBZ", "VBG"],
        [[2, 1, "amod"], [7, 2, "nsubj"], [5, 4, "det"], [2, 5, "nmod"]],
        "(r / run-02~7 :ARG0 (m~2 / man :ord (o / ordinal-entity :value 1~1) "
        ":source (b~5 / bottom)))",
        "POS-rule", 2, "m",
    ),
    rec(
        "sewing_machine",
        "the sewing machine on the table",
        [("the", "the"), ("sewing", "sewing"), ("machine", "machine"), ("on", "on"),
         ("the", "the"), ("table", "table")],
        ["DT", "NN", "NN", "IN", "DT", "NN"],
        [[2, 0, "det"], [2, 1, "compound"], [5, 3, "case"], [2, 5, "nmod"]],
        "(m~2 / machine :ARG1-of (s~1 / sew-01) :location (t~5 / table))",
        "compound-rule", 2, "m",
    ),
    rec(
        "walking_quickly",
        "walking quickly",
        [("walking", "walk"), ("quickly", "quick")],
        ["VBG", "RB"],
        [[0, 1, "advmod"]],
        "(w~0 / walk-01 :manner (q~1 / quick-02))",
        "fallback", None, "w",
    ),
    rec(
        "walk_then_run",
        "walk then run",
        [("walk", "walk"), ("then", "then"), ("run", "run")],
        ["VB", "RB", "VB"],
        [],
        "(a / and :op1 (w~0 / walk-01) :op2 (r~2 / run-02 :time (t~1 / then)))",
        "fallback", None, "w",
    ),
    rec(
        "dog_moving",
        "the dog moving from left to right",
        [("the", "the"), ("dog", "dog"), ("moving", "move"), ("from", "from"),
         ("left", "left"), ("to", "to"), ("right", "right")],
        ["DT", "NN", "VBG", "IN", "NN", "IN", "NN"],
        [[1, 0, "det"], [2, 1, "nsubj"], [2, 4, "obl"], [2, 6, "obl"]],
        "(m / move-01~2 :ARG1 (d~1 / dog) :source (l~4 / left) :destination (r~6 / right))",
        "POS-rule", 1, "d",
    ),
    rec(
        "wash_own_car",
        "a man washing his own car",
        [("a", "a"), ("man", "man"), ("washing", "wash"), ("his", "he"),
         ("own", "own"), ("car", "car")],
        ["DT", "NN", "VBG", "PRP$", "JJ", "NN"],
        [[1, 0, "det"], [2, 1, "nsubj"], [5, 3, "nmod:poss"], [2, 5, "obj"]],
        "(w / wash-01~2 :ARG0 (m~1 / man) :ARG1 (c~5 / car :poss m))",
        "POS-rule", 1, "m",
    ),
    rec(
        "skateboarder",
        "a skateboarder jumping",
        [("a", "a"), ("skateboarder", "skateboarder"), ("jumping", "jump")],
        ["DT", "NN", "VBG"],
        [[1, 0, "det"], [2, 1, "nsubj"]],
        "(j / jump-03~2 :ARG0 (p~1 / person :ARG0-of (s~1 / skateboard-01)))",
        "POS-rule", 1, "s",
    ),
    rec(
        "show_tie",
        "the show starting",
        [("the", "the"), ("show", "show"), ("starting", "start")],
        ["DT", "NN", "VBG"],
        [[1, 0, "det"], [2, 1, "nsubj"]],
        "(s / start-01~2 :ARG1 (sh~1 / show-04 :mod (sh2~1 / show-01)))",
        "POS-rule", 1, "sh",
    ),
    rec(
        "ice_cream_truck",
        "ice cream truck stopping",
        [("ice", "ice"), ("cream", "cream"), ("truck", "truck"), ("stopping", "stop")],
        ["NN", "NN", "NN", "VBG"],
        [[1, 0, "compound"], [2, 1, "compound"], [3, 2, "nsubj"]],
        "(s / stop-01~3 :ARG1 (t~2 / truck :mod (i~0,1 / ice-cream)))",
        "compound-rule", 2, "t",
    ),
    rec(
        "tom_horse",
        "Tom is riding a horse",
        [("Tom", "Tom"), ("is", "be"), ("riding", "ride"), ("a", "a"), ("horse", "horse")],
        ["NNP", "VBZ", "VBG", "DT", "NN"],
        [[2, 0, "nsubj"], [4, 3, "det"], [2, 4, "obj"]],
        '(r / ride-01~2 :ARG0 (p~0 / person :name (n / name :op1 "Tom")) :ARG1 (h~4 / horse))',
        "POS-rule", 0, "p",
    ),
    rec(
        "person_left_jump",
        "the person on the left jumping",
        [("the", "the"), ("person", "person"), ("on", "on"), ("the", "the"),
         ("left", "left"), ("jumping", "jump")],
        ["DT", "NN", "IN", "DT", "NN", "VBG"],
        [[1, 0, "det"], [4, 2, "case"], [1, 4, "nmod"], [5, 1, "nsubj"]],
        "(j / jump-03~5 :ARG0 (p~1 / person :location (l~4 / left)))",
        "POS-rule", 1, "p",
    ),
    rec(
        "cat_jump_left",
        "a cat jumping to the left",
        [("a", "a"), ("cat", "cat"), ("jumping", "jump"), ("to", "to"),
         ("the", "the"), ("left", "left")],
        ["DT", "NN", "VBG", "IN", "DT", "NN"],
        [[1, 0, "det"], [2, 1, "nsubj"], [5, 3, "case"], [2, 5, "obl"]],
        "(j / jump-03~2 :ARG0 (c~1 / cat) :destination (l~5 / left))",
        "POS-rule", 1, "c",
    ),
    rec(
        "walk_then_run_man",
        "the man walking then running",
        [("the", "the"), ("man", "man"), ("walking", "walk"), ("then", "then"),
         ("running", "run")],
        ["DT", "NN", "VBG", "RB", "VBG"],
        [[1, 0, "det"], [2, 1, "nsubj"]],
        "(a / and :op1 (w / walk-01~2 :ARG0 (m~1 / man)) "
        ":op2 (r / run-02~4 :ARG0 m :time (t~3 / then)))",
        "POS-rule", 1, "m",
    ),
    rec(
        "cat_not_moving",
        "the cat not moving",
        [("the", "the"), ("cat", "cat"), ("not", "not"), ("moving", "move")],
        ["DT", "NN", "RB", "VBG"],
        [[1, 0, "det"], [3, 1, "nsubj"], [3, 2, "advmod"]],
        "(m / move-01~3 :polarity -~2 :ARG1 (c~1 / cat))",
        "POS-rule", 1, "c",
    ),
    rec(
        "three_birds",
        "three birds flying",
        [("three", "three"), ("birds", "bird"), ("flying", "fly")],
        ["CD", "NNS", "VBG"],
        [[1, 0, "nummod"], [2, 1, "nsubj"]],
        "(f / fly-01~2 :ARG0 (b~1 / bird :quant 3~0))",
        "POS-rule", 1, "b",
    ),
    rec(
        "girl_umbrella",
        "girl holding an umbrella",
        [("girl", "girl"), ("holding", "hold"), ("an", "a"), ("umbrella", "umbrella")],
        ["NN", "VBG", "DT", "NN"],
        [[1, 0, "nsubj"], [3, 2, "det"], [1, 3, "obj"]],
        "(h / hold-01~e.1 :ARG0 (g~e.0 / girl) :ARG1 (u~e.3 / umbrella))",
        "POS-rule", 0, "g",
    ),
    rec(
        "fire_truck",
        "fire truck arriving",
        [("fire", "fire"), ("truck", "truck"), ("arriving", "arrive")],
        ["NN", "NN", "VBG"],
        [[1, 0, "compound"], [2, 1, "nsubj"]],
        "(a / arrive-01~2 :ARG1 (t~0,1 / fire-truck))",
        "compound-rule", 1, "t",
    ),
    rec(
        "boy_kick_goal",
        "a boy kicking the ball into the goal",
        [("a", "a"), ("boy", "boy"), ("kicking", "kick"), ("the", "the"),
         ("ball", "ball"), ("into", "into"), ("the", "the"), ("goal", "goal")],
        ["DT", "NN", "VBG", "DT", "NN", "IN", "DT", "NN"],
        [[1, 0, "det"], [2, 1, "nsubj"], [4, 3, "det"], [2, 4, "obj"],
         [7, 6, "det"], [2, 7, "obl"]],
        "(k / kick-02~2 :ARG0 (b~1 / boy) :ARG1 (l~4 / ball) :destination (g~7 / goal))",
        "POS-rule", 1, "b",
    ),
    rec(
        "guy_left_dog",
        "a guy on the left walking his dog",
        [("a", "a"), ("guy", "guy"), ("on", "on"), ("the", "the"), ("left", "left"),
         ("walking", "walk"), ("his", "he"), ("dog", "dog")],
        ["DT", "NN", "IN", "DT", "NN", "VBG", "PRP$", "NN"],
        [[1, 0, "det"], [5, 1, "nsubj"], [4, 2, "case"], [1, 4, "nmod"], [5, 7, "obj"]],
        "(w / walk-01~5 :ARG0 (g~1 / guy :location (l~4 / left)) :ARG1 (d~7 / dog :poss g))",
        "POS-rule", 1, "g",
    ),
    rec(
        "horse_fence",
        "the horse jumping over the fence",
        [("the", "the"), ("horse", "horse"), ("jumping", "jump"), ("over", "over"),
         ("the", "the"), ("fence", "fence")],
        ["DT", "NN", "VBG", "IN", "DT", "NN"],
        [[1, 0, "det"], [2, 1, "nsubj"], [5, 4, "det"], [2, 5, "obl"]],
        "(j / jump-03~2 :ARG0 (h~1 / horse) :path (f~5 / fence))",
        "POS-rule", 1, "h",
    ),
    rec(
        "running_fast",
        "running fast",
        [("running", "run"), ("fast", "fast")],
        ["VBG", "RB"],
        [[0, 1, "advmod"]],
        "(r~0 / run-02 :manner (f~1 / fast))",
        "fallback", None, "r",
    ),
    rec(
        "kid_playing",
        "the kid playing",
        [("the", "the"), ("kid", "kid"), ("playing", "play")],
        ["DT", "NN", "VBG"],
        [[1, 0, "det"], [2, 1, "nsubj"]],
        "(p / play-01~2 :ARG0 (k / kid))",
        "POS-rule", 1, "p",
    ),
    rec(
        "coffee_table",
        "coffee table standing",
        [("coffee", "coffee"), ("table", "table"), ("standing", "stand")],
        ["NN", "NN", "VBG"],
        [[1, 0, "compound"], [2, 1, "nsubj"]],
        "(s / stand-01~2 :ARG1 (t~1 / table :mod (c~0 / coffee)))",
        "compound-rule", 1, "t",
    ),
    rec(
        "bird_cleaning",
        "a bird cleaning itself",
        [("a", "a"), ("bird", "bird"), ("cleaning", "clean"), ("itself", "itself")],
        ["DT", "NN", "VBG", "PRP"],
        [[1, 0, "det"], [2, 1, "nsubj"], [2, 3, "obj"]],
        "(c / clean-01~2 :ARG0 (b~1 / bird) :ARG1 b)",
        "POS-rule", 1, "b",
    ),
    rec(
        "woman_bicycle",
        "woman riding a bicycle near the fountain",
        [("woman", "woman"), ("riding", "ride"), ("a", "a"), ("bicycle", "bicycle"),
         ("near", "near"), ("the", "the"), ("fountain", "fountain")],
        ["NN", "VBG", "DT", "NN", "IN", "DT", "NN"],
        [[1, 0, "nsubj"], [3, 2, "det"], [1, 3, "obj"], [6, 5, "det"], [1, 6, "obl"]],
        "(r / ride-01~1 :ARG0 (w~0 / woman) :ARG1 (b~3 / bicycle) "
        ":ARG2 (n~4 / near-02 :ARG1 w :ARG2 (f~6 / fountain)))",
        "POS-rule", 0, "w",
    ),
]


def main() -> int:
    out_path = Path(__file__).resolve().parents[1] / "src/regreason/data/mini_corpus.jsonl"
    out_path.parent.mkdir(parents=True, exist_ok=True)
    lines = []
    for raw in RECORDS:
        line = json.dumps(raw, ensure_ascii=False, separators=(", ", ": "))
        record = parse_record(line)
        graph = parse_penman(record.penman)
        build = build_record(record)
        oracle = raw["oracle"]
        got = (build.choice.rule, build.choice.token_index, build.choice.node_id)
        want = (oracle["rule"], oracle["token_index"], oracle["concept"])
        if got != want:
            print(f"{raw['id']}: selection {got} != oracle {want}", file=sys.stderr)
            return 1
        problems = validate(build.reg)
        if problems:
            print(f"{raw['id']}: invalid REG: {problems}", file=sys.stderr)
            return 1
        if len(build.reg.edges) != len(graph.edges):
            print(f"{raw['id']}: edge count changed", file=sys.stderr)
            return 1
        lines.append(line)
    out_path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    print(f"wrote {len(lines)} records -> {out_path}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
