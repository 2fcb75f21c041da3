#!/usr/bin/env python3
"""Build the bundled stage-record data files.

Each four-stage trial row is stored as (category, sentence, n) where n is the
number of leading passing stages (records are monotone); classroom rows carry
explicit A/B flags. The script verifies every aggregate cell against the
published summary tables before writing anything.
"""

from __future__ import annotations

import json
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "src"))

OUT = Path(__file__).resolve().parents[1] / "src" / "langnav" / "data" / "records"

G, S, R, C = "Generic", "Specific", "Relational", "Contextual"

THEATER = [
    (G, "Drive to the helmet", 4),
    (G, "Navigate to the mop", 4),
    (G, "Go to the vacuum", 1),
    (G, "Walk to the table", 4),
    (G, "Go to the fire extinguisher", 4),
    (G, "Walk to the saw", 1),
    (S, "Go to the red backpack", 4),
    (S, "Move to the orange bucket", 4),
    (S, "Drive to the chair on the right", 3),
    (S, "Walk to the white fan", 4),
    (S, "Navigate to the black fan", 4),
    (S, "Navigate to the black speaker", 4),
    (S, "Run to the red bag", 2),
    (S, "Move to the black chair infront of you", 4),
    (S, "Walk to the blue chair", 4),
    (R, "Go to the chair with the black backpack on it", 4),
    (R, "Go to the chair with the helmet on it", 4),
    (R, "Go to the backpack next to the chair", 1),
    (R, "Go to the backpack infront of the ladder", 4),
    (R, "Run to the person on the ladder", 4),
    (R, "Drive to the man sitting on the table", 4),
    (R, "Go to the third chair from the left", 4),
    (C, "Go to something that can carry water", 4),
    (C, "Navigate to the somethings that can wash the floor", 0),
    (C, "My floor is dirty. Go to something that can fix it", 0),
    (C, "Go somewhere that I throw something in", 4),
    (C, "Walk to something that put out the fire", 1),
    (C, "Go to something that can cool me down", 1),
    (C, "Go to something white that can cool me down", 0),
    (C, "I am in the mood to listen to music. Go to something that can do that", 1),
]

LOBBY = [
    (G, "Run to the trash bag", 4),
    (G, "Navigate to the water fountain", 1),
    (G, "Drive to the broom", 4),
    (G, "Walk to monitor", 2),
    (S, "Walk to the tiny monitor", 0),
    (S, "Walk to the smallest monitor", 4),
    (R, "Walk to the right most cone", 4),
    (R, "Walk to the table with the can on it", 1),
    (R, "Walk to the table next to the red backpack", 4),
    (R, "Go the blue chair with the backpack on it", 4),
    (R, "Walk to the leftmost table", 1),
    (R, "Go to backpack closest to the shoe", 4),
    (R, "Walk to shoe next to the red backpack", 4),
    (R, "Remove the trash from the floor", 0),
    (R, "Walk to the table with the monitor", 0),
    (R, "Drive to the closest monitor to the table", 4),
    (R, "Go to the table with the bottle on it", 0),
    (R, "Go to the bottle on top of the table", 4),
    (R, "Go to the TV closest to the person", 4),
    (R, "Go to the person wearing a blue shirt", 1),
    (R, "Run to to the chair with the blue coat", 1),
    (R, "Move to the backpack on the chair", 0),
    (R, "Move to the black backpack on the chair", 0),
    (R, "Drive to the chair with the backpack on it that is not red", 0),
    (C, "Find something that can help firefighters", 4),
    (C, "Go to something that can clean the dirty floor", 0),
    (C, "I am thirsty. Walk to somewhere this can be fixed", 0),
    (C, "Go to a place where I can watch a movie", 4),
    (C, "Drive to a place where I can watch a video", 0),
]

OUTDOOR = [
    (G, "Wander to fire hydrant", 4),
    (G, "Step towards the grill", 1),
    (G, "Walk to the skateboard", 4),
    (G, "Walk to the bike", 2),
    (G, "Walk to the bike", 4),
    (G, "Go to bike rack", 4),
    (G, "Go to the sign", 2),
    (G, "Go to the bench", 4),
    (S, "Sashay to the stop sign", 4),
    (S, "Go to the basketball hoop", 4),
    (S, "Roam towards the blue car", 4),
    (S, "Trot towards the red bag", 4),
    (S, "Go to the red object generically", 0),
    (R, "Proceed to the middle cone", 4),
    (R, "Journey to the tree next to the backpack", 0),
    (R, "Trek to the backpack by the tree", 4),
    (C, "A firefighter needs water. Walk to a source of water", 1),
    (C, "Head towards something that can help firefighters", 4),
    (C, "You are a dog that needs to mark its territory. Go to a place that can do this", 4),
    (C, "You are carrying trash, Find somewhere to dump", 4),
    (C, "Find me something to do a kick flip on", 4),
    (C, "I want to shoot some hoops. Take me there", 0),
    (C, "Move to a faster mode of transportation", 4),
    (C, "Head to the fastest mode of transportation", 4),
]

COURTYARD = [
    (G, "Run to the door", 4),
    (G, "Run towards the backpack", 4),
    (G, "Drive to the wagon", 4),
    (G, "Navigate to the stairs", 4),
    (S, "Proceed towards the garbage can on the right", 4),
    (S, "Stroll to the recycle bin on the left", 2),
    (S, "Sprint to the picnic table", 4),
    (R, "Go to the bench with water container", 4),
    (R, "Walk to the bench with nothing on it", 4),
    (R, "Proceed to the bench with most objects on it", 0),
    (R, "Move towards the backpack farthest from the bench", 1),
    (R, "Head towards the middle cone", 0),
    (R, "Head towards to middle cone in the row of cones", 4),
    (R, "Go to the table with only 1 chair", 0),
    (R, "Go to the table with only 1 chair. There are multiple groups of chairs multiple tables", 4),
    (R, "Step towards the column closest to the cart", 4),
    (R, "Move to the largest group of benches", 4),
    (R, "Walk towards the table with the umbrella", 0),
    (R, "Walk towards the table with the umbrella", 4),
    (R, "Drive to the table without any chairs", 4),
    (R, "Walk to black table with 6 chairs", 0),
    (R, "Walk to the table with most chairs", 4),
    (R, "Navigate to the table with the backpack", 0),
    (C, "Go to nearest entrance to the building", 0),
    (C, "Go to something that you would hold open for someone elderly", 1),
    (C, "Go to something that will make it easy to carry heavy luggage", 1),
    (C, "Go to somewhere I can eat my lunch", 1),
    (C, "Go up to the second floor", 0),
    (C, "Go find something to climb", 0),
    (C, "Run upstairs", 4),
    (C, "Find me somewhere to park my bike", 4),
]

CLASSROOM = [
    (G, "Go to the backpack", True, True),
    (G, "Move towards the backpack", True, True),
    (G, "Drive to the backpack", True, True),
    (G, "Run towards the backpack", True, True),
    (G, "Go to the cone", True, True),
    (G, "Go to conical traffic delineator", True, True),
    (G, "Go to the trash can", True, True),
    (G, "Walk to the whiteboard", True, True),
    (G, "Proceed to the broom", True, True),
    (G, "Trek towards the wagon", True, True),
    (G, "Find paper towels", True, True),
    (G, "Go to the outlet", True, True),
    (S, "Go to the red backpack", True, True),
    (S, "Go to the black backpack", True, True),
    (S, "Navigate to the backpack on the left", True, True),
    (S, "Drive to the backpack on the right", True, True),
    (S, "Go to the whiteboard in front of you", True, True),
    (S, "Move to the whiteboard on your right", True, True),
    (S, "Move to the whiteboard on the right", True, False),
    (S, "Go to the backpack on your right", True, True),
    (S, "Walk to the backpack on the left", True, False),
    (S, "Go to the leftmost backpack on the right", True, False),
    (S, "Go to the orange cone on your right", False, True),
    (S, "Go to the middle outlet", True, False),
    (R, "Go to backpack to the right of the red backpack", True, True),
    (R, "Drive to the backpack that is to the left of the black backpack", True, False),
    (R, "Walk to the bag that is next to the black bag", False, False),
    (R, "Move towards the backpack under the whiteboard", True, True),
    (R, "Walk to the backpack on the chair", True, True),
    (R, "Go to the chair with the backpack", True, False),
    (R, "Walk to the backpack on top of the chair", True, False),
    (R, "Run to the rightmost backpack", True, True),
    (R, "Walk to the leftmost backpack", True, True),
    (R, "Go to the middle chair", True, False),
    (R, "Go to the leftmost backpack on your right", False, True),
    (R, "Go to the middle chair in the row of chairs", True, True),
    (R, "Go to the backpack to the left of the cone", True, False),
    (R, "Go the cone to the left of the backpack", True, True),
    (R, "Go to the second chair from the left", True, False),
    (C, "Go to somewhere I can sit down", True, True),
    (C, "Find a place for me to rest", True, False),
    (C, "Go to somewhere I can speak from", True, False),
    (C, "Find a place to store cleaning supplies", True, False),
    (C, "Find me something to write on", True, True),
    (C, "My friend has question. Go to somewhere you can explain the answer to him", False, False),
    (C, "I spilled a lot of sand. Find me something to pick up my mess", True, True),
    (C, "Walk to something I can put my laptop in", False, False),
    (C, "I spilled water. Find me something to clean this up", True, False),
    (C, "Go to somewhere I can google something", True, True),
    (C, "Go to somewhere I can charge my phone", True, True),
]

EXPECTED_CATEGORY = {  # count, code, od, wp, path_exec
    "Generic": (22, "100", "81.82", "68.18", "68.18"),
    "Specific": (19, "89.47", "89.47", "78.95", "73.68"),
    "Relational": (44, "70.45", "56.82", "56.82", "56.82"),
    "Contextual": (29, "65.52", "41.38", "41.38", "41.38"),
    "Total": (114, "78.07", "63.16", "58.77", "57.89"),
}
EXPECTED_SCENE = {
    "theater": (30, "90", "70", "66.67", "63.33"),
    "lobby": (29, "65.52", "48.28", "44.83", "44.83"),
    "outdoor": (24, "87.5", "79.17", "70.83", "70.83"),
    "courtyard": (31, "70.97", "58.06", "54.84", "54.84"),
    "Total": (114, "78.07", "63.16", "58.77", "57.89"),
}
EXPECTED_CLASSROOM = {
    "Generic": (12, "100", "100"),
    "Specific": (12, "91.67", "66.67"),
    "Relational": (15, "86.67", "53.33"),
    "Contextual": (11, "81.82", "45.45"),
    "Total": (50, "90", "66"),
}


def stage_records():
    rows = []
    for scene, table in (
        ("theater", THEATER),
        ("lobby", LOBBY),
        ("outdoor", OUTDOOR),
        ("courtyard", COURTYARD),
    ):
        for category, sentence, n in table:
            rows.append(
                {
                    "scene": scene,
                    "category": category,
                    "sentence": sentence,
                    "stages": {
                        "code": n >= 1,
                        "od": n >= 2,
                        "wp": n >= 3,
                        "path_exec": n >= 4,
                    },
                }
            )
    return rows


def classroom_records():
    return [
        {"scene": "classroom", "category": cat, "sentence": s, "a": a, "b": b}
        for cat, s, a, b in CLASSROOM
    ]


def verify():
    from langnav.evalharness import StageRecord, aggregate

    recs = [
        StageRecord(
            scene=r["scene"],
            category=r["category"],
            sentence=r["sentence"],
            stages=tuple(r["stages"][k] for k in ("code", "od", "wp", "path_exec")),
        )
        for r in stage_records()
    ]
    by_cat = aggregate(recs, "category")
    for group, (count, *cells) in EXPECTED_CATEGORY.items():
        row = by_cat.row(group)
        assert row.count == count, (group, row.count, count)
        for col, cell in zip(by_cat.columns, cells):
            got = by_cat.cell(group, col)
            assert got == cell, (group, col, got, cell)
    by_scene = aggregate(recs, "scene")
    for group, (count, *cells) in EXPECTED_SCENE.items():
        row = by_scene.row(group)
        assert row.count == count, (group, row.count, count)
        for col, cell in zip(by_scene.columns, cells):
            got = by_scene.cell(group, col)
            assert got == cell, (group, col, got, cell)

    ab = [
        StageRecord(
            scene="classroom",
            category=r["category"],
            sentence=r["sentence"],
            stages=(r["a"], r["b"]),
            kind="ab",
        )
        for r in classroom_records()
    ]
    ab_table = aggregate(ab, "category")
    for group, (count, a_cell, b_cell) in EXPECTED_CLASSROOM.items():
        row = ab_table.row(group)
        assert row.count == count, (group, row.count, count)
        assert ab_table.cell(group, "a") == a_cell, (group, "a")
        assert ab_table.cell(group, "b") == b_cell, (group, "b")
    print("all aggregate cells verified")


def main():
    verify()
    OUT.mkdir(parents=True, exist_ok=True)
    (OUT / "appendix_stage_records.json").write_text(
        json.dumps(stage_records(), indent=2) + "\n"
    )
    (OUT / "classroom_ab_records.json").write_text(
        json.dumps(classroom_records(), indent=2) + "\n"
    )
    print(f"wrote {OUT / 'appendix_stage_records.json'} ({len(stage_records())} records)")
    print(f"wrote {OUT / 'classroom_ab_records.json'} ({len(classroom_records())} records)")


if __name__ == "__main__":
    main()
