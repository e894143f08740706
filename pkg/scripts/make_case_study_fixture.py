#!/usr/bin/env python3
"""Generate the aggregate case-study fixture deterministically.

Shape targets:
  611 participants (1 moderator + 610 users), 202 of them active;
  719 posts over days 0-6 with decaying volume [280,180,120,80,40,12,7];
  345 requirement-bearing posts (the candidates), 16 of them non-functional;
  156 feasible candidates (96 expert-authored, 60 ordinary-authored),
  189 infeasible including the high-scoring R3;
  the eight matrix rows R1,R12,R32,R47,R3,R10,R11,R345 with their exact
  ratings embedded in ratings.csv.

Outputs (committed): tests/fixtures/casestudy/{case_study_aggregate.json,
ratings.csv, annotations.json}. Rerunning always reproduces the same bytes.
"""

from __future__ import annotations

import json
import random
from datetime import datetime, timedelta, timezone
from pathlib import Path

OUT_DIR = Path(__file__).resolve().parents[1] / "tests" / "fixtures" / "casestudy"

BASE = datetime(2017, 1, 2, 0, 0, 0, tzinfo=timezone.utc)
POSTS_PER_DAY = [280, 180, 120, 80, 40, 12, 7]  # sums to 719

N_USERS = 610
N_ACTIVE = 202
N_EXPERT = 60  # u001..u060; ordinary users are u061..u610

# Matrix rows: id -> (category, statement, [ratings], feasible)
MATRIX_ROWS = {
    "R1": ("expert", "The app should send early flood warnings to users near the river",
           [4, 6, 3, 5, 3], "yes"),
    "R12": ("expert", "Rescue coordinators must see damage reports on one dashboard",
            [3, 4, 4, 4, 5], "yes"),
    "R32": ("expert", "The system should map open shelters with current capacity",
            [2, 5, 5, 2, 4], "yes"),
    "R47": ("expert", "Field teams must sync offline notes when the network returns",
            [6, 5, 3, 7, 2], "yes"),
    "R3": ("ordinary", "The app should predict earthquakes before they happen",
           [6, 7, 4, 6, 5], "no"),
    "R10": ("ordinary", "Users should see the nearest safe zones on a map in a flood",
            [3, 5, 3, 2, 3], "yes"),
    "R11": ("ordinary", "The app must let me mark myself safe and notify my family",
            [4, 6, 4, 3, 3], "yes"),
    "R345": ("ordinary", "The app should list emergency numbers for every district",
             [5, 3, 4, 5, 3], "yes"),
}

DIMENSIONS = ["Quality", "Effort Required", "User Need", "Technical", "Business"]

NFR_STATEMENTS = [
    "The app should be easy to use for older people",
    "The interface must stay easy to use during a crisis",
    "The app should support the Chinese language",
    "The app must support the Urdu language for local users",
    "Menus should be offered in the local language of each region",
    "The app should offer full localization for every market",
    "Strong security must protect personal location data",
    "The account sign in shall use two factor security",
    "The app must keep high availability during network outages",
    "Servers should guarantee availability even under heavy load",
    "The app should start fast with good performance on old phones",
    "Map rendering performance must stay smooth on cheap devices",
    "Alerts must arrive with high reliability in remote areas",
    "The sync service should focus on reliability over features",
    "Usability matters more than features and should drive design",
    "The onboarding shall be tested for usability with real users",
]

SUBJECTS = ["The app", "The application", "The system"]
MARKER_FORMS = ["should", "must", "needs to", "shall", "should be able to"]
ACTIONS = [
    "send flood warnings to people in the affected valley",
    "show the nearest safe zones on an offline map",
    "track the location of missing people after a quake",
    "broadcast an i am safe notice to chosen contacts",
    "work without any data connectivity in the field",
    "list emergency contacts for every region",
    "guide users with step by step instructions",
    "share shelter locations with rescue crews",
    "alert rescue teams about trapped survivors",
    "collect damage reports with photos and notes",
    "display evacuation routes out of the city",
    "warn about aftershocks within seconds",
    "show storm alerts for coastal districts",
    "let users mark themselves safe with one tap",
    "provide first aid instructions for common injuries",
    "map open hospitals with free beds nearby",
    "store a checklist of emergency supplies",
    "send earthquake alerts before the shaking arrives",
    "notify family members once a user checks in",
    "show flood levels for every river district",
    "bundle donation requests from verified relief groups",
    "log road closures reported by drivers",
    "translate rescue instructions into local dialects",
    "match volunteers with nearby relief tasks",
    "publish water distribution points on the map",
]

CHATTER = [
    "lol nice idea",
    "good point",
    "+1 from me",
    "agreed",
    "interesting thread",
    "thanks for sharing this",
    "same here",
    "this one matters to me",
    "my cousin faced this in 2010",
    "hope this gets built",
    "following this discussion",
    "great conversation everyone",
    "we had the same problem last monsoon",
    "that makes sense",
    "true",
    "nice",
    "very relatable",
    "thinking about this a lot lately",
]

COMMENT_TEXTS = [
    "agreed, this helps",
    "good point",
    "+1",
    "same experience here",
    "this saved us once",
    "strongly in favor",
    "not sure it works in villages",
    "my whole family supports this",
    "thanks for raising it",
    "exactly what happened to us",
]


def user(i: int) -> str:
    return f"u{i:03d}"


def build() -> tuple[dict, str, dict]:
    rng = random.Random(42)

    participants = [{"id": "mod", "display_name": "Moderator", "category": "moderator"}]
    for i in range(1, N_USERS + 1):
        participants.append(
            {
                "id": user(i),
                "display_name": f"User {i}",
                "category": "expert" if i <= N_EXPERT else "ordinary",
            }
        )

    # requirement-bearing statements beyond the 8 matrix rows: 16 NFR + 321 functional
    functional: list[str] = []
    for subject in SUBJECTS:
        for marker in MARKER_FORMS:
            for action in ACTIONS:
                functional.append(f"{subject} {marker} {action}")
    functional = functional[: 345 - len(MATRIX_ROWS) - len(NFR_STATEMENTS)]  # 321

    generated = NFR_STATEMENTS + functional  # 337 statements
    # authorship: 176 expert-authored, 161 ordinary-authored
    gen_specs = []
    for k, statement in enumerate(generated):
        if k < 176:
            author = user(1 + k % N_EXPERT)
            category = "expert"
        else:
            author = user(N_EXPERT + 1 + (k - 176) % (N_ACTIVE - N_EXPERT))
            category = "ordinary"
        gen_specs.append((f"p{k + 1:04d}", author, statement, category))

    matrix_authors = {
        "R1": user(1), "R12": user(2), "R32": user(3), "R47": user(4),
        "R3": user(61), "R10": user(62), "R11": user(63), "R345": user(64),
    }

    post_specs = [
        (rid, matrix_authors[rid], row[1]) for rid, row in MATRIX_ROWS.items()
    ]
    post_specs += [(pid, author, text) for pid, author, text, _ in gen_specs]
    for k in range(719 - len(post_specs)):  # 374 chatter posts
        post_specs.append(
            (f"q{k + 1:04d}", user(1 + k % N_ACTIVE), CHATTER[k % len(CHATTER)])
        )
    assert len(post_specs) == 719

    # shuffle deterministically so candidate posts spread across the week
    rng.shuffle(post_specs)

    day_of_post: list[int] = []
    for day, count in enumerate(POSTS_PER_DAY):
        day_of_post.extend([day] * count)

    posts = []
    for k, (pid, author, text) in enumerate(post_specs):
        day = day_of_post[k]
        created = BASE + timedelta(days=day, hours=8, seconds=60 * k)
        likers = [user(1 + k % N_ACTIVE), user(1 + (k + 7) % N_ACTIVE)]
        commenter = user(1 + (k + 3) % N_ACTIVE)
        comment_liker = user(1 + (k + 11) % N_ACTIVE)
        posts.append(
            {
                "id": pid,
                "author_id": author,
                "created_at": iso(created),
                "text": text,
                "likes": likers,
                "comments": [
                    {
                        "id": f"c{k + 1:04d}",
                        "author_id": commenter,
                        "created_at": iso(created + timedelta(minutes=30)),
                        "text": COMMENT_TEXTS[k % len(COMMENT_TEXTS)],
                        "likes": [comment_liker],
                    }
                ],
            }
        )

    export = {
        "room_title": "Disaster management app: what do you need?",
        "topic_statement": "disaster management mobile app for rescue and safety",
        "visibility": "private",
        "created_at": iso(BASE),
        "participants": participants,
        "posts": posts,
    }

    # ratings: matrix rows exact; generated rows random with score >= 0
    lines = ["candidate_id," + ",".join(DIMENSIONS)]
    for rid, row in MATRIX_ROWS.items():
        lines.append(rid + "," + ",".join(str(r) for r in row[2]))
    for pid, _, _, _ in gen_specs:
        values = [rng.randint(3, 9) for _ in range(3)]
        risks = [rng.randint(0, 5) for _ in range(2)]
        lines.append(pid + "," + ",".join(str(r) for r in values + risks))
    ratings_csv = "\n".join(lines) + "\n"

    # feasibility: 96 expert (4 matrix + first 92 generated expert-authored),
    # 60 ordinary (3 matrix + first 57 generated ordinary-authored)
    annotations: dict[str, dict] = {}
    for rid, row in MATRIX_ROWS.items():
        annotations[rid] = {"feasible": row[3]}
    expert_seen = ordinary_seen = 0
    for pid, _, _, category in gen_specs:
        if category == "expert":
            feasible = "yes" if expert_seen < 92 else "no"
            expert_seen += 1
        else:
            feasible = "yes" if ordinary_seen < 57 else "no"
            ordinary_seen += 1
        annotations[pid] = {"feasible": feasible}

    return export, ratings_csv, annotations


def iso(ts: datetime) -> str:
    return ts.isoformat().replace("+00:00", "Z")


def main() -> None:
    export, ratings_csv, annotations = build()
    OUT_DIR.mkdir(parents=True, exist_ok=True)
    (OUT_DIR / "case_study_aggregate.json").write_text(
        json.dumps(export, indent=1, ensure_ascii=False) + "\n", "utf-8"
    )
    (OUT_DIR / "ratings.csv").write_text(ratings_csv, "utf-8")
    (OUT_DIR / "annotations.json").write_text(
        json.dumps(annotations, indent=1, sort_keys=True) + "\n", "utf-8"
    )
    print(f"wrote fixture to {OUT_DIR}")
    print(f"participants={len(export['participants'])} posts={len(export['posts'])}")


if __name__ == "__main__":
    main()
