"""Deterministic synthetic dataset in MovieLens-100k file format.

Produces ``u.item`` / ``u.user`` / ``u.data`` (pipe- and tab-separated,
Latin-1) at the classic scale: 943 users, 1682 movies, 100,000 ratings.
The generator plants recoverable structure — users belong to genre taste
clusters, titles share per-genre vocabulary, popularity is long-tailed —
so collaborative and content-based recommenders have real signal, while
staying drop-in compatible with tooling that reads the original layout.
"""

from __future__ import annotations

import argparse
import random
from pathlib import Path

GENRE_COLUMNS = [
    "unknown", "Action", "Adventure", "Animation", "Children's", "Comedy",
    "Crime", "Documentary", "Drama", "Fantasy", "Film-Noir", "Horror",
    "Musical", "Mystery", "Romance", "Sci-Fi", "Thriller", "War", "Western",
]

CLUSTER_GENRES = ["Action", "Comedy", "Drama", "Horror", "Romance", "Sci-Fi", "Thriller", "Western"]

TITLE_WORDS = {
    "Action": ["Steel", "Strike", "Fury", "Commando", "Blaze", "Bullet", "Siege",
               "Rampage", "Vendetta", "Firestorm", "Warpath", "Havoc"],
    "Comedy": ["Goofy", "Holiday", "Wedding", "Neighbor", "Mischief", "Bachelor",
               "Slapstick", "Caper", "Prank", "Circus", "Pudding", "Banana"],
    "Drama": ["Silence", "Winter", "Letters", "Orchard", "Sorrow", "Legacy",
              "Harbor", "Testament", "Mercy", "Elegy", "Thaw", "Vigil"],
    "Horror": ["Blood", "Scream", "Haunted", "Crypt", "Nightmare", "Shadows",
               "Graveyard", "Demon", "Lantern", "Ritual", "Seance", "Howling"],
    "Romance": ["Hearts", "Paris", "Moonlight", "Serenade", "Embrace", "Promise",
                "Roses", "Waltz", "Devotion", "Amour", "Postcard", "Courtship"],
    "Sci-Fi": ["Galaxy", "Android", "Nebula", "Quantum", "Starship", "Cyborg",
               "Orbit", "Plasma", "Asteroid", "Warp", "Ion", "Terraform"],
    "Thriller": ["Witness", "Conspiracy", "Cipher", "Hostage", "Midnight", "Pursuit",
                 "Alibi", "Informant", "Blackout", "Decoy", "Manhunt", "Fallguy"],
    "Western": ["Prairie", "Outlaw", "Saloon", "Canyon", "Sheriff", "Gunsmoke",
                "Frontier", "Mustang", "Bounty", "Tumbleweed", "Spurs", "Rawhide"],
}

OCCUPATIONS = [
    "administrator", "artist", "doctor", "educator", "engineer", "entertainment",
    "executive", "healthcare", "homemaker", "lawyer", "librarian", "marketing",
    "none", "other", "programmer", "retired", "salesman", "scientist", "student",
    "technician", "writer",
]

MONTHS = ["Jan", "Feb", "Mar", "Apr", "May", "Jun", "Jul", "Aug", "Sep", "Oct", "Nov", "Dec"]

BASE_EPOCH = 874_000_000  # autumn 1997, matching the classic collection window


def _title(rng: random.Random, genre: str, year: int) -> str:
    words = TITLE_WORDS[genre]
    pattern = rng.randrange(4)
    if pattern == 0:
        body = f"{rng.choice(words)} {rng.choice(words)}"
    elif pattern == 1:
        body = f"The {rng.choice(words)} {rng.choice(words)}"
    elif pattern == 2:
        body = f"{rng.choice(words)} of the {rng.choice(words)}"
    else:
        body = rng.choice(words)
    if rng.random() < 0.06:
        body += " II"
    return f"{body} ({year})"


def generate(
    out_dir: Path,
    seed: int = 7,
    n_users: int = 943,
    n_items: int = 1682,
    n_events: int = 100_000,
) -> dict:
    """Write u.item / u.user / u.data into out_dir; returns summary counts."""
    rng = random.Random(seed)
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)

    # --- items ------------------------------------------------------------
    clusters = {genre: [] for genre in CLUSTER_GENRES}
    item_lines = []
    item_genre = {}
    item_quality = {}
    for item_id in range(1, n_items + 1):
        genre = rng.choice(CLUSTER_GENRES)
        year = rng.randint(1990, 1997)
        title = _title(rng, genre, year)
        flags = {genre}
        if rng.random() < 0.25:
            flags.add(rng.choice(GENRE_COLUMNS[1:]))
        flag_row = "|".join("1" if g in flags else "0" for g in GENRE_COLUMNS)
        release = f"{rng.randint(1, 28):02d}-{rng.choice(MONTHS)}-{year}"
        url = f"http://films.example/{item_id}"
        item_lines.append(f"{item_id}|{title}|{release}||{url}|{flag_row}")
        clusters[genre].append(item_id)
        item_genre[item_id] = genre
        # popularity/quality weight, long-tailed
        item_quality[item_id] = rng.paretovariate(1.6)
    (out_dir / "u.item").write_bytes(("\n".join(item_lines) + "\n").encode("latin-1"))

    # --- users -------------------------------------------------------------
    user_lines = []
    user_primary = {}
    user_secondary = {}
    for user_id in range(1, n_users + 1):
        age = rng.randint(16, 70)
        gender = rng.choice("MF")
        occupation = rng.choice(OCCUPATIONS)
        zipcode = f"{rng.randint(10000, 99999)}"
        user_lines.append(f"{user_id}|{age}|{gender}|{occupation}|{zipcode}")
        primary = rng.choice(CLUSTER_GENRES)
        secondary = rng.choice([g for g in CLUSTER_GENRES if g != primary])
        user_primary[user_id] = primary
        user_secondary[user_id] = secondary
    (out_dir / "u.user").write_bytes(("\n".join(user_lines) + "\n").encode("latin-1"))

    # --- ratings -------------------------------------------------------------
    cap = n_items
    floor = min(20, max(1, n_events // n_users // 2), cap)
    if not floor * n_users <= n_events <= cap * n_users:
        raise ValueError("n_events not satisfiable for these user/item counts")
    activity = [rng.lognormvariate(0.0, 0.7) for _ in range(n_users)]
    total_activity = sum(activity)
    counts = [
        min(cap, max(floor, int(round(a / total_activity * n_events)))) for a in activity
    ]
    # redistribute until the event total is exact
    overshoot = sum(counts) - n_events
    idx = 0
    order = sorted(range(n_users), key=lambda i: -counts[i])
    while overshoot != 0:
        i = order[idx % n_users]
        if overshoot > 0 and counts[i] > floor:
            counts[i] -= 1
            overshoot -= 1
        elif overshoot < 0 and counts[i] < cap:
            counts[i] += 1
            overshoot += 1
        idx += 1

    cluster_weights = {
        genre: [item_quality[i] for i in items] for genre, items in clusters.items()
    }
    all_items = list(range(1, n_items + 1))
    all_weights = [item_quality[i] for i in all_items]

    data_lines = []
    for user_index, user_id in enumerate(range(1, n_users + 1)):
        n_ratings = counts[user_index]
        rated = set()
        timestamp = BASE_EPOCH + rng.randint(0, 300) * 86_400
        primary, secondary = user_primary[user_id], user_secondary[user_id]
        for _ in range(n_ratings):
            roll = rng.random()
            if roll < 0.72:
                genre = primary
            elif roll < 0.90:
                genre = secondary
            else:
                genre = rng.choice(CLUSTER_GENRES)
            item = None
            for _attempt in range(6):
                candidate = rng.choices(clusters[genre], cluster_weights[genre])[0]
                if candidate not in rated:
                    item = candidate
                    break
            if item is None:
                for _attempt in range(40):
                    candidate = rng.choices(all_items, all_weights)[0]
                    if candidate not in rated:
                        item = candidate
                        break
                else:
                    candidate = rng.choice([i for i in all_items if i not in rated])
                    item = candidate
            rated.add(item)
            match = item_genre[item]
            if match == primary:
                base = 4.1
            elif match == secondary:
                base = 3.4
            else:
                base = 2.2
            quality_bias = min(1.0, item_quality[item] / 8.0)
            rating = base + quality_bias + rng.gauss(0.0, 0.7)
            rating = int(min(5, max(1, round(rating))))
            timestamp += rng.randint(120, 3 * 86_400)
            data_lines.append(f"{user_id}\t{item}\t{rating}\t{timestamp}")
    (out_dir / "u.data").write_bytes(("\n".join(data_lines) + "\n").encode("latin-1"))

    return {"users": n_users, "items": n_items, "events": len(data_lines), "seed": seed}


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="uptrendz-datagen",
        description="Generate a synthetic dataset in MovieLens-100k file format.",
    )
    parser.add_argument("--out", type=Path, required=True)
    parser.add_argument("--seed", type=int, default=7)
    parser.add_argument("--users", type=int, default=943)
    parser.add_argument("--items", type=int, default=1682)
    parser.add_argument("--events", type=int, default=100_000)
    args = parser.parse_args(argv)
    summary = generate(args.out, args.seed, args.users, args.items, args.events)
    print(summary)
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
