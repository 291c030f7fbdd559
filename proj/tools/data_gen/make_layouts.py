"""Writes the bundled kitchen layouts into data/layouts.

Layouts are generated from fixed seeds so the files are reproducible:
counter runs along the walls carrying the sink, stove, fridge and storage,
plus one or two islands. Every fixture must touch the single free region.
"""
import json
import pathlib
import random
from collections import deque

SPAWNS = [
    {"class": "Mug", "count": 1, "in": ["Cabinet", "CounterTop", "Drawer"]},
    {"class": "Plate", "count": 1, "in": ["Cabinet", "CounterTop"]},
    {"class": "Bowl", "count": 1, "in": ["Cabinet", "CounterTop"]},
    {"class": "Pot", "count": 1, "in": ["StoveBurner", "CounterTop", "Cabinet"]},
    {"class": "Pan", "count": 1, "in": ["StoveBurner", "CounterTop", "Cabinet"]},
    {"class": "Apple", "count": 1, "in": ["CounterTop", "Fridge"]},
    {"class": "Tomato", "count": 1, "in": ["CounterTop", "Fridge"]},
    {"class": "Potato", "count": 1, "in": ["CounterTop", "Cabinet"]},
    {"class": "Bread", "count": 1, "in": ["CounterTop", "Cabinet"]},
    {"class": "Egg", "count": 1, "in": ["Fridge", "CounterTop"]},
    {"class": "Knife", "count": 1, "in": ["Drawer", "CounterTop"]},
    {"class": "Spoon", "count": 1, "in": ["Drawer", "CounterTop"]},
]

# Wall-side groups, each a left-to-right glyph string placed along a wall.
GROUPS = ["SF", "BKBK", "R", "M", "DD", "AA", "AA", "G"]

NAMES = [f"kitchen_{i:02d}" for i in range(1, 9)]


def neighbours(x, y):
    return ((x + 1, y), (x - 1, y), (x, y + 1), (x, y - 1))


def wall_slots(w, h):
    """Interior ring cells in clockwise order with the wall side they touch."""
    slots = []
    for x in range(1, w - 1):
        slots.append((x, 1))
    for y in range(2, h - 1):
        slots.append((w - 2, y))
    for x in range(w - 3, 0, -1):
        slots.append((x, h - 2))
    for y in range(h - 3, 1, -1):
        slots.append((1, y))
    return slots


def valid(grid):
    h, w = len(grid), len(grid[0])
    free = [(x, y) for y in range(h) for x in range(w) if grid[y][x] == "."]
    if not free:
        return False
    seen = {free[0]}
    queue = deque([free[0]])
    while queue:
        c = queue.popleft()
        for n in neighbours(*c):
            if n not in seen and grid[n[1]][n[0]] == ".":
                seen.add(n)
                queue.append(n)
    if len(seen) != len(free):
        return False
    for y in range(h):
        for x in range(w):
            if grid[y][x] in "#.":
                continue
            if not any(grid[ny][nx] == "." for nx, ny in neighbours(x, y)):
                return False
    return True


def generate(seed):
    rng = random.Random(seed)
    while True:
        w = rng.randint(26, 30)
        h = rng.randint(17, 20)
        grid = [["#"] * w] + [["#"] + ["."] * (w - 2) + ["#"] for _ in range(h - 2)] + [["#"] * w]
        slots = wall_slots(w, h)
        n = len(slots)
        occupied = [False] * n
        groups = GROUPS[:]
        rng.shuffle(groups)
        ok = True
        for g in groups:
            placed = False
            for _ in range(200):
                start = rng.randrange(n)
                span = [(start + k) % n for k in range(len(g) + 2)]
                if any(occupied[i] for i in span):
                    continue
                cells = [slots[i] for i in span[1:-1]]
                # Keep the group on one wall so pairs stay adjacent.
                if len({c[0] for c in cells}) > 1 and len({c[1] for c in cells}) > 1:
                    continue
                for ch, (x, y) in zip(g, cells):
                    grid[y][x] = ch
                for i in span[1:-1]:
                    occupied[i] = True
                placed = True
                break
            if not placed:
                ok = False
                break
        if not ok:
            continue
        # Counter runs fill part of the remaining ring.
        for i, (x, y) in enumerate(slots):
            if not occupied[i] and rng.random() < 0.45:
                grid[y][x] = "C"
        for _ in range(rng.randint(1, 2)):
            iw, ih = rng.randint(3, 5), rng.randint(1, 2)
            ix, iy = rng.randint(5, w - iw - 5), rng.randint(5, h - ih - 5)
            for yy in range(iy, iy + ih):
                for xx in range(ix, ix + iw):
                    grid[yy][xx] = "C"
            grid[iy][ix] = rng.choice("CDA")
        rows = ["".join(r) for r in grid]
        if valid(rows):
            return rows


def main() -> None:
    out = pathlib.Path(__file__).resolve().parents[2] / "data" / "layouts"
    out.mkdir(parents=True, exist_ok=True)
    for old in out.glob("kitchen_*.json"):
        old.unlink()
    for i, name in enumerate(NAMES):
        grid = generate(1000 + i)
        doc = {"schema": "actctx.layout/1", "name": name, "grid": grid, "spawns": SPAWNS}
        (out / f"{name}.json").write_text(json.dumps(doc, indent=1) + "\n")


if __name__ == "__main__":
    main()
