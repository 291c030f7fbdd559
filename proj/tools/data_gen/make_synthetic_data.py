"""Writes the synthetic egocentric-kitchen activity spec and the word-vector
files used to map its vocabulary onto the simulator classes.

The vectors are synthetic stand-ins for pretrained word embeddings: every
concept gets a random direction, names of the same concept share it up to
small noise, so related names land well above the 0.6 cosine threshold and
unrelated ones near zero.
"""
import json
import pathlib

import numpy as np

ROOT = pathlib.Path(__file__).resolve().parents[2] / "data"

VIDEO_MOVABLE = ["cup", "mug", "plate", "bowl", "pan", "pot", "saucepan", "knife", "spoon", "sponge",
                 "board", "kettle", "spatula", "lid", "apple", "tomato", "potato", "bread", "egg",
                 "onion", "milk"]
VIDEO_FIXED = ["tap", "sink", "counter", "hob", "knob", "fridge", "drawer", "cupboard", "bin",
               "microwave"]


def act(name, objects, bystanders=(), clips=None):
    a = {"name": name, "objects": [{"class": c, "p": p} for c, p in objects]}
    if bystanders:
        a["bystanders"] = list(bystanders)
    if clips is not None:
        a["clips"] = clips
    return a


ACTIVITIES = [
    act("wash_cup", [("cup", 0.95), ("tap", 0.6), ("sink", 0.7), ("sponge", 0.5)], ["plate", "counter"]),
    act("wash_mug", [("mug", 0.95), ("tap", 0.6), ("sink", 0.7), ("sponge", 0.4)], ["counter"]),
    act("wash_plate", [("plate", 0.95), ("tap", 0.55), ("sink", 0.75), ("sponge", 0.6)], ["cup"]),
    act("wash_bowl", [("bowl", 0.95), ("tap", 0.6), ("sink", 0.7), ("sponge", 0.5)], ["counter"]),
    act("wash_pan", [("pan", 0.95), ("tap", 0.5), ("sink", 0.8), ("sponge", 0.6)], ["hob"]),
    act("wash_knife", [("knife", 0.95), ("tap", 0.6), ("sink", 0.6), ("sponge", 0.4)], ["board"]),
    act("wash_spoon", [("spoon", 0.95), ("tap", 0.6), ("sink", 0.6)], ["bowl"]),
    act("rinse_hands", [("tap", 0.9), ("sink", 0.6)], ["counter"]),
    act("fill_pot", [("pot", 0.95), ("tap", 0.8), ("sink", 0.5)], ["hob"]),
    act("fill_kettle", [("kettle", 0.95), ("tap", 0.8), ("sink", 0.4)], ["cup"]),
    act("make_tea", [("cup", 0.9), ("kettle", 0.7), ("spoon", 0.5), ("counter", 0.5)], ["milk"]),
    act("store_food", [("fridge", 0.85), ("tomato", 0.5), ("egg", 0.5), ("apple", 0.4), ("milk", 0.5)]),
    act("take_from_fridge", [("fridge", 0.8), ("milk", 0.6), ("egg", 0.4), ("bread", 0.2)]),
    act("open_fridge", [("fridge", 0.95)], ["counter"]),
    act("cool_drink", [("mug", 0.8), ("cup", 0.5), ("fridge", 0.8)], ["counter"]),
    act("chop_tomato", [("knife", 0.9), ("tomato", 0.9), ("board", 0.8)], ["counter"]),
    act("chop_potato", [("knife", 0.9), ("potato", 0.9), ("board", 0.7)], ["pot"]),
    act("slice_bread", [("knife", 0.9), ("bread", 0.9), ("board", 0.6)], ["plate"]),
    act("cut_apple", [("knife", 0.9), ("apple", 0.9), ("board", 0.5)], ["bowl"]),
    act("chop_onion", [("knife", 0.9), ("onion", 0.9), ("board", 0.8)], ["pan"]),
    act("fry_egg", [("pan", 0.9), ("hob", 0.6), ("egg", 0.6), ("spatula", 0.6), ("knob", 0.3)]),
    act("boil_potato", [("pot", 0.9), ("hob", 0.7), ("potato", 0.6), ("knob", 0.3), ("lid", 0.4)]),
    act("stew_tomato", [("saucepan", 0.9), ("hob", 0.6), ("tomato", 0.6), ("spoon", 0.4)]),
    act("turn_on_hob", [("knob", 0.9), ("hob", 0.5)], ["pan"]),
    act("heat_bowl", [("bowl", 0.9), ("microwave", 0.8)], ["counter"]),
    act("heat_plate", [("plate", 0.9), ("microwave", 0.7)], ["counter"]),
    act("put_away_dishes", [("plate", 0.7), ("bowl", 0.5), ("cupboard", 0.8)], ["counter"]),
    act("put_away_cups", [("cup", 0.7), ("mug", 0.5), ("cupboard", 0.8)]),
    act("take_pan", [("pan", 0.9), ("pot", 0.4), ("cupboard", 0.7)]),
    act("put_away_cutlery", [("knife", 0.6), ("spoon", 0.7), ("drawer", 0.8)]),
    act("open_drawer", [("drawer", 0.95)]),
    act("throw_peel", [("potato", 0.5), ("apple", 0.3), ("onion", 0.4), ("bin", 0.8)], ["knife"]),
    act("throw_shell", [("egg", 0.8), ("bin", 0.8)], ["pan"]),
    act("throw_bread", [("bread", 0.8), ("bin", 0.7)], ["plate"]),
    act("prep_veg", [("potato", 0.6), ("tomato", 0.6), ("pot", 0.6), ("counter", 0.5)]),
    act("serve", [("plate", 0.8), ("bread", 0.5), ("egg", 0.4), ("counter", 0.6)], ["pan"]),
    act("wipe_counter", [("sponge", 0.9), ("counter", 0.9)], ["tap"]),
]

# Concept -> names in the video and environment vocabularies.
CONCEPTS = {
    "cup": (["cup", "mug"], ["Mug"]),
    "plate": (["plate"], ["Plate"]),
    "bowl": (["bowl"], ["Bowl"]),
    "pan": (["pan"], ["Pan"]),
    "pot": (["pot", "saucepan"], ["Pot"]),
    "knife": (["knife"], ["Knife"]),
    "spoon": (["spoon"], ["Spoon"]),
    "apple": (["apple"], ["Apple"]),
    "tomato": (["tomato"], ["Tomato"]),
    "potato": (["potato"], ["Potato"]),
    "bread": (["bread"], ["Bread"]),
    "egg": (["egg"], ["Egg"]),
    "tap": (["tap"], ["Faucet"]),
    "sink": (["sink"], ["SinkBasin"]),
    "counter": (["counter"], ["CounterTop"]),
    "hob": (["hob"], ["StoveBurner"]),
    "knob": (["knob"], ["StoveKnob"]),
    "fridge": (["fridge"], ["Fridge"]),
    "drawer": (["drawer"], ["Drawer"]),
    "cupboard": (["cupboard"], ["Cabinet"]),
    "bin": (["bin"], ["GarbageCan"]),
    "microwave": (["microwave"], ["Microwave"]),
    "sponge": (["sponge"], []),
    "board": (["board"], []),
    "kettle": (["kettle"], []),
    "spatula": (["spatula"], []),
    "lid": (["lid"], []),
    "onion": (["onion"], []),
    "milk": (["milk"], []),
}

DIM = 32


def main() -> None:
    (ROOT / "synthetic").mkdir(parents=True, exist_ok=True)
    (ROOT / "embeddings").mkdir(parents=True, exist_ok=True)
    spec = {
        "schema": "actctx.synthetic/1",
        "vocabulary": [{"name": n, "movable": True} for n in VIDEO_MOVABLE]
        + [{"name": n, "movable": False} for n in VIDEO_FIXED],
        "activities": ACTIVITIES,
        "clips_per_activity": 6,
        "frames_per_clip": 30,
        "noise": 0.05,
    }
    (ROOT / "synthetic" / "kitchen_activities.json").write_text(json.dumps(spec, indent=1) + "\n")

    rng = np.random.default_rng(20240611)
    video, env = {}, {}
    for concept, (vnames, enames) in CONCEPTS.items():
        base = rng.standard_normal(DIM)
        base /= np.linalg.norm(base)
        for n in vnames:
            video[n] = base + 0.15 * rng.standard_normal(DIM) / np.sqrt(DIM)
        for n in enames:
            env[n] = base + 0.15 * rng.standard_normal(DIM) / np.sqrt(DIM)
    for path, table in ((ROOT / "embeddings" / "video_vectors.txt", video),
                        (ROOT / "embeddings" / "env_vectors.txt", env)):
        with path.open("w") as f:
            for name, v in table.items():
                f.write(name + " " + " ".join(f"{x:.6f}" for x in v) + "\n")


if __name__ == "__main__":
    main()
