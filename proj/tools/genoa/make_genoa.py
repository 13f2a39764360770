#!/usr/bin/env python3
# Copyright 2026 The possplan Authors
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
"""Writes data/genoa/genoa.json.

Topology, interventions and demand are fixed by the case study. Costs,
capacities and the utilization profile are estimates; they live in the
constants below so the instance can be regenerated after retuning.
"""

import argparse
import json
import pathlib

METRO = [
    (1, "Brignole"),
    (2, "De Ferrari"),
    (3, "Sant'Agostino"),
    (4, "San Giorgio"),
    (5, "Darsena"),
    (6, "Principe"),
    (7, "Dinegro"),
    (8, "Brin"),
]
TRAIN = [
    (9, "Genova Brignole FS"),
    (10, "Genova Quarto FS"),
    (11, "Genova Piazza Principe FS"),
    (13, "Genova Via di Francia FS"),
    (19, "Genova Sampierdarena FS"),
]
# Bus stop next to each metro station.
BUS_STOP = {1: 14, 2: 15, 3: 16, 4: 17, 5: 18, 6: 20, 7: 21, 8: 12}

# Position along the line, east to west.
POSITION = {14: 0, 15: 1, 16: 2, 17: 3, 18: 4, 20: 5, 21: 6, 12: 7}

METRO_CAPACITY = 20000.0
METRO_COST = 1.0
# (tail, head, capacity)
TRAIN_LINKS = [(10, 9, 8000.0), (9, 11, 2000.0), (11, 13, 150.0)]
TRAIN_COST = 2.0
# (tail, head, capacity)
BUS_LINKS = [(14, 15, 1500.0), (15, 18, 1500.0), (16, 17, 1500.0), (18, 20, 2000.0), (20, 21, 1100.0)]
BUS_COST_PER_STOP = 2.5
BUS_UPGRADE_COST = 12.0
TRAIN_UPGRADE_COST = 60.0
WALK_COST = 2.0
# Walking between the Principe bus terminal and the metro platforms.
PRINCIPE_WALK_COST = 10.0
WALK_CAPACITY = 20000.0
EXTRA_WALKS = [(9, 1), (11, 6), (13, 7), (19, 8), (9, 14)]
# Street walk between the Dinegro and Principe stations.
LONG_WALKS = [(7, 6, 20.0)]
# Activatable links beyond the bus-stop clique.
EXTRA_ACTIVATABLE = [(19, 20), (13, 18), (9, 15), (10, 14)]
ACTIVATION_COST = 5.0
# Direct Brin - Principe road.
ACTIVATABLE_COST_OVERRIDE = {(12, 20): 4.0, (12, 21): 4.0}

UTILIZATION_HIGH = 1.76
UTILIZATION_LOW = 0.88
UTILIZATION_EVENT = 1.8

INTERVENTIONS = [
    # link, duration, priority, deadline
    (1, 1, 2, 20),
    (2, 2, 1, 20),
    (3, 1, 10, 10),
    (4, 2, 4, 20),
    (5, 1, 8, 10),
    (7, 2, 7, 10),
    (9, 1, 3, 20),
    (12, 2, 5, 20),
    (13, 1, 1, 20),
]


def activatable_cost(a, b):
    key = (min(a, b), max(a, b))
    if key in ACTIVATABLE_COST_OVERRIDE:
        return ACTIVATABLE_COST_OVERRIDE[key]
    if a in POSITION and b in POSITION:
        d = abs(POSITION[a] - POSITION[b])
        return 2.0 + 25.0 * (d - 1)
    return 30.0


def build():
    nodes = [{"id": i, "name": n} for i, n in METRO]
    nodes += [{"id": i, "name": n} for i, n in TRAIN]
    for metro, stop in BUS_STOP.items():
        nodes.append({"id": stop, "name": METRO[metro - 1][1] + " bus"})
    nodes.sort(key=lambda n: n["id"])

    links = []

    def add(tail, head, mode, cost, capacity=None, activation=None, tag=None, twin=False):
        link = {"id": len(links) + 1, "tail": tail, "head": head, "mode": mode, "cost": cost}
        if capacity is not None:
            link["capacity"] = capacity
        if activation is not None:
            link["activation_cost"] = activation
        if tag:
            link["tag"] = tag
        links.append(link)
        if twin:
            rev = dict(link, id=len(links) + 1, tail=head, head=tail)
            link["reverse"] = rev["id"]
            rev["reverse"] = link["id"]
            links.append(rev)

    # Metro: odd ids run westward, the following even id is the reverse.
    for a in range(1, 8):
        add(a, a + 1, "metro", METRO_COST, METRO_CAPACITY, twin=True)
    for a, b, capacity in TRAIN_LINKS:
        add(a, b, "bus", TRAIN_COST, capacity, TRAIN_UPGRADE_COST, "train", twin=True)
    for a, b, capacity in BUS_LINKS:
        cost = BUS_COST_PER_STOP * abs(POSITION[a] - POSITION[b])
        add(a, b, "bus", cost, capacity, BUS_UPGRADE_COST, twin=True)
    for metro, stop in BUS_STOP.items():
        cost = PRINCIPE_WALK_COST if metro == 6 else WALK_COST
        add(metro, stop, "walk", cost, WALK_CAPACITY, twin=True)
    for a, b in EXTRA_WALKS:
        add(a, b, "walk", WALK_COST, WALK_CAPACITY, twin=True)
    for a, b, cost in LONG_WALKS:
        add(a, b, "walk", cost, WALK_CAPACITY, twin=True)
    stops = sorted(POSITION, key=POSITION.get)
    for i, a in enumerate(stops):
        for b in stops[i + 1:]:
            add(a, b, "activatable", activatable_cost(a, b), None, ACTIVATION_COST, twin=True)
    for a, b in EXTRA_ACTIVATABLE:
        add(a, b, "activatable", activatable_cost(a, b), None, ACTIVATION_COST, twin=True)

    utilization = [UTILIZATION_HIGH] * 10 + [UTILIZATION_LOW] * 10
    utilization[13] = UTILIZATION_EVENT

    return {
        "name": "genoa",
        "nodes": nodes,
        "links": links,
        "interventions": [
            {"id": k + 1, "link": l, "duration": d, "priority": p, "deadline": t}
            for k, (l, d, p, t) in enumerate(INTERVENTIONS)
        ],
        "horizon": 20,
        "periods": ["morning", "evening", "offpeak"],
        "demand": {p: {"csv": p + ".csv"} for p in ["morning", "evening", "offpeak"]},
        "utilization": utilization,
        "params": {"N": 3, "J": 10, "S": 2, "q0": 100, "R": 10, "seed": 1},
        "weights": {
            "alpha": [1, 50, 100],
            "beta": [0.03, 1.5, 1, 1],
            "v": [1, 1, 1],
        },
    }


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    default = pathlib.Path(__file__).resolve().parents[2] / "data" / "genoa" / "genoa.json"
    parser.add_argument("--out", type=pathlib.Path, default=default)
    args = parser.parse_args()
    doc = build()
    args.out.write_text(json.dumps(doc, indent=1) + "\n", encoding="utf-8")
    modes = {}
    for link in doc["links"]:
        key = link.get("tag") or link["mode"]
        modes[key] = modes.get(key, 0) + 1
    print(f"{len(doc['nodes'])} nodes, {len(doc['links'])} links {modes}")


if __name__ == "__main__":
    main()
