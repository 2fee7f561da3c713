import json
import random
from dataclasses import replace
from fractions import Fraction as F

from rendezsim import LabelSpace, Point, Scenario, run_scenario, trace_lines
from rendezsim.kernel import DISTORTIONS


def random_scenarios(count, seed, max_extent=8):
    # small coordinates so the exp2 distortion stays cheap
    rng = random.Random(seed)
    out = []
    for _ in range(count):
        size = rng.choice([2, 4, 16])
        label_a = rng.randrange(size)
        label_b = (label_a + 1 + rng.randrange(size - 1)) % size
        if label_b == label_a:
            label_b = (label_a + 1) % size
        sv = F(rng.randrange(0, max_extent * 8), 8)
        sh = F(rng.randrange(0, max_extent * 8), 8)
        if sv * sv + sh * sh <= 1:
            sh += 2
        start_b = F(rng.randrange(0, 5))
        out.append(
            Scenario(
                model="monotone",
                space=LabelSpace(size),
                label_a=label_a,
                label_b=label_b,
                pos_a=Point(F(0), F(0)),
                pos_b=Point(sh, sv),
                start_a=F(0),
                start_b=start_b,
            )
        )
    return out


def trace_blob(scenario):
    report, events = run_scenario(scenario)
    assert report.met
    return "".join(
        json.dumps(line, sort_keys=True, separators=(",", ":")) + "\n"
        for line in trace_lines(replace(scenario, distortion=None), events)
    )


def test_traces_identical_under_every_distortion():
    # programs only ever compare levels, so any strictly increasing map on
    # the hidden value must leave every trace byte unchanged
    for scenario in random_scenarios(25, seed=777):
        blobs = {}
        for name in sorted(DISTORTIONS):
            blobs[name] = trace_blob(replace(scenario, distortion=name))
        reference = blobs["identity"]
        for name, blob in blobs.items():
            assert blob == reference, f"distortion {name} changed the behavior"
