import random

import pytest

from multiseg.core import Multisegment, Segment


def random_multisegment(
    rng: random.Random,
    max_deg: int,
    lo: int = -2,
    hi: int = 4,
    max_len: int = 3,
) -> Multisegment:
    """Random nonempty multisegment of total degree <= max_deg."""
    target = rng.randint(1, max_deg)
    segs: list[Segment] = []
    d = 0
    while d < target:
        b = rng.randint(lo, hi)
        e = b + rng.randint(0, min(max_len, target - d - 1))
        segs.append((b, e))
        d += e - b + 1
    return Multisegment(segs)


@pytest.fixture
def rng() -> random.Random:
    return random.Random(20260823)
