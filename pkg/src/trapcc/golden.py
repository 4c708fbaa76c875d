"""Named reference configurations.

E1, E2 and E3 are kept as 20-digit decimal strings, so parsing gives the
nearest binary double. SQ and ISO are closed-form test shapes.
"""

import math

from .geometry import DistanceVector

GOLDEN_TEXT = {
    "E1": {
        "r12": "8",
        "r13": "9.7414781617108145730",
        "r14": "7.52080447824566090",
        "r23": "7.1064329749865061893",
        "r24": "8.75000000000000000",
        "r34": "4.0246879466945716437",
    },
    "E2": {
        "r12": "8",
        "r13": "12.129061710615553753",
        "r14": "7.8020830551846857406",
        "r23": "7.6549229903601603027",
        "r24": "9.5117033174926140565",
        "r34": "7.3822682494734852600",
    },
    # non-symmetric configuration with m1 = m2
    "E3": {
        "r12": "8",
        "r13": "10.13318587483539368",
        "r14": "7.59545875301365884",
        "r23": "7.03230033956929474",
        "r24": "8.63262460668978253",
        "r34": "4.37871386495945262",
    },
}

# published mass ratios (m1/m2, m1/m4)
GOLDEN_RATIOS = {
    "E1": ("1.0194571510769873907", "7.9942119368105807422"),
    "E2": ("0.69074480337446980353", "0.87696321790891338292"),
}

ROUNDING_NOTE = "decimal inputs are rounded to the nearest IEEE-754 double"


def golden(name: str) -> DistanceVector:
    name = name.upper()
    if name in GOLDEN_TEXT:
        return DistanceVector.from_mapping(GOLDEN_TEXT[name])
    if name == "SQ":
        return DistanceVector(1.0, math.sqrt(2.0), 1.0, 1.0, math.sqrt(2.0), 1.0)
    if name == "ISO":
        # sides (a, b, c, d) = (2, 1, 1, 1), diagonals sqrt(3)
        return DistanceVector.from_sides(2.0, 1.0, 1.0, 1.0, math.sqrt(3.0), math.sqrt(3.0))
    raise KeyError(f"unknown golden configuration {name!r}; known: {', '.join(NAMES)}")


NAMES = ("E1", "E2", "E3", "SQ", "ISO")
