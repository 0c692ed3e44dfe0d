import random
import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from charpoly import Frame, GF, QQ, parse_poly


@pytest.fixture
def rng():
    return random.Random(20260825)


@pytest.fixture
def frame_q():
    return Frame(("u1", "u2"), ("y1", "y2"), QQ)


@pytest.fixture
def frame_f2():
    return Frame(("u1", "u2"), ("y",), GF(2))


@pytest.fixture
def system_f(frame_q):
    return [parse_poly(frame_q, "y1^2 + u1^3"),
            parse_poly(frame_q, "y2^3 + u2^7")]


@pytest.fixture
def system_g(frame_q, system_f):
    f1, f2 = system_f
    return [f1, f2 + f1]


@pytest.fixture
def system_h(frame_q, system_f):
    f1, _ = system_f
    h2 = parse_poly(frame_q, "y2^3 + u2^7 + u2^2*y1^2 + u1^3*u2^2")
    return [f1, h2]


@pytest.fixture
def hiro(frame_f2):
    return parse_poly(frame_f2, "y^2 + y^4 + u1^4 + u2^7")


@pytest.fixture
def frame_loop():
    return Frame(("u",), ("y", "z"), GF(2))


@pytest.fixture
def system_loop(frame_loop):
    return [parse_poly(frame_loop, "y^3 + y^4*u + y^2*u^2 + u^5"),
            parse_poly(frame_loop, "z^5 + y^3*u")]


@pytest.fixture
def frame_prep():
    return Frame(("u1", "u2"), ("y1", "y2"), GF(2))


@pytest.fixture
def system_prep(frame_prep):
    return [parse_poly(frame_prep, "y1^2"),
            parse_poly(frame_prep, "y2^4 + u1^2*u2^2*y1^2 + u1^8*u2^8")]


@pytest.fixture(scope="session")
def problems_dir():
    return Path(__file__).parent.parent / "problems"
