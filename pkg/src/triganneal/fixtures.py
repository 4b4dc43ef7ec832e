"""Bundled 12-spin reference problems used in regression tests and demos."""

from importlib import resources

from .errors import ValidationError
from .problems import parse_instance

FIXTURE_LABELS = ("709", "950", "103", "99")


def load_fixture(label, nonstoquastic=False):
    """Load one of the bundled problems ('709', '950', '103', '99').

    With nonstoquastic=True the returned problem carries y couplings of
    strength 0.5 on its coupling graph.
    """
    label = str(label)
    if label not in FIXTURE_LABELS:
        raise ValidationError(
            f"unknown fixture {label!r}, available: {FIXTURE_LABELS}")
    text = (resources.files("triganneal") / "data" / f"problem_{label}.txt").read_text()
    problem = parse_instance(text)
    if nonstoquastic:
        problem = problem.with_y_couplings(0.5)
    return problem
