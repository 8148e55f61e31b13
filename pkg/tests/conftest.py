import pytest

from chaosfilter import EventLog


@pytest.fixture
def worked_log() -> EventLog:
    """The four-activity log whose entropies are known in closed form."""
    return EventLog.from_variants(
        {
            ("a", "b", "c", "x"): 10,
            ("a", "b", "x", "c"): 10,
            ("a", "x", "b", "c"): 10,
        }
    )


@pytest.fixture
def two_variant_log() -> EventLog:
    return EventLog.from_variants({("a", "b", "c"): 2, ("b", "a", "c"): 3})
