import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from curalloc.attributes import AttributeSchema


@pytest.fixture
def schema_2d() -> AttributeSchema:
    """Two dimensions: a binary one and a ternary one."""
    return AttributeSchema(
        dimensions=(
            ("gender", ("man", "nonman")),
            ("race", ("white", "black", "asian")),
        )
    )


@pytest.fixture
def schema_1d() -> AttributeSchema:
    return AttributeSchema(dimensions=(("group", ("A", "B", "C")),))
