import numpy as np
from fairdiv.core import GroupedDataset, make_element


def line(values, groups=None, start=0):
    """1-D elements with ids start, start+1, ... in the given order."""
    groups = groups or [0] * len(values)
    return [make_element(start + i, [v], g) for i, (v, g) in enumerate(zip(values, groups))]


def line_dataset(values, groups=None, m=None):
    groups = groups or [0] * len(values)
    return GroupedDataset(np.arange(len(values)), np.array(values, float)[:, None],
                          np.array(groups), m or max(groups) + 1)


# one line per acceptance criterion, echoed in the terminal summary
ACCEPTANCE_LINES: list[str] = []
