"""Level rankings: tightness, counting, and constrained enumeration.

A level ranking maps states to ranks in {0..2n}.  Rankings here are kept
over an explicit domain (a sorted state tuple) with parallel value tuples;
states outside the domain count as rank 0.  A ranking is tight when its
rank (the maximum) is odd and every odd value up to it is taken.
"""

from __future__ import annotations

from math import comb

from .errors import ValidationError

COUNT_TIGHT_LIMIT = 8


def evenceil(k: int) -> int:
    """Largest even number not above k."""
    return k - (k & 1)


def count_tight(n: int) -> int:
    """Exact number of tight level rankings on n states.

    Counted by inclusion-exclusion over which odd values are missed;
    model assignments are not part of the count.
    """
    if n < 1:
        raise ValidationError("count_tight needs n >= 1")
    if n > COUNT_TIGHT_LIMIT:
        raise ValidationError(
            f"count_tight capped at n <= {COUNT_TIGHT_LIMIT} to keep figures exact"
        )
    total = 0
    for rank in range(1, 2 * n, 2):
        odds = (rank + 1) // 2
        total += sum(
            (-1) ** j * comb(odds, j) * (rank + 1 - j) ** n
            for j in range(odds + 1)
        )
    return total


def odd_ranks_up_to(dom_size: int, maxvalue: int):
    """Odd ranks a tight ranking over dom_size states could have, given the
    value ceiling."""
    top = min(maxvalue, 2 * dom_size - 1)
    return range(1, top + 1, 2)


def generate_tight(rank: int, allowed: list[tuple[int, ...]]):
    """Yield tight value tuples of the given odd rank.

    ``allowed[i]`` lists the candidate values for position i in ascending
    order (values above ``rank`` are skipped).  A yielded tuple takes every
    odd value up to ``rank``, hence its maximum is exactly ``rank``.
    Output comes in lexicographic order.
    """
    if rank < 1 or rank % 2 == 0:
        return
    size = len(allowed)
    options = [tuple(v for v in vals if v <= rank) for vals in allowed]
    suffix_max = [0] * (size + 1)
    suffix_max[size] = -1
    for i in range(size - 1, -1, -1):
        here = options[i][-1] if options[i] else -1
        suffix_max[i] = max(suffix_max[i + 1], here)
    values = [0] * size
    full = (1 << ((rank + 1) // 2)) - 1  # bit j <=> odd value 2j+1 still missing

    def rec(i: int, missing: int):
        if i == size:
            if missing == 0:
                yield tuple(values)
            return
        if missing.bit_count() > size - i:
            return
        if missing and 2 * missing.bit_length() - 1 > suffix_max[i]:
            return
        for v in options[i]:
            values[i] = v
            nxt = missing & ~(1 << (v >> 1)) if v & 1 else missing
            yield from rec(i + 1, nxt)

    yield from rec(0, full)
