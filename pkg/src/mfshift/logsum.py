"""Log-space accumulation helpers.

All cylinder sums in this package are sums of exponentials whose terms
grow like exp(n * P); they are accumulated with max-shifted log-space
arithmetic so that n in the hundreds stays representable.  The empty sum
is log(0) = -inf throughout.
"""

from __future__ import annotations

import math

import numpy as np

NEG_INF = float("-inf")


def logsumexp(values) -> float:
    """log(sum(exp(values))) with max shifting; -inf for an empty input."""
    arr = np.asarray(values, dtype=float)
    if arr.size == 0:
        return NEG_INF
    m = float(np.max(arr))
    if m == NEG_INF:
        return NEG_INF
    return m + math.log(float(np.sum(np.exp(arr - m))))


class LogAccumulator:
    """Streaming logsumexp over blocks of log-terms.

    Maintains a running maximum ``m`` and the rescaled partial sum
    ``s = sum(exp(x - m))``.  Feeding the same block sequence always
    produces bit-identical results, which the vacuous-constraint
    reduction tests rely on.
    """

    def __init__(self) -> None:
        self._m = NEG_INF
        self._s = 0.0

    def add_block(self, values) -> None:
        arr = np.asarray(values, dtype=float)
        if arr.size == 0:
            return
        mb = float(np.max(arr))
        if mb == NEG_INF:
            return
        sb = float(np.sum(np.exp(arr - mb)))
        if mb <= self._m:
            self._s += sb * math.exp(mb - self._m)
        else:
            self._s = self._s * math.exp(self._m - mb) + sb
            self._m = mb

    def value(self) -> float:
        if self._m == NEG_INF:
            return NEG_INF
        return self._m + math.log(self._s)
