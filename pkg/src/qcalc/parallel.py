"""Order-preserving map honouring the QCALC_THREADS cap."""
from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor


def thread_cap() -> int:
    try:
        return max(1, int(os.environ.get("QCALC_THREADS", "1")))
    except ValueError:
        return 1


def pmap(fn, items):
    """[fn(x) for x in items], evaluated on up to QCALC_THREADS threads; result order is input order."""
    items = list(items)
    n = thread_cap()
    if n <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=n) as ex:
        return list(ex.map(fn, items))
