"""Ordered block mapping over an optional process pool."""

from concurrent.futures import ProcessPoolExecutor
from itertools import islice


def map_blocks(fn, tasks, workers: int = 1):
    """Yield ``fn(*task)`` for every task, in task order.

    Results are identical for any ``workers`` because each task carries its
    own random-stream key; only wall time changes.
    """
    tasks = iter(tasks)
    if workers <= 1:
        for t in tasks:
            yield fn(*t)
        return
    with ProcessPoolExecutor(max_workers=workers) as pool:
        while True:
            wave = list(islice(tasks, 2 * workers))
            if not wave:
                return
            futures = [pool.submit(fn, *t) for t in wave]
            for f in futures:
                yield f.result()
