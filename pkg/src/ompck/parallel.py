import os


def worker_count():
    """Worker cap from ``OMPCK_THREADS``, else the available CPUs."""
    raw = os.environ.get("OMPCK_THREADS")
    if raw:
        try:
            return max(1, int(raw))
        except ValueError:
            raise ValueError(f"OMPCK_THREADS must be an integer, got {raw!r}") from None
    try:
        return len(os.sched_getaffinity(0))
    except AttributeError:
        return os.cpu_count() or 1
