import os

ENV_VAR = "VAROSC_WORKERS"


def worker_count(workers=None) -> int:
    """Explicit count, else ``$VAROSC_WORKERS``, else the machine's CPU count."""
    if workers is None:
        env = os.environ.get(ENV_VAR)
        workers = int(env) if env else (os.cpu_count() or 1)
    return max(1, int(workers))
