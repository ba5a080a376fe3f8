"""Search budgets, overridable through the PAVING_LAB_BUDGET environment variable.

The variable holds comma separated ``key=value`` pairs, for example
``PAVING_LAB_BUDGET="pave_max_n=16,pave_max_partitions=70000"``.
"""

import dataclasses
import os


@dataclasses.dataclass(frozen=True)
class Budget:
    pave_max_n: int = 14
    pave_max_partitions: int = 30_000
    symmetry_max_n: int = 20
    symmetry_hard_max_n: int = 24
    difference_set_max_n: int = 40
    rado_horn_exhaustive_n: int = 10
    conj_a_samples: int = 100_000


def from_env(env=None):
    env = os.environ if env is None else env
    raw = env.get("PAVING_LAB_BUDGET", "").strip()
    if not raw:
        return Budget()
    known = {f.name for f in dataclasses.fields(Budget)}
    updates = {}
    for item in raw.split(","):
        key, sep, value = item.partition("=")
        key = key.strip()
        if not sep or key not in known:
            raise ValueError(f"bad PAVING_LAB_BUDGET entry {item!r}; known keys: {sorted(known)}")
        updates[key] = int(value)
    return dataclasses.replace(Budget(), **updates)
