"""Resource bounds for the brute-force paths and the solver.

All bounds are explicit configuration with hard defaults; exceeding one
raises `LimitError` instead of silently truncating.  The CLI honours the
environment variable ``ASPIR_LIMITS`` holding a comma-separated
``key=value`` list, e.g. ``ASPIR_LIMITS=oracle_atoms=24,solver_steps=1e7``.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, fields

from .errors import LimitError


@dataclass
class Limits:
    # atoms the reference enumerator will consider (2^n interpretations)
    oracle_atoms: int = 20
    # input-domain size for brute-force IR enumeration (3^n candidate pairs)
    ir_domain: int = 12
    # subset-enumeration cap for reduct-minimality checks on programs with
    # external atoms (ordinary programs use a DPLL search instead)
    flp_subsets: int = 1 << 18
    # guesses + conflicts a single solver run may spend
    solver_steps: int = 5_000_000
    # ground rule instances one grounding call may produce
    ground_instances: int = 2_000_000
    # input extensions enumerated when grounding a value-inventing external
    # without fixed input facts (the monolithic bottleneck)
    mono_inputs: int = 1 << 18

    def require(self, key: str, actual: int) -> None:
        bound = getattr(self, key)
        if actual > bound:
            raise LimitError(f"{key} bound exceeded: {actual} > {bound}")


DEFAULT_LIMITS = Limits()


def limits_from_env(env: dict | None = None) -> Limits:
    env = os.environ if env is None else env
    spec = env.get("ASPIR_LIMITS", "")
    lim = Limits()
    if not spec:
        return lim
    valid = {f.name for f in fields(Limits)}
    for part in spec.split(","):
        part = part.strip()
        if not part:
            continue
        if "=" not in part:
            raise LimitError(f"malformed ASPIR_LIMITS entry: {part!r}")
        key, _, value = part.partition("=")
        key = key.strip()
        if key not in valid:
            raise LimitError(f"unknown ASPIR_LIMITS key: {key!r}")
        try:
            setattr(lim, key, int(float(value)))
        except ValueError as exc:
            raise LimitError(f"bad ASPIR_LIMITS value for {key}: {value!r}") from exc
    return lim
