"""Greedy sign-choice dynamics: x_n = x_{n-1} +/- v_n, sign minimizing the
norm, plus the one-dimensional greedy harmonic walk."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from .sources import DirectionSource


@dataclass(frozen=True)
class TiePolicy:
    """What to do when both signs give the same norm.

    A step is a tie when |<x, v>| <= tolerance * ||x|| * ||v||.  Mode "halt"
    stops the walk there (the sequence is undefined); "choose-plus" takes the
    + sign and records the override, for long batch runs where a floating
    coincidence must not kill an experiment.
    """

    tolerance: float = 1e-12
    mode: str = "halt"

    def __post_init__(self):
        if not 0.0 <= self.tolerance < 1.0:
            raise ValueError(f"tolerance must be in [0, 1), got {self.tolerance}")
        if self.mode not in ("halt", "choose-plus"):
            raise ValueError(f"unknown tie mode {self.mode!r}")


DEFAULT_POLICY = TiePolicy()


class IndeterminateStepError(RuntimeError):
    """Both signs give the same norm; the sequence is undefined."""

    def __init__(self, step_index, x, v):
        self.step_index = step_index
        self.x = np.asarray(x, float)
        self.v = np.asarray(v, float)
        super().__init__(f"indeterminate step at source index {step_index}")


@dataclass(frozen=True)
class StepOutcome:
    next: np.ndarray
    sign: int
    inner_product: float
    tie_broken: bool = False


def greedy_step(x, v, policy: TiePolicy = DEFAULT_POLICY, step_index=None) -> StepOutcome:
    """One greedy step: x - sign(<x, v>) * v.

    ||x + v|| < ||x - v||  iff  <x, v> < 0, so the sign test on the inner
    product picks the norm-minimizing sign without forming either norm.
    Raises IndeterminateStepError on a tie under the halt policy.
    """
    x = np.asarray(x, dtype=float)
    v = np.asarray(v, dtype=float)
    if x.shape != v.shape:
        raise ValueError(f"dimension mismatch: x has shape {x.shape}, v has shape {v.shape}")
    nv = float(np.linalg.norm(v))
    if nv == 0.0:
        raise ValueError("zero step vector")
    ip = float(x @ v)
    if abs(ip) <= policy.tolerance * float(np.linalg.norm(x)) * nv:
        if policy.mode == "halt":
            raise IndeterminateStepError(step_index, x, v)
        return StepOutcome(x + v, +1, ip, tie_broken=True)
    sign = -1 if ip > 0.0 else +1
    return StepOutcome(x + sign * v, sign, ip)


@dataclass
class Trajectory:
    """Recorded walk.  states[i] is the point with walk index start_index + i,
    so a radical-inverse run (start_index = -1) has states[0] = z_{-1} and
    states[k+1] = z_k.  signs[i] produced states[i+1].  In norms-only mode
    states is None and only the norm series is kept."""

    norms: np.ndarray
    signs: np.ndarray
    start_index: int
    source_spec: str
    policy: TiePolicy
    states: np.ndarray | None = None
    indeterminate_at: int | None = None
    tie_overrides: tuple[int, ...] = ()
    seed: int | None = None
    final_state: np.ndarray | None = None

    def __len__(self) -> int:
        return len(self.norms)

    @property
    def d(self) -> int:
        if self.states is not None:
            return self.states.shape[1]
        return len(self.final_state)

    def z_indices(self) -> np.ndarray:
        return self.start_index + np.arange(len(self.norms))

    def state(self, z_index: int) -> np.ndarray:
        if self.states is None:
            raise ValueError("trajectory was recorded in norms-only mode")
        return self.states[z_index - self.start_index]

    def norm_at(self, z_index: int) -> float:
        return float(self.norms[z_index - self.start_index])

    def final(self) -> np.ndarray:
        return self.final_state if self.states is None else self.states[-1]

    # -- export ------------------------------------------------------------

    def _columns(self) -> tuple[list[str], list[np.ndarray]]:
        steps = self.z_indices()
        sign_col = np.concatenate([[0], self.signs])  # 0 marks the start row
        names, cols = ["step"], [steps]
        if self.states is not None:
            for j in range(self.d):
                names.append(f"x{j + 1}")
                cols.append(self.states[:, j])
        names += ["norm", "sign"]
        cols += [self.norms, sign_col]
        return names, cols

    def to_csv(self, path) -> None:
        names, cols = self._columns()
        with open(path, "w") as fh:
            fh.write(",".join(names) + "\n")
            for i in range(len(self)):
                row = []
                for name, col in zip(names, cols):
                    val = col[i]
                    if name in ("step", "sign"):
                        row.append(str(int(val)))
                    else:
                        row.append(repr(float(val)))
                fh.write(",".join(row) + "\n")

    def to_json(self, path) -> None:
        names, cols = self._columns()
        doc = {
            "meta": {
                "source": self.source_spec,
                "seed": self.seed,
                "tie_policy": {"tolerance": self.policy.tolerance, "mode": self.policy.mode},
                "start_index": self.start_index,
                "d": self.d,
                "indeterminate_at": self.indeterminate_at,
                "tie_overrides": list(self.tie_overrides),
            },
            "data": {
                name: [int(v) for v in col] if name in ("step", "sign") else [float(v) for v in col]
                for name, col in zip(names, cols)
            },
        }
        with open(path, "w") as fh:
            json.dump(doc, fh, indent=1)
            fh.write("\n")


def simulate(
    x0,
    source: DirectionSource,
    n_steps: int,
    policy: TiePolicy = DEFAULT_POLICY,
    store: str = "points",
    first_index: int | None = None,
    seed: int | None = None,
    chunk: int = 1 << 16,
) -> Trajectory:
    """Run the greedy walk for up to n_steps steps.

    The walk is truncated at an indeterminate step under the halt policy; the
    partial trajectory is returned with indeterminate_at set to the walk index
    that could not be computed.  first_index overrides the source's natural
    first step index; the recorded start_index is first_index - 1.
    """
    if n_steps < 0:
        raise ValueError(f"n_steps must be >= 0, got {n_steps}")
    if store not in ("points", "norms"):
        raise ValueError(f"unknown store mode {store!r}")
    x = np.array(x0, dtype=float)
    if x.ndim != 1:
        raise ValueError("starting point must be a flat coordinate sequence")
    if x.shape[0] != source.d:
        raise ValueError(f"starting point has dimension {x.shape[0]}, source emits {source.d}")
    if not np.isfinite(x).all():
        raise ValueError("starting point must be finite")

    n0 = source.start_n if first_index is None else int(first_index)
    start_index = n0 - 1
    keep_points = store == "points"
    states = [x.copy()] if keep_points else None
    norms = [float(np.linalg.norm(x))]
    signs: list[int] = []
    ties: list[int] = []
    indeterminate_at = None

    k = 0
    halted = False
    while k < n_steps and not halted:
        vs = source.directions(n0 + k, min(chunk, n_steps - k))
        for v in vs:
            try:
                out = greedy_step(x, v, policy, step_index=n0 + k)
            except IndeterminateStepError:
                indeterminate_at = start_index + 1 + k
                halted = True
                break
            x = out.next
            if out.tie_broken:
                ties.append(start_index + 1 + k)
            signs.append(out.sign)
            norms.append(float(np.linalg.norm(x)))
            if keep_points:
                states.append(x.copy())
            k += 1

    return Trajectory(
        norms=np.array(norms),
        signs=np.array(signs, dtype=np.int8),
        start_index=start_index,
        source_spec=source.spec,
        policy=policy,
        states=np.array(states) if keep_points else None,
        indeterminate_at=indeterminate_at,
        tie_overrides=tuple(ties),
        seed=seed,
        final_state=None if keep_points else x.copy(),
    )


def replay(x0, source: DirectionSource, signs, first_index: int | None = None) -> np.ndarray:
    """Apply a fixed sign sequence instead of the greedy choice; returns the
    visited points (len(signs) + 1 rows)."""
    x = np.array(x0, dtype=float)
    n0 = source.start_n if first_index is None else int(first_index)
    vs = source.directions(n0, len(signs))
    out = np.empty((len(signs) + 1, x.shape[0]))
    out[0] = x
    for i, (s, v) in enumerate(zip(signs, vs)):
        x = x + s * v
        out[i + 1] = x
    return out


def greedy_harmonic(target: float, n_steps: int) -> np.ndarray:
    """Greedy signed harmonic walk toward a positive target.

    x_1 = 1 and x_k = x_{k-1} + 1/k while at or below the target, otherwise
    x_k = x_{k-1} - 1/k.  Once the walk has crossed the target it stays within
    2/k of it.  Returns the values x_1 .. x_{n_steps}.
    """
    if target <= 0:
        raise ValueError(f"target must be positive, got {target}")
    if n_steps < 1:
        raise ValueError(f"n_steps must be >= 1, got {n_steps}")
    xs = np.empty(n_steps)
    x = 1.0
    xs[0] = x
    for k in range(2, n_steps + 1):
        x = x + 1.0 / k if x <= target else x - 1.0 / k
        xs[k - 1] = x
    return xs
