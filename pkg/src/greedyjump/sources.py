"""Direction-vector families used by the greedy walk.

Deterministic families (radical-inverse, Kronecker, polynomial phases, Farey,
nearest-integer phases) are random-access by index; the uniform-sphere family
is sequential from a recorded seed.  All planar families emit unit vectors
except the growing Kronecker family (norm sqrt(n)).
"""

from __future__ import annotations

import math
from decimal import Decimal
from fractions import Fraction

import numpy as np

TWO_PI = 2.0 * math.pi

# Fractional bits for scaled-integer phase arithmetic.  frac(c * n^p) computed
# this way carries absolute error below n^p / 2^100, about 1e-12 for the
# worst case used here (n = 1e6, p = 3); plain doubles lose everything there.
_PHASE_BITS = 100
_PHASE_ONE = 1 << _PHASE_BITS

_PI_FRACTION = Fraction(
    31415926535897932384626433832795028841971693993751058209749445923078164062862089986280348253421170679,
    10**100,
)


def _sqrt_fraction(n: int) -> Fraction:
    """sqrt(n) as a Fraction accurate to 2^-100."""
    return Fraction(math.isqrt(n << (2 * _PHASE_BITS)), _PHASE_ONE)


_LITERALS = {
    "sqrt2": _sqrt_fraction(2),
    "sqrt3": _sqrt_fraction(3),
    "sqrt10": _sqrt_fraction(10),
    "pi": _PI_FRACTION,
}


def parse_constant(text: str) -> Fraction:
    """Parse a numeric constant, allowing the literals sqrt2, sqrt3, sqrt10
    and pi as well as products such as "1.0415*sqrt2"."""
    result = Fraction(1)
    for token in str(text).split("*"):
        token = token.strip().lower()
        if not token:
            raise ValueError(f"empty factor in constant {text!r}")
        if token in _LITERALS:
            result *= _LITERALS[token]
        else:
            try:
                result *= Fraction(Decimal(token))
            except Exception as exc:
                raise ValueError(f"cannot parse constant {token!r}") from exc
    return result


def parse_number(text: str) -> float:
    return float(parse_constant(text))


# ---------------------------------------------------------------------------
# van der Corput
# ---------------------------------------------------------------------------

def vdc(n: int, b: int = 2) -> float:
    """Radical inverse: the digits of n in base b mirrored about the radix
    point.  Computed with exact integers, so the result is the correctly
    rounded double for any n < 2**53."""
    if b < 2:
        raise ValueError(f"base must be >= 2, got {b}")
    if n < 0:
        raise ValueError(f"index must be >= 0, got {n}")
    num, den, m = 0, 1, int(n)
    while m:
        m, digit = divmod(m, b)
        num = num * b + digit
        den *= b
    return num / den


def vdc_fraction(n: int, b: int = 2) -> Fraction:
    """Exact rational value of the radical inverse."""
    if b < 2:
        raise ValueError(f"base must be >= 2, got {b}")
    if n < 0:
        raise ValueError(f"index must be >= 0, got {n}")
    num, den, m = 0, 1, int(n)
    while m:
        m, digit = divmod(m, b)
        num = num * b + digit
        den *= b
    return Fraction(num, den)


def vdc_array(ns, b: int = 2) -> np.ndarray:
    """Vectorized radical inverse for an array of indices."""
    if b < 2:
        raise ValueError(f"base must be >= 2, got {b}")
    m = np.asarray(ns, dtype=np.int64).copy()
    if (m < 0).any():
        raise ValueError("indices must be >= 0")
    out = np.zeros(m.shape)
    scale = 1.0 / b
    while m.any():
        out += (m % b) * scale
        m //= b
        scale /= b
    return out


# ---------------------------------------------------------------------------
# Farey concatenation
# ---------------------------------------------------------------------------

def farey_block(k: int) -> list[Fraction]:
    """Ascending reduced fractions in [0, 1] with denominator <= k, both
    endpoints included (the k-th block of the concatenated sequence)."""
    if k < 1:
        raise ValueError(f"block order must be >= 1, got {k}")
    seq = [Fraction(0, 1)]
    a, b_, c, d = 0, 1, 1, k
    while c <= k:
        seq.append(Fraction(c, d))
        t = (k + b_) // d
        a, b_, c, d = c, d, t * c - a, t * d - b_
    return seq


def farey_term(n: int) -> Fraction:
    """n-th element (0-based) of the concatenation F_1, F_2, F_3, ..."""
    if n < 0:
        raise ValueError(f"index must be >= 0, got {n}")
    k, start = 1, 0
    while True:
        size = _farey_block_size(k)
        if n < start + size:
            return farey_block(k)[n - start]
        start += size
        k += 1


def _farey_block_size(k: int) -> int:
    # |F_k| = 1 + sum_{j<=k} phi(j); incremental totient keeps this O(k log k)
    global _FAREY_SIZES
    while len(_FAREY_SIZES) <= k:
        j = len(_FAREY_SIZES)
        _FAREY_SIZES.append(_FAREY_SIZES[-1] + _totient(j))
    return 1 + _FAREY_SIZES[k]


_FAREY_SIZES = [0, 1]  # cumulative totient sums, phi(1) = 1


def _totient(n: int) -> int:
    result, m, p = n, n, 2
    while p * p <= m:
        if m % p == 0:
            while m % p == 0:
                m //= p
            result -= result // p
        p += 1
    if m > 1:
        result -= result // m
    return result


class _FareyFloatCache:
    """Growing float cache of the concatenated Farey values, for fast
    direction streams."""

    def __init__(self):
        self.values = np.empty(0)
        self.next_block = 1

    def ensure(self, count: int) -> np.ndarray:
        chunks = [self.values]
        have = len(self.values)
        while have < count:
            block = farey_block(self.next_block)
            chunks.append(np.array([float(f) for f in block]))
            have += len(block)
            self.next_block += 1
        if len(chunks) > 1:
            self.values = np.concatenate(chunks)
        return self.values


_FAREY_FLOATS = _FareyFloatCache()


# ---------------------------------------------------------------------------
# Sources
# ---------------------------------------------------------------------------

class DirectionSource:
    """Common interface for step-vector generators.

    ``direction(n)`` returns the vector consumed by step index n.
    Deterministic kinds are pure functions of n; the uniform-sphere kind
    ignores n and advances its own generator.  ``start_n`` is the index the
    walk's first step should use (radical-inverse walks start their labels at
    z_{-1} and use index 0 for the first step).
    """

    d = 2
    start_n = 0
    spec = "?"

    def direction(self, n: int) -> np.ndarray:
        return self.directions(n, 1)[0]

    def directions(self, n0: int, count: int) -> np.ndarray:
        raise NotImplementedError

    def __repr__(self):
        return f"{type(self).__name__}({self.spec!r})"


def direction(source: DirectionSource, n: int) -> np.ndarray:
    """Step vector consumed by step index n of the given source."""
    return source.direction(n)


def _planar(angles: np.ndarray) -> np.ndarray:
    return np.column_stack([np.cos(angles), np.sin(angles)])


class VanDerCorputSource(DirectionSource):
    start_n = 0

    def __init__(self, b: int = 2):
        if int(b) < 2:
            raise ValueError(f"base must be >= 2, got {b}")
        self.b = int(b)
        self.spec = f"vdc:b={self.b}"

    def directions(self, n0, count):
        return _planar(TWO_PI * vdc_array(np.arange(n0, n0 + count), self.b))


class KroneckerSource(DirectionSource):
    """v_n = (cos(alpha n), sin(alpha n)); alpha is an angle in radians and no
    2*pi factor is inserted."""

    start_n = 1

    def __init__(self, alpha: float):
        self.alpha = float(alpha)
        self.spec = f"kronecker:alpha={self.alpha!r}"

    def directions(self, n0, count):
        return _planar(self.alpha * np.arange(n0, n0 + count))


class _ScaledPhase:
    """frac(c * n^p) through 100-bit scaled integers."""

    def __init__(self, c: Fraction):
        self.scaled = round(Fraction(c) * _PHASE_ONE)

    def frac(self, n: int, p: int = 1) -> float:
        return ((self.scaled * n**p) % _PHASE_ONE) / _PHASE_ONE

    def frac_array(self, n0: int, count: int, p: int = 1) -> np.ndarray:
        return np.array([self.frac(n, p) for n in range(n0, n0 + count)])


class PolyPhaseSource(DirectionSource):
    """v_n = exp(2 pi i c n^p), with the phase reduced mod 1 in extended
    precision (doubles cancel catastrophically once c n^p ~ 1e18)."""

    start_n = 1

    def __init__(self, c, p: int = 2, c_text: str | None = None):
        if int(p) < 1:
            raise ValueError(f"power must be >= 1, got {p}")
        self.p = int(p)
        frac = parse_constant(c) if isinstance(c, str) else Fraction(c)
        self.c = float(frac)
        self._phase = _ScaledPhase(frac)
        self.spec = f"polyphase:c={c_text or c}:p={self.p}"

    def directions(self, n0, count):
        return _planar(TWO_PI * self._phase.frac_array(n0, count, self.p))


class FareySource(DirectionSource):
    """v_n = exp(2 pi i a_n) with a_n the concatenated Farey fractions."""

    start_n = 0
    spec = "farey"

    def directions(self, n0, count):
        vals = _FAREY_FLOATS.ensure(n0 + count)
        return _planar(TWO_PI * vals[n0:n0 + count])


class NearestIntPhaseSource(DirectionSource):
    """v_n = exp(2 pi i ||c n||) with ||.|| the distance to the nearest
    integer."""

    start_n = 1

    def __init__(self, c, c_text: str | None = None):
        frac = parse_constant(c) if isinstance(c, str) else Fraction(c)
        self.c = float(frac)
        self._phase = _ScaledPhase(frac)
        self.spec = f"nip:c={c_text or c}"

    def directions(self, n0, count):
        fr = self._phase.frac_array(n0, count)
        return _planar(TWO_PI * np.minimum(fr, 1.0 - fr))


class GrowingKroneckerSource(DirectionSource):
    """v_n = sqrt(n) * exp(2 pi i c n); the only planar family without unit
    norm."""

    start_n = 1

    def __init__(self, c, c_text: str | None = None):
        frac = parse_constant(c) if isinstance(c, str) else Fraction(c)
        self.c = float(frac)
        self._phase = _ScaledPhase(frac)
        self.spec = f"grow:c={c_text or c}"

    def directions(self, n0, count):
        ns = np.arange(n0, n0 + count)
        ang = TWO_PI * self._phase.frac_array(n0, count)
        return np.sqrt(ns)[:, None] * _planar(ang)


class Trig3DSource(DirectionSource):
    """v_n = (cos n, sin n, cos sqrt(n)); norm varies in [1, sqrt(2)]."""

    d = 3
    start_n = 1
    spec = "trig3d"

    def directions(self, n0, count):
        ns = np.arange(n0, n0 + count, dtype=float)
        return np.column_stack([np.cos(ns), np.sin(ns), np.cos(np.sqrt(ns))])


class UniformSphereSource(DirectionSource):
    """Uniform directions on S^{d-1}: d independent standard Gaussians,
    normalized.  Sequential; the stream is reproducible from the seed and
    independent of how draws are chunked."""

    start_n = 1

    def __init__(self, d: int = 2, seed: int | None = None):
        if int(d) < 1:
            raise ValueError(f"dimension must be >= 1, got {d}")
        self.d = int(d)
        self.seed = seed
        self.rng = np.random.default_rng(seed)
        self.spec = f"sphere:d={self.d}:seed={seed}"

    def directions(self, n0, count):
        g = self.rng.standard_normal((count, self.d))
        return g / np.linalg.norm(g, axis=1, keepdims=True)

    def reseeded(self, seed: int) -> "UniformSphereSource":
        return UniformSphereSource(self.d, seed)


def parse_source(text: str, default_seed: int | None = None) -> DirectionSource:
    """Build a source from a spec string such as "vdc:b=8",
    "sphere:d=4:seed=42", "kronecker:alpha=1.0415*sqrt2",
    "polyphase:c=sqrt2:p=3", "farey", "nip:c=sqrt3", "grow:c=sqrt2" or
    "trig3d"."""
    parts = [p for p in str(text).strip().split(":") if p]
    if not parts:
        raise ValueError("empty source spec")
    kind = parts[0].lower()
    kv: dict[str, str] = {}
    for part in parts[1:]:
        key, sep, val = part.partition("=")
        if not sep:
            raise ValueError(f"malformed source parameter {part!r} in {text!r}")
        kv[key.strip().lower()] = val.strip()

    def _unexpected(allowed):
        extra = set(kv) - set(allowed)
        if extra:
            raise ValueError(f"unexpected parameters {sorted(extra)} for source {kind!r}")

    if kind == "vdc":
        _unexpected({"b"})
        return VanDerCorputSource(int(kv.get("b", 2)))
    if kind == "sphere":
        _unexpected({"d", "seed"})
        seed = int(kv["seed"]) if "seed" in kv else default_seed
        return UniformSphereSource(int(kv.get("d", 2)), seed=seed)
    if kind == "kronecker":
        _unexpected({"alpha"})
        return KroneckerSource(parse_number(kv["alpha"]))
    if kind == "polyphase":
        _unexpected({"c", "p"})
        return PolyPhaseSource(kv["c"], int(kv.get("p", 2)), c_text=kv["c"])
    if kind == "farey":
        _unexpected(set())
        return FareySource()
    if kind == "nip":
        _unexpected({"c"})
        return NearestIntPhaseSource(kv["c"], c_text=kv["c"])
    if kind == "grow":
        _unexpected({"c"})
        return GrowingKroneckerSource(kv["c"], c_text=kv["c"])
    if kind == "trig3d":
        _unexpected(set())
        return Trig3DSource()
    raise ValueError(f"unknown source kind {kind!r}")
