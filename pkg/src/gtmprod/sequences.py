"""Strongly q-multiplicative sign sequences.

A sequence here is a map n -> delta_n in {+1, -1} with delta_0 = +1 and
delta_{nq+k} = delta_n * delta_k for every base-q digit k.  It is fully
determined by its first q signs, so we never materialize terms: element
access and partial sums walk the base-q digits of n in O(log n) exact
integer arithmetic.  The only materialized form is the substitution
fixed point produced by ``morphism_prefix``, which serves as an
independent oracle in tests.

Supported families:

* ``gtm``     -- fixed point of 0 -> 0 t_1 .. t_{q-1}, 1 -> complement,
                 read through (-1)^theta;
* ``dcount``  -- parity of the number of occurrences of one digit k;
* ``dparity`` -- parity of the base-q digit sum.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property
from itertools import product as _cartesian

import numpy as np

MORPHISM_PREFIX_CAP = 10**7
EXTREMAL_Q_CAP = 6
EXTREMAL_K_CAP = 6


class SequenceError(ValueError):
    """Bad sequence construction parameters or spec string."""


def _as_bit(value) -> int:
    b = int(value)
    if b not in (0, 1):
        raise SequenceError(f"bit must be 0 or 1, got {value!r}")
    return b


def normalize_gtm_bits(q: int, bits) -> tuple[int, ...]:
    """Return (theta_1, ..., theta_{q-1}) from either accepted surface form.

    Both the bare tail ``t_1..t_{q-1}`` and the full word ``t_0 t_1..t_{q-1}``
    (which then must start with 0) are accepted; both appear in the wild.
    """
    if isinstance(bits, str):
        seq = [_as_bit(c) for c in bits]
    else:
        seq = [_as_bit(b) for b in bits]
    if len(seq) == q - 1:
        return tuple(seq)
    if len(seq) == q:
        if seq[0] != 0:
            raise SequenceError("q-length bit word must start with 0")
        return tuple(seq[1:])
    raise SequenceError(
        f"expected {q - 1} bits (or {q} with a leading 0), got {len(seq)}"
    )


@dataclass(frozen=True)
class SignPattern:
    """First q signs (delta_0 .. delta_{q-1}) of a sequence; delta_0 = +1."""

    q: int
    signs: tuple[int, ...]

    def __post_init__(self):
        if self.q < 2:
            raise SequenceError(f"q must be >= 2, got {self.q}")
        if len(self.signs) != self.q:
            raise SequenceError("need exactly q signs")
        if any(s not in (1, -1) for s in self.signs):
            raise SequenceError("signs must be +1 or -1")
        if self.signs[0] != 1:
            raise SequenceError("signs[0] must be +1")

    @property
    def nontrivial(self) -> bool:
        return any(s == -1 for s in self.signs)

    @cached_property
    def prefix_sums(self) -> tuple[int, ...]:
        """(Delta_0, ..., Delta_q): running sums of the first q signs."""
        out = [0]
        for s in self.signs:
            out.append(out[-1] + s)
        return tuple(out)

    @property
    def delta_q(self) -> int:
        return self.prefix_sums[self.q]


@dataclass(frozen=True)
class MultiplicativeSequence:
    """A strongly q-multiplicative +-1 sequence plus its construction tag."""

    pattern: SignPattern
    kind: str
    spec: str

    @property
    def q(self) -> int:
        return self.pattern.q

    @property
    def signs(self) -> tuple[int, ...]:
        return self.pattern.signs

    @property
    def nontrivial(self) -> bool:
        return self.pattern.nontrivial

    @property
    def delta_q(self) -> int:
        return self.pattern.delta_q

    def sign_at(self, n: int) -> int:
        return sign_at(self, n)

    def theta_at(self, n: int) -> int:
        return theta_at(self, n)

    def partial_sum(self, n: int) -> int:
        return partial_sum(self, n)

    def __str__(self) -> str:
        return self.spec


def make_sequence(kind: str, q: int, *, bits=None, k: int | None = None) -> MultiplicativeSequence:
    """Construct a sequence of the given kind.

    ``gtm`` needs ``bits`` (theta_1..theta_{q-1}); ``dcount`` needs the
    counted digit ``k`` with 1 <= k <= q-1; ``dparity`` needs neither.
    The all-plus gtm pattern is constructible but flagged trivial; product
    evaluation rejects it downstream.
    """
    if q < 2:
        raise SequenceError(f"q must be >= 2, got {q}")
    if kind == "gtm":
        if bits is None:
            raise SequenceError("gtm sequence needs theta bits")
        tail = normalize_gtm_bits(q, bits)
        signs = (1,) + tuple(1 - 2 * b for b in tail)
        spec = "gtm:%d:%s" % (q, "".join(str(b) for b in tail))
    elif kind == "dcount":
        if k is None or not 1 <= k <= q - 1:
            raise SequenceError(f"dcount digit k must satisfy 1 <= k <= q-1, got {k}")
        signs = tuple(-1 if j == k else 1 for j in range(q))
        spec = f"dcount:{q}:{k}"
    elif kind == "dparity":
        signs = tuple(1 - 2 * (j % 2) for j in range(q))
        spec = f"dparity:{q}"
    else:
        raise SequenceError(f"unknown sequence kind {kind!r}")
    return MultiplicativeSequence(SignPattern(q, signs), kind, spec)


def parse_seq_spec(text: str) -> MultiplicativeSequence:
    """Parse ``gtm:<q>:<bits>``, ``dcount:<q>:<k>`` or ``dparity:<q>``."""
    parts = text.strip().split(":")
    try:
        if parts[0] == "gtm" and len(parts) == 3:
            return make_sequence("gtm", int(parts[1]), bits=parts[2])
        if parts[0] == "dcount" and len(parts) == 3:
            return make_sequence("dcount", int(parts[1]), k=int(parts[2]))
        if parts[0] == "dparity" and len(parts) == 2:
            return make_sequence("dparity", int(parts[1]))
    except SequenceError:
        raise
    except ValueError as exc:
        raise SequenceError(f"bad sequence spec {text!r}: {exc}") from None
    raise SequenceError(f"bad sequence spec {text!r}")


def _digits_msb(n: int, q: int) -> list[int]:
    if n == 0:
        return []
    out = []
    while n:
        n, d = divmod(n, q)
        out.append(d)
    out.reverse()
    return out


def sign_at(seq: MultiplicativeSequence, n: int) -> int:
    """delta_n: product of the pattern signs over the base-q digits of n."""
    if n < 0:
        raise ValueError("n must be >= 0")
    signs = seq.signs
    q = seq.q
    out = 1
    while n:
        n, d = divmod(n, q)
        out *= signs[d]
    return out


def theta_at(seq: MultiplicativeSequence, n: int) -> int:
    """theta_n = (1 - delta_n) / 2 in {0, 1}."""
    return (1 - sign_at(seq, n)) // 2


def partial_sum(seq: MultiplicativeSequence, n: int) -> int:
    """Delta_n = delta_0 + ... + delta_{n-1} via the digit recursion.

    Folding digits most-significant first keeps the pair
    (Delta_of_prefix, delta_of_prefix); appending digit d maps
    Delta -> Delta * Delta_q + delta * Delta_d.
    """
    if n < 0:
        raise ValueError("n must be >= 0")
    pre = seq.pattern.prefix_sums
    dq = seq.delta_q
    signs = seq.signs
    total, s = 0, 1
    for d in _digits_msb(n, seq.q):
        total = total * dq + s * pre[d]
        s *= signs[d]
    return total


def partial_sums_upto(seq: MultiplicativeSequence, n_max: int) -> np.ndarray:
    """Vectorized Delta_0..Delta_{n_max} (same digit recursion, all n at once)."""
    if n_max < 0:
        raise ValueError("n_max must be >= 0")
    q = seq.q
    pre = np.array(seq.pattern.prefix_sums[: q], dtype=np.int64)
    sgn = np.array(seq.signs, dtype=np.int64)
    dq = seq.delta_q
    n = np.arange(n_max + 1, dtype=np.int64)
    total = np.zeros_like(n)
    s = np.ones_like(n)
    ndigits = len(_digits_msb(n_max, q)) if n_max else 0
    for j in range(ndigits - 1, -1, -1):
        d = (n // q**j) % q
        total = total * dq + s * pre[d]
        s = s * sgn[d]
    return total


def delta_prefix(seq: MultiplicativeSequence, length: int) -> np.ndarray:
    """First ``length`` signs as int8, grown block-wise from the pattern.

    Uses delta over [k*q^m, (k+1)*q^m) = delta_k * (delta over [0, q^m)).
    """
    if length < 0:
        raise ValueError("length must be >= 0")
    arr = np.array([1], dtype=np.int8)
    signs = seq.signs
    while arr.size < length:
        out = np.empty(arr.size * seq.q, dtype=np.int8)
        for i, s in enumerate(signs):
            out[i * arr.size:(i + 1) * arr.size] = s * arr if s < 0 else arr
        arr = out
    return arr[:length]


def delta_slice(seq: MultiplicativeSequence, lo: int, hi: int) -> np.ndarray:
    """Signs delta_n for n in [lo, hi), computed digit-wise (no big prefix)."""
    if lo < 0 or hi < lo:
        raise ValueError("need 0 <= lo <= hi")
    n = np.arange(lo, hi, dtype=np.int64)
    out = np.ones(hi - lo, dtype=np.int64)
    sgn = np.array(seq.signs, dtype=np.int64)
    q = seq.q
    p = 1
    while p <= max(hi - 1, 0):
        out *= sgn[(n // p) % q]
        p *= q
    return out


def morphism_prefix(q: int, theta_bits, length: int, cap: int = MORPHISM_PREFIX_CAP) -> list[int]:
    """First ``length`` letters of the substitution fixed point (theta values).

    Independent oracle: iterates 0 -> 0 t_1 .. t_{q-1}, 1 -> complemented
    image, starting from the letter 0, with no digit arithmetic.
    """
    if length < 0:
        raise ValueError("length must be >= 0")
    if length > cap:
        raise ValueError(f"requested prefix length {length} exceeds cap {cap}")
    tail = normalize_gtm_bits(q, theta_bits)
    img = ((0,) + tail, (1,) + tuple(1 - b for b in tail))
    word = [0]
    while len(word) < length:
        word = [b for letter in word for b in img[letter]]
    return word[:length]


def digit_stats(q: int, n: int) -> tuple[tuple[int, ...], int]:
    """Counts of each nonzero digit in base q plus the weighted digit sum.

    Returns ((N_1, ..., N_{q-1}), sum of digits).
    """
    if q < 2:
        raise SequenceError(f"q must be >= 2, got {q}")
    if n < 0:
        raise ValueError("n must be >= 0")
    counts = [0] * q
    s = 0
    while n:
        n, d = divmod(n, q)
        counts[d] += 1
        s += d
    return tuple(counts[1:]), s


def geometric_bound(q: int, k: int) -> int:
    """1 + (q-2) + ... + (q-2)^k with the 0^0 := 1 convention."""
    total = 0
    for i in range(k + 1):
        total += 1 if i == 0 else (q - 2) ** i
    return total


def extremal_partial_sums(q: int, k: int) -> tuple[int, int]:
    """Brute-force extremes of |Delta| over all nontrivial sign tuples.

    Returns (max |Delta_{q^k}|, max_{n <= q^k} |Delta_n|), both maximized
    over every (delta_1..delta_{q-1}) != (+1,...,+1).  No closed formulas
    are used here; matching them is left to the tests.
    """
    if q < 2 or k < 0:
        raise ValueError("need q >= 2 and k >= 0")
    if q > EXTREMAL_Q_CAP or k > EXTREMAL_K_CAP:
        raise ValueError(
            f"enumeration capped at q <= {EXTREMAL_Q_CAP}, k <= {EXTREMAL_K_CAP}"
        )
    n_top = q**k
    best_at_power = 0
    best_upto = 0
    for tail in _cartesian((1, -1), repeat=q - 1):
        if all(s == 1 for s in tail):
            continue
        seq = MultiplicativeSequence(SignPattern(q, (1,) + tail), "gtm", "enum")
        best_at_power = max(best_at_power, abs(partial_sum(seq, n_top)))
        deltas = np.concatenate(
            ([0], np.cumsum(delta_prefix(seq, n_top), dtype=np.int64))
        )
        best_upto = max(best_upto, int(np.abs(deltas).max()))
    return best_at_power, best_upto


def k0_threshold(q: int) -> int:
    """Smallest k with 1 + (q-2) + ... + (q-2)^{k+1} <= (q-1)^k.

    Past this level every n >= q^k satisfies |Delta_n| <= n^(log_q(q-1)).
    """
    if q < 2:
        raise SequenceError(f"q must be >= 2, got {q}")
    k = 0
    while geometric_bound(q, k + 1) > (q - 1) ** k:
        k += 1
    return k


def asymptotic_exponent(q: int) -> float:
    """log_q(q-1), the growth exponent of the worst-case partial sums."""
    return math.log(q - 1) / math.log(q)
