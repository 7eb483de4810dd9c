"""Signatures, interlacing arrays, and the tableau correspondence.

A *signature* of length k is a weakly decreasing tuple of integers (negative
parts allowed).  An *interlacing array* of depth N is a chain of signatures
lambda^(1) < lambda^(2) < ... < lambda^(N) where consecutive rows interlace.
Particle indices are 1-based throughout, matching the usual convention that
index 1 is the rightmost (largest) coordinate of a row.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterator, Sequence

from .errors import BlockedMove, InvalidInput

Signature = tuple[int, ...]


def check_signature(parts: Sequence[int]) -> Signature:
    """Validate weak decrease and return the signature as a tuple."""
    sig = tuple(int(p) for p in parts)
    for i in range(len(sig) - 1):
        if sig[i] < sig[i + 1]:
            raise InvalidInput(f"not weakly decreasing: {sig}")
    return sig


def is_signature(parts: Sequence[int]) -> bool:
    return all(parts[i] >= parts[i + 1] for i in range(len(parts) - 1))


def interlaces(mu: Sequence[int], lam: Sequence[int]) -> bool:
    """True iff mu < lam, i.e. lam_{j+1} <= mu_j <= lam_j for all j.

    Requires len(mu) == len(lam) - 1.
    """
    if len(mu) != len(lam) - 1:
        raise InvalidInput(f"length mismatch: |mu|={len(mu)}, |lambda|={len(lam)}")
    for j in range(len(mu)):
        if not (lam[j + 1] <= mu[j] <= lam[j]):
            return False
    return True


def horizontal_strip(mu: Sequence[int], lam: Sequence[int]) -> bool:
    """True iff lam/mu is a horizontal strip (signatures of equal length)."""
    if len(mu) != len(lam):
        raise InvalidInput("horizontal_strip expects equal lengths; use interlaces otherwise")
    if not all(mu[i] <= lam[i] for i in range(len(mu))):
        return False
    # at most one box per column <=> lam_{j+1} <= mu_j
    return all(lam[j + 1] <= mu[j] for j in range(len(mu) - 1))


def vertical_strip(mu: Sequence[int], lam: Sequence[int]) -> bool:
    """True iff lam/mu is a vertical strip: every row gains at most one box."""
    if len(mu) != len(lam):
        raise InvalidInput("vertical_strip expects equal lengths")
    return all(lam[i] - mu[i] in (0, 1) for i in range(len(mu)))


def add_box(lam: Sequence[int], j: int) -> Signature:
    """Increment coordinate j (1-based).  Raises BlockedMove if the result is not a signature."""
    if not 1 <= j <= len(lam):
        raise InvalidInput(f"index {j} out of range for length {len(lam)}")
    if j > 1 and lam[j - 1] >= lam[j - 2]:
        raise BlockedMove(f"coordinate {j} of {tuple(lam)} is blocked")
    return tuple(lam[:j - 1]) + (lam[j - 1] + 1,) + tuple(lam[j:])


def free_indices(nu_bar: Sequence[int], lam: Sequence[int]) -> tuple[int, ...]:
    """Indices j (1-based) with lam_j < nu_bar_{j-1}, reading nu_bar_0 = +infinity.

    These are the particles of the upper row that are not blocked by the lower
    row; index 1 is always free.
    """
    if len(nu_bar) != len(lam) - 1:
        raise InvalidInput("free_indices expects lower row one shorter than upper row")
    out = [1]
    for j in range(2, len(lam) + 1):
        if lam[j - 1] < nu_bar[j - 2]:
            out.append(j)
    return tuple(out)


def xi(nu_bar: Sequence[int], lam: Sequence[int], i: int) -> int:
    """First free index <= i: the particle that receives a donated move aimed at i."""
    free = free_indices(nu_bar, lam)
    best = 1
    for j in free:
        if j <= i:
            best = j
    return best


def xi_inverse(nu_bar: Sequence[int], lam: Sequence[int], m: int) -> int | None:
    """The unique j with j+1 free and xi(j) == m, or None if no push lands at m."""
    free = free_indices(nu_bar, lam)
    if m not in free:
        return None
    pos = free.index(m)
    if pos + 1 >= len(free):
        return None
    return free[pos + 1] - 1


@dataclass(frozen=True)
class InterlacingArray:
    """A Gelfand-Tsetlin scheme: levels[k-1] is the length-k row, k = 1..depth."""

    levels: tuple[Signature, ...]

    def __post_init__(self):
        levels = tuple(check_signature(row) for row in self.levels)
        object.__setattr__(self, "levels", levels)
        for k, row in enumerate(levels, start=1):
            if len(row) != k:
                raise InvalidInput(f"row {k} has length {len(row)}, expected {k}")
        for k in range(1, len(levels)):
            if not interlaces(levels[k - 1], levels[k]):
                raise InvalidInput(
                    f"rows {k} and {k + 1} do not interlace: {levels[k - 1]} vs {levels[k]}"
                )

    @property
    def depth(self) -> int:
        return len(self.levels)

    @property
    def top(self) -> Signature:
        return self.levels[-1]

    @classmethod
    def zeros(cls, depth: int) -> "InterlacingArray":
        return cls(tuple((0,) * k for k in range(1, depth + 1)))

    def row(self, k: int) -> Signature:
        """Row at level k (1-based)."""
        return self.levels[k - 1]

    def with_move(self, k: int, j: int) -> "InterlacingArray":
        """New array with coordinate j of level k incremented (interlacing re-checked)."""
        rows = list(self.levels)
        rows[k - 1] = add_box(rows[k - 1], j)
        return InterlacingArray(tuple(rows))

    def to_text(self) -> str:
        """Canonical text form: rows bottom to top, coordinates left to right
        (increasing), rows separated by ';'."""
        return ";".join(",".join(str(c) for c in reversed(row)) for row in self.levels)

    @classmethod
    def from_text(cls, text: str) -> "InterlacingArray":
        rows = []
        for chunk in text.strip().split(";"):
            coords = [int(tok) for tok in chunk.split(",") if tok.strip() != ""]
            rows.append(tuple(reversed(coords)))
        return cls(tuple(rows))


def tableau_to_array(rows: Sequence[Sequence[int]], depth: int) -> InterlacingArray:
    """Semistandard tableau over {1..depth} -> interlacing array.

    Row k of the array is the shape occupied by the letters 1..k.
    """
    for r, row in enumerate(rows):
        for c, x in enumerate(row):
            if not 1 <= x <= depth:
                raise InvalidInput(f"letter {x} outside alphabet 1..{depth}")
            if c + 1 < len(row) and row[c + 1] < x:
                raise InvalidInput("rows of a semistandard tableau must weakly increase")
            if r + 1 < len(rows) and c < len(rows[r + 1]) and rows[r + 1][c] <= x:
                raise InvalidInput("columns of a semistandard tableau must strictly increase")
    if len(rows) > depth:
        raise InvalidInput(f"tableau has {len(rows)} rows, more than depth {depth}")
    levels = []
    for k in range(1, depth + 1):
        shape = [sum(1 for x in row if x <= k) for row in rows]
        shape += [0] * (k - len(shape))
        levels.append(tuple(shape[:k]))
    return InterlacingArray(tuple(levels))


def array_to_tableau(arr: InterlacingArray) -> tuple[tuple[int, ...], ...]:
    """Interlacing array (nonnegative rows) -> semistandard tableau rows."""
    if any(c < 0 for row in arr.levels for c in row):
        raise InvalidInput("tableau correspondence needs nonnegative coordinates")
    n = arr.depth
    rows: list[list[int]] = [[] for _ in range(n)]
    prev = [0] * n
    for k in range(1, n + 1):
        cur = list(arr.row(k)) + [0] * (n - k)
        for i in range(n):
            rows[i].extend([k] * (cur[i] - prev[i]))
        prev = cur
    return tuple(tuple(r) for r in rows if r)


@dataclass(frozen=True)
class SkewChain:
    """A skew semistandard tableau as its chain of interlacing signatures,
    bottom shape first.  Consecutive rows either grow in length by one
    (trapezoidal chain) or keep their length (padded columns), and each step
    must be a horizontal strip."""

    rows: tuple[Signature, ...]

    def __post_init__(self):
        rows = tuple(check_signature(r) for r in self.rows)
        object.__setattr__(self, "rows", rows)
        for lower, upper in zip(rows, rows[1:]):
            if len(upper) == len(lower) + 1:
                ok = interlaces(lower, upper)
            elif len(upper) == len(lower):
                ok = horizontal_strip(lower, upper)
            else:
                raise InvalidInput("chain rows must grow by at most one part per step")
            if not ok:
                raise InvalidInput(f"chain step {lower} -> {upper} is not a horizontal strip")

    @property
    def bottom(self) -> Signature:
        return self.rows[0]

    @property
    def top(self) -> Signature:
        return self.rows[-1]

    def letter_counts(self) -> tuple[int, ...]:
        """Number of boxes each letter occupies (the exponent of x_i in the
        tableau monomial)."""
        return tuple(
            sum(upper) - sum(lower) for lower, upper in zip(self.rows, self.rows[1:])
        )


def skew_chains(lam: Sequence[int], mu: Sequence[int], letters: int) -> Iterator[SkewChain]:
    """All skew semistandard tableaux of shape lam/mu over {1..letters}.

    With len(lam) == len(mu) the chain keeps row lengths fixed (equal-length
    horizontal strips); with len(lam) == len(mu) + letters it grows one part
    per step.  Yields nothing when no tableau exists.
    """
    lam = check_signature(lam)
    mu = check_signature(mu)
    if len(mu) < len(lam) <= len(mu) + letters and (not lam or lam[-1] >= 0):
        lam = lam + (0,) * (len(mu) + letters - len(lam))  # trapezoid convention
    growing = len(lam) == len(mu) + letters
    if not growing and len(lam) != len(mu):
        raise InvalidInput("skew_chains needs len(lam) == len(mu) or len(mu) + letters")

    def rec(top: Signature, depth: int) -> Iterator[tuple[Signature, ...]]:
        if depth == 0:
            if top == mu:
                yield (top,)
            return
        if growing:
            below = interlacing_predecessors(top)
        else:
            below = (
                k
                for k in itertools.product(
                    *(
                        range(max(mu[i], top[i + 1] if i + 1 < len(top) else mu[i]), top[i] + 1)
                        for i in range(len(top))
                    )
                )
                if is_signature(k)
            )
        for kappa in below:
            if growing and any(kappa[i] < mu[i] for i in range(min(len(kappa), len(mu)))):
                continue
            for chain in rec(tuple(kappa), depth - 1):
                yield chain + (top,)

    for chain in rec(lam, letters):
        yield SkewChain(chain)


def interlacing_predecessors(lam: Sequence[int]) -> Iterator[Signature]:
    """All signatures nu_bar of length len(lam)-1 with nu_bar < lam."""
    k = len(lam)
    if k == 0:
        return
    ranges = [range(lam[j + 1], lam[j] + 1) for j in range(k - 1)]
    for combo in itertools.product(*ranges):
        yield combo


def enumerate_arrays(lam_top: Sequence[int], depth: int) -> Iterator[InterlacingArray]:
    """All interlacing arrays of the given depth whose top row is lam_top.

    lam_top is zero-padded to length `depth`; it must be nonnegative if padding
    is needed.  Iteration is level by level from the top, O(depth) memory.
    """
    lam_top = check_signature(lam_top)
    if len(lam_top) > depth:
        raise InvalidInput("top row longer than requested depth")
    if len(lam_top) < depth:
        if lam_top and lam_top[-1] < 0:
            raise InvalidInput("cannot zero-pad a signature with negative parts")
        lam_top = lam_top + (0,) * (depth - len(lam_top))

    def rec(upper: Signature) -> Iterator[tuple[Signature, ...]]:
        if len(upper) == 1:
            yield (upper,)
            return
        for nu in interlacing_predecessors(upper):
            for chain in rec(nu):
                yield chain + (upper,)

    for chain in rec(lam_top):
        yield InterlacingArray(chain)
