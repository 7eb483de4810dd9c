"""Deterministic insertion algorithms of the Schur regime and the induced
word <-> tableau-pair bijections.

An insertion rule is indexed by a vector h with 1 <= h[k] <= k+1 per level
(0-based k); h = (1,...,1) is the classical row insertion and h = (1,2,...,N)
the column insertion.  Inserting a letter m moves exactly one particle at each
of the levels m..N of the interlacing array:

  start   the particle at index h^(m) of level m tries to jump (donating the
          move to its first free right neighbor when blocked);
  step    after a move at index j of level k-1, level k moves at index j
          (a push, donated when blocked) if the pre-move coordinates matched
          or j < h^(k); otherwise at index j+1 (a pull, never blocked).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Sequence

from .arrays import InterlacingArray, array_to_tableau, free_indices, tableau_to_array, xi, xi_inverse
from .errors import InvalidInput, ResourceLimit

Word = tuple[int, ...]
Move = tuple[int, int]  # (level, 1-based index)


def check_h_vector(h: Sequence[int], depth: int | None = None) -> tuple[int, ...]:
    h = tuple(int(v) for v in h)
    if depth is not None and len(h) != depth:
        raise InvalidInput(f"h-vector must have length {depth}, got {len(h)}")
    for k, v in enumerate(h, start=1):
        if not 1 <= v <= k:
            raise InvalidInput(f"h-vector entry {v} at level {k} outside 1..{k}")
    return h


def _donate(rows: list[list[int]], k: int, j: int) -> int:
    """Redirect a move at (level k, index j) to the first free index <= j."""
    if k == 1:
        return 1
    return xi(rows[k - 2], rows[k - 1], j)


def _h_insert_rows(rows: list[list[int]], letter: int, h: Sequence[int]) -> list[Move]:
    """In-place h-insertion on row buffers; returns the move list."""
    n = len(rows)
    j = _donate(rows, letter, h[letter - 1])
    prev = rows[letter - 1][j - 1]
    rows[letter - 1][j - 1] += 1
    moves: list[Move] = [(letter, j)]
    for k in range(letter + 1, n + 1):
        if rows[k - 1][j - 1] == prev or j < h[k - 1]:
            target = _donate(rows, k, j)
        else:
            target = j + 1
        prev = rows[k - 1][target - 1]
        rows[k - 1][target - 1] += 1
        moves.append((k, target))
        j = target
    return moves


def h_insert_trace(arr: InterlacingArray, letter: int, h: Sequence[int]):
    """h-insert `letter` into `arr`; returns (new array, list of moves).

    Exactly one coordinate increments at each level letter..depth.
    """
    h = check_h_vector(h, arr.depth)
    n = arr.depth
    if not 1 <= letter <= n:
        raise InvalidInput(f"letter {letter} outside alphabet 1..{n}")
    rows = [list(r) for r in arr.levels]
    moves = _h_insert_rows(rows, letter, h)
    return InterlacingArray(tuple(tuple(r) for r in rows)), moves


def h_insert(arr: InterlacingArray, letter: int, h: Sequence[int]) -> InterlacingArray:
    return h_insert_trace(arr, letter, h)[0]


@dataclass(frozen=True)
class TableauPair:
    """An insertion tableau P (semistandard) and recording tableau Q (standard)
    of equal shape."""

    p_rows: tuple[tuple[int, ...], ...]
    q_rows: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        if tuple(len(r) for r in self.p_rows) != tuple(len(r) for r in self.q_rows):
            raise InvalidInput("P and Q must have equal shape")
        entries = sorted(x for row in self.q_rows for x in row)
        if entries != list(range(1, len(entries) + 1)):
            raise InvalidInput("Q must contain 1..n once each")
        for r, row in enumerate(self.q_rows):
            for c in range(len(row)):
                if c + 1 < len(row) and row[c + 1] <= row[c]:
                    raise InvalidInput("Q rows must strictly increase")
                if r + 1 < len(self.q_rows) and c < len(self.q_rows[r + 1]):
                    if self.q_rows[r + 1][c] <= row[c]:
                        raise InvalidInput("Q columns must strictly increase")

    @property
    def shape(self) -> tuple[int, ...]:
        return tuple(len(r) for r in self.p_rows)

    @property
    def size(self) -> int:
        return sum(self.shape)


def h_rs_forward(word: Sequence[int], h: Sequence[int]) -> TableauPair:
    """The h-insertion correspondence: word -> (P, Q)."""
    h = check_h_vector(h)
    n = len(h)
    rows = [[0] * k for k in range(1, n + 1)]
    q_rows: list[list[int]] = [[] for _ in range(n)]
    for step, letter in enumerate(word, start=1):
        if not 1 <= letter <= n:
            raise InvalidInput(f"letter {letter} outside alphabet 1..{n}")
        moves = _h_insert_rows(rows, letter, h)
        q_rows[moves[-1][1] - 1].append(step)
    arr = InterlacingArray(tuple(tuple(r) for r in rows))
    p_rows = array_to_tableau(arr)
    return TableauPair(p_rows, tuple(tuple(r) for r in q_rows if r))


def h_rs_inverse(pair: TableauPair, h: Sequence[int]) -> Word:
    """Recover the word from (P, Q) under the h-insertion correspondence.

    Reconstructs insertion trajectories last letter first: the Q entry locates
    the level-N endpoint, then on each slice exactly one of {independent jump,
    pull by j-1, push by xi^{-1}(j)} explains the move.
    """
    h = check_h_vector(h)
    n = len(h)
    arr = tableau_to_array(pair.p_rows, n)
    rows = [list(r) for r in arr.levels]
    where = {}
    for r, row in enumerate(pair.q_rows, start=1):
        for entry in row:
            where[entry] = r
    q_shape = [len(r) for r in pair.q_rows]
    word_rev = []
    for step in range(pair.size, 0, -1):
        j = where[step]
        if q_shape[j - 1] == 0:
            raise InvalidInput("recording tableau inconsistent with shape")
        q_shape[j - 1] -= 1
        k = n
        while True:
            rows[k - 1][j - 1] -= 1
            if j < k and rows[k - 1][j - 1] < rows[k - 1][j]:
                raise InvalidInput(f"pair not in the image: row {k} breaks at step {step}")
            if k == 1:
                if j != 1:
                    raise InvalidInput("pair not in the image: bad endpoint at level 1")
                letter = 1
                break
            nu_bar, lam = rows[k - 2], rows[k - 1]
            if j <= k - 1 and lam[j - 1] < nu_bar[j - 1]:
                k -= 1  # short-range push: the mover below had the same index
                continue
            if j not in free_indices(nu_bar, lam):
                raise InvalidInput("pair not in the image: moved particle was blocked")
            hk = h[k - 1]
            if xi(nu_bar, lam, hk) == j:
                letter = k
                break
            if hk < j:
                if j == 1:
                    raise InvalidInput("pair not in the image: no puller available")
                j = j - 1
            else:
                i = xi_inverse(nu_bar, lam, j)
                if i is None:
                    raise InvalidInput("pair not in the image: no pusher available")
                j = i
            k -= 1
        word_rev.append(letter)
    if any(c != 0 for row in rows for c in row):
        raise InvalidInput("pair not in the image: residue after unwinding")
    return tuple(reversed(word_rev))


def permutation_words(n: int) -> list[Word]:
    """All permutation words of length n, in lexicographic order."""
    return [tuple(p) for p in itertools.permutations(range(1, n + 1))]


def f_h(word: Sequence[int], h: Sequence[int]) -> Word:
    """The bijection of permutation words given by h-insertion followed by the
    inverse row insertion."""
    word = tuple(word)
    n = len(word)
    if sorted(word) != list(range(1, n + 1)):
        raise InvalidInput("f_h is defined on permutation words")
    h = check_h_vector(h, n)
    pair = h_rs_forward(word, h)
    return h_rs_inverse(pair, (1,) * n)


def f_h_table(n: int) -> dict[tuple[int, ...], list[Word]]:
    """Images of all permutation words under every f_h, keyed by h-vector."""
    words = permutation_words(n)
    table = {}
    for h in itertools.product(*(range(1, k + 1) for k in range(1, n + 1))):
        table[h] = [f_h(w, h) for w in words]
    return table


# --- permutation group generated by the f_h maps -------------------------------

def _perm_mul(p: tuple, q: tuple) -> tuple:
    """Composition acting on points: (p * q)(x) = p(q(x))."""
    return tuple(p[i] for i in q)


def _perm_inv(p: tuple) -> tuple:
    out = [0] * len(p)
    for i, v in enumerate(p):
        out[v] = i
    return tuple(out)


def _bsgs_order(generators: list[tuple]) -> int:
    """Order of the group generated by `generators` via a deterministic
    stabilizer chain (base and strong generating set).

    Levels are verified deepest-first; Schreier generators that do not sift to
    the identity are appended as strong generators at the level where sifting
    fails, and verification resumes there.
    """
    degree = len(generators[0]) if generators else 0
    identity = tuple(range(degree))
    gens = [g for g in dict.fromkeys(generators) if g != identity]
    if not gens:
        return 1
    base: list[int] = []
    transversals: list[dict[int, tuple]] = []

    def extend_base_for(g: tuple) -> None:
        if all(g[b] == b for b in base):
            base.append(next(p for p in range(degree) if g[p] != p))
            transversals.append({})

    for g in gens:
        extend_base_for(g)

    def level_gens(i: int) -> list[tuple]:
        prefix = base[:i]
        return [g for g in gens if all(g[b] == b for b in prefix)]

    def orbit_transversal(i: int, xs: list[tuple]) -> dict[int, tuple]:
        b = base[i]
        trans = {b: identity}
        frontier = [b]
        while frontier:
            pt = frontier.pop()
            rep = trans[pt]
            for g in xs:
                img = g[pt]
                if img not in trans:
                    trans[img] = _perm_mul(g, rep)
                    frontier.append(img)
        return trans

    def strip(g: tuple, start: int) -> tuple[tuple, int]:
        for lev in range(start, len(base)):
            rep = transversals[lev].get(g[base[lev]])
            if rep is None:
                return g, lev
            g = _perm_mul(_perm_inv(rep), g)
        return g, len(base)

    i = len(base) - 1
    while i >= 0:
        xs = level_gens(i)
        trans = orbit_transversal(i, xs)
        transversals[i] = trans
        descended = False
        for pt, rep in trans.items():
            for g in xs:
                schreier = _perm_mul(_perm_inv(trans[g[pt]]), _perm_mul(g, rep))
                if schreier == identity:
                    continue
                residue, at = strip(schreier, i + 1)
                if residue == identity:
                    continue
                gens.append(residue)
                extend_base_for(residue)
                i = at
                descended = True
                break
            if descended:
                break
        if descended:
            continue
        i -= 1

    order = 1
    for trans in transversals:
        order *= len(trans)
    return order


def group_order(n: int, limit: int = 5) -> int:
    """Order of the subgroup of permutations of the n! permutation words that
    is generated by all the maps f_h.

    Uses a stabilizer chain on degree n!; n = 5 (degree 120) is supported but
    expensive and refused above `limit`.
    """
    if n < 1:
        raise InvalidInput("n must be positive")
    if n > limit:
        raise ResourceLimit(f"group order on degree {n}! refused (limit {limit}!)")
    words = permutation_words(n)
    index = {w: i for i, w in enumerate(words)}
    gens = []
    for h in itertools.product(*(range(1, k + 1) for k in range(1, n + 1))):
        gens.append(tuple(index[f_h(w, h)] for w in words))
    return _bsgs_order(gens)
