"""Macdonald polynomial kernel: branching coefficients, skew polynomials,
stochastic links, univariate jump rates, the one-step Markov operator, and
the Schur/Plancherel closed forms.

All coefficient formulas are ratios of products f(q^a t^b) with
f(u) = (tu;q)_inf / (qu;q)_inf.  Because every exponent is an integer, the
infinite q-Pochhammer symbols cancel down to finite products of factors
(1 - q^x t^y); `_pochhammer_ledger` performs that cancellation symbolically
on the exponents, so evaluation is exact over Fractions and never touches an
infinite product.
"""

from __future__ import annotations

import itertools
import math
from collections import Counter, defaultdict
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Sequence

from .arrays import (
    Signature,
    check_signature,
    horizontal_strip,
    interlaces,
    interlacing_predecessors,
    vertical_strip,
)
from .errors import BlockedMove, InvalidInput

_EXACT_TYPES = (int, Fraction)


@dataclass(frozen=True)
class MacParams:
    """The two deformation parameters, 0 <= q, t < 1.

    Mode is inferred: q == t gives the Schur case (all branching coefficients
    are indicators), t == 0 the q-Whittaker case, anything else is general.
    """

    q: object
    t: object

    def __post_init__(self):
        if not (0 <= self.q < 1 and 0 <= self.t < 1):
            raise InvalidInput(f"parameters must lie in [0,1): q={self.q}, t={self.t}")

    @property
    def mode(self) -> str:
        if self.q == self.t:
            return "schur"
        if self.t == 0:
            return "q-whittaker"
        return "general"

    @property
    def is_exact(self) -> bool:
        return isinstance(self.q, _EXACT_TYPES) and isinstance(self.t, _EXACT_TYPES)

    def one(self):
        return Fraction(1) if self.is_exact else 1.0


SCHUR = MacParams(0, 0)


@dataclass(frozen=True)
class Specialization:
    """Nonnegative specialization used by this package.

    variant: 'alpha' (finitely many usual variables), 'beta' (a single dual
    variable), or 'plancherel' (gamma >= 0, playing the role of time).
    """

    variant: str
    values: tuple

    def __post_init__(self):
        if self.variant == "alpha":
            if not all(v > 0 for v in self.values):
                raise InvalidInput("alpha parameters must be positive")
        elif self.variant == "beta":
            if len(self.values) != 1 or self.values[0] <= 0:
                raise InvalidInput("single dual variable must be positive")
        elif self.variant == "plancherel":
            if len(self.values) != 1 or self.values[0] < 0:
                raise InvalidInput("plancherel parameter must be nonnegative")
        else:
            raise InvalidInput(f"unknown specialization variant {self.variant!r}")


def finite_alpha(*a) -> Specialization:
    return Specialization("alpha", tuple(a))


def single_dual_beta(beta) -> Specialization:
    return Specialization("beta", (beta,))


def plancherel(gamma) -> Specialization:
    return Specialization("plancherel", (gamma,))


# --- exact evaluation of f-products ------------------------------------------

def qt_power(q, t, a: int, b: int):
    """q**a * t**b with the 0**0 = 1 convention baked into Python's **."""
    return q ** a * t ** b


def factor_product(num: Counter, den: Counter, q, t):
    """prod (1 - q^a t^b) over num / same over den, cancelling common exponent
    pairs first so that coincidences like t**2 == q never produce 0/0."""
    net = Counter(num)
    net.subtract(den)
    one = Fraction(1) if isinstance(q, _EXACT_TYPES) and isinstance(t, _EXACT_TYPES) else 1.0
    result = one
    for (a, b), mult in net.items():
        if mult == 0:
            continue
        factor = one - qt_power(q, t, a, b)
        if factor == 0:
            if mult > 0:
                return 0 * one
            raise ZeroDivisionError(f"vanishing denominator factor (1 - q^{a} t^{b})")
        result *= factor ** mult
    return result


def _pochhammer_ledger(entries, q, t):
    """Evaluate prod_i ((q^{a_i} t^{b_i}; q)_inf)^{s_i} given that the signed
    entries telescope to a finite product of (1 - q^x t^y) factors.

    entries: iterable of (a, b, s).  Entries are grouped by the t-exponent;
    within each group the net multiplicity of (1 - q^x t^b) is the running sum
    of signs over a_i <= x, which must return to zero past the largest a_i.
    """
    groups: dict[int, Counter] = defaultdict(Counter)
    for a, b, s in entries:
        groups[b][a] += s
    num: Counter = Counter()
    den: Counter = Counter()
    for b, ctr in groups.items():
        xs = sorted(x for x, c in ctr.items() if c)
        if not xs:
            continue
        running = 0
        for pos, x in enumerate(xs):
            running += ctr[x]
            if pos + 1 == len(xs):
                if running != 0:
                    raise ArithmeticError("q-Pochhammer product does not terminate")
                break
            if running > 0:
                for e in range(x, xs[pos + 1]):
                    num[(e, b)] += running
            elif running < 0:
                for e in range(x, xs[pos + 1]):
                    den[(e, b)] -= running
    return factor_product(num, den, q, t)


def _f_entries(a: int, b: int, sign: int):
    """f(q^a t^b) = (q^a t^{b+1}; q)_inf / (q^{a+1} t^b; q)_inf."""
    return ((a, b + 1, sign), (a + 1, b, -sign))


# --- branching coefficients psi, phi, psi' ------------------------------------

def _shift_to_partitions(kappa: Signature, nu: Signature):
    """Translate two equal-length signatures up so both are partitions."""
    shift = -min(min(kappa, default=0), min(nu, default=0), 0)
    return tuple(c + shift for c in kappa), tuple(c + shift for c in nu)


def branch_psi(kappa: Sequence[int], nu: Sequence[int], params: MacParams):
    """psi_{nu/kappa}(q, t) for a horizontal strip nu/kappa; 0 otherwise.

    Accepts len(kappa) == len(nu) - 1 (interlacing rows of an array) or equal
    lengths (partition-style skew row).  Translation invariant.
    """
    kappa = check_signature(kappa)
    nu = check_signature(nu)
    q, t = params.q, params.t
    if len(kappa) == len(nu) - 1:
        if not interlaces(kappa, nu):
            return 0 * params.one()
        if params.mode == "schur":
            return params.one()
        entries = []
        m = len(kappa)
        for i in range(1, m + 1):
            for j in range(i, m + 1):
                b = j - i
                entries.extend(_f_entries(kappa[i - 1] - kappa[j - 1], b, +1))
                entries.extend(_f_entries(nu[i - 1] - nu[j], b, +1))
                entries.extend(_f_entries(nu[i - 1] - kappa[j - 1], b, -1))
                entries.extend(_f_entries(kappa[i - 1] - nu[j], b, -1))
        return _pochhammer_ledger(entries, q, t)
    if len(kappa) == len(nu):
        if not horizontal_strip(kappa, nu):
            return 0 * params.one()
        if params.mode == "schur":
            return params.one()
        kap, new = _shift_to_partitions(kappa, nu)
        ell = sum(1 for c in kap if c > 0)
        kap = kap + (0, 0)
        new = new + (0, 0)
        entries = []
        for i in range(1, ell + 1):
            for j in range(i, ell + 1):
                b = j - i
                entries.extend(_f_entries(kap[i - 1] - kap[j - 1], b, +1))
                entries.extend(_f_entries(new[i - 1] - new[j], b, +1))
                entries.extend(_f_entries(new[i - 1] - kap[j - 1], b, -1))
                entries.extend(_f_entries(kap[i - 1] - new[j], b, -1))
        return _pochhammer_ledger(entries, q, t)
    raise InvalidInput("branch_psi expects len(kappa) in {len(nu), len(nu) - 1}")


def branch_phi(kappa: Sequence[int], nu: Sequence[int], params: MacParams):
    """phi_{nu/kappa}(q, t) for a horizontal strip; 0 otherwise.

    Defined through the partition picture, so negative parts are only allowed
    for equal-length inputs (handled by translation).
    """
    kappa = check_signature(kappa)
    nu = check_signature(nu)
    q, t = params.q, params.t
    if len(kappa) == len(nu) - 1:
        if not interlaces(kappa, nu):
            return 0 * params.one()
        if (kappa and kappa[-1] < 0) or nu[-1] < 0:
            raise InvalidInput("branch_phi with mixed lengths needs nonnegative parts")
        kap, new = tuple(kappa), tuple(nu)
    elif len(kappa) == len(nu):
        if not horizontal_strip(kappa, nu):
            return 0 * params.one()
        kap, new = _shift_to_partitions(kappa, nu)
    else:
        raise InvalidInput("branch_phi expects len(kappa) in {len(nu), len(nu) - 1}")
    if params.mode == "schur":
        return params.one()
    ell = sum(1 for c in new if c > 0)
    kap = kap + (0,) * (ell + 2 - len(kap))
    new = new + (0,) * (ell + 2 - len(new))
    entries = []
    for i in range(1, ell + 1):
        for j in range(i, ell + 1):
            b = j - i
            entries.extend(_f_entries(new[i - 1] - new[j - 1], b, +1))
            entries.extend(_f_entries(kap[i - 1] - kap[j], b, +1))
            entries.extend(_f_entries(new[i - 1] - kap[j - 1], b, -1))
            entries.extend(_f_entries(kap[i - 1] - new[j], b, -1))
    return _pochhammer_ledger(entries, q, t)


def psi_prime_vertical(mu: Sequence[int], lam: Sequence[int], params: MacParams):
    """psi'_{lam/mu} for a vertical strip lam/mu (equal lengths); 0 otherwise."""
    mu = check_signature(mu)
    lam = check_signature(lam)
    if len(mu) != len(lam):
        raise InvalidInput("psi_prime_vertical expects equal lengths")
    if not all(lam[i] - mu[i] in (0, 1) for i in range(len(mu))):
        return 0 * params.one()
    if params.mode == "schur":
        return params.one()
    q, t = params.q, params.t
    num: Counter = Counter()
    den: Counter = Counter()
    n = len(mu)
    for i in range(1, n + 1):
        if lam[i - 1] != mu[i - 1]:
            continue
        for j in range(i + 1, n + 1):
            if lam[j - 1] != mu[j - 1] + 1:
                continue
            num[(mu[i - 1] - mu[j - 1], j - i - 1)] += 1
            num[(lam[i - 1] - lam[j - 1], j - i + 1)] += 1
            den[(mu[i - 1] - mu[j - 1], j - i)] += 1
            den[(lam[i - 1] - lam[j - 1], j - i)] += 1
    return factor_product(num, den, q, t)


def psi_prime_one_box(mu: Sequence[int], j: int, params: MacParams):
    """psi'_{mu + e_j / mu}; raises BlockedMove when the box cannot be added."""
    mu = check_signature(mu)
    if not 1 <= j <= len(mu):
        raise InvalidInput(f"index {j} out of range")
    if j > 1 and mu[j - 1] >= mu[j - 2]:
        raise BlockedMove(f"coordinate {j} of {mu} is blocked")
    if params.mode == "schur":
        return params.one()
    q, t = params.q, params.t
    num: Counter = Counter()
    den: Counter = Counter()
    for i in range(1, j):
        d = mu[i - 1] - mu[j - 1]
        num[(d, j - i - 1)] += 1
        num[(d - 1, j - i + 1)] += 1
        den[(d, j - i)] += 1
        den[(d - 1, j - i)] += 1
    return factor_product(num, den, q, t)


# --- Macdonald polynomial evaluation ------------------------------------------

_P_CACHE: dict = {}


def clear_caches() -> None:
    _P_CACHE.clear()
    _dim_standard_cached.cache_clear()


def _strip_zeros(lam: Signature) -> Signature:
    n = len(lam)
    while n and lam[n - 1] == 0:
        n -= 1
    return lam[:n]


def mac_P(lam: Sequence[int], a: Sequence, params: MacParams):
    """P_lambda(a_1, ..., a_n; q, t), evaluated by the branching rule.

    lam may be any signature with len(lam) <= n when nonnegative; signatures
    with negative parts need len(lam) == n and are handled through the index
    shift P_{lam+1} = (prod a_i) P_lam.
    """
    lam = check_signature(lam)
    a = tuple(a)
    if lam and lam[-1] < 0:
        if len(lam) != len(a):
            raise InvalidInput("negative parts need exactly len(lam) variables")
        shift = -lam[-1]
        prod_a = params.one()
        for v in a:
            prod_a *= v
        return mac_P(tuple(c + shift for c in lam), a, params) / prod_a ** shift
    lam = _strip_zeros(lam)
    if len(lam) > len(a):
        return 0 * params.one()
    return _mac_P_rec(lam, a, params)


def _mac_P_rec(lam: Signature, a: tuple, params: MacParams):
    key = (lam, a, params.q, params.t)
    hit = _P_CACHE.get(key)
    if hit is not None:
        return hit
    n = len(a)
    if n == 0:
        return params.one() if not lam else 0 * params.one()
    padded = lam + (0,) * (n - len(lam))
    total = 0 * params.one()
    weight = sum(lam)
    for mu in interlacing_predecessors(padded):
        psi = branch_psi(mu, padded, params)
        if psi == 0:
            continue
        total += psi * a[-1] ** (weight - sum(mu)) * _mac_P_rec(_strip_zeros(mu), a[:-1], params)
    _P_CACHE[key] = total
    return total


def schur_s(lam: Sequence[int], a: Sequence):
    """Schur polynomial s_lambda(a) (the q = t degeneration)."""
    return mac_P(lam, a, SCHUR)


def skew_P(lam: Sequence[int], mu: Sequence[int], xs: Sequence, params: MacParams):
    """Skew Macdonald polynomial P_{lam/mu}(x_1, ..., x_m) as a tableau sum."""
    return _skew_eval(check_signature(lam), check_signature(mu), tuple(xs), params, branch_psi)


def skew_Q(lam: Sequence[int], mu: Sequence[int], xs: Sequence, params: MacParams):
    """Skew Macdonald polynomial Q_{lam/mu}(x_1, ..., x_m) (phi weights)."""
    return _skew_eval(check_signature(lam), check_signature(mu), tuple(xs), params, branch_phi)


def _skew_eval(lam, mu, xs, params, coeff):
    m = len(xs)
    if m == 0:
        same = _strip_zeros(lam) == _strip_zeros(mu) if (
            (not lam or lam[-1] >= 0) and (not mu or mu[-1] >= 0)
        ) else lam == mu
        return params.one() if same else 0 * params.one()
    if len(mu) < len(lam) <= len(mu) + m and lam[-1] >= 0:
        lam = lam + (0,) * (len(mu) + m - len(lam))  # trapezoid convention
    growing = len(lam) == len(mu) + m
    if not growing and len(lam) != len(mu):
        raise InvalidInput(
            "skew evaluation needs len(lam) == len(mu) (columns padded) or len(mu) + len(xs)"
        )
    zero = 0 * params.one()

    def rec(top: Signature, depth: int):
        if depth == 0:
            return params.one() if top == mu else zero
        x = xs[depth - 1]
        total = zero
        wt = sum(top)
        if growing:
            mu_pad = mu + (-10 ** 18,) * (len(top) - 1 - len(mu))
            for kappa in interlacing_predecessors(top):
                if any(kappa[i] < mu_pad[i] for i in range(len(kappa))):
                    continue
                c = coeff(kappa, top, params)
                if c == 0:
                    continue
                total += c * x ** (wt - sum(kappa)) * rec(kappa, depth - 1)
        else:
            for kappa in _equal_length_strips_below(top, mu):
                c = coeff(kappa, top, params)
                if c == 0:
                    continue
                total += c * x ** (wt - sum(kappa)) * rec(kappa, depth - 1)
        return total

    if growing:
        return rec(lam, m)
    if not all(mu[i] <= lam[i] for i in range(len(lam))):
        return zero
    return rec(lam, m)


def _equal_length_strips_below(top: Signature, floor: Signature):
    """All kappa with floor <= kappa <= top coordinatewise and top/kappa a
    horizontal strip."""
    n = len(top)
    ranges = []
    for i in range(n):
        lo = max(floor[i], top[i + 1] if i + 1 < n else floor[i])
        ranges.append(range(lo, top[i] + 1))
    for combo in itertools.product(*ranges):
        if all(combo[i] >= combo[i + 1] for i in range(n - 1)):
            yield combo


# --- stochastic links, univariate rates, one-step operator --------------------

def link_weight(lam: Sequence[int], nu_bar: Sequence[int], a: Sequence, params: MacParams):
    """Entry of the stochastic link from level k to level k-1.

    P_{nu_bar}(a_1..a_{k-1}) P_{lam/nu_bar}(a_k) / P_lam(a_1..a_k) when
    nu_bar < lam, else 0.  Row sums over nu_bar equal 1.
    """
    lam = check_signature(lam)
    nu_bar = check_signature(nu_bar)
    a = tuple(a)
    if len(a) != len(lam) or len(nu_bar) != len(lam) - 1:
        raise InvalidInput("link_weight expects len(a) == len(lam) == len(nu_bar) + 1")
    if not all(v > 0 for v in a):
        raise InvalidInput("variables a must be positive")
    if not interlaces(nu_bar, lam):
        return 0 * params.one()
    psi = branch_psi(nu_bar, lam, params)
    return (
        mac_P(nu_bar, a[:-1], params)
        * psi
        * a[-1] ** (sum(lam) - sum(nu_bar))
        / mac_P(lam, a, params)
    )


def univariate_rates(lam: Sequence[int], a: Sequence, params: MacParams):
    """Jump rates of the level-k generator: list of (j, rate) for each
    admissible box addition, plus the constant diagonal -sum(a)."""
    lam = check_signature(lam)
    a = tuple(a)
    if len(a) != len(lam):
        raise InvalidInput("univariate_rates expects len(a) == len(lam)")
    p_lam = mac_P(lam, a, params)
    rates = []
    for j in range(1, len(lam) + 1):
        if j > 1 and lam[j - 1] >= lam[j - 2]:
            continue
        up = lam[:j - 1] + (lam[j - 1] + 1,) + lam[j:]
        rate = mac_P(up, a, params) / p_lam * psi_prime_one_box(lam, j, params)
        rates.append((j, rate))
    return rates, -sum(a)


def pi_dual(a: Sequence, beta):
    """Normalizing constant for a single dual variable: prod (1 + a_i beta)."""
    out = 1
    for v in a:
        out = out * (1 + v * beta)
    return out


def p_up(lam: Sequence[int], mu: Sequence[int], a: Sequence, beta, params: MacParams):
    """One step of the Markov operator driven by a single dual variable.

    Nonzero only when mu/lam is a vertical strip; rows sum to one.
    """
    lam = check_signature(lam)
    mu = check_signature(mu)
    a = tuple(a)
    if len(lam) != len(a) or len(mu) != len(a):
        raise InvalidInput("p_up expects len(lam) == len(mu) == len(a)")
    if not vertical_strip(lam, mu):
        return 0 * params.one()
    q_part = psi_prime_vertical(lam, mu, params) * beta ** (sum(mu) - sum(lam))
    return mac_P(mu, a, params) / mac_P(lam, a, params) * q_part / pi_dual(a, beta)


def p_up_row(lam: Sequence[int], a: Sequence, beta, params: MacParams):
    """All nonzero entries of the p-up row at lam, as {mu: weight}."""
    lam = check_signature(lam)
    out = {}
    for bumps in itertools.product((0, 1), repeat=len(lam)):
        mu = tuple(lam[i] + bumps[i] for i in range(len(lam)))
        if all(mu[i] >= mu[i + 1] for i in range(len(mu) - 1)):
            w = p_up(lam, mu, a, beta, params)
            if w != 0:
                out[mu] = w
    return out


# --- Schur / Plancherel closed forms ------------------------------------------

@lru_cache(maxsize=None)
def _dim_standard_cached(lam: Signature) -> int:
    if not lam:
        return 1
    total = 0
    for j in range(len(lam)):
        below = lam[j + 1] if j + 1 < len(lam) else 0
        if lam[j] > below:
            lower = lam[:j] + (lam[j] - 1,) + lam[j + 1:]
            total += _dim_standard_cached(_strip_zeros(lower))
    return total


def dim_standard(lam: Sequence[int]) -> int:
    """Number of standard tableaux of the given (nonnegative) shape."""
    lam = _strip_zeros(check_signature(lam))
    if lam and lam[-1] < 0:
        raise InvalidInput("standard tableaux need a partition shape")
    return _dim_standard_cached(lam)


def schur_plancherel_coefficient(lam: Sequence[int], a: Sequence):
    """c_lam with P(lam, tau) = c_lam tau^{|lam|} exp(-tau sum(a)) in the
    Schur case: s_lam(a) dim(lam) / |lam|!."""
    lam = check_signature(lam)
    n = sum(lam)
    return schur_s(lam, a) * dim_standard(lam) / math.factorial(n)


def schur_plancherel_measure(lam: Sequence[int], a: Sequence, tau) -> float:
    """Probability of top row lam at time tau under the Schur dynamics."""
    lam = check_signature(lam)
    coeff = schur_plancherel_coefficient(lam, a)
    return float(coeff) * float(tau) ** sum(lam) * math.exp(-float(tau) * float(sum(a)))
