"""
Exact polynomial solutions from the truncation condition

Choosing beta = beta_n(alpha) makes B_n vanish, so c_{n+1}(alpha) = 0 forces
c_{n+2} = 0 and the Frobenius series collapses to a degree-n polynomial.
Everything up to root isolation runs in exact rational arithmetic (sympy);
floating point only appears when an isolated root is reported.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field as dc_field
from fractions import Fraction
from functools import lru_cache
from typing import Any

import mpmath
from sympy import QQ, ZZ, Poly, Rational, Symbol, factor_list, sturm
from sympy.polys.fields import FracElement, field

from .model import Parity, beta_upper_bound
from .recurrence import recurrence_terms
from .utils.logging import get_logger
from .utils.timing import log_step

log = get_logger(__name__)

ALPHA = Symbol("alpha")
_FIELD, _A = field("alpha", QQ)

# -(27 + 12 sqrt 3) / 11 * (4n + 3 + 2 gamma) < alpha < -(4n + 3 + 2 gamma)
PHYSICAL_BOUND_FACTOR = (27.0 + 12.0 * math.sqrt(3.0)) / 11.0

CERTIFIED_WIDTH = Rational(1, 10**40)
_ALPHA_DPS = 50


def _check_n(n: int) -> int:
    if int(n) != n or n < 0:
        raise ValueError(f"truncation degree n must be an integer >= 0, got {n}")
    return int(n)


# ---- polynomial types -------------------------------------------------------


@dataclass(frozen=True)
class IntegerPolynomial:
    """Integer polynomial in alpha, constant term first."""

    coefficients: tuple[int, ...]

    def __post_init__(self) -> None:
        coeffs = [int(c) for c in self.coefficients]
        while len(coeffs) > 1 and coeffs[-1] == 0:
            coeffs.pop()
        object.__setattr__(self, "coefficients", tuple(coeffs) or (0,))

    @classmethod
    def from_poly(cls, poly: Poly) -> IntegerPolynomial:
        p = Poly(poly, ALPHA)
        if p.get_domain() != ZZ:
            _, p = p.clear_denoms(convert=True)
        return cls(tuple(int(c) for c in reversed(p.all_coeffs())))

    def to_poly(self) -> Poly:
        return Poly(list(reversed(self.coefficients)), ALPHA, domain=ZZ)

    @property
    def degree(self) -> int:
        return -1 if self.is_zero else len(self.coefficients) - 1

    @property
    def is_zero(self) -> bool:
        return self.coefficients == (0,)

    @property
    def leading_coefficient(self) -> int:
        return self.coefficients[-1]

    def evaluate(self, x: Any) -> Any:
        """Horner evaluation; exact for int/Fraction/Rational, mp for mpf."""
        acc: Any = 0
        for c in reversed(self.coefficients):
            acc = acc * x + c
        return acc

    def __str__(self) -> str:
        return str(self.to_poly().as_expr())


@dataclass(frozen=True)
class RationalFunction:
    """Reduced quotient of integer polynomials in alpha."""

    numerator: IntegerPolynomial
    denominator: IntegerPolynomial

    def __post_init__(self) -> None:
        if self.denominator.is_zero:
            raise ValueError("rational function with a vanishing denominator")

    @classmethod
    def from_frac(cls, frac: FracElement) -> RationalFunction:
        num = Poly(frac.numer.as_expr(), ALPHA, domain=QQ)
        den = Poly(frac.denom.as_expr(), ALPHA, domain=QQ)
        if den.is_zero:
            raise ValueError("rational function with a vanishing denominator")
        cn, num_z = num.clear_denoms(convert=True)
        cd, den_z = den.clear_denoms(convert=True)
        # num/den = (num_z * cd) / (den_z * cn)
        top = num_z * int(cd)
        bottom = den_z * int(cn)
        if bottom.LC() < 0:
            top, bottom = -top, -bottom
        g = math.gcd(int(top.content()), int(bottom.content()))
        if g > 1:
            top = top.exquo_ground(g)
            bottom = bottom.exquo_ground(g)
        return cls(IntegerPolynomial.from_poly(top), IntegerPolynomial.from_poly(bottom))

    def evaluate(self, x: Any) -> Any:
        return self.numerator.evaluate(x) / self.denominator.evaluate(x)

    def to_json_dict(self) -> dict[str, str]:
        return {"numerator": str(self.numerator), "denominator": str(self.denominator)}


# ---- truncated recurrence ---------------------------------------------------


def beta_n(gamma: int | Parity, alpha: Any, n: int) -> Any:
    """beta_n(alpha) = -(alpha + 2 gamma + 4n + 3) / 2, the choice that kills B_n."""
    gamma = Parity.parse(gamma)
    n = _check_n(n)
    return -(alpha + (2 * int(gamma) + 4 * n + 3)) / 2


def _beta_n_frac(gamma: int, n: int) -> FracElement:
    return -(_A + (2 * gamma + 4 * n + 3)) / _FIELD(2)


def beta_substitution_A(gamma: int | Parity, n: int, j: int) -> FracElement:
    """Closed form of A_j with beta = beta_n substituted."""
    g, n = int(Parity.parse(gamma)), _check_n(n)
    k = 4 * j - 4 * n
    numer = _A * _A + 8 * (g - 3 * j + 3 * n - 2) * _A + (k + 1) * (k + 3)
    denom = 8 * (j + 2) * (_A + (2 * g - 2 * j + 4 * n - 1))
    return -numer / denom


def beta_substitution_B(gamma: int | Parity, n: int, j: int) -> FracElement:
    g, n = int(Parity.parse(gamma)), _check_n(n)
    return (2 * (n - j) * _A) / ((j + 2) * (_A + (2 * g - 2 * j + 4 * n - 1)))


def substituted_general_terms(gamma: int | Parity, n: int, j: int) -> tuple[FracElement, FracElement]:
    """(A_j, B_j) of the general recurrence evaluated at beta = beta_n, in exact arithmetic."""
    g, n = int(Parity.parse(gamma)), _check_n(n)
    return recurrence_terms(g, _A, _beta_n_frac(g, n), j)


@lru_cache(maxsize=64)
def _truncation_fracs(gamma: int, n: int) -> tuple[FracElement, ...]:
    coeffs: list[FracElement] = [_FIELD(1)]
    prev = _FIELD(0)
    try:
        for j in range(-1, n + 1):
            a = beta_substitution_A(gamma, n, j)
            b = beta_substitution_B(gamma, n, j)
            nxt = a * coeffs[-1] + b * prev
            prev = coeffs[-1]
            coeffs.append(nxt)
    except ZeroDivisionError as e:
        raise ValueError(f"vanishing denominator in truncated recurrence (gamma={gamma}, n={n})") from e
    return tuple(coeffs)


def truncation_coefficients(gamma: int | Parity, n: int) -> list[RationalFunction]:
    """c_0 .. c_{n+2} as exact rational functions of alpha under beta = beta_n."""
    g, n = int(Parity.parse(gamma)), _check_n(n)
    return [RationalFunction.from_frac(c) for c in _truncation_fracs(g, n)]


@lru_cache(maxsize=64)
def _truncation_numerator(gamma: int, n: int) -> IntegerPolynomial:
    c_next = _truncation_fracs(gamma, n)[n + 1]
    if Poly(c_next.denom.as_expr(), ALPHA, domain=QQ).is_zero:
        raise ValueError(f"vanishing denominator for c_{n + 1} (gamma={gamma}, n={n})")
    num = Poly(c_next.numer.as_expr(), ALPHA, domain=QQ)
    _, num_z = num.clear_denoms(convert=True)
    _, prim = num_z.primitive()
    if prim.LC() < 0:
        prim = -prim
    poly = IntegerPolynomial.from_poly(prim)
    if poly.degree != 2 * (n + 1):
        log.warning(
            "exact.degree_mismatch", gamma=gamma, n=n, degree=poly.degree, expected=2 * (n + 1)
        )
    return poly


def truncation_numerator(gamma: int | Parity, n: int) -> IntegerPolynomial:
    """Primitive integer numerator of c_{n+1}(alpha); its real roots are the candidates."""
    return _truncation_numerator(int(Parity.parse(gamma)), _check_n(n))


# ---- root isolation ---------------------------------------------------------


@dataclass(frozen=True)
class IsolatedRoot:
    """A real root inside (lo, hi) (or exactly lo == hi) with its irreducible factor."""

    lo: Rational
    hi: Rational
    defining_polynomial: IntegerPolynomial

    @property
    def value(self) -> float:
        return float((self.lo + self.hi) / 2)

    @property
    def width(self) -> Rational:
        return self.hi - self.lo

    @property
    def is_exact(self) -> bool:
        return self.lo == self.hi

    def refined(self, width: Rational) -> IsolatedRoot:
        lo, hi = _bisect_to(self.defining_polynomial.to_poly(), self.lo, self.hi, width)
        return IsolatedRoot(lo, hi, self.defining_polynomial)

    def to_mpf(self) -> mpmath.mpf:
        mid = (self.lo + self.hi) / 2
        return mpmath.mpf(int(mid.p)) / int(mid.q)

    def __float__(self) -> float:
        return self.value


@dataclass(frozen=True)
class RootReport:
    gamma: Parity
    n: int
    degree: int
    real_count: int
    roots: tuple[IsolatedRoot, ...]

    @property
    def complex_count(self) -> int:
        return self.degree - self.real_count

    @property
    def all_real(self) -> bool:
        return self.real_count == self.degree


def _sign_variations(chain: list[Poly], x: Rational) -> int:
    values = [v for v in (p.eval(x) for p in chain) if v != 0]
    return sum(1 for a, b in zip(values, values[1:]) if (a > 0) != (b > 0))


def _cauchy_bound(poly: Poly) -> Rational:
    coeffs = poly.all_coeffs()
    lead = abs(Rational(coeffs[0]))
    return 1 + max((abs(Rational(c)) / lead for c in coeffs[1:]), default=Rational(0))


def _bisect_to(poly: Poly, lo: Rational, hi: Rational, width: Rational) -> tuple[Rational, Rational]:
    """Shrink a sign-change interval of a square-free polynomial to the given width."""
    if lo == hi:
        return lo, hi
    f_lo = poly.eval(lo)
    if f_lo == 0:
        return lo, lo
    if poly.eval(hi) == 0:
        return hi, hi
    while hi - lo > width:
        mid = (lo + hi) / 2
        f_mid = poly.eval(mid)
        if f_mid == 0:
            return mid, mid
        if (f_mid > 0) == (f_lo > 0):
            lo, f_lo = mid, f_mid
        else:
            hi = mid
    return lo, hi


def _isolate(chain: list[Poly], lo: Rational, hi: Rational) -> list[tuple[Rational, Rational]]:
    """Split (lo, hi] until every piece holds exactly one distinct root."""
    pending = [(lo, hi, _sign_variations(chain, lo), _sign_variations(chain, hi))]
    out: list[tuple[Rational, Rational]] = []
    while pending:
        a, b, va, vb = pending.pop()
        count = va - vb
        if count == 0:
            continue
        if count == 1:
            out.append((a, b))
            continue
        mid = (a + b) / 2
        # keep split points off the roots so Sturm counts stay half-open
        nudge = (b - a) / 7
        while chain[0].eval(mid) == 0:
            mid += nudge
            nudge /= 3
        vm = _sign_variations(chain, mid)
        pending.append((a, mid, va, vm))
        pending.append((mid, b, vm, vb))
    return sorted(out)


def _defining_factor(factors: list[Poly], lo: Rational, hi: Rational) -> IntegerPolynomial:
    """The irreducible factor owning the single root isolated in [lo, hi]."""
    owners = [f for f in factors if f.count_roots(lo, hi) > 0]
    if len(owners) != 1:
        raise ArithmeticError(f"expected one factor owning the root in [{lo}, {hi}], found {len(owners)}")
    return IntegerPolynomial.from_poly(owners[0])


@log_step("exact.alpha_roots")
def alpha_roots(gamma: int | Parity, n: int, precision: float = 1e-12) -> RootReport:
    """
    All real roots of the truncation numerator, isolated by Sturm sign counting
    and refined by exact bisection to intervals no wider than `precision`.
    """
    gamma = Parity.parse(gamma)
    n = _check_n(n)
    if not precision > 0:
        raise ValueError(f"precision must be positive, got {precision}")
    numerator = truncation_numerator(gamma, n)
    poly = numerator.to_poly()
    sqf = poly.sqf_part()
    chain = [Poly(p, ALPHA) for p in sturm(sqf)]
    bound = _cauchy_bound(sqf)

    intervals = _isolate(chain, -bound, bound)
    real_count = len(intervals)
    cross = sqf.count_roots()
    if cross != real_count:
        log.warning("exact.count_mismatch", gamma=int(gamma), n=n, sturm=real_count, sympy=cross)

    _, factors = factor_list(poly)
    irreducibles = [Poly(f, ALPHA) for f, _ in factors if Poly(f, ALPHA).degree() > 0]

    width = _as_rational(precision)
    roots: list[IsolatedRoot] = []
    for lo, hi in intervals:
        lo, hi = _bisect_to(sqf, lo, hi, width)
        roots.append(IsolatedRoot(lo, hi, _defining_factor(irreducibles, lo, hi)))

    if real_count < numerator.degree:
        log.warning(
            "exact.complex_roots",
            gamma=int(gamma),
            n=n,
            degree=numerator.degree,
            real_count=real_count,
        )
    return RootReport(gamma, n, numerator.degree, real_count, tuple(roots))


# ---- physicality ------------------------------------------------------------


def physical_bounds(gamma: int | Parity, n: int) -> tuple[float, float]:
    """Open interval of alpha for which 0 < beta_n < 2|alpha|/sqrt(27)."""
    m = 4 * _check_n(n) + 3 + 2 * int(Parity.parse(gamma))
    return -PHYSICAL_BOUND_FACTOR * m, float(-m)


def _root_in_bounds(root: IsolatedRoot, gamma: int, n: int) -> bool:
    lower, _ = physical_bounds(gamma, n)
    upper = Rational(-(4 * n + 3 + 2 * gamma))
    # the upper bound is rational; settle straddling intervals exactly
    for _ in range(200):
        if root.hi < upper:
            break
        if root.lo >= upper:
            return False
        root = root.refined(root.width / 4)
    else:
        return False
    return root.value > lower


def physical_filter(gamma: int | Parity, n: int, roots: list[Any]) -> list[Any]:
    """Keep the roots strictly inside the physical alpha interval."""
    gamma = int(Parity.parse(gamma))
    n = _check_n(n)
    lower, upper = physical_bounds(gamma, n)
    kept = []
    for r in roots:
        if isinstance(r, IsolatedRoot):
            if _root_in_bounds(r, gamma, n):
                kept.append(r)
        elif lower < float(r) < upper:
            kept.append(r)
    return kept


# ---- solutions --------------------------------------------------------------


@dataclass(frozen=True)
class PolynomialSolution:
    n: int
    i: int
    gamma: Parity
    alpha_root: IsolatedRoot
    alpha_decimal: str
    beta: float
    epsilon: float
    coeffs_exact: tuple[RationalFunction, ...]
    coeffs_float: tuple[float, ...]

    @property
    def alpha(self) -> float:
        return self.alpha_root.value

    @property
    def v0(self) -> float:
        return float(mpmath.mpf(self.alpha_decimal) ** 2)

    @property
    def defining_polynomial(self) -> IntegerPolynomial:
        return self.alpha_root.defining_polynomial

    def to_json_dict(self) -> dict[str, Any]:
        return {
            "gamma": int(self.gamma),
            "n": self.n,
            "i": self.i,
            "alpha": self.alpha_decimal,
            "defining_polynomial": [str(c) for c in self.defining_polynomial.coefficients],
            "beta": self.beta,
            "epsilon": self.epsilon,
            "coefficients": [c.to_json_dict() for c in self.coeffs_exact],
        }


def _coprime(a: IntegerPolynomial, b: IntegerPolynomial) -> bool:
    return a.to_poly().gcd(b.to_poly()).degree() == 0


def assemble_polynomial_solution(
    gamma: int | Parity, n: int, alpha_root: IsolatedRoot | float, i: int | None = None
) -> PolynomialSolution:
    """
    Build y^(n,i) at an accepted root: certified alpha, beta_n, epsilon and c_0..c_n.

    Raises ValueError if the root is not physical, coincides with a pole of the
    coefficients or fails the c_{n+1} = c_{n+2} = 0 verification.
    """
    gamma = Parity.parse(gamma)
    n = _check_n(n)
    accepted: list[IsolatedRoot] = []
    if not isinstance(alpha_root, IsolatedRoot) or i is None:
        accepted = physical_filter(gamma, n, list(alpha_roots(gamma, n).roots))
    if not isinstance(alpha_root, IsolatedRoot):
        target = float(alpha_root)
        matches = [r for r in accepted if abs(r.value - target) <= 1e-8 * max(1.0, abs(target))]
        if not matches:
            raise ValueError(f"alpha={target} is not an accepted truncation root (gamma={int(gamma)}, n={n})")
        alpha_root = matches[0]
    if not physical_filter(gamma, n, [alpha_root]):
        raise ValueError(f"alpha root {alpha_root.value} lies outside the physical bounds")

    if i is None:
        values = [r.value for r in accepted]
        i = 1 + min(range(len(values)), key=lambda k: abs(values[k] - alpha_root.value))

    root = alpha_root.refined(CERTIFIED_WIDTH)
    minpoly = root.defining_polynomial
    fracs = _truncation_fracs(int(gamma), n)
    exact = [RationalFunction.from_frac(c) for c in fracs]

    for j, c in enumerate(exact):
        if not _coprime(c.denominator, minpoly):
            raise ValueError(f"alpha root is a pole of c_{j} (gamma={int(gamma)}, n={n})")
    for j in (n + 1, n + 2):
        if not exact[j].numerator.to_poly().rem(minpoly.to_poly()).is_zero:
            raise ValueError(f"c_{j} does not vanish at the isolated root (gamma={int(gamma)}, n={n})")

    with mpmath.workdps(_ALPHA_DPS):
        alpha_mp = root.to_mpf()
        coeffs_float = tuple(float(c.evaluate(alpha_mp)) for c in exact[: n + 1])
        beta_mp = beta_n(gamma, alpha_mp, n)
        alpha_decimal = mpmath.nstr(alpha_mp, 36, strip_zeros=False)

    beta = float(beta_mp)
    if not 0 < beta < beta_upper_bound(float(alpha_mp)):
        raise ValueError(f"beta={beta} violates the bound-state interval at alpha={float(alpha_mp)}")
    return PolynomialSolution(
        n=n,
        i=int(i),
        gamma=gamma,
        alpha_root=root,
        alpha_decimal=alpha_decimal,
        beta=beta,
        epsilon=-beta * beta,
        coeffs_exact=tuple(exact[: n + 1]),
        coeffs_float=coeffs_float,
    )


@dataclass(frozen=True)
class RootVerdict:
    root: IsolatedRoot
    accepted: bool
    lower: float
    upper: float
    beta: float


@dataclass(frozen=True)
class TruncationReport:
    gamma: Parity
    n: int
    degree: int
    real_count: int
    verdicts: tuple[RootVerdict, ...]
    solutions: tuple[PolynomialSolution, ...] = dc_field(default_factory=tuple)


@log_step("exact.solve")
def solve_truncation(gamma: int | Parity, n: int, precision: float = 1e-12) -> TruncationReport:
    """Roots, physicality verdicts and assembled solutions for one (gamma, n)."""
    gamma = Parity.parse(gamma)
    report = alpha_roots(gamma, n, precision)
    lower, upper = physical_bounds(gamma, n)
    accepted = physical_filter(gamma, n, list(report.roots))
    verdicts = tuple(
        RootVerdict(
            root=r,
            accepted=r in accepted,
            lower=lower,
            upper=upper,
            beta=float(beta_n(gamma, r.value, n)),
        )
        for r in report.roots
    )
    solutions = tuple(
        assemble_polynomial_solution(gamma, n, r, i=k) for k, r in enumerate(accepted, start=1)
    )
    log.debug("exact.solved", gamma=int(gamma), n=n, real=report.real_count, accepted=len(solutions))
    return TruncationReport(gamma, report.n, report.degree, report.real_count, verdicts, solutions)


def enumerate_solutions(gammas: list[int] | tuple[int, ...], n_max: int) -> list[PolynomialSolution]:
    """Every accepted solution with n <= n_max, ordered by (gamma, n, i)."""
    out: list[PolynomialSolution] = []
    for g in sorted({int(Parity.parse(g)) for g in gammas}):
        for n in range(_check_n(n_max) + 1):
            out.extend(solve_truncation(g, n).solutions)
    return out


# ---- residual of the transformed equation -----------------------------------


def _ode_residual(gamma: int, alpha: Any, beta: Any, xi: Any, y: Any, dy: Any, d2y: Any) -> Any:
    """Left side of the transformed equation in xi = sech^2 z (general parity)."""
    g = gamma
    first = 2 * alpha * xi * (xi - 1) + 2 * beta * (xi - 1) + (2 * g + 3) * xi - 2
    zeroth = (
        alpha * alpha * (xi - 1)
        + alpha * (2 * beta * (xi - 1) + (2 * g + 3) * xi - 2)
        + beta * beta
        + beta * (2 * g + 1)
        + g * (g + 1)
    )
    return 4 * xi * xi * (1 - xi) * d2y - 2 * xi * first * dy - xi * zeroth * y


def _series_derivatives(coeffs: list[Any], xi: Any, zero: Any) -> tuple[Any, Any, Any]:
    y, dy, d2y = zero, zero, zero
    for j, c in enumerate(coeffs):
        y = y + c * xi**j
        if j >= 1:
            dy = dy + j * c * xi ** (j - 1)
        if j >= 2:
            d2y = d2y + j * (j - 1) * c * xi ** (j - 2)
    return y, dy, d2y


def _as_rational(x: Any) -> Rational:
    if isinstance(x, Rational):
        return x
    if isinstance(x, Fraction):
        return Rational(x.numerator, x.denominator)
    if isinstance(x, int):
        return Rational(x)
    return Rational(Fraction(str(x)))


def residual_check(sol: PolynomialSolution, sample_points: list[Any]) -> float:
    """
    Max |residual| of the transformed equation over rational sample points in (0, 1).

    When sol.beta is the truncation value the check is exact: the residual is a
    rational function of alpha reduced modulo the root's minimal polynomial.
    Otherwise it is evaluated at 50 significant digits.
    """
    points = [_as_rational(x) for x in sample_points]
    for x in points:
        if not 0 < x < 1:
            raise ValueError(f"sample points must lie in (0, 1), got {x}")
    gamma = int(sol.gamma)

    with mpmath.workdps(_ALPHA_DPS):
        alpha_mp = mpmath.mpf(sol.alpha_decimal)
        expected_beta = float(beta_n(gamma, alpha_mp, sol.n))

    if math.isclose(sol.beta, expected_beta, rel_tol=1e-15, abs_tol=1e-15):
        minpoly = sol.defining_polynomial.to_poly()
        coeffs = list(_truncation_fracs(gamma, sol.n)[: sol.n + 1])
        beta = _beta_n_frac(gamma, sol.n)
        worst = 0.0
        for x in points:
            xi = _FIELD(x)
            y, dy, d2y = _series_derivatives(coeffs, xi, _FIELD(0))
            r = _ode_residual(gamma, _A, beta, xi, y, dy, d2y)
            num = Poly(r.numer.as_expr(), ALPHA, domain=QQ)
            if num.is_zero or num.rem(minpoly).is_zero:
                continue
            value = RationalFunction.from_frac(r)
            with mpmath.workdps(_ALPHA_DPS):
                worst = max(worst, float(abs(value.evaluate(alpha_mp))))
        return worst

    with mpmath.workdps(_ALPHA_DPS):
        coeffs_mp = [c.evaluate(alpha_mp) for c in sol.coeffs_exact]
        beta_mp = mpmath.mpf(sol.beta)
        worst_mp = mpmath.mpf(0)
        for x in points:
            xi = mpmath.mpf(int(x.p)) / int(x.q)
            y, dy, d2y = _series_derivatives(coeffs_mp, xi, mpmath.mpf(0))
            r = _ode_residual(gamma, alpha_mp, beta_mp, xi, y, dy, d2y)
            worst_mp = max(worst_mp, abs(r))
        return float(worst_mp)
