"""Arithmetic in the Iwasawa algebra truncated to (p^N, T^D).

Polynomials (LambdaPoly) are trimmed ascending coefficient tuples over
Z/p^N; power-series truncations (LambdaTrunc) carry a fixed degree cap
D and reduce every product mod T^D.  On top of the raw ring operations
this module provides the Weierstrass division and preparation
algorithms, the cyclotomic family omega_n / nu_{m,n} attached to a
tower with flattening index k, and the involution tau -> kappa/tau.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import (
    BadLevels,
    ContextMismatch,
    InsufficientDegreeCap,
    NotAUnit,
    NotDistinguished,
    PrecisionExhausted,
    ZeroPolynomial,
)
from .padic import PadicContext


def _trim(coeffs) -> tuple[int, ...]:
    cs = list(coeffs)
    while cs and cs[-1] == 0:
        cs.pop()
    return tuple(cs)


@dataclass(frozen=True)
class LambdaPoly:
    """Polynomial over Z/p^N, ascending coefficients, trailing zeros trimmed."""

    coeffs: tuple[int, ...]
    context: PadicContext

    def __post_init__(self):
        q = self.context.modulus
        object.__setattr__(self, "coeffs", _trim(c % q for c in self.coeffs))

    @classmethod
    def from_ints(cls, coeffs, context: PadicContext) -> "LambdaPoly":
        return cls(tuple(coeffs), context)

    @classmethod
    def zero(cls, context: PadicContext) -> "LambdaPoly":
        return cls((), context)

    @classmethod
    def one(cls, context: PadicContext) -> "LambdaPoly":
        return cls((1,), context)

    @classmethod
    def variable(cls, context: PadicContext) -> "LambdaPoly":
        return cls((0, 1), context)

    @property
    def is_zero(self) -> bool:
        return not self.coeffs

    @property
    def degree(self) -> int:
        """Degree, with the zero polynomial mapped to -1."""
        return len(self.coeffs) - 1

    def coeff(self, i: int) -> int:
        return self.coeffs[i] if 0 <= i < len(self.coeffs) else 0

    def _check(self, other: "LambdaPoly"):
        if self.context != other.context:
            raise ContextMismatch(
                f"polynomial contexts differ: {self.context} vs {other.context}"
            )

    def __add__(self, other: "LambdaPoly") -> "LambdaPoly":
        self._check(other)
        n = max(len(self.coeffs), len(other.coeffs))
        return LambdaPoly(
            tuple(self.coeff(i) + other.coeff(i) for i in range(n)), self.context
        )

    def __sub__(self, other: "LambdaPoly") -> "LambdaPoly":
        self._check(other)
        n = max(len(self.coeffs), len(other.coeffs))
        return LambdaPoly(
            tuple(self.coeff(i) - other.coeff(i) for i in range(n)), self.context
        )

    def __mul__(self, other: "LambdaPoly") -> "LambdaPoly":
        self._check(other)
        if self.is_zero or other.is_zero:
            return LambdaPoly.zero(self.context)
        q = self.context.modulus
        out = [0] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if a == 0:
                continue
            for j, b in enumerate(other.coeffs):
                out[i + j] = (out[i + j] + a * b) % q
        return LambdaPoly(tuple(out), self.context)

    def scale(self, c: int) -> "LambdaPoly":
        return LambdaPoly(tuple(c * x for x in self.coeffs), self.context)

    def to_trunc(self, degree_cap: int) -> "LambdaTrunc":
        if self.degree >= degree_cap:
            raise InsufficientDegreeCap(
                f"degree {self.degree} does not fit under cap {degree_cap}"
            )
        return LambdaTrunc.from_ints(self.coeffs, self.context, degree_cap)

    def __repr__(self) -> str:
        if self.is_zero:
            return "LambdaPoly(0)"
        terms = []
        for i, c in enumerate(self.coeffs):
            if c == 0:
                continue
            if i == 0:
                terms.append(str(c))
            elif i == 1:
                terms.append(f"{c}*T" if c != 1 else "T")
            else:
                terms.append(f"{c}*T^{i}" if c != 1 else f"T^{i}")
        return "LambdaPoly(" + " + ".join(terms) + f") mod {self.context.modulus}"


def poly_mul(f: LambdaPoly, g: LambdaPoly) -> LambdaPoly:
    return f * g


def is_distinguished(f: LambdaPoly) -> bool:
    """Monic with every lower coefficient divisible by p; ZeroPolynomial on 0."""
    if f.is_zero:
        raise ZeroPolynomial("the zero polynomial is neither distinguished nor not")
    if f.coeffs[-1] != 1:
        return False
    p = f.context.p
    return all(c % p == 0 for c in f.coeffs[:-1])


@dataclass(frozen=True)
class LambdaTrunc:
    """Element of Lambda mod (p^N, T^D): exactly degree_cap coefficients."""

    coeffs: tuple[int, ...]
    context: PadicContext
    degree_cap: int

    def __post_init__(self):
        if self.degree_cap < 1:
            raise InsufficientDegreeCap("degree cap must be at least 1")
        q = self.context.modulus
        cs = [c % q for c in self.coeffs[: self.degree_cap]]
        cs.extend([0] * (self.degree_cap - len(cs)))
        object.__setattr__(self, "coeffs", tuple(cs))

    @classmethod
    def from_ints(cls, coeffs, context: PadicContext, degree_cap: int) -> "LambdaTrunc":
        return cls(tuple(coeffs), context, degree_cap)

    @classmethod
    def one(cls, context: PadicContext, degree_cap: int) -> "LambdaTrunc":
        return cls((1,), context, degree_cap)

    @property
    def is_zero(self) -> bool:
        return all(c == 0 for c in self.coeffs)

    def _check(self, other: "LambdaTrunc"):
        if self.context != other.context:
            raise ContextMismatch("truncation contexts differ")
        if self.degree_cap != other.degree_cap:
            raise ContextMismatch(
                f"degree caps differ: {self.degree_cap} vs {other.degree_cap}"
            )

    def __add__(self, other: "LambdaTrunc") -> "LambdaTrunc":
        self._check(other)
        return LambdaTrunc(
            tuple(a + b for a, b in zip(self.coeffs, other.coeffs)),
            self.context,
            self.degree_cap,
        )

    def __sub__(self, other: "LambdaTrunc") -> "LambdaTrunc":
        self._check(other)
        return LambdaTrunc(
            tuple(a - b for a, b in zip(self.coeffs, other.coeffs)),
            self.context,
            self.degree_cap,
        )

    def __mul__(self, other: "LambdaTrunc") -> "LambdaTrunc":
        self._check(other)
        q = self.context.modulus
        d = self.degree_cap
        out = [0] * d
        for i, a in enumerate(self.coeffs):
            if a == 0:
                continue
            for j in range(d - i):
                b = other.coeffs[j]
                if b:
                    out[i + j] = (out[i + j] + a * b) % q
        return LambdaTrunc(tuple(out), self.context, d)

    def scale(self, c: int) -> "LambdaTrunc":
        return LambdaTrunc(
            tuple(c * x for x in self.coeffs), self.context, self.degree_cap
        )

    def mul_poly(self, g: LambdaPoly) -> "LambdaTrunc":
        # g is reduced mod T^D first; the product lives in the truncated ring
        return self * LambdaTrunc.from_ints(g.coeffs, self.context, self.degree_cap)

    def unit_inverse(self) -> "LambdaTrunc":
        """Series inverse; requires the constant term to be a unit mod p."""
        q = self.context.modulus
        a0 = self.coeffs[0]
        if a0 % self.context.p == 0:
            raise NotAUnit("constant term is divisible by p")
        inv0 = pow(a0, -1, q)
        d = self.degree_cap
        out = [0] * d
        out[0] = inv0
        for n in range(1, d):
            acc = 0
            for i in range(1, n + 1):
                if self.coeffs[i]:
                    acc += self.coeffs[i] * out[n - i]
            out[n] = (-inv0 * acc) % q
        return LambdaTrunc(tuple(out), self.context, d)

    def to_poly(self) -> LambdaPoly:
        return LambdaPoly(self.coeffs, self.context)

    def substitute(self, value: "LambdaTrunc") -> "LambdaTrunc":
        """Evaluate this series at T = value by Horner's rule."""
        self._check(value)
        out = LambdaTrunc.from_ints((), self.context, self.degree_cap)
        for c in reversed(self.coeffs):
            out = out * value
            out = out + LambdaTrunc.from_ints((c,), self.context, self.degree_cap)
        return out

    def __repr__(self) -> str:
        return (
            f"LambdaTrunc({list(self.coeffs)} mod "
            f"({self.context.modulus}, T^{self.degree_cap}))"
        )


@dataclass(frozen=True)
class WeierstrassData:
    """Factorization f = p^mu * distinguished * unit in the truncated ring."""

    mu: int
    distinguished: LambdaPoly
    unit: LambdaTrunc

    def multiply_back(self) -> LambdaTrunc:
        ctx = self.distinguished.context
        p_pow = pow(ctx.p, self.mu, ctx.modulus) if self.mu < ctx.precision_exp else 0
        prod = self.unit.mul_poly(self.distinguished)
        return prod.scale(p_pow)


@dataclass(frozen=True)
class TowerParams:
    """Tower data: prime p and flattening index k; omega_n = omega_k for n < k.

    kappa parametrizes the involution tau -> kappa * tau^{-1}; the
    default 1 + p^k is one of the two readings floated in the sources
    and any unit congruent to 1 mod p is accepted.
    """

    p: int
    k: int
    kappa: int | None = None

    def __post_init__(self):
        if self.k < 1:
            raise ValueError("tower index k must be >= 1")
        if self.kappa is not None and (self.kappa - 1) % self.p != 0:
            raise ValueError("kappa must be congruent to 1 mod p")

    def kappa_value(self) -> int:
        return self.kappa if self.kappa is not None else 1 + self.p ** self.k

    def omega_degree(self, n: int) -> int:
        return self.p ** max(0, n - self.k)


def weierstrass_divide(f: LambdaTrunc, g: LambdaPoly) -> tuple[LambdaTrunc, LambdaPoly]:
    """Division f = q*g + r with deg r < deg g, g distinguished.

    Splits the running remainder into low part (degree < d) and high
    part, absorbs the high part into the quotient, and feeds the
    correction -b*high back in, where b = g - T^d has coefficients in
    pZ; the correction gains a factor p each pass, so at most N+1
    passes are needed at precision p^N.
    """
    ctx = f.context
    if not is_distinguished(g):
        raise NotDistinguished(f"divisor is not distinguished: {g}")
    d = g.degree
    cap = f.degree_cap
    if cap < d:
        raise InsufficientDegreeCap(f"degree cap {cap} is below deg g = {d}")
    if d == 0:
        return f, LambdaPoly.zero(ctx)

    q_mod = ctx.modulus
    b = list(g.coeffs[:-1])
    rem = list(f.coeffs)
    quot = [0] * cap
    for _ in range(ctx.precision_exp + 2):
        high = rem[d:]
        if not any(high):
            break
        for i, h in enumerate(high):
            quot[i] = (quot[i] + h) % q_mod
        new_rem = rem[:d] + [0] * (cap - d)
        for i, h in enumerate(high):
            if h == 0:
                continue
            for j, bj in enumerate(b):
                if bj and i + j < cap:
                    new_rem[i + j] = (new_rem[i + j] - h * bj) % q_mod
        rem = new_rem
    else:
        raise InsufficientDegreeCap("division iteration failed to converge")
    return (
        LambdaTrunc.from_ints(quot, ctx, cap),
        LambdaPoly.from_ints(rem[:d], ctx),
    )


def weierstrass_prepare(f: LambdaTrunc) -> WeierstrassData:
    """Factor f as p^mu * P * u with P distinguished of degree lambda, u a unit."""
    ctx = f.context
    p, n_exp = ctx.p, ctx.precision_exp
    mu = min((ctx.valuation_of(c) for c in f.coeffs), default=n_exp)
    if mu >= n_exp:
        raise PrecisionExhausted(
            "every coefficient vanishes at working precision; mu is undetermined"
        )
    scale = p ** mu
    f1 = LambdaTrunc.from_ints(
        [c // scale for c in f.coeffs], ctx, f.degree_cap
    )
    lam = next(i for i, c in enumerate(f1.coeffs) if c % p != 0)
    if lam >= f.degree_cap:
        raise InsufficientDegreeCap(
            f"distinguished degree {lam} does not fit under cap {f.degree_cap}"
        )
    if lam == 0:
        return WeierstrassData(mu, LambdaPoly.one(ctx), f1)

    poly = LambdaPoly.from_ints([0] * lam + [1], ctx)
    unit = None
    for _ in range(n_exp + 2):
        quot, rem = weierstrass_divide(f1, poly)
        if rem.is_zero:
            unit = quot
            break
        correction = quot.unit_inverse() * rem.to_trunc(f.degree_cap)
        delta = list(correction.coeffs[:lam])
        coeffs = list(poly.coeffs)
        for i, c in enumerate(delta):
            coeffs[i] = (coeffs[i] + c) % ctx.modulus
        poly = LambdaPoly.from_ints(coeffs, ctx)
    if unit is None:
        raise InsufficientDegreeCap("preparation iteration failed to converge")
    return WeierstrassData(mu, poly, unit)


def omega(n: int, params: TowerParams, context: PadicContext) -> LambdaPoly:
    """The cyclotomic polynomial (T+1)^{p^{n-k}} - 1, flattened below k."""
    if n < 0:
        raise BadLevels(f"level must be non-negative, got {n}")
    _check_tower(params, context)
    s = params.omega_degree(n)
    coeffs = [0] + [math.comb(s, j) for j in range(1, s + 1)]
    return LambdaPoly.from_ints(coeffs, context)


def nu(m: int, n: int, params: TowerParams, context: PadicContext) -> LambdaPoly:
    """Exact quotient omega_m / omega_n = sum of (1+T)^{i * p^{n-k}}."""
    if not m > n >= 0:
        raise BadLevels(f"need m > n >= 0, got m={m}, n={n}")
    _check_tower(params, context)
    a = params.omega_degree(n)
    t = params.omega_degree(m) // a
    deg = a * (t - 1)
    coeffs = [0] * (deg + 1)
    for i in range(t):
        e = i * a
        for j in range(e + 1):
            coeffs[j] += math.comb(e, j)
    return LambdaPoly.from_ints(coeffs, context)


def involution_image_of_t(
    params: TowerParams, context: PadicContext, degree_cap: int
) -> LambdaTrunc:
    """T* = kappa*(1+T)^{-1} - 1 as a truncation."""
    _check_tower(params, context)
    one_plus_t = LambdaTrunc.from_ints((1, 1), context, degree_cap)
    img = one_plus_t.unit_inverse().scale(params.kappa_value())
    return img - LambdaTrunc.one(context, degree_cap)


def iwasawa_involution(f: LambdaTrunc, params: TowerParams) -> LambdaTrunc:
    """Substitute T -> kappa*(1+T)^{-1} - 1, expanded mod (p^N, T^D)."""
    t_star = involution_image_of_t(params, f.context, f.degree_cap)
    return f.substitute(t_star)


def _check_tower(params: TowerParams, context: PadicContext):
    if params.p != context.p:
        raise ContextMismatch(
            f"tower prime {params.p} differs from context prime {context.p}"
        )
