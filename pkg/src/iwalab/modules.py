"""Torsion modules over the Iwasawa algebra and their finite levels.

An ElementaryModule is a direct sum of cyclic pieces Lambda/(f^e) with
f distinguished, and Lambda/(p^m).  Its level-n quotient M_n divides
out omega_n (the flattened cyclotomic polynomial of the tower) and is
realised as an explicit finite abelian p-group with a T-action:

- a poly summand Lambda/(g) keeps the monomial basis 1, ..., T^{deg g - 1}
  of Lambda/(g) at every level, with T acting by the companion matrix
  of g and relation columns omega_n(t);
- a mu summand Lambda/(p^m) uses the monomial basis mod omega_n, with
  T acting by the companion matrix of omega_n and relations p^m * I.

The poly-summand basis is level-independent, which makes norm maps
coordinate projections and keeps transition computations stable.  The
price is that omega_n(t_action) vanishes only modulo the relation
span, not as a literal matrix; the relation span is that image by
construction, and the invariant is tested in that form.

Orders that come out as p^N exactly are unresolved at the working
precision (the module direction may be Z_p-free); such levels carry a
sticky flag that downstream reports propagate.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import BadLevels, ContextMismatch, NotDistinguished
from .lambda_algebra import LambdaPoly, TowerParams, is_distinguished, nu, omega
from .linalg import (
    Matrix,
    SmithResult,
    Vector,
    assemble_block_smith,
    mat_hstack,
    mat_mul,
    mat_vec,
    mat_zero,
    poly_of_matrix,
    smith_normal_form,
    smith_of_diagonal,
)
from .padic import PadicContext


def companion_matrix(g: LambdaPoly) -> Matrix:
    """Multiplication-by-T matrix on the monomial basis of Lambda/(g)."""
    d = g.degree
    q = g.context.modulus
    out = mat_zero(d, d)
    for j in range(d - 1):
        out[j + 1][j] = 1
    for i in range(d):
        out[i][d - 1] = (-g.coeff(i)) % q
    return out


def _monomial_columns(g: LambdaPoly, count: int, start: list[int] | None = None):
    """Columns start * T^j mod g for j < count (start defaults to 1)."""
    d = g.degree
    q = g.context.modulus
    cur = [0] * d
    if start is None:
        cur[0] = 1
    else:
        cur[: len(start)] = [c % q for c in start]
    cols = []
    for _ in range(count):
        cols.append(cur[:])
        top = cur[d - 1]
        nxt = [0] + cur[: d - 1]
        if top:
            for i in range(d):
                nxt[i] = (nxt[i] - top * g.coeff(i)) % q
        else:
            nxt = [c % q for c in nxt]
        cur = nxt
    return cols


@dataclass(frozen=True)
class SummandBlock:
    """Slice of the generator basis belonging to one summand."""

    kind: str  # "poly" or "mu"
    index: int
    offset: int
    width: int
    label: str


class FiniteLevel:
    """Level-n quotient: ambient (Z/p^N)^rank modulo relation columns.

    The Smith form of the relation matrix fixes coordinates: an element
    x is zero iff U x vanishes against the diagonal exponents, and the
    group is the direct sum of Z/p^{d_i} in those coordinates.
    """

    def __init__(
        self,
        context: PadicContext,
        params: TowerParams,
        level: int,
        t_action: Matrix,
        relation_matrix: Matrix,
        blocks: tuple[SummandBlock, ...] = (),
        smith: SmithResult | None = None,
        module: "ElementaryModule | None" = None,
    ):
        self.context = context
        self.params = params
        self.level = level
        self.t_action = t_action
        self.relation_matrix = relation_matrix
        self.blocks = blocks
        self.module = module
        self.rank = len(t_action)
        self.smith = smith or smith_normal_form(
            relation_matrix, context.p, context.precision_exp
        )
        self.diag_exps = self.smith.padded_exps()
        self.invariant_factor_exps = sorted(
            (d for d in self.diag_exps if d > 0), reverse=True
        )
        self.size_exp = sum(self.diag_exps)
        self.p_rank = len(self.invariant_factor_exps)
        self.unresolved = any(d >= context.precision_exp for d in self.diag_exps)

    @property
    def p(self) -> int:
        return self.context.p

    @property
    def modulus(self) -> int:
        return self.context.modulus

    def invariant_factors(self) -> list[int]:
        return [self.p ** a for a in self.invariant_factor_exps]

    def zero_vector(self) -> Vector:
        return [0] * self.rank

    def generator_labels(self) -> list[str]:
        labels = []
        if self.blocks:
            for b in self.blocks:
                labels.extend(f"{b.label}:T^{j}" for j in range(b.width))
        else:
            labels = [f"g{j}" for j in range(self.rank)]
        return labels

    def apply_t(self, x: Vector) -> Vector:
        return mat_vec(self.t_action, x, self.modulus)

    def smith_coordinates(self, x: Vector) -> Vector:
        """Coordinates of x in the diagonalized group, reduced mod p^{d_i}."""
        ux = mat_vec(self.smith.U, x, self.modulus)
        return [c % (self.p ** d) if d > 0 else 0 for c, d in zip(ux, self.diag_exps)]

    def from_smith_coordinates(self, y: Vector) -> Vector:
        return mat_vec(self.smith.Uinv, y, self.modulus)

    def canonical_form(self, x: Vector) -> Vector:
        return self.from_smith_coordinates(self.smith_coordinates(x))

    def is_zero_element(self, x: Vector) -> bool:
        return all(c == 0 for c in self.smith_coordinates(x))

    def elements_equal(self, x: Vector, y: Vector) -> bool:
        diff = [(a - b) % self.modulus for a, b in zip(x, y)]
        return self.is_zero_element(diff)

    def element_order_exp(self, x: Vector) -> int:
        ux = mat_vec(self.smith.U, x, self.modulus)
        best = 0
        for c, d in zip(ux, self.diag_exps):
            if d == 0:
                continue
            # order along this coordinate is p^{d - min(v_p(c), d)}
            need = d - min(self.context.valuation_of(c), d)
            if need > best:
                best = need
        return best

    def element_order(self, x: Vector) -> int:
        return self.p ** self.element_order_exp(x)

    def elements(self):
        """All elements, one representative per class; p^{size_exp} many."""
        live = [(i, self.p ** d) for i, d in enumerate(self.diag_exps) if d > 0]
        q = self.modulus
        uinv_cols = [
            [row[i] for row in self.smith.Uinv] for i, _ in live
        ]
        def rec(j, acc):
            if j == len(live):
                yield [c % q for c in acc]
                return
            _, size = live[j]
            col = uinv_cols[j]
            for c in range(size):
                if c == 0:
                    yield from rec(j + 1, acc)
                else:
                    yield from rec(j + 1, [a + c * b for a, b in zip(acc, col)])
        yield from rec(0, [0] * self.rank)

    def random_element(self, rng) -> Vector:
        y = [
            rng.randrange(self.p ** d) if d > 0 else 0 for d in self.diag_exps
        ]
        return self.from_smith_coordinates(y)

    def t_block(self, block: SummandBlock) -> Matrix:
        o, w = block.offset, block.width
        return [row[o : o + w] for row in self.t_action[o : o + w]]

    def omega_action(self) -> Matrix:
        """omega_level(t_action); its columns lie in the relation span."""
        om = omega(self.level, self.params, self.context)
        return poly_of_matrix(list(om.coeffs), self.t_action, self.modulus)

    def __repr__(self) -> str:
        flag = ", unresolved" if self.unresolved else ""
        return (
            f"FiniteLevel(n={self.level}, factors="
            f"{self.invariant_factors()}{flag})"
        )


class ElementaryModule:
    """Direct sum of Lambda/(f^e) (f distinguished) and Lambda/(p^m)."""

    def __init__(
        self,
        context: PadicContext,
        params: TowerParams,
        poly_summands=(),
        mu_summands=(),
    ):
        if params.p != context.p:
            raise ContextMismatch("tower and coefficient primes differ")
        self.context = context
        self.params = params
        checked = []
        for f, e in poly_summands:
            if f.context != context:
                raise ContextMismatch("summand polynomial has a foreign context")
            if not is_distinguished(f):
                raise NotDistinguished(f"summand polynomial must be distinguished: {f}")
            if e < 1:
                raise ValueError("summand exponent must be >= 1")
            if f.degree < 1:
                raise ValueError("summand polynomial must have degree >= 1")
            checked.append((f, int(e)))
        self.poly_summands = tuple(checked)
        for m in mu_summands:
            if m < 1:
                raise ValueError("mu exponent must be >= 1")
        self.mu_summands = tuple(int(m) for m in mu_summands)
        if not self.poly_summands and not self.mu_summands:
            raise ValueError("module needs at least one summand")
        self._levels: dict[int, FiniteLevel] = {}
        self._norms: dict[tuple[int, int], LevelMap] = {}
        self._lifts: dict[tuple[int, int], LevelMap] = {}

    @property
    def lambda_invariant(self) -> int:
        return sum(e * f.degree for f, e in self.poly_summands)

    @property
    def mu_invariant(self) -> int:
        return sum(self.mu_summands)

    def omega(self, n: int) -> LambdaPoly:
        return omega(n, self.params, self.context)

    def nu(self, m: int, n: int) -> LambdaPoly:
        return nu(m, n, self.params, self.context)

    def summand_polys(self) -> list[tuple[LambdaPoly, int]]:
        return list(self.poly_summands)

    def finite_level(self, n: int) -> FiniteLevel:
        if n < 0:
            raise BadLevels(f"level must be non-negative, got {n}")
        if n not in self._levels:
            self._levels[n] = self._build_level(n)
        return self._levels[n]

    def _build_level(self, n: int) -> FiniteLevel:
        ctx, params = self.context, self.params
        p, n_exp = ctx.p, ctx.precision_exp
        q = ctx.modulus
        om = self.omega(n)
        om_coeffs = list(om.coeffs)

        blocks: list[SummandBlock] = []
        t_blocks: list[Matrix] = []
        rel_smiths: list[SmithResult] = []
        rel_blocks: list[Matrix] = []
        offset = 0
        idx = 0
        for f, e in self.poly_summands:
            g = f
            for _ in range(e - 1):
                g = g * f
            d = g.degree
            t = companion_matrix(g)
            rel = poly_of_matrix(om_coeffs, t, q)
            blocks.append(SummandBlock("poly", idx, offset, d, f"poly[{idx}]"))
            t_blocks.append(t)
            rel_blocks.append(rel)
            rel_smiths.append(smith_normal_form(rel, p, n_exp))
            offset += d
            idx += 1
        for m in self.mu_summands:
            w = om.degree
            t = companion_matrix(om)
            scale = p ** m if m < n_exp else 0
            rel = [[scale if i == j else 0 for j in range(w)] for i in range(w)]
            blocks.append(SummandBlock("mu", idx, offset, w, f"mu[{idx}]"))
            t_blocks.append(t)
            rel_blocks.append(rel)
            rel_smiths.append(smith_of_diagonal([scale] * w, p, n_exp))
            offset += w
            idx += 1

        rank = offset
        t_action = mat_zero(rank, rank)
        relation = mat_zero(rank, rank)
        for b, tb, rb in zip(blocks, t_blocks, rel_blocks):
            o = b.offset
            for i in range(b.width):
                ti, ri = tb[i], rb[i]
                for j in range(b.width):
                    t_action[o + i][o + j] = ti[j]
                    relation[o + i][o + j] = ri[j]
        smith = assemble_block_smith(rel_smiths, p, n_exp)
        return FiniteLevel(
            ctx, params, n, t_action, relation, tuple(blocks), smith, self
        )

    def norm_map(self, m: int, n: int) -> "LevelMap":
        if not m > n >= 0:
            raise BadLevels(f"norm needs m > n >= 0, got m={m}, n={n}")
        key = (m, n)
        if key not in self._norms:
            self._norms[key] = self._build_norm(m, n)
        return self._norms[key]

    def _build_norm(self, m: int, n: int) -> "LevelMap":
        top, bottom = self.finite_level(m), self.finite_level(n)
        q = self.context.modulus
        om_n = self.omega(n)
        matrix = mat_zero(bottom.rank, top.rank)
        for bb, bt in zip(bottom.blocks, top.blocks):
            if bb.kind == "poly":
                for j in range(bb.width):
                    matrix[bb.offset + j][bt.offset + j] = 1
            else:
                cols = _monomial_columns(om_n, bt.width)
                for j in range(bt.width):
                    for i in range(bb.width):
                        matrix[bb.offset + i][bt.offset + j] = cols[j][i] % q
        return LevelMap("norm", m, n, matrix, self)

    def lift_map(self, n: int, m: int) -> "LevelMap":
        if not m > n >= 0:
            raise BadLevels(f"lift needs m > n >= 0, got m={m}, n={n}")
        key = (n, m)
        if key not in self._lifts:
            self._lifts[key] = self._build_lift(n, m)
        return self._lifts[key]

    def _build_lift(self, n: int, m: int) -> "LevelMap":
        bottom, top = self.finite_level(n), self.finite_level(m)
        q = self.context.modulus
        nu_poly = self.nu(m, n)
        om_m = self.omega(m)
        matrix = mat_zero(top.rank, bottom.rank)
        for bb, bt in zip(bottom.blocks, top.blocks):
            if bb.kind == "poly":
                t = top.t_block(bt)
                nu_t = poly_of_matrix(list(nu_poly.coeffs), t, q)
                for i in range(bt.width):
                    for j in range(bb.width):
                        matrix[bt.offset + i][bb.offset + j] = nu_t[i][j]
            else:
                cols = _monomial_columns(
                    om_m, bb.width, start=list(nu_poly.coeffs)
                )
                for j in range(bb.width):
                    for i in range(bt.width):
                        matrix[bt.offset + i][bb.offset + j] = cols[j][i] % q
        return LevelMap("lift", n, m, matrix, self)


@dataclass
class LevelMap:
    """Norm (top level to bottom) or lift (bottom to top) in coordinates."""

    kind: str
    from_level: int
    to_level: int
    matrix: Matrix
    module: ElementaryModule

    def apply(self, x: Vector) -> Vector:
        return mat_vec(self.matrix, x, self.module.context.modulus)

    def source(self) -> FiniteLevel:
        return self.module.finite_level(self.from_level)

    def target(self) -> FiniteLevel:
        return self.module.finite_level(self.to_level)

    def is_injective(self) -> bool:
        """Kernel as a map of finite levels is zero."""
        src, tgt = self.source(), self.target()
        stacked = mat_hstack(self.matrix, tgt.relation_matrix)
        smith = smith_normal_form(
            stacked, self.module.context.p, self.module.context.precision_exp
        )
        for col in smith.kernel_columns():
            x = col[: src.rank]
            if not src.is_zero_element(x):
                return False
        return True


@dataclass
class CircReport:
    """Outcome of the norm/lift compatibility identities at (n, m)."""

    level_low: int
    level_high: int
    norm_after_lift_ok: bool
    lift_after_norm_ok: bool
    detail: str = ""

    @property
    def ok(self) -> bool:
        return self.norm_after_lift_ok and self.lift_after_norm_ok


def finite_level(module: ElementaryModule, n: int) -> FiniteLevel:
    return module.finite_level(n)


def norm_map(module: ElementaryModule, m: int, n: int) -> LevelMap:
    return module.norm_map(m, n)


def lift_map(module: ElementaryModule, n: int, m: int) -> LevelMap:
    return module.lift_map(n, m)


def _columns_in_span(mat: Matrix, span: SmithResult) -> bool:
    if not mat:
        return True
    for j in range(len(mat[0])):
        if not span.in_column_span([row[j] for row in mat]):
            return False
    return True


def verify_circ(module: ElementaryModule, n: int, m: int | None = None) -> CircReport:
    """Check norm(lift(x)) = p^{m-n} x and lift(norm(y)) = nu_{m,n} y.

    Both sides are compared as homomorphisms of the finite levels: the
    difference matrix must map into the relation span.
    """
    if m is None:
        m = n + 1
    if not m > n >= 0:
        raise BadLevels(f"need m > n >= 0, got m={m}, n={n}")
    ctx = module.context
    q = ctx.modulus
    low, high = module.finite_level(n), module.finite_level(m)
    lift = module.lift_map(n, m).matrix
    nrm = module.norm_map(m, n).matrix

    comp_low = mat_mul(nrm, lift, q)
    p_power = pow(ctx.p, m - n, q)
    diff_low = [
        [(comp_low[i][j] - (p_power if i == j else 0)) % q for j in range(low.rank)]
        for i in range(low.rank)
    ]
    ok_low = _columns_in_span(diff_low, low.smith)

    comp_high = mat_mul(lift, nrm, q)
    nu_poly = module.nu(m, n)
    nu_t = poly_of_matrix(list(nu_poly.coeffs), high.t_action, q)
    diff_high = [
        [(comp_high[i][j] - nu_t[i][j]) % q for j in range(high.rank)]
        for i in range(high.rank)
    ]
    ok_high = _columns_in_span(diff_high, high.smith)

    detail = ""
    if not ok_low:
        detail = f"norm(lift) differs from p^{m - n} on level {n}"
    elif not ok_high:
        detail = f"lift(norm) differs from nu_({m},{n}) on level {m}"
    return CircReport(n, m, ok_low, ok_high, detail)


@dataclass
class TransitionReport:
    """Structure of C_n = M_{n+1} / lift(M_n) and its annihilator index."""

    level: int
    growth_factor: int
    classification: str
    quotient_invariant_factors: list[int]
    quotient_size_exp: int
    lift_injective: bool
    unresolved: bool


def _classify_growth(k: int, p: int) -> str:
    if k == 1:
        return "Stable"
    if k < p - 1:
        return "Semistable"
    if k == p - 1:
        return "Tame"
    return "Wild"


def transition(module: ElementaryModule, n: int) -> TransitionReport:
    """Quotient by the lifted lower level and the least omega_n-power killing it."""
    ctx = module.context
    p, n_exp = ctx.p, ctx.precision_exp
    q = ctx.modulus
    high = module.finite_level(n + 1)
    lift = module.lift_map(n, n + 1)

    stacked = mat_hstack(lift.matrix, high.relation_matrix)
    smith = smith_normal_form(stacked, p, n_exp)
    exps = smith.padded_exps()
    factors = sorted((d for d in exps if d > 0), reverse=True)
    size_exp = sum(exps)
    unresolved = high.unresolved or any(d >= n_exp for d in exps)

    om = module.omega(n)
    w = poly_of_matrix(list(om.coeffs), high.t_action, q)
    power = w
    k = 1
    cap = size_exp + 1
    while not _columns_in_span(power, smith):
        k += 1
        if k > cap:
            raise RuntimeError("transition annihilator search exceeded its bound")
        power = mat_mul(w, power, q)

    return TransitionReport(
        level=n,
        growth_factor=k,
        classification=_classify_growth(k, p),
        quotient_invariant_factors=[p ** a for a in factors],
        quotient_size_exp=size_exp,
        lift_injective=lift.is_injective(),
        unresolved=unresolved,
    )


@dataclass
class OrderProfileReport:
    """Orders of the images of one element down the tower."""

    levels: list[int]
    order_exps: list[int]
    kind: str  # "geometric", "mu-type", "zero", or "irregular"
    z: float | int | None
    n0: int | None

    def fitted_exponent(self, n: int, k: int) -> int:
        assert self.kind == "geometric" and self.z is not None
        return max(0, n - k + 2 + int(self.z))


def order_profile(
    module: ElementaryModule, element: Vector, levels: list[int]
) -> OrderProfileReport:
    """Push element down from the top level and record image orders.

    A tail growing by a factor p per level is fitted against
    ord(x_n) = p^{n - k + 2 + z}; a constant nonzero tail is mu-type.
    """
    if not levels or sorted(levels) != list(levels):
        raise BadLevels("levels must be a non-empty ascending list")
    top = levels[-1]
    exps = []
    for n in levels:
        x_n = element if n == top else module.norm_map(top, n).apply(element)
        exps.append(module.finite_level(n).element_order_exp(x_n))

    if all(e == 0 for e in exps):
        return OrderProfileReport(list(levels), exps, "zero", float("-inf"), None)
    if len(exps) < 2:
        return OrderProfileReport(list(levels), exps, "irregular", None, None)

    k = module.params.k
    last_step = exps[-1] - exps[-2]
    if levels[-1] - levels[-2] == 1 and last_step == 1:
        z = exps[-1] - (levels[-1] - k + 2)
        n0 = levels[-1]
        for lv, e in zip(reversed(levels), reversed(exps)):
            if e == max(0, lv - k + 2 + z):
                n0 = lv
            else:
                break
        return OrderProfileReport(list(levels), exps, "geometric", z, n0)
    if last_step == 0 and exps[-1] > 0:
        return OrderProfileReport(list(levels), exps, "mu-type", None, None)
    return OrderProfileReport(list(levels), exps, "irregular", None, None)
