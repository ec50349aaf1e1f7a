"""Subgroups of finite levels: socles, primary parts, saturation, property F.

A Subgroup is the span of explicit generator columns inside a finite
level, always taken together with the level's relation span.  Orders,
membership, sums and intersections reduce to Smith computations on the
stacked generator/relation matrices.

Two different kernels coexist deliberately.  The plain kernel of a map
phi on M_n is the honest finite-group preimage of the relation span
(hom_kernel).  The socle instead keeps only the directions that phi
kills to full working precision (diagonal exponent N in the Smith form
of the matrix); directions annihilated only because the finite
quotient truncates them are excluded and reported as fuzz.  The socle
is what recovers structural annihilators; the honest kernel is what
norm-map statements quantify over.

Saturation is lattice saturation: the generators are read as a
Z_p-lattice, unit-normalised through the Smith form, and every
direction attested below precision is rescaled to a primitive basis
vector.  This follows the generators, not the abstract subgroup; in a
finite p-group the literal p-divisible hull degenerates (p^j x lands
in any subgroup once it hits zero), so the lattice reading is the one
that matches the intended closure.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .errors import BadLevels, ContextMismatch, NotTStable
from .lambda_algebra import LambdaPoly
from .linalg import (
    Matrix,
    SmithResult,
    Vector,
    mat_hstack,
    mat_mul,
    mat_vec,
    poly_of_matrix,
    preimage_columns,
    smith_normal_form,
)
from .modules import ElementaryModule, FiniteLevel


class Subgroup:
    """Span of generator columns (plus relations) in a finite level."""

    def __init__(self, ambient: FiniteLevel, generator_columns, meta=None):
        self.ambient = ambient
        q = ambient.modulus
        gens = []
        for col in generator_columns:
            if len(col) != ambient.rank:
                raise ContextMismatch("generator length does not match the level rank")
            reduced = [c % q for c in col]
            if any(reduced):
                gens.append(reduced)
        self.generator_columns: list[Vector] = gens
        self.meta: dict = dict(meta or {})
        self._full: SmithResult | None = None
        self._order_exp: int | None = None

    @property
    def full_smith(self) -> SmithResult:
        if self._full is None:
            level = self.ambient
            if self.generator_columns:
                gens = [
                    [col[i] for col in self.generator_columns]
                    for i in range(level.rank)
                ]
                stacked = mat_hstack(gens, level.relation_matrix)
            else:
                stacked = level.relation_matrix
            self._full = smith_normal_form(
                stacked, level.p, level.context.precision_exp
            )
        return self._full

    @property
    def order_exp(self) -> int:
        if self._order_exp is None:
            lattice_exp = sum(self.full_smith.padded_exps())
            self._order_exp = self.ambient.size_exp - lattice_exp
        return self._order_exp

    @property
    def order(self) -> int:
        return self.ambient.p ** self.order_exp

    @property
    def is_trivial(self) -> bool:
        return self.order_exp == 0

    def contains(self, x: Vector) -> bool:
        return self.full_smith.in_column_span([c % self.ambient.modulus for c in x])

    def contains_subgroup(self, other: "Subgroup") -> bool:
        self._check(other)
        return all(self.contains(g) for g in other.generator_columns)

    def equals(self, other: "Subgroup") -> bool:
        return self.contains_subgroup(other) and other.contains_subgroup(self)

    def _check(self, other: "Subgroup"):
        if other.ambient is not self.ambient and (
            other.ambient.level != self.ambient.level
            or other.ambient.rank != self.ambient.rank
        ):
            raise ContextMismatch("subgroups live in different levels")

    def add(self, other: "Subgroup") -> "Subgroup":
        self._check(other)
        return Subgroup(
            self.ambient, self.generator_columns + other.generator_columns
        )

    def intersect(self, other: "Subgroup") -> "Subgroup":
        self._check(other)
        level = self.ambient
        a = self._lattice_matrix()
        b = other._lattice_matrix()
        coeffs = preimage_columns(a, b, level.p, level.context.precision_exp)
        gens = [mat_vec(a, u, level.modulus) for u in coeffs]
        return Subgroup(level, gens)

    def _lattice_matrix(self) -> Matrix:
        level = self.ambient
        if not self.generator_columns:
            return level.relation_matrix
        gens = [
            [col[i] for col in self.generator_columns] for i in range(level.rank)
        ]
        return mat_hstack(gens, level.relation_matrix)

    def image_under(self, matrix: Matrix, target: FiniteLevel | None = None) -> "Subgroup":
        level = target or self.ambient
        gens = [mat_vec(matrix, g, level.modulus) for g in self.generator_columns]
        return Subgroup(level, gens)

    def is_t_stable(self) -> bool:
        t = self.ambient.t_action
        return all(
            self.contains(mat_vec(t, g, self.ambient.modulus))
            for g in self.generator_columns
        )

    def invariant_factor_exps(self) -> list[int]:
        """Exponents a_1 >= a_2 >= ... with the subgroup = sum of Z/p^{a_i}."""
        level = self.ambient
        p, n_exp = level.p, level.context.precision_exp
        sizes = [self.order_exp]
        j = 0
        while sizes[-1] > 0 and j < n_exp:
            j += 1
            scale = p ** j
            scaled = Subgroup(
                level,
                [[(scale * c) % level.modulus for c in g] for g in self.generator_columns],
            )
            sizes.append(scaled.order_exp)
        counts = [sizes[i] - sizes[i + 1] for i in range(len(sizes) - 1)]
        out: list[int] = []
        for exp in range(len(counts), 0, -1):
            how_many = counts[exp - 1] - (counts[exp] if exp < len(counts) else 0)
            out.extend([exp] * how_many)
        return out

    def invariant_factors(self) -> list[int]:
        return [self.ambient.p ** a for a in self.invariant_factor_exps()]

    def elements(self):
        """Brute-force enumeration; only sensible for small subgroups."""
        level = self.ambient
        q = level.modulus
        seen = {tuple(level.canonical_form([0] * level.rank))}
        frontier = [[0] * level.rank]
        gens = self.generator_columns
        while frontier:
            x = frontier.pop()
            for g in gens:
                y = [(a + b) % q for a, b in zip(x, g)]
                key = tuple(level.canonical_form(y))
                if key not in seen:
                    seen.add(key)
                    frontier.append(list(key))
        return [list(k) for k in seen]

    def __repr__(self) -> str:
        return (
            f"Subgroup(order=p^{self.order_exp}, "
            f"gens={len(self.generator_columns)}, level={self.ambient.level})"
        )


def subgroup_sum(a: Subgroup, b: Subgroup) -> Subgroup:
    return a.add(b)


def trivial_subgroup(level: FiniteLevel) -> Subgroup:
    return Subgroup(level, [])


def full_subgroup(level: FiniteLevel) -> Subgroup:
    gens = [[1 if i == j else 0 for i in range(level.rank)] for j in range(level.rank)]
    return Subgroup(level, gens)


def hom_kernel(level: FiniteLevel, matrix: Matrix) -> Subgroup:
    """Honest kernel of the induced endomorphism: preimage of the relations."""
    cols = preimage_columns(
        matrix, level.relation_matrix, level.p, level.context.precision_exp
    )
    return Subgroup(level, cols)


def socle(module: ElementaryModule, n: int, f: LambdaPoly) -> Subgroup:
    """Directions annihilated by f(t) to full precision.

    meta carries fuzz_directions: the count of Smith directions killed
    only partially (exponent strictly between 0 and N), which signal
    either precision shortfall or torsion pinned by the finite level.
    """
    level = module.finite_level(n)
    return matrix_socle(level, poly_of_matrix(list(f.coeffs), level.t_action, level.modulus))


def matrix_socle(level: FiniteLevel, w: Matrix) -> Subgroup:
    n_exp = level.context.precision_exp
    smith = smith_normal_form(w, level.p, n_exp)
    gens = []
    fuzz = 0
    for i, d in enumerate(smith.diag_exps):
        if d >= n_exp:
            gens.append([row[i] for row in smith.V])
        elif d > 0:
            fuzz += 1
    return Subgroup(level, gens, meta={"fuzz_directions": fuzz})


def primary_part(module: ElementaryModule, n: int, f: LambdaPoly) -> Subgroup:
    """Stabilized iterated socle of powers of f(t).

    meta reports c_estimate, the valuation of det f(t) on the summand
    blocks not matching f; when it reaches the working precision the
    split between f-part and the rest is unreliable.
    """
    level = module.finite_level(n)
    q = level.modulus
    n_exp = level.context.precision_exp
    w = poly_of_matrix(list(f.coeffs), level.t_action, q)

    summand_polys = [g for g, _ in module.poly_summands]
    c_estimate = 0
    for block in level.blocks:
        if block.kind == "poly" and summand_polys[block.index] == f:
            continue
        sub = smith_normal_form(
            [row[block.offset : block.offset + block.width]
             for row in w[block.offset : block.offset + block.width]],
            level.p,
            n_exp,
        )
        c_estimate = max(c_estimate, sum(sub.diag_exps))
    bound = max(
        1,
        sum(e for _, e in module.poly_summands) + sum(module.mu_summands),
    )
    current = matrix_socle(level, w)
    power = w
    iterations = 1
    for _ in range(1, bound):
        power = mat_mul(power, w, q)
        nxt = matrix_socle(level, power)
        iterations += 1
        if nxt.equals(current):
            break
        current = nxt
    current.meta.update(
        {
            "c_estimate": c_estimate,
            "reliable": c_estimate < n_exp,
            "iterations": iterations,
        }
    )
    return current


def saturate(a: Subgroup) -> Subgroup:
    """Lattice saturation of the generators inside the ambient level."""
    level = a.ambient
    if not a.generator_columns:
        return Subgroup(level, [], meta=dict(a.meta))
    n_exp = level.context.precision_exp
    g = [[col[i] for col in a.generator_columns] for i in range(level.rank)]
    smith = smith_normal_form(g, level.p, n_exp)
    gens = []
    for i, d in enumerate(smith.diag_exps):
        if d < n_exp:
            gens.append([row[i] for row in smith.Uinv])
    return Subgroup(level, gens, meta=dict(a.meta))


def is_coalescence_closed(a: Subgroup) -> bool:
    if not a.is_t_stable():
        raise NotTStable("subgroup is not closed under the T-action")
    return saturate(a).equals(a)


def t_closure(a: Subgroup) -> Subgroup:
    """Close under t_action; meta records whether the input was enlarged."""
    level = a.ambient
    current = Subgroup(level, a.generator_columns, meta=dict(a.meta))
    enlarged = False
    for _ in range(level.size_exp + 1):
        if current.is_t_stable():
            break
        extra = [
            mat_vec(level.t_action, g, level.modulus)
            for g in current.generator_columns
        ]
        current = Subgroup(
            level, current.generator_columns + extra, meta=dict(current.meta)
        )
        enlarged = True
    current.meta["t_closure_enlarged"] = enlarged
    return current


@dataclass
class SplitReport:
    """Decomposition M_n = (T-socle) + complement with exactness verdict."""

    socle_t: Subgroup
    complement: Subgroup
    verified: bool
    intersection_order_exp: int
    sum_order_exp: int


def split_t_part(module: ElementaryModule, n: int) -> SplitReport:
    level = module.finite_level(n)
    t_poly = LambdaPoly.variable(module.context)
    soc = socle(module, n, t_poly)
    image = Subgroup(
        level, [[row[j] for row in level.t_action] for j in range(level.rank)]
    )
    comp = saturate(image)
    inter = soc.intersect(comp)
    total = soc.add(comp)
    verified = inter.is_trivial and total.order_exp == level.size_exp
    return SplitReport(soc, comp, verified, inter.order_exp, total.order_exp)


def y_kernel(module: ElementaryModule, n: int, horizon: int) -> Subgroup:
    """Kernel of the norm from the horizon level down to level n."""
    if not horizon > n >= 0:
        raise BadLevels(f"need horizon > n >= 0, got horizon={horizon}, n={n}")
    level = module.finite_level(horizon)
    low = module.finite_level(n)
    nrm = module.norm_map(horizon, n).matrix
    cols = preimage_columns(
        nrm, low.relation_matrix, level.p, level.context.precision_exp
    )
    return Subgroup(level, cols)


@dataclass
class PropertyFReport:
    """Comparison of ker(N_{H,n}) cap A against omega_n(t) A."""

    ok: bool
    level: int
    horizon: int
    kernel_part_factors: list[int] = field(default_factory=list)
    omega_part_factors: list[int] = field(default_factory=list)
    witness: Vector | None = None


def property_f_check(
    module: ElementaryModule, a: Subgroup, n: int
) -> PropertyFReport:
    horizon = a.ambient.level
    if not horizon > n >= 0:
        raise BadLevels(
            f"subgroup lives at level {horizon}, need it above the checked level {n}"
        )
    if not a.is_t_stable():
        raise NotTStable("property F is only defined for T-stable subgroups")
    level = a.ambient
    om = module.omega(n)
    om_t = poly_of_matrix(list(om.coeffs), level.t_action, level.modulus)
    omega_a = a.image_under(om_t)
    kernel_part = y_kernel(module, n, horizon).intersect(a)
    if kernel_part.equals(omega_a):
        return PropertyFReport(True, n, horizon)
    witness = None
    for g in kernel_part.generator_columns:
        if not omega_a.contains(g):
            witness = level.canonical_form(g)
            break
    return PropertyFReport(
        False,
        n,
        horizon,
        kernel_part.invariant_factors(),
        omega_a.invariant_factors(),
        witness,
    )
