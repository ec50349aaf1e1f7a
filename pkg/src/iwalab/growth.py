"""Stabilization detection for level-size sequences.

A growth series records, per tower level n, the exponent e_n with
|M_n| = p^{e_n}, the p-rank, and whether the level was flagged as
unresolved at working precision.  Once the tower stabilizes the sizes
obey e_n = mu p^(n-k) + lambda n + nu exactly, so the invariants are
recovered by exact integer fitting, never least squares: the law is
either satisfied on the nose or the fit is rejected.

Levels below k are ignored throughout; the cyclotomic annihilators
coincide there, so those entries duplicate level k and would poison a
frozen-size scan.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import BadLevels, InconsistentSeries, InsufficientData


@dataclass(frozen=True)
class GrowthEntry:
    level: int
    size_exp: int
    p_rank: int
    unresolved: bool = False


class GrowthSeries:
    """Validated sequence of level sizes for one tower."""

    def __init__(self, p: int, k: int, entries):
        if k < 1:
            raise BadLevels(f"tower offset k must be >= 1, got {k}")
        self.p = p
        self.k = k
        rows = [
            e if isinstance(e, GrowthEntry) else GrowthEntry(*e) for e in entries
        ]
        for prev, cur in zip(rows, rows[1:]):
            if cur.level <= prev.level:
                raise BadLevels(
                    f"levels must increase strictly: {prev.level} then {cur.level}"
                )
        for row in rows:
            if not row.size_exp >= row.p_rank >= 0:
                raise InconsistentSeries(
                    f"level {row.level}: need e_n >= r_n >= 0, "
                    f"got e={row.size_exp}, r={row.p_rank}"
                )
        self.entries: tuple[GrowthEntry, ...] = tuple(rows)

    @classmethod
    def from_module(cls, module, levels) -> "GrowthSeries":
        entries = []
        for n in levels:
            lev = module.finite_level(n)
            entries.append(
                GrowthEntry(n, lev.size_exp, lev.p_rank, lev.unresolved)
            )
        return cls(module.context.p, module.params.k, entries)

    def usable(self) -> list[GrowthEntry]:
        return [e for e in self.entries if e.level >= self.k]

    def clean(self) -> list[GrowthEntry]:
        return [e for e in self.usable() if not e.unresolved]


@dataclass(frozen=True)
class InvariantEstimate:
    status: str
    n0: int | None = None
    lambda_: int | None = None
    mu: int | None = None
    nu: int | None = None
    note: str = ""

    def predicted_exp(self, n: int, p: int, k: int) -> int:
        if self.lambda_ is None:
            raise InsufficientData("no fitted invariants to predict from")
        return self.mu * p ** (n - k) + self.lambda_ * n + self.nu


def _law(p: int, k: int, mu: int, lam: int, nu: int, n: int) -> int:
    return mu * p ** (n - k) + lam * n + nu


def detect_stabilization(series: GrowthSeries) -> InvariantEstimate:
    """Classify the tail of a size series and fit (lambda, mu, nu).

    SizeFrozen wins when two consecutive levels share a size; every
    later clean entry must then repeat it (sizes and ranks), anything
    else is InconsistentSeries.  Otherwise the last three flag-free
    consecutive levels pin the three invariants by exact division, and
    n0 is pushed backward while earlier entries keep satisfying the
    law.  Non-integer or negative fits come back Undetermined.
    """
    p, k = series.p, series.k
    clean = series.clean()

    triples = [
        i
        for i in range(len(clean) - 2)
        if clean[i + 1].level == clean[i].level + 1
        and clean[i + 2].level == clean[i].level + 2
    ]
    if not triples:
        raise InsufficientData(
            "need at least 3 flag-free consecutive levels at or above k"
        )

    for a, b in zip(clean, clean[1:]):
        if b.size_exp < a.size_exp:
            raise InconsistentSeries(
                f"size shrinks from level {a.level} to {b.level}; "
                "norm surjectivity forbids that"
            )

    for i, (a, b) in enumerate(zip(clean, clean[1:])):
        if b.level == a.level + 1 and b.size_exp == a.size_exp:
            for later in clean[i + 1 :]:
                if later.size_exp != a.size_exp:
                    raise InconsistentSeries(
                        f"size frozen at level {a.level} (e={a.size_exp}) "
                        f"but level {later.level} has e={later.size_exp}"
                    )
                if later.p_rank != a.p_rank:
                    raise InconsistentSeries(
                        f"size frozen at level {a.level} but p-rank moves "
                        f"at level {later.level}"
                    )
            return InvariantEstimate(
                "SizeFrozen",
                n0=a.level,
                lambda_=0,
                mu=0,
                nu=a.size_exp,
                note="levels beyond the freeze are isomorphic copies",
            )

    i = triples[-1]
    base, mid, top = clean[i], clean[i + 1], clean[i + 2]
    n = base.level
    d1 = mid.size_exp - base.size_exp
    d2 = top.size_exp - mid.size_exp
    step = p ** (n - k) * (p - 1) ** 2
    if (d2 - d1) % step != 0:
        return InvariantEstimate("Undetermined", note="mu fit is not integral")
    mu = (d2 - d1) // step
    if mu < 0:
        return InvariantEstimate("Undetermined", note="mu fit is negative")
    lam = d1 - mu * p ** (n - k) * (p - 1)
    if lam < 0:
        return InvariantEstimate("Undetermined", note="lambda fit is negative")
    nu = base.size_exp - mu * p ** (n - k) - lam * n

    fitting = 0
    for entry in reversed(clean):
        if _law(p, k, mu, lam, nu, entry.level) != entry.size_exp:
            break
        fitting += 1
    if fitting < len(clean) - i:
        return InvariantEstimate(
            "Undetermined", note="fit from the last triple fails on later entries"
        )
    n0 = clean[len(clean) - fitting].level
    return InvariantEstimate("Stabilized", n0=n0, lambda_=lam, mu=mu, nu=nu)


@dataclass(frozen=True)
class RankFreezeReport:
    ok: bool
    freeze_level: int | None
    note: str = ""

    def __bool__(self) -> bool:
        return self.ok


def rank_freeze_check(series: GrowthSeries) -> RankFreezeReport:
    """After the first repeated rank, every later rank must match it."""
    clean = series.clean()
    for i, (a, b) in enumerate(zip(clean, clean[1:])):
        if a.p_rank == b.p_rank:
            for later in clean[i + 1 :]:
                if later.p_rank != a.p_rank:
                    return RankFreezeReport(
                        False,
                        a.level,
                        f"rank frozen at level {a.level} (r={a.p_rank}) but "
                        f"level {later.level} has r={later.p_rank}",
                    )
            return RankFreezeReport(True, a.level)
    return RankFreezeReport(True, None, "NoFreezeObserved")
