"""Batch front end.

Subcommands drive the library over level ranges and emit deterministic
reports: a header block (command, input digest, seed), tab-separated
rows with a machine-readable status column, and a final verdict line.
Exit codes: 0 all-pass, 1 verdict fail, 2 usage or parse error,
3 precision failure (or flagged levels under --strict).
"""

from __future__ import annotations

import argparse
import hashlib
import os
import random
import sys

from .errors import (
    BadLevels,
    InconsistentSeries,
    InsufficientData,
    PrecisionExhausted,
    SpecFileError,
)
from .growth import GrowthEntry, GrowthSeries, detect_stabilization
from .lambda_algebra import LambdaPoly, LambdaTrunc, is_distinguished, weierstrass_prepare
from .modules import order_profile, transition, verify_circ
from .pairing import (
    build_pairing,
    check_double_dual,
    check_order_reversal,
    check_projective_compat,
    check_reflection,
)
from .specfile import ModuleSpecFile, SummandSpec, load_spec
from .subgroups import Subgroup, full_subgroup, property_f_check, split_t_part


def _digest(data: bytes) -> str:
    return "sha256:" + hashlib.sha256(data).hexdigest()[:12]


def _file_digest(path: str) -> str:
    try:
        with open(path, "rb") as fh:
            return _digest(fh.read())
    except OSError as exc:
        raise SpecFileError(f"{path}: {exc.strerror or exc}") from None


def _vec(x) -> str:
    return ",".join(str(c) for c in x)


def _trim(coeffs) -> list[int]:
    out = list(coeffs)
    while len(out) > 1 and out[-1] == 0:
        out.pop()
    return out


def _level_range(text: str):
    parts = text.split("..")
    if len(parts) != 2:
        raise argparse.ArgumentTypeError("expected a..b")
    try:
        a, b = int(parts[0]), int(parts[1])
    except ValueError:
        raise argparse.ArgumentTypeError("expected integer endpoints") from None
    if a > b:
        raise argparse.ArgumentTypeError("need a <= b")
    return a, b


class Report:
    """Buffered report; rows carry a status column, printing is atomic."""

    def __init__(self, command: str, digest: str, extra=()):
        self.lines = [f"command\t{command}", f"input\t{digest}"]
        self.lines.extend(extra)
        self.failed = False

    def row(self, label: str, status: str, detail: str = "-"):
        self.lines.append(f"row\t{label}\t{status}\t{detail}")
        if status == "FAIL":
            self.failed = True

    def emit(self, out=None) -> int:
        out = out or sys.stdout
        self.lines.append(f"verdict\t{'FAIL' if self.failed else 'PASS'}")
        out.write("\n".join(self.lines) + "\n")
        return 1 if self.failed else 0


def cmd_prepare(args) -> int:
    spec = load_spec(args.file)
    ctx = spec.context()
    f = LambdaTrunc.from_ints(args.poly, ctx, spec.degree_cap)
    w = weierstrass_prepare(f)
    back = w.multiply_back()
    residual = max(
        abs((a - b) % ctx.modulus) for a, b in zip(back.coeffs, f.coeffs)
    )
    rep = Report("prepare", _file_digest(args.file))
    rep.lines.append(f"poly\t{_vec(args.poly)}")
    rep.lines.append(f"mu\t{w.mu}")
    rep.lines.append(f"lambda\t{w.distinguished.degree}")
    rep.lines.append(f"P\t{_vec(w.distinguished.coeffs)}")
    rep.lines.append(f"u\t{_vec(_trim(w.unit.coeffs))}")
    rep.lines.append(f"residual\t{residual}")
    rep.row("roundtrip", "PASS" if residual == 0 else "FAIL")
    return rep.emit()


def cmd_levels(args) -> int:
    spec = load_spec(args.file)
    module = spec.module()
    a, b = args.from_, args.to
    if a > b:
        raise SpecFileError("levels: need --from <= --to")
    lines = ["n\tinvariant_factors\te_n\trank\tflags"]
    sticky = False
    for n in range(a, b + 1):
        level = module.finite_level(n)
        sticky = sticky or level.unresolved
        factors = ",".join(str(v) for v in level.invariant_factors()) or "1"
        lines.append(
            f"{n}\t{factors}\t{level.size_exp}\t{level.p_rank}\t"
            f"{'flagged' if sticky else '-'}"
        )
    sys.stdout.write("\n".join(lines) + "\n")
    strict = args.strict or os.environ.get("IWALAB_STRICT") == "1"
    if sticky and strict:
        sys.stderr.write("flagged levels present under --strict\n")
        return 3
    return 0


def _suite_circ(rep, module, a, b):
    for n in range(a, b):
        r = verify_circ(module, n, n + 1)
        rep.row(f"circ {n}..{n + 1}", "PASS" if r.ok else "FAIL", r.detail or "-")


def _suite_fukuda(rep, module, a, b):
    try:
        series = GrowthSeries.from_module(module, list(range(a, b + 1)))
        est = detect_stabilization(series)
    except InconsistentSeries as exc:
        rep.row("fukuda", "FAIL", f"inconsistent series: {exc}")
        return
    except InsufficientData as exc:
        rep.row("fukuda", "FLAGGED", f"insufficient data: {exc}")
        return
    want = (module.lambda_invariant, module.mu_invariant)
    got = (est.lambda_, est.mu)
    ok = est.status in ("Stabilized", "SizeFrozen") and got == want
    rep.row(
        "fukuda",
        "PASS" if ok else "FAIL",
        f"status={est.status} n0={est.n0} lambda={est.lambda_} "
        f"mu={est.mu} nu={est.nu}",
    )


def _suite_ab(rep, module, a, b, rng):
    if module.mu_summands:
        rep.row("ab", "SKIP", "module has p-power torsion summands")
        return
    for n in range(a, b):
        low, high = module.finite_level(n), module.finite_level(n + 1)
        if low.unresolved or high.unresolved:
            rep.row(f"ab {n}..{n + 1}", "FLAGGED", "orders not exact at precision")
            continue
        lift = module.lift_map(n, n + 1)
        if not lift.is_injective():
            rep.row(f"ab {n}..{n + 1}", "FAIL", "lift has nonzero kernel")
            continue
        image = Subgroup(high, [
            [row[j] for row in lift.matrix] for j in range(low.rank)
        ])
        p_full = Subgroup(high, [
            [module.context.p if i == j else 0 for i in range(high.rank)]
            for j in range(high.rank)
        ])
        if not image.equals(p_full):
            rep.row(f"ab {n}..{n + 1}", "FAIL", "lift image differs from p * M")
            continue
        norm = module.norm_map(n + 1, n)
        bad = None
        for _ in range(40):
            x = high.random_element(rng)
            if high.is_zero_element(x):
                continue
            if high.element_order_exp(x) != 1 + low.element_order_exp(norm.apply(x)):
                bad = x
                break
        if bad is not None:
            rep.row(f"ab {n}..{n + 1}", "FAIL", f"order relation broken at {_vec(bad)}")
        else:
            rep.row(f"ab {n}..{n + 1}", "PASS")


def _suite_sf(rep, module, a, b, rng):
    if module.mu_summands:
        rep.row("sf", "SKIP", "module has p-power torsion summands")
        return
    for n in range(a, b):
        t = transition(module, n)
        if t.unresolved:
            rep.row(f"sf {n}", "FLAGGED", "transition quotient not exact")
            continue
        ok = t.classification == "Stable" and t.growth_factor == 1 and t.lift_injective
        rep.row(
            f"sf {n}",
            "PASS" if ok else "FAIL",
            f"class={t.classification} k={t.growth_factor}",
        )
    top = module.finite_level(b)
    levels = list(range(a, b + 1))
    for i in range(5):
        x = top.random_element(rng)
        if top.is_zero_element(x):
            rep.row(f"profile {i}", "SKIP", "zero sample")
            continue
        prof = order_profile(module, x, levels)
        ok = prof.kind == "geometric"
        rep.row(
            f"profile {i}",
            "PASS" if ok else "FAIL",
            f"kind={prof.kind} orders={_vec(prof.order_exps)}",
        )


def _suite_tpart(rep, module, a, b):
    for n in range(a, b + 1):
        level = module.finite_level(n)
        if level.unresolved:
            rep.row(f"tpart {n}", "FLAGGED", "level flagged at precision")
            continue
        r = split_t_part(module, n)
        rep.row(
            f"tpart {n}",
            "PASS" if r.verified else "FAIL",
            f"socle_T=p^{r.socle_t.order_exp} compl=p^{r.complement.order_exp}",
        )


def _suite_propf(rep, module, a, b, inject_pc):
    horizon = module.finite_level(b)
    if inject_pc is None:
        sub = full_subgroup(horizon)
        label = "A=M"
    else:
        c = module.context.p ** inject_pc
        sub = Subgroup(horizon, [
            [c if i == j else 0 for i in range(horizon.rank)]
            for j in range(horizon.rank)
        ])
        label = f"A=p^{inject_pc}M"
    for n in range(a, b):
        r = property_f_check(module, sub, n)
        detail = "-"
        if not r.ok and r.witness is not None:
            detail = f"witness {_vec(r.witness)}"
        rep.row(f"propf {label} n={n} H={b}", "PASS" if r.ok else "FAIL", detail)


def _suite_pairing(rep, module, a, b, rng, seed):
    for n in range(a, b + 1):
        level = module.finite_level(n)
        try:
            dual, table = build_pairing(level, module.params)
        except PrecisionExhausted:
            rep.row(f"pairing {n}", "FLAGGED", "level flagged at precision")
            continue
        rep.row(f"nondeg {n}", "PASS" if table.non_degenerate() else "FAIL")
        ok = True
        for _ in range(3):
            coeffs = [rng.randrange(module.context.modulus) for _ in range(4)]
            lam = LambdaPoly.from_ints(coeffs, module.context)
            if not check_reflection(table, lam, samples=20, seed=seed):
                ok = False
                break
        rep.row(f"reflection {n}", "PASS" if ok else "FAIL")
        rep.row(
            f"double-dual {n}",
            "PASS" if check_double_dual(level, module.params) else "FAIL",
        )
        if n < b:
            c = check_projective_compat(module, n, n + 1, samples=20, seed=seed)
            rep.row(
                f"compat {n}..{n + 1}",
                "PASS" if c.ok else "FAIL",
                c.note if not c.ok else "-",
            )


def _suite_reversal(rep, module, a, b):
    for n in range(a, b + 1):
        try:
            r = check_order_reversal(module, n)
        except PrecisionExhausted:
            rep.row(f"reversal {n}", "FLAGGED", "level flagged at precision")
            continue
        if r.vacuous:
            rep.row(f"reversal {n}", "PASS", "k=1 vacuous")
            continue
        boundary = next(
            (c for c in r.cells if c.j + c.l == r.k + 1 and c.witness), None
        )
        detail = (
            f"vanish j+l>{r.k + 1}"
            + (f" witness {_vec(boundary.witness[0])}" if boundary else "")
        )
        rep.row(f"reversal {n}", "PASS" if r.ok else "FAIL", detail)


def cmd_verify(args) -> int:
    spec = load_spec(args.file)
    module = spec.module()
    a, b = args.levels
    if a < 0:
        raise SpecFileError("levels: negative levels are not defined")
    rep = Report(
        "verify",
        _file_digest(args.file),
        (f"suite\t{args.suite}", f"levels\t{a}..{b}", f"seed\t{args.seed}"),
    )
    rng = random.Random(args.seed)
    if args.suite in ("circ", "ab", "fukuda") and b == a:
        raise SpecFileError("levels: this suite needs at least two levels")
    if args.suite == "circ":
        _suite_circ(rep, module, a, b)
    elif args.suite == "fukuda":
        _suite_fukuda(rep, module, a, b)
    elif args.suite == "ab":
        _suite_ab(rep, module, a, b, rng)
    elif args.suite == "sf":
        _suite_sf(rep, module, a, b, rng)
    elif args.suite == "tpart":
        _suite_tpart(rep, module, a, b)
    elif args.suite == "propf":
        _suite_propf(rep, module, a, b, args.inject_pc)
    elif args.suite == "pairing":
        _suite_pairing(rep, module, a, b, rng, args.seed)
    else:
        try:
            _suite_reversal(rep, module, a, b)
        except ValueError as exc:
            raise SpecFileError(f"reversal: {exc}") from None
    return rep.emit()


def cmd_gen(args) -> int:
    if args.max_deg < 1:
        raise SpecFileError("gen: --max-deg must be >= 1")
    rng = random.Random(args.seed)
    p, nexp = args.p, args.precision_exp
    docs = []
    for i in range(args.count):
        summands = []
        for _ in range(rng.randint(1, 2)):
            deg = rng.randint(1, args.max_deg)
            coeffs = [p * rng.randrange(p ** (nexp - 1)) for _ in range(deg)] + [1]
            summands.append(SummandSpec("poly", coeffs=coeffs, e=1))
        if args.allow_mu and rng.random() < 0.34:
            summands.append(SummandSpec("mu", m=rng.randint(1, 2), e=1))
        spec = ModuleSpecFile(p, args.k, nexp, args.degree_cap, summands)
        for s in summands:
            if s.kind == "poly":
                assert is_distinguished(LambdaPoly.from_ints(s.coeffs, spec.context()))
        docs.append(spec.to_json())
    if args.out:
        os.makedirs(args.out, exist_ok=True)
        for i, doc in enumerate(docs):
            path = os.path.join(args.out, f"gen_{args.seed}_{i}.json")
            with open(path, "w", encoding="utf-8") as fh:
                fh.write(doc)
        sys.stdout.write(f"wrote {len(docs)} files to {args.out}\n")
    else:
        sys.stdout.write("\n".join(docs))
    return 0


def _parse_series(path: str, p: int, k: int) -> GrowthSeries:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            lines = [ln.rstrip("\n") for ln in fh if ln.strip()]
    except OSError as exc:
        raise SpecFileError(f"{path}: {exc.strerror or exc}") from None
    if not lines:
        raise SpecFileError(f"{path}: empty series file")
    header = lines[0].split("\t")
    try:
        n_col, e_col = header.index("n"), header.index("e_n")
    except ValueError:
        raise SpecFileError(f"{path}: header must contain 'n' and 'e_n'") from None
    r_col = header.index("rank") if "rank" in header else None
    f_col = header.index("flags") if "flags" in header else None
    entries = []
    for lineno, line in enumerate(lines[1:], start=2):
        cells = line.split("\t")
        try:
            n, e = int(cells[n_col]), int(cells[e_col])
            r = int(cells[r_col]) if r_col is not None else 0
        except (ValueError, IndexError):
            raise SpecFileError(
                f"{path}: line {lineno}: expected integer columns"
            ) from None
        flagged = f_col is not None and len(cells) > f_col and cells[f_col] == "flagged"
        entries.append(GrowthEntry(n, e, r, flagged))
    if not entries:
        raise SpecFileError(f"{path}: no data rows")
    return GrowthSeries(p, k, entries)


def cmd_fukuda(args) -> int:
    series = _parse_series(args.file, args.p, args.k)
    lines = [
        "command\tfukuda",
        f"input\t{_file_digest(args.file)}",
        f"p\t{args.p}",
        f"k\t{args.k}",
    ]
    try:
        est = detect_stabilization(series)
    except InconsistentSeries as exc:
        lines.append("status\tInconsistentSeries")
        lines.append(f"detail\t{exc}")
        sys.stdout.write("\n".join(lines) + "\n")
        return 1
    except InsufficientData as exc:
        lines.append("status\tInsufficientData")
        lines.append(f"detail\t{exc}")
        sys.stdout.write("\n".join(lines) + "\n")
        return 0
    lines.append(f"status\t{est.status}")
    lines.append(f"n0\t{est.n0 if est.n0 is not None else '-'}")
    lines.append(f"lambda\t{est.lambda_ if est.lambda_ is not None else '-'}")
    lines.append(f"mu\t{est.mu if est.mu is not None else '-'}")
    lines.append(f"nu\t{est.nu if est.nu is not None else '-'}")
    lines.append(f"note\t{est.note or '-'}")
    sys.stdout.write("\n".join(lines) + "\n")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="iwalab",
        description="Workbench for torsion modules over Z_p[[T]] at fixed precision.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_prep = sub.add_parser("prepare", help="Weierstrass preparation of a truncation")
    p_prep.add_argument("file", help="module description file fixing the context")
    p_prep.add_argument(
        "--poly", type=int, nargs="+", required=True, metavar="C",
        help="ascending coefficients of the series to prepare",
    )
    p_prep.set_defaults(func=cmd_prepare)

    p_lvl = sub.add_parser("levels", help="tabulate finite levels")
    p_lvl.add_argument("file")
    p_lvl.add_argument("--from", dest="from_", type=int, required=True)
    p_lvl.add_argument("--to", type=int, required=True)
    p_lvl.add_argument("--strict", action="store_true",
                       help="exit 3 when any level is flagged")
    p_lvl.set_defaults(func=cmd_levels)

    p_ver = sub.add_parser("verify", help="run a verification suite over levels")
    p_ver.add_argument("file")
    p_ver.add_argument(
        "--suite", required=True,
        choices=["circ", "fukuda", "ab", "sf", "tpart", "propf", "pairing", "reversal"],
    )
    p_ver.add_argument("--levels", type=_level_range, required=True, metavar="a..b")
    p_ver.add_argument("--seed", type=int, default=0)
    p_ver.add_argument(
        "--inject-pc", type=int, default=None, metavar="C",
        help="propf only: test the subgroup generated by p^C times the generators",
    )
    p_ver.set_defaults(func=cmd_verify)

    p_gen = sub.add_parser("gen", help="generate seeded module description files")
    p_gen.add_argument("--seed", type=int, required=True)
    p_gen.add_argument("--count", type=int, default=1)
    p_gen.add_argument("--max-deg", type=int, default=3)
    p_gen.add_argument("--allow-mu", action="store_true")
    p_gen.add_argument("--p", type=int, default=3)
    p_gen.add_argument("--k", type=int, default=1)
    p_gen.add_argument("--precision-exp", type=int, default=8)
    p_gen.add_argument("--degree-cap", type=int, default=64)
    p_gen.add_argument("--out", default=None, help="directory for generated files")
    p_gen.set_defaults(func=cmd_gen)

    p_fuk = sub.add_parser("fukuda", help="fit the growth law of a size series")
    p_fuk.add_argument("file", help="TSV with columns n, e_n (rank, flags optional)")
    p_fuk.add_argument("--p", type=int, default=3)
    p_fuk.add_argument("--k", type=int, default=1)
    p_fuk.set_defaults(func=cmd_fukuda)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except SpecFileError as exc:
        sys.stderr.write(f"iwalab: {exc}\n")
        return 2
    except BadLevels as exc:
        sys.stderr.write(f"iwalab: {exc}\n")
        return 2
    except PrecisionExhausted as exc:
        sys.stderr.write(f"iwalab: {exc}\n")
        return 3


if __name__ == "__main__":
    raise SystemExit(main())
