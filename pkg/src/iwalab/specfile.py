"""Module description files.

A description is a single JSON document fixing the working context
(p, k, precision, degree cap, optionally kappa) and the summand list
of an elementary torsion module.  Coefficients are base-10 integers,
ascending degree, interpreted mod p^N.  Parsing either returns a
validated ModuleSpecFile or raises SpecFileError whose message names
the offending field by path.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

from .errors import NotDistinguished, SpecFileError
from .lambda_algebra import LambdaPoly, TowerParams, is_distinguished
from .modules import ElementaryModule
from .padic import PadicContext


@dataclass
class SummandSpec:
    kind: str  # "poly" | "mu"
    coeffs: list[int] = field(default_factory=list)
    m: int = 0
    e: int = 1


@dataclass
class ModuleSpecFile:
    p: int
    k: int
    precision_exp: int
    degree_cap: int
    summands: list[SummandSpec]
    kappa: int | None = None

    def context(self) -> PadicContext:
        return PadicContext(self.p, self.precision_exp)

    def params(self) -> TowerParams:
        return TowerParams(p=self.p, k=self.k, kappa=self.kappa)

    def module(self) -> ElementaryModule:
        ctx = self.context()
        polys = tuple(
            (LambdaPoly.from_ints(s.coeffs, ctx), s.e)
            for s in self.summands
            if s.kind == "poly"
        )
        mus = tuple(
            s.m for s in self.summands for _ in range(s.e) if s.kind == "mu"
        )
        return ElementaryModule(ctx, self.params(), polys, mus)

    def to_json(self) -> str:
        doc = {
            "p": self.p,
            "k": self.k,
            "precision_exp": self.precision_exp,
            "degree_cap": self.degree_cap,
        }
        if self.kappa is not None:
            doc["kappa"] = self.kappa
        doc["summands"] = [
            {"kind": s.kind, "coeffs": list(s.coeffs), "e": s.e}
            if s.kind == "poly"
            else {"kind": "mu", "m": s.m, "e": s.e}
            for s in self.summands
        ]
        return json.dumps(doc, indent=2) + "\n"


def _need(doc: dict, key: str, kind, where: str):
    if key not in doc:
        raise SpecFileError(f"{where}{key}: missing required field")
    val = doc[key]
    if kind is int and isinstance(val, bool) or not isinstance(val, kind):
        raise SpecFileError(
            f"{where}{key}: expected {kind.__name__}, got {type(val).__name__}"
        )
    return val


def _int_list(val, where: str) -> list[int]:
    if not isinstance(val, list) or not all(
        isinstance(c, int) and not isinstance(c, bool) for c in val
    ):
        raise SpecFileError(f"{where}: expected a list of integers")
    return list(val)


def parse_spec_text(text: str) -> ModuleSpecFile:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SpecFileError(
            f"line {exc.lineno}, column {exc.colno}: {exc.msg}"
        ) from None
    if not isinstance(doc, dict):
        raise SpecFileError("top level: expected an object")

    p = _need(doc, "p", int, "")
    k = _need(doc, "k", int, "")
    precision_exp = _need(doc, "precision_exp", int, "")
    degree_cap = _need(doc, "degree_cap", int, "")
    kappa = doc.get("kappa")
    if kappa is not None and (isinstance(kappa, bool) or not isinstance(kappa, int)):
        raise SpecFileError("kappa: expected an integer")
    raw = _need(doc, "summands", list, "")

    try:
        ctx = PadicContext(p, precision_exp)
    except ValueError as exc:
        raise SpecFileError(f"p/precision_exp: {exc}") from None
    if k < 1:
        raise SpecFileError("k: must be >= 1")
    if degree_cap < 2:
        raise SpecFileError("degree_cap: must be >= 2")
    try:
        params = TowerParams(p=p, k=k, kappa=kappa)
    except ValueError as exc:
        raise SpecFileError(f"kappa: {exc}") from None

    known = {"p", "k", "precision_exp", "degree_cap", "kappa", "summands"}
    for key in doc:
        if key not in known:
            raise SpecFileError(f"{key}: unknown field")

    summands = []
    for idx, entry in enumerate(raw):
        where = f"summands[{idx}]."
        if not isinstance(entry, dict):
            raise SpecFileError(f"summands[{idx}]: expected an object")
        kind = _need(entry, "kind", str, where)
        e = entry.get("e", 1)
        if isinstance(e, bool) or not isinstance(e, int) or e < 1:
            raise SpecFileError(f"{where}e: multiplicity must be an integer >= 1")
        if kind == "poly":
            coeffs = _int_list(entry.get("coeffs"), f"{where}coeffs")
            if len(coeffs) < 2:
                raise SpecFileError(
                    f"{where}coeffs: need degree >= 1 (ascending, monic)"
                )
            try:
                poly = LambdaPoly.from_ints(coeffs, ctx)
            except Exception as exc:
                raise SpecFileError(f"{where}coeffs: {exc}") from None
            if not is_distinguished(poly):
                raise SpecFileError(
                    f"{where}coeffs: polynomial is not distinguished "
                    "(monic with lower coefficients divisible by p)"
                )
            extra = set(entry) - {"kind", "coeffs", "e"}
            if extra:
                raise SpecFileError(f"{where}{sorted(extra)[0]}: unknown field")
            summands.append(SummandSpec("poly", coeffs=coeffs, e=e))
        elif kind == "mu":
            m = entry.get("m")
            if isinstance(m, bool) or not isinstance(m, int) or m < 1:
                raise SpecFileError(f"{where}m: exponent must be an integer >= 1")
            extra = set(entry) - {"kind", "m", "e"}
            if extra:
                raise SpecFileError(f"{where}{sorted(extra)[0]}: unknown field")
            summands.append(SummandSpec("mu", m=m, e=e))
        else:
            raise SpecFileError(f"{where}kind: must be 'poly' or 'mu'")
    if not summands:
        raise SpecFileError("summands: need at least one summand")

    spec = ModuleSpecFile(p, k, precision_exp, degree_cap, summands, kappa)
    try:
        spec.module()
    except NotDistinguished as exc:
        raise SpecFileError(f"summands: {exc}") from None
    return spec


def load_spec(path: str) -> ModuleSpecFile:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise SpecFileError(f"{path}: {exc.strerror or exc}") from None
    return parse_spec_text(text)
