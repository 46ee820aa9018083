"""Which quotient algebra the poset of copies is forcing equivalent to.

The answer depends only on a few parameters of the component catalogue
(see :class:`~copyposets.catalogue.DerivedStats`): ``mu`` (number of infinite
components), the finite sizes ``N_fin`` and whether the union ``Y`` of the
finite components is finite.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Union

from .catalogue import CatalogueSpec, DerivedStats, ValidationReport, derive_stats, validate
from .common import OMEGA, ContractError, DomainError, fmt_card
from .ideals import TraceProfile, dumps_profile, full_profile, zero_profile

_FIN = "(P(ω)/Fin)+"


@dataclass(frozen=True)
class FinPower:
    """``((P(omega)/Fin)+)^n``."""

    n: int

    def render(self) -> str:
        return _FIN if self.n == 1 else f"({_FIN})^{self.n}"

    def name(self) -> str:
        return f"FinPower({self.n})"


@dataclass(frozen=True)
class EDfinProduct:
    """``(P(Delta)/ED_fin)+``, times ``((P(omega)/Fin)+)^mu`` when ``mu > 0``."""

    mu: int

    def render(self) -> str:
        base = "(P(Δ)/ED_fin)+"
        if self.mu == 0:
            return base
        return f"{base} × {FinPower(self.mu).render()}"

    def name(self) -> str:
        return f"EDfinProduct({self.mu})"


@dataclass(frozen=True)
class FinTimesFin:
    """``(P(omega x omega)/(Fin x Fin))+``."""

    def render(self) -> str:
        return "(P(ω×ω)/(Fin×Fin))+"

    def name(self) -> str:
        return "FinTimesFin"


ForcingClass = Union[FinPower, EDfinProduct, FinTimesFin]


def _require_valid(spec: CatalogueSpec) -> ValidationReport:
    report = validate(spec)
    if not report.ok:
        problems = report.failures + report.unverified
        raise DomainError("catalogue does not satisfy the hypotheses: "
                          + "; ".join(p.describe() for p in problems))
    return report


def case_of(stats: DerivedStats) -> str:
    if stats.mu == OMEGA:
        return "a4"
    if stats.N_unbounded:
        return "a3"
    return "a1" if stats.Y_finite else "a2"


def _class_for(stats: DerivedStats) -> ForcingClass:
    case = case_of(stats)
    if case == "a4":
        return FinTimesFin()
    if case == "a3":
        return EDfinProduct(int(stats.mu))
    if case == "a1":
        return FinPower(int(stats.mu))
    return FinPower(int(stats.mu) + 1)


def classify(spec: CatalogueSpec) -> ForcingClass:
    """Forcing class of the poset of copies; refuses catalogues that fail validation."""
    _require_valid(spec)
    return _class_for(derive_stats(spec))


def n_equals_one_check(spec: CatalogueSpec) -> bool:
    """The closed-form test for exponent 1, cross-checked against :func:`classify`."""
    cls = classify(spec)
    if not isinstance(cls, FinPower):
        raise DomainError(f"exponent test needs a finite power, got {cls.name()}")
    stats = derive_stats(spec)
    predicted = stats.N_is_finite_subset_of_naturals or (stats.Y_finite and stats.mu == 1)
    if predicted != (cls.n == 1):
        raise ContractError(f"exponent test gives {predicted} but the class is {cls.name()}")
    return predicted


def _indivisible(stats: DerivedStats) -> bool:
    return (
        stats.N_is_infinite_subset_of_naturals
        or (not stats.N_unbounded and stats.N == frozenset({1}))
        or stats.component_count == 1
        or stats.mu == OMEGA
    )


def is_indivisible(spec: CatalogueSpec) -> bool:
    """Whether every 2-colouring of the structure has a colour class containing a copy."""
    return _indivisible(derive_stats(spec))


def divisibility_witness(spec: CatalogueSpec) -> tuple[TraceProfile, TraceProfile]:
    """Complementary profiles, neither of which contains a copy."""
    stats = derive_stats(spec)
    if _indivisible(stats):
        raise ContractError("the structure is indivisible; no witness exists")
    classes = spec.classes
    if stats.N_is_finite_subset_of_naturals:
        # drop one point from every largest component
        m = max(stats.N)
        a, b = full_profile(spec), zero_profile(spec)
        a_traces, b_traces = dict(a.traces), {}
        a_tails, b_tails = dict(a.tails), dict(b.tails)
        for k, c in enumerate(classes):
            if c.size != m:
                continue
            if c.multiplicity == OMEGA:
                a_tails[k], b_tails[k] = m - 1, 1
            else:
                for j in range(c.multiplicity):
                    a_traces[(k, j)], b_traces[(k, j)] = m - 1, 1
        return TraceProfile(a_traces, a_tails), TraceProfile(b_traces, b_tails)

    finite_part = [k for k, c in enumerate(classes) if c.size != OMEGA]
    if finite_part or spec.unbounded is not None:
        # the finite components against the infinite ones
        full, zero = full_profile(spec), zero_profile(spec)
        a_traces = {key: t for key, t in full.traces.items() if classes[key[0]].size != OMEGA}
        b_traces = {key: t for key, t in full.traces.items() if classes[key[0]].size == OMEGA}
        a_tails = {k: (0 if classes[k].size == OMEGA else t) for k, t in full.tails.items()}
        b_tails = {k: (t if classes[k].size == OMEGA else 0) for k, t in full.tails.items()}
        fam_a = full.family_tail
        fam_b = zero.family_tail
        return (TraceProfile(a_traces, a_tails, {}, fam_a), TraceProfile(b_traces, b_tails, {}, fam_b))

    # only infinite components, at least two of them: one against the rest
    full = full_profile(spec)
    a_traces = {(0, 0): OMEGA}
    b_traces = {key: t for key, t in full.traces.items() if key != (0, 0)}
    b_traces[(0, 0)] = 0
    return TraceProfile(a_traces, {}), TraceProfile(b_traces, {})


@dataclass(frozen=True)
class ClassificationReport:
    validation: ValidationReport
    stats: DerivedStats
    forcing_class: ForcingClass | None
    case: str | None
    indivisible: bool | None
    witness: tuple[TraceProfile, TraceProfile] | None

    @property
    def valid(self) -> bool:
        return self.forcing_class is not None

    def summary(self) -> str:
        if not self.valid:
            return "invalid: " + "; ".join(
                p.describe() for p in self.validation.failures + self.validation.unverified
            )
        yes = "yes" if self.indivisible else "no"
        return f"case {self.case}: {self.forcing_class.render()} ; indivisible: {yes}"

    def fields(self) -> list[tuple[str, str]]:
        s = self.stats
        out = [("valid", "yes" if self.valid else "no")]
        if not self.valid:
            for i, p in enumerate(self.validation.failures + self.validation.unverified):
                out.append((f"problem.{i}", p.describe()))
        n = "-"
        if isinstance(self.forcing_class, FinPower):
            n = str(self.forcing_class.n)
        out += [
            ("case", self.case or "-"),
            ("class", self.forcing_class.name() if self.valid else "-"),
            ("render", self.forcing_class.render() if self.valid else "-"),
            ("n", n),
            ("mu", fmt_card(s.mu)),
            ("N", s.describe_N()),
            ("N_fin", s.describe_N_fin()),
            ("Y_finite", "yes" if s.Y_finite else "no"),
            ("indivisible", "-" if self.indivisible is None else ("yes" if self.indivisible else "no")),
        ]
        if self.witness is None:
            out.append(("witness", "none"))
        else:
            for side, profile in zip("AB", self.witness):
                text = dumps_profile(profile).strip().replace("\n", "; ")
                out.append((f"witness.{side}", text or "(all zero)"))
        return out

    def to_text(self) -> str:
        return self.summary() + "\n" + "".join(f"{k}: {v}\n" for k, v in self.fields())

    def to_record(self) -> str:
        return "".join(f"{k}={v}\n" for k, v in self.fields())


def report(spec: CatalogueSpec) -> ClassificationReport:
    """Validate, classify and decide divisibility in one pass."""
    validation = validate(spec)
    stats = derive_stats(spec)
    if not validation.ok:
        return ClassificationReport(validation, stats, None, None, None, None)
    indivisible = _indivisible(stats)
    witness = None if indivisible else divisibility_witness(spec)
    return ClassificationReport(validation, stats, _class_for(stats), case_of(stats), indivisible, witness)
