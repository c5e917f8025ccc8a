"""Reference comparison tables.

Table 1 compares the comonotonic and counter-monotonic inf-convolutions of
``1 - (1-x)^0.3`` and ``1 - (1-x)^0.6`` on three laws and their negatives.
Table 2 lists optimal lotteries for sharing a constant among two power curves.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .allocation import constant_share, foc_residual
from .distortion import DualPower
from .errors import DivergenceError
from .infconv import comonotonic_infconv, countermonotonic_infconv
from .measures import Distribution, LogNormal, Pareto, Uniform, negate

TABLE1_CURVES = (DualPower(0.3), DualPower(0.6))

# source: Table 1 (reference values carry simulation noise)
TABLE1_REFERENCE = {
    ("uniform", "L+"): (0.3692, 0.2074),
    ("uniform", "L-"): (-0.7667, -1.0435),
    ("pareto", "L+"): (2.7291, 1.3828),
    ("pareto", "L-"): (-9.4262, -11.0881),
    ("lognormal", "L+"): (1.0825, 0.5849),
    ("lognormal", "L-"): (-5.5828, -6.4773),
}

# source: Table 2
TABLE2_REFERENCE = {
    (1.2, 1.4): (0.5129, 0.4871, 0.8141),
    (1.2, 5.0): (0.3371, 0.6629, 0.3992),
}


def table1_laws() -> dict[str, Distribution]:
    return {"uniform": Uniform(0.0, 1.0), "pareto": Pareto(3.0, 2.0), "lognormal": LogNormal(0.0, 1.0)}


@dataclass(frozen=True)
class Table1Row:
    law: str
    cone: str
    como: float
    counter: float
    reference_como: float
    reference_counter: float

    @property
    def dev_como(self) -> float:
        return _dev(self.como, self.reference_como)

    @property
    def dev_counter(self) -> float:
        return _dev(self.counter, self.reference_counter)


def _dev(value: float, ref: float) -> float:
    return abs(value - ref) if math.isfinite(value) else math.inf


def _safe(fn, *args) -> float:
    try:
        return fn(*args).value
    except DivergenceError:
        return -math.inf


def table1_rows() -> list[Table1Row]:
    rows = []
    for name, law in table1_laws().items():
        for cone, d in (("L+", law), ("L-", negate(law))):
            ref = TABLE1_REFERENCE[(name, cone)]
            como = _safe(comonotonic_infconv, TABLE1_CURVES, d)
            counter = _safe(countermonotonic_infconv, TABLE1_CURVES, d)
            rows.append(Table1Row(name, cone, como, counter, ref[0], ref[1]))
    return rows


@dataclass(frozen=True)
class Table2Row:
    alpha1: float
    alpha2: float
    p1: float
    p2: float
    value: float
    foc_residual: float
    reference: tuple


def table2_rows() -> list[Table2Row]:
    rows = []
    for (a1, a2), ref in TABLE2_REFERENCE.items():
        comp, value = constant_share([a1, a2])
        rows.append(Table2Row(a1, a2, comp.probs[0], comp.probs[1], value, foc_residual([a1, a2], comp.probs), ref))
    return rows
