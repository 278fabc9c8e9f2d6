"""Agreement and reproducibility statistics for stereoacuity datasets.

Covers the ordinal recoding of near and far measurements onto common
scales, linearly and quadratically weighted Cohen's kappa with asymptotic
confidence intervals, the Wilcoxon signed-rank test (exact enumeration
for small tie-free samples, tie-corrected normal approximation
otherwise), agreement-strength labels, and a dataset-level report with
medians, interquartile ranges, and cumulative level percentages.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Optional, Sequence, Union

import numpy as np

from .errors import (
    DegenerateMarginals,
    NoEffectivePairs,
    UnmappableValue,
)
from .geometry import round_half_up
from .ol import OL, OutsideLimits, is_ol

Value = Union[float, OutsideLimits]


class Test(str, Enum):
    __test__ = False  # not a pytest class, despite the name

    HD = "HD"
    ST_FAR = "ST_far"
    ST_NEAR = "ST_near"
    TNO = "TNO"


NEAR_TESTS = (Test.ST_NEAR, Test.TNO)
FAR_TESTS = (Test.HD, Test.ST_FAR)

N_NEAR_CATEGORIES = 5
N_FAR_CATEGORIES = 11


@dataclass(frozen=True)
class MeasurementRecord:
    subject_id: str
    test: Test
    day: int
    value: Value

    def __post_init__(self):
        if self.day not in (1, 2):
            raise UnmappableValue(f"day must be 1 or 2, got {self.day}")
        if not is_ol(self.value) and self.value < 0:
            raise UnmappableValue(f"negative measurement {self.value}")


# Levels the near instruments can actually display (screen scale at 0.5 m
# plus the printed-plate scale); inputs snap to the nearest one before
# banding so small rounding-source differences cannot move a band.
_NEAR_SCREEN_LEVELS = (40, 79, 119, 159, 198, 238, 278, 318, 357, 397)
_NEAR_PLATE_LEVELS = (15, 30, 60, 120, 240, 480)
_NEAR_LEVELS = tuple(sorted(set(_NEAR_SCREEN_LEVELS + _NEAR_PLATE_LEVELS)))

_NEAR_BANDS = ((15, 60, 1), (79, 120, 2), (159, 240, 3), (278, 480, 4))

_FAR_BANDS = (
    (0, 9, 1),
    (10, 17, 2),
    (18, 23, 3),
    (24, 29, 4),
    (30, 36, 5),
    (37, 43, 6),
    (44, 49, 7),
    (50, 55, 8),
    (56, 62, 9),
    (63, 66, 10),
)


def recode_near(value: Value) -> int:
    """Ordinal 1..5 for near measurements; 5 is outside device limits."""
    if is_ol(value):
        return N_NEAR_CATEGORIES
    if value < 0 or value > 480:
        raise UnmappableValue(f"near value {value} outside 0..480")
    snapped = min(_NEAR_LEVELS, key=lambda lv: (abs(lv - value), lv))
    for lo, hi, band in _NEAR_BANDS:
        if lo <= snapped <= hi:
            return band
    raise UnmappableValue(f"near value {value} snapped to unbanded level {snapped}")


def recode_far(value: Value) -> int:
    """Ordinal 1..11 for far measurements; 11 is outside instrument limits."""
    if is_ol(value):
        return N_FAR_CATEGORIES
    if value < 0:
        raise UnmappableValue(f"negative far value {value}")
    rounded = round_half_up(float(value))
    for lo, hi, band in _FAR_BANDS:
        if lo <= rounded <= hi:
            return band
    return N_FAR_CATEGORIES  # beyond the 66 arcsec instrument limit


def recode(test: Test, value: Value) -> int:
    if test in NEAR_TESTS:
        return recode_near(value)
    return recode_far(value)


def n_categories(test: Test) -> int:
    return N_NEAR_CATEGORIES if test in NEAR_TESTS else N_FAR_CATEGORIES


# --- agreement -----------------------------------------------------------

LANDIS_KOCH_LABELS = (
    "Poor",
    "Slight",
    "Fair",
    "Moderate",
    "Substantial",
    "Almost Perfect",
)

# Published bands have two-decimal resolution (0-0.20, 0.21-0.40, ...);
# the cuts sit at the midpoints so every real kappa lands in one band.
_LANDIS_KOCH_CUTS = (0.0, 0.205, 0.405, 0.605, 0.805)


def landis_koch(kappa: float) -> str:
    """Agreement-strength label for a kappa in [-1, 1]."""
    k = min(1.0, max(-1.0, kappa))
    for cut, label in zip(_LANDIS_KOCH_CUTS, LANDIS_KOCH_LABELS):
        if k < cut:
            return label
    return LANDIS_KOCH_LABELS[-1]


def near_band_edge(kappa: float, tol: float = 0.01) -> bool:
    """True when the label could flip within `tol` of a band cut."""
    return any(abs(kappa - cut) < tol for cut in _LANDIS_KOCH_CUTS)


@dataclass(frozen=True)
class KappaResult:
    kappa: float
    se: float
    ci95_low: float
    ci95_high: float
    label: str
    near_band_edge: bool
    n: int


def confusion_counts(a_codes: Sequence[int], b_codes: Sequence[int], n_cats: int) -> np.ndarray:
    """n_cats x n_cats count matrix from paired 1-based ordinal codes."""
    counts = np.zeros((n_cats, n_cats), dtype=np.int64)
    for a, b in zip(a_codes, b_codes):
        counts[a - 1, b - 1] += 1
    return counts


def weighted_kappa(counts, scheme: str = "linear") -> KappaResult:
    """Weighted Cohen's kappa with its asymptotic standard error.

    Agreement weights are 1 - |i-j|/(N-1) (linear) or 1 - (i-j)^2/(N-1)^2
    (quadratic). The standard error is the Fleiss-Cohen-Everitt
    large-sample formula, giving ci95 = kappa +/- 1.96 se.
    """
    c = np.asarray(counts, dtype=np.float64)
    if c.ndim != 2 or c.shape[0] != c.shape[1]:
        raise DegenerateMarginals(f"confusion matrix must be square, got {c.shape}")
    n_cat = c.shape[0]
    if n_cat < 2:
        raise DegenerateMarginals("need at least two categories")
    if (c < 0).any():
        raise DegenerateMarginals("counts must be non-negative")
    total = c.sum()
    if total <= 0:
        raise DegenerateMarginals("confusion matrix is empty")
    if scheme not in ("linear", "quadratic"):
        raise ValueError(f"unknown weight scheme {scheme!r}")

    p = c / total
    p_row = p.sum(axis=1)
    p_col = p.sum(axis=0)
    idx = np.arange(n_cat, dtype=np.float64)
    dist = np.abs(idx[:, np.newaxis] - idx[np.newaxis, :])
    if scheme == "linear":
        w = 1.0 - dist / (n_cat - 1)
    else:
        w = 1.0 - (dist / (n_cat - 1)) ** 2

    p_obs = float((w * p).sum())
    p_exp = float((w * np.outer(p_row, p_col)).sum())
    denom = 1.0 - p_exp
    if abs(denom) < 1e-15:
        raise DegenerateMarginals("chance-expected weighted agreement is 1")
    kappa = (p_obs - p_exp) / denom

    w_row = w @ p_col        # average weight of row i against B's marginal
    w_col = p_row @ w        # average weight of column j against A's marginal
    term = p * (w - (w_col[np.newaxis, :] + w_row[:, np.newaxis]) * (1.0 - kappa)) ** 2
    var = (term.sum() - (kappa - p_exp * (1.0 - kappa)) ** 2) / (total * denom * denom)
    se = math.sqrt(max(var, 0.0))
    return KappaResult(
        kappa=float(kappa),
        se=se,
        ci95_low=float(kappa - 1.96 * se),
        ci95_high=float(kappa + 1.96 * se),
        label=landis_koch(float(kappa)),
        near_band_edge=near_band_edge(float(kappa)),
        n=int(total),
    )


# --- Wilcoxon signed-rank -------------------------------------------------

EXACT_MAX_N = 12


@dataclass(frozen=True)
class WilcoxonResult:
    n_effective: int
    w_plus: float
    z: float
    p_two_sided: float
    method: str  # "exact" or "normal_approx"


def _midranks(values: np.ndarray) -> np.ndarray:
    order = np.argsort(values, kind="stable")
    ranks = np.empty(values.size, dtype=np.float64)
    sorted_vals = values[order]
    i = 0
    while i < values.size:
        j = i
        while j + 1 < values.size and sorted_vals[j + 1] == sorted_vals[i]:
            j += 1
        ranks[order[i : j + 1]] = (i + j + 2) / 2.0
        i = j + 1
    return ranks


def _normal_pdf(x: float) -> float:
    return math.exp(-0.5 * x * x) / math.sqrt(2.0 * math.pi)


def wilcoxon(pairs: Sequence[tuple[float, float]], method: str = "auto") -> WilcoxonResult:
    """Two-sided Wilcoxon signed-rank test on paired values.

    Differences are second minus first; zero differences are discarded
    and tied magnitudes get mid-ranks. The exact p comes from full
    sign-assignment enumeration and applies automatically when the
    effective sample is small and free of tied magnitudes; otherwise the
    tail is approximated. The reported z is the plain standardized
    statistic with tie-corrected variance; the approximate p adds a
    continuity correction and a kurtosis (Edgeworth) term so it stays
    within 0.02 of the exact enumeration even at n = 8, where the raw
    normal tail is off by up to 0.07. `method` forces a path ("exact" or
    "normal_approx") for verification.
    """
    diffs = np.asarray([b - a for a, b in pairs], dtype=np.float64)
    diffs = diffs[diffs != 0]
    n = diffs.size
    if n == 0:
        raise NoEffectivePairs("all paired differences are zero")

    magnitudes = np.abs(diffs)
    ranks = _midranks(magnitudes)
    w_plus = float(ranks[diffs > 0].sum())

    mean_w = n * (n + 1) / 4.0
    tie_sizes = np.unique(magnitudes, return_counts=True)[1]
    var_w = n * (n + 1) * (2 * n + 1) / 24.0 - float((tie_sizes**3 - tie_sizes).sum()) / 48.0
    sigma = math.sqrt(var_w)
    z = (w_plus - mean_w) / sigma

    has_ties = bool((tie_sizes > 1).any())
    if method == "auto":
        method = "exact" if (n <= EXACT_MAX_N and not has_ties) else "normal_approx"
    if method == "exact":
        if n > 24:
            raise ValueError(f"exact enumeration of 2^{n} assignments refused")
        signs = (np.arange(2**n)[:, np.newaxis] >> np.arange(n)) & 1
        w_all = signs @ ranks
        p_ge = float((w_all >= w_plus - 1e-9).mean())
        p_le = float((w_all <= w_plus + 1e-9).mean())
        p = min(1.0, 2.0 * min(p_ge, p_le))
    elif method == "normal_approx":
        x = max(0.0, (abs(w_plus - mean_w) - 0.5) / sigma)
        tail = 0.5 * math.erfc(x / math.sqrt(2.0))
        # excess kurtosis of the null W+ distribution: -(sum r^4 / 8) / var^2
        g2 = -float((ranks**4).sum()) / (8.0 * var_w * var_w)
        corrected = tail + _normal_pdf(x) * (g2 / 24.0) * (x**3 - 3.0 * x)
        if corrected > 0.0:
            tail = corrected
        p = min(1.0, 2.0 * tail)
    else:
        raise ValueError(f"unknown method {method!r}")
    return WilcoxonResult(
        n_effective=int(n), w_plus=w_plus, z=float(z), p_two_sided=float(p), method=method
    )


# --- dataset report -------------------------------------------------------


def median_iqr(values: Sequence[float]) -> tuple[float, float, float]:
    """Median and type-7 (linear interpolation) quartiles."""
    a = np.asarray(values, dtype=np.float64)
    if a.size == 0:
        raise NoEffectivePairs("no numeric values")
    q1, med, q3 = np.quantile(a, [0.25, 0.5, 0.75], method="linear")
    return float(med), float(q1), float(q3)


@dataclass
class TestDaySummary:
    test: Test
    day: int
    n: int
    n_ol: int
    median: Optional[float]
    iqr_low: Optional[float]
    iqr_high: Optional[float]
    cumulative_pct: list[float]  # % of subjects at or below each ordinal level


@dataclass
class PairedComparison:
    name: str
    n_pairs: int
    n_missing: int       # subjects lacking one side of the pairing
    n_ol_pairs: int      # pairs excluded from Wilcoxon because of OL
    wilcoxon: Optional[WilcoxonResult]
    wilcoxon_note: Optional[str]
    kappa: Optional[KappaResult]
    kappa_note: Optional[str]


@dataclass
class AnalysisReport:
    n_subjects: int
    n_records: int
    summaries: list[TestDaySummary]
    between_days: list[PairedComparison]
    between_instruments: list[PairedComparison]

    def to_dict(self) -> dict:
        def enc(v):
            if v is None or isinstance(v, (int, float, str, bool)):
                return v
            if is_ol(v):
                return "OL"
            if isinstance(v, Enum):
                return v.value
            if isinstance(v, list):
                return [enc(x) for x in v]
            if hasattr(v, "__dict__"):
                return {k: enc(x) for k, x in vars(v).items()}
            return v

        return {
            "n_subjects": self.n_subjects,
            "n_records": self.n_records,
            "summaries": [enc(s) for s in self.summaries],
            "between_days": [enc(c) for c in self.between_days],
            "between_instruments": [enc(c) for c in self.between_instruments],
        }

    def text_tables(self) -> str:
        lines = []
        lines.append("Per-test summaries (medians over numeric values; OL counted apart)")
        header = f"{'Test':8} {'Day':>3} {'n':>4} {'OL':>3} {'Median (arcsec) [IQR]':>28}"
        lines.append(header)
        lines.append("-" * len(header))
        for s in self.summaries:
            if s.median is None:
                med = "-"
            else:
                med = f"{s.median:g} [{s.iqr_low:g} to {s.iqr_high:g}]"
            lines.append(f"{s.test.value:8} {s.day:>3} {s.n:>4} {s.n_ol:>3} {med:>28}")
        lines.append("")
        lines.append("Cumulative % of subjects at or below each level")
        for s in self.summaries:
            cum = " ".join(f"{v:5.1f}" for v in s.cumulative_pct)
            lines.append(f"  {s.test.value:8} day {s.day}: {cum}")
        lines.append("")

        def comparison_lines(title, comparisons):
            lines.append(title)
            for c in comparisons:
                if c.wilcoxon is not None:
                    wtxt = (
                        f"z={c.wilcoxon.z:+.3f}, p={c.wilcoxon.p_two_sided:.3f}"
                        f" ({c.wilcoxon.method}, n={c.wilcoxon.n_effective})"
                    )
                else:
                    wtxt = c.wilcoxon_note or "-"
                if c.kappa is not None:
                    flag = " ~band-edge" if c.kappa.near_band_edge else ""
                    ktxt = (
                        f"k={c.kappa.kappa:.3f} [{c.kappa.ci95_low:.3f}, "
                        f"{c.kappa.ci95_high:.3f}] {c.kappa.label}{flag}"
                    )
                else:
                    ktxt = c.kappa_note or "-"
                lines.append(f"  {c.name:24} pairs={c.n_pairs:<3} {wtxt:44} {ktxt}")
            lines.append("")

        comparison_lines("Between-day reproducibility", self.between_days)
        comparison_lines("Between-instrument agreement (day 1)", self.between_instruments)
        return "\n".join(lines)


def _values_by_subject(records, test: Test, day: int) -> dict[str, Value]:
    out: dict[str, Value] = {}
    for r in records:
        if r.test is test and r.day == day:
            out[r.subject_id] = r.value
    return out


def _paired_comparison(
    name: str,
    a: dict[str, Value],
    b: dict[str, Value],
    test_for_recode: Test,
    scheme: str,
) -> PairedComparison:
    subjects = sorted(set(a) | set(b))
    paired = [(a[s], b[s]) for s in subjects if s in a and s in b]
    n_missing = len(subjects) - len(paired)

    numeric = [(x, y) for x, y in paired if not is_ol(x) and not is_ol(y)]
    n_ol_pairs = len(paired) - len(numeric)
    wres, wnote = None, None
    if not numeric:
        wnote = "no numeric pairs"
    else:
        try:
            wres = wilcoxon(numeric)
        except NoEffectivePairs:
            wnote = "all differences zero"

    kres, knote = None, None
    if paired:
        codes_a = [recode(test_for_recode, x) for x, _ in paired]
        codes_b = [recode(test_for_recode, y) for _, y in paired]
        counts = confusion_counts(codes_a, codes_b, n_categories(test_for_recode))
        try:
            kres = weighted_kappa(counts, scheme=scheme)
        except DegenerateMarginals as exc:
            knote = str(exc)
    else:
        knote = "no pairs"

    return PairedComparison(
        name=name,
        n_pairs=len(paired),
        n_missing=n_missing,
        n_ol_pairs=n_ol_pairs,
        wilcoxon=wres,
        wilcoxon_note=wnote,
        kappa=kres,
        kappa_note=knote,
    )


def _scheme_for(test: Test) -> str:
    # Quadratic weights where the level steps grow geometrically (near),
    # linear where they grow linearly (far).
    return "quadratic" if test in NEAR_TESTS else "linear"


def analyze(records: Sequence[MeasurementRecord]) -> AnalysisReport:
    """Full dataset report: summaries, reproducibility, and agreement."""
    if not records:
        raise NoEffectivePairs("no measurement records")

    summaries = []
    for test in Test:
        for day in (1, 2):
            by_subject = _values_by_subject(records, test, day)
            if not by_subject:
                continue
            values = list(by_subject.values())
            numeric = [v for v in values if not is_ol(v)]
            n_ol = len(values) - len(numeric)
            if numeric:
                med, q1, q3 = median_iqr(numeric)
            else:
                med = q1 = q3 = None
            codes = [recode(test, v) for v in values]
            n_cats = n_categories(test)
            cum = [100.0 * sum(c <= lvl for c in codes) / len(codes) for lvl in range(1, n_cats + 1)]
            summaries.append(
                TestDaySummary(
                    test=test,
                    day=day,
                    n=len(values),
                    n_ol=n_ol,
                    median=med,
                    iqr_low=q1,
                    iqr_high=q3,
                    cumulative_pct=cum,
                )
            )

    between_days = []
    for test in Test:
        d1 = _values_by_subject(records, test, 1)
        d2 = _values_by_subject(records, test, 2)
        if not d1 or not d2:
            continue
        between_days.append(
            _paired_comparison(
                f"{test.value} day1 vs day2", d1, d2, test, _scheme_for(test)
            )
        )

    between_instruments = []
    near_a = _values_by_subject(records, Test.ST_NEAR, 1)
    near_b = _values_by_subject(records, Test.TNO, 1)
    if near_a and near_b:
        between_instruments.append(
            _paired_comparison(
                "ST_near vs TNO (day 1)", near_a, near_b, Test.ST_NEAR, "quadratic"
            )
        )
    far_a = _values_by_subject(records, Test.ST_FAR, 1)
    far_b = _values_by_subject(records, Test.HD, 1)
    if far_a and far_b:
        between_instruments.append(
            _paired_comparison(
                "ST_far vs HD (day 1)", far_a, far_b, Test.ST_FAR, "linear"
            )
        )

    subjects = {r.subject_id for r in records}
    return AnalysisReport(
        n_subjects=len(subjects),
        n_records=len(records),
        summaries=summaries,
        between_days=between_days,
        between_instruments=between_instruments,
    )
