"""Domain data model and CSV ingestion for indicator panels.

A panel is an immutable collection of per-area time series over the four
decade years 2001/2011/2021/2031. Observed history lives at 2001-2021;
any value stored at 2031 is, by convention, a published projection kept
for comparison, never an observation (projections computed by this
package live in ProjectionResult objects, not in panels).

Panel CSV schema:    area,indicator,year,value
                     indicator in {HDI, DALY_A, DALY_B, DALY_C}
Gender CSV schema:   area,year,overall_mf,disabled_mf
                     optionally followed by the four count columns
                     male_disabled,female_disabled,male_total,female_total
"""

from __future__ import annotations

import csv
import enum
import io
import math
from dataclasses import dataclass
from typing import BinaryIO, Iterable, Iterator, NamedTuple, Optional, Union

from .errors import PanelError

__all__ = [
    "YEARS",
    "OBSERVATION_YEARS",
    "TARGET_YEAR",
    "decade_index",
    "canonical_area",
    "IndicatorKind",
    "AreaSeries",
    "Panel",
    "GenderCounts",
    "GenderRecord",
    "load_panel",
    "load_gender",
    "dump_panel",
    "lookup",
]

YEARS = (2001, 2011, 2021, 2031)
OBSERVATION_YEARS = (2001, 2011, 2021)
TARGET_YEAR = 2031

PANEL_HEADER = ("area", "indicator", "year", "value")
GENDER_HEADER = ("area", "year", "overall_mf", "disabled_mf")
GENDER_COUNT_COLUMNS = ("male_disabled", "female_disabled", "male_total", "female_total")

# Stored ratio vs count quotient agreement (relative).
COUNT_CONSISTENCY_RTOL = 1e-9


def decade_index(year: int) -> int:
    """Map a decade year to its regression index t = (year - 2001) / 10."""
    if year not in YEARS:
        raise PanelError(f"year {year!r} is not one of {YEARS}")
    return (year - 2001) // 10


def canonical_area(name: str) -> str:
    """Normalize an area label: trimmed, single-spaced, uppercase."""
    label = " ".join(str(name).split()).upper()
    if not label:
        raise PanelError("area label is empty")
    return label


class IndicatorKind(enum.Enum):
    """The six indicators a panel can carry.

    DALY_A covers communicable, maternal, neonatal and nutritional
    diseases; DALY_B noncommunicable diseases; DALY_C injuries. DALY
    values are rates per 100,000 population.
    """

    HDI = "HDI"
    DALY_A = "DALY_A"
    DALY_B = "DALY_B"
    DALY_C = "DALY_C"
    RATIO_DISABLED_MF = "RATIO_DISABLED_MF"
    RATIO_TOTAL_MF = "RATIO_TOTAL_MF"

    @property
    def is_daly(self) -> bool:
        return self in (IndicatorKind.DALY_A, IndicatorKind.DALY_B, IndicatorKind.DALY_C)

    @property
    def is_ratio(self) -> bool:
        return self in (IndicatorKind.RATIO_DISABLED_MF, IndicatorKind.RATIO_TOTAL_MF)


# Kinds admitted by the panel CSV schema (ratios travel in the gender CSV).
CSV_KINDS = (IndicatorKind.HDI, IndicatorKind.DALY_A, IndicatorKind.DALY_B, IndicatorKind.DALY_C)
DALY_KINDS = (IndicatorKind.DALY_A, IndicatorKind.DALY_B, IndicatorKind.DALY_C)


def _value_error(kind: IndicatorKind, value: float) -> Optional[str]:
    """Describe why ``value`` is invalid for ``kind``, or None if it is fine."""
    if not math.isfinite(value):
        return f"{kind.value} value {value!r} is not finite"
    if kind is IndicatorKind.HDI:
        if not 0.0 < value <= 1.0:
            return f"HDI value {value!r} out of range (0, 1]"
    elif value <= 0.0:
        label = "DALY" if kind.is_daly else "ratio"
        return f"{label} value {value!r} must be positive"
    return None


@dataclass(frozen=True)
class AreaSeries:
    """One area's time series for one indicator.

    ``points`` is a tuple of (year, value) pairs with strictly increasing
    years drawn from YEARS. Value ranges are enforced per indicator:
    HDI in (0, 1], DALY and ratio values strictly positive.
    """

    area: str
    indicator: IndicatorKind
    points: tuple[tuple[int, float], ...]

    def __post_init__(self) -> None:
        if not self.area or self.area != " ".join(self.area.split()).upper():
            raise PanelError(f"area label {self.area!r} is not canonical uppercase")
        if not isinstance(self.indicator, IndicatorKind):
            raise PanelError(f"unknown indicator {self.indicator!r}")
        object.__setattr__(self, "points", tuple((int(y), float(v)) for y, v in self.points))
        previous = None
        for year, value in self.points:
            if year not in YEARS:
                raise PanelError(f"({self.area}, {self.indicator.value}): year {year} not in {YEARS}")
            if previous is not None and year <= previous:
                raise PanelError(
                    f"({self.area}, {self.indicator.value}): years not strictly increasing at {year}"
                )
            previous = year
            problem = _value_error(self.indicator, value)
            if problem is not None:
                raise PanelError(f"({self.area}, {self.indicator.value}, {year}): {problem}")

    @property
    def years(self) -> tuple[int, ...]:
        return tuple(y for y, _ in self.points)

    @property
    def values(self) -> tuple[float, ...]:
        return tuple(v for _, v in self.points)

    def value_at(self, year: int) -> Optional[float]:
        for y, v in self.points:
            if y == year:
                return v
        return None

    def has_years(self, years: Iterable[int]) -> bool:
        mine = set(self.years)
        return all(y in mine for y in years)


class Panel:
    """Immutable collection of AreaSeries keyed by (area, indicator).

    Panels compare equal when they hold the same series values; the
    provenance label is descriptive metadata only.
    """

    def __init__(self, series: Iterable[AreaSeries], provenance: str = ""):
        self.provenance = str(provenance)
        mapping: dict[tuple[str, IndicatorKind], AreaSeries] = {}
        for s in series:
            key = (s.area, s.indicator)
            if key in mapping:
                raise PanelError(f"duplicate series for ({s.area}, {s.indicator.value})")
            mapping[key] = s
        self._series = dict(sorted(mapping.items(), key=lambda kv: (kv[0][0], kv[0][1].value)))

    def __len__(self) -> int:
        return len(self._series)

    def __iter__(self) -> Iterator[AreaSeries]:
        return iter(self._series.values())

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Panel):
            return NotImplemented
        return self._series == other._series

    def __repr__(self) -> str:
        return f"Panel({len(self._series)} series, provenance={self.provenance!r})"

    def areas(self) -> tuple[str, ...]:
        return tuple(sorted({a for a, _ in self._series}))

    def indicators(self) -> tuple[IndicatorKind, ...]:
        return tuple(sorted({k for _, k in self._series}, key=lambda k: k.value))

    def get(self, area: str, indicator: IndicatorKind) -> Optional[AreaSeries]:
        return self._series.get((area, indicator))

    def lookup(self, area: str, indicator: IndicatorKind, year: int) -> Optional[float]:
        series = self.get(area, indicator)
        return None if series is None else series.value_at(year)

    def missing_for_projection(self) -> tuple[tuple[str, IndicatorKind, int], ...]:
        """Keys an area still needs before the projection pipeline can run.

        Projection readiness requires, for every area present, HDI and each
        DALY kind observed at 2001, 2011 and 2021.
        """
        missing = []
        for area in self.areas():
            for kind in (IndicatorKind.HDI,) + DALY_KINDS:
                series = self.get(area, kind)
                for year in OBSERVATION_YEARS:
                    if series is None or series.value_at(year) is None:
                        missing.append((area, kind, year))
        return tuple(missing)

    @property
    def is_projection_ready(self) -> bool:
        return not self.missing_for_projection()


class GenderCounts(NamedTuple):
    male_disabled: float
    female_disabled: float
    male_total: float
    female_total: float


@dataclass(frozen=True)
class GenderRecord:
    """Per-area, per-year male/female ratios, with optional absolute counts.

    When counts are present each stored ratio must agree with the
    corresponding count quotient to within 1e-9 relative.
    """

    area: str
    year: int
    overall_mf: float
    disabled_mf: float
    counts: Optional[GenderCounts] = None

    def __post_init__(self) -> None:
        if not self.area:
            raise PanelError("gender record area label is empty")
        if self.year not in YEARS:
            raise PanelError(f"gender record year {self.year} not in {YEARS}")
        for label, ratio in (("overall_mf", self.overall_mf), ("disabled_mf", self.disabled_mf)):
            if not (math.isfinite(ratio) and ratio > 0.0):
                raise PanelError(f"({self.area}, {self.year}): {label} value {ratio!r} must be positive")
        if self.counts is not None:
            c = self.counts
            if min(c.female_disabled, c.female_total) <= 0:
                raise PanelError(f"({self.area}, {self.year}): female counts must be positive")
            for label, stored, quotient in (
                ("disabled_mf", self.disabled_mf, c.male_disabled / c.female_disabled),
                ("overall_mf", self.overall_mf, c.male_total / c.female_total),
            ):
                if abs(stored - quotient) > COUNT_CONSISTENCY_RTOL * abs(quotient):
                    raise PanelError(
                        f"({self.area}, {self.year}): stored {label} {stored!r} "
                        f"disagrees with count quotient {quotient!r}"
                    )


# ----------------------------------------------------------------------
# CSV ingestion
# ----------------------------------------------------------------------

Source = Union[bytes, BinaryIO]


def _rows(source: Source) -> Iterator[tuple[int, list[str]]]:
    """Yield (physical line number, fields) for each non-empty CSV row.

    The source must decode as UTF-8; a UnicodeDecodeError propagates so
    callers can classify the input as unreadable rather than invalid.
    """
    data = source if isinstance(source, bytes) else source.read()
    text = data.decode("utf-8-sig")
    for lineno, row in enumerate(csv.reader(io.StringIO(text)), start=1):
        if not row or all(not field.strip() for field in row):
            continue
        yield lineno, [field.strip() for field in row]


def _check_header(row: list[str], expected: tuple[str, ...], kind: str) -> int:
    got = tuple(field.lower() for field in row)
    if got == expected or got == expected + GENDER_COUNT_COLUMNS:
        return len(got)
    raise PanelError(f"bad {kind} header {row!r}; expected {','.join(expected)}")


def _parse_year(token: str, lineno: int) -> int:
    try:
        year = int(token)
    except ValueError:
        raise PanelError(f"row {lineno}: unparseable year {token!r}") from None
    if year not in YEARS:
        raise PanelError(f"row {lineno}: year {year} not in {YEARS}")
    return year


def _parse_float(token: str, lineno: int, column: str) -> float:
    try:
        value = float(token)
    except ValueError:
        raise PanelError(f"row {lineno}: unparseable {column} {token!r}") from None
    if not math.isfinite(value):
        raise PanelError(f"row {lineno}: {column} {token!r} is not finite")
    return value


def load_panel(source: Source, provenance: str = "csv") -> Panel:
    """Parse an indicator-panel CSV into a Panel.

    Row order is irrelevant to the result. Malformed rows are rejected
    with their physical line number; invariant violations (value ranges,
    duplicate keys) name the offending key.
    """
    cells: dict[tuple[str, IndicatorKind], dict[int, float]] = {}
    header_seen = False
    for lineno, row in _rows(source):
        if not header_seen:
            _check_header(row, PANEL_HEADER, "panel")
            header_seen = True
            continue
        if len(row) != 4:
            raise PanelError(f"row {lineno}: expected 4 fields, got {len(row)}")
        area = canonical_area(row[0]) if row[0] else None
        if area is None:
            raise PanelError(f"row {lineno}: empty area label")
        kind_token = row[1].upper()
        try:
            kind = IndicatorKind(kind_token)
        except ValueError:
            raise PanelError(f"row {lineno}: unknown indicator {row[1]!r}") from None
        if kind not in CSV_KINDS:
            raise PanelError(f"row {lineno}: indicator {kind.value} not allowed in panel CSV")
        year = _parse_year(row[2], lineno)
        value = _parse_float(row[3], lineno, "value")
        problem = _value_error(kind, value)
        if problem is not None:
            raise PanelError(f"row {lineno}: ({area}, {kind.value}, {year}): {problem}")
        per_series = cells.setdefault((area, kind), {})
        if year in per_series:
            raise PanelError(f"duplicate entry for ({area}, {kind.value}, {year})")
        per_series[year] = value
    if not header_seen:
        raise PanelError("empty input: missing panel header")
    series = [
        AreaSeries(area, kind, tuple(sorted(by_year.items())))
        for (area, kind), by_year in cells.items()
    ]
    return Panel(series, provenance=provenance)


def dump_panel(panel: Panel) -> str:
    """Serialize a panel back to the CSV schema, preserving exact values.

    Only the four CSV-schema indicators are emitted; ratio series travel
    in the gender CSV. load_panel(dump_panel(p).encode()) == p for any
    panel produced by load_panel.
    """
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(PANEL_HEADER)
    for series in panel:
        if series.indicator not in CSV_KINDS:
            continue
        for year, value in series.points:
            writer.writerow([series.area, series.indicator.value, year, repr(value)])
    return out.getvalue()


def load_gender(source: Source) -> tuple[GenderRecord, ...]:
    """Parse a gender-ratio CSV into GenderRecord objects.

    The four count columns are optional as a block: either the header
    carries all of them or none. Rows under the 8-column header may leave
    all four count cells blank.
    """
    records: list[GenderRecord] = []
    seen: set[tuple[str, int]] = set()
    arity = None
    for lineno, row in _rows(source):
        if arity is None:
            arity = _check_header(row, GENDER_HEADER, "gender")
            continue
        if len(row) != arity:
            raise PanelError(f"row {lineno}: expected {arity} fields, got {len(row)}")
        area = canonical_area(row[0])
        year = _parse_year(row[1], lineno)
        overall = _parse_float(row[2], lineno, "overall_mf")
        disabled = _parse_float(row[3], lineno, "disabled_mf")
        counts = None
        if arity == 8:
            blanks = [token == "" for token in row[4:8]]
            if not all(blanks):
                if any(blanks):
                    raise PanelError(f"row {lineno}: count columns must be all present or all blank")
                counts = GenderCounts(*(_parse_float(row[i], lineno, GENDER_COUNT_COLUMNS[i - 4])
                                        for i in range(4, 8)))
        key = (area, year)
        if key in seen:
            raise PanelError(f"duplicate gender entry for ({area}, {year})")
        seen.add(key)
        try:
            records.append(GenderRecord(area, year, overall, disabled, counts))
        except PanelError as exc:
            raise PanelError(f"row {lineno}: {exc}") from None
    if arity is None:
        raise PanelError("empty input: missing gender header")
    return tuple(records)


def lookup(panel: Panel, area: str, indicator: IndicatorKind, year: int) -> Optional[float]:
    """Return the stored value for (area, indicator, year), or None.

    Absence is a value, not an error; nothing is ever interpolated.
    """
    return panel.lookup(area, indicator, year)
