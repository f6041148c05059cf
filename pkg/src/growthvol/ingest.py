"""Loading long-run GDP-per-capita tables into growth panels.

Two on-disk layouts are accepted:

* wide CSV: first column "year", one column per country, empty cells for
  missing observations (this is how long-run historical tables are usually
  distributed);
* long CSV: header "country,year,gdppc", one observation per row.

Country names are normalized through a bundled alias table covering common
variant spellings ("Korea, Rep." vs "Republic of Korea" and the like); names
that still match no entry of the region map are never fuzzy-matched, they
are dropped and reported.  A bundled region map assigns each country to one
of six world regions; a custom map can be supplied instead.

Long-format serialization writes levels with 17 significant digits, so a
save/load round trip reproduces a panel bit for bit.
"""

from __future__ import annotations

import csv
import io
import json
import warnings
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

from growthvol.panel import (
    REGIONS,
    CountryMeta,
    GrowthPanel,
    PanelObservation,
    build_growth_panel,
)

# Countries with complete 1900-1999 coverage in the classic long-run
# dataset; the bundled demo panel uses the same roster.
CENTURY_BALANCED_COUNTRIES = frozenset({
    "Austria", "Belgium", "Canada", "Denmark", "Finland", "France",
    "Germany", "Greece", "Italy", "Netherlands", "Norway", "Portugal",
    "Spain", "Sweden", "Switzerland", "United Kingdom", "United States",
    "Australia", "India", "Japan", "New Zealand", "Sri Lanka",
    "Argentina", "Brazil", "Chile", "Colombia", "Ecuador", "Mexico",
    "Peru", "Uruguay", "Venezuela",
})

# Variant spelling -> canonical name. Extend as new vintages require;
# anything not resolved here and absent from the region map is dropped
# loudly rather than guessed at.
COUNTRY_ALIASES = {
    "Bolivia (Plurinational State of)": "Bolivia",
    "Bosnia": "Bosnia and Herzegovina",
    "Burkina": "Burkina Faso",
    "Cabo Verde": "Cape Verde",
    "Centr. Afr. Rep.": "Central African Republic",
    "China, Hong Kong SAR": "Hong Kong",
    "Congo": "Republic of Congo",
    "Congo, Dem. Rep.": "Zaire",
    "Congo, Rep.": "Republic of Congo",
    "Cote d Ivoire": "Côte d'Ivoire",
    "Cote d'Ivoire": "Côte d'Ivoire",
    "Czechia": "Czech Republic",
    "D.R. of the Congo": "Zaire",
    "Democratic Republic of the Congo": "Zaire",
    "Egypt, Arab Rep.": "Egypt",
    "Eswatini": "Swaziland",
    "F. Yugosl. Rep. of Macedonia": "Macedonia",
    "Gambia, The": "Gambia",
    "Great Britain": "United Kingdom",
    "Hong Kong SAR, China": "Hong Kong",
    "Iran (Islamic Republic of)": "Iran",
    "Iran, Islamic Rep.": "Iran",
    "Ivory Coast": "Côte d'Ivoire",
    "Korea, Rep.": "Republic of Korea",
    "Korea, Republic of": "Republic of Korea",
    "Kyrgyz Republic": "Kyrgyzstan",
    "Kyrgyztan": "Kyrgyzstan",
    "Lao People's DR": "Lao PDR",
    "Laos": "Lao PDR",
    "Macedonia, FYR": "Macedonia",
    "Moldova, Rep.": "Moldova",
    "North Macedonia": "Macedonia",
    "Russia": "Russian Federation",
    "S. Korea": "Republic of Korea",
    "Sao Tome and Principe": "São Tomé and Principe",
    "Sierra Leona": "Sierra Leone",
    "South Korea": "Republic of Korea",
    "Syrian Arab Republic": "Syria",
    "Taiwan, China": "Taiwan",
    "Tanzania, United Rep.": "Tanzania",
    "The Gambia": "Gambia",
    "Trinidad & Tobago": "Trinidad and Tobago",
    "U.K.": "United Kingdom",
    "UK": "United Kingdom",
    "USA": "United States",
    "United States of America": "United States",
    "Venezuela (Bolivarian Republic of)": "Venezuela",
    "Venezuela, RB": "Venezuela",
    "Viet Nam": "Vietnam",
    "Yemen, Rep.": "Yemen",
}


class IngestError(ValueError):
    """Structured parse/validation failure with file location."""

    def __init__(self, message, *, path=None, row=None, column=None):
        location = []
        if path is not None:
            location.append(str(path))
        if row is not None:
            location.append(f"row {row}")
        if column is not None:
            location.append(f"column {column!r}")
        suffix = f" ({', '.join(location)})" if location else ""
        super().__init__(f"{message}{suffix}")
        self.path = path
        self.row = row
        self.column = column


@dataclass(frozen=True)
class DatasetManifest:
    """What to load and how to restrict it.

    ``region_map_path`` of None selects the bundled six-region map.
    ``panel_kind`` is "unbalanced" (every country with any coverage) or
    "balanced" (only countries observed in every year of the range).
    """

    data_path: str | Path
    region_map_path: str | Path | None = None
    year_min: int = 1900
    year_max: int = 1999
    panel_kind: str = "unbalanced"

    def __post_init__(self):
        if self.year_min >= self.year_max:
            raise ValueError(
                f"year_min must precede year_max, got {self.year_min}..{self.year_max}"
            )
        if self.panel_kind not in ("balanced", "unbalanced"):
            raise ValueError(
                f"panel_kind must be 'balanced' or 'unbalanced', got {self.panel_kind!r}"
            )


@dataclass
class LoadReport:
    """What a load produced and what it discarded."""

    countries: int
    years: tuple[int, int]
    dropped: list[dict] = field(default_factory=list)
    balanced_members: int = 0

    def to_json_dict(self) -> dict:
        return {
            "countries": self.countries,
            "years": list(self.years),
            "dropped": self.dropped,
            "balanced_members": self.balanced_members,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_json_dict(), indent=2, sort_keys=True)


def canonical_name(name: str) -> str:
    name = name.strip()
    return COUNTRY_ALIASES.get(name, name)


def _data_rows(path):
    """CSV rows with comment lines (leading '#') skipped, with line numbers."""
    with open(path, newline="", encoding="utf-8") as handle:
        for line_no, row in enumerate(csv.reader(handle), start=1):
            if not row or (row[0].lstrip().startswith("#")):
                continue
            yield line_no, row


def validate_region_map(map_file) -> dict[str, str]:
    """Parse and validate a country -> region mapping.

    Region labels must belong to the six-value taxonomy; anything else is an
    error naming the label and its line.  Country names are normalized
    through the alias table.
    """
    mapping: dict[str, str] = {}
    rows = _data_rows(map_file)
    try:
        line_no, header = next(rows)
    except StopIteration:
        raise IngestError("region map is empty", path=map_file) from None
    if [cell.strip().lower() for cell in header[:2]] != ["country", "region"]:
        raise IngestError(
            "region map header must be 'country,region'", path=map_file, row=line_no
        )
    for line_no, row in rows:
        if len(row) < 2 or not row[0].strip():
            raise IngestError("malformed region row", path=map_file, row=line_no)
        country = canonical_name(row[0])
        region = row[1].strip()
        if region not in REGIONS:
            raise IngestError(
                f"unknown region label {region!r} for {country!r}; "
                f"expected one of {', '.join(REGIONS)}",
                path=map_file, row=line_no,
            )
        mapping[country] = region
    return mapping


def bundled_region_map() -> dict[str, str]:
    """The package's built-in country -> region mapping."""
    source = resources.files("growthvol").joinpath("data/regions.csv")
    with resources.as_file(source) as path:
        return validate_region_map(path)


def _parse_level(cell: str, path, row, column) -> float:
    try:
        value = float(cell)
    except ValueError:
        raise IngestError(
            f"malformed numeric cell {cell!r}", path=path, row=row, column=column
        ) from None
    return value


def read_wide_csv(path) -> list[PanelObservation]:
    """Wide layout: first column 'year', remaining columns one per country."""
    rows = _data_rows(path)
    try:
        line_no, header = next(rows)
    except StopIteration:
        raise IngestError("data file is empty", path=path) from None
    if not header or header[0].strip().lower() != "year":
        raise IngestError("wide header must start with 'year'", path=path, row=line_no)
    countries = [canonical_name(cell) for cell in header[1:]]
    if any(not c for c in countries):
        raise IngestError("empty country name in header", path=path, row=line_no)
    observations = []
    for line_no, row in rows:
        try:
            year = int(row[0])
        except ValueError:
            raise IngestError(
                f"malformed year {row[0]!r}", path=path, row=line_no, column="year"
            ) from None
        for country, cell in zip(countries, row[1:]):
            cell = cell.strip()
            if not cell:
                continue  # empty cell = missing observation
            value = _parse_level(cell, path, line_no, country)
            observations.append(PanelObservation(country, year, value))
    return observations


def read_long_csv(path) -> list[PanelObservation]:
    """Long layout: header 'country,year,gdppc', one observation per row."""
    rows = _data_rows(path)
    try:
        line_no, header = next(rows)
    except StopIteration:
        raise IngestError("data file is empty", path=path) from None
    if [cell.strip().lower() for cell in header[:3]] != ["country", "year", "gdppc"]:
        raise IngestError(
            "long header must be 'country,year,gdppc'", path=path, row=line_no
        )
    observations = []
    for line_no, row in rows:
        if len(row) < 3:
            raise IngestError("short row", path=path, row=line_no)
        country = canonical_name(row[0])
        try:
            year = int(row[1])
        except ValueError:
            raise IngestError(
                f"malformed year {row[1]!r}", path=path, row=line_no, column="year"
            ) from None
        value = _parse_level(row[2].strip(), path, line_no, "gdppc")
        observations.append(PanelObservation(country, year, value))
    return observations


def read_observations(path) -> list[PanelObservation]:
    """Read either accepted layout, telling them apart by the header."""
    for _, row in _data_rows(path):
        first = row[0].strip().lower()
        break
    else:
        raise IngestError("data file is empty", path=path)
    if first == "year":
        return read_wide_csv(path)
    if first == "country":
        return read_long_csv(path)
    raise IngestError(
        "unrecognized header: expected a wide table starting with 'year' "
        "or a long table starting with 'country'",
        path=path,
    )


def load_panel(manifest: DatasetManifest) -> tuple[GrowthPanel, LoadReport]:
    """Load, validate, and assemble a growth panel.

    Countries absent from the region map are dropped with a warning and a
    report entry.  Map entries matching no country in the data are ignored
    with a warning.  Balanced membership means having an observation in
    every year of the manifest's range.

    Returns
    -------
    (GrowthPanel, LoadReport)
    """
    if manifest.region_map_path is None:
        region_map = bundled_region_map()
    else:
        region_map = validate_region_map(manifest.region_map_path)

    observations = read_observations(manifest.data_path)
    observations = [
        o for o in observations if manifest.year_min <= o.year <= manifest.year_max
    ]
    if not observations:
        raise IngestError(
            f"no observations in {manifest.year_min}..{manifest.year_max}",
            path=manifest.data_path,
        )

    report = LoadReport(countries=0, years=(manifest.year_min, manifest.year_max))
    present = {o.country_id for o in observations}
    unmapped = sorted(present - set(region_map))
    for country in unmapped:
        warnings.warn(f"dropping {country!r}: not in the region map", stacklevel=2)
        report.dropped.append({"country": country, "reason": "not in region map"})
    unused = sorted(set(region_map) - present)
    if unused and manifest.region_map_path is not None:
        # A custom map naming absent countries is suspicious; the bundled
        # one legitimately covers more than any single file.
        for country in unused:
            warnings.warn(f"region map entry {country!r} matches no data", stacklevel=2)
    observations = [o for o in observations if o.country_id in region_map]
    if not observations:
        raise IngestError("every country was dropped", path=manifest.data_path)

    years_by_country: dict[str, set] = {}
    for o in observations:
        years_by_country.setdefault(o.country_id, set()).add(o.year)
    full_range = set(range(manifest.year_min, manifest.year_max + 1))
    balanced = {c for c, years in years_by_country.items() if years >= full_range}

    if manifest.panel_kind == "balanced":
        for country in sorted(set(years_by_country) - balanced):
            report.dropped.append(
                {"country": country, "reason": "incomplete years for balanced panel"}
            )
        observations = [o for o in observations if o.country_id in balanced]
        if not observations:
            raise IngestError(
                "no country covers the full year range; balanced panel is empty",
                path=manifest.data_path,
            )

    meta = {
        c: CountryMeta(country_id=c, region=region_map[c], balanced_member=c in balanced)
        for c in {o.country_id for o in observations}
    }
    panel = build_growth_panel(observations, meta=meta)
    report.countries = panel.n_countries
    report.years = panel.span
    report.balanced_members = sum(1 for m in panel.meta.values() if m.balanced_member)
    return panel, report


def panel_to_long_csv(panel: GrowthPanel) -> str:
    """Serialize levels to the long layout, exactly enough for a round trip.

    17 significant digits make float -> text -> float the identity, so
    reloading reproduces the panel including all derived columns.
    """
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(["country", "year", "gdppc"])
    for country, year, value in zip(panel.country, panel.year, panel.gdppc):
        writer.writerow([country, int(year), format(value, ".17g")])
    return out.getvalue()


def write_long_csv(panel: GrowthPanel, path) -> None:
    Path(path).write_text(panel_to_long_csv(panel), encoding="utf-8")
