"""Geographic assignment and aggregation.

Country lookup is ray-casting point-in-polygon over GeoJSON boundaries, with
the border heuristic: a point close to another country's border defers to
the mode of the poster's recent countries.  Aggregates are per-region
credible/not-credible statistics, sentiment grid clusters with the
white/green/red color rule, and per-cell heatmap counts.
"""

from __future__ import annotations

import csv
import html
import io
import json
import math
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Iterable, Mapping, Sequence

from .model import GeoPoint, SentimentLabel, Verdict

#: Region id for records that cannot be assigned to a country.
UNASSIGNED = "Unassigned"

#: Regions with fewer records than this are left out of reports.
MIN_REGION_COUNT = 25

DEFAULT_BORDER_EPSILON_KM = 10.0

EARTH_RADIUS_KM = 6371.0088


class BoundaryError(ValueError):
    """Malformed boundary data."""


class AggregationLevel(Enum):
    COUNTRY = "country"
    CONTINENT = "continent"


class HeatmapClass(Enum):
    NOT_CREDIBLE = "not_credible"
    CREDIBLE = "credible"
    BOTH = "both"


# ---------------------------------------------------------------------------
# Boundaries
# ---------------------------------------------------------------------------

Ring = list[tuple[float, float]]  # (lon, lat) vertices, closed or open


@dataclass(frozen=True)
class _CountryShape:
    country_id: str
    rings: tuple[tuple[tuple[float, float], ...], ...]
    bbox: tuple[float, float, float, float]  # min_lon, min_lat, max_lon, max_lat


def _ring_bbox(rings: Iterable[Ring]) -> tuple[float, float, float, float]:
    lons = [lon for ring in rings for lon, _ in ring]
    lats = [lat for ring in rings for _, lat in ring]
    return min(lons), min(lats), max(lons), max(lats)


class CountryBoundaries:
    """Country polygons loaded from a GeoJSON FeatureCollection.

    Feature ids come from ``feature.id`` or ``properties.id``.  Polygon and
    MultiPolygon geometries are supported; containment uses the even-odd rule
    so holes behave correctly.  Longitude wrap at the antimeridian is not
    handled.
    """

    def __init__(self, shapes: Sequence[_CountryShape]):
        self._shapes = list(shapes)

    @property
    def country_ids(self) -> list[str]:
        return [shape.country_id for shape in self._shapes]

    @classmethod
    def from_geojson(cls, obj: dict) -> "CountryBoundaries":
        if not isinstance(obj, dict) or obj.get("type") != "FeatureCollection":
            raise BoundaryError("expected a GeoJSON FeatureCollection")
        shapes = []
        for feature in obj.get("features", []):
            props = feature.get("properties") or {}
            country_id = feature.get("id") or props.get("id")
            if not country_id:
                raise BoundaryError("feature without an 'id'")
            geometry = feature.get("geometry") or {}
            gtype = geometry.get("type")
            coords = geometry.get("coordinates")
            if gtype == "Polygon":
                polygons = [coords]
            elif gtype == "MultiPolygon":
                polygons = coords
            else:
                raise BoundaryError(f"unsupported geometry type {gtype!r}")
            rings: list[tuple[tuple[float, float], ...]] = []
            try:
                for polygon in polygons:
                    for ring in polygon:
                        cleaned = tuple((float(lon), float(lat)) for lon, lat in ring)
                        if len(cleaned) < 3:
                            raise BoundaryError("ring with fewer than 3 vertices")
                        rings.append(cleaned)
            except (TypeError, ValueError) as exc:
                raise BoundaryError(f"bad coordinates for {country_id!r}: {exc}") from exc
            shapes.append(
                _CountryShape(
                    country_id=str(country_id),
                    rings=tuple(rings),
                    bbox=_ring_bbox([list(r) for r in rings]),
                )
            )
        return cls(shapes)

    @classmethod
    def load(cls, path: str | Path) -> "CountryBoundaries":
        try:
            obj = json.loads(Path(path).read_text(encoding="utf-8"))
        except json.JSONDecodeError as exc:
            raise BoundaryError(f"{path}: invalid JSON: {exc}") from exc
        return cls.from_geojson(obj)

    def country_containing(self, point: GeoPoint) -> str | None:
        for shape in self._shapes:
            min_lon, min_lat, max_lon, max_lat = shape.bbox
            if not (min_lon <= point.lon <= max_lon and min_lat <= point.lat <= max_lat):
                continue
            crossings = 0
            for ring in shape.rings:
                crossings += _ray_crossings(ring, point.lat, point.lon)
            if crossings % 2 == 1:
                return shape.country_id
        return None

    def countries_within_km(self, point: GeoPoint, radius_km: float) -> set[str]:
        """Countries whose boundary comes within ``radius_km`` of the point."""
        near = set()
        # Generous degree padding for the bbox prefilter.
        pad = radius_km / 111.0 * 1.5 + 1e-9
        for shape in self._shapes:
            min_lon, min_lat, max_lon, max_lat = shape.bbox
            if not (
                min_lon - pad <= point.lon <= max_lon + pad
                and min_lat - pad <= point.lat <= max_lat + pad
            ):
                continue
            if _boundary_distance_km(shape, point) <= radius_km:
                near.add(shape.country_id)
        return near


def _ray_crossings(ring: Sequence[tuple[float, float]], lat: float, lon: float) -> int:
    crossings = 0
    count = len(ring)
    for i in range(count):
        lon1, lat1 = ring[i]
        lon2, lat2 = ring[(i + 1) % count]
        if (lat1 > lat) != (lat2 > lat):
            t = (lat - lat1) / (lat2 - lat1)
            crossing_lon = lon1 + t * (lon2 - lon1)
            if lon < crossing_lon:
                crossings += 1
    return crossings


def haversine_km(lat1: float, lon1: float, lat2: float, lon2: float) -> float:
    phi1, phi2 = math.radians(lat1), math.radians(lat2)
    dphi = phi2 - phi1
    dlam = math.radians(lon2 - lon1)
    a = math.sin(dphi / 2.0) ** 2 + math.cos(phi1) * math.cos(phi2) * math.sin(dlam / 2.0) ** 2
    return 2.0 * EARTH_RADIUS_KM * math.asin(min(1.0, math.sqrt(a)))


def _segment_distance_km(
    point: GeoPoint, lon1: float, lat1: float, lon2: float, lat2: float
) -> float:
    # Local equirectangular projection around the query point; accurate at
    # the few-km scales the border heuristic cares about.
    cos0 = math.cos(math.radians(point.lat))
    px = math.radians(point.lon) * cos0
    py = math.radians(point.lat)
    ax = math.radians(lon1) * cos0
    ay = math.radians(lat1)
    bx = math.radians(lon2) * cos0
    by = math.radians(lat2)
    dx, dy = bx - ax, by - ay
    length_sq = dx * dx + dy * dy
    if length_sq == 0.0:
        t = 0.0
    else:
        t = max(0.0, min(1.0, ((px - ax) * dx + (py - ay) * dy) / length_sq))
    cx, cy = ax + t * dx, ay + t * dy
    return math.hypot(px - cx, py - cy) * EARTH_RADIUS_KM


def _boundary_distance_km(shape: _CountryShape, point: GeoPoint) -> float:
    best = math.inf
    for ring in shape.rings:
        count = len(ring)
        for i in range(count):
            lon1, lat1 = ring[i]
            lon2, lat2 = ring[(i + 1) % count]
            best = min(best, _segment_distance_km(point, lon1, lat1, lon2, lat2))
            if best == 0.0:
                return 0.0
    return best


def mode_most_recent(recent: Sequence[str]) -> str:
    """Most frequent entry; ties go to the one seen most recently.

    ``recent`` is ordered most recent first.
    """
    if not recent:
        raise ValueError("recent list must not be empty")
    counts: dict[str, int] = {}
    first_seen: dict[str, int] = {}
    for pos, country in enumerate(recent):
        counts[country] = counts.get(country, 0) + 1
        first_seen.setdefault(country, pos)
    return min(counts, key=lambda c: (-counts[c], first_seen[c]))


def assign_country(
    geo: GeoPoint,
    boundaries: CountryBoundaries,
    recent_countries: Sequence[str] = (),
    border_epsilon_km: float = DEFAULT_BORDER_EPSILON_KM,
) -> str:
    """Country id for a point, applying the border heuristic.

    Plain point-in-polygon, except when the point lies within
    ``border_epsilon_km`` of some other country's boundary and the poster has
    recent history: then the mode of ``recent_countries`` (most recent first,
    ties to the most recent) wins.  Points matching no polygon and no nearby
    border return UNASSIGNED.
    """
    if border_epsilon_km < 0:
        raise ValueError("border_epsilon_km must be >= 0")
    containing = boundaries.country_containing(geo)
    if recent_countries and border_epsilon_km > 0:
        near = boundaries.countries_within_km(geo, border_epsilon_km)
        near.discard(containing)
        if near:
            return mode_most_recent(recent_countries)
    return containing if containing is not None else UNASSIGNED


# ---------------------------------------------------------------------------
# Region statistics
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class RegionStats:
    region: str
    credible_count: int
    not_credible_count: int
    credible_pct: float
    not_credible_pct: float

    @property
    def total(self) -> int:
        return self.credible_count + self.not_credible_count


def load_continents(path: str | Path) -> dict[str, str]:
    """Read a country,continent CSV (header optional)."""
    mapping: dict[str, str] = {}
    with open(path, newline="", encoding="utf-8") as handle:
        for row in csv.reader(handle):
            if not row or row[0].startswith("#"):
                continue
            if row[0].lower() == "country":
                continue
            if len(row) != 2:
                raise ValueError(f"{path}: expected country,continent rows")
            mapping[row[0]] = row[1]
    return mapping


def aggregate(
    records: Iterable[tuple[str, Verdict]],
    level: AggregationLevel = AggregationLevel.COUNTRY,
    min_count: int = MIN_REGION_COUNT,
    continents: Mapping[str, str] | None = None,
) -> list[RegionStats]:
    """Credible/not-credible counts and percentages per region.

    Regions with fewer than ``min_count`` records are omitted; unknown
    country ids are counted under UNASSIGNED rather than dropped.  Sorted by
    total descending, then region id.
    """
    if level is AggregationLevel.CONTINENT and continents is None:
        raise ValueError("continent aggregation needs a country-to-continent mapping")
    credible: dict[str, int] = {}
    not_credible: dict[str, int] = {}
    for country, verdict in records:
        if level is AggregationLevel.CONTINENT:
            region = continents.get(country, UNASSIGNED) if country != UNASSIGNED else UNASSIGNED
        else:
            region = country or UNASSIGNED
        if verdict is Verdict.CREDIBLE:
            credible[region] = credible.get(region, 0) + 1
            not_credible.setdefault(region, 0)
        else:
            not_credible[region] = not_credible.get(region, 0) + 1
            credible.setdefault(region, 0)
    stats = []
    for region in credible:
        c, n = credible[region], not_credible[region]
        total = c + n
        if total < min_count:
            continue
        stats.append(
            RegionStats(
                region=region,
                credible_count=c,
                not_credible_count=n,
                credible_pct=100.0 * c / total,
                not_credible_pct=100.0 * n / total,
            )
        )
    stats.sort(key=lambda s: (-s.total, s.region))
    return stats


def region_stats_to_csv(stats: Sequence[RegionStats]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(
        ["region", "credible", "not_credible", "credible_pct", "not_credible_pct"]
    )
    for entry in stats:
        writer.writerow(
            [
                entry.region,
                entry.credible_count,
                entry.not_credible_count,
                f"{entry.credible_pct:.6f}",
                f"{entry.not_credible_pct:.6f}",
            ]
        )
    return buf.getvalue()


# ---------------------------------------------------------------------------
# Sentiment clusters
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Cluster:
    centroid: GeoPoint
    member_count: int
    positive: int
    negative: int
    neutral: int
    color: tuple[int, int, int]

    def __post_init__(self) -> None:
        if self.positive + self.negative + self.neutral != self.member_count:
            raise ValueError("sentiment counts must sum to member_count")


def cluster_color(positive: int, negative: int) -> tuple[int, int, int]:
    """White when balanced (or all neutral); otherwise interpolate from white
    toward pure green/red by |pos - neg| / (pos + neg), rounding channels to
    the nearest integer."""
    if positive == negative:
        return (255, 255, 255)
    strength = abs(positive - negative) / (positive + negative)
    fade = int(255.0 * (1.0 - strength) + 0.5)
    if positive > negative:
        return (fade, 255, fade)
    return (255, fade, fade)


def _cell_index(point: GeoPoint, cell_size_deg: float) -> tuple[int, int]:
    return (
        math.floor(point.lat / cell_size_deg),
        math.floor(point.lon / cell_size_deg),
    )


def cluster_points(
    records: Sequence[tuple[GeoPoint, SentimentLabel]],
    cell_size_deg: float,
) -> list[Cluster]:
    """Fixed-grid sentiment clusters; one cluster per occupied cell.

    The very-negative/very-positive grades count toward their side.  Output
    is ordered by cell index for determinism.
    """
    if cell_size_deg <= 0:
        raise ValueError("cell_size_deg must be > 0")
    cells: dict[tuple[int, int], list[tuple[GeoPoint, SentimentLabel]]] = {}
    for point, label in records:
        cells.setdefault(_cell_index(point, cell_size_deg), []).append((point, label))
    clusters = []
    for index in sorted(cells):
        members = cells[index]
        positive = sum(
            1 for _, l in members if l in (SentimentLabel.POSITIVE, SentimentLabel.VERY_POSITIVE)
        )
        negative = sum(
            1 for _, l in members if l in (SentimentLabel.NEGATIVE, SentimentLabel.VERY_NEGATIVE)
        )
        neutral = len(members) - positive - negative
        clusters.append(
            Cluster(
                centroid=GeoPoint(
                    lat=sum(p.lat for p, _ in members) / len(members),
                    lon=sum(p.lon for p, _ in members) / len(members),
                ),
                member_count=len(members),
                positive=positive,
                negative=negative,
                neutral=neutral,
                color=cluster_color(positive, negative),
            )
        )
    return clusters


# ---------------------------------------------------------------------------
# Heatmap
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class CellCounts:
    credible: int = 0
    not_credible: int = 0


@dataclass(frozen=True)
class HeatmapGrid:
    cell_size_deg: float
    cells: Mapping[tuple[int, int], CellCounts] = field(default_factory=dict)

    def total(self, which: HeatmapClass = HeatmapClass.BOTH) -> int:
        if which is HeatmapClass.CREDIBLE:
            return sum(c.credible for c in self.cells.values())
        if which is HeatmapClass.NOT_CREDIBLE:
            return sum(c.not_credible for c in self.cells.values())
        return sum(c.credible + c.not_credible for c in self.cells.values())


def heatmap(
    records: Sequence[tuple[GeoPoint, Verdict]],
    cell_size_deg: float,
    which: HeatmapClass = HeatmapClass.NOT_CREDIBLE,
) -> HeatmapGrid:
    """Per-cell counts of the selected verdict class."""
    if cell_size_deg <= 0:
        raise ValueError("cell_size_deg must be > 0")
    counts: dict[tuple[int, int], list[int]] = {}
    for point, verdict in records:
        if which is HeatmapClass.CREDIBLE and verdict is not Verdict.CREDIBLE:
            continue
        if which is HeatmapClass.NOT_CREDIBLE and verdict is not Verdict.NOT_CREDIBLE:
            continue
        cell = counts.setdefault(_cell_index(point, cell_size_deg), [0, 0])
        if verdict is Verdict.CREDIBLE:
            cell[0] += 1
        else:
            cell[1] += 1
    return HeatmapGrid(
        cell_size_deg=cell_size_deg,
        cells={
            index: CellCounts(credible=c, not_credible=n)
            for index, (c, n) in sorted(counts.items())
        },
    )


# ---------------------------------------------------------------------------
# GeoJSON / HTML export
# ---------------------------------------------------------------------------


def _hex_color(rgb: tuple[int, int, int]) -> str:
    return "#{:02x}{:02x}{:02x}".format(*rgb)


def clusters_to_geojson(clusters: Sequence[Cluster]) -> dict:
    features = []
    for cluster in clusters:
        features.append(
            {
                "type": "Feature",
                "geometry": {
                    "type": "Point",
                    "coordinates": [cluster.centroid.lon, cluster.centroid.lat],
                },
                "properties": {
                    "count": cluster.member_count,
                    "positive": cluster.positive,
                    "negative": cluster.negative,
                    "neutral": cluster.neutral,
                    "color": _hex_color(cluster.color),
                },
            }
        )
    return {"type": "FeatureCollection", "features": features}


def heatmap_to_geojson(grid: HeatmapGrid) -> dict:
    features = []
    size = grid.cell_size_deg
    for (lat_idx, lon_idx), counts in grid.cells.items():
        south, west = lat_idx * size, lon_idx * size
        north, east = south + size, west + size
        features.append(
            {
                "type": "Feature",
                "geometry": {
                    "type": "Polygon",
                    "coordinates": [
                        [[west, south], [east, south], [east, north], [west, north], [west, south]]
                    ],
                },
                "properties": {
                    "count": counts.credible + counts.not_credible,
                    "credible": counts.credible,
                    "not_credible": counts.not_credible,
                },
            }
        )
    return {"type": "FeatureCollection", "features": features}


_HTML_TEMPLATE = """<!DOCTYPE html>
<html>
<head>
<meta charset="utf-8">
<title>{title}</title>
<style>
  body {{ font-family: sans-serif; margin: 1em; background: #fafafa; }}
  svg {{ border: 1px solid #999; background: #eef6fb; }}
</style>
</head>
<body>
<h1>{title}</h1>
<svg viewBox="0 0 720 360" width="1080" height="540">
<rect x="0" y="0" width="720" height="360" fill="#eef6fb"/>
{shapes}
</svg>
<p>Equirectangular projection; longitude -180..180, latitude 90..-90.</p>
<script type="application/json" id="geojson">
{payload}
</script>
</body>
</html>
"""


def render_map_html(geojson: dict, title: str = "credistream map") -> str:
    """Self-contained HTML page with the features drawn on a plain SVG map
    and the raw GeoJSON embedded for offline inspection."""

    def sx(lon: float) -> float:
        return (lon + 180.0) / 360.0 * 720.0

    def sy(lat: float) -> float:
        return (90.0 - lat) / 180.0 * 360.0

    shapes = []
    for feature in geojson.get("features", []):
        geometry = feature.get("geometry", {})
        props = feature.get("properties", {})
        color = props.get("color")
        if geometry.get("type") == "Point":
            lon, lat = geometry["coordinates"]
            count = props.get("count", 1)
            radius = max(2.0, min(14.0, 2.0 + math.sqrt(count)))
            fill = color or "#cc3333"
            shapes.append(
                f'<circle cx="{sx(lon):.2f}" cy="{sy(lat):.2f}" r="{radius:.2f}" '
                f'fill="{html.escape(str(fill))}" stroke="#333" stroke-width="0.4" opacity="0.85"/>'
            )
        elif geometry.get("type") == "Polygon":
            ring = geometry["coordinates"][0]
            points = " ".join(f"{sx(lon):.2f},{sy(lat):.2f}" for lon, lat in ring)
            intensity = props.get("count", props.get("not_credible", 0))
            alpha = min(0.9, 0.25 + 0.1 * intensity)
            fill = color or "#cc3333"
            shapes.append(
                f'<polygon points="{points}" fill="{html.escape(str(fill))}" '
                f'opacity="{alpha:.2f}" stroke="#802020" stroke-width="0.3"/>'
            )
    payload = json.dumps(geojson, sort_keys=True, indent=1)
    return _HTML_TEMPLATE.format(title=html.escape(title), shapes="\n".join(shapes), payload=payload)


def default_boundaries() -> CountryBoundaries:
    """The coarse demo world boundaries shipped with the package."""
    return CountryBoundaries.load(Path(__file__).parent / "data" / "world_coarse.geojson")


def default_continents() -> dict[str, str]:
    """The country-to-continent table shipped with the package."""
    return load_continents(Path(__file__).parent / "data" / "continents.csv")
