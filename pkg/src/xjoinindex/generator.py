"""Deterministic synthetic warehouses.

The reference profile follows the sales warehouse used to evaluate the
index: five dimensions (customers 50 000, products 10 000, times 1 461,
promotions 501, channels 5 members), two measures and 16 260 336 cells.
Attribute lists and value pools are this package's own choices.

Profile files are INI documents::

    [warehouse]
    fact = Sales
    cells = 16260336
    seed = 42

    [measure quantity]
    low = 1
    high = 100
    decimals = 0

    [dimension customers]
    members = 50000
    attributes = cust_name, cust_city, cust_zip, cust_country
    pool_size = 10

Within a dimension the first attribute is unique per member; every other
attribute draws from ``pool_size`` distinct values, so an equality
selection on it keeps about 1/pool_size of the cells.
"""

from __future__ import annotations

import configparser
import math
import random
from dataclasses import dataclass, replace
from pathlib import Path

from .errors import InvalidProfileError
from .model import DimensionDef, DimensionMember, FactCell, SchemaMeta, Warehouse

TABLE1_CELLS = 16_260_336
# (name, members, attributes)
TABLE1_DIMENSIONS = (
    ("channels", 5, ("channel_desc", "channel_class")),
    ("promotions", 501, ("promo_name", "promo_category")),
    ("customers", 50_000, ("cust_name", "cust_city", "cust_zip", "cust_country")),
    ("products", 10_000, ("prod_name", "prod_category", "prod_subcategory", "prod_brand")),
    ("times", 1_461, ("time_day", "time_month")),
)

CITIES = (
    "Lyon", "Paris", "Marseille", "Toulouse", "Nice", "Nantes", "Strasbourg", "Montpellier",
    "Bordeaux", "Lille", "Rennes", "Reims", "Grenoble", "Dijon", "Angers", "Brest",
)  # fmt: skip

FIGURE2_QUERY = 'select sum(quantity) from facts where customers.cust_city = "Lyon" group by customers.cust_name'


@dataclass(frozen=True)
class DimensionProfile:
    name: str
    members: int
    attributes: tuple[str, ...]
    pool_size: int = 10


@dataclass(frozen=True)
class MeasureProfile:
    name: str
    low: float
    high: float
    decimals: int = 0


@dataclass(frozen=True)
class GenProfile:
    dimensions: tuple[DimensionProfile, ...]
    measures: tuple[MeasureProfile, ...]
    cells: int
    seed: int = 0
    fact_name: str = "Sales"

    def check(self) -> None:
        if not self.dimensions:
            raise InvalidProfileError("profile declares no dimensions")
        if not self.measures:
            raise InvalidProfileError("profile declares no measures")
        if self.cells < 0:
            raise InvalidProfileError("cell count must be >= 0")
        names = [d.name for d in self.dimensions]
        if len(set(names)) != len(names):
            raise InvalidProfileError("duplicate dimension names")
        if len({m.name for m in self.measures}) != len(self.measures):
            raise InvalidProfileError("duplicate measure names")
        for d in self.dimensions:
            if d.members < 1:
                raise InvalidProfileError(f"dimension {d.name!r} needs at least one member")
            if d.pool_size < 1:
                raise InvalidProfileError(f"dimension {d.name!r}: pool_size must be >= 1")
            if len(set(d.attributes)) != len(d.attributes):
                raise InvalidProfileError(f"dimension {d.name!r}: duplicate attribute names")
        for m in self.measures:
            if m.high < m.low:
                raise InvalidProfileError(f"measure {m.name!r}: high < low")
            if m.decimals < 0:
                raise InvalidProfileError(f"measure {m.name!r}: decimals must be >= 0")

    def scaled(self, factor: float) -> GenProfile:
        """Scale every count by ``factor``.

        Cells round down; member counts round up and never drop below one,
        so every dimension keeps a member to reference.
        """
        dims = tuple(replace(d, members=max(1, math.ceil(d.members * factor - 1e-9))) for d in self.dimensions)
        return replace(self, dimensions=dims, cells=math.floor(self.cells * factor + 1e-9))

    def with_size(self, cells: int) -> GenProfile:
        """Rescale the whole warehouse so it holds ``cells`` cells."""
        if self.cells <= 0:
            raise InvalidProfileError("cannot rescale a profile with zero cells")
        return replace(self.scaled(cells / self.cells), cells=cells)

    def with_seed(self, seed: int) -> GenProfile:
        return replace(self, seed=seed)


def table1_profile(seed: int = 0) -> GenProfile:
    dims = tuple(DimensionProfile(n, m, attrs) for n, m, attrs in TABLE1_DIMENSIONS)
    measures = (MeasureProfile("amount", 1.0, 1000.0, 2), MeasureProfile("quantity", 1, 100, 0))
    return GenProfile(dims, measures, TABLE1_CELLS, seed)


def uniform_profile(
    dimensions: int, members: int, attributes: int, cells: int, seed: int = 0, pool_size: int = 10
) -> GenProfile:
    """D dimensions with exactly ``members`` members and ``attributes`` attributes each."""
    dims = tuple(
        DimensionProfile(f"dim{i}", members, tuple(f"d{i}_attr{j}" for j in range(attributes)), pool_size)
        for i in range(dimensions)
    )
    return GenProfile(dims, (MeasureProfile("quantity", 1, 100, 0),), cells, seed)


def _member_prefix(name: str) -> str:
    return name[:1] or "m"


def _pool_value(dim: DimensionProfile, attr: str, k: int) -> str:
    if "city" in attr and k < len(CITIES):
        return CITIES[k]
    return f"{attr}_{k + 1}"


def _draw_measure(rng: random.Random, m: MeasureProfile) -> float:
    if m.decimals == 0:
        return float(rng.randint(math.ceil(m.low), math.floor(m.high)))
    return round(rng.uniform(m.low, m.high), m.decimals)


def generate(profile: GenProfile) -> Warehouse:
    """Build a warehouse from ``profile``; equal profiles give equal warehouses."""
    profile.check()
    rng = random.Random(profile.seed)
    schema = SchemaMeta(
        profile.fact_name,
        tuple(m.name for m in profile.measures),
        tuple(DimensionDef(d.name, d.attributes) for d in profile.dimensions),
    )
    dims: dict[str, tuple[DimensionMember, ...]] = {}
    ids: dict[str, list[str]] = {}
    for d in profile.dimensions:
        prefix = _member_prefix(d.name)
        members = []
        for i in range(d.members):
            attrs = []
            for j, attr in enumerate(d.attributes):
                if j == 0:
                    value = f"{attr}_{i + 1}"
                else:
                    value = _pool_value(d, attr, rng.randrange(d.pool_size))
                attrs.append((attr, value))
            members.append(DimensionMember(f"{prefix}{i + 1}", tuple(attrs)))
        dims[d.name] = tuple(members)
        ids[d.name] = [m.member_id for m in members]

    facts = []
    for _ in range(profile.cells):
        measures = tuple((m.name, _draw_measure(rng, m)) for m in profile.measures)
        refs = tuple((d.name, ids[d.name][rng.randrange(d.members)]) for d in profile.dimensions)
        facts.append(FactCell(measures, refs))
    return Warehouse(schema, dims, tuple(facts))


# ---------------------------------------------------------------------------
# profile files
# ---------------------------------------------------------------------------


def _number(text: str, what: str) -> float:
    try:
        return float(text)
    except ValueError:
        raise InvalidProfileError(f"{what}: expected a number, got {text!r}") from None


def _integer(text: str, what: str) -> int:
    try:
        return int(text.replace("_", ""))
    except ValueError:
        raise InvalidProfileError(f"{what}: expected an integer, got {text!r}") from None


def parse_profile(text: str, seed: int | None = None) -> GenProfile:
    """Parse a profile document.  ``seed`` overrides the file's seed."""
    parser = configparser.ConfigParser(interpolation=None)
    try:
        parser.read_string(text)
    except configparser.Error as exc:
        raise InvalidProfileError(str(exc).splitlines()[0]) from None
    if not parser.has_section("warehouse"):
        raise InvalidProfileError("missing [warehouse] section")
    wh = parser["warehouse"]
    dims, measures = [], []
    for section in parser.sections():
        kind, _, name = section.partition(" ")
        name = name.strip()
        body = parser[section]
        if kind == "warehouse":
            continue
        if not name:
            raise InvalidProfileError(f"section [{section}] needs a name")
        if kind == "dimension":
            attrs = tuple(a.strip() for a in body.get("attributes", "").split(",") if a.strip())
            dims.append(
                DimensionProfile(
                    name,
                    _integer(body.get("members", "1"), f"{section}.members"),
                    attrs,
                    _integer(body.get("pool_size", "10"), f"{section}.pool_size"),
                )
            )
        elif kind == "measure":
            measures.append(
                MeasureProfile(
                    name,
                    _number(body.get("low", "1"), f"{section}.low"),
                    _number(body.get("high", "100"), f"{section}.high"),
                    _integer(body.get("decimals", "0"), f"{section}.decimals"),
                )
            )
        else:
            raise InvalidProfileError(f"unknown section [{section}]")
    profile = GenProfile(
        tuple(dims),
        tuple(measures),
        _integer(wh.get("cells", "0"), "warehouse.cells"),
        _integer(wh.get("seed", "0"), "warehouse.seed") if seed is None else seed,
        wh.get("fact", "Sales"),
    )
    profile.check()
    return profile


def load_profile(path: str | Path, seed: int | None = None) -> GenProfile:
    return parse_profile(Path(path).read_text(encoding="utf-8"), seed)


def format_profile(profile: GenProfile) -> str:
    def num(x):
        return str(int(x)) if float(x).is_integer() else repr(float(x))

    lines = ["[warehouse]", f"fact = {profile.fact_name}", f"cells = {profile.cells}", f"seed = {profile.seed}", ""]
    for m in profile.measures:
        lines += [f"[measure {m.name}]", f"low = {num(m.low)}", f"high = {num(m.high)}", f"decimals = {m.decimals}", ""]
    for d in profile.dimensions:
        lines += [
            f"[dimension {d.name}]",
            f"members = {d.members}",
            f"attributes = {', '.join(d.attributes)}",
            f"pool_size = {d.pool_size}",
            "",
        ]
    return "\n".join(lines)
