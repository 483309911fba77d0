"""Canonical spellings for clinical measurement units.

Free text writes the same unit many ways ("kg/m2", "kg per m2", "mm Hg").
The table below maps lowercase surface variants to one canonical form; the
canonical set covers the units that routinely appear in trial eligibility
text.  Knowledge-base files may extend the table with their own variants.
"""

from __future__ import annotations

# canonical form -> accepted lowercase surface variants (the canonical
# form's own lowercase spelling is always accepted)
_CANONICAL_VARIANTS: dict[str, tuple[str, ...]] = {
    "mmHg": ("mm hg", "mm/hg", "millimeters of mercury"),
    "kg/m^2": ("kg/m2", "kg per m2", "kg per m^2", "kg/m²", "kg per square meter"),
    "kg": ("kilogram", "kilograms", "kgs"),
    "g": ("gram", "grams"),
    "mg": ("milligram", "milligrams"),
    "mcg": ("microgram", "micrograms", "µg", "ug"),
    "mg/dL": ("mg per dl", "mg/100ml"),
    "mg/L": ("mg per l", "mg per liter"),
    "g/dL": ("g per dl",),
    "g/L": ("g per l",),
    "ng/mL": ("ng per ml",),
    "mcg/mL": ("µg/ml", "ug/ml", "mcg per ml"),
    "mmol/L": ("mmol per l", "millimoles per liter"),
    "mol/L": ("mol per l",),
    "mEq/L": ("meq per l",),
    "IU/L": ("iu per l",),
    "U/L": ("u per l", "units per liter"),
    "%": ("percent", "per cent", "pct"),
    "bpm": ("beats per minute", "beats/min", "beats/minute"),
    "mL": ("milliliter", "milliliters", "cc"),
    "L": ("liter", "liters", "litre", "litres"),
    "mL/min": ("ml per min", "ml per minute"),
    "cm": ("centimeter", "centimeters"),
    "mm": ("millimeter", "millimeters"),
    "m": ("meter", "meters"),
    "day": ("days", "d"),
    "week": ("weeks", "wk", "wks"),
    "month": ("months", "mo", "mos"),
    "year": ("years", "yr", "yrs"),
    "hour": ("hours", "hr", "hrs", "h"),
    "minute": ("minutes", "min", "mins"),
}


def _build_table() -> dict[str, str]:
    table: dict[str, str] = {}
    for canonical, variants in _CANONICAL_VARIANTS.items():
        table[canonical.lower()] = canonical
        for variant in variants:
            table[variant] = canonical
    return table


DEFAULT_UNIT_TABLE: dict[str, str] = _build_table()


def _key(surface: str) -> str:
    return " ".join(surface.split()).lower()


def normalize_unit(surface: str, extra: dict[str, str] | None = None) -> str | None:
    """Map a unit surface form to its canonical spelling.

    Returns ``None`` when the surface is not a known unit.  ``extra`` holds
    additional lowercase variant -> canonical pairs (e.g. from a loaded
    knowledge base) consulted before the built-in table.
    """

    key = _key(surface)
    if not key:
        return None
    if extra:
        hit = extra.get(key)
        if hit is not None:
            return hit
    return DEFAULT_UNIT_TABLE.get(key)


def is_known_unit(surface: str, extra: dict[str, str] | None = None) -> bool:
    return normalize_unit(surface, extra) is not None
