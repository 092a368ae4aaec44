from __future__ import annotations

from typing import Any

from .base import LorenzMap
from .iterated import IteratedMapDescriptor
from .restricted import RestrictedMap
from .standard import StandardFamilyMap


def format_float(value: float) -> str:
    return format(value, ".17g")


def _standard_lines(lmap: StandardFamilyMap, prefix: str = "") -> list[str]:
    return [
        f"{prefix}family=standard",
        f"{prefix}u={format_float(lmap.u)}",
        f"{prefix}v={format_float(lmap.v)}",
        f"{prefix}c={format_float(lmap.c)}",
        f"{prefix}alpha={format_float(lmap.alpha)}",
    ]


def _lines(lmap: LorenzMap, prefix: str = "") -> list[str]:
    if isinstance(lmap, StandardFamilyMap):
        return _standard_lines(lmap, prefix)
    if isinstance(lmap, RestrictedMap):
        return [
            f"{prefix}family=restricted",
            f"{prefix}margin={format_float(lmap.margin)}",
            *_standard_lines(lmap.base, prefix + "base."),
        ]
    if isinstance(lmap, IteratedMapDescriptor):
        return [
            f"{prefix}family=iterated",
            f"{prefix}depth={lmap.depth}",
            f"{prefix}window.p={format_float(lmap.window[0])}",
            f"{prefix}window.q={format_float(lmap.window[1])}",
            f"{prefix}left_time={lmap.left_time}",
            f"{prefix}right_time={lmap.right_time}",
            f"{prefix}left_word={lmap.left_word}",
            f"{prefix}right_word={lmap.right_word}",
            *_lines(lmap.base, prefix + "base."),
        ]
    raise TypeError(f"cannot serialize {type(lmap).__name__}")


def dump_map(lmap: LorenzMap) -> str:
    return "\n".join(_lines(lmap)) + "\n"


def _parse_block(text: str) -> dict[str, str]:
    entries: dict[str, str] = {}
    for raw in text.splitlines():
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        key, sep, value = line.partition("=")
        if not sep:
            raise ValueError(f"malformed map line: {raw!r}")
        entries[key.strip()] = value.strip()
    return entries


def _build(entries: dict[str, str], prefix: str = "") -> LorenzMap:
    def get(key: str) -> str:
        try:
            return entries[prefix + key]
        except KeyError as exc:
            raise ValueError(f"missing key {prefix + key!r}") from exc

    family = get("family")
    if family == "standard":
        return StandardFamilyMap(u=float(get("u")), v=float(get("v")), c=float(get("c")), alpha=float(get("alpha")))
    base: Any = _build(entries, prefix + "base.") if family in {"restricted", "iterated"} else None
    if family == "restricted":
        return RestrictedMap(base=base, margin=float(get("margin")))
    if family == "iterated":
        descriptor = IteratedMapDescriptor(
            base=base,
            window=(float(get("window.p")), float(get("window.q"))),
            left_word=get("left_word"),
            right_word=get("right_word"),
            depth=int(get("depth")),
        )
        if descriptor.left_time != int(get("left_time")) or descriptor.right_time != int(get("right_time")):
            raise ValueError("return times disagree with the stored words")
        return descriptor
    raise ValueError(f"unknown map family {family!r}")


def load_map(text: str) -> LorenzMap:
    return _build(_parse_block(text))
