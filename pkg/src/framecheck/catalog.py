"""Frame catalog: load frame definitions and find lexical triggers in text.

The catalog is a human-editable YAML document shipping with the package
(see data/frame_catalog.yaml); an alternate path can be supplied anywhere
a catalog is loaded. Loaded catalogs are immutable.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

import yaml

from .model import Claim, FrameInstance, Span, check_frame_spans

REQUIRED_FRAMES = (
    "Occupy_rank",
    "Occupy_rank_via_superlatives",
    "Comparing_two_entities",
    "Comparing_at_two_different_points_in_time",
    "Cause_change_of_position_on_a_scale",
    "Capability",
    "Vote",
)

_LU_RE = re.compile(r"^(?P<lemma>[A-Za-z][A-Za-z'-]*)\.(?P<pos>v|n|a|adv)$")
_TOKEN_RE = re.compile(r"[A-Za-z][A-Za-z'-]*")


class CatalogError(ValueError):
    """The catalog file violates its schema."""


@dataclass(frozen=True)
class LexicalUnit:
    lemma: str
    pos: str  # v | n | a | adv


@dataclass(frozen=True)
class FrameDef:
    name: str
    definition: str
    elements: tuple[str, ...]
    lexical_units: tuple[LexicalUnit, ...]
    retrieval_elements: tuple[str, ...]
    aliases: tuple[str, ...] = ()


@dataclass(frozen=True)
class FrameCatalog:
    frames: dict[str, FrameDef]
    # lemma -> ((frame name, pos), ...) trigger index, built at load time
    _lu_index: dict[str, tuple[tuple[str, str], ...]] = field(default_factory=dict, repr=False)
    _alias_map: dict[str, str] = field(default_factory=dict, repr=False)

    def resolve_frame_name(self, name: str) -> str | None:
        """Canonical frame name for `name`, honoring aliases; None if unknown."""
        if name in self.frames:
            return name
        return self._alias_map.get(name)

    def validate_instance(self, claim: Claim, frame: FrameInstance) -> None:
        """Check a FrameInstance against the catalog and the claim text."""
        frame_def = self.frames.get(frame.frame_name)
        if frame_def is None:
            raise CatalogError(f"unknown frame {frame.frame_name!r}")
        for fe_name in frame.elements:
            if fe_name not in frame_def.elements:
                raise CatalogError(
                    f"FE {fe_name!r} not in inventory of frame {frame.frame_name!r}"
                )
        check_frame_spans(claim.text, frame)


def default_catalog_path() -> Path:
    return Path(str(resources.files("framecheck").joinpath("data/frame_catalog.yaml")))


def load_catalog(path: str | Path | None = None) -> FrameCatalog:
    """Load and validate a frame catalog; `path` defaults to the shipped catalog."""
    if path is None:
        path = default_catalog_path()
    with open(path, encoding="utf-8") as fh:
        raw = yaml.safe_load(fh)
    if not isinstance(raw, dict) or not isinstance(raw.get("frames"), dict):
        raise CatalogError(f"{path}: catalog must be a mapping with a 'frames' key")

    frames: dict[str, FrameDef] = {}
    for name, body in raw["frames"].items():
        if not isinstance(body, dict):
            raise CatalogError(f"frame {name!r}: body must be a mapping")
        elements = tuple(body.get("elements") or ())
        if not elements:
            raise CatalogError(f"frame {name!r}: 'elements' must be non-empty")
        if len(set(elements)) != len(elements):
            raise CatalogError(f"frame {name!r}: duplicate element names")
        retrieval = tuple(body.get("retrieval_elements") or ())
        if not retrieval:
            raise CatalogError(f"frame {name!r}: 'retrieval_elements' must be non-empty")
        missing = [fe for fe in retrieval if fe not in elements]
        if missing:
            raise CatalogError(f"frame {name!r}: retrieval elements {missing} not in inventory")
        lus = []
        for lu_raw in body.get("lexical_units") or ():
            m = _LU_RE.match(str(lu_raw))
            if m is None:
                raise CatalogError(f"frame {name!r}: bad lexical unit {lu_raw!r}")
            lus.append(LexicalUnit(lemma=m.group("lemma").lower(), pos=m.group("pos")))
        if not lus:
            raise CatalogError(f"frame {name!r}: 'lexical_units' must be non-empty")
        frames[name] = FrameDef(
            name=name,
            definition=str(body.get("definition", "")),
            elements=elements,
            lexical_units=tuple(lus),
            retrieval_elements=retrieval,
            aliases=tuple(body.get("aliases") or ()),
        )

    for required in REQUIRED_FRAMES:
        if required not in frames:
            raise CatalogError(f"catalog is missing required frame {required!r}")

    lu_index: dict[str, list[tuple[str, str]]] = {}
    alias_map: dict[str, str] = {}
    for frame_def in frames.values():
        for lu in frame_def.lexical_units:
            lu_index.setdefault(lu.lemma, []).append((frame_def.name, lu.pos))
        for alias in frame_def.aliases:
            if alias in frames or alias in alias_map:
                raise CatalogError(f"alias {alias!r} collides with an existing name")
            alias_map[alias] = frame_def.name

    return FrameCatalog(
        frames=frames,
        _lu_index={lemma: tuple(pairs) for lemma, pairs in lu_index.items()},
        _alias_map=alias_map,
    )


# --- lemmatization ----------------------------------------------------------
#
# Rule-table lemmatizer: only catalog lemmas need coverage, so candidates are
# generated by suffix stripping and checked against the trigger index. The POS
# constraint is inferred from the inflection (an -ed/-ing form can only realize
# a verb LU; a bare form matches any POS).

_IRREGULAR = {
    "could": ("can", ("v",)),
    "grew": ("grow", ("v",)),
    "grown": ("grow", ("v",)),
}


def _lemma_candidates(token: str):
    """Yield (candidate lemma, allowed POS set or None for any)."""
    yield token, None
    if token in _IRREGULAR:
        lemma, pos = _IRREGULAR[token]
        yield lemma, pos
    n = len(token)
    if token.endswith("ies") and n > 4:
        yield token[:-3] + "y", ("v", "n")
    if token.endswith("es") and n > 3:
        yield token[:-2], ("v", "n")
    if token.endswith("s") and not token.endswith("ss") and n > 2:
        yield token[:-1], ("v", "n")
    if token.endswith("ing") and n > 4:
        stem = token[:-3]
        yield stem, ("v",)
        yield stem + "e", ("v",)
        if len(stem) > 2 and stem[-1] == stem[-2]:
            yield stem[:-1], ("v",)
    if token.endswith("ed") and n > 3:
        stem = token[:-2]
        yield stem, ("v",)
        yield stem + "e", ("v",)
        if len(stem) > 2 and stem[-1] == stem[-2]:
            yield stem[:-1], ("v",)


def lexical_targets(
    catalog: FrameCatalog, text: str
) -> list[tuple[Span, tuple[str, ...]]]:
    """Every token whose lemma (plus inferred POS) matches a catalog lexical unit.

    Returns (span, candidate frame names) pairs sorted by span start; a token
    triggers each matching frame at most once.
    """
    out: list[tuple[Span, tuple[str, ...]]] = []
    for m in _TOKEN_RE.finditer(text):
        token = m.group(0).lower()
        hits: set[str] = set()
        for candidate, allowed_pos in _lemma_candidates(token):
            for frame_name, lu_pos in catalog._lu_index.get(candidate, ()):
                if allowed_pos is None or lu_pos in allowed_pos:
                    hits.add(frame_name)
        if hits:
            out.append((Span(m.start(), m.end()), tuple(sorted(hits))))
    return out
