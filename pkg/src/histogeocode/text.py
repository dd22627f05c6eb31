"""Address text handling: normalization, trigram distance, building numbers.

Normalization is deliberately flat — no structured address fields — so a
query like "Eiffel Tower, Paris" works the same way as a postal address.
The pipeline: lowercase, fold accents to ASCII, turn punctuation (except
hyphens) into spaces, expand known abbreviations token by token, collapse
whitespace.  The building number is the leading integer token, kept in the
text so it also contributes to the trigram distance.

Trigram semantics follow the usual inverted-index convention: each word is
padded with two leading spaces and one trailing space and every contiguous
3-character window is emitted; similarity is Jaccard over the union of the
word sets, distance is one minus that.
"""

from __future__ import annotations

import re
import unicodedata
from dataclasses import dataclass

# Default abbreviation table for French street addresses; keys are matched
# against whole tokens after trailing dots are stripped.
DEFAULT_ABBREVIATIONS: dict[str, str] = {
    "r": "rue",
    "bd": "boulevard",
    "boul": "boulevard",
    "av": "avenue",
    "pl": "place",
    "st": "saint",
    "ste": "sainte",
    "fg": "faubourg",
    "faub": "faubourg",
}

_TOKEN_KEEP = re.compile(r"[^a-z0-9\- ]+")
_LEADING_INT = re.compile(r"(\d+)")
_WORD = re.compile(r"[a-z0-9]+")


class AbbreviationTableError(ValueError):
    pass


@dataclass(frozen=True)
class NormalizedAddress:
    normalized: str
    building_number: int | None


def _check_table(table: dict[str, str]) -> dict[str, str]:
    """Strip trailing dots from keys and reject tables that would break
    normalize idempotence (expansions must be fixed points)."""
    cleaned: dict[str, str] = {}
    for key, expansion in table.items():
        k = key.lower().rstrip(".")
        if not k:
            raise AbbreviationTableError(f"empty abbreviation key: {key!r}")
        cleaned[k] = expansion.lower()
    for key, expansion in cleaned.items():
        if _TOKEN_KEEP.search(expansion):
            raise AbbreviationTableError(
                f"expansion for {key!r} contains punctuation/accents: {expansion!r}"
            )
        for word in expansion.split():
            if word in cleaned and cleaned[word] != word:
                raise AbbreviationTableError(
                    f"expansion word {word!r} (from {key!r}) is itself abbreviated; "
                    "this would break normalize idempotence"
                )
    return cleaned


_DEFAULT_CHECKED = _check_table(DEFAULT_ABBREVIATIONS)


def load_abbreviations(path) -> dict[str, str]:
    """Read an abbreviation table: one "abbrev=expansion" per line, '#'
    comments and blank lines ignored."""
    table: dict[str, str] = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise AbbreviationTableError(f"{path}:{lineno}: expected abbrev=expansion")
            key, _, expansion = line.partition("=")
            table[key.strip()] = expansion.strip()
    return _check_table(table)


def _fold(raw: str) -> str:
    decomposed = unicodedata.normalize("NFKD", raw.lower())
    return decomposed.encode("ascii", "ignore").decode("ascii")


def normalize(raw: str, abbreviations: dict[str, str] | None = None) -> NormalizedAddress:
    """Normalize an address string; idempotent by construction."""
    table = _DEFAULT_CHECKED if abbreviations is None else abbreviations
    text = _TOKEN_KEEP.sub(" ", _fold(raw))
    tokens = []
    for token in text.split():
        if not _WORD.search(token):
            continue  # hyphen-only debris
        tokens.append(table.get(token, token))
    normalized = " ".join(tokens)
    m = _LEADING_INT.match(normalized)
    number = int(m.group(1)) if m else None
    return NormalizedAddress(normalized, number)


def trigram_set(s: str) -> frozenset[str]:
    """Padded 3-grams over each alphanumeric word of the lowercased string."""
    grams: set[str] = set()
    for word in _WORD.findall(s.lower()):
        padded = "  " + word + " "
        for i in range(len(padded) - 2):
            grams.add(padded[i : i + 3])
    return frozenset(grams)


def string_distance(s1: str, s2: str) -> float:
    """1 - Jaccard similarity of the trigram sets, in [0, 1]."""
    t1 = trigram_set(s1)
    t2 = trigram_set(s2)
    if not t1 and not t2:
        return 0.0
    if not t1 or not t2:
        return 1.0
    shared = len(t1 & t2)
    union = len(t1) + len(t2) - shared
    return 1.0 - shared / union


def building_number_distance(b_i: int, b_d: int) -> float:
    """|b_d - b_i| when both numbers share parity, else |b_d - b_i| + 10.

    In French numbering, sides of a street carry one parity each; crossing
    parity means crossing the street, penalized as a 10-number difference.
    """
    if b_i < 0 or b_d < 0:
        raise ValueError("building numbers must be nonnegative")
    diff = abs(b_d - b_i)
    if (b_i - b_d) % 2 == 0:
        return float(diff)
    return float(diff + 10)
