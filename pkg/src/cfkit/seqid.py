"""Fingerprinting integer sequences against an offline OEIS snapshot.

Guessing a closed form starts from the first few terms of A_n or B_n.  This
module extracts those terms (refusing to coerce non-integers), matches them
against a snapshot in the OEIS "stripped" distribution format, and emits the
query URL for the online search.  The bundled snapshot is a small curated
set of factorial- and continued-fraction-adjacent sequences; users with the
full OEIS dump can point ingest_stripped_file at it.

Matching is full-query only: every term of the query must line up with a
contiguous run of the stored sequence at some shift.  Partial or fuzzy
matches are deliberately not reported.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Iterable, Sequence

from .engine import Convergent, Side

MIN_QUERY_LENGTH = 4

_IDENTIFIER = re.compile(r"A\d{6}")
_LINE = re.compile(r"^(A\d{6}) ,((?:-?\d+,)+)$")


class SnapshotError(Exception):
    """The snapshot file is unreadable or contains no usable lines."""


class QueryError(ValueError):
    """The query sequence cannot be used for matching."""


class NonIntegerTermError(ValueError):
    """A convergent sequence contains a non-integer member."""

    def __init__(self, side: Side, index: int, value):
        super().__init__(
            f"{side.value}_{index} = {value} is not an integer; "
            "fingerprint the integerized equivalent form instead"
        )
        self.side = side
        self.index = index
        self.value = value


@dataclass(frozen=True)
class SequenceMatch:
    identifier: str
    shift: int  # query[i] == snapshot[i + shift]
    matched_length: int


@dataclass(frozen=True)
class SequenceSnapshot:
    """Identifier -> leading terms, plus a report of skipped input lines."""

    sequences: dict[str, tuple[int, ...]]
    malformed: tuple[tuple[int, str], ...] = field(default=(), compare=False)

    def __post_init__(self):
        for identifier, terms in self.sequences.items():
            if not _IDENTIFIER.fullmatch(identifier):
                raise SnapshotError(f"bad sequence identifier {identifier!r}")
            if not terms:
                raise SnapshotError(f"sequence {identifier} has no terms")

    def __len__(self) -> int:
        return len(self.sequences)

    def to_stripped(self) -> str:
        lines = [
            f"{identifier} ," + ",".join(str(t) for t in terms) + ","
            for identifier, terms in sorted(self.sequences.items())
        ]
        return "\n".join(lines) + "\n"


def ingest_stripped_text(text: str, source: str = "<text>") -> SequenceSnapshot:
    """Parse OEIS stripped-format content; skip and report malformed lines."""
    sequences: dict[str, tuple[int, ...]] = {}
    malformed: list[tuple[int, str]] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        m = _LINE.match(line)
        if not m:
            malformed.append((lineno, "not in stripped format"))
            continue
        identifier, body = m.group(1), m.group(2)
        if identifier in sequences:
            malformed.append((lineno, f"duplicate identifier {identifier}"))
            continue
        sequences[identifier] = tuple(int(t) for t in body.split(",") if t)
    if not sequences:
        raise SnapshotError(f"{source}: no parseable sequence lines")
    return SequenceSnapshot(sequences, tuple(malformed))


def ingest_stripped_file(path: str | Path) -> SequenceSnapshot:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise SnapshotError(f"cannot read snapshot {path}: {exc}") from exc
    return ingest_stripped_text(text, source=str(path))


def bundled_snapshot() -> SequenceSnapshot:
    """The snapshot shipped with the package (curated, offline)."""
    data = resources.files("cfkit").joinpath("data/oeis_snapshot.stripped")
    return ingest_stripped_text(data.read_text(encoding="utf-8"), source="bundled")


def extract_integer_sequence(
    convergent_list: Sequence[Convergent], side: Side
) -> list[int]:
    """Raw A or B values as integers; error on the first non-integer member."""
    if not convergent_list:
        raise QueryError("empty convergent list")
    out = []
    for conv in convergent_list:
        value = conv.A if side is Side.A else conv.B
        if value.denominator != 1:
            raise NonIntegerTermError(side, conv.n, value)
        out.append(value.numerator)
    return out


def lookup_local(
    query: Sequence[int], snapshot: SequenceSnapshot, max_shift: int = 8
) -> list[SequenceMatch]:
    """All full-length contiguous matches at shifts 0..max_shift."""
    if len(query) < MIN_QUERY_LENGTH:
        raise QueryError(
            f"query too short: {len(query)} terms, need >= {MIN_QUERY_LENGTH}"
        )
    if max_shift < 0:
        raise QueryError("max_shift must be >= 0")
    q = tuple(query)
    matches = []
    for identifier in sorted(snapshot.sequences):
        terms = snapshot.sequences[identifier]
        top = min(max_shift, len(terms) - len(q))
        for shift in range(0, top + 1):
            if terms[shift : shift + len(q)] == q:
                matches.append(SequenceMatch(identifier, shift, len(q)))
    return matches


def online_query_string(query: Iterable[int]) -> str:
    """The OEIS search URL for the given terms (no network access here)."""
    terms = list(query)
    if not terms:
        raise QueryError("empty query")
    joined = ",".join(str(t) for t in terms)
    return f"https://oeis.org/search?q={joined}&fmt=json"
