# src/tournament/serialization.py
import re
from pathlib import Path
from typing import Union

import numpy as np

from tournament.graph import ExplicitTournament, Tournament
from utils.errors import ParseError, UnsupportedStorageError

HEADER_RE = re.compile(r"^PTv1 ([1-9][0-9]*)$")


def serialize(tournament: Tournament) -> str:
    """
    Text form of an explicit tournament: a `PTv1 <n>` header, then row i
    (i = 0..n-2) holding n-1-i characters; column j > i is `1` iff i -> j.
    """
    if not isinstance(tournament, ExplicitTournament):
        raise UnsupportedStorageError("only explicit tournaments can be serialized; materialize it first")
    n = tournament.n
    bits = tournament.upper_bits()
    lines = [f"PTv1 {n}"]
    offset = 0
    for i in range(n - 1):
        width = n - 1 - i
        lines.append("".join("1" if b else "0" for b in bits[offset:offset + width]))
        offset += width
    return "\n".join(lines) + "\n"


def parse(text: str) -> ExplicitTournament:
    """
    Inverse of `serialize`.

    Raises:
        ParseError: With the 1-based line number of the first malformed line.
    """
    lines = text.split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    else:
        raise ParseError("tournament text must end with a newline", line=max(len(lines), 1))
    if not lines:
        raise ParseError("missing PTv1 header", line=1)
    header = HEADER_RE.match(lines[0])
    if header is None:
        raise ParseError(f"malformed header {lines[0]!r}, expected 'PTv1 <n>'", line=1)
    n = int(header.group(1))
    if len(lines) != n:
        raise ParseError(
            f"expected {n - 1} orientation rows, found {len(lines) - 1}",
            line=min(len(lines), n) + 1,
        )
    chunks = []
    for i in range(n - 1):
        row = lines[i + 1]
        lineno = i + 2
        if len(row) != n - 1 - i:
            raise ParseError(f"row {i} must have {n - 1 - i} characters, found {len(row)}", line=lineno)
        if row.strip("01"):
            raise ParseError(f"row {i} contains characters other than '0' and '1'", line=lineno)
        chunks.append(row)
    joined = "".join(chunks)
    bits = np.frombuffer(joined.encode("ascii"), dtype=np.uint8) == ord("1")
    return ExplicitTournament.from_upper_bits(n, bits)


def write_tournament(tournament: Tournament, path: Union[str, Path]) -> None:
    Path(path).write_text(serialize(tournament))


def read_tournament(path: Union[str, Path]) -> ExplicitTournament:
    return parse(Path(path).read_text())
