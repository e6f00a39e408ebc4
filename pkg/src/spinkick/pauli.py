"""Pauli-string algebra for the open XY chain.

Strings are labelled site 1 (sender, leftmost) to site N (receiver).  Only the
commutators actually generated by the chain Hamiltonian are implemented: the
two-body XX / YY bond terms and the single-site Z field term.  Phases are never
stored on strings; commutators return a bare sign and the graph/generator
modules keep all sign bookkeeping on edges.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence, Tuple, Union

import numpy as np

PAULI_LABELS = ("I", "X", "Y", "Z")
CHANNELS = ("Jx", "Jy", "B")

# single-site products a*b -> (phase, c) with phase in {1, +i, -i}
_MULT = {
    ("I", "I"): (1, "I"), ("I", "X"): (1, "X"), ("I", "Y"): (1, "Y"), ("I", "Z"): (1, "Z"),
    ("X", "I"): (1, "X"), ("Y", "I"): (1, "Y"), ("Z", "I"): (1, "Z"),
    ("X", "X"): (1, "I"), ("Y", "Y"): (1, "I"), ("Z", "Z"): (1, "I"),
    ("X", "Y"): (1j, "Z"), ("Y", "X"): (-1j, "Z"),
    ("Y", "Z"): (1j, "X"), ("Z", "Y"): (-1j, "X"),
    ("Z", "X"): (1j, "Y"), ("X", "Z"): (-1j, "Y"),
}

_EIGENVECTORS = {
    ("Z", +1): np.array([1.0, 0.0], dtype=complex),
    ("Z", -1): np.array([0.0, 1.0], dtype=complex),
    ("X", +1): np.array([1.0, 1.0], dtype=complex) / np.sqrt(2.0),
    ("X", -1): np.array([1.0, -1.0], dtype=complex) / np.sqrt(2.0),
    ("Y", +1): np.array([1.0, 1.0j], dtype=complex) / np.sqrt(2.0),
    ("Y", -1): np.array([1.0, -1.0j], dtype=complex) / np.sqrt(2.0),
}


@dataclass(frozen=True)
class PauliString:
    """Tensor product of single-site Pauli/identity operators, by label only."""

    labels: Tuple[str, ...]

    def __post_init__(self):
        if len(self.labels) < 2:
            raise ValueError("Pauli strings need at least 2 sites")
        bad = [c for c in self.labels if c not in PAULI_LABELS]
        if bad:
            raise ValueError(f"invalid Pauli labels: {bad}")

    @classmethod
    def from_text(cls, text: str) -> "PauliString":
        return cls(tuple(text.upper()))

    @classmethod
    def single(cls, n_sites: int, site: int, op: str) -> "PauliString":
        """String with one non-identity operator at a 1-based site."""
        if not 1 <= site <= n_sites:
            raise ValueError(f"site {site} outside 1..{n_sites}")
        labels = ["I"] * n_sites
        labels[site - 1] = op
        return cls(tuple(labels))

    @property
    def n_sites(self) -> int:
        return len(self.labels)

    def op_at(self, site: int) -> str:
        """Operator label at a 1-based site."""
        return self.labels[site - 1]

    def __str__(self) -> str:
        return "".join(self.labels)


@dataclass(frozen=True)
class HamiltonianTerm:
    """One term of the chain Hamiltonian: XX or YY on a bond, or Z on a site.

    ``site`` is the bond index i (coupling sites i, i+1) for Jx/Jy and the
    site index for B, both 1-based.
    """

    channel: str
    site: int
    n_sites: int

    def __post_init__(self):
        if self.channel not in CHANNELS:
            raise ValueError(f"unknown channel {self.channel!r}")
        hi = self.n_sites - 1 if self.channel in ("Jx", "Jy") else self.n_sites
        if not 1 <= self.site <= hi:
            raise ValueError(f"{self.channel} site {self.site} outside 1..{hi}")

    def content(self) -> Tuple[Tuple[int, str], ...]:
        """(site, op) pairs of the term's Pauli content."""
        if self.channel == "Jx":
            return ((self.site, "X"), (self.site + 1, "X"))
        if self.channel == "Jy":
            return ((self.site, "Y"), (self.site + 1, "Y"))
        return ((self.site, "Z"),)


def chain_terms(n_sites: int, channels: Sequence[str] = CHANNELS):
    """All Hamiltonian terms of the requested channels for an N-site chain."""
    terms = []
    for ch in channels:
        if ch in ("Jx", "Jy"):
            terms.extend(HamiltonianTerm(ch, i, n_sites) for i in range(1, n_sites))
        else:
            terms.extend(HamiltonianTerm(ch, i, n_sites) for i in range(1, n_sites + 1))
    return terms


def commute_with_term(p: PauliString, term: HamiltonianTerm) -> Optional[Tuple[PauliString, int]]:
    """Commutator of a Hamiltonian term's Pauli content T with a string p.

    Returns (q, sign) such that [T, p] = 2i * sign * q, or None when the two
    commute.  The magnitude is always exactly 2 because T and p either commute
    or anticommute as whole operators.
    """
    if term.n_sites != p.n_sites:
        raise ValueError(f"term is for N={term.n_sites}, string has N={p.n_sites}")
    content = term.content()
    n_anti = sum(
        1 for site, op in content
        if p.op_at(site) != "I" and p.op_at(site) != op
    )
    if n_anti % 2 == 0:
        return None
    # [T,p] = Tp - pT = 2 Tp when T, p anticommute; site-wise product below
    phase = 1 + 0j
    labels = list(p.labels)
    for site, op in content:
        ph, c = _MULT[(op, p.op_at(site))]
        phase *= ph
        labels[site - 1] = c
    sign = int((phase / 1j).real)
    return PauliString(tuple(labels)), sign


class SiteAssignment:
    """Per-site pure states: X/Y/Z eigenstate specs or explicit 2-vectors.

    Eigenstate entries are (basis, sign) pairs like ('Z', +1).  Explicit
    entries are complex length-2 arrays, normalized on input.
    """

    def __init__(self, entries: Sequence[Union[Tuple[str, int], np.ndarray, Sequence[complex]]]):
        parsed = []
        for e in entries:
            if isinstance(e, tuple) and len(e) == 2 and isinstance(e[0], str):
                basis, sign = e[0].upper(), int(e[1])
                if basis not in ("X", "Y", "Z") or sign not in (-1, 1):
                    raise ValueError(f"bad eigenstate entry {e!r}")
                parsed.append((basis, sign))
            else:
                vec = np.asarray(e, dtype=complex).reshape(2)
                norm = np.linalg.norm(vec)
                if abs(norm - 1.0) > 1e-12:
                    if norm == 0:
                        raise ValueError("explicit site state has zero norm")
                    vec = vec / norm
                parsed.append(vec)
        self.entries = parsed

    @classmethod
    def parse(cls, text: str) -> "SiteAssignment":
        """Parse comma/whitespace separated tokens like 'X+,Z+,Z-,X-'.

        Aliases: 0 -> Z+, 1 -> Z-, + -> X+, - -> X-.
        """
        alias = {"0": ("Z", 1), "1": ("Z", -1), "+": ("X", 1), "-": ("X", -1)}
        entries = []
        for tok in text.replace(",", " ").split():
            t = tok.strip().upper()
            if t in alias:
                entries.append(alias[t])
            elif len(t) == 2 and t[0] in "XYZ" and t[1] in "+-":
                entries.append((t[0], 1 if t[1] == "+" else -1))
            else:
                raise ValueError(f"cannot parse site token {tok!r}")
        if not entries:
            raise ValueError("empty site assignment")
        return cls(entries)

    @classmethod
    def uniform(cls, n_sites: int, basis: str = "Z", sign: int = 1) -> "SiteAssignment":
        return cls([(basis, sign)] * n_sites)

    @property
    def n_sites(self) -> int:
        return len(self.entries)

    def is_eigenbasis(self) -> bool:
        return all(isinstance(e, tuple) for e in self.entries)

    def site_vector(self, site: int) -> np.ndarray:
        """Single-site state vector at a 1-based site."""
        e = self.entries[site - 1]
        if isinstance(e, tuple):
            return _EIGENVECTORS[e]
        return e

    def basis_at(self, site: int) -> Optional[str]:
        e = self.entries[site - 1]
        return e[0] if isinstance(e, tuple) else None

    def __str__(self) -> str:
        out = []
        for e in self.entries:
            if isinstance(e, tuple):
                out.append(f"{e[0]}{'+' if e[1] > 0 else '-'}")
            else:
                out.append("(explicit)")
        return ",".join(out)


def string_expectation(p: PauliString, assignment: SiteAssignment) -> int:
    """Expectation of a Pauli string in a product of X/Y/Z eigenstates.

    Product over sites of the single-site expectations: +-1 when the string's
    operator matches the assigned eigenbasis, 0 on any non-identity mismatch.
    """
    if assignment.n_sites != p.n_sites:
        raise ValueError(f"assignment has {assignment.n_sites} sites, string has {p.n_sites}")
    if not assignment.is_eigenbasis():
        raise ValueError("string_expectation needs eigenstate entries, not explicit vectors")
    value = 1
    for site in range(1, p.n_sites + 1):
        op = p.op_at(site)
        if op == "I":
            continue
        basis, sign = assignment.entries[site - 1]
        if op != basis:
            return 0
        value *= sign
    return value
