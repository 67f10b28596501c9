"""Scattering channel identifiers.

A 1D symmetric potential splits into an antisymmetric channel
(psi(0) = 0) and a symmetric channel (psi'(0) = 0); a central potential
in 3D splits into partial waves labelled by ell.  All higher-level
operations take a ``Channel`` so that phase tables, bound-state sets and
sum-rule reports can be keyed uniformly.
"""

from __future__ import annotations

from dataclasses import dataclass

ANTISYMMETRIC = "antisymmetric"
SYMMETRIC = "symmetric"
PARTIAL_WAVE = "partial_wave"


@dataclass(frozen=True)
class Channel:
    kind: str
    ell: int | None = None

    def __post_init__(self):
        if self.kind not in (ANTISYMMETRIC, SYMMETRIC, PARTIAL_WAVE):
            raise ValueError(f"unknown channel kind {self.kind!r}")
        if self.kind == PARTIAL_WAVE:
            if self.ell is None or self.ell < 0:
                raise ValueError("partial wave channel needs ell >= 0")
        elif self.ell is not None:
            raise ValueError(f"{self.kind} channel takes no ell")

    @property
    def is_1d(self) -> bool:
        return self.kind != PARTIAL_WAVE

    @property
    def label(self) -> str:
        """Short name used in file names and CSV columns."""
        if self.kind == PARTIAL_WAVE:
            return f"ell{self.ell}"
        return self.kind

    def __str__(self) -> str:
        return self.label

    @classmethod
    def parse(cls, text: str) -> "Channel":
        text = text.strip().lower()
        if text in (ANTISYMMETRIC, "antisym", "odd"):
            return ANTISYM
        if text in (SYMMETRIC, "sym", "even"):
            return SYM
        if text.startswith("ell"):
            return cls(PARTIAL_WAVE, ell=int(text[3:]))
        if text.startswith("l") and text[1:].isdigit():
            return cls(PARTIAL_WAVE, ell=int(text[1:]))
        raise ValueError(f"cannot parse channel {text!r}")


ANTISYM = Channel(ANTISYMMETRIC)
SYM = Channel(SYMMETRIC)


def partial_wave(ell: int) -> Channel:
    return Channel(PARTIAL_WAVE, ell=ell)
