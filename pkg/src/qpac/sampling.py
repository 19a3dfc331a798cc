"""Measurement distributions, training-set generation, and noise models.

Sampling is i.i.d. with replacement by default; the without-replacement
mode reproduces protocols phrased as "sets of measurement
configurations". All randomness flows through seeded numpy Generators
(PCG64), so every draw is reproducible from the recorded seed.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import StructureError
from .pauli import PauliString, ghz_generators, group_closure, xz_subset
from .states import DensityMatrix, MeasurementEffect, expectation

FULL_STABILIZER = "d1"  # uniform over all non-identity stabilizer effects
XZ_STABILIZER = "d2"    # uniform over the Y-free subset


@dataclass(frozen=True)
class NoiseModel:
    """How observed values relate to the exact expectations.

    kind "exact" reports Tr(E rho) itself; "shots" averages S Bernoulli
    outcomes; "gaussian" perturbs the exact value and clamps to [0, 1].
    """

    kind: str = "exact"
    shots: int = 0
    std: float = 0.0

    def __post_init__(self):
        if self.kind not in ("exact", "shots", "gaussian"):
            raise ValueError(f"unknown noise kind {self.kind!r}")
        if self.kind == "shots" and self.shots < 1:
            raise ValueError(f"shots must be >= 1, got {self.shots}")
        if self.kind == "gaussian" and self.std < 0:
            raise ValueError(f"gaussian std must be >= 0, got {self.std}")

    @classmethod
    def exact(cls) -> "NoiseModel":
        return cls("exact")

    @classmethod
    def with_shots(cls, shots: int) -> "NoiseModel":
        return cls("shots", shots=shots)

    @classmethod
    def gaussian(cls, std: float) -> "NoiseModel":
        return cls("gaussian", std=std)

    def describe(self) -> str:
        if self.kind == "shots":
            return f"shots({self.shots})"
        if self.kind == "gaussian":
            return f"gaussian({self.std})"
        return "exact"


@dataclass(frozen=True)
class MeasurementDistribution:
    """Uniform distribution over an ordered tuple of effects."""

    effects: tuple[MeasurementEffect, ...]
    label: str = "custom"

    def __post_init__(self):
        if not self.effects:
            raise StructureError("distribution support is empty")
        n = self.effects[0].n
        if any(e.n != n for e in self.effects):
            raise StructureError("support mixes qubit counts")
        if any(e.pauli.is_identity for e in self.effects):
            raise StructureError("identity effect is excluded from the support")
        if len(set(self.effects)) != len(self.effects):
            raise StructureError("duplicate effects in support")
        if self.label == FULL_STABILIZER and len(self.effects) != 2**n - 1:
            raise StructureError(
                f"{FULL_STABILIZER} support must have 2^n - 1 elements, got {len(self.effects)}"
            )
        if self.label == XZ_STABILIZER and len(self.effects) != 2 ** (n - 1):
            raise StructureError(
                f"{XZ_STABILIZER} support must have 2^(n-1) elements, got {len(self.effects)}"
            )

    @property
    def n(self) -> int:
        return self.effects[0].n

    def __len__(self) -> int:
        return len(self.effects)


def build_distribution(n: int, label: str) -> MeasurementDistribution:
    """The two GHZ learning distributions.

    "d1" is uniform over all 2^n - 1 non-identity stabilizer effects of
    GHZ_n; "d2" over the 2^(n-1) effects whose Pauli strings contain
    only I, X, Z factors. Both in canonical order.
    """
    if n < 2:
        raise ValueError(f"need n >= 2, got {n}")
    group = group_closure(ghz_generators(n))
    if label == FULL_STABILIZER:
        paulis = group.non_identity()
    elif label == XZ_STABILIZER:
        paulis = xz_subset(group)
    else:
        raise ValueError(f"unsupported distribution label {label!r}")
    return MeasurementDistribution(tuple(MeasurementEffect(p) for p in paulis), label)


def distribution_from_generators(
    generators: Sequence[PauliString], variant: str = "full"
) -> MeasurementDistribution:
    """Support selection for arbitrary stabilizer targets.

    variant "full": the whole group minus identity; "xz": the Y-free
    subset; "generators": the generator list only.
    """
    group = group_closure(generators)
    if variant == "full":
        paulis = group.non_identity()
    elif variant == "xz":
        paulis = xz_subset(group)
    elif variant == "generators":
        paulis = tuple(sorted(generators, key=PauliString.sort_key))
    else:
        raise ValueError(f"unknown support variant {variant!r}")
    if not paulis:
        raise StructureError(f"variant {variant!r} selected an empty support")
    return MeasurementDistribution(tuple(MeasurementEffect(p) for p in paulis), "custom")


@dataclass(frozen=True)
class TrainingSet:
    """Sampled (effect, observed value) pairs plus provenance."""

    items: tuple[tuple[MeasurementEffect, float], ...]
    noise: NoiseModel = field(default_factory=NoiseModel.exact)
    seed: object = None

    def __post_init__(self):
        if len(self.items) < 1:
            raise ValueError("training set must contain at least one item")
        for _, v in self.items:
            if not 0.0 <= v <= 1.0:
                raise ValueError(f"observed value {v} outside [0, 1]")

    def __len__(self) -> int:
        return len(self.items)

    @property
    def m(self) -> int:
        return len(self.items)

    def effects(self) -> tuple[MeasurementEffect, ...]:
        return tuple(e for e, _ in self.items)

    def values(self) -> np.ndarray:
        return np.array([v for _, v in self.items], dtype=float)

    def csv_rows(self):
        """Rows "pauli,value,provenance" for the CLI dump."""
        prov = self.noise.describe()
        return [f"{e.pauli},{v!r},{prov}" for e, v in self.items]


def _draw_indices(rng, size: int, m: int, replacement: bool) -> np.ndarray:
    if m < 1:
        raise ValueError(f"need m >= 1, got {m}")
    if replacement:
        return rng.integers(0, size, size=m)
    if m > size:
        raise ValueError(
            f"cannot draw {m} distinct effects from a support of {size}"
        )
    return rng.permutation(size)[:m]


def sample_training_set(
    dist: MeasurementDistribution,
    state: DensityMatrix,
    m: int,
    noise: NoiseModel | None = None,
    seed=0,
    replacement: bool = True,
) -> TrainingSet:
    """m uniform draws from the support with observed values per the
    noise model. Fully reproducible from the seed."""
    noise = noise or NoiseModel.exact()
    rng = np.random.default_rng(seed)
    idx = _draw_indices(rng, len(dist), m, replacement)
    items = []
    for i in idx:
        eff = dist.effects[int(i)]
        p = expectation(eff, state)
        if noise.kind == "exact":
            val = p
        elif noise.kind == "shots":
            val = float(rng.binomial(noise.shots, p)) / noise.shots
        else:
            val = float(np.clip(p + rng.normal(0.0, noise.std), 0.0, 1.0))
        items.append((eff, val))
    return TrainingSet(tuple(items), noise, seed)


def per_shot_outcomes(
    dist: MeasurementDistribution,
    state: DensityMatrix,
    m_prime: int,
    shots: int,
    seed=0,
    replacement: bool = True,
):
    """Raw Bernoulli outcomes grouped per sampled effect.

    Returns a list of (effect, bits) with bits a uint8 array of length
    ``shots``; each bit is 1 with probability Tr(E rho).
    """
    if shots < 1:
        raise ValueError(f"need shots >= 1, got {shots}")
    rng = np.random.default_rng(seed)
    idx = _draw_indices(rng, len(dist), m_prime, replacement)
    out = []
    for i in idx:
        eff = dist.effects[int(i)]
        p = expectation(eff, state)
        bits = (rng.random(shots) < p).astype(np.uint8)
        out.append((eff, bits))
    return out
