"""Seeded synthetic homodyne runs: a calibration block of vacuum quadratures
followed by a signal block drawn from the efficiency mixture, both passed
through an affine detector map raw = scale * X + offset.

False trigger events ("dark counts") replace a fraction of signal draws with
vacuum draws.  Because the mixture family is linear in eta, a dark fraction d
is statistically identical to lowering the efficiency to eta * (1 - d); the
simulator still draws them event-by-event so datasets carry the effect at the
sample level.

Reproducibility: one integer seed is split with numpy's SeedSequence into two
independent PCG64 streams (vacuum block, signal block).  Each stream consumes,
in order: phase uniforms, dark-count uniforms (signal stream only), then one
quantile uniform per sample.
"""

from __future__ import annotations

import io
from dataclasses import dataclass, field
from typing import Iterator

import numpy as np

from .errors import DatasetFormatError, ValidationError
from .states import marginal_ppf

FORMAT_VERSION = 1
RNG_NAME = "numpy-pcg64"

SOURCE_VACUUM = "V"
SOURCE_FOCK = "F"

_TWO_PI = 2.0 * np.pi


@dataclass(frozen=True)
class DetectorModel:
    """Affine detector response with an optional false-trigger rate."""

    scale: float = 1.0
    offset: float = 0.0
    dark_fraction: float = 0.0

    def __post_init__(self) -> None:
        if not (np.isfinite(self.scale) and self.scale > 0.0):
            raise ValidationError(f"detector scale must be positive, got {self.scale}")
        if not np.isfinite(self.offset):
            raise ValidationError("detector offset must be finite")
        if not (0.0 <= self.dark_fraction < 1.0):
            raise ValidationError(
                f"dark_fraction must lie in [0, 1), got {self.dark_fraction}"
            )


@dataclass(frozen=True)
class QuadratureSample:
    """One recorded homodyne event."""

    raw_value: float
    phase: float
    source: str

    def __post_init__(self) -> None:
        if self.source not in (SOURCE_VACUUM, SOURCE_FOCK):
            raise ValidationError(f"source must be 'V' or 'F', got {self.source!r}")
        if not (0.0 <= self.phase < _TWO_PI):
            raise ValidationError(f"phase must lie in [0, 2*pi), got {self.phase}")


@dataclass(frozen=True)
class RunSpec:
    """Complete description of one synthetic run."""

    eta_true: float
    n_vacuum: int
    n_fock: int
    detector: DetectorModel = field(default_factory=DetectorModel)
    seed: int = 0

    def __post_init__(self) -> None:
        if not (0.0 <= self.eta_true <= 1.0):
            raise ValidationError(f"eta_true must lie in [0, 1], got {self.eta_true}")
        for name in ("n_vacuum", "n_fock"):
            n = getattr(self, name)
            if not isinstance(n, (int, np.integer)) or n < 0:
                raise ValidationError(f"{name} must be a non-negative integer, got {n!r}")
        if self.n_vacuum == 0 and self.n_fock == 0:
            raise ValidationError("run must contain at least one sample")
        if not isinstance(self.seed, (int, np.integer)) or self.seed < 0:
            raise ValidationError(f"seed must be a non-negative integer, got {self.seed!r}")


@dataclass
class HomodyneDataset:
    """Arrays for one run plus the RunSpec that produced it."""

    spec: RunSpec
    source: np.ndarray
    phase: np.ndarray
    raw_value: np.ndarray
    rng_name: str = RNG_NAME
    format_version: int = FORMAT_VERSION

    @property
    def vacuum_values(self) -> np.ndarray:
        return self.raw_value[self.source == SOURCE_VACUUM]

    @property
    def fock_values(self) -> np.ndarray:
        return self.raw_value[self.source == SOURCE_FOCK]

    @property
    def n_samples(self) -> int:
        return int(self.raw_value.size)

    def samples(self) -> Iterator[QuadratureSample]:
        for s, p, v in zip(self.source, self.phase, self.raw_value):
            yield QuadratureSample(raw_value=float(v), phase=float(p), source=str(s))


def sample_quadrature(eta, size, rng) -> np.ndarray:
    """Draw dimensionless quadratures from the efficiency mixture.

    `eta` may be a scalar or an array of per-event efficiencies of length
    `size` (pass size=None to take the shape from the array).  Consumes
    exactly one uniform per sample from `rng`.
    """
    eta = np.asarray(eta, dtype=float)
    if size is None:
        if eta.ndim == 0:
            raise ValidationError("size=None requires an array of per-event efficiencies")
        size = eta.shape[0]
    if size < 0:
        raise ValidationError(f"size must be non-negative, got {size}")
    u = rng.random(int(size))
    return np.asarray(marginal_ppf(eta, u))


def generate_run(spec: RunSpec) -> HomodyneDataset:
    """Generate a full run from its spec; deterministic in spec.seed."""
    seq_vacuum, seq_fock = np.random.SeedSequence(spec.seed).spawn(2)
    det = spec.detector

    rng_v = np.random.Generator(np.random.PCG64(seq_vacuum))
    phase_v = _TWO_PI * rng_v.random(spec.n_vacuum)
    x_v = sample_quadrature(0.0, spec.n_vacuum, rng_v)

    rng_f = np.random.Generator(np.random.PCG64(seq_fock))
    phase_f = _TWO_PI * rng_f.random(spec.n_fock)
    if det.dark_fraction > 0.0:
        dark = rng_f.random(spec.n_fock) < det.dark_fraction
        eta_events = np.where(dark, 0.0, spec.eta_true)
    else:
        eta_events = np.full(spec.n_fock, spec.eta_true)
    x_f = sample_quadrature(eta_events, spec.n_fock, rng_f)

    source = np.concatenate([
        np.full(spec.n_vacuum, SOURCE_VACUUM, dtype="U1"),
        np.full(spec.n_fock, SOURCE_FOCK, dtype="U1"),
    ])
    phase = np.concatenate([phase_v, phase_f])
    raw = det.scale * np.concatenate([x_v, x_f]) + det.offset
    return HomodyneDataset(spec=spec, source=source, phase=phase, raw_value=raw)


_HEADER_FLOAT_KEYS = ("eta_true", "scale", "offset", "dark_fraction")
_HEADER_INT_KEYS = ("format_version", "seed", "n_vacuum", "n_fock")


def write_dataset(dataset: HomodyneDataset, path) -> None:
    """Write a run as text: '# key=value' header lines, then one line per
    sample with fields 'source phase raw_value'."""
    spec = dataset.spec
    buf = io.StringIO()
    buf.write(f"# format_version={dataset.format_version}\n")
    buf.write(f"# rng={dataset.rng_name}\n")
    buf.write(f"# seed={spec.seed}\n")
    buf.write(f"# eta_true={spec.eta_true!r}\n")
    buf.write(f"# scale={spec.detector.scale!r}\n")
    buf.write(f"# offset={spec.detector.offset!r}\n")
    buf.write(f"# dark_fraction={spec.detector.dark_fraction!r}\n")
    buf.write(f"# n_vacuum={spec.n_vacuum}\n")
    buf.write(f"# n_fock={spec.n_fock}\n")
    for s, p, v in zip(dataset.source, dataset.phase, dataset.raw_value):
        buf.write(f"{s} {float(p)!r} {float(v)!r}\n")
    with open(path, "w") as fh:
        fh.write(buf.getvalue())


def read_dataset(path) -> HomodyneDataset:
    """Read a dataset written by write_dataset, validating header and body."""
    header: dict[str, str] = {}
    sources: list[str] = []
    phases: list[str] = []
    values: list[str] = []
    with open(path) as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            if line.startswith("#"):
                body = line[1:].strip()
                if "=" not in body:
                    raise DatasetFormatError(f"line {lineno}: malformed header line {line!r}")
                key, _, value = body.partition("=")
                header[key.strip()] = value.strip()
                continue
            parts = line.split()
            if len(parts) != 3:
                raise DatasetFormatError(
                    f"line {lineno}: expected 'source phase raw_value', got {line!r}"
                )
            if parts[0] not in (SOURCE_VACUUM, SOURCE_FOCK):
                raise DatasetFormatError(f"line {lineno}: unknown source {parts[0]!r}")
            sources.append(parts[0])
            phases.append(parts[1])
            values.append(parts[2])

    missing = [k for k in (*_HEADER_INT_KEYS, *_HEADER_FLOAT_KEYS, "rng") if k not in header]
    if missing:
        raise DatasetFormatError(f"header missing keys: {', '.join(missing)}")
    try:
        ints = {k: int(header[k]) for k in _HEADER_INT_KEYS}
        floats = {k: float(header[k]) for k in _HEADER_FLOAT_KEYS}
    except ValueError as exc:
        raise DatasetFormatError(f"unparseable header value: {exc}") from exc
    if ints["format_version"] != FORMAT_VERSION:
        raise DatasetFormatError(
            f"unsupported format_version {ints['format_version']}, expected {FORMAT_VERSION}"
        )

    try:
        phase = np.array(phases, dtype=float)
        raw = np.array(values, dtype=float)
    except ValueError as exc:
        raise DatasetFormatError(f"unparseable numeric field: {exc}") from exc
    source = np.array(sources, dtype="U1")
    if not np.all(np.isfinite(phase)) or not np.all(np.isfinite(raw)):
        raise DatasetFormatError("non-finite sample values")
    if np.any((phase < 0.0) | (phase >= _TWO_PI)):
        raise DatasetFormatError("phase outside [0, 2*pi)")

    n_v = int(np.sum(source == SOURCE_VACUUM))
    n_f = int(np.sum(source == SOURCE_FOCK))
    if n_v != ints["n_vacuum"] or n_f != ints["n_fock"]:
        raise DatasetFormatError(
            f"sample counts (V={n_v}, F={n_f}) disagree with header "
            f"(V={ints['n_vacuum']}, F={ints['n_fock']})"
        )

    spec = RunSpec(
        eta_true=floats["eta_true"],
        n_vacuum=ints["n_vacuum"],
        n_fock=ints["n_fock"],
        detector=DetectorModel(
            scale=floats["scale"],
            offset=floats["offset"],
            dark_fraction=floats["dark_fraction"],
        ),
        seed=ints["seed"],
    )
    return HomodyneDataset(
        spec=spec,
        source=source,
        phase=phase,
        raw_value=raw,
        rng_name=header["rng"],
        format_version=ints["format_version"],
    )
