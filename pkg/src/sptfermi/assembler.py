"""End-to-end harmonic-order energies, sweeps over N and reference comparison."""

from __future__ import annotations

import csv
import hashlib
import json
import logging
import math
import os
import time
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np
from filelock import FileLock

from .core import CONVENTIONS_VERSION, EnergyResult, SystemSpec, build_scaling_frame, unscale_energy
from .geometry import SymmetricMinimum, find_symmetric_minimum
from .interaction import SquareWellContinued, unitary_well
from .pauli import OccupancyState, ground_configurations, mode_energy, select_ground_occupancy
from .spectrum import MODE_LABELS, NormalModeSpectrum, OracleMismatch, solve_normal_modes

logger = logging.getLogger(__name__)

CACHE_ENV = "SPTFERMI_CACHE_DIR"


class PipelineError(RuntimeError):
    """A pipeline stage failed; ``stage`` names it."""

    def __init__(self, stage: str, message: str):
        super().__init__(f"[{stage}] {message}")
        self.stage = stage


# --------------------------------------------------------------------------
# building-block cache


@dataclass(frozen=True)
class CacheEntry:
    key: str
    minimum: SymmetricMinimum
    spectrum: NormalModeSpectrum
    created_at: float

    def as_dict(self) -> dict:
        return {"key": self.key, "conventions": CONVENTIONS_VERSION,
                "created_at": self.created_at, "minimum": self.minimum.as_dict(),
                "spectrum": self.spectrum.as_dict()}

    @classmethod
    def from_dict(cls, data) -> "CacheEntry":
        return cls(data["key"], SymmetricMinimum.from_dict(data["minimum"]),
                   NormalModeSpectrum.from_dict(data["spectrum"]), float(data["created_at"]))


def cache_key(spec: SystemSpec) -> str:
    payload = {"interaction": spec.interaction.fingerprint(), "n_up": spec.n_up,
               "n_down": spec.n_down, "conventions": CONVENTIONS_VERSION}
    text = json.dumps(payload, sort_keys=True)
    return hashlib.sha256(text.encode()).hexdigest()[:24]


class BuildingBlockCache:
    """Minimum and normal-mode spectrum per (interaction, N), kept in memory
    and optionally as one JSON file per key under ``directory``."""

    def __init__(self, directory=None):
        self.directory = Path(directory) if directory is not None else None
        self._memory: dict[str, CacheEntry] = {}
        self.hits = 0
        self.misses = 0
        if self.directory is not None:
            self.directory.mkdir(parents=True, exist_ok=True)

    @classmethod
    def from_env(cls) -> "BuildingBlockCache":
        return cls(os.environ.get(CACHE_ENV))

    def _path(self, key: str) -> Path:
        return self.directory / f"{key}.json"

    def get(self, key: str) -> CacheEntry | None:
        entry = self._memory.get(key)
        if entry is None and self.directory is not None and self._path(key).exists():
            data = json.loads(self._path(key).read_text())
            if data.get("conventions") == CONVENTIONS_VERSION:
                entry = CacheEntry.from_dict(data)
                self._memory[key] = entry
        if entry is None:
            self.misses += 1
        else:
            self.hits += 1
        return entry

    def put(self, entry: CacheEntry) -> None:
        self._memory[entry.key] = entry
        if self.directory is None:
            return
        path = self._path(entry.key)
        with FileLock(str(path) + ".lock"):
            tmp = path.with_suffix(".tmp")
            tmp.write_text(json.dumps(entry.as_dict(), indent=1, sort_keys=True))
            tmp.replace(path)

    def entries(self) -> list[CacheEntry]:
        keys = set(self._memory)
        if self.directory is not None:
            keys |= {p.stem for p in self.directory.glob("*.json")}
        return [e for e in (self.get(k) for k in sorted(keys)) if e is not None]

    def clear(self) -> int:
        count = len(self._memory)
        self._memory.clear()
        if self.directory is not None:
            files = list(self.directory.glob("*.json"))
            count = max(count, len(files))
            for p in files + list(self.directory.glob("*.lock")):
                p.unlink(missing_ok=True)
        return count


# --------------------------------------------------------------------------
# assembly


def assemble_energy(minimum: SymmetricMinimum, spectrum: NormalModeSpectrum,
                    occupancy: OccupancyState, frame, configuration=None) -> EnergyResult:
    """Ebar = Ebar_inf + delta [sum_mu (n_mu + d_mu/2) omega_mu + v0], then unscaled."""
    if spectrum.n_particles != minimum.n_particles:
        raise ValueError(f"spectrum is for N={spectrum.n_particles}, "
                         f"minimum for N={minimum.n_particles}")
    for m in MODE_LABELS:
        if occupancy[m] and spectrum.multiplicity[m] == 0:
            raise ValueError(f"mode {m} does not exist for N={spectrum.n_particles}")
    delta = frame.delta
    breakdown = {}
    for m in MODE_LABELS:
        if spectrum.multiplicity[m] > 0:
            breakdown[m] = delta * (occupancy[m] + 0.5 * spectrum.multiplicity[m]) * spectrum.omega[m]
    breakdown["v0"] = delta * spectrum.v0
    harmonic = delta * mode_energy(occupancy, spectrum)
    total = unscale_energy(minimum.e_infinity + harmonic, frame)
    return EnergyResult(
        n_particles=minimum.n_particles,
        dimension=frame.dimension,
        e_infinity_scaled=minimum.e_infinity,
        harmonic_term_scaled=harmonic,
        total_unscaled=total,
        breakdown=breakdown,
        occupancy=occupancy.counts,
        radial_sum=configuration.radial_sum if configuration is not None else 0,
        angular_sum=configuration.angular_sum if configuration is not None else 0,
    )


def building_blocks(spec: SystemSpec, cache: BuildingBlockCache | None = None,
                    oracle_check: bool = False) -> tuple[SymmetricMinimum, NormalModeSpectrum]:
    """Minimum and normal-mode spectrum, served from ``cache`` when present."""
    key = cache_key(spec)
    if cache is not None and not oracle_check:
        entry = cache.get(key)
        if entry is not None:
            return entry.minimum, entry.spectrum
    model = spec.interaction
    try:
        minimum = find_symmetric_minimum(model, spec)
    except Exception as exc:
        raise PipelineError("minimize", str(exc)) from exc
    try:
        _, spectrum = solve_normal_modes(minimum, model, spec, oracle_check=oracle_check)
    except OracleMismatch as exc:
        raise PipelineError("oracle-check", str(exc)) from exc
    except Exception as exc:
        raise PipelineError("modes", str(exc)) from exc
    if cache is not None:
        cache.put(CacheEntry(key, minimum, spectrum, time.time()))
    return minimum, spectrum


def run_pipeline(spec: SystemSpec, cache: BuildingBlockCache | None = None, *,
                 reference: str = "fermion", oracle_check: bool = False) -> EnergyResult:
    """Harmonic-order energy of ``spec`` at its target dimension.

    ``reference="boson"`` leaves every normal mode empty instead of applying
    the Pauli occupation rules.
    """
    minimum, spectrum = building_blocks(spec, cache, oracle_check)
    frame = build_scaling_frame(spec.dimension_target, spec.trap_frequency)
    if reference == "boson":
        occupancy, config = OccupancyState((0, 0, 0, 0, 0)), None
    elif reference == "fermion":
        try:
            configs = ground_configurations(spec.n_up, spec.n_down)
            occupancy, config = select_ground_occupancy(configs, spectrum)
        except Exception as exc:
            raise PipelineError("pauli", str(exc)) from exc
    else:
        raise ValueError(f"unknown reference {reference!r}")
    return assemble_energy(minimum, spectrum, occupancy, frame, config)


# --------------------------------------------------------------------------
# sweeps


@dataclass
class SweepTable:
    rows: list[tuple[int, EnergyResult]]
    failures: dict = field(default_factory=dict)

    @property
    def n_values(self) -> list[int]:
        return [n for n, _ in self.rows]

    @property
    def energies(self) -> np.ndarray:
        return np.array([r.total_unscaled for _, r in self.rows])

    def first_differences(self) -> list[tuple[int, float]]:
        """(N, E(N) - E(N-1)) for consecutive particle numbers present in the table."""
        e = dict((n, r.total_unscaled) for n, r in self.rows)
        return [(n, e[n] - e[n - 1]) for n in sorted(e) if n - 1 in e]

    def staggering(self) -> dict:
        """Odd/even diagnostics of the first differences.

        ``alternation`` is the fraction of consecutive second differences that
        change sign; ``odd_minus_even`` is the mean first difference onto odd N
        minus the mean onto even N.
        """
        diffs = self.first_differences()
        if len(diffs) < 3:
            return {"alternation": math.nan, "odd_minus_even": math.nan}
        values = np.array([d for _, d in diffs])
        second = np.diff(values)
        flips = np.sum(np.sign(second[1:]) * np.sign(second[:-1]) < 0)
        odd = [d for n, d in diffs if n % 2]
        even = [d for n, d in diffs if n % 2 == 0]
        return {"alternation": float(flips / max(1, len(second) - 1)),
                "odd_minus_even": float(np.mean(odd) - np.mean(even)) if odd and even else math.nan}

    def monotone_increasing(self) -> bool:
        return bool(np.all(np.diff(self.energies) > 0))

    def as_records(self) -> list[dict]:
        diffs = dict(self.first_differences())
        out = []
        for n, r in self.rows:
            out.append({"N": n, "E": r.total_unscaled, "E_inf_scaled": r.e_infinity_scaled,
                        "harmonic_scaled": r.harmonic_term_scaled,
                        "occupancy": " ".join(str(c) for c in r.occupancy),
                        "dE": diffs.get(n, math.nan)})
        return out


def _spec_for(template: SystemSpec, n: int) -> SystemSpec:
    return SystemSpec.balanced(n, template.interaction, trap_frequency=template.trap_frequency,
                               dimension_target=template.dimension_target)


def sweep(template: SystemSpec, n_list, cache: BuildingBlockCache | None = None,
          *, reference: str = "fermion", oracle_check: bool = False) -> SweepTable:
    """Run the pipeline for each N (balanced spins); failures are recorded, not raised."""
    n_list = sorted(set(int(n) for n in n_list))
    if not n_list:
        raise ValueError("empty particle-number list")
    rows, failures = [], {}
    for n in n_list:
        try:
            rows.append((n, run_pipeline(_spec_for(template, n), cache,
                                         reference=reference, oracle_check=oracle_check)))
        except Exception as exc:
            logger.warning("N=%d failed: %s", n, exc)
            failures[n] = str(exc)
    return SweepTable(rows, failures)


# --------------------------------------------------------------------------
# zero-range extrapolation


@dataclass(frozen=True)
class ExtrapolationResult:
    e_zero_range: float
    slope: float
    residual: float
    degree: int
    ranges: tuple[float, ...]
    energies: tuple[float, ...]
    monotone: bool


def fit_zero_range(ranges, energies, tol: float = 1e-8) -> ExtrapolationResult:
    """Least-squares fit E(R) = E0 + c R, quadratic if the linear residual exceeds ``tol``."""
    r = np.asarray(ranges, dtype=float)
    e = np.asarray(energies, dtype=float)
    if r.size < 3:
        raise ValueError("at least three ranges are needed")
    order = np.argsort(r)
    de = np.diff(e[order])
    monotone = bool(np.all(de >= 0) or np.all(de <= 0))
    if not monotone:
        logger.warning("E(R) is not monotone in R")
    degree = 1
    coef, res, *_ = np.linalg.lstsq(np.vander(r, 2), e, rcond=None)
    residual = float(np.sqrt(res[0])) if res.size else 0.0
    if residual > tol and r.size >= 4:
        degree = 2
        coef2, res2, *_ = np.linalg.lstsq(np.vander(r, 3), e, rcond=None)
        coef = coef2[1:]
        residual = float(np.sqrt(res2[0])) if res2.size else 0.0
    return ExtrapolationResult(float(coef[-1]), float(coef[-2]), residual, degree,
                               tuple(r.tolist()), tuple(e.tolist()), monotone)


def extrapolate_zero_range(template: SystemSpec, r_list, cache: BuildingBlockCache | None = None,
                           **kwargs) -> ExtrapolationResult:
    """Energies for unitary wells of each range in ``r_list``, fitted to R -> 0.

    A non-square-well template keeps its interaction (the range is then irrelevant).
    """
    energies = []
    for radius in r_list:
        if isinstance(template.interaction, SquareWellContinued) or template.interaction is None:
            spec = replace(template, interaction=unitary_well(radius))
        else:
            spec = template
        energies.append(run_pipeline(spec, cache, **kwargs).total_unscaled)
    return fit_zero_range(r_list, energies)


# --------------------------------------------------------------------------
# reference data


@dataclass(frozen=True)
class BenchmarkRecord:
    n_particles: int
    energy_ref: float
    uncertainty: float
    source_label: str

    def __post_init__(self):
        if self.uncertainty < 0:
            raise ValueError("uncertainty must be non-negative")
        if self.n_particles < 2:
            raise ValueError("n_particles must be >= 2")


def read_references(path) -> list[BenchmarkRecord]:
    """Reference CSV with columns N, E_ref, sigma, source."""
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        missing = {"N", "E_ref", "sigma", "source"} - set(reader.fieldnames or [])
        if missing:
            raise ValueError(f"{path}: missing columns {sorted(missing)}")
        return [BenchmarkRecord(int(row["N"]), float(row["E_ref"]), float(row["sigma"]),
                                row["source"]) for row in reader]


@dataclass
class ComparisonReport:
    rows: list[dict]
    tolerance_abs: float
    tolerance_rel: float

    @property
    def n_flagged(self) -> int:
        return sum(1 for r in self.rows if r["flagged"])

    def summary(self) -> dict:
        dev = np.array([r["deviation"] for r in self.rows])
        rel = np.array([r["relative"] for r in self.rows])
        return {"count": len(self.rows), "flagged": self.n_flagged,
                "mean_abs_deviation": float(np.mean(np.abs(dev))),
                "max_abs_deviation": float(np.max(np.abs(dev))),
                "mean_rel_deviation": float(np.mean(np.abs(rel)))}


def compare(table, references, tolerance_abs: float = 0.3,
            tolerance_rel: float = 0.05) -> ComparisonReport:
    """Per-N deviation of ``table`` (a SweepTable or {N: E}) from references.

    A row is flagged when |E - E_ref| exceeds sigma + tolerance_abs +
    tolerance_rel * |E_ref|.  Several references for one N give several rows.
    """
    if isinstance(table, SweepTable):
        energies = dict((n, r.total_unscaled) for n, r in table.rows)
    else:
        energies = {int(n): float(e) for n, e in dict(table).items()}
    rows = []
    for ref in sorted(references, key=lambda x: (x.n_particles, x.source_label)):
        if ref.n_particles not in energies:
            continue
        e = energies[ref.n_particles]
        dev = e - ref.energy_ref
        allowed = ref.uncertainty + tolerance_abs + tolerance_rel * abs(ref.energy_ref)
        rows.append({"N": ref.n_particles, "source": ref.source_label, "E": e,
                     "E_ref": ref.energy_ref, "sigma": ref.uncertainty, "deviation": dev,
                     "relative": dev / ref.energy_ref if ref.energy_ref else math.inf,
                     "flagged": abs(dev) > allowed})
    if not rows:
        raise ValueError("no particle number in common between table and references")
    return ComparisonReport(rows, tolerance_abs, tolerance_rel)


# --------------------------------------------------------------------------
# table I/O


def write_records(records: list[dict], path, fmt: str | None = None) -> None:
    path = Path(path)
    fmt = fmt or ("json" if path.suffix == ".json" else "csv")
    if fmt == "json":
        path.write_text(json.dumps(records, indent=1) + "\n")
        return
    with open(path, "w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=list(records[0]) if records else [])
        writer.writeheader()
        for rec in records:
            writer.writerow({k: repr(float(v)) if isinstance(v, float) else v for k, v in rec.items()})


def read_records(path, fmt: str | None = None) -> list[dict]:
    path = Path(path)
    fmt = fmt or ("json" if path.suffix == ".json" else "csv")
    if fmt == "json":
        return json.loads(path.read_text())
    out = []
    with open(path, newline="") as fh:
        for row in csv.DictReader(fh):
            out.append({k: _parse_cell(v) for k, v in row.items()})
    return out


def _parse_cell(text: str):
    for conv in (int, float):
        try:
            return conv(text)
        except ValueError:
            pass
    if text in ("True", "False"):
        return text == "True"
    return text
