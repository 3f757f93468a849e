"""Named experiment presets, config parsing, and CSV artifact emission.

A preset bundles a two-component superposition, simulation parameters, a
mode (quantum, classical, decoherence, or spectral), and output markers.
Every run evaluates the relative-phase pair {beta, beta + pi}: the pair is
sorted by phase modulo 2 pi and the lower one fills the *_beta0 CSV
columns, the upper one *_betapi.  For the stock presets the pair is
exactly {0, pi}, so the column names are literal.

Artifacts per run, all deterministic for a fixed (preset, seed):

* series.csv with header `kick,E_beta0,E_betapi` (decoherence runs append
  `,S_beta0,S_betapi`; purity cells are empty off the snapshot cadence),
* snapshot_kick<K>.csv with header `m,P_beta0,P_betapi` when requested,
* ratios.csv with header `model,d,seed,ratio` for the random-matrix
  comparison,
* summary.csv with header `key,value`, the same key=value lines echoed on
  stdout.

Values are written with 12 significant digits; files are written to a
temporary name and atomically renamed into place.
"""

from __future__ import annotations

import math
import os
import re
import tempfile
from dataclasses import dataclass, replace
from pathlib import Path
from types import MappingProxyType

import numpy as np

from .classical import propagate_ensemble, wigner_ensemble
from .decoherence import DecoherenceConfig, propagate_with_decoherence
from .propagator import choose_basis_size, make_plan, propagate
from .spectral import (
    banded_random_model,
    build_floquet_matrix,
    diagonalize,
    interference_ratio,
)
from .states import (
    ObservableSeries,
    SimulationParams,
    SuperpositionSpec,
    prepare_superposition,
    tail_probability,
)

MODES = ("quantum", "classical", "decoherence", "spectral")

TWO_PI = 2.0 * math.pi

FLOAT_FORMAT = "%.12g"


@dataclass(frozen=True)
class ExperimentPreset:
    """Immutable description of one named run."""

    name: str
    spec: SuperpositionSpec
    params: SimulationParams
    mode: str = "quantum"
    samples_per_line: int = 100_000
    decoherence: DecoherenceConfig | None = None
    marker_kicks: tuple[int, ...] = ()
    single_marker: int | None = None
    snapshot_kicks: tuple[int, ...] = ()
    tail_m_min: int | None = None
    rmt_dims: tuple[int, ...] = ()
    rmt_seeds: int = 20

    def __post_init__(self) -> None:
        if self.mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}, got {self.mode!r}")
        if self.mode == "decoherence" and self.decoherence is None:
            raise ValueError("decoherence mode needs a DecoherenceConfig")

    def beta_pair(self) -> tuple[SuperpositionSpec, SuperpositionSpec]:
        """The {beta, beta + pi} pair, sorted by phase modulo 2 pi."""
        lo, hi = sorted((self.spec.beta % TWO_PI, (self.spec.beta + math.pi) % TWO_PI))
        return self.spec.with_beta(lo), self.spec.with_beta(hi)


def _case_a_spec(beta: float = 0.0) -> SuperpositionSpec:
    return SuperpositionSpec(m=2, n=-1, alpha=math.pi / 4, beta=beta)


def _case_b_spec(beta: float = 0.0) -> SuperpositionSpec:
    return SuperpositionSpec(m=1, n=2, alpha=math.pi / 4, beta=beta)


_CASE_A_PARAMS = SimulationParams(tau=0.5, k=5.0, n_basis=256, kicks=60)

_CASE_B_PARAMS = SimulationParams(tau=1.0, k=5.0, n_basis=512, kicks=60)

PRESETS: MappingProxyType[str, ExperimentPreset] = MappingProxyType(
    {
        "fig1a": ExperimentPreset(
            name="fig1a",
            spec=_case_a_spec(),
            params=_CASE_A_PARAMS,
            marker_kicks=(40, 60),
            single_marker=40,
        ),
        "fig1b": ExperimentPreset(
            name="fig1b",
            spec=_case_b_spec(),
            params=_CASE_B_PARAMS,
            marker_kicks=(4, 45, 60),
            single_marker=45,
        ),
        "fig2a": ExperimentPreset(
            name="fig2a",
            spec=_case_a_spec(),
            params=_CASE_A_PARAMS,
            marker_kicks=(40, 60),
            snapshot_kicks=(60,),
            tail_m_min=10,
        ),
        "fig2b": ExperimentPreset(
            name="fig2b",
            spec=_case_b_spec(),
            params=_CASE_B_PARAMS,
            marker_kicks=(45, 60),
            snapshot_kicks=(60,),
            tail_m_min=20,
        ),
        "fig3a": ExperimentPreset(
            name="fig3a",
            spec=_case_a_spec(),
            params=_CASE_A_PARAMS,
            mode="classical",
        ),
        "fig3b": ExperimentPreset(
            name="fig3b",
            spec=_case_b_spec(),
            params=_CASE_B_PARAMS,
            mode="classical",
        ),
        "fig4a": ExperimentPreset(
            name="fig4a",
            spec=_case_b_spec(),
            params=_CASE_B_PARAMS,
            mode="decoherence",
            decoherence=DecoherenceConfig(r=0.05, n_realizations=100, seed=0),
            marker_kicks=(60,),
        ),
        "fig4b": ExperimentPreset(
            name="fig4b",
            spec=_case_b_spec(),
            params=_CASE_B_PARAMS,
            mode="decoherence",
            decoherence=DecoherenceConfig(r=0.15, n_realizations=100, seed=0),
            marker_kicks=(60,),
        ),
        "resonance": ExperimentPreset(
            name="resonance",
            spec=_case_b_spec(),
            params=SimulationParams(tau=math.pi / 3, k=5.0, n_basis=1024, kicks=60),
            marker_kicks=(60,),
        ),
        "rmt-compare": ExperimentPreset(
            name="rmt-compare",
            spec=_case_a_spec(),
            params=_CASE_A_PARAMS,
            mode="spectral",
            rmt_dims=(64, 128, 256),
            rmt_seeds=20,
        ),
    }
)


@dataclass(frozen=True)
class RunResult:
    """Paths written by a run plus its headline scalars."""

    files: tuple[Path, ...]
    summary: dict[str, float]


def _atomic_write(path: Path, text: str) -> None:
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=path.name, suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as handle:
            handle.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _fmt(value: float) -> str:
    return FLOAT_FORMAT % value


def _series_csv(a: ObservableSeries, b: ObservableSeries, with_entropy: bool) -> str:
    header = "kick,E_beta0,E_betapi"
    if with_entropy:
        header += ",S_beta0,S_betapi"
    lines = [header]
    for i, kick in enumerate(a.kicks):
        row = f"{int(kick)},{_fmt(a.energies[i])},{_fmt(b.energies[i])}"
        if with_entropy:
            sa = "" if np.isnan(a.entropies[i]) else _fmt(a.entropies[i])
            sb = "" if np.isnan(b.entropies[i]) else _fmt(b.entropies[i])
            row += f",{sa},{sb}"
        lines.append(row)
    return "\n".join(lines) + "\n"


def _snapshot_csv(d: int, pa: np.ndarray, pb: np.ndarray) -> str:
    lines = ["m,P_beta0,P_betapi"]
    for i in range(d):
        lines.append(f"{i - d // 2},{_fmt(pa[i])},{_fmt(pb[i])}")
    return "\n".join(lines) + "\n"


def _summary_csv(summary: dict[str, float]) -> str:
    lines = ["key,value"]
    lines += [f"{key},{_fmt(value)}" for key, value in summary.items()]
    return "\n".join(lines) + "\n"


def _markers(preset: ExperimentPreset, last_kick: int, include_zero: bool) -> list[int]:
    marks = {k for k in preset.marker_kicks if 0 <= k <= last_kick}
    marks.add(last_kick)
    if include_zero:
        marks.add(0)
    return sorted(marks)


def _slope(series: ObservableSeries, start: int, stop: int) -> float:
    lo = np.searchsorted(series.kicks, start)
    hi = np.searchsorted(series.kicks, stop, side="right")
    if hi - lo < 2:
        raise ValueError(f"not enough points to fit a slope on [{start}, {stop}]")
    return float(np.polyfit(series.kicks[lo:hi], series.energies[lo:hi], 1)[0])


def run_preset(
    preset: ExperimentPreset,
    seed: int = 0,
    out_dir: str | Path = ".",
    kicks: int | None = None,
    basis: int | None = None,
    quiet: bool = False,
) -> RunResult:
    """Execute a preset, write its CSV artifacts, and return the summary."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    params = preset.params
    if kicks is not None:
        if kicks < 0:
            raise ValueError("kicks override must be non-negative")
        params = replace(params, kicks=kicks)
    if basis is not None:
        params = replace(params, n_basis=basis)
    spec_lo, spec_hi = preset.beta_pair()
    files: list[Path] = []
    summary: dict[str, float] = {}

    if preset.mode == "quantum":
        plan = make_plan(params)
        series = []
        for spec in (spec_lo, spec_hi):
            state = prepare_superposition(spec, plan.d)
            series.append(
                propagate(state, plan, params.kicks, record_snapshots_at=preset.snapshot_kicks)
            )
        sa, sb = series
        path = out / f"{preset.name}_series.csv"
        _atomic_write(path, _series_csv(sa, sb, with_entropy=False))
        files.append(path)
        for kick in _markers(preset, params.kicks, include_zero=False):
            summary[f"E_beta0_kick{kick}"] = sa.energy_at(kick)
            summary[f"E_betapi_kick{kick}"] = sb.energy_at(kick)
        if preset.single_marker is not None and preset.single_marker <= params.kicks:
            mark = preset.single_marker
            for label, single in (
                (preset.spec.m, replace(preset.spec, alpha=0.0, beta=0.0)),
                (preset.spec.n, replace(preset.spec, alpha=math.pi / 2, beta=0.0)),
            ):
                state = prepare_superposition(single, plan.d)
                run = propagate(state, plan, mark)
                summary[f"E_basis{label}_kick{mark}"] = run.energy_at(mark)
        final = params.kicks
        lo_e, hi_e = summary[f"E_beta0_kick{final}"], summary[f"E_betapi_kick{final}"]
        if min(lo_e, hi_e) > 0:
            summary[f"ratio_kick{final}"] = max(lo_e, hi_e) / min(lo_e, hi_e)
        for kick in preset.snapshot_kicks:
            if kick > params.kicks:
                continue
            pa, pb = sa.snapshots[kick], sb.snapshots[kick]
            path = out / f"{preset.name}_snapshot_kick{kick}.csv"
            _atomic_write(path, _snapshot_csv(plan.d, pa, pb))
            files.append(path)
            if preset.tail_m_min is not None:
                summary[f"tail_beta0_mmin{preset.tail_m_min}_kick{kick}"] = tail_probability(
                    pa, preset.tail_m_min
                )
                summary[f"tail_betapi_mmin{preset.tail_m_min}_kick{kick}"] = tail_probability(
                    pb, preset.tail_m_min
                )

    elif preset.mode == "classical":
        series = []
        for spec in (spec_lo, spec_hi):
            ensemble = wigner_ensemble(spec, params.tau, preset.samples_per_line)
            series.append(propagate_ensemble(ensemble, params.kappa, params.kicks))
        sa, sb = series
        path = out / f"{preset.name}_series.csv"
        _atomic_write(path, _series_csv(sa, sb, with_entropy=False))
        files.append(path)
        for kick in _markers(preset, params.kicks, include_zero=True):
            summary[f"E_beta0_kick{kick}"] = sa.energy_at(kick)
            summary[f"E_betapi_kick{kick}"] = sb.energy_at(kick)
        final = params.kicks
        ea, eb = sa.energy_at(final), sb.energy_at(final)
        mean = 0.5 * (ea + eb)
        if mean > 0:
            summary[f"contrast_kick{final}"] = abs(ea - eb) / mean
        if final >= 2:
            summary["slope_beta0"] = _slope(sa, 0, final)
            summary["slope_betapi"] = _slope(sb, 0, final)

    elif preset.mode == "decoherence":
        config = replace(preset.decoherence, seed=seed)
        plan = make_plan(params)
        series = []
        for spec in (spec_lo, spec_hi):
            series.append(
                propagate_with_decoherence(spec, plan, config, n_kicks=params.kicks)
            )
        sa, sb = series
        path = out / f"{preset.name}_series.csv"
        _atomic_write(path, _series_csv(sa, sb, with_entropy=True))
        files.append(path)
        final = params.kicks
        for kick in _markers(preset, params.kicks, include_zero=False):
            summary[f"E_beta0_kick{kick}"] = sa.energy_at(kick)
            summary[f"E_betapi_kick{kick}"] = sb.energy_at(kick)
        summary[f"S_beta0_kick{final}"] = float(sa.entropies[-1])
        summary[f"S_betapi_kick{final}"] = float(sb.entropies[-1])
        ea, eb = sa.energy_at(final), sb.energy_at(final)
        if min(ea, eb) > 0:
            summary[f"ratio_kick{final}"] = max(ea, eb) / min(ea, eb)
        if final >= 22:
            lo_fit = min(20, final - 2)
            summary[f"slope_beta0_k{lo_fit}to{final}"] = _slope(sa, lo_fit, final)
            summary[f"slope_betapi_k{lo_fit}to{final}"] = _slope(sb, lo_fit, final)

    elif preset.mode == "spectral":
        rows: list[tuple[str, int, int, float]] = []
        bandwidth = int(round(2.0 * params.k))
        for d in preset.rmt_dims:
            ratios = []
            for offset in range(preset.rmt_seeds):
                model = banded_random_model(d, bandwidth, seed + offset)
                spectrum = diagonalize(model)
                ratio = interference_ratio(spectrum, preset.spec.m, preset.spec.n)
                rows.append(("banded", d, seed + offset, ratio))
                ratios.append(ratio)
            summary[f"banded_median_d{d}"] = float(np.median(ratios))
        rotor = diagonalize(build_floquet_matrix(params))
        rotor_ratio = interference_ratio(rotor, preset.spec.m, preset.spec.n)
        rows.append(("rotor", params.n_basis, 0, rotor_ratio))
        summary[f"rotor_ratio_d{params.n_basis}"] = rotor_ratio
        ref = summary.get(f"banded_median_d{params.n_basis}")
        if ref:
            summary["rotor_over_banded"] = rotor_ratio / ref
        medians = [(d, summary[f"banded_median_d{d}"]) for d in preset.rmt_dims]
        scale_c = float(np.exp(np.mean([np.log(m * math.sqrt(d)) for d, m in medians])))
        for d, m in medians:
            summary[f"sqrtd_dev_d{d}"] = m * math.sqrt(d) / scale_c
        lines = ["model,d,seed,ratio"]
        lines += [f"{mo},{d},{s},{_fmt(r)}" for mo, d, s, r in rows]
        path = out / f"{preset.name}_ratios.csv"
        _atomic_write(path, "\n".join(lines) + "\n")
        files.append(path)

    else:  # pragma: no cover - guarded by ExperimentPreset validation
        raise ValueError(f"unknown mode {preset.mode!r}")

    spath = out / f"{preset.name}_summary.csv"
    _atomic_write(spath, _summary_csv(summary))
    files.append(spath)
    if not quiet:
        for key, value in summary.items():
            print(f"{key}={_fmt(value)}")
    return RunResult(files=tuple(files), summary=summary)


_REQUIRED_KEYS = ("tau", "k", "m", "n")

_KNOWN_KEYS = _REQUIRED_KEYS + (
    "alpha",
    "beta",
    "kicks",
    "basis",
    "samples",
    "mode",
    "r",
    "realizations",
    "entropy_every",
    "name",
    "seed",
)

_ANGLE_RE = re.compile(r"^([+-]?(?:\d+\.?\d*|\.\d+)?)\s*pi\s*(?:/\s*(\d+\.?\d*))?$")


def _parse_angle(text: str, key: str, line_no: int = 0) -> float:
    match = _ANGLE_RE.match(text.strip())
    if match:
        mult = match.group(1)
        factor = 1.0 if mult in ("", "+") else -1.0 if mult == "-" else float(mult)
        div = float(match.group(2)) if match.group(2) else 1.0
        return factor * math.pi / div
    try:
        return float(text)
    except ValueError:
        where = f"line {line_no}: " if line_no else ""
        raise ValueError(
            f"{where}value for {key!r} must be a number or a pi expression, got {text!r}"
        ) from None


def parse_config(text: str) -> ExperimentPreset:
    """Build a preset from key=value lines; '#' starts a comment."""
    values: dict[str, str] = {}
    lines_of: dict[str, int] = {}
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"line {line_no}: expected key=value, got {raw.strip()!r}")
        key, _, value = line.partition("=")
        key = key.strip().lower()
        value = value.strip()
        if key not in _KNOWN_KEYS:
            raise ValueError(f"line {line_no}: unknown key {key!r}")
        if key in values:
            raise ValueError(f"line {line_no}: duplicate key {key!r}")
        if not value:
            raise ValueError(f"line {line_no}: empty value for {key!r}")
        values[key] = value
        lines_of[key] = line_no

    missing = [key for key in _REQUIRED_KEYS if key not in values]
    if missing:
        raise ValueError(f"missing required keys: {', '.join(missing)}")

    def as_int(key: str, default: int) -> int:
        if key not in values:
            return default
        try:
            return int(values[key])
        except ValueError:
            raise ValueError(
                f"line {lines_of[key]}: value for {key!r} must be an integer"
            ) from None

    def as_float(key: str, default: float, angle: bool = False) -> float:
        if key not in values:
            return default
        if angle:
            return _parse_angle(values[key], key, lines_of[key])
        try:
            return float(values[key])
        except ValueError:
            raise ValueError(
                f"line {lines_of[key]}: value for {key!r} must be a number"
            ) from None

    tau = as_float("tau", 0.0, angle=True)
    k = as_float("k", 0.0)
    m = as_int("m", 0)
    n = as_int("n", 0)
    alpha = as_float("alpha", math.pi / 4, angle=True)
    beta = as_float("beta", 0.0, angle=True)
    kicks = as_int("kicks", 60)
    samples = as_int("samples", 100_000)
    r = as_float("r", 0.0)
    realizations = as_int("realizations", 100)
    entropy_every = as_int("entropy_every", 1)
    seed = as_int("seed", 0)
    name = values.get("name", "config")
    mode = values.get("mode", "")
    if mode and mode not in ("quantum", "classical", "decoherence"):
        raise ValueError(
            f"line {lines_of['mode']}: mode must be quantum, classical, or decoherence"
        )
    if not mode:
        mode = "decoherence" if r > 0.0 else "quantum"
    if mode != "decoherence" and r > 0.0:
        raise ValueError(f"line {lines_of['r']}: r > 0 requires decoherence mode")

    spec = SuperpositionSpec(m=m, n=n, alpha=alpha, beta=beta)
    config = None
    if mode == "decoherence":
        config = DecoherenceConfig(
            r=r, n_realizations=realizations, seed=seed, entropy_every=entropy_every
        )
    params = SimulationParams(tau=tau, k=k, n_basis=256, kicks=kicks)
    if "basis" in values:
        params = replace(params, n_basis=as_int("basis", 0))
    elif mode != "classical":
        d = choose_basis_size(
            params,
            kicks,
            specs=(spec, spec.with_beta(spec.beta + math.pi)),
            dephasing_r=r,
            seed=seed,
        )
        params = replace(params, n_basis=d)
    return ExperimentPreset(
        name=name,
        spec=spec,
        params=params,
        mode=mode,
        samples_per_line=samples,
        decoherence=config,
        marker_kicks=(kicks,),
        snapshot_kicks=(),
    )


@dataclass(frozen=True)
class ConvergenceReport:
    """Headline scalars at successive refinements with relative deltas."""

    preset: str
    knob: str
    rows: tuple[tuple[str, float, float, float], ...]

    def __str__(self) -> str:
        width = max([len(r[0]) for r in self.rows] + [6])
        out = [f"{self.preset}: doubling {self.knob}"]
        out.append(f"{'scalar':<{width}}  {'base':>14}  {'refined':>14}  {'rel_delta':>10}")
        for name, base, refined, delta in self.rows:
            out.append(f"{name:<{width}}  {base:>14.6g}  {refined:>14.6g}  {delta:>10.3g}")
        return "\n".join(out)


def _headline(summary: dict[str, float], mode: str, final: int) -> dict[str, float]:
    keys = [f"E_beta0_kick{final}", f"E_betapi_kick{final}"]
    if mode == "decoherence":
        keys += [f"S_beta0_kick{final}", f"S_betapi_kick{final}"]
    return {key: summary[key] for key in keys if key in summary}


def convergence_report(
    preset: ExperimentPreset, doublings: int = 1, seed: int = 0
) -> ConvergenceReport:
    """Double the resolution knob of the preset's mode and compare scalars."""
    if doublings < 1:
        raise ValueError("doublings must be >= 1")
    if preset.mode == "spectral":
        raise ValueError("convergence_report supports quantum, classical, and decoherence runs")
    knob = {"quantum": "basis", "classical": "samples", "decoherence": "realizations"}[
        preset.mode
    ]
    factor = 2**doublings

    def scalars(p: ExperimentPreset) -> dict[str, float]:
        with tempfile.TemporaryDirectory() as tmp:
            result = run_preset(p, seed=seed, out_dir=tmp, quiet=True)
        return _headline(result.summary, p.mode, p.params.kicks)

    base = scalars(preset)
    if preset.mode == "quantum":
        refined_preset = replace(
            preset, params=replace(preset.params, n_basis=preset.params.n_basis * factor)
        )
    elif preset.mode == "classical":
        refined_preset = replace(preset, samples_per_line=preset.samples_per_line * factor)
    else:
        refined_preset = replace(
            preset,
            decoherence=replace(
                preset.decoherence,
                n_realizations=preset.decoherence.n_realizations * factor,
            ),
        )
    refined = scalars(refined_preset)
    rows = []
    for key, value in base.items():
        new = refined[key]
        denom = max(abs(value), 1e-300)
        rows.append((key, value, new, abs(new - value) / denom))
    return ConvergenceReport(preset=preset.name, knob=knob, rows=tuple(rows))
