"""Experiment configuration files.

Flat INI-style sections, parsed with :mod:`configparser`.  A minimal driven
two-level sweep looks like::

    [experiment]
    kind = rabi_sweep
    tolerance = 1e-3
    delta = 0.05
    e1 = 0.0
    e2 = 1.0

    [evolution]
    dt = 1e-3
    t_final = 1.0

    [sweep]
    parameter = omega
    start = 0.5
    stop = 1.5
    points = 41

Sections and keys per kind:

* ``[experiment]``: kind, tolerance, output_dir, plus kind extras
  (delta/e1/e2 for rabi_sweep, coefficients for h2_curve, level for
  pt_compare).
* ``[hamiltonian]`` / ``[perturbation]``: either ``file = <path>`` or a
  multiline ``terms`` value with ``<coeff_real> <coeff_imag> <letters>`` rows.
* ``[drive]``: multiline ``terms`` rows
  ``<waveform> <amplitude> <frequency> <phase_offset> <letters>``.
* ``[ansatz]``: ``reference`` bitstring, ``global_phase``, ``initial_params``,
  and a multiline ``gates`` value, one gate per line in the form
  ``<sign> <coeff> <letters> [+ <coeff> <letters> ...]`` with sign ``-`` for
  exp(-i l G) and ``+`` for exp(+i l G).
* ``[evolution]``: the stepping controls (dt, t_final, integrator,
  regularization, backend, record flags, max_steps, convergence).
* ``[sweep]``: parameter, start, stop, points (>= 2).

Parsing resolves every default (ansatz presets, sweep grids, file paths), so
serializing a parsed config with :func:`config_to_text` and parsing it again
yields an equal configuration.
"""

from __future__ import annotations

import configparser
import math
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from .ansatz import Ansatz, AnsatzGate, h2_ansatz, rabi_ansatz
from .drive import DriveSpec, DriveTerm, WAVEFORMS
from .engine import EvolutionConfig
from .pauli import PauliSum, PauliTerm
from .states import StateVector, basis_state

__all__ = [
    "KINDS",
    "ConfigError",
    "SweepSpec",
    "ExperimentConfig",
    "load_config",
    "parse_config",
    "config_to_text",
    "with_overrides",
]

KINDS = ("evolve", "ground_state", "pt_compare", "rabi_sweep", "h2_curve")

#: Kinds whose comparisons are dynamical (looser default tolerance).
_DYNAMICS_KINDS = ("evolve", "rabi_sweep")


class ConfigError(ValueError):
    """A configuration file problem, with file/section context in the message."""


@dataclass(frozen=True)
class SweepSpec:
    parameter: str
    start: float
    stop: float
    points: int

    def __post_init__(self) -> None:
        if self.points < 2:
            raise ConfigError(f"sweep needs at least 2 points, got {self.points}")
        for name in ("start", "stop"):
            if not math.isfinite(getattr(self, name)):
                raise ConfigError(f"sweep {name} must be finite")

    def grid(self) -> np.ndarray:
        return np.linspace(self.start, self.stop, self.points)


@dataclass
class ExperimentConfig:
    """Fully resolved experiment description."""

    kind: str
    tolerance: float
    output_dir: str
    evolution: EvolutionConfig
    ansatz: Ansatz | None = None
    initial_params: tuple[float, ...] | None = None
    hamiltonian: PauliSum | None = None
    perturbation: PauliSum | None = None
    drive: DriveSpec | None = None
    sweep: SweepSpec | None = None
    coefficients_path: str | None = None
    delta: float = 0.05
    e1: float = 0.0
    e2: float = 1.0
    level: int = 0
    source: str | None = field(default=None, compare=False)


def load_config(path: "Path | str") -> ExperimentConfig:
    path = Path(path)
    if not path.is_file():
        raise ConfigError(f"config file not found: {path}")
    return parse_config(path.read_text(encoding="utf-8"), base_dir=path.parent, source=str(path))


def _finite_float(raw: str, context: str) -> float:
    try:
        value = float(raw)
    except ValueError as exc:
        raise ConfigError(f"{context}: {raw!r} is not a number") from exc
    if not math.isfinite(value):
        raise ConfigError(f"{context}: value must be finite, got {raw!r}")
    return value


def _boolean(raw: str, context: str) -> bool:
    lowered = raw.strip().lower()
    if lowered in ("true", "yes", "on", "1"):
        return True
    if lowered in ("false", "no", "off", "0"):
        return False
    raise ConfigError(f"{context}: expected true/false, got {raw!r}")


def _parse_gate_line(line: str, context: str) -> AnsatzGate:
    tokens = line.split()
    if len(tokens) < 3 or tokens[0] not in ("+", "-"):
        raise ConfigError(f"{context}: gate line must be '<sign> <coeff> <letters> [+ ...]', got {line!r}")
    sign = "plus_i" if tokens[0] == "+" else "minus_i"
    pairs: list[tuple[complex, str]] = []
    rest = tokens[1:]
    index = 0
    while index < len(rest):
        if index + 1 >= len(rest):
            raise ConfigError(f"{context}: dangling token in gate line {line!r}")
        coeff = _finite_float(rest[index], context)
        letters = rest[index + 1]
        pairs.append((coeff, letters))
        index += 2
        if index < len(rest):
            if rest[index] != "+":
                raise ConfigError(f"{context}: expected '+' between generator terms in {line!r}")
            index += 1
    try:
        generator = PauliSum.from_terms(pairs)
        return AnsatzGate(generator, sign)
    except ValueError as exc:
        raise ConfigError(f"{context}: {exc}") from exc


def _parse_drive_line(line: str, context: str) -> DriveTerm:
    fields = line.split()
    if len(fields) != 5:
        raise ConfigError(
            f"{context}: drive line must be '<waveform> <amplitude> <frequency> <phase_offset> <letters>',"
            f" got {line!r}"
        )
    waveform = fields[0].lower()
    if waveform not in WAVEFORMS:
        raise ConfigError(f"{context}: unknown waveform {fields[0]!r}")
    try:
        return DriveTerm(
            waveform=waveform,
            amplitude=_finite_float(fields[1], context),
            operator=PauliTerm(fields[4]),
            frequency=_finite_float(fields[2], context),
            phase_offset=_finite_float(fields[3], context),
        )
    except ValueError as exc:
        raise ConfigError(f"{context}: {exc}") from exc


def _multiline(section: configparser.SectionProxy, key: str) -> list[str]:
    raw = section.get(key, "")
    return [line.strip() for line in raw.splitlines() if line.strip()]


def _parse_operator(
    cp: configparser.ConfigParser, section_name: str, base_dir: Path, source: str
) -> PauliSum | None:
    if not cp.has_section(section_name):
        return None
    section = cp[section_name]
    context = f"{source}: [{section_name}]"
    file_value = section.get("file")
    term_lines = _multiline(section, "terms")
    if file_value and term_lines:
        raise ConfigError(f"{context}: give either 'file' or 'terms', not both")
    if file_value:
        path = (base_dir / file_value).resolve() if not Path(file_value).is_absolute() else Path(file_value)
        if not path.is_file():
            raise ConfigError(f"{context}: operator file not found: {path}")
        text = path.read_text(encoding="utf-8")
    elif term_lines:
        text = "\n".join(term_lines)
    else:
        raise ConfigError(f"{context}: needs a 'file' path or inline 'terms'")
    try:
        return PauliSum.from_text(text)
    except ValueError as exc:
        raise ConfigError(f"{context}: {exc}") from exc


def _parse_ansatz(cp: configparser.ConfigParser, source: str) -> Ansatz | None:
    if not cp.has_section("ansatz"):
        return None
    section = cp["ansatz"]
    context = f"{source}: [ansatz]"
    gate_lines = _multiline(section, "gates")
    if not gate_lines:
        raise ConfigError(f"{context}: needs at least one gate line")
    gates = tuple(_parse_gate_line(line, context) for line in gate_lines)
    qubit_count = gates[0].qubit_count
    reference_label = section.get("reference")
    if reference_label is None:
        raise ConfigError(f"{context}: needs a 'reference' bitstring")
    try:
        reference = basis_state(qubit_count, reference_label.strip())
        return Ansatz(
            qubit_count,
            gates,
            reference,
            global_phase_param=_boolean(section.get("global_phase", "false"), context),
        )
    except ValueError as exc:
        raise ConfigError(f"{context}: {exc}") from exc


def _parse_evolution(cp: configparser.ConfigParser, source: str) -> EvolutionConfig:
    context = f"{source}: [evolution]"
    section = cp["evolution"] if cp.has_section("evolution") else {}

    def get(key: str, default: str) -> str:
        value = section.get(key, default) if section else default
        return str(value)

    try:
        return EvolutionConfig(
            dt=_finite_float(get("dt", "1e-3"), context),
            t_final=_finite_float(get("t_final", "0"), context),
            integrator=get("integrator", "rk4").strip().lower(),
            regularization=_finite_float(get("regularization", "1e-8"), context),
            backend=get("backend", "direct").strip().lower(),
            record_populations=_boolean(get("record_populations", "true"), context),
            record_fidelity=_boolean(get("record_fidelity", "false"), context),
            record_states=_boolean(get("record_states", "false"), context),
            max_steps=int(_finite_float(get("max_steps", "100000"), context)),
            convergence=_finite_float(get("convergence", "1e-9"), context),
        )
    except ValueError as exc:
        raise ConfigError(f"{context}: {exc}") from exc


def _parse_sweep(cp: configparser.ConfigParser, source: str) -> SweepSpec | None:
    if not cp.has_section("sweep"):
        return None
    section = cp["sweep"]
    context = f"{source}: [sweep]"
    for key in ("parameter", "start", "stop", "points"):
        if key not in section:
            raise ConfigError(f"{context}: missing key {key!r}")
    return SweepSpec(
        parameter=section["parameter"].strip(),
        start=_finite_float(section["start"], context),
        stop=_finite_float(section["stop"], context),
        points=int(_finite_float(section["points"], context)),
    )


def parse_config(text: str, base_dir: "Path | str" = ".", source: str = "<config>") -> ExperimentConfig:
    """Parse and fully resolve a configuration, applying kind defaults."""
    base_dir = Path(base_dir)
    cp = configparser.ConfigParser(interpolation=None, inline_comment_prefixes=("#",))
    try:
        cp.read_string(text)
    except configparser.Error as exc:
        raise ConfigError(f"{source}: {exc}") from exc
    if not cp.has_section("experiment"):
        raise ConfigError(f"{source}: missing [experiment] section")
    exp = cp["experiment"]
    kind = exp.get("kind", "").strip().lower()
    if kind not in KINDS:
        raise ConfigError(f"{source}: [experiment] kind must be one of {KINDS}, got {kind!r}")
    context = f"{source}: [experiment]"

    default_tolerance = "1e-3" if kind in _DYNAMICS_KINDS else "1e-6"
    tolerance = _finite_float(exp.get("tolerance", default_tolerance), context)
    if tolerance <= 0:
        raise ConfigError(f"{context}: tolerance must be positive")
    output_dir = exp.get("output_dir", "out").strip()

    evolution = _parse_evolution(cp, source)
    ansatz = _parse_ansatz(cp, source)
    hamiltonian = _parse_operator(cp, "hamiltonian", base_dir, source)
    perturbation = _parse_operator(cp, "perturbation", base_dir, source)
    sweep = _parse_sweep(cp, source)
    drive: DriveSpec | None = None
    if cp.has_section("drive"):
        lines = _multiline(cp["drive"], "terms")
        if not lines:
            raise ConfigError(f"{source}: [drive] needs a 'terms' value")
        drive = DriveSpec(tuple(_parse_drive_line(line, f"{source}: [drive]") for line in lines))

    delta = _finite_float(exp.get("delta", "0.05"), context)
    e1 = _finite_float(exp.get("e1", "0"), context)
    e2 = _finite_float(exp.get("e2", "1"), context)
    level = int(_finite_float(exp.get("level", "0"), context))

    coefficients_path: str | None = None
    if exp.get("coefficients"):
        raw = exp["coefficients"].strip()
        path = (base_dir / raw).resolve() if not Path(raw).is_absolute() else Path(raw)
        if not path.is_file():
            raise ConfigError(f"{context}: coefficients file not found: {path}")
        coefficients_path = str(path)

    # Kind-specific resolution and validation.
    if kind == "rabi_sweep":
        if hamiltonian is not None:
            raise ConfigError(f"{source}: rabi_sweep builds its Hamiltonian from e1/e2; drop [hamiltonian]")
        if drive is not None:
            raise ConfigError(f"{source}: rabi_sweep builds its drive from delta/omega; drop [drive]")
        if ansatz is None:
            ansatz = rabi_ansatz(global_phase=True)
        if ansatz.qubit_count != 1:
            raise ConfigError(f"{source}: rabi_sweep needs a two-level (1 qubit) ansatz")
        omega21 = e2 - e1
        if sweep is None:
            sweep = SweepSpec("omega", omega21 - 10 * delta, omega21 + 10 * delta, 41)
        if sweep.parameter != "omega":
            raise ConfigError(f"{source}: rabi_sweep sweeps 'omega', got {sweep.parameter!r}")
    elif kind == "h2_curve":
        if coefficients_path is None:
            raise ConfigError(f"{context}: h2_curve needs a 'coefficients' file")
        if sweep is not None:
            raise ConfigError(f"{source}: h2_curve iterates coefficient rows; drop [sweep]")
        if drive is not None:
            raise ConfigError(f"{source}: h2_curve takes no drive")
        if ansatz is None:
            ansatz = h2_ansatz(global_phase=False)
        if ansatz.qubit_count != 2:
            raise ConfigError(f"{source}: h2_curve needs a 2-qubit ansatz")
    elif kind == "pt_compare":
        if hamiltonian is None or perturbation is None:
            raise ConfigError(f"{source}: pt_compare needs [hamiltonian] (H0) and [perturbation] (V)")
        if hamiltonian.qubit_count != perturbation.qubit_count:
            raise ConfigError(f"{source}: H0 and V act on different qubit counts")
        if sweep is None:
            raise ConfigError(f"{source}: pt_compare needs a [sweep] over 'lambda'")
        if sweep.parameter != "lambda":
            raise ConfigError(f"{source}: pt_compare sweeps 'lambda', got {sweep.parameter!r}")
        if drive is not None:
            raise ConfigError(f"{source}: pt_compare takes no drive")
    else:  # evolve, ground_state
        if hamiltonian is None:
            raise ConfigError(f"{source}: {kind} needs a [hamiltonian] section")
        if ansatz is None:
            raise ConfigError(f"{source}: {kind} needs an [ansatz] section")
        if hamiltonian.qubit_count != ansatz.qubit_count:
            raise ConfigError(f"{source}: Hamiltonian and ansatz qubit counts differ")
        if sweep is not None:
            raise ConfigError(f"{source}: {kind} takes no [sweep]")
        if kind == "ground_state" and drive is not None:
            raise ConfigError(f"{source}: ground_state takes no drive")
        if kind == "evolve" and evolution.t_final <= 0:
            raise ConfigError(f"{source}: evolve needs t_final > 0 in [evolution]")
        if drive is not None and drive.qubit_count not in (None, hamiltonian.qubit_count):
            raise ConfigError(f"{source}: drive and Hamiltonian qubit counts differ")

    initial_params: tuple[float, ...] | None = None
    if ansatz is not None:
        if cp.has_section("ansatz") and cp["ansatz"].get("initial_params"):
            values = cp["ansatz"]["initial_params"].split()
            initial_params = tuple(_finite_float(v, f"{source}: [ansatz] initial_params") for v in values)
        else:
            initial_params = tuple(0.0 for _ in range(ansatz.parameter_count))
        if len(initial_params) != ansatz.parameter_count:
            raise ConfigError(
                f"{source}: [ansatz] initial_params has {len(initial_params)} entries, "
                f"ansatz takes {ansatz.parameter_count}"
            )

    return ExperimentConfig(
        kind=kind,
        tolerance=tolerance,
        output_dir=output_dir,
        evolution=evolution,
        ansatz=ansatz,
        initial_params=initial_params,
        hamiltonian=hamiltonian,
        perturbation=perturbation,
        drive=drive,
        sweep=sweep,
        coefficients_path=coefficients_path,
        delta=delta,
        e1=e1,
        e2=e2,
        level=level,
        source=source,
    )


def _serialize_reference(reference: StateVector) -> str:
    populations = reference.populations()
    index = int(np.argmax(populations))
    if abs(populations[index] - 1.0) > 1e-12:
        raise ConfigError("only computational basis references can be serialized")
    return format(index, f"0{reference.qubit_count}b")


def _serialize_gate(gate: AnsatzGate) -> str:
    sign = "+" if gate.sign == "plus_i" else "-"
    body = " + ".join(f"{c.real:.17g} {letters}" for c, letters in gate.generator.terms)
    return f"{sign} {body}"


def config_to_text(cfg: ExperimentConfig) -> str:
    """Serialize a resolved configuration back to INI text (round-trippable)."""
    lines: list[str] = ["[experiment]", f"kind = {cfg.kind}", f"tolerance = {cfg.tolerance:.17g}"]
    lines.append(f"output_dir = {cfg.output_dir}")
    if cfg.kind == "rabi_sweep":
        lines += [f"delta = {cfg.delta:.17g}", f"e1 = {cfg.e1:.17g}", f"e2 = {cfg.e2:.17g}"]
    if cfg.kind == "pt_compare":
        lines.append(f"level = {cfg.level}")
    if cfg.coefficients_path is not None:
        lines.append(f"coefficients = {cfg.coefficients_path}")
    lines.append("")

    for name, operator in (("hamiltonian", cfg.hamiltonian), ("perturbation", cfg.perturbation)):
        if operator is not None:
            lines.append(f"[{name}]")
            lines.append("terms =")
            for c, letters in operator.terms:
                lines.append(f"    {c.real:.17g} {c.imag:.17g} {letters}")
            lines.append("")

    if cfg.drive is not None:
        lines.append("[drive]")
        lines.append("terms =")
        for term in cfg.drive.terms:
            amplitude = term.amplitude * term.operator.phase.real
            lines.append(
                f"    {term.waveform} {amplitude:.17g} {term.frequency:.17g} "
                f"{term.phase_offset:.17g} {term.operator.letters}"
            )
        lines.append("")

    if cfg.ansatz is not None:
        lines.append("[ansatz]")
        lines.append(f"reference = {_serialize_reference(cfg.ansatz.reference)}")
        lines.append(f"global_phase = {'true' if cfg.ansatz.global_phase_param else 'false'}")
        if cfg.initial_params is not None:
            lines.append("initial_params = " + " ".join(f"{v:.17g}" for v in cfg.initial_params))
        lines.append("gates =")
        for gate in cfg.ansatz.gates:
            lines.append(f"    {_serialize_gate(gate)}")
        lines.append("")

    ev = cfg.evolution
    lines += [
        "[evolution]",
        f"dt = {ev.dt:.17g}",
        f"t_final = {ev.t_final:.17g}",
        f"integrator = {ev.integrator}",
        f"regularization = {ev.regularization:.17g}",
        f"backend = {ev.backend}",
        f"record_populations = {'true' if ev.record_populations else 'false'}",
        f"record_fidelity = {'true' if ev.record_fidelity else 'false'}",
        f"record_states = {'true' if ev.record_states else 'false'}",
        f"max_steps = {ev.max_steps}",
        f"convergence = {ev.convergence:.17g}",
        "",
    ]

    if cfg.sweep is not None:
        lines += [
            "[sweep]",
            f"parameter = {cfg.sweep.parameter}",
            f"start = {cfg.sweep.start:.17g}",
            f"stop = {cfg.sweep.stop:.17g}",
            f"points = {cfg.sweep.points}",
            "",
        ]
    return "\n".join(lines)


def with_overrides(
    cfg: ExperimentConfig,
    *,
    output_dir: str | None = None,
    backend: str | None = None,
    tolerance: float | None = None,
) -> ExperimentConfig:
    """Apply command-line overrides to a parsed configuration."""
    evolution = cfg.evolution if backend is None else replace(cfg.evolution, backend=backend)
    updated = replace(
        cfg,
        evolution=evolution,
        output_dir=cfg.output_dir if output_dir is None else output_dir,
        tolerance=cfg.tolerance if tolerance is None else tolerance,
    )
    return updated
