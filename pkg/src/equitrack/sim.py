"""Closed-loop attitude tracking simulation driven by JSON scenario files.

Scenario schema (JSON object, unknown keys rejected)::

    inertia           3x3 SPD matrix, or 3 diagonal entries          required
    R0                rotation (see below)                            required
    Omega0            initial body angular velocity, 3 reals          required
    Rd0               reference rotation                              default identity
    Omegad0           reference angular velocity                      default [0, 0, 0]
    tau_d             reference torque waveform (see below)           default zero
    k_p, k_v          positive gains of the reduced SO(3) law         required
    dt                step size in seconds, > 0                       required
    duration          simulated time in seconds, >= dt                required
    output_decimation emit every n-th step, n >= 1                    default 1

Rotations are ``"identity"``, ``{"axis": [x, y, z], "angle": radians}``
(axis normalised) or ``{"matrix": [[...], [...], [...]]}``.

Reference torque waveforms::

    {"waveform": "zero"}
    {"waveform": "constant", "value": [a, b, c]}
    {"waveform": "cos-sin-product", "amplitude": A, "omega": w}
        -> A * (cos wt, sin wt, sin wt cos wt); amplitude and omega default to 1
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Callable, Iterable, Sequence

import numpy as np

from .dynamics import step_coupled
from .lie import SO3, Array, PreconditionError, RetractionError, rodrigues
from .semidirect import PhaseState
from .so3 import closed_loop_provider, configuration_error, lyapunov, so3_error, vector_field
from .tracking import Gains, check_inertia

CSV_HEADER = (
    ["t", "lyapunov", "config_err", "momentum_err"]
    + [f"RE_{i}{j}" for i in range(1, 4) for j in range(1, 4)]
    + [f"pE_{i}" for i in range(1, 4)]
    + [f"tau_{i}" for i in range(1, 4)]
)

BUNDLED_SCENARIO = Path(__file__).parent / "data" / "attitude_tracking.json"


class ScenarioError(ValueError):
    """Invalid scenario file; the message names the offending field."""


class SimulationError(RuntimeError):
    """The closed loop produced a non-finite or off-group state."""


@dataclass(frozen=True)
class TorqueWaveform:
    kind: str
    amplitude: float = 1.0
    omega: float = 1.0
    value: tuple[float, float, float] = (0.0, 0.0, 0.0)

    def __call__(self, t: float) -> Array:
        if self.kind == "zero":
            return np.zeros(3)
        if self.kind == "constant":
            return np.array(self.value, dtype=float)
        s, c = math.sin(self.omega * t), math.cos(self.omega * t)
        return self.amplitude * np.array([c, s, s * c])


@dataclass(frozen=True)
class Scenario:
    inertia: Array
    R0: Array
    Omega0: Array
    k_p: float
    k_v: float
    dt: float
    duration: float
    Rd0: Array = field(default_factory=lambda: np.eye(3))
    Omegad0: Array = field(default_factory=lambda: np.zeros(3))
    tau_d: TorqueWaveform = field(default_factory=lambda: TorqueWaveform("zero"))
    output_decimation: int = 1

    @property
    def gains(self) -> Gains:
        return Gains(self.k_p, self.k_v)

    @property
    def n_steps(self) -> int:
        return int(round(self.duration / self.dt))


@dataclass(frozen=True)
class SimRecord:
    t: float
    lyapunov: float
    config_err_norm: float
    momentum_err_norm: float
    R_E: Array
    p_E: Array
    tau: Array

    def row(self) -> list[float]:
        return [self.t, self.lyapunov, self.config_err_norm, self.momentum_err_norm, *self.R_E.ravel(), *self.p_E, *self.tau]


# ---------------------------------------------------------------------------
# Scenario parsing
# ---------------------------------------------------------------------------

_REQUIRED = ("inertia", "R0", "Omega0", "k_p", "k_v", "dt", "duration")
_OPTIONAL = ("Rd0", "Omegad0", "tau_d", "output_decimation")


def _vector(name: str, value: Any) -> Array:
    try:
        v = np.asarray(value, dtype=float)
    except (TypeError, ValueError) as exc:
        raise ScenarioError(f"{name}: expected 3 numbers") from exc
    if v.shape != (3,) or not np.all(np.isfinite(v)):
        raise ScenarioError(f"{name}: expected 3 finite numbers")
    return v


def _positive(name: str, value: Any) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ScenarioError(f"{name}: expected a number")
    if not (math.isfinite(value) and value > 0):
        raise ScenarioError(f"{name}: must be positive, got {value}")
    return float(value)


def _rotation(name: str, value: Any) -> Array:
    if value == "identity":
        return np.eye(3)
    if not isinstance(value, dict):
        raise ScenarioError(f"{name}: expected 'identity', {{axis, angle}} or {{matrix}}")
    if set(value) == {"axis", "angle"}:
        axis = _vector(f"{name}.axis", value["axis"])
        norm = float(np.linalg.norm(axis))
        if norm == 0.0:
            raise ScenarioError(f"{name}.axis: must be non-zero")
        angle = value["angle"]
        if isinstance(angle, bool) or not isinstance(angle, (int, float)) or not math.isfinite(angle):
            raise ScenarioError(f"{name}.angle: expected a finite number")
        return rodrigues(float(angle) * axis / norm)
    if set(value) == {"matrix"}:
        try:
            R = np.asarray(value["matrix"], dtype=float)
        except (TypeError, ValueError) as exc:
            raise ScenarioError(f"{name}.matrix: expected a 3x3 array") from exc
        if R.shape != (3, 3) or not SO3.is_member(R):
            raise ScenarioError(f"{name}.matrix: not a rotation matrix")
        return R
    raise ScenarioError(f"{name}: expected keys {{axis, angle}} or {{matrix}}, got {sorted(value)}")


def _waveform(value: Any) -> TorqueWaveform:
    if not isinstance(value, dict) or "waveform" not in value:
        raise ScenarioError("tau_d: expected an object with a 'waveform' key")
    kind = value["waveform"]
    extra = set(value) - {"waveform"}
    if kind == "zero":
        if extra:
            raise ScenarioError(f"tau_d: unexpected keys {sorted(extra)} for waveform 'zero'")
        return TorqueWaveform("zero")
    if kind == "constant":
        if extra != {"value"}:
            raise ScenarioError("tau_d: waveform 'constant' takes exactly one key 'value'")
        return TorqueWaveform("constant", value=tuple(_vector("tau_d.value", value["value"])))
    if kind == "cos-sin-product":
        if extra - {"amplitude", "omega"}:
            raise ScenarioError(f"tau_d: unexpected keys {sorted(extra - {'amplitude', 'omega'})}")
        amplitude = value.get("amplitude", 1.0)
        omega = value.get("omega", 1.0)
        for key, v in (("amplitude", amplitude), ("omega", omega)):
            if isinstance(v, bool) or not isinstance(v, (int, float)) or not math.isfinite(v):
                raise ScenarioError(f"tau_d.{key}: expected a finite number")
        return TorqueWaveform("cos-sin-product", amplitude=float(amplitude), omega=float(omega))
    raise ScenarioError(f"tau_d.waveform: unknown waveform {kind!r}")


def parse_scenario(data: Any) -> Scenario:
    """Validate a decoded JSON object and build a :class:`Scenario`."""
    if not isinstance(data, dict):
        raise ScenarioError("scenario: top level must be a JSON object")
    unknown = set(data) - set(_REQUIRED) - set(_OPTIONAL)
    if unknown:
        raise ScenarioError(f"{sorted(unknown)[0]}: unknown key")
    for key in _REQUIRED:
        if key not in data:
            raise ScenarioError(f"{key}: missing required field")

    raw_inertia = data["inertia"]
    try:
        inertia = np.asarray(raw_inertia, dtype=float)
    except (TypeError, ValueError) as exc:
        raise ScenarioError("inertia: expected a 3x3 matrix or 3 diagonal entries") from exc
    if inertia.shape == (3,):
        inertia = np.diag(inertia)
    if inertia.shape != (3, 3) or not np.all(np.isfinite(inertia)):
        raise ScenarioError("inertia: expected a 3x3 matrix or 3 diagonal entries")
    try:
        check_inertia(inertia)
    except PreconditionError as exc:
        raise ScenarioError(f"inertia: {exc}") from exc

    dt = _positive("dt", data["dt"])
    duration = _positive("duration", data["duration"])
    if duration < dt:
        raise ScenarioError("duration: must be at least dt")
    decimation = data.get("output_decimation", 1)
    if isinstance(decimation, bool) or not isinstance(decimation, int) or decimation < 1:
        raise ScenarioError("output_decimation: must be a positive integer")

    return Scenario(
        inertia=inertia,
        R0=_rotation("R0", data["R0"]),
        Omega0=_vector("Omega0", data["Omega0"]),
        k_p=_positive("k_p", data["k_p"]),
        k_v=_positive("k_v", data["k_v"]),
        dt=dt,
        duration=duration,
        Rd0=_rotation("Rd0", data.get("Rd0", "identity")),
        Omegad0=_vector("Omegad0", data.get("Omegad0", [0.0, 0.0, 0.0])),
        tau_d=_waveform(data.get("tau_d", {"waveform": "zero"})),
        output_decimation=decimation,
    )


def load_scenario(path: str | Path) -> Scenario:
    """Read and validate a scenario file."""
    try:
        data = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise ScenarioError(f"scenario: invalid JSON ({exc})") from exc
    return parse_scenario(data)


# ---------------------------------------------------------------------------
# Simulation
# ---------------------------------------------------------------------------


def initial_states(s: Scenario) -> tuple[PhaseState, PhaseState]:
    """Plant and reference states with momenta ``p = I Omega``."""
    return PhaseState(s.R0, s.inertia @ s.Omega0), PhaseState(s.Rd0, s.inertia @ s.Omegad0)


def _record(t: float, x: PhaseState, xd: PhaseState, tau: Array, inertia_inv: Array, gains: Gains) -> SimRecord:
    err = so3_error(x, xd)
    return SimRecord(
        t=t,
        lyapunov=lyapunov(err, xd.Q, inertia_inv, gains),
        config_err_norm=math.sqrt(configuration_error(err)),
        momentum_err_norm=float(np.linalg.norm(err.P)),
        R_E=err.Q,
        p_E=err.P,
        tau=tau,
    )


def simulate_states(
    s: Scenario, x0: PhaseState | None = None, xd0: PhaseState | None = None
) -> Iterable[tuple[float, PhaseState, PhaseState]]:
    """Yield ``(t, plant, reference)`` at every integration step, starting at ``t = 0``."""
    x, xd = initial_states(s)
    x = x if x0 is None else x0
    xd = xd if xd0 is None else xd0
    provider = closed_loop_provider(s.inertia, s.gains, s.tau_d)
    yield 0.0, x, xd
    for k in range(s.n_steps):
        t = k * s.dt
        try:
            x, xd = step_coupled([x, xd], provider, s.dt, t, SO3, field=vector_field)
        except RetractionError as exc:
            raise SimulationError(f"integration failed at t={t:.6g}: {exc}") from exc
        yield (k + 1) * s.dt, x, xd


def run_simulation(s: Scenario) -> list[SimRecord]:
    """Run the closed loop and return one record every ``output_decimation`` steps.

    ``tau`` in each record is the physical torque commanded at that instant.
    """
    inertia_inv = np.linalg.inv(s.inertia)
    provider = closed_loop_provider(s.inertia, s.gains, s.tau_d)
    records = []
    for k, (t, x, xd) in enumerate(simulate_states(s)):
        if k % s.output_decimation == 0:
            tau = provider(t, [x, xd])[0].tau
            records.append(_record(t, x, xd, tau, inertia_inv, s.gains))
    return records


# ---------------------------------------------------------------------------
# Output
# ---------------------------------------------------------------------------


def _fmt(v: float) -> str:
    return format(float(v), ".17g")


def format_csv(records: Sequence[SimRecord]) -> str:
    lines = [",".join(CSV_HEADER)]
    lines.extend(",".join(_fmt(v) for v in r.row()) for r in records)
    return "\n".join(lines) + "\n"


def write_csv(records: Sequence[SimRecord], path: str | Path) -> None:
    Path(path).write_text(format_csv(records))


def gnuplot_script(csv_path: str | Path, image_path: str | Path | None = None) -> str:
    """Two stacked panels: Lyapunov function, then configuration and momentum error norms."""
    csv_path = str(csv_path)
    image_path = str(image_path) if image_path is not None else str(Path(csv_path).with_suffix(".png"))
    col = {name: i + 1 for i, name in enumerate(CSV_HEADER)}
    return "\n".join(
        [
            "set datafile separator ','",
            "set terminal pngcairo size 800,900",
            f"set output '{image_path}'",
            "set multiplot layout 2,1",
            "set grid",
            "set xlabel 't [s]'",
            "set ylabel 'L(t)'",
            "set title 'Lyapunov function'",
            f"plot '{csv_path}' skip 1 using {col['t']}:{col['lyapunov']} with lines title 'L'",
            "set ylabel 'error norm'",
            "set title 'Tracking errors'",
            f"plot '{csv_path}' skip 1 using {col['t']}:{col['config_err']} with lines title '|R_E - I|', \\",
            f"     '{csv_path}' skip 1 using {col['t']}:{col['momentum_err']} with lines title '|p_E|'",
            "unset multiplot",
            "",
        ]
    )
