"""Constructors and readouts for the three detector circuits.

A PDD unit is a ternary ring of mutually inhibiting detector neurons, one per
sensor channel; it carries the direction evidence. Depth is read either from
cascaded 4-neuron depth modules (a mutually inhibiting regulatory pair feeding
a cross-wired assessing pair) or from a bank of three excitatory-only judge
neurons, the weight-tuned baseline.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Sequence

from .core import CircuitGraph, ConnectionKind, NeuronParams, Trace
from .errors import BadArity, NegativeWeight, UnknownNeuron

EXC = ConnectionKind.EXCITATORY
INH = ConnectionKind.INHIBITORY


@dataclass(frozen=True)
class CtdParams:
    """Canonical magnitudes for every circuit variant; all scenario-overridable."""

    w_ext: float = 1.1            # port injection per sensor spike
    w_inh: float = 0.6            # PDD lateral inhibition
    detector_tau: float = 20.0
    reg_w_in: float = 0.35        # detector -> regulatory excitation
    reg_w_mutual: float = 0.8     # regulatory mutual inhibition
    reg_tau: float = 20.0
    reg_threshold: float = 0.75   # regulators wake around 80 Hz of drive
    assess_w_exc: float = 0.35    # regulatory -> assessing, straight side
    assess_w_inh: float = 0.35    # regulatory -> assessing, crossed side
    assess_tau: float = 25.0
    assess_threshold: float = 0.55  # assessing wakes around 40 Hz of regulatory firing
    assess_reset: float = 0.15
    assess_floor: float = 0.0     # shunting-style: inhibition cancels but never
                                  # drives the assessing pair below rest
    judge_tau: float = 8.0
    judge_reset: float = -0.8     # deep after-spike dip keeps judges exclusive
    refractory: float = 2.0
    v_floor: float = -1.0
    theta_active: int = 2         # assessing spikes per window that count as active
    window_ms: float = 250.0
    stride_ms: float = 125.0

    def detector_neuron(self) -> NeuronParams:
        return NeuronParams(tau_m=self.detector_tau, refractory=self.refractory,
                            v_floor=self.v_floor)

    def regulatory_neuron(self) -> NeuronParams:
        return NeuronParams(tau_m=self.reg_tau, v_threshold=self.reg_threshold,
                            refractory=self.refractory, v_floor=self.v_floor)

    def assessing_neuron(self) -> NeuronParams:
        return NeuronParams(tau_m=self.assess_tau, v_threshold=self.assess_threshold,
                            v_reset=self.assess_reset, refractory=self.refractory,
                            v_floor=self.assess_floor)

    def judge_neuron(self) -> NeuronParams:
        return NeuronParams(tau_m=self.judge_tau, v_reset=self.judge_reset,
                            refractory=self.refractory,
                            v_floor=min(self.v_floor, self.judge_reset))


# Frozen fixture: offline grid search over the three canonical scenarios picked
# this bank (rows N, M, F over a unit's detectors listed left to right). The
# all-zero M row makes M the no-evidence tie state of the argmax readout; the
# suprathreshold outer weights key N to the right detector and F to the left.
DEFAULT_JUDGE_MATRIX: tuple[tuple[float, float, float], ...] = (
    (0.0, 0.0, 1.45),
    (0.0, 0.0, 0.0),
    (1.45, 0.0, 0.0),
)


class Direction(Enum):
    LEFT_TO_RIGHT = "left_to_right"
    RIGHT_TO_LEFT = "right_to_left"
    UNDETERMINED = "undetermined"

    def flipped(self) -> "Direction":
        if self is Direction.LEFT_TO_RIGHT:
            return Direction.RIGHT_TO_LEFT
        if self is Direction.RIGHT_TO_LEFT:
            return Direction.LEFT_TO_RIGHT
        return self


class DepthState(Enum):
    N = "N"
    M = "M"
    F = "F"


@dataclass(frozen=True)
class PddUnit:
    index: int
    detector_ids: tuple[str, str, str]
    port_names: tuple[str, str, str]


@dataclass(frozen=True)
class DdmUnit:
    index: int
    left_input: str
    right_input: str
    g_left: str
    g_right: str
    a_up: str
    a_down: str


@dataclass(frozen=True)
class JudgeBank:
    index: int
    judge_ids: tuple[str, str, str]  # (N, M, F)
    weights: tuple[tuple[float, float, float], ...]
    detector_ids: tuple[str, str, str]


@dataclass(frozen=True)
class CognitiveReadout:
    """Per-window classification with the spike evidence it was based on."""

    window: tuple[float, float]
    direction: Direction
    depth: DepthState
    evidence: dict[str, int]
    unit_index: int
    decisiveness: int
    detector_count: int


@dataclass(frozen=True)
class CtdHandles:
    variant: str
    pdd_units: tuple[PddUnit, ...]
    ddm_units: tuple[tuple[DdmUnit, ...], ...]   # per PDD unit, empty for weights
    judge_banks: tuple[JudgeBank, ...]           # per PDD unit, empty for ddm

    def depth_neuron_ids(self) -> tuple[str, ...]:
        if self.variant == "ddm":
            ids: list[str] = []
            for pair in self.ddm_units:
                for ddm in pair:
                    ids.extend((ddm.a_up, ddm.a_down))
            return tuple(ids)
        return tuple(j for bank in self.judge_banks for j in bank.judge_ids)


# --------------------------------------------------------------------------
# Constructors
# --------------------------------------------------------------------------

def build_pdd_unit(circuit: CircuitGraph, port_names: Sequence[str],
                   params: CtdParams = CtdParams(), index: int | None = None) -> PddUnit:
    """Three port-driven detectors with full pairwise lateral inhibition."""
    if len(port_names) != 3:
        raise BadArity(f"a PDD unit takes exactly 3 ports, got {len(port_names)}")
    if index is None:
        index = len(circuit.ids_with_role("detector")) // 3
    det_params = params.detector_neuron()
    ids = tuple(f"pdd{index}.det{j}" for j in range(3))
    for nid, port in zip(ids, port_names):
        circuit.add_neuron(nid, det_params, role="detector")
        circuit.add_input_port(port, nid, weight=params.w_ext)
    for a in ids:
        for b in ids:
            if a != b:
                circuit.add_synapse(a, b, INH, params.w_inh, delay=1)
    return PddUnit(index=index, detector_ids=ids, port_names=tuple(port_names))


def build_pdd_chain(circuit: CircuitGraph, n_channels: int,
                    params: CtdParams = CtdParams()) -> list[PddUnit]:
    """One PDD unit per consecutive sensor triple, left to right."""
    if n_channels <= 0 or n_channels % 3 != 0:
        raise BadArity(f"sensor count {n_channels} is not a positive multiple of 3")
    units = []
    for u in range(n_channels // 3):
        ports = tuple(f"sensor{3 * u + j}" for j in range(3))
        units.append(build_pdd_unit(circuit, ports, params, index=u))
    return units


def build_ddm_unit(circuit: CircuitGraph, left_id: str, right_id: str,
                   params: CtdParams = CtdParams(), index: int | None = None) -> DdmUnit:
    """Atomic depth module between two adjacent detector outputs.

    The regulatory pair races on mutual inhibition; the assessing pair sees
    the race outcome with reversed stimulating effect (winner excites its own
    side, suppresses the other), so balanced inputs leave both silent.
    """
    for nid in (left_id, right_id):
        if nid not in circuit:
            raise UnknownNeuron(nid)
    if index is None:
        index = len(circuit.ids_with_role("regulatory")) // 2
    reg = params.regulatory_neuron()
    assess = params.assessing_neuron()
    g_left = f"ddm{index}.g_left"
    g_right = f"ddm{index}.g_right"
    a_up = f"ddm{index}.a_up"
    a_down = f"ddm{index}.a_down"
    circuit.add_neuron(g_left, reg, role="regulatory")
    circuit.add_neuron(g_right, reg, role="regulatory")
    circuit.add_neuron(a_up, assess, role="assessing")
    circuit.add_neuron(a_down, assess, role="assessing")

    circuit.add_synapse(left_id, g_left, EXC, params.reg_w_in, delay=1)
    circuit.add_synapse(right_id, g_right, EXC, params.reg_w_in, delay=1)
    circuit.add_synapse(g_left, g_right, INH, params.reg_w_mutual, delay=1)
    circuit.add_synapse(g_right, g_left, INH, params.reg_w_mutual, delay=1)
    circuit.add_synapse(g_right, a_up, EXC, params.assess_w_exc, delay=1)
    circuit.add_synapse(g_left, a_up, INH, params.assess_w_inh, delay=1)
    circuit.add_synapse(g_left, a_down, EXC, params.assess_w_exc, delay=1)
    circuit.add_synapse(g_right, a_down, INH, params.assess_w_inh, delay=1)
    circuit.add_output_port(f"{a_up}.out", a_up)
    circuit.add_output_port(f"{a_down}.out", a_down)
    return DdmUnit(index=index, left_input=left_id, right_input=right_id,
                   g_left=g_left, g_right=g_right, a_up=a_up, a_down=a_down)


def build_judge_bank(circuit: CircuitGraph, pdd_unit: PddUnit,
                     weights: Sequence[Sequence[float]],
                     params: CtdParams = CtdParams(),
                     index: int | None = None) -> JudgeBank:
    """Three excitatory-only judge neurons over one unit's detectors."""
    rows = tuple(tuple(float(w) for w in row) for row in weights)
    if len(rows) != 3 or any(len(r) != 3 for r in rows):
        raise ValueError("judge weights must be a 3x3 matrix")
    for row in rows:
        for w in row:
            if w < 0:
                raise NegativeWeight(f"judge weight {w} < 0")
    if index is None:
        index = len(circuit.ids_with_role("judge")) // 3
    judge_params = params.judge_neuron()
    ids = tuple(f"judge{index}.{s}" for s in ("n", "m", "f"))
    for nid in ids:
        circuit.add_neuron(nid, judge_params, role="judge")
    for i, nid in enumerate(ids):
        for j, det in enumerate(pdd_unit.detector_ids):
            circuit.add_synapse(det, nid, EXC, rows[i][j], delay=1)
        circuit.add_output_port(f"{nid}.out", nid)
    return JudgeBank(index=index, judge_ids=ids, weights=rows,
                     detector_ids=pdd_unit.detector_ids)


def build_ctd(n_sensors: int, variant: str, params: CtdParams = CtdParams(),
              judge_matrix: Sequence[Sequence[float]] | None = None,
              ) -> tuple[CircuitGraph, CtdHandles]:
    """Full detector: PDD chain plus the chosen depth layer.

    The ddm variant instantiates one depth module per adjacent detector pair
    within each unit (two per unit); the weights variant attaches one judge
    bank per unit instead.
    """
    if variant not in ("ddm", "weights"):
        raise ValueError(f"unknown variant {variant!r}")
    circuit = CircuitGraph()
    pdd_units = build_pdd_chain(circuit, n_sensors, params)
    ddm_units: list[tuple[DdmUnit, ...]] = []
    judge_banks: list[JudgeBank] = []
    if variant == "ddm":
        for unit in pdd_units:
            d = unit.detector_ids
            pair = (build_ddm_unit(circuit, d[0], d[1], params),
                    build_ddm_unit(circuit, d[1], d[2], params))
            ddm_units.append(pair)
    else:
        matrix = DEFAULT_JUDGE_MATRIX if judge_matrix is None else judge_matrix
        for unit in pdd_units:
            judge_banks.append(build_judge_bank(circuit, unit, matrix, params))
    handles = CtdHandles(variant=variant, pdd_units=tuple(pdd_units),
                         ddm_units=tuple(ddm_units), judge_banks=tuple(judge_banks))
    return circuit, handles


def build_excitatory_loop_fixture(w_loop: float = 1.2) -> tuple[CircuitGraph, str]:
    """Judge-bank-styled neuron with an excitatory feedback synapse.

    One suprathreshold kick makes it re-fire itself forever; the contrast
    fixture for the seizure-damping checks.
    """
    circuit = CircuitGraph()
    circuit.add_neuron("loop", NeuronParams(), role="judge")
    circuit.add_synapse("loop", "loop", EXC, w_loop, delay=3)
    circuit.add_input_port("kick", "loop", weight=w_loop)
    return circuit, "kick"


# --------------------------------------------------------------------------
# Readouts
# --------------------------------------------------------------------------

def read_direction(trace: Trace, unit: PddUnit, window: tuple[float, float]) -> Direction:
    """Order of first detector activity inside the window.

    Strictly increasing first-spike times across the active detectors (left to
    right, at least two active) reads left-to-right; strictly decreasing reads
    right-to-left; anything else is undetermined.
    """
    t0, t1 = window
    firsts = [(pos, trace.first_spike(nid, t0, t1))
              for pos, nid in enumerate(unit.detector_ids)]
    active = [(pos, ft) for pos, ft in firsts if ft is not None]
    if len(active) < 2:
        return Direction.UNDETERMINED
    times = [ft for _, ft in active]
    if all(a < b for a, b in zip(times, times[1:])):
        return Direction.LEFT_TO_RIGHT
    if all(a > b for a, b in zip(times, times[1:])):
        return Direction.RIGHT_TO_LEFT
    return Direction.UNDETERMINED


def _assessing_counts(trace: Trace, ddms: Iterable[DdmUnit],
                      window: tuple[float, float]) -> tuple[int, int]:
    t0, t1 = window
    up = sum(trace.spike_count(d.a_up, t0, t1) for d in ddms)
    down = sum(trace.spike_count(d.a_down, t0, t1) for d in ddms)
    return up, down


_DEPTH_TABLE = {
    ("up", Direction.LEFT_TO_RIGHT): DepthState.N,
    ("down", Direction.LEFT_TO_RIGHT): DepthState.F,
    ("up", Direction.RIGHT_TO_LEFT): DepthState.F,
    ("down", Direction.RIGHT_TO_LEFT): DepthState.N,
}


def read_depth(trace: Trace, depth: DdmUnit | Sequence[DdmUnit] | JudgeBank,
               direction: Direction, window: tuple[float, float],
               theta_active: int = CtdParams.theta_active) -> DepthState:
    """Depth state from the assessing pair(s) or the judge bank in one window.

    Assessing route: both sides below theta_active, or tied, reads M;
    otherwise the dominant side combined with the travel direction picks N or
    F (approaching is always N). A whole unit's modules may be passed; their
    counts are pooled. Judge route: strict argmax of judge counts, ties M.
    """
    t0, t1 = window
    if isinstance(depth, JudgeBank):
        counts = [trace.spike_count(j, t0, t1) for j in depth.judge_ids]
        best = max(counts)
        if counts.count(best) != 1 or best == 0:
            return DepthState.M
        return (DepthState.N, DepthState.M, DepthState.F)[counts.index(best)]

    ddms = [depth] if isinstance(depth, DdmUnit) else list(depth)
    up, down = _assessing_counts(trace, ddms, window)
    if up < theta_active and down < theta_active:
        return DepthState.M
    if up == down:
        return DepthState.M
    side = "up" if up > down else "down"
    return _DEPTH_TABLE.get((side, direction), DepthState.M)


def trace_direction(trace: Trace, units: Sequence[PddUnit]) -> Direction:
    """Whole-trace direction: most active unit first, then the others."""
    window = (0.0, trace.duration)
    ranked = sorted(
        units,
        key=lambda u: (-sum(trace.spike_count(d) for d in u.detector_ids), u.index))
    for unit in ranked:
        d = read_direction(trace, unit, window)
        if d is not Direction.UNDETERMINED:
            return d
    return Direction.UNDETERMINED


def classify(trace: Trace, handles: CtdHandles,
             params: CtdParams = CtdParams()) -> list[CognitiveReadout]:
    """Sliding-window readout over the whole trace.

    Per window the PDD unit with the most detector spikes wins; its direction
    (falling back to the whole-trace direction when the window alone cannot
    order the detectors) and its depth layer produce the states. Decisiveness
    is the absolute assessing imbalance (or the judge count margin), used to
    pick the dominant window of a run.
    """
    w = params.window_ms
    s = params.stride_ms
    if w > trace.duration:
        raise ValueError(
            f"window {w} ms exceeds trace duration {trace.duration} ms")
    global_dir = trace_direction(trace, handles.pdd_units)
    readouts: list[CognitiveReadout] = []
    t0 = 0.0
    while t0 + w <= trace.duration + 1e-9:
        window = (t0, t0 + w)
        counts = [sum(trace.spike_count(d, *window) for d in u.detector_ids)
                  for u in handles.pdd_units]
        unit = handles.pdd_units[max(range(len(counts)), key=lambda i: (counts[i], -i))]
        det_count = counts[unit.index]

        direction = read_direction(trace, unit, window)
        if direction is Direction.UNDETERMINED and det_count > 0:
            direction = global_dir

        evidence = {d: trace.spike_count(d, *window) for d in unit.detector_ids}
        if handles.variant == "ddm":
            ddms = handles.ddm_units[unit.index]
            depth = read_depth(trace, ddms, direction, window, params.theta_active)
            up, down = _assessing_counts(trace, ddms, window)
            decisiveness = abs(up - down)
            for ddm in ddms:
                for nid in (ddm.g_left, ddm.g_right, ddm.a_up, ddm.a_down):
                    evidence[nid] = trace.spike_count(nid, *window)
        else:
            bank = handles.judge_banks[unit.index]
            depth = read_depth(trace, bank, direction, window, params.theta_active)
            jc = sorted((trace.spike_count(j, *window) for j in bank.judge_ids),
                        reverse=True)
            decisiveness = jc[0] - jc[1]
            for nid in bank.judge_ids:
                evidence[nid] = trace.spike_count(nid, *window)

        readouts.append(CognitiveReadout(window=window, direction=direction,
                                         depth=depth, evidence=evidence,
                                         unit_index=unit.index,
                                         decisiveness=decisiveness,
                                         detector_count=det_count))
        t0 += s
    return readouts


def dominant_readout(readouts: Sequence[CognitiveReadout]) -> CognitiveReadout:
    """The run's single most decisive window; detector evidence breaks ties."""
    if not readouts:
        raise ValueError("no readout windows")
    return max(readouts,
               key=lambda r: (r.decisiveness, r.detector_count, -r.window[0]))
