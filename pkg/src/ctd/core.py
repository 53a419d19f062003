"""Discrete-time leaky integrate-and-fire dynamics over a directed circuit graph.

The model is deliberately minimal: exact exponential leak per step, synapses
deliver signed instantaneous current deltas after an integer step delay, and
all deliveries arriving at one step are summed (math.fsum, so the result does
not depend on synapse ordering) before the threshold test.
"""

from __future__ import annotations

import bisect
import math
from dataclasses import dataclass
from enum import Enum
from typing import Mapping

from .errors import DuplicatePort, UnknownNeuron, UnknownPort
from .world import SpikeTrain


@dataclass(frozen=True)
class NeuronParams:
    """Membrane constants; times in ms, potentials dimensionless."""

    tau_m: float = 20.0
    v_rest: float = 0.0
    v_threshold: float = 1.0
    v_reset: float = 0.0
    refractory: float = 2.0
    v_floor: float = -1.0

    def __post_init__(self) -> None:
        if self.tau_m <= 0:
            raise ValueError("tau_m must be positive")
        if self.refractory < 0:
            raise ValueError("refractory must be nonnegative")
        if not self.v_reset < self.v_threshold:
            raise ValueError("v_reset must lie below v_threshold")
        if not self.v_rest <= self.v_threshold:
            raise ValueError("v_rest must not exceed v_threshold")
        if self.v_floor > min(self.v_reset, self.v_rest):
            raise ValueError("v_floor must lie at or below v_reset and v_rest")


@dataclass
class NeuronState:
    v: float
    refractory_until: float = -math.inf
    last_spike: float | None = None


def initial_state(params: NeuronParams) -> NeuronState:
    return NeuronState(v=params.v_rest)


class ConnectionKind(Enum):
    EXCITATORY = "excitatory"
    INHIBITORY = "inhibitory"

    @property
    def sign(self) -> int:
        return 1 if self is ConnectionKind.EXCITATORY else -1


@dataclass(frozen=True)
class Synapse:
    pre: str
    post: str
    kind: ConnectionKind
    magnitude: float
    delay: int = 1

    def __post_init__(self) -> None:
        if self.magnitude < 0:
            raise ValueError("synapse magnitude must be nonnegative")
        if self.delay < 1:
            raise ValueError("synapse delay must be at least one step")

    @property
    def signed_weight(self) -> float:
        return self.kind.sign * self.magnitude


@dataclass(frozen=True)
class InputPort:
    neuron: str
    weight: float = 1.1


class CircuitGraph:
    """Neurons, delayed signed synapses, and named injection/readout ports.

    Mutable while circuit constructors run; treated as immutable afterwards.
    """

    def __init__(self) -> None:
        self._params: dict[str, NeuronParams] = {}
        self._roles: dict[str, str] = {}
        self.synapses: list[Synapse] = []
        self.input_ports: dict[str, InputPort] = {}
        self.output_ports: dict[str, str] = {}

    @property
    def neuron_ids(self) -> tuple[str, ...]:
        return tuple(self._params)

    def __contains__(self, neuron_id: str) -> bool:
        return neuron_id in self._params

    def params_of(self, neuron_id: str) -> NeuronParams:
        try:
            return self._params[neuron_id]
        except KeyError:
            raise UnknownNeuron(neuron_id) from None

    def role_of(self, neuron_id: str) -> str:
        self.params_of(neuron_id)
        return self._roles[neuron_id]

    def ids_with_role(self, role: str) -> tuple[str, ...]:
        return tuple(i for i, r in self._roles.items() if r == role)

    def add_neuron(self, neuron_id: str, params: NeuronParams = NeuronParams(),
                   role: str = "") -> None:
        if neuron_id in self._params:
            raise ValueError(f"duplicate neuron id {neuron_id!r}")
        self._params[neuron_id] = params
        self._roles[neuron_id] = role

    def add_synapse(self, pre: str, post: str, kind: ConnectionKind,
                    magnitude: float, delay: int = 1) -> Synapse:
        for endpoint in (pre, post):
            if endpoint not in self._params:
                raise UnknownNeuron(endpoint)
        syn = Synapse(pre, post, kind, magnitude, delay)
        self.synapses.append(syn)
        return syn

    def add_input_port(self, name: str, neuron_id: str, weight: float = 1.1) -> None:
        if name in self.input_ports:
            raise DuplicatePort(name)
        if neuron_id not in self._params:
            raise UnknownNeuron(neuron_id)
        self.input_ports[name] = InputPort(neuron_id, weight)

    def add_output_port(self, name: str, neuron_id: str) -> None:
        if name in self.output_ports:
            raise DuplicatePort(name)
        if neuron_id not in self._params:
            raise UnknownNeuron(neuron_id)
        self.output_ports[name] = neuron_id


@dataclass(frozen=True)
class Trace:
    """Complete record of one simulation: spike times and sampled potentials."""

    dt: float
    duration: float
    spikes: dict[str, tuple[float, ...]]
    potentials: dict[str, tuple[float, ...]]

    @property
    def neuron_ids(self) -> tuple[str, ...]:
        return tuple(self.spikes)

    def spike_count(self, neuron_id: str, t0: float | None = None,
                    t1: float | None = None) -> int:
        times = self.spikes[neuron_id]
        if t0 is None and t1 is None:
            return len(times)
        lo = bisect.bisect_left(times, t0 if t0 is not None else 0.0)
        hi = bisect.bisect_left(times, t1 if t1 is not None else self.duration + 1.0)
        return hi - lo

    def first_spike(self, neuron_id: str, t0: float, t1: float) -> float | None:
        times = self.spikes[neuron_id]
        lo = bisect.bisect_left(times, t0)
        if lo < len(times) and times[lo] < t1:
            return times[lo]
        return None

    def last_spike_time(self) -> float | None:
        last = None
        for times in self.spikes.values():
            if times and (last is None or times[-1] > last):
                last = times[-1]
        return last


def step_neuron(state: NeuronState, params: NeuronParams, synaptic_input: float,
                t: float, dt: float) -> tuple[NeuronState, bool]:
    """One membrane update: exact exponential leak, then the summed input delta.

    Firing requires being past the refractory window; a spike resets the
    potential and records the spike time.
    """
    decay = math.exp(-dt / params.tau_m)
    v = params.v_rest + (state.v - params.v_rest) * decay + synaptic_input
    if v < params.v_floor:
        v = params.v_floor
    if t >= state.refractory_until and v >= params.v_threshold:
        return NeuronState(v=params.v_reset, refractory_until=t + params.refractory,
                           last_spike=t), True
    return NeuronState(v=v, refractory_until=state.refractory_until,
                       last_spike=state.last_spike), False


def step_circuit(circuit: CircuitGraph, states: dict[str, NeuronState],
                 pending: dict[int, dict[str, list[float]]],
                 external: Mapping[str, int], t: float, dt: float,
                 ) -> tuple[dict[str, NeuronState], dict[int, dict[str, list[float]]], set[str]]:
    """Advance every neuron by one step; observation-then-commit semantics.

    `pending` maps absolute step index to per-neuron lists of signed weights
    due to arrive at that step; both `states` and `pending` are updated in
    place and returned. External injections contribute the port weight once
    per spike. Spikes fired this step are enqueued at t + delay*dt.
    """
    step_idx = int(round(t / dt))
    arrivals = pending.pop(step_idx, {})
    for port, count in external.items():
        spec = circuit.input_ports.get(port)
        if spec is None:
            raise UnknownPort(port)
        if count:
            arrivals.setdefault(spec.neuron, []).extend([spec.weight] * int(count))

    fired: set[str] = set()
    for nid in circuit.neuron_ids:
        inputs = arrivals.get(nid)
        drive = math.fsum(inputs) if inputs else 0.0
        states[nid], did_fire = step_neuron(states[nid], circuit.params_of(nid), drive, t, dt)
        if did_fire:
            fired.add(nid)

    if fired:
        for syn in circuit.synapses:
            if syn.pre in fired:
                slot = pending.setdefault(step_idx + syn.delay, {})
                slot.setdefault(syn.post, []).append(syn.signed_weight)
    return states, pending, fired


def simulate(circuit: CircuitGraph, drive: Mapping[str, SpikeTrain],
             duration: float, dt: float) -> Trace:
    """Run the circuit against per-port drive trains; deterministic end to end."""
    if duration <= 0 or dt <= 0:
        raise ValueError("duration and dt must be positive")
    n_steps = int(round(duration / dt))
    if abs(n_steps * dt - duration) > 1e-9:
        raise ValueError("duration must be an integer multiple of dt")

    external_schedule: dict[int, dict[str, int]] = {}
    for port, train in drive.items():
        if port not in circuit.input_ports:
            raise UnknownPort(port)
        for s in train.times:
            if not (0.0 <= s < duration):
                raise ValueError(f"drive spike {s} outside [0, {duration})")
            k = int(math.floor(s / dt + 1e-9))
            slot = external_schedule.setdefault(k, {})
            slot[port] = slot.get(port, 0) + 1

    states = {nid: initial_state(circuit.params_of(nid)) for nid in circuit.neuron_ids}
    pending: dict[int, dict[str, list[float]]] = {}
    spikes: dict[str, list[float]] = {nid: [] for nid in circuit.neuron_ids}
    potentials: dict[str, list[float]] = {nid: [] for nid in circuit.neuron_ids}

    for k in range(n_steps):
        t = k * dt
        _, _, fired = step_circuit(circuit, states, pending,
                                   external_schedule.get(k, {}), t, dt)
        for nid in circuit.neuron_ids:
            potentials[nid].append(states[nid].v)
        for nid in fired:
            spikes[nid].append(t)

    return Trace(dt=dt, duration=duration,
                 spikes={nid: tuple(ts) for nid, ts in spikes.items()},
                 potentials={nid: tuple(vs) for nid, vs in potentials.items()})
