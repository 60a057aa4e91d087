"""Additive binomial-lattice stock model and a minimal trading MDP.

The stock moves up by ``u`` or down by ``d`` each step. The trading problem
holds one unit or nothing (long/flat) per step and earns the next price
increment while long. Three policy classes are distinguished by what they
may read: ``markov`` sees (t, S_t), ``path_adapted`` sees the full symbol
prefix up to t, ``prescient`` sees the whole path including the future.
Exact evaluation enumerates paths; the optimum over adapted policies comes
from backward induction on the recombining lattice; ``leak_detect`` flags a
policy whose time-t action varies inside a stage-t information atom, i.e.
a decision that looked ahead.

Per-prefix step probabilities exist only so callers can construct the
history-dependent dynamics that Markov-property verification must catch;
everything else treats a per-step (state-independent) probability schedule
as the model.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Mapping, Sequence

import numpy as np

from . import _kernels
from .errors import (PolicyDomainError, SpaceMismatchError, ValidationError)
from .filtration import Filtration, natural_filtration
from .outcome_space import (Event, OutcomeSpace, ProbabilityMeasure,
                            build_space, event_from_prefix)
from .random_variable import RandomVariable, StochasticProcess

UP = "u"
DOWN = "d"
LONG = "long"
FLAT = "flat"
ACTIONS = (LONG, FLAT)

MARKOV = "markov"
PATH_ADAPTED = "path_adapted"
PRESCIENT = "prescient"
POLICY_KINDS = (MARKOV, PATH_ADAPTED, PRESCIENT)


@dataclass(frozen=True)
class LatticeModel:
    """Additive up/down price model: S_{t+1} = S_t + u or S_t - d."""

    s0: float
    u: float
    d: float
    horizon: int
    up_probs: tuple[float, ...] = ()
    prefix_up_probs: Mapping[str, float] | None = None

    def __post_init__(self):
        if self.u <= 0 or self.d <= 0:
            raise ValidationError("increments u and d must be positive")
        if self.horizon < 1:
            raise ValidationError("horizon must be >= 1")
        if not self.up_probs:
            object.__setattr__(self, "up_probs", (0.5,) * self.horizon)
        else:
            object.__setattr__(self, "up_probs",
                               tuple(float(p) for p in self.up_probs))
        if len(self.up_probs) != self.horizon:
            raise ValidationError(
                f"need {self.horizon} step probabilities, got {len(self.up_probs)}")
        for p in self.up_probs:
            if not 0.0 <= p <= 1.0:
                raise ValidationError(f"up-probability {p} outside [0, 1]")
        if self.prefix_up_probs is not None:
            for prefix, p in self.prefix_up_probs.items():
                if len(prefix) >= self.horizon or set(prefix) - {UP, DOWN}:
                    raise ValidationError(f"bad override prefix {prefix!r}")
                if not 0.0 <= p <= 1.0:
                    raise ValidationError(f"override probability {p} outside [0, 1]")

    @property
    def is_state_markov(self) -> bool:
        """True when dynamics depend on history only through (t, S_t)."""
        return not self.prefix_up_probs

    def space(self) -> OutcomeSpace:
        return build_space(self.horizon, (UP, DOWN))

    def state_price(self, n_ups: int, t: int) -> float:
        """Price after t steps of which ``n_ups`` went up.

        All prices are computed from counts with this one expression, so
        recombining prefixes share bit-identical floats.
        """
        return self.s0 + n_ups * self.u - (t - n_ups) * self.d

    def up_probability(self, t: int, prefix: str) -> float:
        """Up-move probability for the step leaving time t."""
        if self.prefix_up_probs and prefix in self.prefix_up_probs:
            return float(self.prefix_up_probs[prefix])
        return self.up_probs[t]

    def path_weight(self, symbols: Sequence[str]) -> float:
        w = 1.0
        prefix = ""
        for t, sym in enumerate(symbols):
            p = self.up_probability(t, prefix)
            w *= p if sym == UP else 1.0 - p
            prefix += sym
        return w

    def measure(self) -> ProbabilityMeasure:
        space = self.space()
        if self.is_state_markov:
            return ProbabilityMeasure(space, step_probs=tuple(
                (p, 1.0 - p) for p in self.up_probs))
        weights = tuple(self.path_weight(space.path_symbols(i))
                        for i in range(space.n_paths))
        return ProbabilityMeasure.from_weights(space, weights)


def replay_state(model: LatticeModel, prefix: Sequence[str]) -> float:
    """Price after applying the prefix increments to the initial price."""
    prefix = tuple(prefix)
    if len(prefix) > model.horizon:
        raise ValidationError(
            f"prefix of length {len(prefix)} exceeds horizon {model.horizon}")
    n_ups = 0
    for sym in prefix:
        if sym == UP:
            n_ups += 1
        elif sym != DOWN:
            raise ValidationError(f"unknown symbol {sym!r}, expected 'u' or 'd'")
    return model.state_price(n_ups, len(prefix))


@dataclass(frozen=True, eq=False)
class PriceLattice:
    """Price process with the space and measure it lives on."""

    space: OutcomeSpace
    measure: ProbabilityMeasure
    prices: StochasticProcess


def build_price_process(model: LatticeModel) -> PriceLattice:
    """Price paths S_0..S_T over the binary outcome space of the model."""
    space = model.space()
    n = space.n_paths
    variables = []
    n_ups = np.zeros(n, dtype=np.int64)
    variables.append(RandomVariable(space, np.full(n, float(model.s0))))
    for t in range(1, model.horizon + 1):
        # Bit (horizon - t) of the path index is 0 for an up move at step t.
        bit = (np.arange(n) >> (model.horizon - t)) & 1
        n_ups += bit == 0
        values = model.s0 + n_ups * model.u - (t - n_ups) * model.d
        variables.append(RandomVariable(space, values.astype(float)))
    return PriceLattice(space, model.measure(),
                        StochasticProcess(space, tuple(variables)))


def price_variable(model: LatticeModel, t: int) -> RandomVariable:
    """S_t as a random variable on the model's space."""
    if not 0 <= t <= model.horizon:
        raise ValidationError(f"t={t} outside horizon 0..{model.horizon}")
    return build_price_process(model).prices[t]


@dataclass(frozen=True)
class MarkovVerdict:
    """Outcome of the Markov-property check."""

    ok: bool
    t: int | None = None
    witness: tuple[Event, Event] | None = None

    def __str__(self):
        if self.ok:
            return "ok"
        return f"violated(t={self.t}, atoms=({self.witness[0]!r}, {self.witness[1]!r}))"

    def to_jsonable(self) -> dict:
        if self.ok:
            return {"kind": "ok"}
        return {"kind": "violated", "t": self.t,
                "witness": [e.to_jsonable() for e in self.witness]}


def verify_markov_property(model: LatticeModel) -> MarkovVerdict:
    """Check that the one-step transition law depends on history only
    through the current price.

    For every t, prefixes landing on the same S_t are compared: their
    conditional distributions of S_{t+1} must be identical. The first
    differing pair of information atoms (canonical prefix order) is the
    witness. State-independent step probabilities always pass.
    """
    space = model.space()
    for t in range(model.horizon):
        by_price: dict[float, list[str]] = {}
        order: list[float] = []
        for idx in range(2 ** t):
            prefix = format(idx, f"0{t}b").translate(
                str.maketrans("01", UP + DOWN)) if t else ""
            n_ups = prefix.count(UP)
            price = model.state_price(n_ups, t)
            if price not in by_price:
                by_price[price] = []
                order.append(price)
            by_price[price].append(prefix)
        for price in order:
            group = by_price[price]
            first = group[0]
            ref = _transition_distribution(model, t, first)
            for other in group[1:]:
                if _transition_distribution(model, t, other) != ref:
                    return MarkovVerdict(
                        False, t=t,
                        witness=(event_from_prefix(space, tuple(first)),
                                 event_from_prefix(space, tuple(other))))
    return MarkovVerdict(True)


def _transition_distribution(model: LatticeModel, t: int,
                             prefix: str) -> dict[float, float]:
    p = model.up_probability(t, prefix)
    n_ups = prefix.count(UP)
    return {model.state_price(n_ups + 1, t + 1): p,
            model.state_price(n_ups, t + 1): 1.0 - p}


@dataclass(frozen=True)
class Policy:
    """Decision rule labelled by what it is allowed to observe.

    ``rule`` is called as rule(t, context) where context is the current
    price (markov), the symbol prefix up to t (path_adapted), or the whole
    path string (prescient).
    """

    kind: str
    rule: Callable[[int, object], str]
    label: str = ""

    def __post_init__(self):
        if self.kind not in POLICY_KINDS:
            raise ValidationError(f"unknown policy kind {self.kind!r}")

    @classmethod
    def markov(cls, rule, label="") -> "Policy":
        return cls(MARKOV, rule, label)

    @classmethod
    def path_adapted(cls, rule, label="") -> "Policy":
        return cls(PATH_ADAPTED, rule, label)

    @classmethod
    def prescient(cls, rule, label="") -> "Policy":
        return cls(PRESCIENT, rule, label)

    @classmethod
    def always_long(cls) -> "Policy":
        return cls.markov(lambda t, price: LONG, label="always-long")

    @classmethod
    def always_flat(cls) -> "Policy":
        return cls.markov(lambda t, price: FLAT, label="always-flat")

    @classmethod
    def next_step_up(cls) -> "Policy":
        """Prescient benchmark: long exactly when the next move is up."""
        return cls.prescient(
            lambda t, path: LONG if path[t] == UP else FLAT,
            label="next-step-up")

    @classmethod
    def from_table(cls, kind: str,
                   table: Mapping[tuple[int, object], str],
                   label="table") -> "Policy":
        table = dict(table)
        for key, action in table.items():
            if action not in ACTIONS:
                raise ValidationError(f"unknown action {action!r} at {key}")

        def rule(t, context):
            try:
                return table[(t, context)]
            except KeyError:
                raise PolicyDomainError(
                    f"policy has no action for t={t}, input={context!r}") from None

        return cls(kind, rule, label)

    def as_path_adapted(self, model: "LatticeModel") -> "Policy":
        """View a markov policy as a path-adapted one; identical behavior,
        since the prefix determines the price."""
        if self.kind == PATH_ADAPTED:
            return self
        if self.kind != MARKOV:
            raise ValidationError("only markov policies widen to path_adapted")

        def rule(t, prefix, inner=self.rule):
            return inner(t, model.state_price(prefix.count(UP), t))

        return Policy(PATH_ADAPTED, rule, label=self.label or "widened")

    @classmethod
    def from_jsonable(cls, data: dict) -> "Policy":
        kind = data.get("kind")
        if kind == MARKOV:
            table = {(int(r["t"]), float(r["state"])): r["action"]
                     for r in data["rows"]}
        elif kind == PATH_ADAPTED:
            table = {(int(r["t"]), str(r["prefix"])): r["action"]
                     for r in data["rows"]}
        else:
            raise ValidationError(
                f"policy JSON kind must be markov or path_adapted, got {kind!r}")
        return cls.from_table(kind, table, label=data.get("label", "table"))


def policy_action(model: LatticeModel, policy: Policy, t: int,
                  symbols: Sequence[str]) -> str:
    """The policy's time-t action on the given full path."""
    if not 0 <= t < model.horizon:
        raise ValidationError(f"decision epoch {t} outside 0..{model.horizon - 1}")
    if policy.kind == MARKOV:
        n_ups = sum(1 for s in symbols[:t] if s == UP)
        context = model.state_price(n_ups, t)
    elif policy.kind == PATH_ADAPTED:
        context = "".join(symbols[:t])
    else:
        context = "".join(symbols)
    action = policy.rule(t, context)
    if action not in ACTIONS:
        raise ValidationError(
            f"policy returned {action!r}, expected one of {ACTIONS}")
    return action


def action_indicator(model: LatticeModel, policy: Policy,
                     t: int) -> RandomVariable:
    """The time-t decision as a 0/1 variable (1 = long) over all paths."""
    space = model.space()
    values = np.array(
        [1.0 if policy_action(model, policy, t, space.path_symbols(i)) == LONG
         else 0.0 for i in range(space.n_paths)])
    return RandomVariable(space, values)


@dataclass(frozen=True)
class TradingMDP:
    """One-unit long/flat trading on a lattice model.

    Reward at step t is position * (S_{t+1} - S_t), discounted by rho**t.
    """

    model: LatticeModel
    rho: float = 1.0

    def __post_init__(self):
        if not 0.0 < self.rho <= 1.0:
            raise ValidationError(f"discount rho={self.rho} outside (0, 1]")


def path_reward(mdp: TradingMDP, policy: Policy,
                symbols: Sequence[str]) -> float:
    """Realized discounted reward of the policy on one path."""
    model = mdp.model
    total = 0.0
    disc = 1.0
    for t in range(model.horizon):
        if policy_action(model, policy, t, symbols) == LONG:
            total += disc * (model.u if symbols[t] == UP else -model.d)
        disc *= mdp.rho
    return total


def evaluate_policy_exact(mdp: TradingMDP, policy: Policy) -> float:
    """Expected discounted reward by full path enumeration."""
    space = mdp.model.space()
    weights = mdp.model.measure().weight_vector
    return math.fsum(
        weights[i] * path_reward(mdp, policy, space.path_symbols(i))
        for i in range(space.n_paths))


def optimal_adapted_value(mdp: TradingMDP) -> tuple[float, Policy]:
    """Best expected discounted reward over adapted policies, with a greedy
    markov policy achieving it, by backward induction on lattice nodes.

    The position does not influence the dynamics, so each epoch decouples:
    go long iff the one-step conditional drift is positive, ties to flat.
    With a per-step probability schedule this is also optimal among all
    path-adapted policies.
    """
    model = mdp.model
    if not model.is_state_markov:
        raise ValidationError(
            "backward induction needs state-Markov dynamics; "
            "this model has per-prefix probability overrides")
    horizon = model.horizon
    values = [0.0] * (horizon + 1)
    table: dict[tuple[int, float], str] = {}
    for t in range(horizon - 1, -1, -1):
        p = model.up_probs[t]
        drift = p * model.u - (1.0 - p) * model.d
        action = LONG if drift > 0.0 else FLAT
        next_values = values
        values = [max(drift, 0.0)
                  + mdp.rho * (p * next_values[k + 1] + (1.0 - p) * next_values[k])
                  for k in range(t + 1)]
        for k in range(t + 1):
            table[(t, model.state_price(k, t))] = action
    return values[0], Policy.from_table(MARKOV, table, label="optimal")


@dataclass(frozen=True)
class LeakVerdict:
    """Outcome of checking a policy for use of unrevealed information."""

    adapted: bool
    t: int | None = None
    atom: Event | None = None
    actions: tuple[str, str] | None = None

    def __str__(self):
        if self.adapted:
            return "adapted"
        return (f"leak(t={self.t}, atom={self.atom!r}, "
                f"actions={self.actions})")

    def to_jsonable(self) -> dict:
        if self.adapted:
            return {"kind": "adapted"}
        return {"kind": "leak", "t": self.t, "atom": self.atom.to_jsonable(),
                "actions": list(self.actions)}


def leak_detect(model: LatticeModel, policy: Policy,
                filtration: Filtration | None = None) -> LeakVerdict:
    """Check the policy's time-t decisions are constant on every stage-t
    information atom; a split atom means the decision read the future.

    Defaults to the natural filtration of the model's space. The model is
    needed to give markov policies their price context.
    """
    space = model.space()
    if filtration is None:
        filtration = natural_filtration(space)
    if filtration.space != space:
        raise SpaceMismatchError("filtration on a different space")
    if len(filtration) < model.horizon:
        raise ValidationError("filtration has fewer stages than decision epochs")
    for t in range(model.horizon):
        for atom in filtration[t].atoms:
            first_action = None
            for idx in atom.indices():
                action = policy_action(model, policy, t, space.path_symbols(idx))
                if first_action is None:
                    first_action = action
                elif action != first_action:
                    return LeakVerdict(False, t=t, atom=atom,
                                       actions=(first_action, action))
    return LeakVerdict(True)


def _prefix_string(bits: int, length: int) -> str:
    if length == 0:
        return ""
    return format(bits, f"0{length}b").translate(str.maketrans("01", DOWN + UP))


def _sample_up_matrix(model: LatticeModel, n: int,
                      rng: np.random.Generator) -> np.ndarray:
    """0/1 up-move indicators, shape (n, T), honoring prefix overrides."""
    ups = np.zeros((n, model.horizon), dtype=np.uint8)
    if model.is_state_markov:
        for t in range(model.horizon):
            ups[:, t] = rng.random(n) < model.up_probs[t]
        return ups
    prefix_ids = np.zeros(n, dtype=np.int64)
    for t in range(model.horizon):
        probs = np.full(n, model.up_probs[t])
        for pid in np.unique(prefix_ids):
            prefix = _prefix_string(int(pid), t)
            if prefix in model.prefix_up_probs:
                probs[prefix_ids == pid] = model.prefix_up_probs[prefix]
        ups[:, t] = rng.random(n) < probs
        prefix_ids = prefix_ids * 2 + ups[:, t]
    return ups


def _positions_matrix(model: LatticeModel, policy: Policy,
                      ups: np.ndarray) -> np.ndarray:
    """0/1 long indicators per (sample, epoch); policy calls are memoized
    per distinct decision input."""
    n, horizon = ups.shape
    positions = np.zeros((n, horizon), dtype=np.uint8)
    if policy.kind == MARKOV:
        n_ups = np.zeros(n, dtype=np.int64)
        for t in range(horizon):
            long_at = np.array(
                [policy.rule(t, model.state_price(k, t)) == LONG
                 for k in range(t + 1)], dtype=np.uint8)
            positions[:, t] = long_at[n_ups]
            n_ups += ups[:, t]
        return positions
    if policy.kind == PATH_ADAPTED:
        prefix_ids = np.zeros(n, dtype=np.int64)
        for t in range(horizon):
            distinct, inverse = np.unique(prefix_ids, return_inverse=True)
            long_at = np.array(
                [policy.rule(t, _prefix_string(int(pid), t)) == LONG
                 for pid in distinct], dtype=np.uint8)
            positions[:, t] = long_at[inverse]
            prefix_ids = prefix_ids * 2 + ups[:, t]
        return positions
    path_ids = np.zeros(n, dtype=np.int64)
    for t in range(horizon):
        path_ids = path_ids * 2 + ups[:, t]
    distinct, inverse = np.unique(path_ids, return_inverse=True)
    long_rows = np.zeros((len(distinct), horizon), dtype=np.uint8)
    for row, pid in enumerate(distinct):
        path = _prefix_string(int(pid), horizon)
        for t in range(horizon):
            long_rows[row, t] = policy.rule(t, path) == LONG
    return long_rows[inverse]


def monte_carlo_value(mdp: TradingMDP, policy: Policy, n: int,
                      seed: int) -> tuple[float, float]:
    """Sample-mean estimate of the exact policy value, with its standard
    error; deterministic for a given seed."""
    if n < 1:
        raise ValidationError(f"sample count must be >= 1, got {n}")
    model = mdp.model
    rng = np.random.default_rng(seed)
    ups = _sample_up_matrix(model, n, rng)
    positions = _positions_matrix(model, policy, ups)
    rewards = _kernels.path_rewards(ups, positions, model.u, model.d, mdp.rho)
    mean = float(rewards.mean())
    stderr = 0.0 if n == 1 else float(rewards.std(ddof=1) / math.sqrt(n))
    return mean, stderr
