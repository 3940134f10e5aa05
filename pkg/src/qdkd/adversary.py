"""Channel adversaries: intercept-measure-resend attacks on either leg.

Eve projectively measures the travel photon while it is in transit and
forwards the collapsed eigenstate. A Forward attack hits the Alice->Bob leg
(and therefore control rounds); a Backward attack hits only the returning
photon of message rounds, so control-round statistics never see it.
"""

from dataclasses import dataclass, field
from enum import Enum

from .protocol import BellAnnouncement, ClassicalMessage
from .quantum import MeasBasis, QubitId, TwoQubitState, measure_qubit


class ChannelLeg(Enum):
    FORWARD = "forward"  # Alice -> Bob
    BACKWARD = "backward"  # Bob -> Alice (message rounds only)


class EveBasisPolicy(Enum):
    Z = "z"
    X = "x"
    RANDOM = "random"  # fresh uniform basis per intercepted photon


@dataclass(frozen=True)
class NoAttack:
    pass


@dataclass(frozen=True)
class InterceptResend:
    leg: ChannelLeg
    basis_policy: EveBasisPolicy = EveBasisPolicy.Z


AttackStrategy = NoAttack | InterceptResend


@dataclass(frozen=True)
class EveObservation:
    """One intercepted photon: where, in which basis, and the bit Eve saw."""

    round_index: int
    leg: ChannelLeg
    basis: MeasBasis
    bit: int


@dataclass
class EveRecord:
    """Everything physically available to Eve: her measurement log plus a
    copy of every public classical message."""

    observations: list[EveObservation] = field(default_factory=list)
    transcript: list[ClassicalMessage] = field(default_factory=list)


def apply_attack(
    state: TwoQubitState, leg: ChannelLeg, strategy: AttackStrategy, rng, round_index: int = -1
) -> tuple[TwoQubitState, EveObservation | None]:
    """Pass the in-transit travel photon through the adversary.

    NoAttack and a non-matching leg leave the state untouched. A matching
    intercept-resend measures photon t projectively and forwards the
    collapsed eigenstate.
    """
    if isinstance(strategy, NoAttack) or strategy.leg is not leg:
        return state, None
    if strategy.basis_policy is EveBasisPolicy.RANDOM:
        basis = MeasBasis(int(rng.integers(2)))
    elif strategy.basis_policy is EveBasisPolicy.X:
        basis = MeasBasis.X
    else:
        basis = MeasBasis.Z
    bit, collapsed = measure_qubit(state, QubitId.T, basis, rng.random())
    return collapsed, EveObservation(round_index, leg, basis, bit)


@dataclass(frozen=True)
class RoundInference:
    """What Eve can pin down about one message round's key material.

    relation is the public XOR of the parties' 2-bit labels (the announced
    Bell outcome). resolved holds key bits her measurements determine
    individually; for the supported intercept-resend strategies the posterior
    over each party's label stays uniform, so it is empty.
    """

    relation: int
    resolved: tuple[int, ...] = ()


def eve_inference(record: EveRecord, transcript) -> list[RoundInference]:
    """Per-message-round information extractable from Eve's viewpoint.

    Every announced Bell outcome hands the adversary the XOR relation between
    Alice's and Bob's labels, two bits per message round, even with no attack
    at all.
    """
    return [
        RoundInference(relation=int(msg.outcome))
        for msg in transcript
        if isinstance(msg, BellAnnouncement)
    ]
