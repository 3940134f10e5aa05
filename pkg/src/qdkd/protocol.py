"""Two-party protocol logic: control-mode correlation checks, message-mode
dense coding, key accumulation, and the public key-fraction verification.

Alice prepares a Psi+ pair, encodes two bits by applying one of u0..u3 to the
travel photon, and sends it. Bob either measures it in a random Z/X basis and
announces basis and result (control mode, eavesdropping check), or encodes
two more bits with his own unitary and returns the photon for Alice's Bell
measurement (message mode). The announced Bell outcome lets each party decode
the other's unitary by XOR of the 2-bit labels.

All protocol state machines here are single-threaded per session; randomness
enters only through injected generators.
"""

import math
from dataclasses import dataclass, field
from enum import Enum

from .errors import ProtocolError
from .quantum import (
    BellOutcome,
    LocalUnitary,
    MeasBasis,
    QubitId,
    TwoQubitState,
    apply_local,
    bell_state,
    measure_bell,
    measure_qubit,
)


class RoundMode(Enum):
    CONTROL = "control"
    MESSAGE = "message"


class Correlation(Enum):
    """Correlated means both parties observed the same bit in the shared basis."""

    CORRELATED = "correlated"
    ANTICORRELATED = "anticorrelated"


class ControlVerdict(Enum):
    PASS = "pass"
    EVE_DETECTED = "eve-detected"


class CheckVerdict(Enum):
    ACCEPT = "accept"
    ABORT = "abort"


class KeyMode(Enum):
    """Combined keeps both parties' bits per message round (4 bits); the
    single modes keep only one party's 2 bits and discard the other key."""

    COMBINED = "combined"
    SINGLE_ALICE = "single-alice"
    SINGLE_BOB = "single-bob"

    @property
    def bits_per_round(self) -> int:
        return 4 if self is KeyMode.COMBINED else 2


# --- Public classical messages (authenticated; visible to the adversary) ---


@dataclass(frozen=True)
class ModeAnnouncement:
    mode: RoundMode


@dataclass(frozen=True)
class BasisAnnouncement:
    basis: MeasBasis


@dataclass(frozen=True)
class ResultAnnouncement:
    bit: int


@dataclass(frozen=True)
class BellAnnouncement:
    outcome: BellOutcome


@dataclass(frozen=True)
class KeyCheckChallenge:
    positions: tuple[int, ...]


@dataclass(frozen=True)
class KeyCheckResponse:
    bits: tuple[int, ...]


@dataclass(frozen=True)
class AbortNotice:
    reason: str


ClassicalMessage = (
    ModeAnnouncement
    | BasisAnnouncement
    | ResultAnnouncement
    | BellAnnouncement
    | KeyCheckChallenge
    | KeyCheckResponse
    | AbortNotice
)


# The deterministic correlation an honest run exhibits, by (unitary, basis).
# Z basis: the Psi states anticorrelate h and t, the Phi states correlate.
# X basis: Psi+ = (|++> - |-->)/sqrt2 and Phi+ = (|++> + |-->)/sqrt2 correlate,
# Psi- = (|-+> - |+->)/sqrt2 and Phi- = (|+-> + |-+>)/sqrt2 anticorrelate.
_EXPECTED_CORRELATION = {
    (LocalUnitary.U0, MeasBasis.Z): Correlation.ANTICORRELATED,
    (LocalUnitary.U1, MeasBasis.Z): Correlation.ANTICORRELATED,
    (LocalUnitary.U2, MeasBasis.Z): Correlation.CORRELATED,
    (LocalUnitary.U3, MeasBasis.Z): Correlation.CORRELATED,
    (LocalUnitary.U0, MeasBasis.X): Correlation.CORRELATED,
    (LocalUnitary.U1, MeasBasis.X): Correlation.ANTICORRELATED,
    (LocalUnitary.U2, MeasBasis.X): Correlation.CORRELATED,
    (LocalUnitary.U3, MeasBasis.X): Correlation.ANTICORRELATED,
}


def expected_correlation(u: LocalUnitary, basis: MeasBasis) -> Correlation:
    """The correlation Alice expects in an honest control round."""
    return _EXPECTED_CORRELATION[(LocalUnitary(u), MeasBasis(basis))]


def alice_prepare(rng) -> tuple[TwoQubitState, LocalUnitary]:
    """Prepare Psi+ and encode a uniformly random unitary on the travel photon.

    Returns the joint state (photon h retained by Alice, photon t in transit)
    and Alice's private choice u_A.
    """
    u_a = LocalUnitary(int(rng.integers(4)))
    state = apply_local(bell_state(BellOutcome.PSI_PLUS), QubitId.T, u_a)
    return state, u_a


def bob_choose_mode(control_prob: float, rng) -> RoundMode:
    """Bob picks control mode with probability control_prob."""
    return RoundMode.CONTROL if rng.random() < control_prob else RoundMode.MESSAGE


@dataclass(frozen=True)
class ControlOutcome:
    verdict: ControlVerdict
    basis: MeasBasis
    bob_bit: int
    alice_bit: int
    transcript: tuple[ClassicalMessage, ...]


def run_control_round(u_a: LocalUnitary, state: TwoQubitState, rng) -> ControlOutcome:
    """One control round over the (possibly attacked) pair after Alice's encoding.

    Bob measures the travel photon in a uniformly random basis and announces
    basis and result; Alice measures her photon in the same basis and flags
    Eve iff the observed correlation differs from the honest expectation.
    Contributes no key bits.
    """
    basis = MeasBasis(int(rng.integers(2)))
    bob_bit, after_bob = measure_qubit(state, QubitId.T, basis, rng.random())
    alice_bit, _ = measure_qubit(after_bob, QubitId.H, basis, rng.random())
    observed = Correlation.CORRELATED if alice_bit == bob_bit else Correlation.ANTICORRELATED
    verdict = (
        ControlVerdict.PASS
        if observed == expected_correlation(u_a, basis)
        else ControlVerdict.EVE_DETECTED
    )
    transcript = [
        ModeAnnouncement(RoundMode.CONTROL),
        BasisAnnouncement(basis),
        ResultAnnouncement(bob_bit),
    ]
    if verdict is ControlVerdict.EVE_DETECTED:
        transcript.append(AbortNotice("control-round correlation mismatch"))
    return ControlOutcome(verdict, basis, bob_bit, alice_bit, tuple(transcript))


@dataclass(frozen=True)
class MessageOutcome:
    u_b: LocalUnitary
    announced: BellOutcome
    alice_view: LocalUnitary  # Alice's decode of Bob's unitary
    bob_view: LocalUnitary  # Bob's decode of Alice's unitary
    transcript: tuple[ClassicalMessage, ...]


def run_message_round(
    u_a: LocalUnitary, state: TwoQubitState, rng, return_channel=None
) -> MessageOutcome:
    """One message round: Bob encodes u_B on the travel photon and returns it;
    Alice Bell-measures the pair and announces the outcome publicly.

    return_channel, when given, transforms the state while the photon travels
    back to Alice (the harness binds the adversary here).
    """
    u_b = LocalUnitary(int(rng.integers(4)))
    encoded = apply_local(state, QubitId.T, u_b)
    in_transit = return_channel(encoded) if return_channel is not None else encoded
    announced, _ = measure_bell(in_transit, rng.random())
    transcript = (
        ModeAnnouncement(RoundMode.MESSAGE),
        BellAnnouncement(announced),
    )
    return MessageOutcome(u_b, announced, decode(u_a, announced), decode(u_b, announced), transcript)


def decode(own_u: LocalUnitary, announced: BellOutcome) -> LocalUnitary:
    """Recover the other party's unitary: label XOR of outcome and own choice."""
    return LocalUnitary(int(announced) ^ int(own_u))


# --- Key material ---


@dataclass(frozen=True)
class KeyRound:
    """One message round's contribution as seen by one party."""

    index: int
    alice_bits: int  # 2-bit label of Alice's unitary (own or decoded)
    bob_bits: int  # 2-bit label of Bob's unitary (own or decoded)


@dataclass
class KeyBuffer:
    """Per-round records plus the flat bit sequence for the active key mode.

    Within the flat sequence, even offsets inside each 2-bit label carry the
    amplitude (Psi vs Phi) bit, odd offsets the phase (+ vs -) bit.
    """

    rounds: list[KeyRound] = field(default_factory=list)
    bits: list[int] = field(default_factory=list)


def accumulate_key(buffer: KeyBuffer, round_: KeyRound, mode: KeyMode) -> KeyBuffer:
    """Append one decoded message round to the buffer under the given mode.

    Combined appends Alice's 2 bits then Bob's 2 bits; the single modes keep
    only the configured party's bits.
    """
    buffer.rounds.append(round_)
    if mode is KeyMode.COMBINED:
        buffer.bits.extend(_label_bits(round_.alice_bits))
        buffer.bits.extend(_label_bits(round_.bob_bits))
    elif mode is KeyMode.SINGLE_ALICE:
        buffer.bits.extend(_label_bits(round_.alice_bits))
    else:
        buffer.bits.extend(_label_bits(round_.bob_bits))
    return buffer


def _label_bits(label: int) -> tuple[int, int]:
    return (label >> 1) & 1, label & 1


def checked_count(fraction: float, length: int) -> int:
    """Number of key positions publicly compared: ceil(fraction * length)."""
    return math.ceil(fraction * length)


@dataclass(frozen=True)
class KeyCheckPolicy:
    """fraction of the key announced publicly; abort when mismatches exceed
    the threshold (0 by default: the simulated channel is noiseless)."""

    fraction: float
    mismatch_threshold: int = 0


@dataclass(frozen=True)
class KeyCheckResult:
    verdict: CheckVerdict
    mismatches: int
    positions: tuple[int, ...]
    alice_final: tuple[int, ...]
    bob_final: tuple[int, ...]
    transcript: tuple[ClassicalMessage, ...]


def key_check(alice_key, bob_key, policy: KeyCheckPolicy, public_rng) -> KeyCheckResult:
    """Publicly compare a seed-derived sample of key positions.

    The sample is the prefix of a public random permutation, so a larger
    fraction always checks a superset of positions (abort monotonicity).
    Checked positions are removed from both final keys.
    """
    if len(alice_key) != len(bob_key):
        raise ProtocolError(
            f"key length mismatch: {len(alice_key)} vs {len(bob_key)} (transcript desync)"
        )
    length = len(alice_key)
    m = checked_count(policy.fraction, length)
    if m > 0:
        order = public_rng.permutation(length)
        positions = tuple(sorted(int(i) for i in order[:m]))
    else:
        positions = ()
    alice_sample = tuple(alice_key[i] for i in positions)
    bob_sample = tuple(bob_key[i] for i in positions)
    mismatches = sum(a != b for a, b in zip(alice_sample, bob_sample))
    verdict = (
        CheckVerdict.ABORT if mismatches > policy.mismatch_threshold else CheckVerdict.ACCEPT
    )
    checked = set(positions)
    alice_final = tuple(b for i, b in enumerate(alice_key) if i not in checked)
    bob_final = tuple(b for i, b in enumerate(bob_key) if i not in checked)
    transcript = [
        KeyCheckChallenge(positions),
        KeyCheckResponse(alice_sample),
        KeyCheckResponse(bob_sample),
    ]
    if verdict is CheckVerdict.ABORT:
        transcript.append(AbortNotice(f"key check found {mismatches} mismatching bits"))
    return KeyCheckResult(
        verdict, mismatches, positions, alice_final, bob_final, tuple(transcript)
    )
