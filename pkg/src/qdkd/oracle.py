"""Exact enumeration ground truth for the protocol's attack statistics.

Everything here is computed by exhaustively walking the finite outcome tree
(unitary choices, basis choices, Eve's outcomes, measurement branches) with
exact probability arithmetic; no sampling, no floating point. Amplitudes are
tracked unnormalized in the ring of numbers a + b*sqrt(2) with rational a, b,
where every probability in the protocol's reachable state set is an exact
Fraction (a ratio of squared norms). This module deliberately does not use
the float kernels: it is the independent oracle the Monte Carlo simulator is
validated against.
"""

import math
from dataclasses import dataclass
from fractions import Fraction

from .adversary import AttackStrategy, ChannelLeg, EveBasisPolicy, NoAttack
from .errors import OracleError
from .protocol import Correlation, KeyCheckPolicy, KeyMode, checked_count, expected_correlation
from .quantum import LocalUnitary, MeasBasis, QubitId


class Rt2:
    """Exact a + b*sqrt(2) with rational coefficients."""

    __slots__ = ("a", "b")

    def __init__(self, a=0, b=0):
        self.a = a if isinstance(a, Fraction) else Fraction(a)
        self.b = b if isinstance(b, Fraction) else Fraction(b)

    def __add__(self, other):
        return Rt2(self.a + other.a, self.b + other.b)

    def __sub__(self, other):
        return Rt2(self.a - other.a, self.b - other.b)

    def __neg__(self):
        return Rt2(-self.a, -self.b)

    def __mul__(self, other):
        if isinstance(other, Rt2):
            return Rt2(self.a * other.a + 2 * self.b * other.b, self.a * other.b + self.b * other.a)
        return Rt2(self.a * other, self.b * other)

    __rmul__ = __mul__

    def __eq__(self, other):
        return isinstance(other, Rt2) and self.a == other.a and self.b == other.b

    def __hash__(self):
        return hash((self.a, self.b))

    def __bool__(self):
        return bool(self.a) or bool(self.b)

    def as_fraction(self) -> Fraction:
        """This value as an exact rational; the sqrt(2) part must vanish."""
        if self.b:
            raise OracleError(f"expected a rational value, got {self!r}")
        return self.a

    def __float__(self):
        return float(self.a) + float(self.b) * math.sqrt(2)

    def __repr__(self):
        return f"Rt2({self.a}, {self.b})"


_ZERO = Rt2()
_ONE = Rt2(1)
_HALF = Rt2(Fraction(1, 2))
_INV_SQRT2 = Rt2(0, Fraction(1, 2))  # sqrt(2)/2

# Bell vectors in outcome-label order over |ht> = 00,01,10,11.
_BELL = (
    (_ZERO, _INV_SQRT2, _INV_SQRT2, _ZERO),
    (_ZERO, _INV_SQRT2, -_INV_SQRT2, _ZERO),
    (_INV_SQRT2, _ZERO, _ZERO, _INV_SQRT2),
    (_INV_SQRT2, _ZERO, _ZERO, -_INV_SQRT2),
)

# Encoding unitaries, straight from their bra-ket definitions.
_U = (
    ((_ONE, _ZERO), (_ZERO, _ONE)),
    ((_ONE, _ZERO), (_ZERO, -_ONE)),
    ((_ZERO, _ONE), (_ONE, _ZERO)),
    ((_ZERO, _ONE), (-_ONE, _ZERO)),
)

# Projectors onto measurement outcomes, by basis then bit.
_PROJ = (
    (((_ONE, _ZERO), (_ZERO, _ZERO)), ((_ZERO, _ZERO), (_ZERO, _ONE))),  # Z
    (((_HALF, _HALF), (_HALF, _HALF)), ((_HALF, -_HALF), (-_HALF, _HALF))),  # X
)


def _apply_1q(state, qubit, m):
    """Apply a 2x2 matrix on one qubit of an unnormalized 4-amplitude state."""
    s0, s1, s2, s3 = state
    if qubit == QubitId.T:
        return (
            m[0][0] * s0 + m[0][1] * s1,
            m[1][0] * s0 + m[1][1] * s1,
            m[0][0] * s2 + m[0][1] * s3,
            m[1][0] * s2 + m[1][1] * s3,
        )
    return (
        m[0][0] * s0 + m[0][1] * s2,
        m[0][0] * s1 + m[0][1] * s3,
        m[1][0] * s0 + m[1][1] * s2,
        m[1][0] * s1 + m[1][1] * s3,
    )


def _norm_sq(state) -> Fraction:
    total = _ZERO
    for s in state:
        total = total + s * s
    return total.as_fraction()


def _measurement_branches(state, qubit, basis):
    """Yield (conditional probability, projected unnormalized state, bit)."""
    n = _norm_sq(state)
    for bit in (0, 1):
        proj = _apply_1q(state, qubit, _PROJ[basis][bit])
        w = _norm_sq(proj) / n
        if w:
            yield w, proj, bit


def _bell_branches(state):
    """Yield (conditional probability, outcome label) of a Bell measurement."""
    n = _norm_sq(state)
    for k, bvec in enumerate(_BELL):
        c = _ZERO
        for bi, si in zip(bvec, state):
            c = c + bi * si
        w = (c * c).as_fraction() / n
        if w:
            yield w, k


def _attack_branches(state, leg: ChannelLeg, strategy: AttackStrategy):
    """Yield (probability, state after Eve, observation or None) on one leg."""
    if isinstance(strategy, NoAttack) or strategy.leg is not leg:
        yield Fraction(1), state, None
        return
    if strategy.basis_policy is EveBasisPolicy.Z:
        bases = ((Fraction(1), MeasBasis.Z),)
    elif strategy.basis_policy is EveBasisPolicy.X:
        bases = ((Fraction(1), MeasBasis.X),)
    else:
        bases = ((Fraction(1, 2), MeasBasis.Z), (Fraction(1, 2), MeasBasis.X))
    for p_basis, basis in bases:
        for w, proj, bit in _measurement_branches(state, QubitId.T, basis):
            yield p_basis * w, proj, (basis, bit)


def _encoded_state(u_label: int):
    return _apply_1q(_BELL[0], QubitId.T, _U[u_label])


def control_detection_probability(attack: AttackStrategy) -> Fraction:
    """Exact probability that one control round flags Eve.

    Enumerates Alice's unitary, Eve's branches on the forward leg, Bob's
    uniformly random basis, and both parties' measurement outcomes.
    """
    total = Fraction(0)
    quarter = Fraction(1, 4)
    half = Fraction(1, 2)
    for a in range(4):
        s0 = _encoded_state(a)
        for w_eve, s1, _obs in _attack_branches(s0, ChannelLeg.FORWARD, attack):
            for basis in (MeasBasis.Z, MeasBasis.X):
                expected = expected_correlation(LocalUnitary(a), basis)
                for w_bob, s2, bob_bit in _measurement_branches(s1, QubitId.T, basis):
                    for w_alice, _s3, alice_bit in _measurement_branches(s2, QubitId.H, basis):
                        observed = (
                            Correlation.CORRELATED
                            if alice_bit == bob_bit
                            else Correlation.ANTICORRELATED
                        )
                        if observed is not expected:
                            total += quarter * w_eve * half * w_bob * w_alice
    return total


def message_error_distribution(attack: AttackStrategy) -> dict[int, Fraction]:
    """Exact distribution of the per-round error mask e.

    e = label(announced) XOR label(u_A) XOR label(u_B); bit 2 (amplitude
    position) and bit 1 (phase position) of e are exactly the per-position
    key mismatch indicators between the parties' buffers.
    """
    dist = {0: Fraction(0), 1: Fraction(0), 2: Fraction(0), 3: Fraction(0)}
    sixteenth = Fraction(1, 16)
    for a in range(4):
        s0 = _encoded_state(a)
        for w_f, s1, _ in _attack_branches(s0, ChannelLeg.FORWARD, attack):
            for b in range(4):
                s2 = _apply_1q(s1, QubitId.T, _U[b])
                for w_b, s3, _ in _attack_branches(s2, ChannelLeg.BACKWARD, attack):
                    for w_bell, k in _bell_branches(s3):
                        dist[k ^ a ^ b] += sixteenth * w_f * w_b * w_bell
    return dist


def abort_probability(
    attack: AttackStrategy,
    policy: KeyCheckPolicy,
    message_rounds: int,
    key_mode: KeyMode = KeyMode.COMBINED,
) -> Fraction:
    """Exact probability that the public key check aborts.

    The check compares ceil(fraction * L) positions drawn uniformly without
    replacement from the L-bit pre-check key of a run with the given number
    of message rounds; the run aborts when mismatches exceed the threshold.
    Within one round the amplitude-position bits share one error indicator
    and the phase-position bits another (both copies of a label mismatch
    together in combined mode), which this enumeration accounts for exactly.
    """
    n = message_rounds
    if n == 0:
        return Fraction(0)
    dist = message_error_distribution(attack)
    errors = [(e, p) for e, p in dist.items() if p]
    group = 2 if key_mode is KeyMode.COMBINED else 1  # positions per indicator
    length = key_mode.bits_per_round * n
    m = checked_count(policy.fraction, length)
    if m == 0:
        return Fraction(0)
    cap = policy.mismatch_threshold + 1
    # dp[(checked, mismatches capped at cap)] = sum of P(errors) * #ways to
    # allocate the checked positions round by round.
    dp = {(0, 0): Fraction(1)}
    choose = [math.comb(group, j) for j in range(group + 1)]
    for _ in range(n):
        new = {}
        for (c, mu), weight in dp.items():
            for e, p in errors:
                amp_err = (e >> 1) & 1
                phase_err = e & 1
                for ja in range(group + 1):
                    c_a = c + ja
                    if c_a > m:
                        break
                    for jp in range(group + 1):
                        c2 = c_a + jp
                        if c2 > m:
                            break
                        mu2 = min(mu + ja * amp_err + jp * phase_err, cap)
                        ways = choose[ja] * choose[jp]
                        key = (c2, mu2)
                        add = weight * p * ways
                        if key in new:
                            new[key] += add
                        else:
                            new[key] = add
        dp = new
    total_ways = math.comb(length, m)
    accept = sum(
        (w for (c, mu), w in dp.items() if c == m and mu <= policy.mismatch_threshold),
        Fraction(0),
    )
    return 1 - accept / total_ways


def eve_resolved_bits(attack: AttackStrategy, key_mode: KeyMode = KeyMode.COMBINED) -> Fraction:
    """Expected number of secret key bits per message round that Eve's view
    (her measurement log plus the public transcript) determines exactly.

    Enumerates the joint distribution of the parties' labels and Eve's view,
    then counts label bits that are constant within each view's posterior.
    Combined mode counts all four bits (both labels), the single modes only
    the kept party's two.
    """
    views: dict[tuple, dict[tuple[int, int], Fraction]] = {}
    sixteenth = Fraction(1, 16)
    for a in range(4):
        s0 = _encoded_state(a)
        for w_f, s1, obs_f in _attack_branches(s0, ChannelLeg.FORWARD, attack):
            for b in range(4):
                s2 = _apply_1q(s1, QubitId.T, _U[b])
                for w_b, s3, obs_b in _attack_branches(s2, ChannelLeg.BACKWARD, attack):
                    for w_bell, k in _bell_branches(s3):
                        p = sixteenth * w_f * w_b * w_bell
                        view = (obs_f, obs_b, k)
                        posterior = views.setdefault(view, {})
                        posterior[(a, b)] = posterior.get((a, b), Fraction(0)) + p
    if key_mode is KeyMode.COMBINED:
        bit_extractors = [
            lambda ab: (ab[0] >> 1) & 1,
            lambda ab: ab[0] & 1,
            lambda ab: (ab[1] >> 1) & 1,
            lambda ab: ab[1] & 1,
        ]
    elif key_mode is KeyMode.SINGLE_ALICE:
        bit_extractors = [lambda ab: (ab[0] >> 1) & 1, lambda ab: ab[0] & 1]
    else:
        bit_extractors = [lambda ab: (ab[1] >> 1) & 1, lambda ab: ab[1] & 1]
    expected = Fraction(0)
    for posterior in views.values():
        p_view = sum(posterior.values(), Fraction(0))
        support = list(posterior.keys())
        resolved = sum(
            1 for extract in bit_extractors if len({extract(ab) for ab in support}) == 1
        )
        expected += p_view * resolved
    return expected


@dataclass(frozen=True)
class OracleResult:
    """Exact per-round statistics for one attack strategy."""

    detection_prob_per_control_round: Fraction
    key_error_rate_overall: Fraction
    key_error_rate_amplitude_bit: Fraction
    key_error_rate_phase_bit: Fraction
    abort_probability: Fraction | None = None


def exact_oracle(
    attack: AttackStrategy,
    check_policy: KeyCheckPolicy | None = None,
    message_rounds: int | None = None,
    key_mode: KeyMode = KeyMode.COMBINED,
) -> OracleResult:
    """Ground-truth statistics by exhaustive enumeration (no sampling).

    The abort probability needs a key length to be well defined, so it is
    only computed when both a check policy and a message-round count are
    supplied.
    """
    dist = message_error_distribution(attack)
    amp = dist[2] + dist[3]
    phase = dist[1] + dist[3]
    abort = None
    if check_policy is not None and message_rounds is not None:
        abort = abort_probability(attack, check_policy, message_rounds, key_mode)
    return OracleResult(
        detection_prob_per_control_round=control_detection_probability(attack),
        key_error_rate_overall=(amp + phase) / 2,
        key_error_rate_amplitude_bit=amp,
        key_error_rate_phase_bit=phase,
        abort_probability=abort,
    )
