"""Harness tests: determinism, accounting, serialization, table rendering."""

import dataclasses
import math
import json

import pytest

from qdkd.adversary import ChannelLeg, EveBasisPolicy, InterceptResend, NoAttack
from qdkd.errors import ConfigError
from qdkd.protocol import BellAnnouncement, KeyMode
from qdkd.quantum import BellOutcome, LocalUnitary
from qdkd.simulate import (
    ABORT_CONTROL,
    ABORT_KEY_CHECK,
    SimConfig,
    derive_seed,
    parse_report,
    render_unitary_table,
    run_batch,
    run_session,
    run_simulation,
    serialize_report,
    unitary_outcome_table,
)

BACKWARD_Z = InterceptResend(ChannelLeg.BACKWARD, EveBasisPolicy.Z)
FORWARD_Z = InterceptResend(ChannelLeg.FORWARD, EveBasisPolicy.Z)


class TestHonestRuns:
    def test_small_honest_run_is_clean(self):
        session = run_session(SimConfig(rounds=400, seed=5))
        report = session.report
        assert report.detections == 0
        assert not report.aborted
        assert report.key_error_rate_overall == 0.0
        assert session.alice_pre_check == session.bob_pre_check
        assert session.alice_final == session.bob_final
        assert report.capacity_bits_per_message_round == 4.0

    def test_single_mode_capacity(self):
        report = run_simulation(SimConfig(rounds=400, seed=5, key_mode=KeyMode.SINGLE_BOB))
        assert report.capacity_bits_per_message_round == 2.0

    def test_accounting_invariants(self):
        session = run_session(SimConfig(rounds=300, seed=8, check_fraction=0.2))
        report = session.report
        assert report.control_rounds + report.message_rounds == report.rounds_total
        pre = len(session.alice_pre_check)
        assert pre == 4 * report.message_rounds
        checked = pre - report.final_key_length
        assert len(session.alice_final) == report.final_key_length
        assert checked == len(session.transcript[-3].positions)
        assert report.publicly_inferable_bits == 2 * report.message_rounds

    def test_transcript_bell_announcements_match_message_rounds(self):
        session = run_session(SimConfig(rounds=120, seed=3))
        announces = [m for m in session.transcript if isinstance(m, BellAnnouncement)]
        assert len(announces) == session.report.message_rounds
        # Eve sees every public message.
        assert session.eve.transcript == session.transcript

    def test_rounds_zero_gives_empty_report(self):
        report = run_simulation(SimConfig(rounds=0, seed=1))
        assert report.rounds_total == 0
        assert report.final_key_length == 0
        assert report.capacity_bits_per_message_round == 0.0
        assert not report.aborted

    def test_round_records_collected_on_request(self):
        session = run_session(SimConfig(rounds=50, seed=2), keep_records=True)
        assert len(session.records) == session.report.rounds_total
        for record in session.records:
            assert isinstance(record.u_a, LocalUnitary)


class TestAttackedRuns:
    def test_forward_attack_aborts_on_detection(self):
        report = run_simulation(SimConfig(rounds=400, seed=1, attack=FORWARD_Z))
        assert report.aborted
        assert report.abort_cause == ABORT_CONTROL
        assert report.detections == 1
        assert report.rounds_total < 400

    def test_backward_attack_with_no_check_leaks(self):
        report = run_simulation(
            SimConfig(rounds=4000, seed=4, check_fraction=0.0, attack=BACKWARD_Z)
        )
        assert not report.aborted
        assert report.detections == 0
        assert report.key_error_rate_amplitude_bit == 0.0
        assert 0.4 < report.key_error_rate_phase_bit < 0.6

    def test_backward_attack_with_check_aborts(self):
        report = run_simulation(
            SimConfig(rounds=400, seed=4, check_fraction=0.1, attack=BACKWARD_Z)
        )
        assert report.aborted
        assert report.abort_cause == ABORT_KEY_CHECK

    def test_eve_observations_only_on_message_rounds_for_backward(self):
        session = run_session(SimConfig(rounds=200, seed=9, attack=BACKWARD_Z))
        assert len(session.eve.observations) == session.report.message_rounds
        assert all(o.leg is ChannelLeg.BACKWARD for o in session.eve.observations)


class TestDeterminism:
    def test_identical_configs_identical_bytes(self):
        config = SimConfig(rounds=500, seed=123, attack=BACKWARD_Z, check_fraction=0.05)
        a = serialize_report(run_simulation(config), "json")
        b = serialize_report(run_simulation(config), "json")
        assert a == b
        assert serialize_report(run_simulation(config), "csv") == serialize_report(
            run_simulation(config), "csv"
        )

    def test_different_seeds_differ(self):
        base = SimConfig(rounds=500, seed=123)
        other = dataclasses.replace(base, seed=124)
        assert run_simulation(base) != run_simulation(other)

    def test_derive_seed_stable(self):
        assert derive_seed(42, 0) == derive_seed(42, 0)
        assert derive_seed(42, 0) != derive_seed(42, 1)

    def test_run_batch_reproducible(self):
        config = SimConfig(rounds=50, seed=77)
        assert run_batch(config, 5) == run_batch(config, 5)


class TestOracleAgreement:
    """Monte Carlo estimates within 4 binomial SE of the exact oracle, for
    every supported attack strategy."""

    ERROR_ATTACKS = [
        NoAttack(),
        InterceptResend(ChannelLeg.FORWARD, EveBasisPolicy.Z),
        InterceptResend(ChannelLeg.FORWARD, EveBasisPolicy.X),
        InterceptResend(ChannelLeg.FORWARD, EveBasisPolicy.RANDOM),
        InterceptResend(ChannelLeg.BACKWARD, EveBasisPolicy.Z),
        InterceptResend(ChannelLeg.BACKWARD, EveBasisPolicy.X),
        InterceptResend(ChannelLeg.BACKWARD, EveBasisPolicy.RANDOM),
    ]

    @pytest.mark.parametrize("attack", ERROR_ATTACKS)
    def test_key_error_rates_match_oracle(self, attack):
        from qdkd.oracle import exact_oracle

        oracle = exact_oracle(attack)
        # control_prob 0: pure message rounds, so forward attacks cannot
        # abort the run and error statistics accumulate freely.
        config = SimConfig(rounds=20_000, control_prob=0.0, check_fraction=0.0,
                           attack=attack, seed=314)
        report = run_simulation(config)
        n = report.message_rounds  # positions within a round are correlated
        pairs = [
            (report.key_error_rate_amplitude_bit, float(oracle.key_error_rate_amplitude_bit)),
            (report.key_error_rate_phase_bit, float(oracle.key_error_rate_phase_bit)),
        ]
        for got, want in pairs:
            se = math.sqrt(want * (1.0 - want) / n)
            assert abs(got - want) <= 4 * se + 1e-12, (attack, got, want)

    @pytest.mark.parametrize("policy", [EveBasisPolicy.Z, EveBasisPolicy.X, EveBasisPolicy.RANDOM])
    def test_forward_detection_matches_oracle(self, policy):
        from qdkd.oracle import control_detection_probability

        attack = InterceptResend(ChannelLeg.FORWARD, policy)
        want = float(control_detection_probability(attack))
        detections = control_rounds = 0
        index = 0
        while control_rounds < 4_000:
            config = SimConfig(rounds=40, attack=attack, seed=derive_seed(2718, index))
            report = run_simulation(config)
            detections += report.detections
            control_rounds += report.control_rounds
            index += 1
        se = math.sqrt(want * (1.0 - want) / control_rounds)
        assert abs(detections / control_rounds - want) <= 4 * se


class TestBackendEquivalence:
    def test_reports_identical_across_kernel_backends(self):
        # The backend twins must not change a single sampled trajectory.
        pytest.importorskip("qdkd._kernels_c")
        from qdkd import _backend

        config = SimConfig(rounds=800, seed=2024, attack=BACKWARD_Z, check_fraction=0.1)
        original = _backend.backend_name
        try:
            _backend.activate("python")
            via_python = serialize_report(run_simulation(config), "json")
            _backend.activate("compiled")
            via_compiled = serialize_report(run_simulation(config), "json")
        finally:
            _backend.activate(original)
        assert via_python == via_compiled


class TestValidation:
    @pytest.mark.parametrize(
        "kwargs",
        [
            {"rounds": -1},
            {"rounds": 10, "control_prob": 1.5},
            {"rounds": 10, "check_fraction": -0.1},
            {"rounds": 10, "mismatch_threshold": -2},
            {"rounds": 10, "seed": -1},
            {"rounds": 10, "output_format": "xml"},
        ],
    )
    def test_bad_configs_rejected(self, kwargs):
        with pytest.raises(ConfigError):
            run_simulation(SimConfig(**kwargs))


class TestSerialization:
    def test_json_roundtrip(self):
        report = run_simulation(SimConfig(rounds=200, seed=6))
        assert parse_report(serialize_report(report, "json")) == report

    def test_csv_columns_match_json_keys(self):
        report = run_simulation(SimConfig(rounds=50, seed=6))
        json_keys = list(json.loads(serialize_report(report, "json")))
        header, row = serialize_report(report, "csv").decode().splitlines()
        assert header.split(",") == json_keys
        assert len(row.split(",")) == len(json_keys)

    def test_empty_run_serializes(self):
        report = run_simulation(SimConfig(rounds=0, seed=0))
        data = json.loads(serialize_report(report, "json"))
        assert data["rounds_total"] == 0
        assert data["final_key_length"] == 0
        assert data["abort_cause"] is None

    def test_unknown_format_rejected(self):
        report = run_simulation(SimConfig(rounds=0, seed=0))
        with pytest.raises(ConfigError):
            serialize_report(report, "yaml")


class TestOutcomeTable:
    def test_matches_xor_law(self):
        table = unitary_outcome_table()
        for a in LocalUnitary:
            for b in LocalUnitary:
                assert table[a][b] == BellOutcome(int(a) ^ int(b))

    def test_symmetric(self):
        table = unitary_outcome_table()
        for a in range(4):
            for b in range(4):
                assert table[a][b] == table[b][a]

    def test_rendering_contains_rows(self):
        text = render_unitary_table()
        lines = text.splitlines()
        assert len(lines) == 5
        assert lines[1].split()[-4:] == ["Ψ+", "Ψ−", "Φ+", "Φ−"]
        assert lines[4].split()[-4:] == ["Φ−", "Φ+", "Ψ−", "Ψ+"]
