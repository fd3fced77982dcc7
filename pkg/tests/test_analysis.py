import numpy as np
import pytest

from qwhash import analysis
from qwhash.analysis import (
    AvalancheReport,
    BirthdayReport,
    CollisionReport,
    UniformityReport,
    analyze,
    avalanche_test,
    birthday_report,
    collision_test,
    omega_count,
    run_trials,
    sensitivity_suite,
    sensitivity_variants,
    uniformity_test,
    write_reports,
)
from qwhash.exceptions import DegenerateStateError, InvalidInputError
from qwhash.hashing import QhfParams, qhf, render_ascii


@pytest.fixture(scope="module")
def small_run():
    return run_trials(300, 32, QhfParams(), seed=5)


class TestOmega:
    @pytest.mark.parametrize("a,b,want", [(b"AB", b"AB", 2), (b"AB", b"CD", 0), (b"AB", b"AC", 1)])
    def test_examples(self, a, b, want):
        assert omega_count(a, b) == want

    def test_length_mismatch(self):
        with pytest.raises(InvalidInputError):
            omega_count(b"A", b"AB")

    def test_self_comparison_is_full(self):
        h = qhf("1101001110").ascii
        assert omega_count(h, h) == 21


class TestTrials:
    def test_reproducible(self):
        a = run_trials(50, 16, seed=3)
        b = run_trials(50, 16, seed=3)
        np.testing.assert_array_equal(a.original, b.original)
        np.testing.assert_array_equal(a.modified, b.modified)

    def test_chunking_and_threads_do_not_matter(self):
        a = run_trials(70, 20, seed=9, chunk_size=70)
        b = run_trials(70, 20, seed=9, chunk_size=8, threads=3)
        np.testing.assert_array_equal(a.messages, b.messages)
        np.testing.assert_array_equal(a.original, b.original)
        np.testing.assert_array_equal(a.modified, b.modified)

    def test_seeds_differ(self):
        assert not np.array_equal(run_trials(20, 16, seed=1).messages, run_trials(20, 16, seed=2).messages)

    def test_one_bit_flipped(self, small_run):
        for row in range(small_run.n_trials):
            msg = small_run.messages[row].copy()
            msg[small_run.flips[row]] ^= 1
            np.testing.assert_array_equal(qhf(msg).to_array(), small_run.modified[row])
            if row > 20:
                break

    def test_degenerate_runs_fail_loudly(self):
        with pytest.raises(DegenerateStateError):
            run_trials(20, 8, QhfParams(initial_coin="left"), seed=0)

    @pytest.mark.parametrize("n,length", [(0, 8), (5, 0)])
    def test_bad_sizes(self, n, length):
        with pytest.raises(InvalidInputError):
            run_trials(n, length)


class TestCollision:
    def test_identities(self, small_run):
        rep = CollisionReport.from_trials(small_run)
        assert rep.omega_histogram.sum() == small_run.n_trials == rep.n_trials
        assert rep.w0 == rep.omega_histogram[0]
        assert rep.collision_rate_pct == 100 * (rep.n_trials - rep.w0) / rep.n_trials
        assert 0 <= rep.collision_rate_pct <= 100

    def test_omegas_match_ascii_comparison(self, small_run):
        rep = CollisionReport.from_trials(small_run)
        for row in range(40):
            a = render_ascii("".join(map(str, small_run.original[row])))
            b = render_ascii("".join(map(str, small_run.modified[row])))
            assert rep.omegas[row] == omega_count(a, b)
            assert rep.omegas[row] == 21 - sum(x != y for x, y in zip(a, b))

    def test_smoke_100(self):
        assert collision_test(100, 16, seed=1).omega_histogram.sum() == 100

    def test_serialization(self, small_run):
        rep = CollisionReport.from_trials(small_run)
        kv = dict(line.split("=", 1) for line in rep.to_kv().splitlines())
        assert kv["params"] == QhfParams().fingerprint() and kv["seed"] == "5" and int(kv["w0"]) == rep.w0
        csv = rep.histogram_csv().splitlines()
        assert csv[0].startswith("# params=") and "index,count" in csv
        assert "reference average rate" in rep.to_text()


class TestAvalanche:
    def test_synthetic(self):
        rep = AvalancheReport.from_distances([2, 4], n_bits=165)
        assert rep.mean_bits == 3 and rep.std_bits == 1
        assert rep.change_rate_pct == 100 * 3 / 165
        assert rep.std_rate_pct == 100 / 165

    def test_definitions(self, small_run):
        rep = AvalancheReport.from_trials(small_run)
        d = (small_run.original ^ small_run.modified).sum(axis=1)
        assert rep.mean_bits == d.mean()
        assert rep.change_rate_pct == 100 * rep.mean_bits / 165
        assert rep.std_bits == pytest.approx(d.std(), rel=1e-12)
        assert 0 <= rep.change_rate_pct <= 100 and rep.std_bits >= 0

    def test_needs_two_trials(self):
        with pytest.raises(InvalidInputError):
            avalanche_test(1, 8)

    def test_text_shows_reference(self, small_run):
        text = AvalancheReport.from_trials(small_run).to_text()
        assert "51.46" in text and "84.90" in text


class TestUniformity:
    def test_single_trial(self):
        data = run_trials(1, 16, seed=4)
        rep = UniformityReport.from_trials(data)
        np.testing.assert_array_equal(rep.toggle_counts, data.original[0] ^ data.modified[0])

    def test_consistent_with_avalanche(self):
        u = uniformity_test(120, 24, seed=6)
        a = avalanche_test(120, 24, seed=6)
        assert u.total == a.total_flipped
        assert u.total == pytest.approx(a.n_trials * a.mean_bits, rel=1e-15)

    def test_stats(self, small_run):
        rep = UniformityReport.from_trials(small_run)
        assert rep.min <= rep.mean <= rep.max
        assert rep.max_share == rep.max / rep.total
        assert len(rep.histogram_csv().splitlines()) == 165 + 6


class TestSensitivity:
    def test_variants(self):
        v = sensitivity_variants("10110")
        assert v == {"C1": "10110", "C2": "010110", "C3": "10111", "C4": "1010"}

    def test_too_short(self):
        with pytest.raises(InvalidInputError):
            sensitivity_suite("1011")

    def test_suite(self):
        rep = sensitivity_suite("1011001110001011")
        assert set(rep.hashes) == {"C1", "C2", "C3", "C4"}
        assert all(len(h) == 165 for h in rep.hashes.values())
        assert rep.hashes["C2"] == qhf("0" + "1011001110001011")
        assert rep.distances["C3"] == int((rep.hashes["C1"].to_array() ^ rep.hashes["C3"].to_array()).sum())
        assert "C4 (delete 3rd bit)" in rep.to_text()


class TestBirthday:
    def test_defaults(self):
        rep = birthday_report()
        assert rep.attack_exponent == 82.5 and rep.complexity == "O(2^82.5)"

    def test_small(self):
        assert BirthdayReport(2, 2).attack_exponent == 2.0
        assert BirthdayReport(2, 2).complexity == "O(2^2)"

    def test_doubling(self):
        assert birthday_report(QhfParams(n=30)).attack_exponent == 2 * birthday_report().attack_exponent


def test_write_reports_deterministic(tmp_path):
    a = write_reports(analyze(40, 16, seed=2), tmp_path / "a")
    b = write_reports(analyze(40, 16, seed=2), tmp_path / "b")
    assert [p.name for p in a] == [p.name for p in b]
    for pa, pb in zip(a, b):
        assert pa.read_bytes() == pb.read_bytes()


def test_trial_rng_is_index_specific():
    x = analysis.trial_rng(1, 0).integers(0, 2**32)
    assert x == analysis.trial_rng(1, 0).integers(0, 2**32)
    assert x != analysis.trial_rng(1, 1).integers(0, 2**32)
