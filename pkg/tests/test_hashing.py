import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qwhash.exceptions import ContractViolationError, DegenerateStateError, InvalidInputError, InvalidParameterError
from qwhash.hashing import (
    HashValue,
    QhfParams,
    encode_segment,
    encode_segments,
    evolve,
    hex_groups,
    initial_state,
    measure_positions,
    operators_for,
    qhf,
    qhf_batch,
    render_ascii,
    render_hex,
)
from qwhash.operators import WalkOperators, build_lqw, hybrid_step


def dyadic_segment_oracle(p, k, scale, digits=12):
    """Segment value from p = num / 2**e in pure integer arithmetic."""
    num, den = float(min(max(p, 0.0), 1.0)).as_integer_ratio()
    # round(num * scale / den, digits) with ties-to-even, then floor.
    q, r = divmod(num * scale * 10**digits, den)
    if 2 * r > den or (2 * r == den and q % 2):
        q += 1
    return min(q // 10**digits, 2**k - 1)


class TestParams:
    def test_defaults(self):
        p = QhfParams()
        assert (p.n, p.k, p.initial_vertex, p.scale, p.n_bits) == (15, 11, 7, 20000, 165)

    def test_fingerprint(self):
        assert QhfParams().fingerprint() == "n=15;k=11;t=1;l=2;coin=grover;boundary=reflect;iv=7;ic=loop;scale=20000;renorm=1"
        p = QhfParams(t=0.3, l=1.0, coin="fourier", boundary="cycle", renormalize=False, initial_coin="left")
        assert p.fingerprint() == "n=15;k=11;t=0.3;l=1;coin=fourier;boundary=cycle;iv=7;ic=left;scale=20000;renorm=0"

    @pytest.mark.parametrize(
        "params",
        [QhfParams(), QhfParams(n=9, k=4, t=2.7, l=0.0, coin="fourier", initial_vertex=0, renormalize=False)],
    )
    def test_fingerprint_round_trip(self, params):
        assert QhfParams.from_fingerprint(params.fingerprint()) == params

    @pytest.mark.parametrize(
        "kwargs",
        [
            dict(n=1),
            dict(k=0),
            dict(t=0),
            dict(t=-1.0),
            dict(l=-0.1),
            dict(initial_vertex=15),
            dict(initial_coin="up"),
            dict(coin="hadamard"),
            dict(boundary="open"),
            dict(scale=0),
            dict(n=2.5),
        ],
    )
    def test_invalid(self, kwargs):
        with pytest.raises(InvalidParameterError):
            QhfParams(**kwargs)

    def test_from_config_resets_vertex_with_n(self):
        assert QhfParams.from_config({"n": "9"}, base=QhfParams()).initial_vertex == 4

    def test_unknown_key(self):
        with pytest.raises(InvalidParameterError):
            QhfParams.from_config({"colour": "red"})


class TestInitialState:
    def test_default_index(self):
        psi = initial_state(QhfParams())
        assert np.flatnonzero(psi).tolist() == [37]
        assert np.linalg.norm(psi) == 1

    def test_left_vertex_zero(self):
        assert np.flatnonzero(initial_state(QhfParams(initial_coin="left", initial_vertex=0))).tolist() == [0]


class TestEvolve:
    def test_empty_message(self):
        with pytest.raises(InvalidInputError):
            evolve("", QhfParams())

    def test_loop_fixed_point(self, monkeypatch):
        params = QhfParams(n=5)
        ops = operators_for(params)
        identity_ops = WalkOperators(**{**ops.__dict__, "coin": np.eye(3, dtype=complex), "u_lqw": build_lqw(np.eye(3), 5)})
        monkeypatch.setattr("qwhash.hashing.operators_for", lambda p: identity_ops)
        np.testing.assert_array_equal(evolve("1", params), initial_state(params))

    @pytest.mark.parametrize("length", [1, 10, 64])
    def test_all_ones_unit_norm(self, length):
        assert abs(np.linalg.norm(evolve("1" * length, QhfParams())) - 1) < 1e-10

    @pytest.mark.parametrize("coin", ["grover", "fourier"])
    @pytest.mark.parametrize("boundary", ["reflect", "cycle"])
    def test_matches_dense_steps(self, coin, boundary):
        params = QhfParams(n=9, t=0.7, l=1.5, coin=coin, boundary=boundary)
        ops = operators_for(params)
        rng = np.random.default_rng(1)
        for _ in range(10):
            msg = rng.integers(0, 2, 40)
            psi = initial_state(params)
            for b in msg:
                psi = hybrid_step(psi, int(b), ops)
            assert np.max(np.abs(evolve(msg, params) - psi)) < 1e-12

    def test_degenerate_start(self):
        params = QhfParams(initial_coin="left")
        with pytest.raises(DegenerateStateError):
            evolve("0", params)
        bits, failed = qhf_batch(np.array([[0, 1], [1, 0]]), params)
        assert failed[0] and not bits[0].any()

    def test_no_renormalize_shrinks(self):
        params = QhfParams(renormalize=False)
        assert np.linalg.norm(evolve("10" * 8, params)) < 1


class TestMeasure:
    def test_basis_state(self):
        probs = measure_positions(initial_state(QhfParams()))
        assert probs[7] == 1 and probs.sum() == 1

    def test_uniform(self):
        np.testing.assert_allclose(measure_positions(np.ones(45) / np.sqrt(45)), np.full(15, 1 / 15), atol=1e-15)

    def test_zero_state(self):
        with pytest.raises(DegenerateStateError):
            measure_positions(np.zeros(9))
        np.testing.assert_array_equal(measure_positions(np.zeros(9), renormalize=False), np.zeros(3))

    def test_unnormalized_divides_by_norm(self):
        np.testing.assert_allclose(measure_positions(2 * np.ones(6)), [0.5, 0.5])

    @settings(max_examples=50, deadline=None)
    @given(st.integers(0, 2**32 - 1), st.integers(2, 20))
    def test_completeness(self, seed, n):
        rng = np.random.default_rng(seed)
        v = rng.normal(size=3 * n) + 1j * rng.normal(size=3 * n)
        probs = measure_positions(v / np.linalg.norm(v), renormalize=False)
        assert abs(probs.sum() - 1) < 1e-12
        assert np.all((probs >= 0) & (probs <= 1))


class TestEncoding:
    def test_zero(self):
        assert encode_segment(0.0, 11) == "00000000000"

    def test_one_clamps(self):
        assert encode_segment(1.0, 11) == "11111111111"

    def test_five_percent(self):
        assert encode_segment(0.05, 11) == format(1000, "011b") == "01111101000"

    def test_slack_tolerated(self):
        assert encode_segment(1 + 5e-13, 11) == "1" * 11
        assert encode_segment(-5e-13, 11) == "0" * 11

    @pytest.mark.parametrize("p", [1.1, -0.01, float("nan")])
    def test_out_of_range(self, p):
        with pytest.raises(ContractViolationError):
            encode_segment(p, 11)

    def test_oracle_sample(self):
        ps = np.random.default_rng(2).random(2000)
        assert encode_segments(ps, 11, 20000).tolist() == [dyadic_segment_oracle(p, 11, 20000) for p in ps]

    @given(st.floats(0, 1), st.floats(0, 1), st.integers(1, 16))
    def test_monotone(self, a, b, k):
        lo, hi = sorted((a, b))
        assert int(encode_segment(lo, k), 2) <= int(encode_segment(hi, k), 2)

    @given(st.floats(0, 1), st.integers(1, 20), st.integers(1, 10**6))
    def test_against_oracle(self, p, k, scale):
        assert int(encode_segment(p, k, scale), 2) == dyadic_segment_oracle(p, k, scale)

    def test_segment_locality(self):
        rng = np.random.default_rng(8)
        probs = rng.dirichlet(np.ones(15))
        base = encode_segments(probs, 11)
        for v in range(15):
            changed = probs.copy()
            changed[v] = rng.random() * 0.2
            diff = np.flatnonzero(encode_segments(changed, 11) != base)
            assert set(diff) <= {v}


class TestRendering:
    def test_nibble(self):
        assert render_hex("0000") == "0"
        assert render_hex("1") == "8"

    def test_byte(self):
        assert render_ascii("11111111") == b"\xff"
        assert render_ascii("1") == b"\x80"

    def test_lengths(self):
        h = HashValue("10" * 82 + "1")
        assert len(h) == 165 and len(h.hex) == 42 and len(h.ascii) == 21
        groups = hex_groups(h)
        assert [len(g) for g in groups] == [4] * 10 + [2]
        assert "".join(groups) == h.hex

    def test_segments(self):
        h = HashValue("00000000001" + "11111111111", n=2, k=11)
        assert h.segments() == [1, 2047]


class TestQhf:
    def test_default_length(self):
        h = qhf("1011001")
        assert len(h) == 165 and len(h.hex) == 42

    def test_deterministic(self):
        assert qhf("0110" * 16) == qhf("0110" * 16)

    def test_single_bit_flip_changes_hash(self):
        assert qhf("0110" * 16) != qhf("1110" + "0110" * 15)

    def test_segments_bounded(self):
        rng = np.random.default_rng(9)
        bits, failed = qhf_batch(rng.integers(0, 2, (200, 32)), QhfParams())
        assert not failed.any()
        for row in bits:
            h = HashValue("".join(map(str, row)))
            assert max(h.segments()) <= min(20000, 2**11 - 1)

    @pytest.mark.parametrize("n,k", [(2, 1), (4, 3), (20, 16)])
    def test_custom_shapes(self, n, k):
        assert len(qhf("101", QhfParams(n=n, k=k))) == n * k

    def test_batch_matches_single(self):
        rng = np.random.default_rng(12)
        msgs = rng.integers(0, 2, (64, 30))
        bits, _ = qhf_batch(msgs, QhfParams())
        for i in (0, 17, 63):
            np.testing.assert_array_equal(qhf(msgs[i]).to_array(), bits[i])

    def test_accepts_sequences(self):
        assert qhf([1, 0, 1]) == qhf("101") == qhf(np.array([True, False, True]))

    @pytest.mark.parametrize("bad", ["10a1", "", [0, 2], b"\x01"])
    def test_bad_messages(self, bad):
        with pytest.raises(InvalidInputError):
            qhf(bad)
