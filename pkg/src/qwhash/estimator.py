"""scikit-learn compatible front end for the hash."""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from .hashing import DEFAULT_SCALE, HashValue, QhfParams, operators_for, qhf_batch
from .exceptions import DegenerateStateError
from .validation import bits_to_str, check_messages


class QuantumWalkHasher(TransformerMixin, BaseEstimator):
    """Map bit messages to hybrid quantum-walk hash bits.

    Hyperparameters mirror :class:`~qwhash.hashing.QhfParams`. ``fit`` only
    validates them and builds the walk operators; the transform is
    stateless otherwise, so ``fit`` ignores ``X``.

    ``transform`` accepts a 2-D 0/1 array (one message per row) or an
    iterable of messages of possibly different lengths (``'0101'`` strings,
    int sequences) and returns a ``(n_messages, n * k)`` ``uint8`` array.

    Examples
    --------
    >>> hasher = QuantumWalkHasher().fit()
    >>> hasher.transform(["1011001"]).shape
    (1, 165)
    """

    def __init__(
        self,
        n=15,
        k=11,
        t=1.0,
        l=2.0,
        coin="grover",
        boundary="reflect",
        initial_vertex=None,
        initial_coin="loop",
        scale=DEFAULT_SCALE,
        renormalize=True,
    ):
        self.n = n
        self.k = k
        self.t = t
        self.l = l
        self.coin = coin
        self.boundary = boundary
        self.initial_vertex = initial_vertex
        self.initial_coin = initial_coin
        self.scale = scale
        self.renormalize = renormalize

    @classmethod
    def from_params(cls, params: QhfParams) -> "QuantumWalkHasher":
        return cls(
            n=params.n,
            k=params.k,
            t=params.t,
            l=params.l,
            coin=params.coin.value,
            boundary=params.boundary.value,
            initial_vertex=params.initial_vertex,
            initial_coin=params.initial_coin,
            scale=params.scale,
            renormalize=params.renormalize,
        )

    def fit(self, X=None, y=None):
        self.params_ = QhfParams(**self.get_params())
        self.operators_ = operators_for(self.params_)
        self.n_output_bits_ = self.params_.n_bits
        return self

    def transform(self, X) -> np.ndarray:
        check_is_fitted(self, "params_")
        messages = check_messages(X)
        out = np.zeros((len(messages), self.n_output_bits_), dtype=np.uint8)
        by_length: dict[int, list[int]] = {}
        for i, m in enumerate(messages):
            by_length.setdefault(len(m), []).append(i)
        for rows in by_length.values():
            bits, failed = qhf_batch(np.stack([messages[i] for i in rows]), self.params_)
            if failed.any():
                bad = rows[int(np.flatnonzero(failed)[0])]
                raise DegenerateStateError(f"message {bad} collapsed to a zero state")
            out[rows] = bits
        return out

    def hash_values(self, X) -> list[HashValue]:
        bits = self.transform(X)
        return [HashValue(bits_to_str(row), n=self.params_.n, k=self.params_.k) for row in bits]

    def get_feature_names_out(self, input_features=None) -> np.ndarray:
        check_is_fitted(self, "params_")
        return np.array([f"qhf_bit{i}" for i in range(self.n_output_bits_)], dtype=object)
