"""K-step unpredictable controller synthesis for scLTL tasks."""

import json
import os

from ._core import (
    AutomatonError,
    FormulaError,
    IoError,
    ModelError,
    SynthesisError,
    UnpredError,
    VerifyError,
    compile_dot,
    holds_on,
    normalize_formula,
)
from ._core import Session as _Session

__all__ = [
    "AutomatonError",
    "FormulaError",
    "IoError",
    "ModelError",
    "Problem",
    "SynthesisError",
    "UnpredError",
    "VerifyError",
    "compile_dot",
    "holds_on",
    "normalize_formula",
]


def _text(obj):
    if isinstance(obj, (str, bytes)):
        return obj
    return json.dumps(obj)


class Problem:
    """A model paired with a task formula.

    `model` is a dict, a JSON string or a path to a JSON file.
    """

    def __init__(self, model, formula, minimize=True, add_stop=False):
        if isinstance(model, os.PathLike) or (isinstance(model, str) and not model.lstrip().startswith("{")):
            with open(model, encoding="utf-8") as f:
                model = f.read()
        self._s = _Session(_text(model), formula, minimize, add_stop)

    @property
    def num_product_states(self):
        return self._s.num_product_states

    @property
    def num_automaton_states(self):
        return self._s.num_automaton_states

    def product_states(self):
        return self._s.product_states()

    def secret_states(self):
        return self._s.secret_states()

    def aes_size(self, k):
        return self._s.aes_size(k)

    def synthesize(self, k):
        """Controller as a dict, or None when no K-step unpredictable controller exists."""
        out = self._s.synthesize(k)
        return None if out is None else json.loads(out)

    def verify(self, policy, k):
        return json.loads(self._s.verify(_text(policy), k))

    def simulate(self, policy, steps=20, seed=0):
        return self._s.simulate(_text(policy), steps, seed)

    def dot(self, kind, k=0):
        return self._s.dot(kind, k)
