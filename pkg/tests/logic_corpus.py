"""Formula corpora shared by the logic and acceptance tests.

A formula over {P, Q} is summarised by its key: the set of symbols it
mentions plus its truth table over all four (P, Q) assignments.  The
violation set of a pair depends only on the two keys, so every pair in a
corpus can be checked through one representative per key pair.
"""
import random

from eigenmark.logic import And, Iff, Implies, Not, Or, Symbol, evaluate, models

NAMES = ("P", "Q")
BINARY = (And, Or, Implies, Iff)
_MODELS = list(models(list(NAMES)))
_OPS = {
    And: lambda a, b: a & b,
    Or: lambda a, b: a | b,
    Implies: lambda a, b: (~a | b) & 0xF,
    Iff: lambda a, b: ~(a ^ b) & 0xF,
}


def key(f):
    table = sum(1 << i for i, m in enumerate(_MODELS) if evaluate(f, m))
    syms = frozenset(_symbols(f))
    return syms, table


def _symbols(f):
    if isinstance(f, Symbol):
        return {f.name}
    if isinstance(f, Not):
        return _symbols(f.arg)
    return _symbols(f.left) | _symbols(f.right)


def keyed_layers(depth):
    """Representatives and formula counts per key for all ASTs up to ``depth``.

    Depth counts operator levels (a bare symbol has depth 0).  Returns
    ``{key: (representative, count)}``; counts multiply through the
    composition so they equal the number of distinct ASTs with that key.
    """
    reps = {}
    for name in NAMES:
        f = Symbol(name)
        reps.setdefault(key(f), [f, 0])[1] += 1
    for _ in range(depth):
        nxt = {}
        for name in NAMES:
            f = Symbol(name)
            nxt.setdefault(key(f), [f, 0])[1] += 1
        items = list(reps.items())
        for (s, t), (f, c) in items:
            k = (s, ~t & 0xF)
            nxt.setdefault(k, [Not(f), 0])[1] += c
        for (s1, t1), (f1, c1) in items:
            for (s2, t2), (f2, c2) in items:
                for op in BINARY:
                    k = (s1 | s2, _OPS[op](t1, t2))
                    nxt.setdefault(k, [op(f1, f2), 0])[1] += c1 * c2
        reps = nxt
    return {k: (v[0], v[1]) for k, v in reps.items()}


def random_formula(rng: random.Random, depth: int, names=NAMES):
    if depth == 0 or rng.random() < 0.25:
        return Symbol(rng.choice(names))
    if rng.random() < 0.2:
        return Not(random_formula(rng, depth - 1, names))
    op = rng.choice(BINARY)
    return op(random_formula(rng, depth - 1, names), random_formula(rng, depth - 1, names))


def random_pairs(count: int, seed: int = 2024, depth: int = 4):
    rng = random.Random(seed)
    return [(random_formula(rng, depth), random_formula(rng, depth)) for _ in range(count)]
