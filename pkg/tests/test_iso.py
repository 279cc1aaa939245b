import json
from pathlib import Path

import numpy as np
import pytest

from girth8.census import field_of_order, lemma2_chains
from girth8.classify import classify, parse_instance
from girth8.field import make_field
from girth8.graph import CycleWitness, GraphSpec, gamma3, witness_is_cycle
from girth8.iso import (
    ChainError,
    IsoChain,
    IsoError,
    Scale3,
    all_vertices,
    chain_to_gamma3,
    elementary,
    gamma3_8cycle,
    completing_exponent,
    pullback_cycle,
    verify_iso,
)
from girth8.poly import UniPoly, parse_poly

GOLDEN = Path(__file__).parent / "golden"

CASES = {
    "I": "q=3^2 m=2 n=1 f=x^2+x g=y h=x*y",
    "II": "q=3^2 m=2 n=1 f=x g=y^2+y h=x*y",
    "III": "q=11 m=1 n=2 f=x g=y h=7*x*y^2+2*x*y",
    "IVa": "q=2^3 m=2 n=1 f=x^2+3*x g=y^2 h=6*x*y",
    "IVb": "q=2^3 m=2 n=1 f=x^2 g=y^2+3*y h=5*x*y",
}


def spec(F, f2, f3):
    return GraphSpec(F, parse_poly(f2, F), parse_poly(f3, F))


def random_params(kind, F, rng):
    nz = int(rng.integers(1, F.q))
    if kind == "Scale3":
        return {"alpha": nz}
    if kind == "Shear32":
        return {"beta": int(rng.integers(0, F.q)), "w": int(F.p ** rng.integers(0, F.k))}
    if kind == "PowCoord2":
        return {"w": int(F.p ** rng.integers(0, F.k))}
    if kind == "Translate":
        return {"beta": int(rng.integers(0, F.q)), "gamma": int(rng.integers(0, F.q))}
    if kind == "AddT3":
        return {"t": UniPoly(F, rng.integers(0, F.q, 3).tolist())}
    if kind == "SubstX":
        e = next(e for e in (3, 5, 7, 1) if np.gcd(e, F.q - 1) == 1)
        return {"sigma": UniPoly(F, [int(rng.integers(0, F.q))] + [0] * (e - 1) + [nz])}
    return {}


KINDS = ["SwapF2F3", "SwapXY", "Scale3", "Shear32", "AddT3", "SubstX", "PowCoord2", "Translate"]


@pytest.mark.parametrize("kind", KINDS)
@pytest.mark.parametrize("q", [3, 4, 5, 7])
def test_elementary_full(kind, q):
    F = field_of_order(q)
    G = spec(F, "x^2*y + x*y", "x*y^2 + 2*x*y")
    rng = np.random.default_rng(q)
    for _ in range(3):
        assert verify_iso(elementary(kind, G, **random_params(kind, F, rng)), "full")


@pytest.mark.parametrize("kind", KINDS)
@pytest.mark.parametrize("p,k", [(2, 4), (5, 2), (7, 2)])
def test_elementary_sampled(kind, p, k):
    F = make_field(p, k)
    q = F.q
    G = spec(F, "x^3*y + x*y", "x*y^2")
    rng = np.random.default_rng(q)
    iso = elementary(kind, G, **random_params(kind, F, rng))
    assert verify_iso(iso, "sampled", samples=20000, seed=q)


class _BadScale(Scale3):
    def inverse(self, batch):
        return self._scale(batch, self.params["alpha"])


def test_wrong_inverse_is_caught():
    F = make_field(7)
    bad = _BadScale(gamma3(F), alpha=3)
    assert not verify_iso(bad, "full")
    assert not verify_iso(bad, "sampled", samples=5000)


def test_wrong_target_is_caught():
    F = make_field(5)
    iso = elementary("Scale3", gamma3(F), alpha=2)
    iso.target = spec(F, "x*y", "3*x^2*y")
    assert not verify_iso(iso, "full")


def test_add_t3_x_squared_full():
    F = make_field(5)
    iso = elementary("AddT3", gamma3(F), t=UniPoly(F, [0, 0, 1]))
    assert iso.target.same_graph(spec(F, "x*y", "x^2*y + x^2"))
    assert verify_iso(iso, "full")


def test_non_permutation_rejected():
    F = make_field(7)
    with pytest.raises(IsoError):
        elementary("SubstX", gamma3(F), sigma=UniPoly(F, [0, 0, 1]))
    with pytest.raises(IsoError):
        elementary("Scale3", gamma3(F), alpha=0)
    with pytest.raises(IsoError):
        elementary("PowCoord2", gamma3(F), w=3)
    with pytest.raises(IsoError):
        elementary("Rotate", gamma3(F))


def test_full_mode_size_limit():
    with pytest.raises(IsoError):
        verify_iso(elementary("SwapXY", gamma3(make_field(2, 12))), "full")


def test_identity_chain():
    F = make_field(5)
    chain = IsoChain(gamma3(F))
    v = all_vertices(F)
    assert np.array_equal(chain.forward(v), v)
    assert verify_iso(chain, "full")


def test_chain_inverse_undoes_forward():
    F = make_field(2, 2)
    rng = np.random.default_rng(4)
    chain = IsoChain(spec(F, "x^2*y + x*y", "x*y^2"))
    for kind in KINDS * 2:
        chain.then(kind, **random_params(kind, F, rng))
    v = all_vertices(F)
    assert np.array_equal(chain.inverse(chain.forward(v)), v)
    assert verify_iso(chain, "full")


def test_chain_composition_is_associative():
    F = make_field(7)
    G = gamma3(F)
    a = IsoChain(G).then("Scale3", alpha=3)
    b = IsoChain(a.target).then("Shear32", beta=2)
    c = IsoChain(b.target).then("SwapXY")
    left = IsoChain(G).extend(IsoChain(G).then("Scale3", alpha=3).extend(b)).extend(c)
    right = IsoChain(G).extend(a).extend(IsoChain(b.source).extend(b).extend(c))
    v = all_vertices(F)
    assert np.array_equal(left.forward(v), right.forward(v))
    assert left.target.same_graph(right.target)


def test_extend_checks_endpoints():
    F = make_field(5)
    with pytest.raises(ChainError):
        IsoChain(gamma3(F)).extend(IsoChain(spec(F, "x*y", "x*y^2")))


def test_simplified_drops_involution_pairs_and_units():
    F = make_field(5)
    chain = IsoChain(gamma3(F)).then("SwapXY").then("SwapXY").then("Scale3", alpha=1).then("Shear32", beta=2)
    s = chain.simplified()
    assert s.transcript() == "Shear32 beta=2 w=1"
    v = all_vertices(F)
    assert np.array_equal(s.forward(v), chain.forward(v))


def test_json_round_trip():
    inst = parse_instance(CASES["IVa"])
    chain = chain_to_gamma3(classify(inst), inst)
    again = IsoChain.from_json(json.loads(chain.dumps()))
    assert again.transcript() == chain.transcript()
    assert again.target.same_graph(chain.target)
    data = json.loads(chain.dumps())
    data["target"]["f3"] = "x*y"
    with pytest.raises(ChainError):
        IsoChain.from_json(data)


@pytest.mark.parametrize("case", sorted(CASES))
def test_chain_golden_transcript(case):
    inst = parse_instance(CASES[case])
    w = classify(inst)
    assert w.case == case
    chain = chain_to_gamma3(w, inst)
    lines = (GOLDEN / f"chain_{case}.txt").read_text().splitlines()
    assert lines[0] == f"# {CASES[case]}"
    assert chain.transcript().splitlines() == lines[1:]
    assert chain.target.same_graph(gamma3(chain.source.field))
    assert verify_iso(chain, "sampled", samples=20000)


@pytest.mark.parametrize("case", sorted(CASES))
def test_pullback_gives_source_cycle(case):
    inst = parse_instance(CASES[case])
    chain = chain_to_gamma3(classify(inst), inst)
    assert verify_iso(chain, "sampled", samples=5000)
    cyc = pullback_cycle(chain, gamma3_8cycle(chain.source.field))
    assert len(cyc.vertices) == 8 and len(set(cyc.vertices)) == 8
    assert witness_is_cycle(chain.source, cyc)


def test_pullback_needs_verified_chain():
    inst = parse_instance(CASES["I"])
    chain = chain_to_gamma3(classify(inst), inst)
    with pytest.raises(ChainError):
        pullback_cycle(chain, gamma3_8cycle(chain.source.field))


def test_pullback_empty_chain_is_identity():
    F = make_field(3)
    w = gamma3_8cycle(F)
    assert pullback_cycle(IsoChain(gamma3(F)), w).vertices == w.vertices


def test_pullback_rejects_open_walk():
    F = make_field(3)
    w = gamma3_8cycle(F)
    with pytest.raises(ValueError):
        pullback_cycle(IsoChain(gamma3(F)), CycleWitness(w.vertices, False))


def test_gamma3_8cycle_is_a_cycle():
    for q in (3, 5, 7, 9):
        F = field_of_order(q)
        assert witness_is_cycle(gamma3(F), gamma3_8cycle(F))


def test_lemma2_chains_verify_in_full():
    for name, chain in lemma2_chains().items():
        assert chain.source.order <= 2 * 5**3
        assert verify_iso(chain, "full"), name


def test_completing_exponent():
    F = make_field(2, 3)
    assert completing_exponent(2, F) == 4
    assert completing_exponent(1, F) == 1
    assert (completing_exponent(4, F) * 4) % 8 == 0
