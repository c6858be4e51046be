import random
from functools import lru_cache

import pytest

from builders import random_state, random_valid_rule
from oracles import dense_qca_step
from qgandy.errors import ContractViolation, DomainError
from qgandy.field import zeta8
from qgandy.fock import StateVector
from qgandy.gates import embed, hadamard, inv_sqrt2, phase, random_cell_unitary, swap_matrix
from qgandy.lattice import Configuration, Neighborhood, grow
from qgandy.localop import LocalMap, apply, identity_matrix, matmul
from qgandy.qca import (
    DoubledState,
    QCARule,
    check_causality,
    coupled_phase_rule,
    measure_cell,
    qca_evolve,
    qca_step,
    shift_unitary_rule,
    swap_rule,
    verify_rule,
)

F = zeta8()
SELF = Neighborhood(((0,),))
PAIR = Neighborhood(((0,), (1,)))


def basis(cells, n=2):
    return StateVector.basis(F, n, Configuration(cells, dim=1))


def doubled(v):
    return DoubledState.from_primary(v)


def per_cell_rule(u, n, nb=SELF):
    return shift_unitary_rule(u, nb, n, F)


def apply_per_cell(u, v, cells):
    for c in cells:
        v = apply(LocalMap([c], u, v.n, F), v)
    return v


def test_swap_rule_is_identity():
    rule = swap_rule(SELF, 2, F)
    v = basis({(0,): 2, (1,): 2}) + basis({(3,): 2}) * F.gen
    assert qca_step(doubled(v), rule).primary() == v


def test_per_cell_unitary_rule():
    rng = random.Random(0)
    for _ in range(20):
        u = random_cell_unitary(3, F, rng)
        rule = per_cell_rule(u, 3, Neighborhood(((0,), (-1,))))
        v = random_state(rng, F, 3, [0, 1, 2], 3)
        if not v:
            continue
        out = qca_step(doubled(v), rule).primary()
        assert out == apply_per_cell(u, v, sorted(grow(v.support, rule.neighborhood)))
        two = qca_evolve(doubled(v), rule, 2).primary()
        assert two == apply_per_cell(matmul(u, u), v, sorted(v.support))


def test_quiescent_state_fixed():
    rng = random.Random(1)
    q = doubled(StateVector.quiescent(F, 2, 1))
    for _ in range(5):
        rule, _, _ = random_valid_rule(rng)
        assert qca_step(q, rule) == q


def test_evolve_zero_steps():
    rule = swap_rule(SELF, 2, F)
    psi = doubled(basis({(0,): 2}))
    assert qca_evolve(psi, rule, 0) == psi
    with pytest.raises(DomainError):
        qca_evolve(psi, rule, -1)


def test_shift_moves_content():
    rule = shift_unitary_rule(identity_matrix(F, 2), PAIR, 2, F, source=(1,))
    psi = doubled(basis({(3,): 2}))
    assert qca_evolve(psi, rule, 4).primary() == basis({(-1,): 2})


@lru_cache(maxsize=None)
def entangling_rule():
    u = embed(hadamard(F), (2, 3), 3, F)
    coupling = [[1, 1, 1], [1, -1, 1], [1, 1, F.gen**2]]
    return coupled_phase_rule(u, coupling, 3, F)


def test_coupled_rule_entangles_and_preserves_norm():
    rule = entangling_rule()
    v = basis({(0,): 2, (1,): 2}, 3) + basis({(2,): 3}, 3) * F.gen - basis({(0,): 3, (4,): 2}, 3)
    psi = doubled(v)
    norm = psi.norm_sq()
    for _ in range(10):
        psi = qca_step(psi, rule)
        assert psi.norm_sq() == norm
    # one step on |0 0> at neighbouring cells yields a non-product state
    out = qca_step(doubled(basis({(0,): 2, (1,): 2}, 3)), rule).primary()
    amps = {tuple(cfg[(c,)] for c in (0, 1)): a for cfg, a in out.items()}
    assert amps[(2, 2)] * amps[(3, 3)] != amps[(2, 3)] * amps[(3, 2)]


def test_coupled_rule_matches_global_product():
    """The step equals G = (prod D) (tensor u) applied directly."""
    u = embed(hadamard(F), (2, 3), 3, F)
    coupling = [[1, 1, 1], [1, -1, 1], [1, 1, F.gen**2]]
    rule = coupled_phase_rule(u, coupling, 3, F)
    v = basis({(0,): 2, (2,): 3}, 3) + basis({(1,): 3}, 3)
    cells = sorted(grow(v.support, rule.neighborhood))
    w = apply_per_cell(u, v, cells)
    terms = {}
    for cfg, a in w.items():
        ph = F.one
        for x in range(cells[0][0] - 1, cells[-1][0] + 1):
            ph = ph * F(coupling[cfg[(x,)] - 1][cfg[(x + 1,)] - 1])
        terms[cfg] = a * ph
    assert qca_step(doubled(v), rule).primary() == StateVector(F, 3, 1, list(terms.items()))


def test_verify_rule_identity_passes():
    K = identity_matrix(F, 4)
    report = verify_rule(QCARule(PAIR, identity_matrix(F, 8), 2, F, validate=False))
    assert report.ok
    assert verify_rule(QCARule(SELF, K, 2, F, validate=False)).ok


def test_identity_window_map_breaks_ancilla_restoration():
    rule = QCARule(SELF, identity_matrix(F, 4), 2, F)
    with pytest.raises(ContractViolation) as err:
        qca_step(doubled(basis({(0,): 2})), rule)
    assert err.value.hypothesis == "quiescence"


def test_verify_rule_projector_fails_unitarity():
    K = identity_matrix(F, 4)
    K[3][3] = F.zero
    report = verify_rule(QCARule(SELF, K, 2, F, validate=False))
    assert not report.checks["unitarity"]
    with pytest.raises(ContractViolation) as err:
        QCARule(SELF, K, 2, F)
    assert err.value.hypothesis == "unitarity"


def test_verify_rule_quiescent_phase_fails():
    K = [[x * F.gen for x in row] for row in swap_matrix(2, F)]
    report = verify_rule(QCARule(SELF, K, 2, F, validate=False))
    assert report.checks["unitarity"]
    assert not report.checks["quiescence"]
    assert "renormalize" in report.messages["quiescence"]


def test_verify_rule_commutation_failure():
    # window (C', C, C+1): flip C when C+1 holds e2; shifted copies overlap badly
    size = 8
    K = [[F.zero] * size for _ in range(size)]
    for a in range(2):
        for b in range(2):
            for c in range(2):
                out = (a, b ^ c, c)
                K[out[0] * 4 + out[1] * 2 + out[2]][a * 4 + b * 2 + c] = F.one
    report = verify_rule(QCARule(PAIR, K, 2, F, validate=False))
    assert report.checks["unitarity"] and report.checks["quiescence"]
    assert not report.checks["commutation"]
    with pytest.raises(ContractViolation) as err:
        QCARule(PAIR, K, 2, F)
    assert err.value.hypothesis == "commutation"


def test_non_quiescent_ancilla_rejected():
    rule = swap_rule(SELF, 2, F)
    bad = DoubledState(StateVector.basis(F, 2, Configuration({(0, 1): 2}, dim=2)))
    with pytest.raises(ContractViolation):
        qca_step(bad, rule)


def test_order_independence_and_covariance():
    rng = random.Random(5)
    rule = entangling_rule()
    for _ in range(10):
        v = random_state(rng, F, 3, [0, 1, 2], 3)
        if not v:
            continue
        psi = doubled(v)
        active = sorted(grow(psi.support, rule.neighborhood))
        shuffled = list(active)
        rng.shuffle(shuffled)
        out = qca_step(psi, rule)
        assert qca_step(psi, rule, order=shuffled) == out
        assert out.support <= grow(psi.support, rule.neighborhood)
        t = (rng.randint(-9, 9),)
        assert qca_step(psi.translate(t), rule) == out.translate(t)


def test_order_must_cover_active_cells():
    rule = swap_rule(SELF, 2, F)
    with pytest.raises(DomainError):
        qca_step(doubled(basis({(0,): 2})), rule, order=[(1,)])


def test_dense_oracle_small():
    rng = random.Random(6)
    for _ in range(10):
        rule, _, _ = random_valid_rule(rng)
        v = random_state(rng, F, 2, [0, 1, 2, 3], 3)
        if not v:
            continue
        out = qca_step(doubled(v), rule)
        terms = {tuple(((c[0], 0), s) for c, s in cfg.items()): a for cfg, a in v.items()}
        offsets = [o[0] for o in rule.neighborhood.offsets]
        expected = dense_qca_step(rule.K, offsets, 2, list(range(-1, 5)), terms, F.zero)
        got = {tuple(((c[0], c[1]), s) for c, s in cfg.items()): a for cfg, a in out.vector.items()}
        assert got == expected


def test_dense_oracle_entangling_rule_two_levels():
    u = [[F.one, F.zero], [F.zero, phase(F, 1)]]
    rule = coupled_phase_rule(u, [[1, 1], [1, -1]], 2, F)
    rng = random.Random(4)
    for _ in range(3):
        v = random_state(rng, F, 2, [0, 1, 2, 3], 3)
        if not v:
            continue
        v = apply(LocalMap([(1,)], hadamard(F), 2, F), v)
        out = qca_step(doubled(v), rule)
        terms = {tuple(((c[0], 0), s) for c, s in cfg.items()): a for cfg, a in v.items()}
        expected = dense_qca_step(rule.K, [-1, 0, 1], 2, list(range(-2, 6)), terms, F.zero)
        got = {tuple(((c[0], c[1]), s) for c, s in cfg.items()): a for cfg, a in out.vector.items()}
        assert got == expected


def test_rule_json_roundtrip():
    rule = entangling_rule()
    back = QCARule.from_json(rule.to_json(), F)
    assert back.K == rule.K and back.neighborhood == rule.neighborhood and back.n == 3


def test_causality_valid_rules_pass():
    rng = random.Random(2)
    rules = [swap_rule(SELF, 2, F), entangling_rule()] + [random_valid_rule(rng)[0] for _ in range(3)]
    for rule in rules:
        report = check_causality(rule, trials=50, seed=1)
        assert report.ok, report.to_json()
        assert all(t.precondition for t in report.trials)


def test_causality_detects_non_causal_map():
    rule = swap_rule(Neighborhood.moore(1), 2, F)
    far_swap = LocalMap([(0, 0), (3, 0)], swap_matrix(2, F), 2, F)
    report = check_causality(rule, trials=50, seed=0, step=lambda s: DoubledState(apply(far_swap, s.vector)))
    assert report.failed > 0


def test_measure_cell():
    psi = doubled(basis({(0,): 2}))
    assert measure_cell(psi, (0,), seed=1, samples=100) == {1: 0, 2: 100}
    h = inv_sqrt2(F)
    sup = doubled((StateVector.quiescent(F, 2, 1) + basis({(0,): 2})) * h)
    counts = measure_cell(sup, (0,), seed=7, samples=10_000)
    assert abs(counts[1] - 5000) <= 4 * 50
    assert measure_cell(sup, (0,), seed=7, samples=10_000) == counts
    with pytest.raises(DomainError):
        measure_cell(doubled(basis({(0,): 2}) * 2), (0,), seed=0, samples=10)


def test_doubled_state_roundtrip():
    v = basis({(0,): 2, (-4,): 2}) * F.gen
    assert doubled(v).primary() == v
    assert doubled(v).support == v.support
