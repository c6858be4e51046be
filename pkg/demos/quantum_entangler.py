"""A three-level quantum cellular automaton with an entangling step.

The rule mixes the two non-quiescent levels of every cell with a Hadamard
and couples neighbours through a diagonal phase. Content never moves, but
neighbouring excitations become entangled. We check the rule, run a few
exact steps from a product state, track the purity of one cell, and sample
measurements.
"""

from fractions import Fraction

from qgandy.field import approx_real, zeta8
from qgandy.fock import StateVector, inner, reduced_density
from qgandy.gates import embed, hadamard
from qgandy.localop import matmul
from qgandy.lattice import Configuration
from qgandy.qca import DoubledState, check_causality, coupled_phase_rule, measure_cell, qca_step, verify_rule


def main():
    F = zeta8()
    u = embed(hadamard(F), (2, 3), 3, F)
    coupling = [[1, 1, 1], [1, -1, 1], [1, 1, F.gen**2]]
    rule = coupled_phase_rule(u, coupling, 3, F)

    report = verify_rule(rule)
    print("rule checks:", report.checks)
    causal = check_causality(rule, trials=20, seed=0)
    print(f"causality: {causal.passed}/{causal.passed + causal.failed} trials agree")

    psi = DoubledState.from_primary(StateVector.basis(F, 3, Configuration({(0,): 2, (1,): 2}, dim=1)))
    print("\nstep  terms  norm^2  purity of cell 0")
    for t in range(4):
        if t:
            psi = qca_step(psi, rule)
        v = psi.primary()
        rho = reduced_density(v, [(0,)])
        sq = matmul(rho.entries, rho.entries)
        purity = sum((sq[i][i] for i in range(len(sq))), F.zero)
        lo, hi = approx_real(purity, Fraction(1, 10**6))
        print(f"{t:>4}  {len(v):>5}  {str(inner(v, v)):>6}  [{float(lo):.6f}, {float(hi):.6f}]")

    counts = measure_cell(psi, (0,), seed=7, samples=5000)
    print("measurement counts at cell 0 (level: count):", counts)


if __name__ == "__main__":
    main()
