"""Drop one hypothesis at a time and watch an uncomputable bit leak out.

Each demo builds a rule that breaks exactly one hypothesis and reads bits of
an oracle from the evolution. Here the oracle is primality, so nothing is
truly uncomputable; the point is that the rule's behaviour is as hard as
whatever oracle it is handed. Re-running with the hypothesis restored makes
the output independent of the oracle.
"""

from fractions import Fraction

from qgandy.gallery import (
    Oracle,
    demo_nonquiescent_input,
    demo_scalar_extraction,
    demo_space_inhomogeneous,
    demo_stochastic_correlation,
    demo_time_inhomogeneous,
    demo_unbounded_density,
    demo_unbounded_velocity,
)

N = 16


def bits(result):
    return "".join(str(b) for b in result.bits[:N])


def main():
    primes = Oracle.primality()
    truth = "".join(str(primes(i)) for i in range(N))
    print(f"oracle bits        {truth}\n")

    runs = {
        "space": lambda r: demo_space_inhomogeneous(primes, range(N), restored=r),
        "time": lambda r: demo_time_inhomogeneous(primes, N, restored=r),
        "density": lambda r: demo_unbounded_density(primes, N - 1, restored=r),
        "input": lambda r: demo_nonquiescent_input(primes, N, restored=r),
    }
    for name, go in runs.items():
        print(f"{name:<8} broken   {bits(go(False))}")
        print(f"{name:<8} restored {bits(go(True))}")

    vel = [demo_unbounded_velocity(primes, i, 0).bits[0] for i in range(N)]
    vel_r = [demo_unbounded_velocity(primes, i, 0, restored=True).bits[0] for i in range(N)]
    print(f"velocity broken   {''.join(map(str, vel))}")
    print(f"velocity restored {''.join(map(str, vel_r))}")

    stoch = [demo_stochastic_correlation(primes, i, samples=2000, seed=i).bits[0] for i in range(N)]
    print(f"coins    broken   {''.join(map(str, stoch))}")

    # an amplitude whose square is an arbitrary number shows up in the statistics
    est = demo_scalar_extraction(Fraction(3, 5), samples=10_000, seed=0)
    print(f"\nscalar extraction: estimate {est.estimate:.4f} against exact {est.exact}")


if __name__ == "__main__":
    main()
