"""Classical cellular automaton on an unbounded 1-D lattice, with Godel indices.

Runs a left-moving glider under a radius-1 rule, prints each configuration
and its index, then shows that the index sequence is computable from k by
decoding the indices back into configurations.
"""

from qgandy.classical_ca import ClassicalRule, config_index, config_unindex, evolve
from qgandy.codec import index_to_json
from qgandy.lattice import Configuration, Neighborhood


def render(cfg, lo=-8, hi=8):
    return "".join(".#o"[cfg[(x,)] - 1] for x in range(lo, hi + 1))


def main():
    nb = Neighborhood(((-1,), (0,), (1,)))

    # a 2 moves left one cell per step; a 3 is a wall that absorbs it
    def local(left, me, right):
        if me == 3:
            return 3
        return right if right == 2 else 1

    rule = ClassicalRule.from_function(3, nb, local)
    cfg = Configuration({(5,): 2, (-4,): 3}, dim=1)

    print("step  configuration      index digits  last digits")
    for k in range(12):
        now = evolve(cfg, rule, k)
        idx = config_index(now)
        text = index_to_json(idx)
        print(f"{k:>4}  {render(now)}  {len(text):>12}  {text[-20:]}")
        assert config_unindex(idx, dim=1) == now

    print("\nEach index decodes back to the configuration it came from.")


if __name__ == "__main__":
    main()
