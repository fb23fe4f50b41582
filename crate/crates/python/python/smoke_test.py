"""Smoke test for the pyamasnet extension.

Build and install with `maturin develop` (from crates/python), or put the
compiled library on PYTHONPATH as pyamasnet.so, then run this script.
"""

import os
import sys

import pyamasnet

MODELS = os.path.join(os.path.dirname(__file__), "..", "..", "core", "models")


def main():
    tgc = pyamasnet.Model.load(os.path.join(MODELS, "tgc.amas"))
    assert tgc.agents == ["train1", "controller", "train2"]
    assert tgc.verify_prop1()
    assert tgc.find_dead() == []

    dead_zero = pyamasnet.Model.load(os.path.join(MODELS, "dead_zero.amas"))
    dead = dead_zero.find_dead()
    for t in dead_zero.transitions("0"):
        assert t in dead, t
        assert not dead_zero.is_live_bruteforce(t)

    two = pyamasnet.Model.load(os.path.join(MODELS, "two_paths.amas"))
    d = two.transitions("d")[0]
    fewest = two.check_liveness(d)
    shortest = two.check_liveness(d, heuristic="short")
    assert fewest.live and shortest.live
    assert fewest.witness_labels == ["b", "c", "d"], fewest.witness_labels
    assert fewest.max_agents < shortest.max_agents

    model = pyamasnet.Model.generate(7, agents=3, states=4, labels=5)
    again = pyamasnet.Model.parse(model.render())
    assert again.render() == model.render()
    for t in model.transitions():
        assert model.check_liveness(t).live == model.is_live_bruteforce(t), t
    assert model.dot("net").startswith("digraph net")

    try:
        pyamasnet.Model.parse("agent a\nstates x\ninit x\narc x go y\n")
    except ValueError as e:
        assert "line 4" in str(e)
    else:
        raise AssertionError("expected a parse error")

    print("pyamasnet smoke test passed")
    return 0


if __name__ == "__main__":
    sys.exit(main())
