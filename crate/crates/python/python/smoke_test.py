"""Smoke test for the compiled extension. Run after `maturin develop` or
`pip install -e crates/python --no-build-isolation`."""

import math
import sys

import markov_persuasion_py as mp


def main() -> int:
    inst = mp.Instance.builtin("appendixA")
    assert inst.k == 2
    pi = inst.invariant_distribution()
    assert abs(pi[0] - 0.25) < 1e-12, pi

    v = mp.solve(inst, 0.5, grid=400)
    assert v.error_bound <= 1e-6
    assert abs(v(pi) - 0.5125) < 2e-3, v(pi)
    assert len(v.values) == len(v.points) == 401

    traj = mp.phi_psi(inst, [0.0, 0.5, 0.9], grid=400)
    assert traj["monotone_phi"] and traj["monotone_psi"], traj
    assert abs(traj["psi"][0] - 0.125) < 1e-3

    mean, stderr = mp.random_duration_payoff(inst, 0.5, trials=20_000, seed=7, grid=400)
    assert abs(mean - v(pi) / 0.5) <= 4 * stderr, (mean, stderr)

    value, row, col = mp.matrix_game_value([[1.0, -1.0], [-1.0, 1.0]])
    assert abs(value) < 1e-9 and abs(row[0] - 0.5) < 1e-9 and abs(col[0] - 0.5) < 1e-9

    a = [math.sin(n) for n in range(600)]
    lhs, rhs, slack, residual = mp.sorin_identity(a, 0.3, 0.7, 400)
    assert residual <= 1e-9, (lhs, rhs, slack)

    report = mp.run_scenario(
        'schema_version = 1\nname = "smoke"\nexperiment = "trajectory"\n'
        'instance = "periodic"\ngrid = 200\ndeltas = [0.2, 0.6]\n'
    )
    assert report["pass"], report["summary"]

    try:
        mp.Instance.from_tables([[0.5, 0.4], [0.5, 0.5]], [[1.0], [0.0]], [[1.0], [0.0]])
    except ValueError as e:
        assert "row" in str(e)
    else:
        raise AssertionError("non-stochastic matrix accepted")

    print(f"markov_persuasion_py {mp.__version__}: smoke test passed")
    return 0


if __name__ == "__main__":
    sys.exit(main())
