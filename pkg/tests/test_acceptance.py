"""Acceptance suite: one test and one PASS/FAIL summary line per criterion.

Run ``pytest tests/test_acceptance.py -v``; the summary lines appear in the
"acceptance criteria" section at the end of the report.
"""

import math
import os
import subprocess
import sys
import time
from fractions import Fraction

import numpy as np
import pytest

from acceptance_log import record
from blochsim.bloch import compress_state, decaying_random_state, purity, state_to_vector, vector_to_state
from blochsim.evolution import evolution_matrix, precession_hamiltonian
from blochsim.generators import _CACHE, build_generators
from blochsim.io import file_hash, matrix_to_json
from blochsim.membrane import RngSpec, collapse_target, estimate_probabilities, final_state
from blochsim.nonuniform import epsilon_probability, hilbert_consistency_check, kolmogorov_check
from blochsim.observables import decompose, luders_update, observable_from_basis
from blochsim.simplex import (
    inradius,
    region_measure,
    region_measure_cayley_menger,
    simplex_volume_cayley_menger,
    simplex_volume_closed,
)
from blochsim.universal import average_profile, identity_check, uniform_reference
from oracles import GELL_MANN, PAULI, ket_projector, random_density, random_unitary

S3 = math.sqrt(3)
H = 0.5 * math.sqrt(1.5)

# nonzero structure constants of su(3), one index order each (1-based)
SU3_F = {(1, 2, 3): 1.0, (4, 5, 8): S3 / 2, (6, 7, 8): S3 / 2,
         (1, 4, 7): 0.5, (2, 4, 6): 0.5, (2, 5, 7): 0.5, (3, 4, 5): 0.5,
         (5, 1, 6): 0.5, (6, 3, 7): 0.5}

SPIN1_KETS = {
    (1, 1): [0.5, math.sqrt(2) / 2, 0.5],
    (1, 0): [-1 / math.sqrt(2), 0, 1 / math.sqrt(2)],
    (1, -1): [0.5, -math.sqrt(2) / 2, 0.5],
    (2, 1): np.array([-1, -1j * math.sqrt(2), 1]) * 0.5j,
    (2, 0): np.array([1, 0, 1]) * (-1j / math.sqrt(2)),
    (2, -1): np.array([-1, 1j * math.sqrt(2), 1]) * 0.5j,
    (3, 1): [1, 0, 0],
    (3, 0): [0, 1, 0],
    (3, -1): [0, 0, 1],
}
SPIN1_VECTORS = {
    (1, 1): [H, 0, -S3 / 8, S3 / 4, 0, H, 0, 1 / 8],
    (1, 0): [0, 0, S3 / 4, -S3 / 2, 0, 0, 0, -1 / 4],
    (1, -1): [-H, 0, -S3 / 8, S3 / 4, 0, -H, 0, 1 / 8],
    (2, 1): [0, H, -S3 / 8, -S3 / 4, 0, 0, H, 1 / 8],
    (2, 0): [0, 0, S3 / 4, S3 / 2, 0, 0, 0, -1 / 4],
    (2, -1): [0, -H, -S3 / 8, -S3 / 4, 0, 0, -H, 1 / 8],
    (3, 1): [0, 0, S3 / 2, 0, 0, 0, 0, 1 / 2],
    (3, 0): [0, 0, -S3 / 2, 0, 0, 0, 0, 1 / 2],
    (3, -1): [0, 0, 0, 0, 0, 0, 0, -1],
}


def rotation(a):
    return np.array([[math.cos(a), -math.sin(a)], [math.sin(a), math.cos(a)]])


def reference_precession(N, wt):
    """Printed precession forms: equal 2x2 rotation blocks, diagonal components fixed."""
    if N == 2:
        V = np.eye(3)
        V[:2, :2] = rotation(wt)
        return V
    V = np.eye(8)
    for a in (0, 3, 5):
        V[a:a + 2, a:a + 2] = rotation(wt)
    return V


def test_criterion_01_generators():
    start = time.perf_counter()
    _CACHE.clear()
    errors = {}
    for N in range(2, 9):
        L = build_generators(N).matrices
        errors[N] = max(np.max(np.abs(np.einsum("iaa->i", L))),
                        np.max(np.abs(np.einsum("iab,jba->ij", L, L) - 2 * np.eye(len(L)))))
    pauli = np.max(np.abs(build_generators(2).matrices - PAULI))
    gell_mann = np.max(np.abs(build_generators(3).matrices - GELL_MANN))
    f = build_generators(3).f.todense()
    expected = np.zeros((8, 8, 8))
    for (i, j, k), v in SU3_F.items():
        for (a, b, c), s in [((i, j, k), 1), ((j, k, i), 1), ((k, i, j), 1),
                             ((j, i, k), -1), ((i, k, j), -1), ((k, j, i), -1)]:
            expected[a - 1, b - 1, c - 1] = s * v
    f_err = np.max(np.abs(f - expected))
    elapsed = time.perf_counter() - start
    ok = max(errors.values()) < 1e-12 and pauli == 0 and gell_mann < 1e-15 and f_err < 1e-12 \
        and elapsed < 5
    assert record(1, "generator suite", ok,
                  f"trace/gram err {max(errors.values()):.1e}, f err {f_err:.1e}, {elapsed:.2f}s")


def test_criterion_02_bloch_map():
    rng = np.random.default_rng(2002)
    worst = worst_purity = 0.0
    for N in (2, 3, 4, 5):
        basis = build_generators(N)
        for _ in range(10_000):
            D = random_density(N, rng, rank=int(rng.integers(1, N + 1)))
            r = state_to_vector(D, basis)
            worst = max(worst, np.max(np.abs(vector_to_state(r, basis) - D)))
            worst_purity = max(worst_purity, abs(purity(r) - np.trace(D @ D).real))
    table = max(np.max(np.abs(state_to_vector(ket_projector(SPIN1_KETS[k])) - SPIN1_VECTORS[k]))
                for k in SPIN1_VECTORS)
    ok = worst < 1e-11 and worst_purity < 1e-12 and table < 1e-12
    assert record(2, "Bloch map round trip, purity, spin-1 table", ok,
                  f"round trip {worst:.1e}, purity {worst_purity:.1e}, table {table:.1e}")


def test_criterion_03_born_reproduction():
    rng = np.random.default_rng(3003)
    start = time.perf_counter()
    worst_z, failures = 0.0, 0
    for N in (2, 3, 4, 5):
        for k in range(20):
            D = random_density(N, rng, rank=int(rng.integers(1, N + 1)))
            # every fourth observable fuses the first two eigenvectors
            partition = [[0, 1]] + [[j] for j in range(2, N)] if k % 4 == 3 and N > 2 else None
            obs = observable_from_basis(random_unitary(N, rng), partition=partition)
            rep = estimate_probabilities(state_to_vector(D), obs, 1_000_000, RngSpec(3, 100 * N + k))
            born = np.array([np.trace(D @ P).real for P in
                             (obs.group_projector(g) for g in range(obs.M))])
            sigma = np.sqrt(born * (1 - born) / rep.samples)
            diff = np.abs(rep.frequencies - born)
            z = np.max(np.where(sigma > 0, diff / np.where(sigma > 0, sigma, 1), 0))
            worst_z = max(worst_z, z)
            failures += int(np.any(diff > 4 * sigma + 1e-12))
    elapsed = time.perf_counter() - start
    ok = failures == 0 and elapsed < 120
    assert record(3, "Born reproduction, 80 pairs at 1e6 samples", ok,
                  f"max |z| {worst_z:.2f}, {failures} failures, {elapsed:.1f}s")


def test_criterion_04_degenerate_measurement():
    obs = observable_from_basis(np.eye(3), partition=[[0, 2], [1]])
    psi = np.sqrt([1 / 2, 1 / 3, 1 / 6]) * np.exp(1j * np.array([0.0, 0.4, 1.1]))
    D = ket_projector(psi)
    r = state_to_vector(D)
    bary = decompose(r, obs).barycentric
    rep = estimate_probabilities(r, obs, 1_000_000, RngSpec(4))
    sigma = math.sqrt(2 / 3 * 1 / 3 / rep.samples)
    freq_ok = abs(rep.frequencies[0] - 2 / 3) <= 4 * sigma
    s = final_state(r, obs, 0)
    lud_err = np.max(np.abs(vector_to_state(s) - luders_update(D, obs, 0)))
    s_par = collapse_target(r, obs, 0)
    target_err = np.max(np.abs(s_par - (0.75 * obs.vertex_vectors[0] + 0.25 * obs.vertex_vectors[2])))
    emersion = np.max(np.abs(obs.vertex_vectors @ (s - s_par)))
    ok = freq_ok and lud_err < 1e-10 and emersion < 1e-10 and target_err < 1e-12 \
        and np.allclose(bary, [1 / 2, 1 / 3, 1 / 6], atol=1e-14)
    assert record(4, "degenerate measurement", ok,
                  f"freq {rep.frequencies[0]:.5f} (z {(rep.frequencies[0] - 2 / 3) / sigma:.2f}), "
                  f"Luders {lud_err:.1e}, emersion {emersion:.1e}")


def test_criterion_05_simplex_geometry():
    rng = np.random.default_rng(5005)
    vol_err = region_err = born_err = 0.0
    inr = True
    for N in range(2, 9):
        obs = observable_from_basis(random_unitary(N, rng))
        total = simplex_volume_closed(N)
        vol_err = max(vol_err, abs(simplex_volume_cayley_menger(obs.vertex_vectors) - total))
        inr &= inradius(N) == 1 / (N - 1)
        for w in rng.dirichlet(np.ones(N), 100):
            dec = decompose(w @ obs.vertex_vectors, obs)
            mu = np.array([region_measure_cayley_menger(obs, dec, i) for i in range(N)])
            mu_h = np.array([region_measure(dec, i) for i in range(N)])
            region_err = max(region_err, abs(mu.sum() - total), abs(mu_h.sum() - total))
            born_err = max(born_err, np.max(np.abs(mu / total - dec.barycentric)),
                           np.max(np.abs(mu_h / total - dec.barycentric)))
    segment = simplex_volume_closed(2) == 2.0 and \
        abs(simplex_volume_cayley_menger(np.array([[1.0, 0, 0], [-1.0, 0, 0]])) - 2) < 1e-15
    ok = vol_err < 1e-9 and segment and inr and region_err < 1e-9 and born_err < 1e-9
    assert record(5, "simplex geometry", ok,
                  f"CM vs closed {vol_err:.1e}, region sum {region_err:.1e}, ratio vs Born {born_err:.1e}")


def test_criterion_06_evolution():
    rng = np.random.default_rng(6006)
    orth = group = 0.0
    for N in range(2, 7):
        A = rng.standard_normal((N, N)) + 1j * rng.standard_normal((N, N))
        Hm = (A + A.conj().T) / 2
        s, t = rng.uniform(-2, 2, 2)
        orth = max(orth, evolution_matrix(Hm, t).orthogonality_error())
        group = max(group, np.max(np.abs((evolution_matrix(Hm, s) @ evolution_matrix(Hm, t)).V
                                         - evolution_matrix(Hm, s + t).V)))
    mismatch = {}
    for N in (2, 3):
        for wt in (0.0, math.pi / 4, math.pi / 2, math.pi):
            V = evolution_matrix(precession_hamiltonian(N, 1.0), wt).V
            err = np.max(np.abs(V - reference_precession(N, wt)))
            if err >= 1e-12:
                mismatch[(N, round(wt / math.pi, 2))] = err
    ok = orth < 1e-9 and group < 1e-9 and not mismatch
    detail = f"orthogonality {orth:.1e}, group {group:.1e}"
    if mismatch:
        detail += "; precession mismatch at (N, wt/pi): " + ", ".join(
            f"{k}: {v:.3g}" for k, v in sorted(mismatch.items()))
    assert record(6, "evolution", ok, detail)


def test_criterion_07_epsilon_model():
    half = Fraction(1, 2)
    branches = [
        epsilon_probability(Fraction(1, 4), half) == (Fraction(3, 4), Fraction(1, 4)),
        epsilon_probability(Fraction(0), Fraction(1, 3)) == (half, half),
        epsilon_probability(Fraction(3, 5), half) == (1, 0),
        epsilon_probability(Fraction(-3, 5), half) == (0, 1),
        epsilon_probability(half, half) == (1, 0),
        epsilon_probability(-half, half) == (0, 1),
    ]
    rep = kolmogorov_check(math.sqrt(2) / 2)
    kolmogorov = (rep.p_c_and_b, rep.p_c_and_a, rep.p_b_and_not_a) == (1, 0, 0.5) and rep.violated
    hilbert = hilbert_consistency_check(1, 1, 0.5).contradiction and \
        not hilbert_consistency_check(1, 1, 0).contradiction
    ok = all(branches) and kolmogorov and hilbert
    assert record(7, "epsilon model", ok,
                  f"branches {sum(branches)}/{len(branches)}, "
                  f"Kolmogorov ({rep.p_c_and_b} - {rep.p_c_and_a}) > {rep.rhs}: {rep.violated}, "
                  f"Hilbert {hilbert}")


def test_criterion_08_universal_average():
    start = time.perf_counter()
    exact = all(average_profile(n) == [uniform_reference(n, i) for i in range(n + 1)]
                for n in range(1, 17))
    elapsed = time.perf_counter() - start
    identities = all(identity_check(n).holds for n in range(257))
    ok = exact and identities and elapsed < 60
    assert record(8, "universal average", ok,
                  f"averages exact {exact}, identities {identities}, n<=16 in {elapsed:.2f}s")


def test_criterion_09_truncation():
    D = decaying_random_state(64, np.random.default_rng(7))
    split = list(range(0, 64, 2))
    exact = sum(D[i, i].real for i in split)
    errs = [abs(compress_state(D, split, M, N) - exact)
            for N, M in [(8, 4), (16, 8), (32, 16), (64, 32)]]
    ok = all(a > b for a, b in zip(errs, errs[1:])) and errs[-1] < 1e-12
    assert record(9, "truncation sequence", ok, ", ".join(f"{e:.2e}" for e in errs))


def test_criterion_10_determinism(tmp_path):
    import json
    psi = np.sqrt([1 / 2, 1 / 3, 1 / 6])
    (tmp_path / "state.json").write_text(json.dumps({"N": 3, "matrix": matrix_to_json(ket_projector(psi))}))
    (tmp_path / "obs.json").write_text(json.dumps({"N": 3, "matrix": matrix_to_json(np.diag([3.0, 2, 1]))}))
    hashes = []
    for threads in ("1", "4"):
        out = tmp_path / f"run{threads}"
        env = dict(os.environ, BLOCHSIM_THREADS=threads)
        proc = subprocess.run(
            [sys.executable, "-m", "blochsim", "measure", "--state", str(tmp_path / "state.json"),
             "--observable", str(tmp_path / "obs.json"), "--samples", "500000", "--seed", "42",
             "--out-dir", str(out)],
            env=env, capture_output=True, text=True)
        assert proc.returncode == 0, proc.stderr
        hashes.append(file_hash(out / "frequencies.json"))
    ok = hashes[0] == hashes[1]
    assert record(10, "determinism across thread counts", ok, f"sha256 {hashes[0][:16]} vs {hashes[1][:16]}")


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-v"]))
