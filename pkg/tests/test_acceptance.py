"""Acceptance suite: one test per release criterion, at the stated tolerances.

The heavyweight scenario (16 antennas, 1200 subcarriers over 3 GHz at 28 GHz,
499-point direction grid, 200 trials) is built once per module and shared by
the criteria that evaluate it.
"""

import os
import time
from dataclasses import dataclass

import numpy as np
import pytest

from ttdbeam.core import (
    ArrayConfig,
    PsiGrid,
    SystemConfig,
    argmax_directions,
    beampattern_of_precoder,
    precoder_matrix,
    wrap_sine,
    zero_config,
)
from ttdbeam.dictionary import build_dictionary, load, save
from ttdbeam.evaluation import EvalScenario, ecdf, monte_carlo, report_csv_lines, runtime_bench
from ttdbeam.hdb import decompose, make_hdb_synthesizer
from ttdbeam.solvers import (
    SolverParams,
    default_max_delay,
    delay_grid,
    exhaustive_oracle,
    jpta_approx,
    make_jpta_synthesizer,
    objective,
)
from ttdbeam.splitbeam import DirectionMap, ideal_split_precoder


@dataclass
class FullScaleRun:
    cfg: SystemConfig
    dictionary: object
    report: object
    scenario: EvalScenario
    build_seconds: float
    eval_seconds: float


@pytest.fixture(scope="module")
def full_scale():
    cfg = SystemConfig(16, 1200, 28e9, 3e9)
    params = SolverParams(max_delay=default_max_delay(cfg), n_iterations=30, delay_grid_size=65536)
    t0 = time.perf_counter()
    dictionary = build_dictionary(cfg, 499, params)
    build_s = time.perf_counter() - t0
    scenario = EvalScenario(
        cfg=cfg,
        n_subbands=3,
        snr_linear=10.0,
        direction_grid_size=499,
        n_trials=200,
        master_seed=20260811,
    )
    t0 = time.perf_counter()
    report = monte_carlo(scenario, make_hdb_synthesizer(dictionary))
    eval_s = time.perf_counter() - t0
    return FullScaleRun(cfg, dictionary, report, scenario, build_s, eval_s)


class TestCriterion1Homomorphism:
    def test_config_addition_is_precoder_product(self):
        cfg = SystemConfig(16, 64, 28e9, 3e9)
        rng = np.random.default_rng(1)
        start = time.perf_counter()
        worst = 0.0
        for _ in range(1000):
            a = ArrayConfig(rng.uniform(0, 2e-9, 16), rng.uniform(-2 * np.pi, 2 * np.pi, 16))
            b = ArrayConfig(rng.uniform(0, 2e-9, 16), rng.uniform(-2 * np.pi, 2 * np.pi, 16))
            lhs = precoder_matrix(a + b, cfg)
            rhs = 4.0 * precoder_matrix(a, cfg) * precoder_matrix(b, cfg)
            worst = max(worst, float(np.max(np.abs(lhs - rhs))))
        elapsed = time.perf_counter() - start
        assert worst < 1e-12
        assert elapsed < 5.0
        print(f"\nPASS criterion 1: homomorphism max deviation {worst:.2e} in {elapsed:.1f}s")


class TestCriterion2DirectionAddition:
    def test_composed_peaks_are_wrapped_sums(self):
        # directions kept away from the visible-range edge: past
        # 2*fc/f_max - 1 the pattern's alias peak ties the main peak exactly
        # and the grid argmax becomes ill-defined
        cfg = SystemConfig(16, 48, 28e9, 3e9)
        grid = PsiGrid.uniform(1001)
        rng = np.random.default_rng(2)
        start = time.perf_counter()
        for _ in range(200):
            while True:
                d1 = rng.uniform(-0.88, 0.88, 3)
                d2 = rng.uniform(-0.88, 0.88, 3)
                if np.all(np.abs(d1 + d2) <= 0.88):
                    break
            p1 = argmax_directions(
                beampattern_of_precoder(ideal_split_precoder(DirectionMap(d1), cfg), cfg, grid)
            )
            p2 = argmax_directions(
                beampattern_of_precoder(ideal_split_precoder(DirectionMap(d2), cfg), cfg, grid)
            )
            p12 = argmax_directions(
                beampattern_of_precoder(ideal_split_precoder(DirectionMap(d1 + d2), cfg), cfg, grid)
            )
            for m in range(cfg.n_subcarriers):
                err = abs(wrap_sine(p12[m] - wrap_sine(p1[m] + p2[m])))
                err = min(err, 2.0 - err)
                assert err <= grid.step + 1e-12
        elapsed = time.perf_counter() - start
        assert elapsed < 30.0
        print(f"\nPASS criterion 2: direction addition over 200 pairs in {elapsed:.1f}s")


class TestCriterion3Decomposition:
    def test_cumsum_congruent_and_bounded(self):
        rng = np.random.default_rng(3)
        start = time.perf_counter()
        for _ in range(10_000):
            g = int(rng.integers(1, 9))
            dirs = rng.uniform(-1.0, 1.0, g)
            d = decompose(DirectionMap(dirs))
            assert np.all(np.abs(d) <= 1.0 + 1e-15)
            resid = (np.cumsum(d) - dirs) / 2.0
            assert np.max(np.abs(resid - np.round(resid))) < 1e-12
        elapsed = time.perf_counter() - start
        assert elapsed < 2.0
        print(f"\nPASS criterion 3: decomposition invariant on 1e4 maps in {elapsed:.1f}s")


class TestCriterion4SolverDominance:
    def test_oracle_dominance_and_planted_recovery(self):
        cfg = SystemConfig(4, 8, 28e9, 3e9)
        t_max = default_max_delay(cfg)
        shared = delay_grid(t_max, 64)
        phases = np.linspace(0, 2 * np.pi, 64, endpoint=False)
        params = SolverParams(max_delay=t_max, n_iterations=2, delay_grid_size=64)
        rng = np.random.default_rng(4)
        start = time.perf_counter()
        for _ in range(50):
            v = rng.normal(size=(4, 8)) + 1j * rng.normal(size=(4, 8))
            o_solver = objective(jpta_approx(v, params, cfg), v, cfg)
            o_oracle = objective(exhaustive_oracle(v, cfg, shared, phases), v, cfg)
            assert o_solver <= o_oracle + 1e-9
        for _ in range(10):
            planted = ArrayConfig(shared[rng.integers(0, 64, 4)], rng.uniform(-np.pi, np.pi, 4))
            v = precoder_matrix(planted, cfg)
            assert objective(jpta_approx(v, params, cfg), v, cfg) < 1e-9
        elapsed = time.perf_counter() - start
        assert elapsed < 60.0
        print(f"\nPASS criterion 4: solver dominance and planted recovery in {elapsed:.1f}s")


class TestCriterion5AseReproduction:
    def test_per_subband_ratios(self, full_scale):
        ratios = full_scale.report.ase_per_subband / full_scale.report.upper_bound
        total = full_scale.build_seconds + full_scale.eval_seconds
        assert np.all(ratios >= 0.82) and np.all(ratios <= 0.97), ratios
        assert ratios.max() - ratios.min() <= 0.05, ratios
        assert total < 600.0
        print(
            f"\nPASS criterion 5: ASE/bound per subband {np.round(ratios, 4)} "
            f"(build {full_scale.build_seconds:.0f}s + eval {full_scale.eval_seconds:.1f}s)"
        )


class TestCriterion6SubcarrierUniformity:
    def test_max_min_spread(self, full_scale):
        per_sc = full_scale.report.ase_per_subcarrier
        spread = (per_sc.max() - per_sc.min()) / per_sc.min()
        assert spread <= 0.15, spread
        print(f"\nPASS criterion 6: subcarrier ASE spread {spread:.4f} <= 0.15")


class TestCriterion7TailBehavior:
    def test_low_se_fraction(self, full_scale):
        frac = ecdf(full_scale.report).fraction_below(6.0)
        assert frac <= 0.05, frac
        print(f"\nPASS criterion 7: fraction below 6 bps/Hz = {frac:.4f} <= 0.05")


class TestCriterion8RuntimeSeparation:
    def test_hundredfold_speedup(self, full_scale):
        params = SolverParams(
            max_delay=default_max_delay(full_scale.cfg), n_iterations=30, delay_grid_size=65536
        )
        means = runtime_bench(
            full_scale.scenario,
            {
                "hdb": make_hdb_synthesizer(full_scale.dictionary),
                "jpta": make_jpta_synthesizer(params),
            },
            {"hdb": 1000, "jpta": 10},
        )
        ratio = means["jpta"] / means["hdb"]
        assert ratio >= 100.0, means
        print(
            f"\nPASS criterion 8: hdb {means['hdb']:.2e}s vs jpta {means['jpta']:.2e}s "
            f"per call ({ratio:.0f}x)"
        )


class TestCriterion9DictionaryPersistence:
    def test_round_trip_and_size(self, full_scale, tmp_path):
        path = tmp_path / "full.ttdd"
        save(full_scale.dictionary, path)
        loaded = load(path)
        assert loaded == full_scale.dictionary
        size = path.stat().st_size
        assert size <= 512 * 1024, size
        print(f"\nPASS criterion 9: bitwise round trip, file {size} bytes <= 512 KiB")


class TestCriterion10Determinism:
    def test_csv_identical_across_worker_counts(self, full_scale):
        scenario = EvalScenario(
            cfg=full_scale.cfg,
            n_subbands=3,
            snr_linear=10.0,
            direction_grid_size=499,
            n_trials=50,
            master_seed=77,
        )
        synth = make_hdb_synthesizer(full_scale.dictionary)
        r1 = monte_carlo(scenario, synth, workers=1)
        r2 = monte_carlo(scenario, synth, workers=os.cpu_count() or 2)
        lines1 = "\n".join(report_csv_lines(r1, scenario))
        lines2 = "\n".join(report_csv_lines(r2, scenario))
        assert lines1.encode() == lines2.encode()
        print("\nPASS criterion 10: CSV byte-identical for 1 and max workers")
