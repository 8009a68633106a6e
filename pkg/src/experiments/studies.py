"""Energy traces of the l1 decomposition strategies over many seeded problems"""
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import pandas as pd
from loguru import logger

from src.decomp import SwitchSchedule, make_index_split, make_svd_q
from src.experiments.signals import gaussian_l1
from src.operators import DenseMap
from src.solvers import SolveProblem, SolverConfig, iterative_threshold_solve, sequential_solve

log = logger.bind(component="study")

STUDY_COLUMNS = ["config", "seed", "iter", "energy"]
DEFAULT_LADDER: Tuple[Tuple[int, int], ...] = ((2, 2), (4, 4), (10, 40), (50, 80))


def _configurations(
    matrix: DenseMap,
    subspaces: int,
    inner: int,
    switch_after: int,
    ladder: Sequence[Tuple[int, int]],
) -> Dict[str, Tuple[Optional[SwitchSchedule], object, int, bool]]:
    """config name -> (schedule, decomposition, inner iterations, use_splitting)"""
    dim = matrix.domain_shape[0]
    identity = make_index_split(dim, subspaces)
    svd = make_svd_q(matrix, subspaces)
    configs = {
        "identity": (None, identity, inner, True),
        "svd": (None, svd, inner, False),
        f"switch-{switch_after}": (SwitchSchedule(switch_after, svd, identity), svd, inner, True),
    }
    for count, steps in ladder:
        # more subspaces than coordinates cannot form a partition
        capped = min(count, dim)
        if capped != count:
            log.warning(f"Ladder entry {count} subspaces capped at the dimension {dim}")
        initial, final = make_svd_q(matrix, capped), make_index_split(dim, capped)
        configs[f"ladder-{count}x{steps}"] = (SwitchSchedule(switch_after, initial, final), initial, steps, True)
    return configs


def run_acceleration_study(
    seeds: Iterable[int],
    rows: int = 200,
    cols: int = 40,
    alpha: float = 0.005,
    outer: int = 50,
    subspaces: int = 5,
    inner: int = 30,
    eta_iters: int = 20,
    switch_after: int = 4,
    ladder: Sequence[Tuple[int, int]] = DEFAULT_LADDER,
    sparsity: Optional[int] = None,
    noise: Optional[float] = None,
) -> pd.DataFrame:
    """
    Run every decomposition strategy for a fixed number of outer iterations.

    Each seed draws one Gaussian problem; all strategies start from zero and
    run exactly `outer` iterations (no tolerance stop), so energies are
    comparable per iteration.

    Returns:
        DataFrame with columns config, seed, iter, energy (original units)
    """
    frames: List[pd.DataFrame] = []
    seeds = list(seeds)
    log.info(f"Acceleration study over {len(seeds)} seeds: {rows}x{cols}, alpha={alpha}, {outer} outer iterations")

    for seed in seeds:
        matrix, _, datum = gaussian_l1(rows, cols, sparsity, noise, seed)
        operator = DenseMap(matrix)
        base = SolveProblem.build(operator, datum, alpha, "l1", seed=seed)
        cfg = SolverConfig.from_config(
            "l1", inner_iters=(inner,), eta_max_iters=eta_iters, max_outer=outer, outer_tol=0.0
        )

        results = {"baseline": iterative_threshold_solve(base, cfg, timing=False)}
        for name, (schedule, decomposition, steps, splitting) in _configurations(
            operator, subspaces, inner, switch_after, ladder
        ).items():
            problem = base.with_decomposition(decomposition, schedule)
            run_cfg = SolverConfig.from_config(
                "l1",
                inner_iters=(steps,),
                eta_max_iters=eta_iters,
                max_outer=outer,
                outer_tol=0.0,
                use_splitting=splitting,
            )
            results[name] = sequential_solve(problem, run_cfg, timing=False)

        for name, result in results.items():
            frame = result.trace.to_frame()[["iter", "energy"]]
            frame.insert(0, "seed", seed)
            frame.insert(0, "config", name)
            frames.append(frame)
        log.info(
            f"seed {seed}: "
            + ", ".join(f"{name} J={result.final_energy:.8g}" for name, result in results.items())
        )

    study = pd.concat(frames, ignore_index=True) if frames else pd.DataFrame(columns=STUDY_COLUMNS)
    log.success(f"Acceleration study finished: {len(study)} rows")
    return study[STUDY_COLUMNS]


def energy_at(study: pd.DataFrame, iteration: int) -> pd.DataFrame:
    """Pivot of energies at one outer iteration: one row per seed, one column per config"""
    at = study[study["iter"] == iteration]
    return at.pivot(index="seed", columns="config", values="energy")
