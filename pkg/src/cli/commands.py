"""
Command runners: load or synthesize inputs, solve, write artifacts.

Every command writes into the output directory, prefixed by its name:
the reconstruction, the energy trace CSV and a JSON run summary.
"""
from pathlib import Path
from typing import Dict, Optional, Tuple

import numpy as np
from loguru import logger

from src.cli.spec import RunSpec
from src.decomp import (
    SubspaceDecomposition,
    SwitchSchedule,
    make_index_split,
    make_random_orthogonal,
    make_stripes,
    make_svd_q,
)
from src.errors import EtaDivergenceError
from src.experiments import (
    energy_at,
    gaussian_l1,
    generate_experiment,
    read_image,
    read_mask,
    read_matrix,
    read_signal,
    run_acceleration_study,
    signal_experiment,
    synthetic_image,
    write_image,
    write_signal,
    write_summary,
)
from src.oblique import StripeSpec
from src.operators import DenseMap, IdentityMap, LinearMap, MaskMap
from src.prox.chambolle import ChambolleConfig
from src.prox.thresholding import WeightVector
from src.solvers import (
    SolveProblem,
    SolveResult,
    SolverConfig,
    iterative_threshold_solve,
    naive_tv1d_solve,
    solve,
)
from src.solvers.problem import REASON_ETA

log = logger.bind(component="cli")

EXIT_OK = 0
EXIT_INVALID = 2
EXIT_ETA = 3
EXIT_IO = 4


def solver_config(spec: RunSpec, psi_kind: str) -> SolverConfig:
    """SolverConfig from the config dicts, overridden by the flags that were given"""
    chambolle = {"tau": spec.tau, "tol": spec.tol_projection}
    overrides = {
        "inner_iters": tuple(spec.inner),
        "outer_tol": spec.tol_outer,
        "max_outer": spec.max_outer,
        "eta_max_iters": spec.eta_iters,
        "parallel": spec.parallel,
        "use_splitting": spec.splitting,
        "chambolle": ChambolleConfig(**{k: v for k, v in chambolle.items() if v is not None}),
    }
    return SolverConfig.from_config(psi_kind, **{k: v for k, v in overrides.items() if v is not None})


def _stripe(spec: RunSpec) -> Optional[StripeSpec]:
    return StripeSpec(spec.stripe) if spec.stripe is not None else None


def _l1_decomposition(spec: RunSpec, operator: LinearMap) -> SubspaceDecomposition:
    dim = operator.domain_shape[0]
    if spec.decomposition == "identity":
        return make_index_split(dim, spec.subspaces)
    if spec.decomposition == "random-orthogonal":
        return make_random_orthogonal(dim, spec.subspaces, spec.seed)
    return make_svd_q(operator, spec.subspaces)


def _solve_and_write(spec: RunSpec, problem: SolveProblem, name: str) -> SolveResult:
    cfg = solver_config(spec, problem.psi_kind)
    result = solve(problem, cfg, timing=spec.timing)
    result.trace.to_csv(spec.output_dir / f"{name}_trace.csv")
    return result


def _summary(spec: RunSpec, problem: SolveProblem, result: SolveResult, artifacts: Dict[str, Path]) -> Dict:
    summary = result.summary()
    summary.update(
        {
            "command": spec.command,
            "parameters": spec.model_dump(mode="json"),
            "alpha": problem.original_alpha,
            "scale": problem.scale,
            "decomposition": problem.decomposition.describe(),
            "artifacts": {role: str(path) for role, path in artifacts.items()},
        }
    )
    return summary


def _finish(spec: RunSpec, summary: Dict, result: Optional[SolveResult] = None) -> int:
    write_summary(spec.output_dir / f"{spec.command}_summary.json", summary)
    if result is not None and result.reason == REASON_ETA:
        log.error(f"{spec.command}: terminated by eta divergence; last iterate written")
        return EXIT_ETA
    log.success(f"{spec.command}: artifacts written to {spec.output_dir}")
    return EXIT_OK


def _load_signal(spec: RunSpec) -> Tuple[np.ndarray, np.ndarray]:
    """(signal, mask) from files or from the bundled example family"""
    if spec.signal is None:
        return signal_experiment(spec.example, spec.length)
    g = read_signal(spec.signal)
    mask = read_mask(spec.mask) if spec.mask is not None else np.ones_like(g)
    return g, mask


def run_tv_1d(spec: RunSpec) -> int:
    g, mask = _load_signal(spec)
    operator = IdentityMap(g.shape) if spec.command == "tv-denoise-1d" else MaskMap(mask)
    problem = SolveProblem.build(
        operator,
        operator.apply(g),
        spec.alpha,
        "tv-1d",
        decomposition=make_stripes(g.shape, spec.subspaces),
        stripe=_stripe(spec),
        seed=spec.seed,
    )
    result = _solve_and_write(spec, problem, spec.command)
    artifacts = {
        "reconstruction": write_signal(spec.output_dir / f"{spec.command}_reconstruction.csv", result.u),
        "trace": spec.output_dir / f"{spec.command}_trace.csv",
    }
    return _finish(spec, _summary(spec, problem, result, artifacts), result)


def run_tv_2d(spec: RunSpec) -> int:
    if spec.image is None:
        image, mask = synthetic_image(spec.size, spec.seed)
    else:
        image, mask = read_image(spec.image), read_mask(spec.mask)
    operator = MaskMap(mask)
    problem = SolveProblem.build(
        operator,
        operator.apply(image),
        spec.alpha,
        "tv-2d",
        decomposition=make_stripes(image.shape, spec.subspaces),
        stripe=_stripe(spec),
        seed=spec.seed,
    )
    result = _solve_and_write(spec, problem, spec.command)
    base = spec.output_dir / f"{spec.command}_reconstruction"
    artifacts = {
        "reconstruction": write_image(base.with_suffix(".csv"), result.u),
        "preview": write_image(base.with_suffix(".pgm"), result.u),
        "trace": spec.output_dir / f"{spec.command}_trace.csv",
    }
    return _finish(spec, _summary(spec, problem, result, artifacts), result)


def run_l1(spec: RunSpec) -> int:
    if spec.operator is None:
        matrix, truth, datum = gaussian_l1(spec.rows, spec.cols, seed=spec.seed)
    else:
        matrix, truth, datum = read_matrix(spec.operator), None, read_signal(spec.datum)
    operator = DenseMap(matrix)
    weights = WeightVector(read_signal(spec.weights)) if spec.weights is not None else None

    decomposition = _l1_decomposition(spec, operator)
    schedule = None
    if spec.switch_after is not None:
        final = make_index_split(operator.domain_shape[0], spec.subspaces)
        schedule = SwitchSchedule(spec.switch_after, decomposition, final)
    problem = SolveProblem.build(
        operator, datum, spec.alpha, "l1", decomposition=decomposition, weights=weights,
        schedule=schedule, seed=spec.seed,
    )

    result = _solve_and_write(spec, problem, spec.command)
    artifacts = {
        "reconstruction": write_signal(spec.output_dir / f"{spec.command}_reconstruction.csv", result.u),
        "trace": spec.output_dir / f"{spec.command}_trace.csv",
    }
    summary = _summary(spec, problem, result, artifacts)

    if spec.baseline:
        reference = iterative_threshold_solve(problem, solver_config(spec, "l1"), timing=spec.timing)
        artifacts["baseline_trace"] = reference.trace.to_csv(spec.output_dir / f"{spec.command}_baseline_trace.csv")
        summary["baseline_final_energy"] = reference.final_energy
        summary["artifacts"] = {role: str(path) for role, path in artifacts.items()}
    if truth is not None:
        summary["recovery_error"] = float(np.linalg.norm(result.u - truth))
    return _finish(spec, summary, result)


def run_compare_naive(spec: RunSpec) -> int:
    """Naive two-domain scheme vs. two-subspace correction, both against the single-domain reference"""
    g, mask = _load_signal(spec)
    operator = MaskMap(mask)
    datum = operator.apply(g)

    naive = naive_tv1d_solve(
        g, mask, lambda0=spec.lambda0, tau_step=spec.naive_tau, eps=spec.eps, iters=spec.naive_iters
    )
    split = SolveProblem.build(
        operator, datum, spec.alpha, "tv-1d",
        decomposition=make_stripes(g.shape, spec.subspaces), stripe=_stripe(spec), seed=spec.seed,
    )
    single = split.with_decomposition(make_stripes(g.shape, 1))

    result = _solve_and_write(spec, split, spec.command)
    reference = _solve_and_write(spec, single, f"{spec.command}_reference")

    out = spec.output_dir
    artifacts = {
        "naive": write_signal(out / f"{spec.command}_naive.csv", naive),
        "reconstruction": write_signal(out / f"{spec.command}_reconstruction.csv", result.u),
        "reference": write_signal(out / f"{spec.command}_reference.csv", reference.u),
        "trace": out / f"{spec.command}_trace.csv",
        "reference_trace": out / f"{spec.command}_reference_trace.csv",
    }
    summary = _summary(spec, split, result, artifacts)
    naive_deviation = float(np.max(np.abs(naive - reference.u)))
    subspace_deviation = float(np.max(np.abs(result.u - reference.u)))
    summary.update(
        {
            "naive_deviation": naive_deviation,
            "subspace_deviation": subspace_deviation,
            "reference_final_energy": reference.final_energy,
        }
    )
    log.info(f"sup-norm deviation from the reference: naive {naive_deviation:.3g}, subspace {subspace_deviation:.3g}")
    return _finish(spec, summary, result)


def run_generate(spec: RunSpec) -> int:
    sizes = {"n": spec.length, "size": spec.size, "rows": spec.rows, "cols": spec.cols}
    written = generate_experiment(spec.kind, spec.seed, spec.output_dir, **sizes)
    summary = {
        "command": spec.command,
        "kind": spec.kind,
        "seed": spec.seed,
        "artifacts": {role: str(path) for role, path in written.items()},
    }
    return _finish(spec, summary)


def run_study(spec: RunSpec) -> int:
    study = run_acceleration_study(
        range(spec.seed, spec.seed + spec.seeds),
        rows=spec.rows,
        cols=spec.cols,
        alpha=spec.alpha,
        outer=spec.max_outer,
        subspaces=spec.subspaces,
        inner=spec.inner[0],
        eta_iters=spec.eta_iters,
        switch_after=spec.switch_after,
    )
    path = spec.output_dir / f"{spec.command}_energies.csv"
    path.parent.mkdir(parents=True, exist_ok=True)
    study.to_csv(path, index=False, float_format="%.17g")
    final = energy_at(study, spec.max_outer)
    summary = {
        "command": spec.command,
        "parameters": spec.model_dump(mode="json"),
        "mean_final_energy": {name: float(value) for name, value in final.mean().items()},
        "artifacts": {"energies": str(path)},
    }
    return _finish(spec, summary)


RUNNERS = {
    "tv-denoise-1d": run_tv_1d,
    "tv-inpaint-1d": run_tv_1d,
    "tv-inpaint-2d": run_tv_2d,
    "l1-recover": run_l1,
    "compare-naive-1d": run_compare_naive,
    "generate": run_generate,
    "l1-study": run_study,
}


def run(spec: RunSpec) -> int:
    """
    Execute a validated run.

    Returns:
        Exit status: 0 success, 2 invalid input, 3 eta divergence, 4 I/O error
    """
    try:
        spec.output_dir.mkdir(parents=True, exist_ok=True)
        return RUNNERS[spec.command](spec)
    except ValueError as e:
        # InvalidInputError and malformed CSV data
        log.error(f"{spec.command}: invalid input: {e}")
        return EXIT_INVALID
    except EtaDivergenceError as e:
        log.error(f"{spec.command}: {e}")
        return EXIT_ETA
    except OSError as e:
        log.error(f"{spec.command}: I/O error: {e}")
        return EXIT_IO
