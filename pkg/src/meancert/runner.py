"""Trial orchestration: seeded sweeps over the case registries.

Each trial is identified by a small JSON digest (case id, generation
parameters, seed, trial index, nu).  The digest is enough to rebuild the
exact inputs bit for bit, so any failure printed by a sweep can be
replayed standalone.  Sweeps process trials in fixed-size chunks that
are merged in chunk order, which keeps aggregates byte-identical across
worker counts.
"""
from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Any

import numpy as np

from . import hsnorm, opmeans, scalar
from .linalg import PSD_TOL, DomainError
from .randgen import (DEFAULT_LAW, derive_seed, general_entries, parse_law,
                      pd_parts, assemble, trial_rng)

CHUNK = 512
DEFAULT_DIMS = (1, 2, 3, 5, 8)
FAILURE_CAP = 10


def _ids(module) -> tuple[str, ...]:
    return tuple(c.case_id for c in module.registry())


def kind_of(case_id: str) -> str:
    if case_id in _ids(scalar):
        return "scalar"
    if case_id in _ids(opmeans):
        return "operator"
    if case_id in _ids(hsnorm):
        return "hs"
    known = sorted(_ids(scalar) + _ids(opmeans) + _ids(hsnorm))
    raise DomainError(f"unknown case id {case_id!r}; known ids: {', '.join(known)}")


def resolve_cases(tokens: list[str] | None, kinds: tuple[str, ...]) -> list[str]:
    """Expand case tokens ("all", "op", "hs", "scalar", exact ids) to ids.

    Only ids whose kind is in ``kinds`` are returned; asking for an id of
    the wrong kind is an error rather than a silent skip.
    """
    pools = {
        "scalar": sorted(_ids(scalar)),
        "operator": sorted(_ids(opmeans)),
        "hs": sorted(_ids(hsnorm)),
    }
    allowed = [cid for k in kinds for cid in pools[k]]
    if not tokens or tokens == ["all"]:
        return allowed
    out: list[str] = []
    for tok in tokens:
        if tok == "all":
            out.extend(allowed)
        elif tok in ("op", "operator"):
            out.extend(pools["operator"])
        elif tok in ("hs", "scalar"):
            out.extend(pools[tok])
        else:
            kind = kind_of(tok)
            if kind not in kinds:
                raise DomainError(
                    f"case {tok!r} is of kind {kind}; this command handles "
                    f"{', '.join(kinds)} cases"
                )
            out.append(tok)
    seen: dict[str, None] = {}
    for cid in out:
        seen.setdefault(cid)
    result = list(seen)
    if not result:
        raise DomainError(f"no cases of kind {kinds} matched {tokens!r}")
    return result


@dataclass(frozen=True)
class RunConfig:
    """Primitive-only sweep configuration (safe to ship to worker processes)."""

    trials: int = 10000
    seed: int = 0
    dims: tuple[int, ...] = DEFAULT_DIMS
    law: str = DEFAULT_LAW
    w_law: str | None = None
    nu: float | None = None
    tol: float = opmeans.CERT_PSD_TOL
    psd_tol: float = PSD_TOL
    complex_entries: bool = False
    lenient_x: bool = False
    jobs: int = 1

    def __post_init__(self):
        if self.trials < 1:
            raise DomainError(f"trials must be >= 1, got {self.trials}")
        if not self.dims or any(d < 1 for d in self.dims):
            raise DomainError(f"dims must be positive, got {self.dims}")
        if self.tol <= 0.0 or self.psd_tol <= 0.0:
            raise DomainError("tolerances must be positive")
        if self.jobs < 1:
            raise DomainError(f"jobs must be >= 1, got {self.jobs}")
        parse_law(self.law)
        if self.w_law is not None:
            parse_law(self.w_law)


def _case_kind(case_id: str):
    kind = kind_of(case_id)
    if kind == "operator":
        return opmeans.case_by_id(case_id), kind
    if kind == "hs":
        return hsnorm.case_by_id(case_id), kind
    return scalar.case_by_id(case_id), kind


def nu_grid_for(case_id: str, nu: float | None) -> list[float]:
    """Admissible nu values: the dyadic 33-grid restricted to the case domain."""
    case, _ = _case_kind(case_id)
    if nu is not None:
        if not case.in_domain(nu):
            raise DomainError(
                f"nu={nu!r} is outside the domain {case.nu_domain} of {case_id}"
            )
        return [float(nu)]
    grid = [g for g in scalar.NU_GRID_33 if case.in_domain(g)]
    if not grid:
        raise DomainError(f"no admissible nu grid points for {case_id}")
    return grid


def _structure_for(case_id: str) -> str:
    # Ordered pairs are generated for every op-2.7 variant: the left/right
    # laws require A <= B, and the refinement is evaluated on the same
    # population for comparability.
    return "ordered-pair" if case_id.startswith("op-2.7") else "general-pd"


def make_digest(case_id: str, cfg: RunConfig, trial: int) -> dict[str, Any]:
    case, kind = _case_kind(case_id)
    grid = nu_grid_for(case_id, cfg.nu)
    dim = cfg.dims[trial % len(cfg.dims)]
    nu = grid[trial % len(grid)]
    digest: dict[str, Any] = {
        "case": case_id,
        "kind": kind,
        "structure": _structure_for(case_id),
        "dim": int(dim),
        "law": cfg.law,
        "seed": int(cfg.seed),
        "trial": int(trial),
        "nu": float(nu),
        "complex": bool(cfg.complex_entries),
    }
    if digest["structure"] == "ordered-pair":
        digest["w_law"] = cfg.w_law or cfg.law
    if kind == "hs":
        x_kind = "general" if cfg.lenient_x else case.x_kind
        digest["x_kind"] = x_kind
    return digest


def build_inputs(digest: dict[str, Any]) -> dict[str, Any]:
    """Reconstruct the exact trial inputs described by a digest.

    Draw order is fixed and documented here: A-spectrum, A-basis, then
    (W-spectrum, W-basis) for ordered pairs or (B-spectrum, B-basis)
    otherwise, then X (spectrum+basis when positive definite, raw entries
    when general).  Changing this order is a breaking change for replay.
    """
    case_id = digest["case"]
    kind = digest["kind"]
    dim = int(digest["dim"])
    cx = bool(digest.get("complex", False))
    law = digest["law"]
    rng = trial_rng(derive_seed(int(digest["seed"]), case_id), int(digest["trial"]))

    lam_a, q_a = pd_parts(rng, dim, law, cx)
    a = assemble(lam_a, q_a)
    if digest.get("structure") == "ordered-pair":
        lam_w, q_w = pd_parts(rng, dim, digest["w_law"], cx, allow_zero=True)
        b = a + assemble(lam_w, q_w)
        lam_b = q_b = None
    else:
        lam_b, q_b = pd_parts(rng, dim, law, cx)
        b = assemble(lam_b, q_b)
    out: dict[str, Any] = {"A": a, "B": b, "nu": float(digest["nu"])}
    if kind == "hs":
        if digest.get("x_kind") == "pd":
            lam_x, q_x = pd_parts(rng, dim, law, cx)
            out["X"] = assemble(lam_x, q_x)
        else:
            out["X"] = general_entries(rng, dim, cx)
        if lam_b is not None:
            out["oracle"] = ((lam_a, q_a), (lam_b, q_b))
    return out


def run_trial(digest: dict[str, Any], tol: float, psd_tol: float):
    """Evaluate one trial; returns the module-level trial record."""
    case, kind = _case_kind(digest["case"])
    inputs = build_inputs(digest)
    if kind == "operator":
        return opmeans.certify_operator(case, inputs["A"], inputs["B"], inputs["nu"],
                                        tol=tol, psd_tol=psd_tol)
    lenient = digest.get("x_kind") != case.x_kind
    return hsnorm.certify_hs(case, inputs["A"], inputs["B"], inputs["X"], inputs["nu"],
                             tol=tol, psd_tol=psd_tol, lenient=lenient,
                             oracle=inputs.get("oracle"))


@dataclass
class _Agg:
    trials: int = 0
    passes: int = 0
    failures: int = 0
    advisory_trials: int = 0
    advisory_held: int = 0
    oracle_violations: int = 0
    oracle_max_rel_err: float | None = None
    min_slack: float | None = None
    argmin_trial: int = -1
    argmin_digest: dict[str, Any] | None = None
    failure_digests: list[dict[str, Any]] = field(default_factory=list)

    def fold_trial(self, digest, trial_no: int, rec, kind: str) -> None:
        self.trials += 1
        advisory = kind == "hs" and rec.advisory
        if advisory:
            self.advisory_trials += 1
            if rec.passed:
                self.advisory_held += 1
        elif rec.passed:
            self.passes += 1
        else:
            self.failures += 1
            if len(self.failure_digests) < FAILURE_CAP:
                self.failure_digests.append({
                    "digest": digest,
                    "min_slack": rec.min_slack,
                    "worst_link": rec.worst_link,
                })
        if kind == "hs" and rec.oracle_rel_err is not None:
            if (self.oracle_max_rel_err is None
                    or rec.oracle_rel_err > self.oracle_max_rel_err):
                self.oracle_max_rel_err = rec.oracle_rel_err
            if rec.oracle_rel_err > hsnorm.ORACLE_TOL:
                self.oracle_violations += 1
        key = (rec.min_slack, trial_no)
        if self.min_slack is None or key < (self.min_slack, self.argmin_trial):
            self.min_slack = rec.min_slack
            self.argmin_trial = trial_no
            self.argmin_digest = digest

    def merge(self, other: "_Agg") -> None:
        # Chunks arrive in index order, so capped lists and ties stay stable.
        self.trials += other.trials
        self.passes += other.passes
        self.failures += other.failures
        self.advisory_trials += other.advisory_trials
        self.advisory_held += other.advisory_held
        self.oracle_violations += other.oracle_violations
        if other.oracle_max_rel_err is not None:
            if (self.oracle_max_rel_err is None
                    or other.oracle_max_rel_err > self.oracle_max_rel_err):
                self.oracle_max_rel_err = other.oracle_max_rel_err
        room = FAILURE_CAP - len(self.failure_digests)
        if room > 0:
            self.failure_digests.extend(other.failure_digests[:room])
        if other.min_slack is not None:
            key = (other.min_slack, other.argmin_trial)
            if self.min_slack is None or key < (self.min_slack, self.argmin_trial):
                self.min_slack = other.min_slack
                self.argmin_trial = other.argmin_trial
                self.argmin_digest = other.argmin_digest


def _run_chunk(case_id: str, cfg: RunConfig, start: int, stop: int) -> _Agg:
    case, kind = _case_kind(case_id)
    agg = _Agg()
    for t in range(start, stop):
        digest = make_digest(case_id, cfg, t)
        rec = run_trial(digest, cfg.tol, cfg.psd_tol)
        agg.fold_trial(digest, t, rec, kind)
    return agg


def run_case(case_id: str, cfg: RunConfig,
             pool: ProcessPoolExecutor | None = None) -> dict[str, Any]:
    """Sweep one case; aggregate is independent of the worker count."""
    case, kind = _case_kind(case_id)
    nu_grid_for(case_id, cfg.nu)  # fail fast on a bad --nu
    spans = [(s, min(s + CHUNK, cfg.trials)) for s in range(0, cfg.trials, CHUNK)]
    agg = _Agg()
    if pool is not None and len(spans) > 1:
        futures = [pool.submit(_run_chunk, case_id, cfg, a, b) for a, b in spans]
        for fut in futures:
            agg.merge(fut.result())
    else:
        for a, b in spans:
            agg.merge(_run_chunk(case_id, cfg, a, b))
    asserted = agg.trials - agg.advisory_trials
    passed = agg.failures == 0 and agg.oracle_violations == 0
    summary: dict[str, Any] = {
        "case": case_id,
        "kind": kind,
        "links": list(case.links) if kind in ("operator", "hs") else [],
        "trials": agg.trials,
        "asserted": asserted,
        "passes": agg.passes,
        "failures": agg.failures,
        "passed": passed,
        "min_slack": agg.min_slack,
        "argmin": agg.argmin_digest,
        "failure_digests": agg.failure_digests,
    }
    if kind == "hs":
        summary["oracle_max_rel_err"] = agg.oracle_max_rel_err
        summary["oracle_violations"] = agg.oracle_violations
        summary["advisory_trials"] = agg.advisory_trials
        summary["advisory_held"] = agg.advisory_held
    return summary


def run_matrix_suite(case_ids: list[str], cfg: RunConfig) -> list[dict[str, Any]]:
    if cfg.jobs > 1:
        with ProcessPoolExecutor(max_workers=cfg.jobs) as pool:
            return [run_case(cid, cfg, pool) for cid in case_ids]
    return [run_case(cid, cfg) for cid in case_ids]


def run_scalar_case(case_id: str,
                    a_values=scalar.A_GRID_13,
                    nu_values=scalar.NU_GRID_65,
                    tol: float = scalar.SCALAR_TOL) -> dict[str, Any]:
    """Deterministic grid sweep of one scalar chain (no randomness)."""
    case = scalar.case_by_id(case_id)
    points = passes = failures = skipped = 0
    min_slack: float | None = None
    argmin: dict[str, float] | None = None
    failure_points: list[dict[str, Any]] = []
    for nu in nu_values:
        if not case.in_domain(nu):
            skipped += len(a_values) * len(a_values)
            continue
        for a in a_values:
            for b in a_values:
                trial = scalar.evaluate(case, a, b, nu, tol=tol)
                points += 1
                if trial.passed:
                    passes += 1
                else:
                    failures += 1
                    if len(failure_points) < FAILURE_CAP:
                        failure_points.append({
                            "digest": {"case": case_id, "kind": "scalar",
                                       "a": a, "b": b, "nu": nu},
                            "min_slack": trial.min_slack,
                        })
                if min_slack is None or trial.min_slack < min_slack:
                    min_slack = trial.min_slack
                    argmin = {"case": case_id, "kind": "scalar",
                              "a": a, "b": b, "nu": nu}
    return {
        "case": case_id,
        "kind": "scalar",
        "links": [],
        "trials": points,
        "asserted": points,
        "passes": passes,
        "failures": failures,
        "skipped": skipped,
        "passed": failures == 0,
        "min_slack": min_slack,
        "argmin": argmin,
        "failure_digests": failure_points,
    }


def _jsonable(value):
    if isinstance(value, np.ndarray):
        if np.iscomplexobj(value):
            return [[float(np.real(v)), float(np.imag(v))] for v in value.ravel()]
        return [float(v) for v in value.ravel()]
    if isinstance(value, (np.floating, np.integer)):
        return value.item()
    return value


def replay_trial(digest: dict[str, Any], tol: float | None = None,
                 psd_tol: float = PSD_TOL) -> dict[str, Any]:
    """Re-run one digest and return a JSON-ready trial record."""
    if "case" not in digest:
        raise DomainError("digest is missing the 'case' field")
    kind = digest.get("kind") or kind_of(digest["case"])
    if kind == "scalar":
        case = scalar.case_by_id(digest["case"])
        trial = scalar.evaluate(case, float(digest["a"]), float(digest["b"]),
                                float(digest["nu"]),
                                tol=tol if tol is not None else scalar.SCALAR_TOL)
        return {
            "digest": digest,
            "passed": trial.passed,
            "sides": list(trial.sides),
            "slacks": list(trial.slacks),
            "min_slack": trial.min_slack,
        }
    for key in ("dim", "law", "seed", "trial", "nu"):
        if key not in digest:
            raise DomainError(f"digest is missing the {key!r} field")
    use_tol = tol if tol is not None else opmeans.CERT_PSD_TOL
    rec = run_trial(digest, use_tol, psd_tol)
    out: dict[str, Any] = {"digest": digest, "passed": rec.passed,
                           "min_slack": rec.min_slack, "worst_link": rec.worst_link}
    if kind == "operator":
        out["links"] = [{"name": lc.name, "lam_min": lc.lam_min, "scale": lc.scale,
                         "slack": lc.slack, "ok": lc.ok} for lc in rec.links]
        out["witness"] = _jsonable(rec.witness)
    else:
        out["sides"] = list(rec.sides)
        out["slacks"] = list(rec.slacks)
        out["advisory"] = rec.advisory
        out["hypothesis_met"] = rec.hypothesis_met
        out["oracle_sides"] = list(rec.oracle_sides)
        out["oracle_rel_err"] = rec.oracle_rel_err
        if rec.worst_cell is not None:
            i, j, lam, mu, damage = rec.worst_cell
            out["worst_cell"] = {"i": int(i), "j": int(j), "lam": float(lam),
                                 "mu": float(mu), "damage": float(damage)}
        if rec.extras:
            out["extras"] = {k: _jsonable(v) for k, v in rec.extras.items()}
    return out
