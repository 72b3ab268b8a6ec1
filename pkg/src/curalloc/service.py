"""HTTP/JSON curator service: sessions, async solves, fairness reads.

Each session owns hyperparameters, a set of placement locks, and at most one
running solve. Locks are realized through the prior-assignment penalty: the
locked entries are written into the prior matrix and given a large
entry-wise proximal weight, so the solver keeps them pinned while the rest
of the assignment optimizes normally. Solves run on worker threads; reads
never block.
"""

from __future__ import annotations

import json
import os
import threading
import uuid
from dataclasses import dataclass, field, replace
from typing import Optional

import numpy as np
from fastapi import FastAPI
from fastapi.responses import JSONResponse
from pydantic import BaseModel

from . import cost, fairness, ingest, optimizer, population
from .cli import DEFAULT_CONFIG, _baseline, _default_groups


class HyperUpdate(BaseModel):
    alpha: Optional[float] = None
    beta: Optional[float] = None
    lambda_bar: Optional[float] = None
    tau_bar: Optional[float] = None
    step_mode: Optional[str] = None
    max_iters: Optional[int] = None
    seed: Optional[int] = None


class LockEntry(BaseModel):
    location_id: str
    object_id: str
    weight: float = 1.0


class LockUpdate(BaseModel):
    locks: list[LockEntry] = []
    clear: bool = False


@dataclass
class Job:
    id: str
    state: str = "queued"
    iteration: int = 0
    objective: Optional[float] = None
    error: str = ""

    def to_dict(self) -> dict:
        out = {"job_id": self.id, "state": self.state}
        if self.state == "running":
            out["iteration"] = self.iteration
            if self.objective is not None:
                out["objective"] = self.objective
        if self.state == "failed":
            out["error"] = self.error
        return out


@dataclass
class Session:
    id: str
    hyper: optimizer.HyperParams
    seed: int
    locks: dict[tuple[str, str], float] = field(default_factory=dict)
    jobs: dict[str, Job] = field(default_factory=dict)
    active_job: Optional[str] = None
    latest_report: Optional[optimizer.SolveReport] = None
    lock_mutex: threading.Lock = field(default_factory=threading.Lock)


def _error(status: int, message: str) -> JSONResponse:
    return JSONResponse(status_code=status, content={"error": message})


def create_app(dataset: ingest.Dataset, config: Optional[dict] = None) -> FastAPI:
    cfg = dict(DEFAULT_CONFIG)
    cfg.update(config or {})
    app = FastAPI(title="curalloc service")
    sessions: dict[str, Session] = {}
    store_mutex = threading.Lock()
    baseline_entries, baseline_label = _baseline(dataset)
    groups = _default_groups(dataset.schema)
    snapshot_path = cfg.get("snapshot_path")

    loc_index = {loc.id: i for i, loc in enumerate(dataset.locations)}
    obj_index = {c.id: i for i, c in enumerate(dataset.collection)}

    def default_hyper() -> optimizer.HyperParams:
        return optimizer.HyperParams(
            alpha=cfg["alpha"],
            beta=cfg["beta"],
            lambda_bar=cfg["lambda_bar"],
            tau_bar=cfg["tau_bar"],
            step_mode=cfg["step_mode"],
            max_iters=cfg["max_iters"],
            r_scaling=cfg["r_scaling"],
        )

    def save_snapshot() -> None:
        if not snapshot_path:
            return
        payload = {}
        with store_mutex:
            for sid, s in sessions.items():
                payload[sid] = {
                    "seed": s.seed,
                    "hyper": {
                        "alpha": s.hyper.alpha,
                        "beta": s.hyper.beta,
                        "lambda_bar": s.hyper.lambda_bar,
                        "tau_bar": s.hyper.tau_bar,
                        "step_mode": s.hyper.step_mode,
                        "max_iters": s.hyper.max_iters,
                    },
                    "locks": [
                        {"location_id": n, "object_id": m, "weight": w}
                        for (n, m), w in s.locks.items()
                    ],
                }
        with open(snapshot_path, "w") as fh:
            json.dump(payload, fh)

    if snapshot_path and os.path.exists(snapshot_path):
        with open(snapshot_path) as fh:
            for sid, raw in json.load(fh).items():
                restored = Session(
                    id=sid,
                    hyper=replace(default_hyper(), **raw["hyper"]),
                    seed=raw["seed"],
                )
                restored.locks = {
                    (l["location_id"], l["object_id"]): l["weight"]
                    for l in raw["locks"]
                }
                sessions[sid] = restored

    def get_session(sid: str) -> Optional[Session]:
        with store_mutex:
            return sessions.get(sid)

    def run_solve(session: Session, job: Job) -> None:
        try:
            job.state = "running"
            occupancy = population.synthesize_occupancy(
                dataset.users,
                dataset.locations,
                session.seed,
                admin_fraction=cfg["admin_fraction"],
                public_fraction=cfg["public_fraction"],
            )
            C = cost.build_cost_matrix(
                dataset.locations,
                occupancy,
                dataset.users,
                dataset.collection_attributes,
                alpha=session.hyper.alpha,
                beta=session.hyper.beta,
                eps_floor=cfg["eps_floor"],
            )
            h = dataset.location_capacities
            k = dataset.object_capacities
            P_current = baseline_entries.copy()
            lam_s, tau_s = optimizer.scale_hyperparams(
                C, h, k, P_current, r=session.hyper.r_scaling, seed=session.seed
            )
            hyper = replace(session.hyper, lambda_scale=lam_s, tau_scale=tau_s)
            tau_weights = None
            if session.locks:
                tau_weights = np.full(C.shape, hyper.tau)
                for (loc_id, obj_id), weight in session.locks.items():
                    n, m = loc_index[loc_id], obj_index[obj_id]
                    P_current[n, m] = weight
                    tau_weights[n, m] = cfg["lock_strength"]
                # a huge entry-wise weight needs the Lipschitz-derived step
                hyper = replace(hyper, step_mode="theoretical")

            def progress(iteration: int, objective: float) -> None:
                job.iteration = iteration
                job.objective = objective

            report = optimizer.solve(
                C,
                h,
                k,
                hyper,
                optimizer.init_uniform(h, C.shape[1]),
                P_current=P_current,
                tau_weights=tau_weights,
                initialization="uniform",
                progress=progress,
            )
            session.latest_report = report
            job.state = "done"
        except Exception as exc:  # noqa: BLE001 - job boundary
            job.error = f"{type(exc).__name__}: {exc}"
            job.state = "failed"
        finally:
            with session.lock_mutex:
                session.active_job = None

    @app.get("/health")
    def health():
        return {"status": "ok", "locations": len(dataset.locations), "objects": len(dataset.collection)}

    @app.post("/sessions")
    def create_session():
        session = Session(
            id=uuid.uuid4().hex[:12], hyper=default_hyper(), seed=cfg["seed"]
        )
        with store_mutex:
            sessions[session.id] = session
        save_snapshot()
        return {"session_id": session.id}

    @app.get("/sessions/{sid}")
    def session_state(sid: str):
        session = get_session(sid)
        if session is None:
            return _error(404, "unknown session")
        return {
            "session_id": session.id,
            "seed": session.seed,
            "hyperparams": {
                "alpha": session.hyper.alpha,
                "beta": session.hyper.beta,
                "lambda_bar": session.hyper.lambda_bar,
                "tau_bar": session.hyper.tau_bar,
                "step_mode": session.hyper.step_mode,
                "max_iters": session.hyper.max_iters,
            },
            "locks": [
                {"location_id": n, "object_id": m, "weight": w}
                for (n, m), w in session.locks.items()
            ],
            "active_job": session.active_job,
            "has_report": session.latest_report is not None,
        }

    @app.post("/sessions/{sid}/hyperparams")
    def update_hyperparams(sid: str, update: HyperUpdate):
        session = get_session(sid)
        if session is None:
            return _error(404, "unknown session")
        with session.lock_mutex:
            if session.active_job is not None:
                return _error(409, "solve in progress")
            changes = {
                k: v for k, v in update.model_dump().items() if v is not None and k != "seed"
            }
            try:
                session.hyper = replace(session.hyper, **changes)
            except ValueError as exc:
                return _error(422, str(exc))
            if update.seed is not None:
                session.seed = update.seed
        save_snapshot()
        return session_state(sid)

    @app.post("/sessions/{sid}/locks")
    def set_locks(sid: str, update: LockUpdate):
        session = get_session(sid)
        if session is None:
            return _error(404, "unknown session")
        with session.lock_mutex:
            if session.active_job is not None:
                return _error(409, "solve in progress")
            if update.clear:
                session.locks.clear()
            for lock in update.locks:
                if lock.location_id not in loc_index:
                    return _error(404, f"unknown location {lock.location_id!r}")
                if lock.object_id not in obj_index:
                    return _error(404, f"unknown object {lock.object_id!r}")
                session.locks[(lock.location_id, lock.object_id)] = lock.weight
        save_snapshot()
        return session_state(sid)

    @app.post("/sessions/{sid}/solve")
    def solve_async(sid: str):
        session = get_session(sid)
        if session is None:
            return _error(404, "unknown session")
        with session.lock_mutex:
            if session.active_job is not None:
                return _error(409, "solve in progress")
            job = Job(id=uuid.uuid4().hex[:12])
            session.jobs[job.id] = job
            session.active_job = job.id
        worker = threading.Thread(target=run_solve, args=(session, job), daemon=True)
        worker.start()
        return {"job_id": job.id, "state": job.state}

    @app.get("/sessions/{sid}/jobs/{job_id}")
    def job_status(sid: str, job_id: str):
        session = get_session(sid)
        if session is None:
            return _error(404, "unknown session")
        job = session.jobs.get(job_id)
        if job is None:
            return _error(404, "unknown job")
        return job.to_dict()

    @app.get("/sessions/{sid}/report")
    def get_report(sid: str):
        session = get_session(sid)
        if session is None:
            return _error(404, "unknown session")
        if session.latest_report is None:
            return _error(404, "no completed solve in this session")
        return session.latest_report.to_dict()

    @app.get("/sessions/{sid}/assignment")
    def get_assignment(sid: str):
        session = get_session(sid)
        if session is None:
            return _error(404, "unknown session")
        if session.latest_report is None:
            entries, label = baseline_entries, f"baseline({baseline_label})"
        else:
            entries, label = session.latest_report.final.entries, "optimized"
        return {
            "label": label,
            "location_ids": dataset.location_ids,
            "object_ids": dataset.object_ids,
            "entries": [[float(v) for v in row] for row in entries],
            "baseline_entries": [[float(v) for v in row] for row in baseline_entries],
        }

    @app.get("/sessions/{sid}/fairness")
    def get_fairness(sid: str, rounds: int = 10):
        session = get_session(sid)
        if session is None:
            return _error(404, "unknown session")
        assignments = {f"baseline({baseline_label})": baseline_entries}
        if session.latest_report is not None:
            assignments["optimized"] = session.latest_report.final.entries
        occ_rounds = population.resample(
            dataset.users,
            dataset.locations,
            rounds,
            session.seed,
            admin_fraction=cfg["admin_fraction"],
            public_fraction=cfg["public_fraction"],
        )
        report = fairness.fairness_table(
            assignments,
            occ_rounds,
            dataset.users,
            dataset.locations,
            dataset.collection_attributes,
            groups,
        )
        return fairness.report_to_dict(report)

    return app
