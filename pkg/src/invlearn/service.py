"""HTTP/JSON session API for step-by-step tradeoff navigation.

A session holds one problem, the accepted step trace, and at most one
pending (computed but uncommitted) step. The client proposes a step,
inspects its marginal cost, and either accepts it or rolls the trace
back — the threshold decision is made by the caller rather than a fixed
tau. Sessions live in memory; responses are a pure function of the
problem document and the request sequence.
"""

from __future__ import annotations

import threading
import time
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from fastapi import FastAPI, HTTPException
from fastapi.middleware.cors import CORSMiddleware

from .errors import InvlearnError, SpecificationError
from .model import (
    ObservationSummary,
    InverseProblem,
    problem_from_dict,
    problem_to_dict,
    validate,
)
from .serialize import polytope_bounds, step_to_dict, trace_to_dict
from .solvers import StepRecord, TradeoffTrace, solve_il, solve_mgil_step


def _error(status: int, code: str, message: str, **extra):
    return HTTPException(status_code=status,
                         detail={"code": code, "message": message, **extra})


@dataclass
class Session:
    id: str
    problem: InverseProblem
    trace: TradeoffTrace
    row_names: Optional[tuple] = None
    diet_regimen: Optional[str] = None
    pending: Optional[StepRecord] = None
    created_at: float = field(default_factory=time.monotonic)
    touched_at: float = field(default_factory=time.monotonic)
    lock: threading.Lock = field(default_factory=threading.Lock)

    @property
    def face_exhausted(self) -> bool:
        limit = min(len(self.problem.hierarchy.relevant),
                    self.problem.region.n)
        return len(self.trace.steps[-1].active_relevant) >= limit


class SessionStore:
    """In-memory store; ids are sequential so a fresh server replays
    identically for an identical request sequence."""

    def __init__(self, ttl_seconds: Optional[float] = None):
        self._sessions: dict = {}
        self._counter = 0
        self._ttl = ttl_seconds
        self._lock = threading.Lock()

    def create(self, **kwargs) -> Session:
        with self._lock:
            self._evict()
            self._counter += 1
            sid = f"s-{self._counter}"
            session = Session(id=sid, **kwargs)
            self._sessions[sid] = session
            return session

    def get(self, sid: str) -> Session:
        with self._lock:
            self._evict()
            session = self._sessions.get(sid)
        if session is None:
            raise _error(404, "unknown-session", f"no session {sid!r}")
        session.touched_at = time.monotonic()
        return session

    def _evict(self):
        if self._ttl is None:
            return
        now = time.monotonic()
        stale = [sid for sid, s in self._sessions.items()
                 if now - s.touched_at > self._ttl]
        for sid in stale:
            del self._sessions[sid]


def _diet_model(regimen_name: str):
    from .diet import (
        build_diet_region,
        load_food_groups,
        load_nutrient_matrix,
        load_regimen,
    )
    groups = load_food_groups()
    return build_diet_region(groups, load_nutrient_matrix(groups),
                             load_regimen(regimen_name))


def _step_view(session: Session, step: StepRecord, polytope=None) -> dict:
    doc = step_to_dict(step, row_names=session.row_names)
    if polytope is not None:
        doc["theta_bounds"] = polytope_bounds(polytope)
    if session.diet_regimen is not None:
        model = _diet_model(session.diet_regimen)
        doc["nutrients"] = model.nutrients.profile(step.point)
    return doc


def _session_view(session: Session) -> dict:
    doc = {
        "id": session.id,
        "steps": [_step_view(session, s) for s in session.trace.steps],
        "pending": (None if session.pending is None
                    else _step_view(session, session.pending)),
        "face_exhausted": session.face_exhausted,
        "loss_sequence": [float(s.loss) for s in session.trace.steps],
    }
    if session.row_names is not None:
        doc["row_names"] = list(session.row_names)
    return doc


def _check_trace_invariants(steps, tol: float = 1e-7):
    for prev, cur in zip(steps, steps[1:]):
        if cur.loss < prev.loss - tol:
            raise _error(409, "solver-error",
                         "loss sequence would decrease; step rejected")
        if not set(prev.active_relevant) <= set(cur.active_relevant):
            raise _error(409, "solver-error",
                         "active sets would not be nested; step rejected")


def create_app(ttl_seconds: Optional[float] = None) -> FastAPI:
    app = FastAPI(title="invlearn", version="1")
    app.add_middleware(CORSMiddleware, allow_origins=["*"],
                       allow_methods=["*"], allow_headers=["*"])
    store = SessionStore(ttl_seconds=ttl_seconds)

    @app.exception_handler(InvlearnError)
    async def _domain_error(request, exc):
        from fastapi.responses import JSONResponse
        status = 422 if isinstance(exc, SpecificationError) else 409
        return JSONResponse(status_code=status,
                            content={"detail": {"code": "solver-error",
                                                "message": str(exc)}})

    @app.post("/v1/sessions", status_code=201)
    def create_session(body: dict):
        doc = body.get("problem")
        if doc is None:
            raise _error(422, "invalid-request", "missing 'problem' document")
        try:
            problem = problem_from_dict(doc)
        except (InvlearnError, KeyError, TypeError, ValueError) as exc:
            raise _error(422, "invalid-problem", str(exc))
        findings = validate(problem)
        if findings:
            raise _error(422, "validation-failed",
                         "problem failed validation", findings=findings)
        try:
            il = solve_il(problem)
        except InvlearnError as exc:
            raise _error(409, "solver-error", str(exc))
        step0 = StepRecord(
            index=0, point=il.point, loss=il.loss, delta_loss=0.0,
            active_relevant=tuple(sorted(
                set(il.active) & problem.hierarchy.relevant)),
            theta=il.theta,
            newly_activated=tuple(sorted(
                set(il.active) & problem.hierarchy.relevant)))
        trace = TradeoffTrace(steps=[step0], termination="in-progress")
        row_names = body.get("row_names")
        session = store.create(
            problem=problem, trace=trace,
            row_names=tuple(row_names) if row_names else None,
            diet_regimen=body.get("diet_regimen"))
        return {"id": session.id,
                "step": _step_view(session, step0, polytope=il.polytope),
                "active": list(il.active)}

    @app.get("/v1/sessions/{sid}")
    def get_session(sid: str):
        session = store.get(sid)
        with session.lock:
            return _session_view(session)

    @app.post("/v1/sessions/{sid}/propose")
    def propose(sid: str, body: Optional[dict] = None):
        session = store.get(sid)
        body = body or {}
        omega = float(body.get("omega", 1.0))
        if not 0.0 <= omega <= 1.0:
            raise _error(422, "invalid-request", "omega must lie in [0, 1]")
        preferred = body.get("preferred")
        tau = body.get("tau")
        with session.lock:
            if session.face_exhausted:
                raise _error(409, "face-exhausted",
                             "every relevant row that can bind is active")
            prev = session.trace.steps[-1]
            try:
                step = solve_mgil_step(
                    session.problem, prev.active_relevant, omega=omega,
                    preferred=(frozenset(preferred)
                               if preferred is not None else None),
                    index=prev.index + 1, prev_loss=prev.loss)
            except InvlearnError as exc:
                raise _error(409, "solver-error", str(exc))
            if step is None:
                raise _error(409, "face-exhausted",
                             "no feasible augmentation remains")
            session.pending = step
            view = _step_view(session, step)
            view["exceeds_tau"] = (tau is not None
                                   and step.delta_loss > float(tau))
            return view

    @app.post("/v1/sessions/{sid}/accept")
    def accept(sid: str):
        session = store.get(sid)
        with session.lock:
            if session.pending is None:
                raise _error(409, "nothing-pending",
                             "propose a step before accepting")
            _check_trace_invariants(session.trace.steps + [session.pending])
            session.trace.steps.append(session.pending)
            session.pending = None
            return _session_view(session)

    @app.post("/v1/sessions/{sid}/rollback")
    def rollback(sid: str, body: dict):
        session = store.get(sid)
        if "to" not in body:
            raise _error(422, "invalid-request", "missing 'to' step index")
        to = int(body["to"])
        with session.lock:
            if not 0 <= to < len(session.trace.steps):
                raise _error(422, "invalid-request",
                             f"step {to} outside accepted trace "
                             f"(length {len(session.trace.steps)})")
            session.trace.steps = session.trace.steps[:to + 1]
            session.pending = None
            return _session_view(session)

    @app.post("/v1/diet/region")
    def diet_region(body: Optional[dict] = None):
        from .diet import assemble_diet_problem, ingest_intake_csv
        body = body or {}
        regimen_name = body.get("regimen", "dash-women-51")
        try:
            model = _diet_model(regimen_name)
        except (InvlearnError, FileNotFoundError) as exc:
            raise _error(422, "invalid-regimen", str(exc))
        intake_csv = body.get("intake_csv")
        if intake_csv is not None:
            try:
                obs = ingest_intake_csv(intake_csv, model.groups)
            except SpecificationError as exc:
                raise _error(422, "invalid-intake", str(exc))
            problem = assemble_diet_problem(model, obs)
        else:
            problem = InverseProblem(
                region=model.region, hierarchy=model.hierarchy,
                observations=ObservationSummary.empty(model.region.n,
                                                      retain=True),
                loss="l1")
        doc = problem_to_dict(problem)
        return {"problem": doc,
                "row_names": list(model.row_names),
                "regimen": regimen_name,
                "groups": list(model.groups.names),
                "nutrients": list(model.nutrients.nutrients),
                "bounds": model.regimen.bounds}

    return app
