"""HTTP service exposing the catalog, the verifiers and the numerics.

All heavy lifting stays in the core modules; this layer translates
between JSON and the exact objects, with pydantic models pinning the
request/response schemas.  The command line front end talks to this app
in-process, so every capability is exercised through the same interface
a remote client would use.
"""

from __future__ import annotations

import os
from typing import Dict, List, Literal, Optional

from fastapi import FastAPI, HTTPException
from pydantic import BaseModel, Field

from . import __version__
from .catalog import (ENTRY_IDS, EquationEntry, UnknownEquationError,
                      catalog_json, entry_to_json, get_entry)
from .jets import render_poly
from .numerics import (BUILTIN_SOLUTIONS, Grid2, NumericAbort,
                       builtin_solution, dkp_solve, flow_commutator_ratio,
                       lax_numeric_check, mms_residual)

MAX_CERT_ORDER_ENV = "HEAVENLY_MAX_CERT_ORDER"


def default_cert_order() -> int:
    try:
        return int(os.environ.get(MAX_CERT_ORDER_ENV, "2"))
    except ValueError:
        return 2


def _load(equation_id: str, k: Optional[int] = None) -> EquationEntry:
    try:
        return get_entry(equation_id, k)
    except UnknownEquationError:
        raise HTTPException(status_code=404,
                            detail=f"unknown equation id {equation_id!r}")
    except ValueError as e:
        raise HTTPException(status_code=400, detail=str(e))


# -- report schemas -----------------------------------------------------------


class DischargeModel(BaseModel):
    kind: Literal["trivial", "rewrite", "certificate", "open"]
    detail: str = ""


class ConditionModel(BaseModel):
    direction: str
    lambda_power: int
    denominator: str
    polynomial: str
    discharge: DischargeModel


class LaxReport(BaseModel):
    equation_id: str
    check: Literal["lax"] = "lax"
    status: Literal["PASS", "CONDITIONAL"]
    family_k: Optional[int] = None
    elapsed: float
    conditions: List[ConditionModel]
    notes: List[str] = Field(default_factory=list)


class CasimirReportModel(BaseModel):
    equation_id: str
    check: Literal["casimir"] = "casimir"
    casimir_index: int
    label: str
    point: str
    first_nonvanishing_order: Optional[int]
    trusted_through: int
    threshold: int
    status: Literal["PASS", "FAIL", "INCONCLUSIVE"]
    note: str = ""


class ExactnessReport(BaseModel):
    equation_id: str
    check: Literal["exactness"] = "exactness"
    closed: bool
    expected_closed: Optional[bool]
    status: Literal["PASS", "FAIL"]
    witness: str = ""


class VerifyAllReport(BaseModel):
    status: Literal["PASS", "CONDITIONAL", "FAIL"]
    lax: List[LaxReport]
    casimir: List[CasimirReportModel]
    exactness: List[ExactnessReport]


class SimulateRequest(BaseModel):
    nx: int = 64
    ny: int = 64
    dt: float = 1e-3
    tmax: float = 1.0
    init: str = "single_mode"
    cfl: float = 0.5
    with_rows: bool = True


class DiagnosticsRow(BaseModel):
    step: int
    time: float
    mass: float
    max_abs_u: float
    lax_gap: float


class SimulateReport(BaseModel):
    status: Literal["OK", "ABORT"]
    summary: Dict[str, object] = Field(default_factory=dict)
    rows: List[DiagnosticsRow] = Field(default_factory=list)
    abort_reason: str = ""
    abort_step: Optional[int] = None


class CheckNumericRequest(BaseModel):
    equation_id: str
    solution: str
    samples: int = 16
    seed: int = 0
    flow_h: float = 0.05


class CheckNumericReport(BaseModel):
    equation_id: str
    check: Literal["numeric"] = "numeric"
    solution: str
    status: Literal["PASS", "FAIL"]
    mms: Dict[str, object]
    lax_numeric: Dict[str, object]
    flow: Optional[Dict[str, object]] = None
    flow_skipped: str = ""


class VerifyLaxRequest(BaseModel):
    equation_id: str
    k: Optional[int] = None
    max_cert_order: Optional[int] = None


class VerifyCasimirRequest(BaseModel):
    equation_id: str
    index: int
    extra_orders: int = 0


class VerifyExactnessRequest(BaseModel):
    equation_id: str


# -- report builders ----------------------------------------------------------


def build_lax_report(entry: EquationEntry,
                     max_cert_order: Optional[int] = None) -> LaxReport:
    result = entry.verify_lax(max_cert_order=max_cert_order
                              if max_cert_order is not None
                              else default_cert_order())
    conds = [ConditionModel(direction=c.direction,
                            lambda_power=c.lambda_power,
                            denominator=c.denominator_str(),
                            polynomial=render_poly(c.poly),
                            discharge=DischargeModel(kind=d.kind,
                                                     detail=d.detail))
             for c, d in result.conditions]
    return LaxReport(equation_id=entry.id, status=result.status,
                     family_k=entry.family_k, elapsed=result.elapsed,
                     conditions=conds, notes=list(entry.notes))


def build_casimir_report(entry: EquationEntry, index: int,
                         extra_orders: int = 0) -> CasimirReportModel:
    if not (0 <= index < len(entry.casimirs)):
        raise HTTPException(
            status_code=400,
            detail=f"{entry.id} has casimir indices 0..{len(entry.casimirs) - 1}")
    spec = entry.casimirs[index]
    if spec.threshold is None:
        raise HTTPException(
            status_code=400,
            detail=f"{entry.id} casimir {index} ({spec.label}) carries no "
                   f"claimed vanishing threshold: {spec.note}")
    rep = entry.verify_casimir(index, extra_orders=extra_orders)
    return CasimirReportModel(
        equation_id=entry.id, casimir_index=index, label=spec.label,
        point=rep.point,
        first_nonvanishing_order=rep.first_nonvanishing_order,
        trusted_through=rep.trusted_through, threshold=rep.threshold,
        status=rep.status, note=spec.note)


def build_exactness_report(entry: EquationEntry) -> ExactnessReport:
    res = entry.verify_exactness()
    expected = entry.seed_closed
    status = "PASS" if expected is None or res.closed == expected else "FAIL"
    return ExactnessReport(equation_id=entry.id, closed=res.closed,
                           expected_closed=expected, status=status,
                           witness="" if res.closed else res.describe())


def build_verify_all() -> VerifyAllReport:
    lax: List[LaxReport] = []
    casimir: List[CasimirReportModel] = []
    exact: List[ExactnessReport] = []
    for eid in ENTRY_IDS:
        entry = get_entry(eid)
        lax.append(build_lax_report(entry))
        for i, spec in enumerate(entry.casimirs):
            if spec.threshold is not None:
                casimir.append(build_casimir_report(entry, i))
        exact.append(build_exactness_report(entry))
    if any(r.status == "FAIL" for r in casimir) \
            or any(r.status == "FAIL" for r in exact):
        status = "FAIL"
    elif any(r.status == "CONDITIONAL" for r in lax) \
            or any(r.status == "INCONCLUSIVE" for r in casimir):
        status = "CONDITIONAL"
    else:
        status = "PASS"
    return VerifyAllReport(status=status, lax=lax, casimir=casimir,
                           exactness=exact)


def build_check_numeric(req: CheckNumericRequest) -> CheckNumericReport:
    entry = _load(req.equation_id)
    if req.solution not in BUILTIN_SOLUTIONS:
        raise HTTPException(
            status_code=400,
            detail=f"unknown builtin solution {req.solution!r}; "
                   f"choose from {BUILTIN_SOLUTIONS}")
    try:
        sol = builtin_solution(entry, req.solution)
    except ValueError as e:
        raise HTTPException(status_code=400, detail=str(e))
    mms = mms_residual(entry, sol, n_samples=req.samples, seed=req.seed)
    laxnum = lax_numeric_check(entry, sol, n_samples=req.samples,
                               seed=req.seed)
    status = "PASS" if laxnum.status == "PASS" else "FAIL"
    flow = None
    skipped = ""
    if mms.max_abs < 1e-9:
        ratio = flow_commutator_ratio(entry, sol, h=req.flow_h)
        flow = ratio.summary()
    else:
        skipped = (f"candidate is not a solution "
                   f"(equation residual {mms.max_abs:.3g}); "
                   f"flow commutation not applicable")
    return CheckNumericReport(equation_id=entry.id, solution=req.solution,
                              status=status, mms=mms.summary(),
                              lax_numeric=laxnum.summary(), flow=flow,
                              flow_skipped=skipped)


# -- application --------------------------------------------------------------


def create_app() -> FastAPI:
    app = FastAPI(title="heavenly", version=__version__)

    @app.get("/health")
    def health() -> Dict[str, str]:
        return {"status": "ok", "version": __version__}

    @app.get("/catalog")
    def catalog_list() -> List[Dict[str, object]]:
        out = []
        for eid in ENTRY_IDS:
            e = get_entry(eid)
            out.append({"id": e.id, "name": e.name, "n": e.ctx.n,
                        "family_k": e.family_k, "backend": e.backend,
                        "casimirs": len(e.casimirs)})
        return out

    @app.get("/catalog/export")
    def catalog_export() -> Dict[str, object]:
        return {"tool_version": __version__, "entries": catalog_json()}

    @app.get("/catalog/{equation_id}")
    def catalog_show(equation_id: str, k: Optional[int] = None
                     ) -> Dict[str, object]:
        return entry_to_json(_load(equation_id, k))

    @app.post("/verify/lax")
    def verify_lax_ep(req: VerifyLaxRequest) -> LaxReport:
        return build_lax_report(_load(req.equation_id, req.k),
                                req.max_cert_order)

    @app.post("/verify/casimir")
    def verify_casimir_ep(req: VerifyCasimirRequest) -> CasimirReportModel:
        return build_casimir_report(_load(req.equation_id), req.index,
                                    req.extra_orders)

    @app.post("/verify/exactness")
    def verify_exactness_ep(req: VerifyExactnessRequest) -> ExactnessReport:
        return build_exactness_report(_load(req.equation_id))

    @app.post("/verify/all")
    def verify_all_ep() -> VerifyAllReport:
        return build_verify_all()

    @app.post("/simulate/dkp")
    def simulate_ep(req: SimulateRequest) -> SimulateReport:
        entry = get_entry("dkp")
        if req.init not in BUILTIN_SOLUTIONS:
            raise HTTPException(
                status_code=400,
                detail=f"unknown initial profile {req.init!r}")
        try:
            grid = Grid2(req.nx, req.ny, req.dt)
        except ValueError as e:
            raise HTTPException(status_code=400, detail=str(e))
        init = builtin_solution(entry, req.init)
        try:
            run = dkp_solve(grid, init, req.tmax, cfl=req.cfl)
        except NumericAbort as e:
            return SimulateReport(status="ABORT", abort_reason=e.reason,
                                  abort_step=e.step)
        rows = []
        if req.with_rows:
            rows = [DiagnosticsRow(step=i, time=run.times[i],
                                   mass=run.mass[i], max_abs_u=run.max_u[i],
                                   lax_gap=run.lax_gap[i])
                    for i in range(len(run.times))]
        return SimulateReport(status="OK", summary=run.summary(), rows=rows)

    @app.post("/check/numeric")
    def check_numeric_ep(req: CheckNumericRequest) -> CheckNumericReport:
        return build_check_numeric(req)

    return app


app = create_app()
