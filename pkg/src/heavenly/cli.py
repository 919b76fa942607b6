"""Command line front end.

A thin client over the HTTP service: by default the FastAPI app is
mounted in-process through an ASGI transport, so the CLI, the test suite
and a deployed server all exercise the identical interface.  Reports are
JSON-first (``--json`` writes a report envelope); stdout carries a short
human-readable view.

Exit codes: 0 all PASS, 1 internal error, 2 usage or unknown id,
3 CONDITIONAL, 4 numeric abort.
"""

from __future__ import annotations

import csv
import datetime
import json
import sys
from pathlib import Path
from typing import Dict, List, Optional

import click
import httpx

from . import __version__

EXIT_PASS = 0
EXIT_INTERNAL = 1
EXIT_USAGE = 2
EXIT_CONDITIONAL = 3
EXIT_NUMERIC_ABORT = 4


def make_client(server: Optional[str] = None) -> httpx.Client:
    if server:
        return httpx.Client(base_url=server, timeout=300.0)
    import warnings
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        from fastapi.testclient import TestClient
    from .service import app
    return TestClient(app, base_url="http://heavenly.local",
                      raise_server_exceptions=False)


def request(client: httpx.Client, method: str, path: str,
            **kwargs) -> Dict:
    """Issue a request; usage-level HTTP errors terminate with exit 2."""
    try:
        resp = client.request(method, path, **kwargs)
    except httpx.HTTPError as e:
        click.echo(f"error: service unreachable: {e}", err=True)
        sys.exit(EXIT_INTERNAL)
    if resp.status_code in (400, 404, 422):
        detail = resp.json().get("detail", resp.text)
        click.echo(f"error: {detail}", err=True)
        sys.exit(EXIT_USAGE)
    if resp.status_code != 200:
        click.echo(f"error: service returned {resp.status_code}: {resp.text}",
                   err=True)
        sys.exit(EXIT_INTERNAL)
    return resp.json()


def envelope(command: List[str], results: List[Dict]) -> Dict:
    return {
        "tool_version": __version__,
        "command": " ".join(command),
        "timestamp": datetime.datetime.now(datetime.timezone.utc).isoformat(),
        "results": results,
    }


def _scrub(obj):
    """Drop wall-clock timing fields so written reports are byte-stable
    across runs (the envelope timestamp is the only volatile field)."""
    if isinstance(obj, dict):
        return {k: _scrub(v) for k, v in obj.items() if k != "elapsed"}
    if isinstance(obj, list):
        return [_scrub(v) for v in obj]
    return obj


def write_report(path: str, command: List[str], results: List[Dict]) -> None:
    data = json.dumps(envelope(command, _scrub(results)), indent=2)
    Path(path).write_text(data + "\n", encoding="utf-8")


def status_exit(status: str) -> int:
    if status == "PASS" or status == "OK":
        return EXIT_PASS
    if status in ("CONDITIONAL", "INCONCLUSIVE"):
        return EXIT_CONDITIONAL
    if status == "ABORT":
        return EXIT_NUMERIC_ABORT
    return EXIT_INTERNAL


@click.group()
@click.version_option(__version__)
@click.option("--server", default=None, metavar="URL",
              help="Base URL of a running service; default runs in-process.")
@click.pass_context
def main(ctx: click.Context, server: Optional[str]) -> None:
    """Verification engine for heavenly-type dispersionless systems."""
    ctx.obj = make_client(server)


# -- catalog ------------------------------------------------------------------


@main.group()
def catalog() -> None:
    """Inspect the equation catalog."""


@catalog.command("list")
@click.pass_obj
def catalog_list(client: httpx.Client) -> None:
    rows = request(client, "GET", "/catalog")
    click.echo(f"{'id':<18} {'n':>2} {'k':>4} {'backend':<12} "
               f"{'casimirs':>8}  name")
    for r in rows:
        k = r["family_k"] if r["family_k"] is not None else "-"
        click.echo(f"{r['id']:<18} {r['n']:>2} {k!s:>4} {r['backend']:<12} "
                   f"{r['casimirs']:>8}  {r['name']}")


@catalog.command("show")
@click.argument("equation_id")
@click.option("--k", type=int, default=None,
              help="Family instantiation level.")
@click.pass_obj
def catalog_show(client: httpx.Client, equation_id: str,
                 k: Optional[int]) -> None:
    params = {} if k is None else {"k": k}
    data = request(client, "GET", f"/catalog/{equation_id}", params=params)
    click.echo(json.dumps(data, indent=2))


@catalog.command("export")
@click.option("--json", "json_path", required=True, metavar="PATH",
              help="Write the full catalog as JSON.")
@click.pass_obj
def catalog_export(client: httpx.Client, json_path: str) -> None:
    data = request(client, "GET", "/catalog/export")
    Path(json_path).write_text(json.dumps(data, indent=2) + "\n",
                               encoding="utf-8")
    click.echo(f"wrote {json_path}")


# -- verify -------------------------------------------------------------------


@main.group()
def verify() -> None:
    """Symbolic verification: Lax pairs, Casimir expansions, exactness."""


def _show_lax(rep: Dict) -> None:
    click.echo(f"{rep['equation_id']}: lax {rep['status']} "
               f"({len(rep['conditions'])} conditions, "
               f"{rep['elapsed']:.2f}s)")
    for c in rep["conditions"]:
        mark = c["discharge"]["kind"]
        line = (f"  [{c['direction']}] L^{c['lambda_power']}"
                + (f" / {c['denominator']}"
                   if c["denominator"] != "1" else "")
                + f": {mark}")
        if mark == "open":
            line += f"  {c['polynomial']} = 0"
        click.echo(line)
    for n in rep.get("notes", []):
        click.echo(f"  note: {n}")


@verify.command("lax")
@click.argument("equation_id")
@click.option("--k", type=int, default=None,
              help="Family instantiation level.")
@click.option("--json", "json_path", default=None, metavar="PATH",
              help="Write a JSON report envelope.")
@click.pass_obj
def verify_lax_cmd(client: httpx.Client, equation_id: str, k: Optional[int],
                   json_path: Optional[str]) -> None:
    rep = request(client, "POST", "/verify/lax",
                  json={"equation_id": equation_id, "k": k})
    _show_lax(rep)
    if json_path:
        write_report(json_path, sys.argv[1:], [rep])
    sys.exit(status_exit(rep["status"]))


@verify.command("casimir")
@click.argument("equation_id")
@click.option("--index", type=int, required=True,
              help="Which stored gradient expansion to verify.")
@click.option("--extra-orders", type=int, default=0,
              help="Expand this many orders past the claimed threshold.")
@click.option("--json", "json_path", default=None, metavar="PATH")
@click.pass_obj
def verify_casimir_cmd(client: httpx.Client, equation_id: str, index: int,
                       extra_orders: int, json_path: Optional[str]) -> None:
    rep = request(client, "POST", "/verify/casimir",
                  json={"equation_id": equation_id, "index": index,
                        "extra_orders": extra_orders})
    first = rep["first_nonvanishing_order"]
    click.echo(f"{rep['equation_id']}: casimir {rep['label']} at "
               f"{rep['point']}: {rep['status']} "
               f"(first nonvanishing "
               f"{'none' if first is None else first}, trusted through "
               f"{rep['trusted_through']}, threshold {rep['threshold']})")
    if rep.get("note"):
        click.echo(f"  note: {rep['note']}")
    if json_path:
        write_report(json_path, sys.argv[1:], [rep])
    sys.exit(status_exit(rep["status"]))


@verify.command("exactness")
@click.argument("equation_id")
@click.option("--json", "json_path", default=None, metavar="PATH")
@click.pass_obj
def verify_exactness_cmd(client: httpx.Client, equation_id: str,
                         json_path: Optional[str]) -> None:
    rep = request(client, "POST", "/verify/exactness",
                  json={"equation_id": equation_id})
    closed = "closed" if rep["closed"] else "not closed"
    click.echo(f"{rep['equation_id']}: seed {closed}: {rep['status']}")
    if rep.get("witness"):
        click.echo(f"  witness: {rep['witness']}")
    if json_path:
        write_report(json_path, sys.argv[1:], [rep])
    sys.exit(status_exit(rep["status"]))


@verify.command("all")
@click.option("--json", "json_path", default=None, metavar="PATH")
@click.pass_obj
def verify_all_cmd(client: httpx.Client, json_path: Optional[str]) -> None:
    rep = request(client, "POST", "/verify/all")
    for r in rep["lax"]:
        click.echo(f"lax        {r['equation_id']:<18} {r['status']}")
    for r in rep["casimir"]:
        click.echo(f"casimir    {r['equation_id']:<18} {r['status']} "
                   f"({r['label']})")
    for r in rep["exactness"]:
        closed = "closed" if r["closed"] else "not closed"
        click.echo(f"exactness  {r['equation_id']:<18} {r['status']} "
                   f"({closed})")
    click.echo(f"overall: {rep['status']}")
    if json_path:
        write_report(json_path, sys.argv[1:], [rep])
    sys.exit(status_exit(rep["status"]))


# -- simulate -----------------------------------------------------------------


@main.group()
def simulate() -> None:
    """Time-stepping runs."""


@simulate.command("dkp")
@click.option("--nx", type=int, default=64)
@click.option("--ny", type=int, default=64)
@click.option("--dt", type=float, default=1e-3)
@click.option("--tmax", type=float, default=1.0)
@click.option("--init", default="single_mode", metavar="NAME",
              help="Builtin initial profile.")
@click.option("--out", "outdir", default=None, metavar="DIR",
              help="Write diagnostics.csv and summary.json here.")
@click.pass_obj
def simulate_dkp(client: httpx.Client, nx: int, ny: int, dt: float,
                 tmax: float, init: str, outdir: Optional[str]) -> None:
    rep = request(client, "POST", "/simulate/dkp",
                  json={"nx": nx, "ny": ny, "dt": dt, "tmax": tmax,
                        "init": init, "with_rows": outdir is not None})
    if rep["status"] == "ABORT":
        click.echo(f"ABORT: {rep['abort_reason']} at step "
                   f"{rep['abort_step']}", err=True)
        sys.exit(EXIT_NUMERIC_ABORT)
    s = rep["summary"]
    click.echo(f"dkp run: {s['steps']} steps to t={s['tmax']:g}, "
               f"mass drift {s['mass_drift']:.3e}, "
               f"max lax gap {s['max_lax_gap']:.3e}")
    if outdir:
        out = Path(outdir)
        out.mkdir(parents=True, exist_ok=True)
        with open(out / "diagnostics.csv", "w", newline="",
                  encoding="utf-8") as fh:
            w = csv.writer(fh)
            w.writerow(["step", "time", "mass", "max_abs_u", "lax_gap"])
            for r in rep["rows"]:
                w.writerow([r["step"], f"{r['time']:.12g}",
                            f"{r['mass']:.17g}", f"{r['max_abs_u']:.17g}",
                            f"{r['lax_gap']:.17g}"])
        (out / "summary.json").write_text(
            json.dumps(s, indent=2, sort_keys=True) + "\n", encoding="utf-8")
        click.echo(f"wrote {out / 'diagnostics.csv'} and "
                   f"{out / 'summary.json'}")
    sys.exit(EXIT_PASS)


# -- check --------------------------------------------------------------------


@main.group()
def check() -> None:
    """Numeric cross-checks of the symbolic catalog."""


@check.command("numeric")
@click.argument("equation_id")
@click.option("--solution", required=True, metavar="NAME",
              help="Builtin closed-form candidate.")
@click.option("--samples", type=int, default=16)
@click.option("--seed", type=int, default=0)
@click.option("--flow-h", type=float, default=0.05,
              help="Base step for the flow commutation ratio test.")
@click.option("--json", "json_path", default=None, metavar="PATH")
@click.pass_obj
def check_numeric(client: httpx.Client, equation_id: str, solution: str,
                  samples: int, seed: int, flow_h: float,
                  json_path: Optional[str]) -> None:
    rep = request(client, "POST", "/check/numeric",
                  json={"equation_id": equation_id, "solution": solution,
                        "samples": samples, "seed": seed,
                        "flow_h": flow_h})
    click.echo(f"{rep['equation_id']} / {rep['solution']}: {rep['status']}")
    click.echo(f"  equation residual max {rep['mms']['max_abs']:.3e} "
               f"over {rep['mms']['n_samples']} samples")
    click.echo(f"  condition split deviation {rep['lax_numeric']['max_deviation']:.3e} "
               f"(tol {rep['lax_numeric']['tol']:g})")
    if rep.get("flow"):
        f = rep["flow"]
        if f["degenerate"]:
            click.echo(f"  flows commute to roundoff "
                       f"(gap {f['gap']:.3e})")
        else:
            click.echo(f"  flow gap {f['gap']:.3e}, halved-step ratio "
                       f"{f['ratio']:.2f}")
    elif rep.get("flow_skipped"):
        click.echo(f"  flow check skipped: {rep['flow_skipped']}")
    if json_path:
        write_report(json_path, sys.argv[1:], [rep])
    sys.exit(status_exit(rep["status"]))


if __name__ == "__main__":
    main()
