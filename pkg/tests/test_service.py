"""HTTP service: routes, schemas, error mapping."""

from __future__ import annotations

import warnings

import pytest

with warnings.catch_warnings():
    warnings.simplefilter("ignore")
    from fastapi.testclient import TestClient

from heavenly.service import app


@pytest.fixture(scope="module")
def client():
    return TestClient(app)


class TestCatalogRoutes:
    def test_health(self, client):
        r = client.get("/health")
        assert r.status_code == 200
        assert r.json()["status"] == "ok"

    def test_list(self, client):
        r = client.get("/catalog")
        assert r.status_code == 200
        assert len(r.json()) == 11

    def test_show_and_unknown(self, client):
        assert client.get("/catalog/dkp").json()["id"] == "dkp"
        assert client.get("/catalog/nope").status_code == 404

    def test_show_with_k(self, client):
        data = client.get("/catalog/pleb1", params={"k": 2}).json()
        assert data["family_k"] == 2
        assert data["n"] == 4

    def test_export(self, client):
        data = client.get("/catalog/export").json()
        assert len(data["entries"]) == 11


class TestVerifyRoutes:
    def test_lax_pass(self, client):
        r = client.post("/verify/lax", json={"equation_id": "dkp"})
        assert r.status_code == 200
        body = r.json()
        assert body["status"] == "PASS"
        assert body["check"] == "lax"
        assert all(c["discharge"]["kind"] != "open"
                   for c in body["conditions"])

    def test_lax_unknown_id(self, client):
        assert client.post("/verify/lax",
                           json={"equation_id": "nope"}).status_code == 404

    def test_k_on_non_family(self, client):
        r = client.post("/verify/lax",
                        json={"equation_id": "dkp", "k": 2})
        assert r.status_code == 400

    def test_casimir_report_fields(self, client):
        r = client.post("/verify/casimir",
                        json={"equation_id": "husain", "index": 0})
        body = r.json()
        assert body["status"] == "PASS"
        assert body["point"] == "i"
        assert body["threshold"] == -1

    def test_casimir_without_claim_is_usage_error(self, client):
        r = client.post("/verify/casimir",
                        json={"equation_id": "mod_einstein_weyl", "index": 0})
        assert r.status_code == 400

    def test_casimir_index_range(self, client):
        r = client.post("/verify/casimir",
                        json={"equation_id": "dkp", "index": 9})
        assert r.status_code == 400

    def test_exactness(self, client):
        body = client.post("/verify/exactness",
                           json={"equation_id": "einstein_weyl"}).json()
        assert body["status"] == "PASS"
        assert not body["closed"]
        assert body["witness"]

    def test_verify_all(self, client):
        body = client.post("/verify/all").json()
        assert body["status"] == "PASS"
        assert len(body["lax"]) == 11


class TestNumericRoutes:
    def test_simulate_ok(self, client):
        r = client.post("/simulate/dkp",
                        json={"nx": 16, "ny": 16, "dt": 1e-3, "tmax": 0.01,
                              "init": "single_mode", "with_rows": True})
        body = r.json()
        assert body["status"] == "OK"
        assert len(body["rows"]) == 11
        assert body["summary"]["mass_drift"] < 1e-10

    def test_simulate_abort(self, client):
        r = client.post("/simulate/dkp",
                        json={"nx": 16, "ny": 16, "dt": 1.0, "tmax": 2.0,
                              "init": "sine_x"})
        body = r.json()
        assert body["status"] == "ABORT"
        assert body["abort_reason"] == "CFL violation"
        assert body["abort_step"] == 0

    def test_simulate_bad_grid(self, client):
        r = client.post("/simulate/dkp", json={"nx": 12})
        assert r.status_code == 400

    def test_check_numeric(self, client):
        r = client.post("/check/numeric",
                        json={"equation_id": "husain", "solution": "zero",
                              "samples": 6, "seed": 1})
        body = r.json()
        assert body["status"] == "PASS"
        assert body["mms"]["max_abs"] == 0.0

    def test_check_numeric_unknown_builtin(self, client):
        r = client.post("/check/numeric",
                        json={"equation_id": "dkp", "solution": "bogus"})
        assert r.status_code == 400

    def test_check_numeric_flow_skip_for_non_solution(self, client):
        r = client.post("/check/numeric",
                        json={"equation_id": "dkp", "solution": "sine_x",
                              "samples": 4, "seed": 1})
        body = r.json()
        assert body["flow"] is None
        assert "not a solution" in body["flow_skipped"]
