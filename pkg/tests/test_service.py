"""HTTP review service: lifecycle, persistence, errors, and auth."""

import pytest
from fastapi.testclient import TestClient

from conftest import data_path
from proxy_audit.service import create_app


@pytest.fixture()
def root(tmp_path):
    return str(tmp_path / "sessions")


@pytest.fixture()
def client(root):
    return TestClient(create_app(root))


def _create(client, **overrides):
    body = {"model_path": data_path("masked_model.json"),
            "dataset_path": data_path("retailer.csv"),
            "protected": "pregnant", "epsilon": 0.9, "delta": 0.4}
    body.update(overrides)
    resp = client.post("/sessions", json=body)
    assert resp.status_code == 201
    return resp.json()["id"]


def test_full_review_lifecycle(client):
    sid = _create(client)

    resp = client.get(f"/sessions/{sid}/witnesses")
    assert resp.status_code == 200
    witnesses = resp.json()
    assert len(witnesses) == 1
    w = witnesses[0]
    assert w["association"] == 1.0
    assert w["influence"] == 0.5
    assert w["verdict"] == "undecided"
    assert w["size"] == w["subterm_size"]

    resp = client.get(f"/sessions/{sid}/subexpressions")
    doc = resp.json()
    assert doc["epsilon"] == 0.9 and doc["delta"] == 0.4
    assert len(doc["rows"]) >= len(witnesses)

    # repair is blocked while the witness is undecided
    resp = client.post(f"/sessions/{sid}/repair")
    assert resp.status_code == 409
    assert resp.json()["undecided"]

    resp = client.post(f"/sessions/{sid}/judgments", json={
        "fingerprint": w["fingerprint"], "verdict": "inappropriate"})
    assert resp.status_code == 204

    resp = client.get(f"/sessions/{sid}/witnesses")
    assert resp.json()[0]["verdict"] == "inappropriate"

    resp = client.post(f"/sessions/{sid}/repair")
    assert resp.status_code == 200
    result = resp.json()
    assert result["edits"]
    assert result["residual_witnesses"] == []

    assert client.get(f"/sessions/{sid}/witnesses").json() == []

    resp = client.get(f"/sessions/{sid}/program", params={"form": "diff"})
    diff = resp.json()
    assert diff["before"] != diff["after"]
    assert diff["edits"] == result["edits"]

    resp = client.get(f"/sessions/{sid}/program")
    assert resp.json()["text"] == diff["after"]


def test_judgments_survive_service_restart(root):
    client = TestClient(create_app(root))
    sid = _create(client)
    fp = client.get(f"/sessions/{sid}/witnesses").json()[0]["fingerprint"]
    client.post(f"/sessions/{sid}/judgments",
                json={"fingerprint": fp, "verdict": "appropriate"})
    # a brand-new app over the same directory sees the judgment
    fresh = TestClient(create_app(root))
    assert fresh.get(f"/sessions/{sid}/witnesses").json()[0]["verdict"] == \
        "appropriate"


def test_approved_witness_survives_repair(client):
    sid = _create(client)
    fp = client.get(f"/sessions/{sid}/witnesses").json()[0]["fingerprint"]
    client.post(f"/sessions/{sid}/judgments",
                json={"fingerprint": fp, "verdict": "appropriate"})
    resp = client.post(f"/sessions/{sid}/repair")
    assert resp.status_code == 200
    assert resp.json()["edits"] == []
    assert len(resp.json()["residual_witnesses"]) == 1
    before = client.get(f"/sessions/{sid}/program",
                        params={"form": "diff"}).json()
    assert before["before"] == before["after"]


def test_error_statuses(client):
    assert client.get("/sessions/nosuch/witnesses").status_code == 404
    sid = _create(client)
    resp = client.post(f"/sessions/{sid}/judgments", json={
        "fingerprint": "f" * 64, "verdict": "inappropriate"})
    assert resp.status_code == 404
    resp = client.post(f"/sessions/{sid}/judgments", json={
        "fingerprint": "f" * 64, "verdict": "maybe"})
    assert resp.status_code == 422
    resp = client.get(f"/sessions/{sid}/program", params={"form": "xml"})
    assert resp.status_code == 422
    resp = client.post("/sessions", json={
        "model_path": data_path("masked_model.json"),
        "dataset_path": "/nonexistent.csv", "protected": "pregnant"})
    assert resp.status_code == 400


def test_token_auth(root, monkeypatch):
    monkeypatch.setenv("PROXY_AUDIT_TOKEN", "sekrit")
    client = TestClient(create_app(root))
    resp = client.post("/sessions", json={
        "model_path": data_path("masked_model.json"),
        "dataset_path": data_path("retailer.csv"),
        "protected": "pregnant"})
    assert resp.status_code == 401
    resp = client.post("/sessions", headers={"x-proxy-audit-token": "sekrit"},
                       json={
                           "model_path": data_path("masked_model.json"),
                           "dataset_path": data_path("retailer.csv"),
                           "protected": "pregnant"})
    assert resp.status_code == 201
    sid = resp.json()["id"]
    assert client.get(f"/sessions/{sid}/witnesses").status_code == 401
    assert client.get(f"/sessions/{sid}/witnesses",
                      headers={"x-proxy-audit-token": "sekrit"}
                      ).status_code == 200
