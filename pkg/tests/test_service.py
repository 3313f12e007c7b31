import threading
import time

import pytest
from fastapi.testclient import TestClient

from helpers import a1_problem, replay_report_json
from thermosolve.reasoner import solve_problem
from thermosolve.report import to_json
from thermosolve.service import ServiceConfig, create_app


@pytest.fixture()
def client():
    return TestClient(create_app(ServiceConfig()))


def build_a1_session(client) -> str:
    created = client.post("/api/sessions",
                          json={"process_class": "single_change_of_state"})
    assert created.status_code == 201
    sid = created.json()["session_id"]

    def attr(instance, attribute, value):
        response = client.post(f"/api/sessions/{sid}/attributes",
                               json={"instance": instance,
                                     "attribute": attribute, "value": value})
        assert response.status_code == 200, response.text
        return response.json()

    attr("material", "substance", "air")
    for flag in ("adiabatic", "isobaric", "isochoric", "polytropic"):
        attr("change", flag, "false")
    for flag in ("isothermal", "reversible"):
        attr("change", flag, "true")
    for name, value in (("m", 1.0), ("T_1", 300.0), ("V_1", 1.0),
                        ("V_2", 0.5)):
        response = client.post(f"/api/sessions/{sid}/values",
                               json={"name": name, "value": value})
        assert response.status_code == 200, response.text
    response = client.post(f"/api/sessions/{sid}/targets",
                           json={"targets": ["W_12", "Q_12"]})
    assert response.status_code == 200
    return sid


def test_process_classes_endpoint(client):
    body = client.get("/api/process-classes").json()
    names = [cls["name"] for cls in body["process_classes"]]
    assert names == ["equilibrium_state", "single_change_of_state"]


def test_materials_endpoint(client):
    body = client.get("/api/materials").json()
    names = [mat["name"] for mat in body["materials"]]
    assert names == sorted(names) and "air" in names
    air = next(mat for mat in body["materials"] if mat["name"] == "air")
    assert air["specific_gas_constant"] == 287.04


def test_create_session_returns_dialogue_state(client):
    body = client.post("/api/sessions",
                       json={"process_class": "single_change_of_state"}).json()
    assert body["status"] == "building"
    assert body["material"] is None
    assert len(body["pending_choices"]) == 10
    names = {var["name"] for var in body["variables"]}
    assert {"m", "T_1", "T_2", "W_12", "R_univ"} <= names
    r_univ = next(v for v in body["variables"] if v["name"] == "R_univ")
    assert r_univ["known"] and r_univ["provenance"] == "constant"


def test_unknown_process_class_is_400(client):
    response = client.post("/api/sessions", json={"process_class": "nope"})
    assert response.status_code == 400
    body = response.json()
    assert body["code"] == "UnknownProcessClass"
    assert set(body) == {"code", "message", "details"}


def test_missing_body_field_is_400(client):
    response = client.post("/api/sessions", json={"wrong": 1})
    assert response.status_code == 400
    assert response.json()["code"] == "BadRequest"


def test_invalid_value_is_422_with_envelope(client):
    sid = client.post("/api/sessions",
                      json={"process_class": "single_change_of_state"}
                      ).json()["session_id"]
    response = client.post(f"/api/sessions/{sid}/values",
                           json={"name": "T_1", "value": -5.0})
    assert response.status_code == 422
    body = response.json()
    assert body["code"] == "NonPositiveValue"
    assert "T_1" in body["message"]


def test_unknown_session_404(client):
    response = client.get("/api/sessions/doesnotexist")
    assert response.status_code == 404
    assert response.json()["code"] == "UnknownSession"


def test_session_expiry_404_with_distinct_code():
    app = create_app(ServiceConfig(session_timeout=0.05))
    client = TestClient(app)
    sid = client.post("/api/sessions",
                      json={"process_class": "equilibrium_state"}
                      ).json()["session_id"]
    time.sleep(0.1)
    response = client.get(f"/api/sessions/{sid}")
    assert response.status_code == 404
    assert response.json()["code"] == "SessionExpired"


def test_delete_session(client):
    sid = client.post("/api/sessions",
                      json={"process_class": "equilibrium_state"}
                      ).json()["session_id"]
    assert client.delete(f"/api/sessions/{sid}").json() == {"deleted": sid}
    assert client.get(f"/api/sessions/{sid}").status_code == 404


def test_solve_matches_library(client):
    sid = build_a1_session(client)
    response = client.post(f"/api/sessions/{sid}/solve")
    assert response.status_code == 200
    wire = response.json()["report"]
    library = to_json(solve_problem(a1_problem()))
    assert wire == library
    assert wire["results"]["W_12"] == pytest.approx(59688.290012378005,
                                                    rel=1e-9)
    replay_report_json(wire)


def test_solve_idempotent_session_stays_editable(client):
    sid = build_a1_session(client)
    first = client.post(f"/api/sessions/{sid}/solve")
    second = client.post(f"/api/sessions/{sid}/solve")
    assert first.json() == second.json()
    state = client.get(f"/api/sessions/{sid}").json()
    assert state["status"] == "building"
    # still editable after solving
    response = client.post(f"/api/sessions/{sid}/values",
                           json={"name": "p_1", "value": 86112.0})
    assert response.status_code == 200


def test_solve_graph_json_and_dot(client):
    sid = build_a1_session(client)
    body = client.post(f"/api/sessions/{sid}/solve?graph=json").json()
    graph = body["graph"]
    kinds = {node["kind"] for node in graph["nodes"]}
    assert kinds == {"Equation", "Variable"}
    assert any(node.get("fired") for node in graph["nodes"])

    dot = client.post(f"/api/sessions/{sid}/solve?graph=dot").json()["graph"]
    assert isinstance(dot, str) and dot.startswith("digraph")

    bad = client.post(f"/api/sessions/{sid}/solve?graph=nope")
    assert bad.status_code == 400
    assert bad.json()["code"] == "BadRequest"


def test_solve_incomplete_definition_stage(client):
    sid = client.post("/api/sessions",
                      json={"process_class": "single_change_of_state"}
                      ).json()["session_id"]
    response = client.post(f"/api/sessions/{sid}/solve")
    assert response.status_code == 422
    body = response.json()
    assert body["code"] == "IncompleteDefinition"
    assert body["details"]["stage"] == "definition"


def test_solve_not_solvable_stage(client):
    sid = client.post("/api/sessions",
                      json={"process_class": "single_change_of_state"}
                      ).json()["session_id"]

    def attr(instance, attribute, value):
        client.post(f"/api/sessions/{sid}/attributes",
                    json={"instance": instance, "attribute": attribute,
                          "value": value})

    attr("material", "substance", "air")
    for flag in ("adiabatic", "isobaric", "isochoric", "polytropic",
                 "reversible"):
        attr("change", flag, "false")
    attr("change", "isothermal", "true")
    client.post(f"/api/sessions/{sid}/values",
                json={"name": "m", "value": 1.0})
    client.post(f"/api/sessions/{sid}/targets",
                json={"targets": ["W_12"]})
    response = client.post(f"/api/sessions/{sid}/solve")
    assert response.status_code == 422
    body = response.json()
    assert body["code"] == "NotSolvable"
    assert body["details"]["stage"] == "reachability"
    assert body["details"]["unreached"] == ["W_12"]


def test_solve_inconsistent_input_stage(client):
    sid = build_a1_session(client)
    client.post(f"/api/sessions/{sid}/values",
                json={"name": "p_1", "value": 90417.6})
    response = client.post(f"/api/sessions/{sid}/solve")
    assert response.status_code == 422
    body = response.json()
    assert body["code"] == "InconsistentInput"
    assert body["details"]["stage"] == "audit"
    assert body["details"]["equation"] == "thermal_eos@state_1"


def test_document_endpoint_roundtrips(client):
    sid = build_a1_session(client)
    body = client.get(f"/api/sessions/{sid}/document").json()
    assert body["session_id"] == sid
    assert "process_class: single_change_of_state" in body["document"]
    assert "material: air" in body["document"]


def test_busy_session_returns_409(monkeypatch):
    import thermosolve.service as service_module

    app = create_app(ServiceConfig())
    client = TestClient(app)
    sid = client.post("/api/sessions",
                      json={"process_class": "equilibrium_state"}
                      ).json()["session_id"]

    started = threading.Event()
    release = threading.Event()
    original = service_module.set_value

    def slow_set_value(problem, name, value):
        started.set()
        assert release.wait(timeout=5.0)
        return original(problem, name, value)

    # hold the per-session lock open in a worker, then watch a second
    # mutation bounce instead of blocking
    monkeypatch.setattr(service_module, "set_value", slow_set_value)
    worker = threading.Thread(
        target=lambda: client.post(f"/api/sessions/{sid}/values",
                                   json={"name": "T", "value": 300.0}))
    worker.start()
    try:
        assert started.wait(timeout=5.0)
        blocked = client.post(f"/api/sessions/{sid}/values",
                              json={"name": "V", "value": 1.0})
        assert blocked.status_code == 409
        assert blocked.json()["code"] == "SessionBusy"
    finally:
        release.set()
        worker.join(timeout=5.0)
    state = client.get(f"/api/sessions/{sid}").json()
    assert state["knowns"].get("T") == 300.0
