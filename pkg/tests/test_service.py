import csv
import io
import json

import numpy as np
import pytest
from fastapi.testclient import TestClient

from invlearn.model import (
    ConstraintHierarchy,
    InverseProblem,
    ObservationSummary,
    PolyhedralRegion,
    problem_to_dict,
)
from invlearn.service import create_app


def triangle_doc():
    region = PolyhedralRegion(
        A=np.array([[1.0, 0.0], [0.0, 1.0], [-1.0, -1.0]]),
        b=np.array([0.0, 0.0, -1.0]))
    prob = InverseProblem(
        region=region,
        hierarchy=ConstraintHierarchy(relevant=frozenset({0, 1, 2}), m=3),
        observations=ObservationSummary.from_points([[0.6, 0.6]]))
    return problem_to_dict(prob)


@pytest.fixture()
def client():
    return TestClient(create_app())


def create(client, doc=None):
    res = client.post("/v1/sessions", json={"problem": doc or triangle_doc()})
    assert res.status_code == 201
    return res.json()


def test_create_session_solves_step_zero(client):
    body = create(client)
    step = body["step"]
    assert step["index"] == 0
    assert step["point"] == pytest.approx([0.0, 0.6])
    assert step["loss"] == pytest.approx(0.36)
    assert body["active"] == [0]
    assert step["theta_bounds"] is not None


def test_missing_problem_and_bad_problem_rejected(client):
    assert client.post("/v1/sessions", json={}).status_code == 422
    res = client.post("/v1/sessions", json={"problem": {"schema": "v1"}})
    assert res.status_code == 422


def test_infeasible_region_yields_422(client):
    doc = triangle_doc()
    # x >= 0 and -x >= 1 cannot both hold.
    doc["region"]["A"] = [[1.0, 0.0], [-1.0, 0.0]]
    doc["region"]["b"] = [0.0, 1.0]
    doc["region"]["labels"] = ["structural", "structural"]
    doc["hierarchy"]["relevant"] = [0, 1]
    res = client.post("/v1/sessions", json={"problem": doc})
    assert res.status_code == 422
    assert res.json()["detail"]["code"] == "validation-failed"


def test_propose_accept_walks_the_trace(client):
    sid = create(client)["id"]
    pending = client.post(f"/v1/sessions/{sid}/propose", json={})
    assert pending.status_code == 200
    assert pending.json()["delta_loss"] == pytest.approx(0.16)
    assert pending.json()["point"] == pytest.approx([0.0, 1.0])
    view = client.post(f"/v1/sessions/{sid}/accept").json()
    assert view["loss_sequence"] == pytest.approx([0.36, 0.52])
    assert view["pending"] is None
    # n = 2 caps the active relevant set; face is now exhausted.
    res = client.post(f"/v1/sessions/{sid}/propose", json={})
    assert res.status_code == 409
    assert res.json()["detail"]["code"] == "face-exhausted"


def test_accept_without_pending_409(client):
    sid = create(client)["id"]
    res = client.post(f"/v1/sessions/{sid}/accept")
    assert res.status_code == 409
    assert res.json()["detail"]["code"] == "nothing-pending"


def test_unknown_session_404(client):
    assert client.get("/v1/sessions/nope").status_code == 404
    assert client.post("/v1/sessions/nope/propose", json={}).status_code == 404


def test_rollback_then_repropose_is_deterministic(client):
    sid = create(client)["id"]
    first = client.post(f"/v1/sessions/{sid}/propose", json={}).json()
    client.post(f"/v1/sessions/{sid}/accept")
    view = client.post(f"/v1/sessions/{sid}/rollback", json={"to": 0}).json()
    assert len(view["steps"]) == 1
    again = client.post(f"/v1/sessions/{sid}/propose", json={}).json()
    assert again["point"] == first["point"]
    assert again["delta_loss"] == first["delta_loss"]


def test_rollback_bounds_checked(client):
    sid = create(client)["id"]
    res = client.post(f"/v1/sessions/{sid}/rollback", json={"to": 5})
    assert res.status_code == 422
    res = client.post(f"/v1/sessions/{sid}/rollback", json={})
    assert res.status_code == 422


def test_omega_validated(client):
    sid = create(client)["id"]
    res = client.post(f"/v1/sessions/{sid}/propose", json={"omega": 1.5})
    assert res.status_code == 422


def test_tau_reported_but_not_enforced(client):
    sid = create(client)["id"]
    res = client.post(f"/v1/sessions/{sid}/propose", json={"tau": 0.01}).json()
    assert res["exceeds_tau"] is True
    # The step is still pending; the human decides.
    assert client.post(f"/v1/sessions/{sid}/accept").status_code == 200


def test_session_isolation(client):
    a = create(client)["id"]
    b = create(client)["id"]
    assert a != b
    client.post(f"/v1/sessions/{a}/propose", json={})
    client.post(f"/v1/sessions/{a}/accept")
    view_b = client.get(f"/v1/sessions/{b}").json()
    assert len(view_b["steps"]) == 1
    assert view_b["pending"] is None


def test_fresh_server_replays_identically():
    def run():
        c = TestClient(create_app())
        sid = c.post("/v1/sessions",
                     json={"problem": triangle_doc()}).json()["id"]
        out = [c.post(f"/v1/sessions/{sid}/propose", json={}).json(),
               c.post(f"/v1/sessions/{sid}/accept").json(),
               c.get(f"/v1/sessions/{sid}").json()]
        return json.dumps(out, sort_keys=True)
    assert run() == run()


def test_diet_region_skeleton(client):
    res = client.post("/v1/diet/region", json={"regimen": "dash-women-51"})
    assert res.status_code == 200
    body = res.json()
    assert len(body["groups"]) == 38
    assert len(body["row_names"]) == len(body["problem"]["region"]["A"])
    assert body["problem"]["loss"] == "l1"
    assert "sodium_mg" in body["bounds"]


def test_diet_region_with_intake_and_session(client):
    groups = client.post("/v1/diet/region", json={}).json()["groups"]
    buf = io.StringIO()
    writer = csv.writer(buf)
    writer.writerow(groups)  # names may contain commas; quote properly
    writer.writerow(["1"] * len(groups))
    intake = buf.getvalue()
    res = client.post("/v1/diet/region",
                      json={"intake_csv": intake})
    assert res.status_code == 200
    body = res.json()
    created = client.post("/v1/sessions",
                          json={"problem": body["problem"],
                                "row_names": body["row_names"],
                                "diet_regimen": "dash-women-51"})
    assert created.status_code == 201
    step = created.json()["step"]
    assert len(step["point"]) == 38
    assert "nutrients" in step
    assert "sodium_mg" in step["nutrients"]


def test_diet_region_bad_intake_422(client):
    res = client.post("/v1/diet/region",
                      json={"intake_csv": "NotAGroup\n1\n"})
    assert res.status_code == 422
    assert res.json()["detail"]["code"] == "invalid-intake"


def test_unknown_regimen_422(client):
    res = client.post("/v1/diet/region", json={"regimen": "no-such"})
    assert res.status_code == 422
