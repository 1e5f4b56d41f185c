"""Session service: lifecycle, stepping, isolation, error payloads."""

import threading

import pytest
from fastapi.testclient import TestClient

from haskelite.service import create_app

from helpers import run_trace

INSERT = (
    "insert x [] = [x]\n"
    "insert x (y:ys) | x<=y = x:y:ys\n"
    "                | otherwise = y:insert x ys\n"
)


@pytest.fixture()
def client():
    return TestClient(create_app())


def create(client, program=INSERT, expr="insert 3 [1,2,4]", **options):
    body = {"program": program, "expr": expr}
    if options:
        body["options"] = options
    return client.post("/sessions", json=body)


class TestLifecycle:
    def test_create_returns_initial_entry(self, client):
        r = create(client)
        assert r.status_code == 201
        body = r.json()
        assert body["entry"]["rendered"] == "insert 3 [1, 2, 4]"
        assert body["id"]

    def test_step_to_completion(self, client):
        sid = create(client).json()["id"]
        r = client.post(f"/sessions/{sid}/step", json={"n": 100})
        body = r.json()
        assert body["status"] == "done"
        js = [e["justification"] for e in body["entries"]]
        assert js[-1] == "final result"
        assert len(js) == 7

    def test_step_after_done_is_idempotent(self, client):
        sid = create(client).json()["id"]
        client.post(f"/sessions/{sid}/step", json={"n": 100})
        r = client.post(f"/sessions/{sid}/step", json={"n": 5})
        assert r.json() == {"entries": [], "status": "done"}

    def test_get_trace_is_a_prefix(self, client):
        sid = create(client).json()["id"]
        client.post(f"/sessions/{sid}/step", json={"n": 2})
        r = client.get(f"/sessions/{sid}/trace")
        partial = [e["justification"] for e in r.json()["entries"]]
        client.post(f"/sessions/{sid}/step", json={"n": 100})
        full = [e["justification"] for e in client.get(f"/sessions/{sid}/trace").json()["entries"]]
        assert full[: len(partial)] == partial

    def test_delete_then_step_is_404(self, client):
        sid = create(client).json()["id"]
        assert client.delete(f"/sessions/{sid}").status_code == 204
        assert client.post(f"/sessions/{sid}/step", json={"n": 1}).status_code == 404
        assert client.delete(f"/sessions/{sid}").status_code == 404

    def test_unknown_session(self, client):
        assert client.post("/sessions/nope/step", json={"n": 1}).status_code == 404


class TestDiagnostics:
    def test_type_error_is_422(self, client):
        r = create(client, program="f x = x + True\n", expr="f 1")
        assert r.status_code == 422
        body = r.json()
        assert body["kind"] == "type"
        assert "cannot match" in body["message"]

    def test_syntax_error_is_422_with_position(self, client):
        r = create(client, program="f x = (\n", expr="f 1")
        assert r.status_code == 422
        assert r.json()["kind"] == "syntax"
        assert r.json()["line"] is not None

    def test_empty_expression_is_422(self, client):
        r = create(client, expr="")
        assert r.status_code == 422
        assert r.json()["kind"] == "syntax"


class TestAgreementWithCli:
    def test_session_entries_equal_batch_trace(self, client):
        sid = create(client).json()["id"]
        collected = []
        while True:
            batch = client.post(f"/sessions/{sid}/step", json={"n": 2}).json()
            collected.extend(batch["entries"])
            if batch["status"] != "running" or not batch["entries"]:
                break
        entries, _ = run_trace(INSERT, "insert 3 [1,2,4]")
        batch_json = [e.to_json() for e in entries[1:]]
        assert collected == batch_json


class TestIsolation:
    def test_interleaved_sessions_do_not_interfere(self, client):
        a = create(client, program="f x = x + 1\n", expr="f 1").json()["id"]
        b = create(client, program="f x = x * 2\n", expr="f 1").json()["id"]
        out_a = []
        out_b = []
        for _ in range(20):
            out_a.extend(client.post(f"/sessions/{a}/step", json={"n": 1}).json()["entries"])
            out_b.extend(client.post(f"/sessions/{b}/step", json={"n": 1}).json()["entries"])
        assert out_a[-1]["rendered"] == "2"
        assert out_b[-1]["rendered"] == "2"
        assert any(e["justification"] == "1 + 1 = 2" for e in out_a)
        assert any(e["justification"] == "1 * 2 = 2" for e in out_b)


class TestLimits:
    def test_max_entries_caps_a_session(self, client):
        sid = create(
            client,
            program="spin n = spin (n+1)\n",
            expr="spin 0",
            max_entries=5,
            fuel=100_000,
        ).json()["id"]
        total = 1  # the initial entry
        for _ in range(10):
            batch = client.post(f"/sessions/{sid}/step", json={"n": 10}).json()
            total += len(batch["entries"])
            if not batch["entries"]:
                break
        assert total <= 5


class TestForce:
    def test_force_resumes_a_whnf_session(self, client):
        sid = create(client, force=False).json()["id"]
        r = client.post(f"/sessions/{sid}/step", json={"n": 100})
        assert r.json()["status"] == "done"
        partial = [e["justification"] for e in r.json()["entries"]]
        assert "final result" not in partial

        assert client.post(f"/sessions/{sid}/force").json()["status"] == "running"
        r = client.post(f"/sessions/{sid}/step", json={"n": 100})
        assert r.json()["status"] == "done"
        resumed = partial + [e["justification"] for e in r.json()["entries"]]

        full, _ = run_trace(INSERT, "insert 3 [1,2,4]")
        assert resumed == [e.justification for e in full[1:]]

    def test_force_on_unknown_session(self, client):
        assert client.post("/sessions/zzz/force").status_code == 404


class TestConcurrencyControl:
    def test_step_while_busy_gets_409(self):
        app = create_app()
        client = TestClient(app)
        sid = create(client).json()["id"]
        session = app.state.store.get(sid)
        # simulate an in-flight step holding the session
        assert session.lock.acquire(blocking=False)
        try:
            assert client.post(f"/sessions/{sid}/step", json={"n": 1}).status_code == 409
            assert client.post(f"/sessions/{sid}/force").status_code == 409
        finally:
            session.lock.release()
        assert client.post(f"/sessions/{sid}/step", json={"n": 1}).status_code == 200

    def test_idle_sessions_are_evicted(self):
        app = create_app(idle_timeout=0.0)
        client = TestClient(app)
        sid = create(client).json()["id"]
        # any later request sweeps idle sessions
        assert client.post(f"/sessions/{sid}/step", json={"n": 1}).status_code == 404
