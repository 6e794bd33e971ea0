import os
import socket
import threading

import pytest
from fastapi.testclient import TestClient

from pimproto.errors import DataDirUnwritable, PortInUse
from pimproto.service import (
    ProjectStore,
    ServiceConfig,
    SessionRegistry,
    build_server,
    check_data_dir,
    create_app,
)
from pimproto import create_project

from test_images import png_bytes


@pytest.fixture
def client(tmp_path):
    app = create_app(ServiceConfig(data_dir=tmp_path / "data"))
    with TestClient(app) as c:
        yield c


def make_project(client, name="Demo"):
    return client.post("/projects", json={"name": name}).json()


def merged_fixture_via_api(client):
    """create project -> screens -> hotspots: the one-transition shape."""
    project = make_project(client)
    pid = project["id"]
    a = client.post(f"/projects/{pid}/screens", json={"name": "A"}).json()
    b = client.post(f"/projects/{pid}/screens", json={"name": "B"}).json()
    for x in (0.0, 0.5):
        h = client.post(f"/projects/{pid}/screens/{a['id']}/hotspots",
                        json={"rect": {"x": x, "y": 0.0, "w": 0.25, "h": 0.25}}).json()
        r = client.patch(f"/projects/{pid}/screens/{a['id']}/hotspots/{h['id']}",
                         json={"link_target": b["id"]})
        assert r.status_code == 200
    return pid, a, b


class TestProjects:
    def test_healthz(self, client):
        assert client.get("/healthz").json() == {"status": "ok"}

    def test_create_and_get(self, client):
        project = make_project(client)
        got = client.get(f"/projects/{project['id']}").json()
        assert got["name"] == "Demo"
        assert got["screens"] == []

    def test_list(self, client):
        make_project(client, "One")
        make_project(client, "Two")
        names = {p["name"] for p in client.get("/projects").json()}
        assert names == {"One", "Two"}

    def test_delete(self, client):
        project = make_project(client)
        assert client.delete(f"/projects/{project['id']}").status_code == 204
        r = client.get(f"/projects/{project['id']}")
        assert r.status_code == 404
        assert r.json()["code"] == "NotFound"

    def test_empty_name(self, client):
        r = client.post("/projects", json={"name": "  "})
        assert r.status_code == 422
        assert r.json()["code"] == "EmptyName"

    def test_unknown_body_field_rejected(self, client):
        r = client.post("/projects", json={"name": "x", "surprise": 1})
        assert r.status_code == 422
        assert r.json()["code"] == "BadRequest"


class TestScreensAndHotspots:
    def test_add_screen_sets_initial(self, client):
        project = make_project(client)
        pid = project["id"]
        screen = client.post(f"/projects/{pid}/screens", json={"name": "Home"}).json()
        assert client.get(f"/projects/{pid}").json()["initial_screen"] == screen["id"]

    def test_duplicate_screen_conflict(self, client):
        pid = make_project(client)["id"]
        client.post(f"/projects/{pid}/screens", json={"name": "Home"})
        r = client.post(f"/projects/{pid}/screens", json={"name": "Home"})
        assert r.status_code == 409
        assert r.json()["code"] == "DuplicateScreenName"

    def test_patch_screen_rename_and_initial(self, client):
        pid = make_project(client)["id"]
        client.post(f"/projects/{pid}/screens", json={"name": "Home"})
        other = client.post(f"/projects/{pid}/screens", json={"name": "Other"}).json()
        r = client.patch(f"/projects/{pid}/screens/{other['id']}",
                         json={"name": "Settings", "initial": True})
        assert r.json()["name"] == "Settings"
        assert client.get(f"/projects/{pid}").json()["initial_screen"] == other["id"]

    def test_invalid_rect_maps_to_422(self, client):
        pid = make_project(client)["id"]
        screen = client.post(f"/projects/{pid}/screens", json={"name": "Home"}).json()
        h = client.post(f"/projects/{pid}/screens/{screen['id']}/hotspots",
                        json={"rect": {"x": 0.1, "y": 0.1, "w": 0.2, "h": 0.2}}).json()
        r = client.patch(f"/projects/{pid}/screens/{screen['id']}/hotspots/{h['id']}",
                         json={"rect": {"x": 0.9, "y": 0.9, "w": 0.5, "h": 0.5}})
        assert r.status_code == 422
        assert r.json()["code"] == "InvalidRect"

    def test_hotspot_crud(self, client):
        pid = make_project(client)["id"]
        a = client.post(f"/projects/{pid}/screens", json={"name": "A"}).json()
        b = client.post(f"/projects/{pid}/screens", json={"name": "B"}).json()
        h = client.post(f"/projects/{pid}/screens/{a['id']}/hotspots",
                        json={"rect": {"x": 0, "y": 0, "w": 0.5, "h": 0.5},
                              "name": "go"}).json()
        assert h["name"] == "go"
        patched = client.patch(
            f"/projects/{pid}/screens/{a['id']}/hotspots/{h['id']}",
            json={"link_target": b["id"], "s_behaviours": ["S_beep"]}).json()
        assert patched["link_target"] == b["id"]
        assert patched["s_behaviours"] == ["S_beep"]
        # clearing the link with an explicit null
        cleared = client.patch(
            f"/projects/{pid}/screens/{a['id']}/hotspots/{h['id']}",
            json={"link_target": None}).json()
        assert cleared["link_target"] is None
        assert client.delete(
            f"/projects/{pid}/screens/{a['id']}/hotspots/{h['id']}").status_code == 204

    def test_delete_screen_reports_affected(self, client):
        pid, a, b = merged_fixture_via_api(client)
        r = client.delete(f"/projects/{pid}/screens/{b['id']}")
        assert r.status_code == 200
        assert len(r.json()["affected_hotspots"]) == 2

    def test_unknown_ids_are_404(self, client):
        pid = make_project(client)["id"]
        assert client.patch(f"/projects/{pid}/screens/s404",
                            json={"name": "x"}).status_code == 404
        assert client.post(f"/projects/{pid}/screens/s404/hotspots",
                           json={"rect": {"x": 0, "y": 0, "w": 0.1, "h": 0.1}}
                           ).status_code == 404


class TestImages:
    def test_upload_and_fetch(self, client):
        pid = make_project(client)["id"]
        data = png_bytes()
        r = client.post(f"/projects/{pid}/images", content=data,
                        headers={"Content-Type": "image/png"})
        assert r.status_code == 201
        ref = r.json()
        assert (ref["width"], ref["height"]) == (20, 10)
        got = client.get(f"/projects/{pid}/images/{ref['content_hash']}")
        assert got.content == data
        assert got.headers["content-type"].startswith("image/png")

    def test_attach_to_screen(self, client):
        pid = make_project(client)["id"]
        ref = client.post(f"/projects/{pid}/images", content=png_bytes(),
                          headers={"Content-Type": "image/png"}).json()
        screen = client.post(f"/projects/{pid}/screens",
                             json={"name": "Home", "image": ref["content_hash"]}).json()
        assert screen["image"]["content_hash"] == ref["content_hash"]

    def test_unsupported_content_type(self, client):
        pid = make_project(client)["id"]
        r = client.post(f"/projects/{pid}/images", content=b"x",
                        headers={"Content-Type": "application/octet-stream"})
        assert r.status_code == 415
        assert r.json()["code"] == "UnsupportedMediaType"

    def test_too_large(self, tmp_path):
        app = create_app(ServiceConfig(data_dir=tmp_path / "d", max_image_bytes=64))
        with TestClient(app) as client:
            pid = make_project(client)["id"]
            r = client.post(f"/projects/{pid}/images", content=png_bytes(100, 100),
                            headers={"Content-Type": "image/png"})
            assert r.status_code == 413

    def test_unknown_image_hash_on_screen(self, client):
        pid = make_project(client)["id"]
        r = client.post(f"/projects/{pid}/screens",
                        json={"name": "Home", "image": "f" * 64})
        assert r.status_code == 404
        assert r.json()["code"] == "UnknownImage"


class TestModelEndpoints:
    def test_convert_merged_fixture_has_one_transition(self, client):
        pid, _, _ = merged_fixture_via_api(client)
        report = client.post(f"/projects/{pid}/convert").json()
        assert len(report["pim"]["transitions"]) == 1
        assert report["pim"]["transitions"][0]["behaviour"] == "I_B"

    def test_convert_empty_project(self, client):
        pid = make_project(client)["id"]
        r = client.post(f"/projects/{pid}/convert")
        assert r.status_code == 422
        assert r.json()["code"] == "EmptyProject"

    def test_analysis(self, client):
        pid, _, _ = merged_fixture_via_api(client)
        client.post(f"/projects/{pid}/screens", json={"name": "Lost"})
        report = client.get(f"/projects/{pid}/analysis").json()
        assert report["unreachable"] == ["Lost"]

    def test_tests_endpoint(self, client):
        pid, _, _ = merged_fixture_via_api(client)
        suite = client.get(f"/projects/{pid}/tests").json()
        assert len(suite["tests"]) == 1
        assert suite["tests"][0]["steps"] == [["A", "I_B", "B"]]

    def test_exports(self, client):
        pid, _, _ = merged_fixture_via_api(client)
        dot = client.get(f"/projects/{pid}/export.dot")
        assert dot.text.count("->") == 1
        pim = client.get(f"/projects/{pid}/export.pim")
        assert pim.text.startswith("pim Demo\ninitial A\n")


class TestSessions:
    def test_click_navigates(self, client):
        pid, a, b = merged_fixture_via_api(client)
        session = client.post(f"/projects/{pid}/sessions").json()
        assert session["current"] == "A"
        r = client.post(f"/sessions/{session['id']}/click",
                        json={"x": 0.1, "y": 0.1}).json()
        assert r["event"]["kind"] == "Navigate"
        assert r["session"]["current"] == "B"
        assert r["session"]["screen_id"] == b["id"]

    def test_click_miss_returns_null_event(self, client):
        pid, _, _ = merged_fixture_via_api(client)
        session = client.post(f"/projects/{pid}/sessions").json()
        r = client.post(f"/sessions/{session['id']}/click",
                        json={"x": 0.9, "y": 0.9}).json()
        assert r["event"] is None
        assert r["session"]["trace"] == []

    def test_step_and_reset(self, client):
        pid, _, _ = merged_fixture_via_api(client)
        sid = client.post(f"/projects/{pid}/sessions").json()["id"]
        stepped = client.post(f"/sessions/{sid}/step",
                              json={"behaviour": "I_B"}).json()
        assert stepped["session"]["current"] == "B"
        reset = client.post(f"/sessions/{sid}/reset").json()
        assert reset["session"]["current"] == "A"
        trace = client.get(f"/sessions/{sid}").json()["trace"]
        assert [e["kind"] for e in trace] == ["Navigate", "Reset"]

    def test_step_not_enabled(self, client):
        pid, _, _ = merged_fixture_via_api(client)
        sid = client.post(f"/projects/{pid}/sessions").json()["id"]
        r = client.post(f"/sessions/{sid}/step", json={"behaviour": "I_Zed"})
        assert r.status_code == 409
        assert r.json()["code"] == "BehaviourNotEnabled"

    def test_session_isolated_from_edits(self, client):
        pid, a, b = merged_fixture_via_api(client)
        sid = client.post(f"/projects/{pid}/sessions").json()["id"]
        client.delete(f"/projects/{pid}/screens/{b['id']}")
        r = client.post(f"/sessions/{sid}/step", json={"behaviour": "I_B"}).json()
        assert r["session"]["current"] == "B"

    def test_unknown_session(self, client):
        assert client.get("/sessions/nope").status_code == 404


def test_session_registry_expiry():
    clock = [0.0]
    registry = SessionRegistry(ttl=10.0, clock=lambda: clock[0])
    project = create_project("P")
    project.add_screen("Home")
    session = registry.create(project)
    clock[0] = 5.0
    registry.use(session.id, lambda s: None)  # refreshes idle timer
    clock[0] = 14.0
    registry.use(session.id, lambda s: None)
    clock[0] = 30.0
    with pytest.raises(Exception) as err:
        registry.use(session.id, lambda s: None)
    assert getattr(err.value, "code", "") == "NotFound"


def test_projects_survive_restart(tmp_path):
    data_dir = tmp_path / "data"
    with TestClient(create_app(ServiceConfig(data_dir=data_dir))) as client:
        pid = merged_fixture_via_api(client)[0]
    with TestClient(create_app(ServiceConfig(data_dir=data_dir))) as client:
        project = client.get(f"/projects/{pid}").json()
        assert [s["name"] for s in project["screens"]] == ["A", "B"]


def test_crash_during_save_leaves_no_torn_file(tmp_path, monkeypatch):
    data_dir = tmp_path / "data"
    app = create_app(ServiceConfig(data_dir=data_dir))
    with TestClient(app, raise_server_exceptions=False) as client:
        pid = make_project(client)["id"]
        client.post(f"/projects/{pid}/screens", json={"name": "Home"})

        real_replace = os.replace

        def exploding_replace(src, dst):
            if str(dst).endswith(".pimproj"):
                raise OSError("simulated crash before rename")
            return real_replace(src, dst)

        monkeypatch.setattr(os, "replace", exploding_replace)
        r = client.post(f"/projects/{pid}/screens", json={"name": "Torn"})
        assert r.status_code == 500
        monkeypatch.undo()

    store = ProjectStore(data_dir)  # restart: file must parse cleanly
    project = store.read(pid, lambda p: p)
    assert [s.name for s in project.screens] == ["Home"]


def test_cors_allows_browser_frontends(client):
    r = client.get("/healthz", headers={"Origin": "http://localhost:5173"})
    assert r.headers.get("access-control-allow-origin") == "*"
    preflight = client.options("/projects", headers={
        "Origin": "http://localhost:5173",
        "Access-Control-Request-Method": "POST",
        "Access-Control-Request-Headers": "content-type",
    })
    assert preflight.status_code == 200


def test_taken_port_fails_fast(tmp_path):
    blocker = socket.create_server(("127.0.0.1", 0))
    port = blocker.getsockname()[1]
    try:
        with pytest.raises(PortInUse):
            build_server(ServiceConfig(data_dir=tmp_path / "d", port=port))
    finally:
        blocker.close()


def test_unwritable_data_dir(tmp_path):
    blocking_file = tmp_path / "not-a-dir"
    blocking_file.write_bytes(b"")
    with pytest.raises(DataDirUnwritable):
        check_data_dir(blocking_file / "data")


def test_concurrent_patches_linearize(client):
    pid, a, _ = merged_fixture_via_api(client)
    h = client.post(f"/projects/{pid}/screens/{a['id']}/hotspots",
                    json={"rect": {"x": 0.0, "y": 0.5, "w": 0.25, "h": 0.25}}).json()
    url = f"/projects/{pid}/screens/{a['id']}/hotspots/{h['id']}"
    results = {}

    def patch(name):
        results[name] = client.patch(url, json={"name": name}).status_code

    threads = [threading.Thread(target=patch, args=(n,)) for n in ("left", "right")]
    for t in threads:
        t.start()
    for t in threads:
        t.join()
    assert set(results.values()) == {200}
    final = client.get(f"/projects/{pid}").json()
    names = {hs["name"] for s in final["screens"] for hs in s["hotspots"]}
    assert names & {"left", "right"}
