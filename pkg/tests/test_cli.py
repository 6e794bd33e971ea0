import json
import signal
import socket
import subprocess
import sys
import time

import httpx
import pytest
from click.testing import CliRunner
from fastapi.testclient import TestClient

from pimproto import Rect, create_project
from pimproto.cli import main
from pimproto.formats import save_project
from pimproto.service import ServiceConfig, create_app

from corpus import merged_link_fixture


@pytest.fixture
def runner():
    return CliRunner()


def write_project(tmp_path, project, name="proj.pimproj"):
    path = tmp_path / name
    path.write_bytes(save_project(project))
    return str(path)


def project_with_island():
    p = create_project("Islands", project_id="p1")
    home = p.add_screen("Home")
    h = p.add_hotspot(home.id, Rect(0, 0, 0.25, 0.25))
    p.set_hotspot_link(home.id, h.id, home.id)
    p.add_screen("Lost")
    return p


class TestValidate:
    def test_clean_project(self, runner, tmp_path):
        path = write_project(tmp_path, merged_link_fixture())
        result = runner.invoke(main, ["validate", path])
        assert result.exit_code == 0
        assert "ok: Merged" in result.output

    def test_warnings_do_not_fail(self, runner, tmp_path):
        p = create_project("W", project_id="p1")
        home = p.add_screen("Home")
        p.add_hotspot(home.id, Rect(0, 0, 0.25, 0.25))  # unlinked
        result = runner.invoke(main, ["validate", write_project(tmp_path, p)])
        assert result.exit_code == 0
        assert "UnlinkedHotspot" in result.output

    def test_corrupt_file_fails(self, runner, tmp_path):
        path = tmp_path / "bad.pimproj"
        path.write_bytes(b"{nope")
        result = runner.invoke(main, ["validate", str(path)])
        assert result.exit_code == 1
        assert "ParseError" in result.stderr


class TestConvert:
    def test_writes_pim_file(self, runner, tmp_path):
        path = write_project(tmp_path, merged_link_fixture())
        out = tmp_path / "out.pim"
        result = runner.invoke(main, ["convert", path, "-o", str(out)])
        assert result.exit_code == 0
        assert out.read_bytes().startswith(b"pim Merged\ninitial A\n")

    def test_empty_project_exit_1(self, runner, tmp_path):
        path = write_project(tmp_path, create_project("E", project_id="p1"))
        result = runner.invoke(main, ["convert", path])
        assert result.exit_code == 1
        assert "EmptyProject" in result.stderr

    def test_missing_file_usage_error(self, runner):
        result = runner.invoke(main, ["convert", "absent.pimproj"])
        assert result.exit_code == 2


class TestAnalyze:
    def test_unreachable_screen_exits_1(self, runner, tmp_path):
        path = write_project(tmp_path, project_with_island())
        result = runner.invoke(main, ["analyze", path])
        assert result.exit_code == 1
        assert "unreachable: Lost" in result.output

    def test_reachable_project_exits_0(self, runner, tmp_path):
        path = write_project(tmp_path, merged_link_fixture())
        result = runner.invoke(main, ["analyze", path])
        assert result.exit_code == 0

    def test_gate_check(self, runner, tmp_path):
        p = create_project("G", project_id="p1")
        a = p.add_screen("A")
        b = p.add_screen("B")
        c = p.add_screen("C")
        h1 = p.add_hotspot(a.id, Rect(0, 0, 0.25, 0.25))
        p.set_hotspot_link(a.id, h1.id, b.id)
        h2 = p.add_hotspot(b.id, Rect(0, 0, 0.25, 0.25))
        p.set_hotspot_link(b.id, h2.id, c.id)
        path = write_project(tmp_path, p)
        result = runner.invoke(main, ["analyze", path, "--gate", "B", "--target", "C"])
        assert result.exit_code == 0
        assert "holds" in result.output

    def test_gate_without_target_usage_error(self, runner, tmp_path):
        path = write_project(tmp_path, merged_link_fixture())
        result = runner.invoke(main, ["analyze", path, "--gate", "B"])
        assert result.exit_code == 2


class TestGenTests:
    def test_text_listing(self, runner, tmp_path):
        path = write_project(tmp_path, merged_link_fixture())
        result = runner.invoke(main, ["gen-tests", path])
        assert result.exit_code == 0
        assert "t1: A -I_B-> B" in result.output

    def test_json_deterministic(self, runner, tmp_path):
        path = write_project(tmp_path, merged_link_fixture())
        first = runner.invoke(main, ["gen-tests", path, "--format", "json"])
        second = runner.invoke(main, ["gen-tests", path, "--format", "json"])
        assert first.output == second.output
        assert json.loads(first.output)["tests"][0]["id"] == "t1"


class TestSimulate:
    def test_trace_to_final_state(self, runner, tmp_path):
        path = write_project(tmp_path, merged_link_fixture())
        result = runner.invoke(main, ["simulate", path, "--trace", "I_B"])
        assert result.exit_code == 0
        assert "final: B" in result.output

    def test_bad_behaviour_exit_1(self, runner, tmp_path):
        path = write_project(tmp_path, merged_link_fixture())
        result = runner.invoke(main, ["simulate", path, "--trace", "I_Z"])
        assert result.exit_code == 1
        assert "BehaviourNotEnabled" in result.stderr


class TestExportDot:
    def test_writes_dot(self, runner, tmp_path):
        path = write_project(tmp_path, merged_link_fixture())
        result = runner.invoke(main, ["export-dot", path])
        assert result.exit_code == 0
        assert result.output.count("->") == 1


def test_serve_honours_environment(tmp_path):
    """Full-process smoke test: PIMP_PORT / PIMP_DATA_DIR drive the server."""
    with socket.create_server(("127.0.0.1", 0)) as probe:
        port = probe.getsockname()[1]
    proc = subprocess.Popen(
        [sys.executable, "-m", "pimproto.cli", "serve"],
        env={"PATH": "/usr/bin:/bin", "PIMP_PORT": str(port),
             "PIMP_DATA_DIR": str(tmp_path / "data")},
        stdout=subprocess.DEVNULL, stderr=subprocess.DEVNULL)
    try:
        base = f"http://127.0.0.1:{port}"
        deadline = time.time() + 15
        while True:
            try:
                assert httpx.get(f"{base}/healthz").json() == {"status": "ok"}
                break
            except httpx.HTTPError:
                assert time.time() < deadline, "server never came up"
                time.sleep(0.1)
        created = httpx.post(f"{base}/projects", json={"name": "EnvTest"})
        assert created.status_code == 201
    finally:
        proc.send_signal(signal.SIGINT)
        proc.wait(timeout=10)
    assert (tmp_path / "data" / "projects").exists()


class TestSharedCorePayloads:
    """CLI --format json output must equal the HTTP payload byte for byte."""

    @pytest.fixture
    def served_project(self, tmp_path):
        project = project_with_island()
        data_dir = tmp_path / "data"
        (data_dir / "projects").mkdir(parents=True)
        (data_dir / "projects" / f"{project.id}.pimproj").write_bytes(
            save_project(project))
        client = TestClient(create_app(ServiceConfig(data_dir=data_dir)))
        path = write_project(tmp_path, project)
        return client, path, project.id

    def test_analysis_payload(self, runner, served_project):
        client, path, pid = served_project
        cli = runner.invoke(main, ["analyze", path, "--format", "json"])
        http = client.get(f"/projects/{pid}/analysis")
        assert cli.output.encode() == http.content

    def test_tests_payload(self, runner, served_project):
        client, path, pid = served_project
        cli = runner.invoke(main, ["gen-tests", path, "--format", "json"])
        http = client.get(f"/projects/{pid}/tests")
        assert cli.output.encode() == http.content

    def test_convert_payload(self, runner, served_project):
        client, path, pid = served_project
        cli = runner.invoke(main, ["convert", path, "--format", "json"])
        http = client.post(f"/projects/{pid}/convert")
        assert cli.output.encode() == http.content
