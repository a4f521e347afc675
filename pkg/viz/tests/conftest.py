"""Shared fixtures: real artifacts produced by the simulator CLI.

The viz package consumes files only, so the fixtures shell out to the
producer exactly the way a user would and hand the resulting directories to
the tests."""

import subprocess
import sys

import pytest

PRODUCER = [sys.executable, "-m", "zollcut.cli"]


def run_producer(args, cwd):
    proc = subprocess.run(
        PRODUCER + list(args), capture_output=True, text=True, cwd=cwd
    )
    assert proc.returncode == 0, f"producer failed: {proc.stderr}"
    return proc


@pytest.fixture(scope="session")
def figure2_dir(tmp_path_factory):
    out = tmp_path_factory.mktemp("figure2")
    run_producer(
        ["figure2", "--grid", "120:120:-2:2:-2:2", "--out", str(out)], cwd=str(out)
    )
    return out


@pytest.fixture(scope="session")
def szego_report_paths(tmp_path_factory):
    base = tmp_path_factory.mktemp("szego")
    paths = []
    for n in (50, 100, 200, 400):
        out = base / f"n{n}"
        run_producer(["szego", "--N", str(n), "--out", str(out)], cwd=str(base))
        paths.append(out / "szego_report.json")
    return paths


@pytest.fixture(scope="session")
def other_report_path(tmp_path_factory):
    out = tmp_path_factory.mktemp("other")
    run_producer(["commutator", "--N", "50", "--out", str(out)], cwd=str(out))
    return out / "commutator_report.json"


@pytest.fixture(scope="session")
def origin_state_dir(tmp_path_factory):
    # Husimi grid of the lowest basis state: coherent center at the origin
    out = tmp_path_factory.mktemp("origin")
    run_producer(
        [
            "husimi",
            "--w-re", "0", "--w-im", "0",
            "--t", "0",
            "--N", "40",
            "--grid", "61:61:-2:2:-2:2",
            "--out", str(out),
        ],
        cwd=str(out),
    )
    return out
