"""Shared fixtures: a real HTTP instance of the service."""

from __future__ import annotations

import socket
import threading
import time

import pytest
import uvicorn

from forethought.service import create_app


@pytest.fixture(scope="session")
def live_server():
    """Serve the app on a loopback port for client-contract tests."""
    app = create_app()
    with socket.socket() as probe:
        probe.bind(("127.0.0.1", 0))
        port = probe.getsockname()[1]
    server = uvicorn.Server(
        uvicorn.Config(app, host="127.0.0.1", port=port, log_level="warning")
    )
    thread = threading.Thread(target=server.run, daemon=True)
    thread.start()
    deadline = time.time() + 10
    while not server.started:
        if time.time() > deadline:
            pytest.fail("service did not start within 10 s")
        time.sleep(0.02)
    yield f"http://127.0.0.1:{port}"
    server.should_exit = True
    thread.join(timeout=5)
