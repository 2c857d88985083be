import os
from pathlib import Path

import pytest

from spinmca import kernels

DATA_ROOT = Path(os.environ.get("SPINMCA_DATA", "/root/data"))
MNIST_DIR = DATA_ROOT / "mnist"
CIFAR_DIR = DATA_ROOT / "cifar-10-batches-bin"

# criterion id -> (passed, detail); filled by test_acceptance.py
ACCEPTANCE = {}


@pytest.fixture(params=sorted(kernels.backends()))
def backend(request):
    return kernels.backends()[request.param]


def require_dir(path, files):
    missing = [f for f in files if not (path / f).exists() and not (path / (f + ".gz")).exists()]
    if missing:
        pytest.skip(f"dataset files not found under {path}: {', '.join(missing)}")
    return path


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE, key=lambda k: int(k.split("-")[1])):
        ok, detail = ACCEPTANCE[key]
        terminalreporter.write_line(f"[{'PASS' if ok else 'FAIL'}] {key}: {detail}")
