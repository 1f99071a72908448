import numpy as np
import pytest

from mfebin.raster import save_image, save_mask
from mfebin.synthetic import degraded_page


def write_corpus(root, seeds, size=(256, 256), rgb=False, maker=degraded_page):
    """Write ``root/inputs`` and ``root/gt`` for the given synthetic seeds."""
    (root / "inputs").mkdir(parents=True, exist_ok=True)
    (root / "gt").mkdir(parents=True, exist_ok=True)
    for s in seeds:
        if maker is degraded_page:
            img, gt = maker(s, size[0], size[1], rgb=rgb)
        else:
            img, gt = maker(s, size[0], size[1])
        save_image(img, root / "inputs" / f"p{s:04d}.png")
        save_mask(gt, root / "gt" / f"p{s:04d}.png")
    return root


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def corpus(tmp_path):
    return write_corpus(tmp_path / "corpus", range(3))


def pytest_terminal_summary(terminalreporter):
    mod = __import__("sys").modules.get("test_acceptance")
    if mod is None or not getattr(mod, "RESULTS", None):
        return
    terminalreporter.section("acceptance criteria")
    for line in mod.RESULTS:
        terminalreporter.write_line(line)
