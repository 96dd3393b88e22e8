import io

import numpy as np
import pytest
from PIL import Image, ImageDraw

from recomb.providers import stub_bundle
from recomb.service import BoardStore, ServiceConfig, create_app


def make_image(side: int = 512, seed: int = 0) -> bytes:
    """Deterministic PNG with a few colored shapes, for pipeline inputs."""
    rng = np.random.default_rng(seed)
    img = Image.new("RGB", (side, side), (245, 242, 235))
    draw = ImageDraw.Draw(img)
    for _ in range(5):
        x, y = rng.integers(0, side - 80, size=2)
        w, h = rng.integers(40, 160, size=2)
        color = tuple(int(c) for c in rng.integers(30, 220, size=3))
        if rng.random() < 0.5:
            draw.rectangle([int(x), int(y), int(x + w), int(y + h)], fill=color)
        else:
            draw.ellipse([int(x), int(y), int(x + w), int(y + h)], fill=color)
    buf = io.BytesIO()
    img.save(buf, format="PNG")
    return buf.getvalue()


@pytest.fixture
def bundle():
    return stub_bundle(seed=7)


@pytest.fixture
def sample_image():
    return make_image(seed=3)


@pytest.fixture
def store(tmp_path):
    return BoardStore(tmp_path / "data")


@pytest.fixture
def client(store, bundle):
    from fastapi.testclient import TestClient

    app = create_app(store, bundle, ServiceConfig())
    with TestClient(app) as test_client:
        yield test_client
