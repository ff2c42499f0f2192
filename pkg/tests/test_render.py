import re
import xml.etree.ElementTree as ET

import numpy as np
import pytest

from emoswarm import engine
from emoswarm.geometry import Domain
from emoswarm.render import default_trail_ids, frame_data, frame_steps, frame_svg, render_frames

UNIT = Domain.from_size(1.0, 1.0)
SVG = "{http://www.w3.org/2000/svg}"


@pytest.fixture(scope="module")
def short_log():
    return engine.run(engine.default_spec("surprise", UNIT), 6, UNIT, 4.0, 0.01, 0)


class TestFrames:
    def test_frame_count(self, tmp_path, short_log):
        assert len(short_log.times) == 401
        paths = render_frames(short_log, tmp_path / "frames", 100)
        assert len(paths) == 5
        assert sorted(p.name for p in (tmp_path / "frames").iterdir()) == [p.name for p in paths]

    def test_steps(self):
        assert frame_steps(401, 100) == [0, 100, 200, 300, 400]
        with pytest.raises(ValueError):
            frame_steps(10, 0)

    def test_valid_svg_with_robots_and_trails(self, short_log):
        root = ET.fromstring(frame_svg(frame_data(short_log, 200)))
        robots = root.findall(f"{SVG}g[@class='robot']")
        trails = root.findall(f"{SVG}polyline[@class='trail']")
        assert len(robots) == 6
        assert {t.get("data-robot") for t in trails} == {str(i) for i in default_trail_ids(6)}

    def test_no_trails(self, short_log):
        text = frame_svg(frame_data(short_log, 200, trail_ids=[]))
        assert 'class="trail"' not in text
        assert text.count('class="robot"') == 6

    def test_trail_ids(self):
        assert default_trail_ids(15) == [0, 4, 7, 10, 14]
        assert default_trail_ids(3) == [0, 1, 2]
        assert default_trail_ids(10, 0) == []

    def test_heading_drawn_as_rotation(self, short_log):
        text = frame_svg(frame_data(short_log, 0, []))
        angles = [float(a) for a in re.findall(r"rotate\(([-0-9.]+)\)", text)]
        np.testing.assert_allclose(angles, -np.degrees(short_log.poses[0, :, 2]), atol=0.01)


def test_happiness_frame_in_annulus(default_run):
    log = default_run("happiness")
    spec = engine.default_spec("happiness", UNIT)
    frame = frame_data(log, len(log.times) - 1)
    assert frame.t == pytest.approx(4.0)
    c = spec.contour
    tube = 0.05 * c.R
    r = np.hypot(*(frame.poses[:, :2] - 0.5).T)
    assert np.all((r >= c.R - c.A - tube) & (r <= c.R + c.A + tube))
