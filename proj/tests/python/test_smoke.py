import math

import pytest

import xwalk


def test_distances():
    assert xwalk.deg_distance((0, 0), (3e-4, 4e-4)) == pytest.approx(5e-4, abs=1e-18)
    assert xwalk.approx_meters((0, 0), (1.5e-4, 0)) == pytest.approx(16.7, abs=1.0)


def test_polyline_round_trip():
    pts = xwalk.decode_polyline("_p~iF~ps|U_ulLnnqC_mqNvxq`@")
    assert pts == [(38.5, -120.2), (40.7, -120.95), (43.252, -126.453)]
    assert xwalk.encode_polyline(pts) == "_p~iF~ps|U_ulLnnqC_mqNvxq`@"
    assert xwalk.decode_polyline("??") == [(0.0, 0.0)]


def test_polyline_errors_map_to_python():
    with pytest.raises(xwalk.XwalkError, match="decode_error"):
        xwalk.decode_polyline("_")


def test_split_region_and_plan():
    assert len(xwalk.split_region((0, 0, 0.6, 0.3))) == 6
    line = [(0.0, 1e-4 * i) for i in range(43)]
    assert len(xwalk.plan_requests(line)) == 2


def test_sampler():
    out = xwalk.densify([(0, 0), (0, 4.5e-4)])
    assert len(out) == 4
    assert xwalk.dedupe([(0, 0), (0, 4e-6)]) == [(0.0, 0.0)]
    kept = xwalk.filter_candidates([(4e-4, 0), (1e-4, 0), (0, 7e-4)], [(0, 0)], (-1, -1, 1, 1))
    assert kept == [(4e-4, 0.0)]


def test_imagery():
    url = xwalk.build_tile_url((0, 0), "K")
    assert url.endswith("center=0.0000000,0.0000000&zoom=20&size=200x225&maptype=satellite&key=K")
    w, h = xwalk.coverage_meters(40.78)
    assert abs(w - 22.6) <= 2 and abs(h - 25.4) <= 2


def test_preprocess_png():
    np = pytest.importorskip("numpy")
    PIL = pytest.importorskip("PIL.Image")
    import io

    arr = (np.arange(225 * 200 * 3) % 251).astype("uint8").reshape(225, 200, 3)
    buf = io.BytesIO()
    PIL.fromarray(arr).save(buf, format="PNG")
    cropped = PIL.open(io.BytesIO(xwalk.preprocess_png(buf.getvalue())))
    assert cropped.size == (200, 200)
    assert (np.asarray(cropped.convert("RGB")) == arr[:200]).all()
    with pytest.raises(xwalk.XwalkError, match="shape_error"):
        small = io.BytesIO()
        PIL.fromarray(arr[:200]).save(small, format="PNG")
        xwalk.preprocess_png(small.getvalue())


def test_splits_and_metrics():
    assert xwalk.split_counts(11) == (8, 1, 2)
    acc, f1 = xwalk.confusion_metrics(40, 10, 40, 10)
    assert math.isclose(acc, 0.8) and math.isclose(f1, 0.8)
    with pytest.raises(xwalk.XwalkError):
        xwalk.confusion_metrics(0, 0, 5, 0)
