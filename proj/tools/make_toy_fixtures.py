#!/usr/bin/env python3
"""Regenerates the bundled toy-city fixtures under fixtures/toy/.

Standalone on purpose: the query text, polyline encoding, densification and
band filter are re-implemented here so the recorded responses and the
expected negatives do not depend on the C++ code they are used to test.

Coordinates are integers in 1e-5 degree units throughout.
"""

import argparse
import hashlib
import json
import math
import pathlib
import struct
import zlib

UNIT = 1e-5
BASE_LAT = -2030000  # -20.30000
BASE_LON = -4030000  # -40.30000
SPACING = 15  # 1.5e-4
D_MIN, D_MAX = 30, 60  # 3e-4, 6e-4

OVERPASS = "https://overpass-api.de/api/interpreter"
DIRECTIONS = "https://maps.googleapis.com/maps/api/directions/json"
STATICMAP = "https://maps.googleapis.com/maps/api/staticmap"


def deg(u):
    return u / 1e5


def coord7(u):
    return f"{deg(u):.7f}"


def query_number(value):
    text = f"{value:.6f}".rstrip("0").rstrip(".")
    return "0" if text in ("-0", "") else text


# Three districts. Each street is a polyline (list of (lat, lon) units);
# crossings sit on the street at the listed vertices.
def districts():
    out = []
    # District 1: straight east-west street, one long gap between crossings.
    lat = BASE_LAT
    x0 = BASE_LON
    offsets = [4, 34, 64, 94, 124, 152, 180, 208, 236, 364]
    out.append({
        "name": "toy_north",
        "street": [(lat, x0), (lat, x0 + 370)],
        "crossings": [(lat, x0 + o) for o in offsets],
    })
    # District 2: straight street further south with a shorter open stretch.
    lat = BASE_LAT - 300
    offsets = [7, 37, 67, 97, 127, 157, 187, 217, 247, 353]
    out.append({
        "name": "toy_central",
        "street": [(lat, x0), (lat, x0 + 360)],
        "crossings": [(lat, x0 + o) for o in offsets],
    })
    # District 3: L-shaped street (east, then north) with the gap on the
    # northbound leg.
    lat = BASE_LAT - 600
    corner = (lat, x0 + 200)
    crossings = [(lat, x0 + o) for o in (7, 37, 67, 97, 127, 157, 187)]
    crossings += [(lat + 22, x0 + 200), (lat + 52, x0 + 200), (lat + 158, x0 + 200)]
    out.append({
        "name": "toy_south",
        "street": [(lat, x0), corner, (lat + 166, x0 + 200)],
        "crossings": crossings,
    })
    return out


def region_box(d):
    lats = [p[0] for p in d["street"]]
    lons = [p[1] for p in d["street"]]
    return (min(lats) - 50, min(lons) - 20, max(lats) + 50, max(lons) + 20)


def overpass_query(box):
    s, w, n, e = (query_number(deg(v)) for v in box)
    return f'[out:json];node["highway"="crossing"]({s},{w},{n},{e});out;'


def encode_value(v):
    v = ~(v << 1) if v < 0 else v << 1
    out = ""
    while v >= 0x20:
        out += chr((0x20 | (v & 0x1F)) + 63)
        v >>= 5
    return out + chr(v + 63)


def encode_polyline(points):
    out, plat, plon = "", 0, 0
    for lat, lon in points:
        out += encode_value(lat - plat) + encode_value(lon - plon)
        plat, plon = lat, lon
    return out


def nearest_neighbour_order(points):
    remaining = list(points)
    start = min(remaining, key=lambda p: (p[0], p[1]))
    chain = [start]
    remaining.remove(start)
    while remaining:
        cur = chain[-1]
        best = min(remaining, key=lambda p: math.hypot(p[0] - cur[0], p[1] - cur[1]))
        chain.append(best)
        remaining.remove(best)
    return chain


def directions_url(ordered):
    origin, dest, mids = ordered[0], ordered[-1], ordered[1:-1]
    url = f"{DIRECTIONS}?origin={coord7(origin[0])},{coord7(origin[1])}" \
          f"&destination={coord7(dest[0])},{coord7(dest[1])}"
    if mids:
        url += "&waypoints=" + "%7C".join(f"{coord7(a)},{coord7(b)}" for a, b in mids)
    return url


def densify_units(path):
    """Axis-aligned legs only, so interpolated points land on the unit grid."""
    out = []
    for (a_lat, a_lon), (b_lat, b_lon) in zip(path, path[1:]):
        length = abs(b_lat - a_lat) + abs(b_lon - a_lon)
        assert a_lat == b_lat or a_lon == b_lon, "toy streets are axis-aligned"
        out.append((a_lat, a_lon))
        k = 1
        while k * SPACING < length:
            t = k * SPACING
            out.append((a_lat + (t if b_lat > a_lat else -t if b_lat < a_lat else 0),
                        a_lon + (t if b_lon > a_lon else -t if b_lon < a_lon else 0)))
            k += 1
    out.append(path[-1])
    return out


def png_bytes(width, height, pixel):
    raw = bytearray()
    for y in range(height):
        raw.append(0)
        for x in range(width):
            raw.extend(pixel(x, y))

    def chunk(tag, data):
        body = tag + data
        return struct.pack(">I", len(data)) + body + struct.pack(">I", zlib.crc32(body) & 0xFFFFFFFF)

    header = struct.pack(">IIBBBBB", width, height, 8, 2, 0, 0, 0)
    return (b"\x89PNG\r\n\x1a\n" + chunk(b"IHDR", header) +
            chunk(b"IDAT", zlib.compress(bytes(raw), 9)) + chunk(b"IEND", b""))


def tile(lat, lon, striped):
    seed = int(hashlib.sha256(f"{lat},{lon}".encode()).hexdigest()[:8], 16)
    tint = seed % 40

    def pixel(x, y):
        if y >= 200:  # logo / copyright strip
            return (250, 250, 250) if (x // 10 + y) % 7 == 0 else (30, 30, 30)
        if 70 <= y < 130:  # road
            if striped and (x // 12) % 2 == 0 and 40 <= x < 160:
                return (235, 235, 235)
            return (90 + tint, 90 + tint, 95 + tint)
        return (40 + tint, 110 + (x * y) % 30, 40)

    return png_bytes(200, 225, pixel)


def write(root, service, material, body, status=None):
    key = hashlib.sha256(material.encode()).hexdigest()
    path = root / service / f"{key}.body"
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_bytes(body if isinstance(body, bytes) else body.encode())
    if status is not None:
        (root / service / f"{key}.status").write_text(f"{status}\n")


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out", default=str(pathlib.Path(__file__).resolve().parents[1] / "fixtures" / "toy"))
    args = parser.parse_args()
    root = pathlib.Path(args.out)
    root.mkdir(parents=True, exist_ok=True)

    ds = districts()
    next_id = 9_100_000_000
    all_crossings = []
    regions_csv = "# name,south,west,north,east\n"
    route_paths = []
    for i, d in enumerate(ds):
        box = region_box(d)
        regions_csv += f"{d['name']}," + ",".join(f"{deg(v):.5f}" for v in box) + "\n"
        elements = []
        for lat, lon in d["crossings"]:
            elements.append({"type": "node", "id": next_id, "lat": deg(lat), "lon": deg(lon),
                             "tags": {"highway": "crossing"}})
            all_crossings.append((lat, lon))
            next_id += 1
        if i == 0:
            # Hostile extras: a way with the same tag and a node outside the box.
            elements.append({"type": "way", "id": 42, "nodes": [1, 2], "tags": {"highway": "crossing"}})
            elements.append({"type": "node", "id": next_id + 500, "lat": deg(box[2] + 40),
                             "lon": deg(box[1] + 10), "tags": {"highway": "crossing"}})
        if i == 1:
            elements.append(dict(elements[3]))  # duplicated listing
        body = json.dumps({"version": 0.6, "generator": "toy fixture", "elements": elements}, indent=1)
        write(root, "overpass", overpass_query(box), body)

        ordered = nearest_neighbour_order(d["crossings"])
        assert len(ordered) <= 22
        polyline = encode_polyline(d["street"])
        route = {"status": "OK", "routes": [{"summary": d["name"], "overview_polyline": {"points": polyline}}]}
        write(root, "directions", directions_url(ordered), json.dumps(route, indent=1))
        route_paths.append((d["street"], box))

    negatives = []
    seen = set()
    for route_index, (street, box) in enumerate(route_paths):
        for p in densify_units(street):
            if p in seen:
                continue
            seen.add(p)
            if not (box[0] <= p[0] <= box[2] and box[1] <= p[1] <= box[3]):
                continue
            d = min(math.hypot(p[0] - c[0], p[1] - c[1]) for c in all_crossings)
            assert abs(d - D_MIN) > 0.5 and abs(d - D_MAX) > 0.5, f"tie-prone distance {d} at {p}"
            if D_MIN <= d <= D_MAX:
                negatives.append((p, route_index, d))

    for lat, lon in all_crossings:
        url = f"{STATICMAP}?center={coord7(lat)},{coord7(lon)}&zoom=20&size=200x225&maptype=satellite"
        write(root, "staticmap", url, tile(lat, lon, True))
    for (lat, lon), _, _ in negatives:
        url = f"{STATICMAP}?center={coord7(lat)},{coord7(lon)}&zoom=20&size=200x225&maptype=satellite"
        write(root, "staticmap", url, tile(lat, lon, False))

    (root / "regions.csv").write_text(regions_csv)
    (root / "config.toml").write_text(
        "# Offline toy city: every request is answered from the recordings in this directory.\n"
        "regions = \"regions.csv\"\n"
        "fixtures = \".\"\n"
        "network = \"offline\"\n\n"
        "[locality]\n"
        "city = \"toyville\"\n"
        "country = \"toyland\"\n"
        "continent = \"america\"\n"
        "manifest_name = \"toyville\"\n\n"
        "[rates]\n"
        "route_rate = 50\n"
        "image_rate = 200\n"
        "retry_base_delay_ms = 1\n")

    print(f"crossings={len(all_crossings)} routes={len(route_paths)} negatives={len(negatives)}")
    for (lat, lon), idx, d in negatives:
        print(f"  negative {coord7(lat)},{coord7(lon)} route={idx} nearest={d * UNIT:.6g}")


if __name__ == "__main__":
    main()
