#!/usr/bin/env python3
"""Convert daily gridded rainfall to an onsetbench grid-series (.gsf) file.

Accepts NetCDF (classic via scipy, NetCDF-4 via h5py) or the IMD 1-degree
binary .grd files (33 x 35 float32 per day, -999 missing). Several inputs
are concatenated in date order; days must be contiguous.

    tools/nc_to_gsf.py --out imd.gsf RF_1901.nc ... RF_2024.nc
    tools/nc_to_gsf.py --grd --out imd.gsf ind1901_rfp10.grd ...
"""

import argparse
import datetime as dt
import json
import re
import sys

import numpy as np

MAGIC = b"ONSETBENCH-GSF"
MISSING = -9999.0

# IMD 1-degree grid: centers 6.5..38.5 N, 66.5..100.5 E.
GRD_LAT = np.arange(6.5, 39.0, 1.0)
GRD_LON = np.arange(66.5, 101.0, 1.0)


def edges(centers):
    c = np.asarray(centers, dtype=float)
    if c.size < 2:
        raise ValueError("need at least two coordinates to infer edges")
    mid = 0.5 * (c[1:] + c[:-1])
    return np.concatenate([[c[0] - (mid[0] - c[0])], mid, [c[-1] + (c[-1] - mid[-1])]])


def parse_time_units(units):
    m = re.match(r"\s*(days|hours|minutes|seconds) since (\d{4})-(\d{1,2})-(\d{1,2})", units)
    if not m:
        raise ValueError("unsupported time units: %r" % units)
    scale = {"days": 1.0, "hours": 24.0, "minutes": 1440.0, "seconds": 86400.0}[m.group(1)]
    return dt.date(int(m.group(2)), int(m.group(3)), int(m.group(4))), scale


def pick(names, candidates):
    for c in candidates:
        if c in names:
            return c
    raise KeyError("none of %s in %s" % (candidates, sorted(names)))


def read_netcdf(path, variable):
    try:
        from scipy.io import netcdf_file

        f = netcdf_file(path, "r", mmap=False)
        var = f.variables
        get = lambda k: np.array(var[k].data)

        def attr(k, a):
            v = getattr(var[k], a, "")
            return v.decode() if isinstance(v, bytes) else str(v)
    except (TypeError, ValueError):
        import h5py

        f = h5py.File(path, "r")
        var = f
        get = lambda k: np.array(f[k][...])

        def attr(k, a):
            v = f[k].attrs.get(a, "")
            return v.decode() if isinstance(v, bytes) else str(v)

    names = set(var.keys())
    vname = variable or pick(names, ["RAINFALL", "rf", "rainfall", "rain", "precip"])
    lat = get(pick(names, ["LATITUDE", "lat", "latitude"]))
    lon = get(pick(names, ["LONGITUDE", "lon", "longitude"]))
    tname = pick(names, ["TIME", "time"])
    origin, scale = parse_time_units(attr(tname, "units"))
    t = get(tname)
    data = get(vname).astype(np.float64)
    fill = attr(vname, "_FillValue") or attr(vname, "missing_value")
    if fill not in ("", None):
        data[data == float(fill)] = np.nan
    data[data < -900] = np.nan
    start = origin + dt.timedelta(days=int(round(float(t[0]) / scale)))
    if lat[0] > lat[-1]:
        lat, data = lat[::-1], data[:, ::-1, :]
    return start, lat, lon, data


def read_grd(path):
    m = re.search(r"(\d{4})", path.split("/")[-1])
    if not m:
        raise ValueError("cannot find the year in %s" % path)
    year = int(m.group(1))
    raw = np.fromfile(path, dtype="<f4")
    cells = GRD_LAT.size * GRD_LON.size
    if raw.size % cells:
        raise ValueError("%s: size is not a whole number of days" % path)
    data = raw.reshape(-1, GRD_LAT.size, GRD_LON.size).astype(np.float64)
    data[data < -900] = np.nan
    return dt.date(year, 1, 1), GRD_LAT, GRD_LON, data


def write_gsf(path, variable, start, lat, lon, data):
    header = {
        "byte_order": "little",
        "calendar": "gregorian",
        "element_type": "float32",
        "lat_edges": [float(x) for x in edges(lat)],
        "lon_edges": [float(x) for x in edges(lon)],
        "missing_value": MISSING,
        "n_days": int(data.shape[0]),
        "n_lat": int(lat.size),
        "n_lon": int(lon.size),
        "schema_version": 1,
        "start_date": start.isoformat(),
        "units": "mm/day",
        "variable": variable,
    }
    out = np.where(np.isnan(data), MISSING, data).astype("<f4")
    with open(path, "wb") as f:
        f.write(MAGIC + b"\n" + json.dumps(header, separators=(",", ":")).encode() + b"\n")
        f.write(out.reshape(data.shape[0], -1).tobytes())


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.split("\n\n")[0])
    ap.add_argument("inputs", nargs="+")
    ap.add_argument("--out", required=True)
    ap.add_argument("--grd", action="store_true", help="inputs are IMD 1-degree .grd files")
    ap.add_argument("--variable", help="NetCDF variable (default: guessed)")
    ap.add_argument("--name", default="rain", help="variable name written to the header")
    args = ap.parse_args(argv)

    parts = [read_grd(p) if args.grd else read_netcdf(p, args.variable) for p in args.inputs]
    parts.sort(key=lambda p: p[0])
    lat, lon = parts[0][1], parts[0][2]
    expected = parts[0][0]
    for start, la, lo, d in parts:
        if not (np.allclose(la, lat) and np.allclose(lo, lon)):
            sys.exit("inputs are on different grids")
        if start != expected:
            sys.exit("gap or overlap in dates at %s (expected %s)" % (start, expected))
        expected = start + dt.timedelta(days=d.shape[0])
    data = np.concatenate([p[3] for p in parts], axis=0)
    write_gsf(args.out, args.name, parts[0][0], lat, lon, data)
    print("%s: %d days from %s, %d x %d cells" % (args.out, data.shape[0], parts[0][0], lat.size, lon.size))


if __name__ == "__main__":
    main()
