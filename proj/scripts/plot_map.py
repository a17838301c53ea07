#!/usr/bin/env python3
# SPDX-License-Identifier: Apache-2.0
#
# beamspot   Distributed massive MIMO beamforming and PA distortion analysis
# Copyright (C) 2026 beamspot contributors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
# http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.
# ------------------------------------------------------------------------

"""Render the focusing-map triplet written by `beamspot focusing`.

Reads <stem>.bspt (binary layers) and, when present, <stem>.json for the
peak annotations. The .bspt layout is little-endian: "BSPT", u32 version,
u32 nx, u32 ny, f64 origin_x, origin_y, step, mask_radius, u32 layer
count, then row-major f64 layers (signal, distortion, mask as 0/1).
"""

import argparse
import json
import pathlib
import struct

import matplotlib
import numpy as np

matplotlib.use("Agg")
import matplotlib.pyplot as plt


def read_bspt(path):
    raw = pathlib.Path(path).read_bytes()
    magic, version, nx, ny = struct.unpack_from("<4sIII", raw, 0)
    if magic != b"BSPT" or version != 1:
        raise SystemExit(f"{path}: not a version-1 map file")
    origin_x, origin_y, step, mask_radius = struct.unpack_from("<4d", raw, 16)
    (layers,) = struct.unpack_from("<I", raw, 48)
    if layers != 3:
        raise SystemExit(f"{path}: unexpected layer count {layers}")
    data = np.frombuffer(raw, dtype="<f8", count=3 * nx * ny, offset=52)
    grids = data.reshape(3, ny, nx)
    extent = (
        origin_x,
        origin_x + (nx - 1) * step,
        origin_y,
        origin_y + (ny - 1) * step,
    )
    return grids, extent, mask_radius


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("stem", help="map stem or .bspt path")
    ap.add_argument("--out", default=None, help="output image (default <stem>.png)")
    ap.add_argument("--span", type=float, default=30.0, help="dB span below each peak")
    args = ap.parse_args()

    stem = args.stem[:-5] if args.stem.endswith(".bspt") else args.stem
    grids, extent, _ = read_bspt(stem + ".bspt")
    sidecar_path = pathlib.Path(stem + ".json")
    sidecar = json.loads(sidecar_path.read_text()) if sidecar_path.exists() else {}

    mask = grids[2] > 0.5
    fig, axes = plt.subplots(1, 2, figsize=(12, 5.2))
    for ax, layer, name in zip(axes, grids[:2], ("signal", "distortion")):
        db = 10.0 * np.log10(np.where(layer > 0.0, layer, np.nan))
        db = np.ma.array(db, mask=mask)
        top = np.nanmax(db)
        im = ax.imshow(
            db,
            origin="lower",
            extent=extent,
            vmin=top - args.span,
            vmax=top,
            cmap="inferno",
            interpolation="nearest",
        )
        title = name
        metric = sidecar.get("uniformity_db_std", {}).get(name)
        if metric is not None:
            title += f"  ({metric:.2f} dB std)"
        ax.set_title(title)
        ax.set_xlabel("x [m]")
        ax.set_ylabel("y [m]")
        for peak in sidecar.get("peaks", []):
            if peak["layer"] == name:
                ax.plot(peak["x_m"], peak["y_m"], "c+", markersize=8)
        fig.colorbar(im, ax=ax, label="received power [dB]")
    fig.tight_layout()
    out = args.out or stem + ".png"
    fig.savefig(out, dpi=140)
    print(f"wrote {out}")


if __name__ == "__main__":
    main()
