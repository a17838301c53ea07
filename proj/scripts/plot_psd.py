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

"""Plot spectrum CSV files written by `beamspot psd`."""

import argparse
import csv
import math

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("csv", help="spectrum CSV file")
    ap.add_argument("--out", default="psd.png", help="output image")
    ap.add_argument("--floor", type=float, default=-120.0, help="dB axis floor")
    args = ap.parse_args()

    with open(args.csv, newline="") as f:
        rows = list(csv.DictReader(f))
    names = [k[: -len("_density")] for k in rows[0] if k.endswith("_density")]

    fig, ax = plt.subplots(figsize=(8, 4.5))
    freq = [float(r["freq_offset_hz"]) / 1e6 for r in rows]
    for name in names:
        db = []
        for r in rows:
            v = float(r[name + "_density"])
            db.append(10.0 * math.log10(v) if v > 0.0 else float("nan"))
        style = "--" if "distortion" in name else "-"
        ax.plot(freq, db, style, label=name)
    ax.set_xlabel("frequency offset [MHz]")
    ax.set_ylabel("PSD [dB/Hz]")
    top = max(
        10.0 * math.log10(float(r[n + "_density"]))
        for r in rows
        for n in names
        if float(r[n + "_density"]) > 0.0
    )
    ax.set_ylim(max(args.floor, top - 80.0), top + 5.0)
    ax.grid(True, alpha=0.3)
    ax.legend()
    fig.tight_layout()
    fig.savefig(args.out, dpi=140)
    print(f"wrote {args.out}")


if __name__ == "__main__":
    main()
