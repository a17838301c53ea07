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

"""Plot directivity CSV files written by `beamspot directivity`."""

import argparse
import csv

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt


def load(path):
    theta, sig_db, dis_db = [], [], []
    with open(path, newline="") as f:
        for row in csv.DictReader(f):
            theta.append(float(row["theta_deg"]))
            sig_db.append(float(row["signal_db"]))
            dis_db.append(float(row["distortion_db"]))
    return theta, sig_db, dis_db


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("csv", nargs="+", help="directivity CSV files")
    ap.add_argument("--out", default="directivity.png", help="output image")
    ap.add_argument("--floor", type=float, default=-40.0, help="dB axis floor")
    args = ap.parse_args()

    fig, axes = plt.subplots(
        1, len(args.csv), figsize=(6 * len(args.csv), 4.5), squeeze=False
    )
    for ax, path in zip(axes[0], args.csv):
        theta, sig_db, dis_db = load(path)
        ax.plot(theta, sig_db, "b-", label="signal")
        ax.plot(theta, dis_db, "r--", label="third-order distortion")
        ax.set_xlabel("angle from array axis [deg]")
        ax.set_ylabel("directivity [dB]")
        ax.set_xlim(0.0, 180.0)
        ax.set_ylim(bottom=args.floor)
        ax.grid(True, alpha=0.3)
        ax.legend(loc="lower center")
        ax.set_title(path)
    fig.tight_layout()
    fig.savefig(args.out, dpi=140)
    print(f"wrote {args.out}")


if __name__ == "__main__":
    main()
